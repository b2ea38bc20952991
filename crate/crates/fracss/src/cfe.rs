//! Degree-9 continued-fraction expansion (CFE) of Tustin's operator.
//!
//! The discrete fractional operator is approximated by the rational
//! function
//!
//! ```text
//! D^r(z) = (2/T)^r * P9(z^-1; r) / Q9(z^-1; r),
//! ```
//!
//! where `P9` and `Q9` are degree-9 polynomials in `z^-1` whose
//! coefficients are themselves polynomials in the order `r` with exact
//! integer coefficients. `Q9` is tabulated below; `P9` has the same
//! coefficients with the sign of every odd-index entry flipped, which is
//! equivalent to evaluating `Q9` at `-r`.
//!
//! Each `Q_i(r)` is stored in Horner form in `s = r^2` (odd-index
//! entries carry one extra factor of `r`), so evaluation uses only
//! exactly representable integer constants.

use crate::{Error, Result, SampledSignal};

/// Integer coefficient table for Q_i(r), ascending powers of s = r^2.
/// Odd-index entries are odd polynomials in r: the tabulated polynomial
/// in s is multiplied by one extra factor of r after Horner evaluation.
const Q_TABLE: [&[i64]; 10] = [
    &[34459425],                             // Q0
    &[34459425],                             // Q1 (* r)
    &[-72972900, 16216200],                  // Q2
    &[-61486425, 4729725],                   // Q3 (* r)
    &[51081030, -23648625, 945945],          // Q4
    &[33648615, -5405400, 135135],           // Q5 (* r)
    &[-13097700, 9514890, -796950, 13860],   // Q6
    &[-5742495, 1451835, -76230, 990],       // Q7 (* r)
    &[893025, -909765, 120330, -4410, 45],   // Q8
    &[147456, -52480, 4368, -120, 1],        // Q9 (* r)
];

fn check_finite_order(r: f64) -> Result<()> {
    if !r.is_finite() {
        return Err(Error::Config(format!("operator order must be finite, got {r}")));
    }
    Ok(())
}

/// Denominator coefficients `[Q_0(r), ..., Q_9(r)]` of the degree-9 CFE
/// of Tustin's operator at order `r` (coefficients of z^0..z^-9).
pub fn q9_coefficients(r: f64) -> Result<[f64; 10]> {
    check_finite_order(r)?;
    let s = r * r;
    let mut out = [0.0; 10];
    for (i, table) in Q_TABLE.iter().enumerate() {
        let mut acc = 0.0;
        for &c in table.iter().rev() {
            acc = acc * s + c as f64;
        }
        out[i] = if i % 2 == 1 { acc * r } else { acc };
    }
    Ok(out)
}

/// Numerator coefficients `[P_0(r), ..., P_9(r)]`: the `Q` coefficients
/// with the sign of every odd-index entry flipped.
pub fn p9_coefficients(r: f64) -> Result<[f64; 10]> {
    let mut out = q9_coefficients(r)?;
    for (i, v) in out.iter_mut().enumerate() {
        if i % 2 == 1 {
            *v = -*v;
        }
    }
    Ok(out)
}

/// The degree-9 numerator/denominator pair evaluated at one order.
#[derive(Debug, Clone, PartialEq)]
pub struct CfePolynomials {
    /// Operator order r.
    pub order: f64,
    /// Numerator coefficients P_0..P_9 (z^0..z^-9).
    pub p: [f64; 10],
    /// Denominator coefficients Q_0..Q_9 (z^0..z^-9).
    pub q: [f64; 10],
}

/// Evaluates both polynomial coefficient vectors at order `r`.
pub fn cfe_polynomials(r: f64) -> Result<CfePolynomials> {
    Ok(CfePolynomials { order: r, p: p9_coefficients(r)?, q: q9_coefficients(r)? })
}

/// A ready-to-run IIR realization of `(2/T)^r * P9 / Q9`.
///
/// Applying it to a signal runs
///
/// ```text
/// y_k = (1/Q_0) * ( (2/T)^r * sum_{i=0}^{9} P_i u_{k-i}
///                   - sum_{i=1}^{9} Q_i y_{k-i} ),
/// ```
///
/// with every sample before index 0 treated as zero (zero initial
/// conditions).
#[derive(Debug, Clone)]
pub struct CfeOperator {
    /// The polynomials this operator was built from.
    pub source: CfePolynomials,
    /// Sampling step in seconds.
    pub step: f64,
    /// Leading gain (2/T)^r.
    pub gain: f64,
    num: [f64; 10],
    den: [f64; 10],
}

impl CfeOperator {
    /// Gain-scaled numerator taps `(2/T)^r * P_i`.
    pub fn numerator_taps(&self) -> &[f64; 10] {
        &self.num
    }

    /// Denominator taps `Q_i`.
    pub fn denominator_taps(&self) -> &[f64; 10] {
        &self.den
    }

    /// Runs the IIR recursion over a whole signal.
    pub fn apply(&self, signal: &SampledSignal) -> Result<SampledSignal> {
        let mut filter = CfeFilter::new(self)?;
        let out: Vec<f64> = signal.samples().iter().map(|&u| filter.push(u)).collect();
        SampledSignal::new(signal.step(), out)
    }
}

/// Builds the IIR operator of order `r` for step `T`.
///
/// Errors: `T <= 0` or non-finite inputs.
pub fn cfe_operator(r: f64, t_step: f64) -> Result<CfeOperator> {
    if !t_step.is_finite() || t_step <= 0.0 {
        return Err(Error::Config(format!(
            "step T must be finite and positive, got {t_step}"
        )));
    }
    let source = cfe_polynomials(r)?;
    let gain = (2.0 / t_step).powf(r);
    if !gain.is_finite() {
        return Err(Error::Config(format!(
            "operator gain (2/T)^r is not finite for r={r}, T={t_step}"
        )));
    }
    let mut num = [0.0; 10];
    for i in 0..10 {
        num[i] = gain * source.p[i];
    }
    let den = source.q;
    if den[0] == 0.0 {
        return Err(Error::Config("leading denominator tap Q_0 is zero".into()));
    }
    Ok(CfeOperator { source, step: t_step, gain, num, den })
}

/// Streaming state of one [`CfeOperator`]: ring buffers holding the ten
/// most recent input and output samples.
#[derive(Debug, Clone)]
pub struct CfeFilter {
    num: [f64; 10],
    den: [f64; 10],
    u_hist: Ring10,
    y_hist: Ring10,
}

impl CfeFilter {
    /// Fresh filter with all-zero history.
    pub fn new(op: &CfeOperator) -> Result<Self> {
        if op.den[0] == 0.0 {
            return Err(Error::Config("leading denominator tap Q_0 is zero".into()));
        }
        Ok(Self { num: op.num, den: op.den, u_hist: Ring10::new(), y_hist: Ring10::new() })
    }

    /// Consumes the next input sample and returns the next output sample.
    pub fn push(&mut self, u: f64) -> f64 {
        let mut acc = self.num[0] * u;
        for i in 1..10 {
            acc += self.num[i] * self.u_hist.lag(i - 1);
            acc -= self.den[i] * self.y_hist.lag(i - 1);
        }
        let y = acc / self.den[0];
        self.u_hist.push(u);
        self.y_hist.push(y);
        y
    }
}

/// Fixed ten-slot ring buffer of recent samples, zero-initialized.
///
/// `lag(0)` is the most recently pushed sample, `lag(9)` the oldest.
#[derive(Debug, Clone)]
pub struct Ring10 {
    buf: [f64; 10],
    head: usize,
}

impl Ring10 {
    /// All-zero history.
    pub fn new() -> Self {
        Self { buf: [0.0; 10], head: 0 }
    }

    /// Appends a sample, evicting the oldest.
    pub fn push(&mut self, v: f64) {
        self.head = (self.head + 9) % 10;
        self.buf[self.head] = v;
    }

    /// Sample pushed `i` steps ago (`i = 0` is the newest); zero if
    /// nothing has been pushed that far back.
    pub fn lag(&self, i: usize) -> f64 {
        debug_assert!(i < 10);
        self.buf[(self.head + i) % 10]
    }

    /// Bytes held by the sample storage.
    pub const fn bytes() -> usize {
        10 * std::mem::size_of::<f64>()
    }
}

impl Default for Ring10 {
    fn default() -> Self {
        Self::new()
    }
}

/// Reference oracle: Padé-style rational reconstruction of
/// `((1-x)/(1+x))^r`, used only by tests to cross-validate the
/// tabulated polynomials.
pub mod reference {
    use crate::{Error, Result};

    /// Computes the degree-`depth` rational approximant (numerator and
    /// denominator both of degree `depth`) of `((1-x)/(1+x))^r` from its
    /// Taylor series, returning `(numerator, denominator)` normalized so
    /// the constant denominator coefficient is +1 (matching the sign of
    /// the tabulated `Q_0`).
    ///
    /// Errors: `depth == 0`, non-finite `r`, or a degenerate coefficient
    /// system (e.g. the function is exactly rational of lower degree, as
    /// at integer `r` with `depth` above that degree).
    pub fn cfe_expand_reference(r: f64, depth: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        if !r.is_finite() {
            return Err(Error::Config(format!("order must be finite, got {r}")));
        }
        if depth == 0 {
            return Err(Error::Config("expansion depth must be at least 1".into()));
        }
        let d = depth;
        let m = 2 * d + 1;
        // Taylor coefficients of (1-x)^r: t_k = (-1)^k * C(r, k).
        let mut top = vec![0.0; m];
        top[0] = 1.0;
        for k in 1..m {
            top[k] = -top[k - 1] * (r - k as f64 + 1.0) / k as f64;
        }
        // Taylor coefficients of (1+x)^(-r): s_k = C(-r, k).
        let mut bot = vec![0.0; m];
        bot[0] = 1.0;
        for k in 1..m {
            bot[k] = bot[k - 1] * (-r - k as f64 + 1.0) / k as f64;
        }
        // Cauchy product.
        let mut c = vec![0.0; m];
        for i in 0..m {
            for j in 0..=i {
                c[i] += top[j] * bot[i - j];
            }
        }
        // Solve the d x d linear system for denominator coefficients
        // q_1..q_d (q_0 = 1): sum_j q_j c_{d+k-j} = -c_{d+k}, k = 1..d.
        let mut a = vec![vec![0.0; d]; d];
        let mut rhs = vec![0.0; d];
        let mut scale: f64 = 0.0;
        for k in 1..=d {
            for j in 1..=d {
                a[k - 1][j - 1] = c[d + k - j];
                scale = scale.max(c[d + k - j].abs());
            }
            rhs[k - 1] = -c[d + k];
        }
        let q_tail = solve_with_pivoting(&mut a, &mut rhs, scale)?;
        let mut q = Vec::with_capacity(d + 1);
        q.push(1.0);
        q.extend_from_slice(&q_tail);
        // Numerator from the convolution p_i = sum_{j<=i} q_j c_{i-j}.
        let mut p = vec![0.0; d + 1];
        for i in 0..=d {
            for j in 0..=i {
                p[i] += q[j] * c[i - j];
            }
        }
        Ok((p, q))
    }

    /// Gaussian elimination with partial pivoting; reports a
    /// non-convergent expansion when a pivot collapses relative to the
    /// system's largest entry.
    fn solve_with_pivoting(a: &mut [Vec<f64>], rhs: &mut [f64], scale: f64) -> Result<Vec<f64>> {
        let n = rhs.len();
        let floor = 1e-10 * scale.max(f64::MIN_POSITIVE);
        for col in 0..n {
            let mut best = col;
            for row in col + 1..n {
                if a[row][col].abs() > a[best][col].abs() {
                    best = row;
                }
            }
            if a[best][col].abs() <= floor {
                return Err(Error::NonConvergent(format!(
                    "degenerate coefficient system at elimination column {col} \
                     (the function is rational of lower degree at this order)"
                )));
            }
            a.swap(col, best);
            rhs.swap(col, best);
            for row in col + 1..n {
                let f = a[row][col] / a[col][col];
                for k in col..n {
                    a[row][k] -= f * a[col][k];
                }
                rhs[row] -= f * rhs[col];
            }
        }
        let mut x = vec![0.0; n];
        for col in (0..n).rev() {
            let mut acc = rhs[col];
            for k in col + 1..n {
                acc -= a[col][k] * x[k];
            }
            x[col] = acc / a[col][col];
        }
        Ok(x)
    }
}

//! Grünwald-Letnikov differintegral.
//!
//! The differintegral of real order `r` (positive r differentiates,
//! negative r integrates) of a sampled signal f is approximated by the
//! weighted history sum
//!
//! ```text
//! (D^r f)(t_k) ~= T^(-r) * sum_{j=0}^{min(k, L)} b_j * f(t_{k-j}),
//! ```
//!
//! where the weights are the signed binomial coefficients generated by
//! the recurrence `b_0 = 1`, `b_j = (1 - (r+1)/j) * b_{j-1}`, and `L` is
//! the memory length in samples (the short-memory truncation: only the
//! most recent `L` history samples enter the sum).

use crate::{Error, Result, SampledSignal};

/// Binomial weight sequence of a Grünwald-Letnikov operator of order
/// `order`, `coeffs[j] = b_j` for `j = 0..=n`.
///
/// Invariants: `coeffs[0] == 1` exactly, and each following entry obeys
/// the recurrence above bit for bit. For integer `order = m >= 0` every
/// entry beyond index `m` vanishes (an m-th backward difference has
/// m + 1 taps).
#[derive(Debug, Clone, PartialEq)]
pub struct GlCoefficients {
    /// Operator order r (negative r integrates).
    pub order: f64,
    /// Weights b_0..b_n (or scaled taps when produced by
    /// [`pse_operator_coefficients`]).
    pub coeffs: Vec<f64>,
}

/// Generates the binomial weights `b_0..b_n` for operator order `r`.
///
/// Errors: `r` non-finite or `n == 0`.
pub fn gl_coefficients(r: f64, n: usize) -> Result<GlCoefficients> {
    if !r.is_finite() {
        return Err(Error::Config(format!("operator order must be finite, got {r}")));
    }
    if n == 0 {
        return Err(Error::Config("coefficient count n must be at least 1".into()));
    }
    let mut coeffs = Vec::with_capacity(n + 1);
    coeffs.push(1.0);
    for j in 1..=n {
        let prev = coeffs[j - 1];
        coeffs.push((1.0 - (r + 1.0) / j as f64) * prev);
    }
    Ok(GlCoefficients { order: r, coeffs })
}

/// Applies the order-`r` differintegral to `signal` with a history
/// window of `memory_len_samples` samples.
///
/// Output sample k equals `T^(-r) * sum_{j=0}^{min(k, L)} b_j * f((k-j)T)`;
/// the output has the same length and step as the input. The sum is
/// accumulated with j ascending so results are run-to-run deterministic.
///
/// Errors: non-finite `r` or `memory_len_samples == 0`.
pub fn gl_differintegrate(
    signal: &SampledSignal,
    r: f64,
    memory_len_samples: usize,
) -> Result<SampledSignal> {
    if memory_len_samples == 0 {
        return Err(Error::Config("memory_len_samples must be at least 1".into()));
    }
    let n = signal.len();
    let window = memory_len_samples.min(n.saturating_sub(1)).max(1);
    let b = gl_coefficients(r, window)?;
    let scale = signal.step().powf(-r);
    let f = signal.samples();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let mut acc = 0.0;
        for j in 0..=k.min(memory_len_samples) {
            acc += b.coeffs[j] * f[k - j];
        }
        out.push(scale * acc);
    }
    SampledSignal::new(signal.step(), out)
}

/// Impulse-response taps `T^(-r) * b_j`, `j = 0..=l_samples`, of the
/// truncated discrete operator D^r(z). Convolving a signal with these
/// taps reproduces [`gl_differintegrate`].
///
/// The returned structure reuses [`GlCoefficients`] with the scale
/// folded into each entry, so its `coeffs[0]` equals `T^(-r)` rather
/// than 1.
pub fn pse_operator_coefficients(r: f64, t_step: f64, l_samples: usize) -> Result<GlCoefficients> {
    if !t_step.is_finite() || t_step <= 0.0 {
        return Err(Error::Config(format!(
            "step T must be finite and positive, got {t_step}"
        )));
    }
    let base = gl_coefficients(r, l_samples)?;
    let scale = t_step.powf(-r);
    let coeffs = base.coeffs.iter().map(|&b| scale * b).collect();
    Ok(GlCoefficients { order: r, coeffs })
}

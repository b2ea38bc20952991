//! State-space decomposition of the two-term fractional plant and the
//! two discrete-time simulators built on it.
//!
//! The plant
//!
//! ```text
//! a2 * D^alpha y(t) + a1 * D^beta y(t) + a0 * y(t) = u(t),
//! alpha > beta > 0,
//! ```
//!
//! is rewritten with states `x1 = y` and `x2 = D^beta y`:
//!
//! ```text
//! D^beta  x1 = x2
//! D^delta x2 = -(a0/a2) x1 - (a1/a2) x2 + (1/a2) u,    delta = alpha - beta,
//! ```
//!
//! i.e. `D^q x = A x + B u`, `y = C x` with component orders
//! `q = (beta, delta)`. Both simulators assume the system is at rest for
//! `t <= 0` (zero initial history); nonzero initial states are rejected.
//!
//! Two discretizations are provided:
//!
//! * [`simulate_pse`] — explicit power-series (truncated-memory GL)
//!   updates: each state's newest sample is isolated from its own
//!   operator history while the coupling terms are taken from the
//!   previous time index.
//! * [`simulate_cfe`] — ninth-order rational (CFE-of-Tustin) operator
//!   realization: both newest state samples appear in both equations, so
//!   every step solves the resulting 2x2 linear system exactly. Each
//!   state keeps exactly ten past samples in fixed rings.
//!
//! `memory_bytes_peak` in [`SimulationResult`] counts the per-state
//! history the discretization must retain (two windows of
//! `min(n_steps, memory)` samples for the power-series scheme, two
//! ten-slot rings for the rational scheme). Recorded output trajectories
//! and input plumbing are not part of that figure.

use std::collections::VecDeque;

use crate::cfe::{cfe_operator, Ring10};
use crate::gl::gl_coefficients;
use crate::{Error, Result, SampledSignal};

/// A validated two-term fractional plant
/// `a2 D^alpha y + a1 D^beta y + a0 y = u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FodeModel {
    a2: f64,
    a1: f64,
    a0: f64,
    alpha: f64,
    beta: f64,
}

impl FodeModel {
    /// Validates and stores the plant coefficients.
    ///
    /// Errors: any non-finite value, `a2 == 0`, or violated order
    /// constraint `alpha > beta > 0`.
    pub fn new(a2: f64, a1: f64, a0: f64, alpha: f64, beta: f64) -> Result<Self> {
        for (name, v) in [("a2", a2), ("a1", a1), ("a0", a0), ("alpha", alpha), ("beta", beta)] {
            if !v.is_finite() {
                return Err(Error::Config(format!("{name} must be finite, got {v}")));
            }
        }
        if a2 == 0.0 {
            return Err(Error::Config("a2 must be nonzero (it scales the leading term)".into()));
        }
        if beta <= 0.0 {
            return Err(Error::Config(format!("beta must be positive, got {beta}")));
        }
        if alpha <= beta {
            return Err(Error::Config(format!(
                "alpha must exceed beta, got alpha = {alpha}, beta = {beta}"
            )));
        }
        Ok(Self { a2, a1, a0, alpha, beta })
    }

    /// Leading coefficient a2.
    pub fn a2(&self) -> f64 {
        self.a2
    }

    /// Middle coefficient a1.
    pub fn a1(&self) -> f64 {
        self.a1
    }

    /// Zero-order coefficient a0.
    pub fn a0(&self) -> f64 {
        self.a0
    }

    /// Higher derivative order alpha.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Lower derivative order beta.
    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// The plant in two-state companion form `D^q x = A x + B u`, `y = C x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateSpaceModel {
    /// Component derivative orders `(beta, alpha - beta)`.
    pub orders: (f64, f64),
    /// System matrix `[[0, 1], [-a0/a2, -a1/a2]]`.
    pub a: [[f64; 2]; 2],
    /// Input vector `[0, 1/a2]`.
    pub b: [f64; 2],
    /// Output vector `[1, 0]` (the output is x1).
    pub c: [f64; 2],
}

/// Rewrites the validated plant in two-state companion form.
pub fn decompose(model: &FodeModel) -> StateSpaceModel {
    StateSpaceModel {
        orders: (model.beta, model.alpha - model.beta),
        a: [[0.0, 1.0], [-model.a0 / model.a2, -model.a1 / model.a2]],
        b: [0.0, 1.0 / model.a2],
        c: [1.0, 0.0],
    }
}

/// One simulated trajectory on the uniform grid `t_k = k * step`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    /// Sampling step in seconds.
    pub step: f64,
    /// Time stamps `k * step`.
    pub t: Vec<f64>,
    /// Input samples actually applied.
    pub u: Vec<f64>,
    /// Output samples (`y = x1`).
    pub y: Vec<f64>,
    /// First state trajectory.
    pub x1: Vec<f64>,
    /// Second state trajectory.
    pub x2: Vec<f64>,
    /// Bytes of per-state operator history the scheme retains.
    pub memory_bytes_peak: usize,
}

fn require_zero_initial_state(x1_0: f64, x2_0: f64) -> Result<()> {
    if x1_0 != 0.0 || x2_0 != 0.0 {
        return Err(Error::Config(format!(
            "nonzero initial state ({x1_0}, {x2_0}) is not supported: the two-state \
             form assumes the system is at rest (zero history) for t <= 0"
        )));
    }
    Ok(())
}

/// Incremental power-series (truncated GL) state update.
///
/// Each [`step`](Self::step) advances the pair of states one sample,
/// keeping at most `memory_len_samples` past samples per state.
#[derive(Debug, Clone)]
pub struct PseStepper {
    window: usize,
    b_inner: Vec<f64>,
    b_outer: Vec<f64>,
    scale_inner: f64,
    scale_outer: f64,
    a10: f64,
    a11: f64,
    b1: f64,
    x1_hist: VecDeque<f64>,
    x2_hist: VecDeque<f64>,
    steps: usize,
}

impl PseStepper {
    /// Stepper with zero initial state.
    pub fn new(ss: &StateSpaceModel, t_step: f64, memory_len_samples: usize) -> Result<Self> {
        Self::with_initial_state(ss, t_step, memory_len_samples, 0.0, 0.0)
    }

    /// Stepper with an explicit initial state. Only the rest state
    /// `(0, 0)` is accepted: the underlying operators act on the whole
    /// sample history, so a nonzero start would need a nonzero past.
    pub fn with_initial_state(
        ss: &StateSpaceModel,
        t_step: f64,
        memory_len_samples: usize,
        x1_0: f64,
        x2_0: f64,
    ) -> Result<Self> {
        require_zero_initial_state(x1_0, x2_0)?;
        if !t_step.is_finite() || t_step <= 0.0 {
            return Err(Error::Config(format!(
                "step T must be finite and positive, got {t_step}"
            )));
        }
        if memory_len_samples == 0 {
            return Err(Error::Config("memory length must be at least 1 sample".into()));
        }
        let (beta, delta) = ss.orders;
        let b_inner = gl_coefficients(beta, memory_len_samples)?.coeffs;
        let b_outer = gl_coefficients(delta, memory_len_samples)?.coeffs;
        let mut x1_hist = VecDeque::with_capacity(memory_len_samples + 1);
        let mut x2_hist = VecDeque::with_capacity(memory_len_samples + 1);
        x1_hist.push_back(x1_0);
        x2_hist.push_back(x2_0);
        Ok(Self {
            window: memory_len_samples,
            b_inner,
            b_outer,
            scale_inner: t_step.powf(beta),
            scale_outer: t_step.powf(delta),
            a10: ss.a[1][0],
            a11: ss.a[1][1],
            b1: ss.b[1],
            x1_hist,
            x2_hist,
            steps: 0,
        })
    }

    /// Current states `(x1, x2)` at the most recent time index.
    pub fn state(&self) -> (f64, f64) {
        (*self.x1_hist.back().unwrap(), *self.x2_hist.back().unwrap())
    }

    /// Bytes of state history this stepper retains at capacity.
    pub fn history_bytes(&self) -> usize {
        2 * self.window * std::mem::size_of::<f64>()
    }

    /// Advances from time index k to k + 1 driven by `u = u_k`.
    ///
    /// The newest sample of each operator history is isolated:
    ///
    /// ```text
    /// x1[k+1] = T^beta  * x2[k] - sum_{j=1}^{m} b_j(beta)  x1[k+1-j]
    /// x2[k+1] = T^delta * (A10 x1[k] + A11 x2[k] + B1 u_k)
    ///           - sum_{j=1}^{m} b_j(delta) x2[k+1-j],
    /// ```
    ///
    /// with `m = min(k + 1, memory)`. Returns the new `(x1, x2)`;
    /// errors with the failing step index if either becomes non-finite.
    pub fn step(&mut self, u: f64) -> Result<(f64, f64)> {
        let k = self.steps;
        let (x1_k, x2_k) = self.state();
        let m = self.x1_hist.len(); // == min(k + 1, window)
        let mut sum1 = 0.0;
        let mut sum2 = 0.0;
        for j in 1..=m {
            sum1 += self.b_inner[j] * self.x1_hist[m - j];
            sum2 += self.b_outer[j] * self.x2_hist[m - j];
        }
        let x1_new = self.scale_inner * x2_k - sum1;
        let load = self.a10 * x1_k + self.a11 * x2_k + self.b1 * u;
        let x2_new = self.scale_outer * load - sum2;
        if !x1_new.is_finite() || !x2_new.is_finite() {
            return Err(Error::Instability { step: k + 1 });
        }
        self.x1_hist.push_back(x1_new);
        self.x2_hist.push_back(x2_new);
        if self.x1_hist.len() > self.window {
            self.x1_hist.pop_front();
            self.x2_hist.pop_front();
        }
        self.steps = k + 1;
        Ok((x1_new, x2_new))
    }
}

/// Incremental ninth-order rational (CFE-of-Tustin) state update.
///
/// Both operator identities involve the newest samples of both states,
/// so each [`step`](Self::step) solves a 2x2 linear system. Exactly ten
/// past samples per state are kept, in fixed-length rings.
#[derive(Debug, Clone)]
pub struct CfeStepper {
    num_inner: [f64; 10],
    den_inner: [f64; 10],
    num_outer: [f64; 10],
    den_outer: [f64; 10],
    a10: f64,
    a11: f64,
    b1: f64,
    // Newest-sample system [a11_ a12_; a21_ a22_] [x1; x2] = [r1; r2].
    m11: f64,
    m12: f64,
    m21: f64,
    m22: f64,
    det: f64,
    x1_hist: Ring10,
    x2_hist: Ring10,
    drive_hist: Ring10,
    steps: usize,
}

impl CfeStepper {
    /// Stepper with zero initial state.
    pub fn new(ss: &StateSpaceModel, t_step: f64) -> Result<Self> {
        Self::with_initial_state(ss, t_step, 0.0, 0.0)
    }

    /// Stepper with an explicit initial state; only `(0, 0)` is
    /// accepted (see [`PseStepper::with_initial_state`]).
    pub fn with_initial_state(
        ss: &StateSpaceModel,
        t_step: f64,
        x1_0: f64,
        x2_0: f64,
    ) -> Result<Self> {
        require_zero_initial_state(x1_0, x2_0)?;
        let (beta, delta) = ss.orders;
        let inner = cfe_operator(beta, t_step)?;
        let outer = cfe_operator(delta, t_step)?;
        let num_inner = *inner.numerator_taps();
        let den_inner = *inner.denominator_taps();
        let num_outer = *outer.numerator_taps();
        let den_outer = *outer.denominator_taps();
        if den_inner[0] == 0.0 || den_outer[0] == 0.0 {
            return Err(Error::Config("leading denominator tap Q_0 is zero".into()));
        }
        let (a10, a11, b1) = (ss.a[1][0], ss.a[1][1], ss.b[1]);
        // Collect the newest-sample terms of both identities:
        //   num_b[0] x1[n] - den_b[0] x2[n]                    = r1
        //   -den_d[0] a10 x1[n] + (num_d[0] - den_d[0] a11) x2[n]
        //                        - den_d[0] b1 u[n]            = r2 - den_d[0] b1 u[n]
        let m11 = num_inner[0];
        let m12 = -den_inner[0];
        let m21 = -den_outer[0] * a10;
        let m22 = num_outer[0] - den_outer[0] * a11;
        let det = m11 * m22 - m12 * m21;
        if det == 0.0 || !det.is_finite() {
            return Err(Error::Config(format!(
                "the newest-sample 2x2 system is singular for this model at T = {t_step} \
                 (determinant {det}); the rational scheme cannot advance"
            )));
        }
        Ok(Self {
            num_inner,
            den_inner,
            num_outer,
            den_outer,
            a10,
            a11,
            b1,
            m11,
            m12,
            m21,
            m22,
            det,
            x1_hist: Ring10::new(),
            x2_hist: Ring10::new(),
            drive_hist: Ring10::new(),
            steps: 0,
        })
    }

    /// Current states `(x1, x2)` at the most recent time index.
    pub fn state(&self) -> (f64, f64) {
        (self.x1_hist.lag(0), self.x2_hist.lag(0))
    }

    /// Bytes of state history this stepper retains (two ten-slot rings).
    pub fn history_bytes(&self) -> usize {
        2 * Ring10::bytes()
    }

    /// Advances to the next time index n, with `u` the input sample the
    /// plant holds while making this advance (the signal value at index
    /// n in open loop; the latest computed actuation in a feedback
    /// loop).
    ///
    /// Both ninth-order operator identities are enforced at index n and
    /// solved simultaneously for the two newest samples. The load
    /// history `w[m] = A10 x1[m] + A11 x2[m] + B1 u_held[m]` is
    /// recomputed from the rings; everything before the first advance is
    /// zero, including the load at index 0, which encodes the rest
    /// premise: no forcing has acted on or before t = 0. Returns the new
    /// `(x1, x2)`; errors with the step index if either is non-finite.
    pub fn step(&mut self, u: f64) -> Result<(f64, f64)> {
        let n = self.steps + 1;
        let mut r1 = 0.0;
        let mut r2 = self.den_outer[0] * self.b1 * u;
        for i in 1..10 {
            // Ring lag i-1 is the sample at index n-i; slots never
            // written (indices <= 0) still hold their initial zeros, so
            // the rest-history and zero-load conventions need no branch.
            let x1_l = self.x1_hist.lag(i - 1);
            let x2_l = self.x2_hist.lag(i - 1);
            let w_l = self.a10 * x1_l + self.a11 * x2_l + self.b1 * self.drive_hist.lag(i - 1);
            r1 += self.den_inner[i] * x2_l - self.num_inner[i] * x1_l;
            r2 += self.den_outer[i] * w_l - self.num_outer[i] * x2_l;
        }
        let x1_new = (r1 * self.m22 - self.m12 * r2) / self.det;
        let x2_new = (self.m11 * r2 - r1 * self.m21) / self.det;
        if !x1_new.is_finite() || !x2_new.is_finite() {
            return Err(Error::Instability { step: n });
        }
        self.x1_hist.push(x1_new);
        self.x2_hist.push(x2_new);
        self.drive_hist.push(u);
        self.steps = n;
        Ok((x1_new, x2_new))
    }
}

fn check_input_length(input: &SampledSignal, n_steps: usize) -> Result<()> {
    if input.len() < n_steps + 1 {
        return Err(Error::Config(format!(
            "input provides {} samples but n_steps = {} requires at least {}",
            input.len(),
            n_steps,
            n_steps + 1
        )));
    }
    Ok(())
}

/// Simulates the plant with the power-series scheme for `n_steps`
/// advances (the result holds `n_steps + 1` rows including t = 0).
///
/// `memory_len_samples` truncates each state's operator history; pass a
/// value `>= n_steps` for untruncated behavior. The input must provide
/// at least `n_steps + 1` samples; its step defines the grid.
pub fn simulate_pse(
    ss: &StateSpaceModel,
    input: &SampledSignal,
    memory_len_samples: usize,
    n_steps: usize,
) -> Result<SimulationResult> {
    if memory_len_samples == 0 {
        return Err(Error::Config("memory length must be at least 1 sample".into()));
    }
    check_input_length(input, n_steps)?;
    let window = memory_len_samples.min(n_steps.max(1));
    let mut stepper = PseStepper::new(ss, input.step(), window)?;
    let u = input.samples();
    let mut x1 = Vec::with_capacity(n_steps + 1);
    let mut x2 = Vec::with_capacity(n_steps + 1);
    x1.push(0.0);
    x2.push(0.0);
    for k in 0..n_steps {
        let (x1_new, x2_new) = stepper.step(u[k])?;
        x1.push(x1_new);
        x2.push(x2_new);
    }
    finish_result(input, n_steps, x1, x2, 2 * 8 * memory_len_samples.min(n_steps))
}

/// Simulates the plant with the ninth-order rational scheme for
/// `n_steps` advances (the result holds `n_steps + 1` rows including
/// t = 0). Each advance to index n applies the input sample at index n.
///
/// The history footprint is fixed: ten samples per state regardless of
/// horizon.
pub fn simulate_cfe(
    ss: &StateSpaceModel,
    input: &SampledSignal,
    n_steps: usize,
) -> Result<SimulationResult> {
    check_input_length(input, n_steps)?;
    let mut stepper = CfeStepper::new(ss, input.step())?;
    let u = input.samples();
    let mut x1 = Vec::with_capacity(n_steps + 1);
    let mut x2 = Vec::with_capacity(n_steps + 1);
    x1.push(0.0);
    x2.push(0.0);
    for n in 1..=n_steps {
        let (x1_new, x2_new) = stepper.step(u[n])?;
        x1.push(x1_new);
        x2.push(x2_new);
    }
    let bytes = stepper.history_bytes();
    finish_result(input, n_steps, x1, x2, bytes)
}

fn finish_result(
    input: &SampledSignal,
    n_steps: usize,
    x1: Vec<f64>,
    x2: Vec<f64>,
    memory_bytes_peak: usize,
) -> Result<SimulationResult> {
    let t_step = input.step();
    let t: Vec<f64> = (0..=n_steps).map(|k| k as f64 * t_step).collect();
    let u: Vec<f64> = input.samples()[..=n_steps].to_vec();
    let y = x1.clone();
    Ok(SimulationResult { step: t_step, t, u, y, x1, x2, memory_bytes_peak })
}

/// Controllability analysis of the two-state form.
#[derive(Debug, Clone, PartialEq)]
pub struct ControllabilityReport {
    /// Controllability matrix `[B | A B]`.
    pub q_r: [[f64; 2]; 2],
    /// Numerical rank of `q_r`.
    pub rank: usize,
    /// Relative singular-value cutoff that produced `rank`.
    pub tolerance: f64,
}

/// Builds `Q_R = [B | A B]` and ranks it by singular values: a value
/// counts toward the rank when it exceeds `tolerance * sigma_max`.
/// `tolerance` defaults to 1e-9.
pub fn controllability(
    ss: &StateSpaceModel,
    tolerance: Option<f64>,
) -> Result<ControllabilityReport> {
    let tol = tolerance.unwrap_or(1e-9);
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::Config(format!(
            "rank tolerance must be finite and positive, got {tol}"
        )));
    }
    let ab = [
        ss.a[0][0] * ss.b[0] + ss.a[0][1] * ss.b[1],
        ss.a[1][0] * ss.b[0] + ss.a[1][1] * ss.b[1],
    ];
    let q_r = [[ss.b[0], ab[0]], [ss.b[1], ab[1]]];
    let sigma = singular_values_2x2(&q_r);
    let rank = if sigma[0] == 0.0 {
        0
    } else {
        sigma.iter().filter(|&&s| s > tol * sigma[0]).count()
    };
    Ok(ControllabilityReport { q_r, rank, tolerance: tol })
}

/// Singular values of a 2x2 matrix, largest first, via the closed-form
/// eigenvalues of M^T M.
fn singular_values_2x2(m: &[[f64; 2]; 2]) -> [f64; 2] {
    let p = m[0][0] * m[0][0] + m[1][0] * m[1][0];
    let q = m[0][1] * m[0][1] + m[1][1] * m[1][1];
    let s = m[0][0] * m[0][1] + m[1][0] * m[1][1];
    let gap = ((p - q) * (p - q) + 4.0 * s * s).sqrt();
    let hi = 0.5 * ((p + q) + gap);
    let lo = 0.5 * ((p + q) - gap);
    [hi.max(0.0).sqrt(), lo.max(0.0).sqrt()]
}

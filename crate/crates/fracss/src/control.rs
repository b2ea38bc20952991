//! Fractional PI^lambda D^delta controller and unity-feedback loop
//! simulation.
//!
//! The controller acting on an error signal e is
//!
//! ```text
//! u = K e + Ti * D^(-lambda) e + Td * D^(delta) e,
//! ```
//!
//! with both differintegrals evaluated under zero history by either the
//! power-series scheme (truncated GL window) or the ninth-order rational
//! scheme. The closed loop is standard unity negative feedback: at each
//! index k the plant output is measured, `e_k = setpoint_k - y_k`,
//! `u_k` follows from the controller recursion through index k, and the
//! plant advances one step driven by `u_k` — strictly causal, since the
//! plant recursions consume `u_k` only for the next-step states.
//!
//! A weakly damped fractional term can destabilize the loop; divergence
//! is reported as an instability error carrying the first bad step
//! rather than prevented by any design check.

use std::collections::VecDeque;

use crate::cfe::{cfe_operator, CfeFilter};
use crate::gl::{gl_coefficients, gl_differintegrate};
use crate::statespace::{
    decompose, CfeStepper, FodeModel, PseStepper, SimulationResult, StateSpaceModel,
};
use crate::{Error, Result, SampledSignal};

/// Discretization used for every fractional operator in a controller or
/// loop: the plant state updates and the controller differintegrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Power-series (truncated GL) operators with a shared history
    /// window of `memory_samples` samples.
    Pse {
        /// History window in samples for every operator in the run.
        memory_samples: usize,
    },
    /// Ninth-order rational (CFE-of-Tustin) operators; fixed ten-sample
    /// histories.
    Cfe,
}

/// Validated gains and orders of a PI^lambda D^delta controller.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerSpec {
    k: f64,
    ti: f64,
    td: f64,
    lambda: f64,
    delta: f64,
}

impl ControllerSpec {
    /// Validates gains and orders.
    ///
    /// Errors: non-finite values, negative `lambda` or `delta`, or
    /// `lambda == 0` with `ti != 0` (a zero-order integral term would
    /// duplicate the proportional term).
    pub fn new(k: f64, ti: f64, td: f64, lambda: f64, delta: f64) -> Result<Self> {
        for (name, v) in [("K", k), ("Ti", ti), ("Td", td), ("lambda", lambda), ("delta", delta)]
        {
            if !v.is_finite() {
                return Err(Error::Config(format!("{name} must be finite, got {v}")));
            }
        }
        if lambda < 0.0 {
            return Err(Error::Config(format!(
                "integral order lambda must be >= 0, got {lambda}"
            )));
        }
        if delta < 0.0 {
            return Err(Error::Config(format!(
                "derivative order delta must be >= 0, got {delta}"
            )));
        }
        if lambda == 0.0 && ti != 0.0 {
            return Err(Error::Config(
                "lambda = 0 with Ti != 0 makes the integral term a duplicate \
                 proportional gain; set Ti = 0 or lambda > 0"
                    .into(),
            ));
        }
        Ok(Self { k, ti, td, lambda, delta })
    }

    /// Proportional gain K.
    pub fn k(&self) -> f64 {
        self.k
    }

    /// Integral gain Ti.
    pub fn ti(&self) -> f64 {
        self.ti
    }

    /// Derivative gain Td.
    pub fn td(&self) -> f64 {
        self.td
    }

    /// Integral order lambda.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Derivative order delta.
    pub fn delta(&self) -> f64 {
        self.delta
    }
}

/// Evaluates the controller over a whole error signal.
///
/// `u_k = K e_k + Ti (D^(-lambda) e)_k + Td (D^(delta) e)_k`; terms with
/// an exactly zero gain are skipped, so a pure proportional controller
/// is a samplewise multiplication with no round-off from idle terms.
pub fn controller_output(
    ctrl: &ControllerSpec,
    error: &SampledSignal,
    scheme: Scheme,
) -> Result<SampledSignal> {
    let mut out: Vec<f64> = error.samples().iter().map(|&e| ctrl.k * e).collect();
    let mut add_term = |gain: f64, order: f64| -> Result<()> {
        if gain == 0.0 {
            return Ok(());
        }
        let term = match scheme {
            Scheme::Pse { memory_samples } => gl_differintegrate(error, order, memory_samples)?,
            Scheme::Cfe => cfe_operator(order, error.step())?.apply(error)?,
        };
        for (o, v) in out.iter_mut().zip(term.samples()) {
            *o += gain * v;
        }
        Ok(())
    };
    add_term(ctrl.ti, -ctrl.lambda)?;
    add_term(ctrl.td, ctrl.delta)?;
    SampledSignal::new(error.step(), out)
}

/// One fractional controller term evaluated incrementally, sample by
/// sample, matching the batch evaluation bit for bit.
enum TermFilter {
    Gl {
        scale: f64, // T^(-order)
        coeffs: Vec<f64>,
        window: usize,
        hist: VecDeque<f64>,
    },
    Cfe(CfeFilter),
}

impl TermFilter {
    fn push(&mut self, e: f64) -> f64 {
        match self {
            TermFilter::Gl { scale, coeffs, window, hist } => {
                hist.push_back(e);
                if hist.len() > *window + 1 {
                    hist.pop_front();
                }
                let len = hist.len();
                let mut acc = 0.0;
                for j in 0..len {
                    acc += coeffs[j] * hist[len - 1 - j];
                }
                *scale * acc
            }
            TermFilter::Cfe(filter) => filter.push(e),
        }
    }
}

struct ControllerFilter {
    k: f64,
    integral: Option<(f64, TermFilter)>,
    derivative: Option<(f64, TermFilter)>,
}

impl ControllerFilter {
    fn new(ctrl: &ControllerSpec, t_step: f64, scheme: Scheme, n_steps: usize) -> Result<Self> {
        let build = |order: f64| -> Result<TermFilter> {
            Ok(match scheme {
                Scheme::Pse { memory_samples } => {
                    if memory_samples == 0 {
                        return Err(Error::Config(
                            "memory length must be at least 1 sample".into(),
                        ));
                    }
                    // Only n_steps + 1 samples ever arrive, so the
                    // window never needs to exceed n_steps.
                    let window = memory_samples.min(n_steps.max(1));
                    TermFilter::Gl {
                        scale: t_step.powf(-order),
                        coeffs: gl_coefficients(order, window)?.coeffs,
                        window,
                        hist: VecDeque::with_capacity(window + 2),
                    }
                }
                Scheme::Cfe => TermFilter::Cfe(CfeFilter::new(&cfe_operator(order, t_step)?)?),
            })
        };
        let integral = if ctrl.ti != 0.0 {
            Some((ctrl.ti, build(-ctrl.lambda)?))
        } else {
            None
        };
        let derivative = if ctrl.td != 0.0 {
            Some((ctrl.td, build(ctrl.delta)?))
        } else {
            None
        };
        Ok(Self { k: ctrl.k, integral, derivative })
    }

    fn push(&mut self, e: f64) -> f64 {
        let mut u = self.k * e;
        if let Some((gain, filter)) = &mut self.integral {
            u += *gain * filter.push(e);
        }
        if let Some((gain, filter)) = &mut self.derivative {
            u += *gain * filter.push(e);
        }
        u
    }
}

enum PlantStepper {
    Pse(PseStepper),
    Cfe(CfeStepper),
}

impl PlantStepper {
    fn new(ss: &StateSpaceModel, t_step: f64, scheme: Scheme, n_steps: usize) -> Result<Self> {
        Ok(match scheme {
            Scheme::Pse { memory_samples } => {
                if memory_samples == 0 {
                    return Err(Error::Config("memory length must be at least 1 sample".into()));
                }
                let window = memory_samples.min(n_steps.max(1));
                PlantStepper::Pse(PseStepper::new(ss, t_step, window)?)
            }
            Scheme::Cfe => PlantStepper::Cfe(CfeStepper::new(ss, t_step)?),
        })
    }

    fn step(&mut self, u: f64) -> Result<(f64, f64)> {
        match self {
            PlantStepper::Pse(s) => s.step(u),
            PlantStepper::Cfe(s) => s.step(u),
        }
    }
}

/// Simulates the unity-feedback loop for `n_steps` plant advances.
///
/// Per index k: measure `y_k`, form `e_k = setpoint_k - y_k`, evaluate
/// `u_k` from the controller history through k, record the row, and (for
/// k < n_steps) advance the plant one step driven by `u_k`. The
/// rational-scheme plant therefore holds `u_k` while moving to index
/// k + 1. The result's `u` column carries the controller outputs.
///
/// `memory_bytes_peak` counts the plant's state history, as in the
/// open-loop simulators.
///
/// Errors: setpoint shorter than `n_steps + 1` samples, invalid scheme
/// parameters, or an instability error carrying the first step with a
/// non-finite value.
pub fn simulate_closed_loop(
    plant: &FodeModel,
    ctrl: &ControllerSpec,
    setpoint: &SampledSignal,
    scheme: Scheme,
    n_steps: usize,
) -> Result<SimulationResult> {
    if setpoint.len() < n_steps + 1 {
        return Err(Error::Config(format!(
            "setpoint provides {} samples but n_steps = {} requires at least {}",
            setpoint.len(),
            n_steps,
            n_steps + 1
        )));
    }
    let t_step = setpoint.step();
    let ss = decompose(plant);
    let mut controller = ControllerFilter::new(ctrl, t_step, scheme, n_steps)?;
    let mut plant_stepper = PlantStepper::new(&ss, t_step, scheme, n_steps)?;
    let sp = setpoint.samples();
    let mut t = Vec::with_capacity(n_steps + 1);
    let mut u_col = Vec::with_capacity(n_steps + 1);
    let mut x1_col = Vec::with_capacity(n_steps + 1);
    let mut x2_col = Vec::with_capacity(n_steps + 1);
    let (mut x1, mut x2) = (0.0, 0.0);
    for k in 0..=n_steps {
        let e = sp[k] - x1;
        let u = controller.push(e);
        if !u.is_finite() {
            return Err(Error::Instability { step: k });
        }
        t.push(k as f64 * t_step);
        u_col.push(u);
        x1_col.push(x1);
        x2_col.push(x2);
        if k < n_steps {
            (x1, x2) = plant_stepper.step(u)?;
        }
    }
    let memory_bytes_peak = match scheme {
        Scheme::Pse { memory_samples } => 2 * 8 * memory_samples.min(n_steps),
        Scheme::Cfe => 2 * 8 * 10,
    };
    Ok(SimulationResult {
        step: t_step,
        t,
        u: u_col,
        y: x1_col.clone(),
        x1: x1_col,
        x2: x2_col,
        memory_bytes_peak,
    })
}

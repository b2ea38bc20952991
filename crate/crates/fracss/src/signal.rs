//! Uniformly sampled real-valued signals.

use crate::{Error, Result};

/// A real signal sampled on the uniform grid `t_k = k * step`.
///
/// Invariants enforced at construction: the step is finite and strictly
/// positive and the sample vector is non-empty.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    step: f64,
    samples: Vec<f64>,
}

impl SampledSignal {
    /// Wraps a sample vector taken with the given step.
    pub fn new(step: f64, samples: Vec<f64>) -> Result<Self> {
        if !step.is_finite() || step <= 0.0 {
            return Err(Error::Config(format!(
                "signal step must be finite and positive, got {step}"
            )));
        }
        if samples.is_empty() {
            return Err(Error::Config("signal must contain at least one sample".into()));
        }
        Ok(Self { step, samples })
    }

    /// Unit step: every sample equals 1.
    pub fn unit_step(step: f64, len: usize) -> Result<Self> {
        Self::new(step, vec![1.0; len])
    }

    /// All-zero signal.
    pub fn zeros(step: f64, len: usize) -> Result<Self> {
        Self::new(step, vec![0.0; len])
    }

    /// Samples of `f` on the grid `t_k = k * step`.
    pub fn from_fn(step: f64, len: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let samples = (0..len).map(|k| f(k as f64 * step)).collect();
        Self::new(step, samples)
    }

    /// Sampling interval in seconds.
    pub fn step(&self) -> f64 {
        self.step
    }

    /// Borrowed sample values.
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// Number of samples.
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    /// Always false: the constructor rejects empty signals.
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_step() {
        assert!(SampledSignal::new(0.0, vec![1.0]).is_err());
        assert!(SampledSignal::new(-0.1, vec![1.0]).is_err());
        assert!(SampledSignal::new(f64::NAN, vec![1.0]).is_err());
        assert!(SampledSignal::new(f64::INFINITY, vec![1.0]).is_err());
    }

    #[test]
    fn rejects_empty() {
        assert!(SampledSignal::new(0.1, vec![]).is_err());
    }

    #[test]
    fn grid_construction() {
        let s = SampledSignal::from_fn(0.5, 4, |t| 2.0 * t).unwrap();
        assert_eq!(s.samples(), &[0.0, 1.0, 2.0, 3.0]);
        assert_eq!(s.step(), 0.5);
        assert_eq!(s.len(), 4);
    }
}

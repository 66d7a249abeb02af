use crate::error::{Error, Result};

/// Fixed-step integration settings shared by all propagators.
///
/// The step is adjusted to `t_final / round(t_final / dt)` so the run ends
/// exactly at `t_final`. Observables are recorded at step 0, every
/// `record_stride` steps, and at the final step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub t_final: f64,
    pub record_stride: usize,
}

impl IntegratorConfig {
    pub fn new(dt: f64, t_final: f64, record_stride: usize) -> Result<Self> {
        let cfg = Self {
            dt,
            t_final,
            record_stride,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::param("dt", "must be > 0"));
        }
        if !(self.t_final >= self.dt) || !self.t_final.is_finite() {
            return Err(Error::param("t_final", "must be >= dt"));
        }
        if self.record_stride == 0 {
            return Err(Error::param("record_stride", "must be >= 1"));
        }
        Ok(())
    }

    pub fn n_steps(&self) -> usize {
        (self.t_final / self.dt).round().max(1.0) as usize
    }

    /// Step actually taken.
    pub fn step(&self) -> f64 {
        self.t_final / self.n_steps() as f64
    }

    pub fn time_at(&self, step: usize) -> f64 {
        step as f64 * self.step()
    }

    pub fn is_record_step(&self, step: usize) -> bool {
        step % self.record_stride == 0 || step == self.n_steps()
    }

    pub fn record_times(&self) -> Vec<f64> {
        (0..=self.n_steps())
            .filter(|&s| self.is_record_step(s))
            .map(|s| self.time_at(s))
            .collect()
    }

    /// Same record grid with half the step.
    pub fn halved(&self) -> Self {
        Self {
            dt: self.step() / 2.0,
            t_final: self.t_final,
            record_stride: self.record_stride * 2,
        }
    }
}

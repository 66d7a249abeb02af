use crate::hilbert::{DensityMatrix, StateVector};

use super::meanfield::MeanFieldState;

#[derive(Debug, Clone, PartialEq)]
pub enum FinalState {
    Pure(StateVector),
    Mixed(DensityMatrix),
    MeanField(MeanFieldState),
}

/// Recorded time series of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    /// RNG seed for stochastic runs.
    pub seed: Option<u64>,
    pub times: Vec<f64>,
    pub columns: Vec<String>,
    /// `rows[i][j]` is column `j` at `times[i]`.
    pub rows: Vec<Vec<f64>>,
    pub jump_times: Vec<f64>,
    pub final_state: FinalState,
    /// Largest per-step deviation of the squared norm (or trace) from one
    /// before renormalization.
    pub max_norm_drift: f64,
}

impl TrajectoryRecord {
    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn series(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    pub fn last_row(&self) -> &[f64] {
        self.rows.last().map(Vec::as_slice).unwrap_or(&[])
    }
}

use num_complex::Complex64;

use super::measures::{negativity, spatial_statistics, wrap, MotionBasis};
use crate::error::{Error, Result};
use crate::hilbert::{HilbertSpace, QuantumState, SparseOperator};

/// What a named observable computes from a state.
#[derive(Debug, Clone)]
pub enum ObservableKind {
    /// `Re <O>` of a Hermitian operator.
    Real(SparseOperator),
    /// Complex `<O>`, written as `re_`/`im_` columns.
    Complex(SparseOperator),
    /// `|<O>|²`.
    AbsSquared(SparseOperator),
    /// `<O²> − <O>²`; holds `(O, O²)`.
    Variance(SparseOperator, SparseOperator),
    /// `arg <U>` wrapped to [−π, π).
    Phase(SparseOperator),
    /// Entanglement across (named factor | rest).
    Negativity(String),
    /// Position variance of a motional factor.
    PositionVariance(String, MotionBasis),
}

impl ObservableKind {
    /// Linear in the density matrix, so ensemble means of per-trajectory
    /// values equal the value on the averaged state.
    pub fn is_linear(&self) -> bool {
        matches!(self, ObservableKind::Real(_) | ObservableKind::Complex(_))
    }
}

#[derive(Debug, Clone)]
pub struct Observable {
    pub name: String,
    pub kind: ObservableKind,
}

/// Ordered, uniquely named list of observables recorded during a run.
#[derive(Debug, Clone, Default)]
pub struct ObservableSet {
    items: Vec<Observable>,
}

impl ObservableSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, name: &str, kind: ObservableKind) -> Result<()> {
        if self.items.iter().any(|o| o.name == name) {
            return Err(Error::DuplicateLabel(name.to_string()));
        }
        match &kind {
            ObservableKind::Real(op) | ObservableKind::Variance(op, _)
                if !op.is_hermitian(1e-10) =>
            {
                return Err(Error::NotHermitian {
                    deviation: op.hermiticity_error(),
                })
            }
            _ => {}
        }
        self.items.push(Observable {
            name: name.to_string(),
            kind,
        });
        Ok(())
    }

    pub fn with(mut self, name: &str, kind: ObservableKind) -> Result<Self> {
        self.push(name, kind)?;
        Ok(self)
    }

    pub fn variance(op: SparseOperator) -> Result<ObservableKind> {
        let sq = op.matmul(&op)?;
        Ok(ObservableKind::Variance(op, sq))
    }

    pub fn items(&self) -> &[Observable] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn all_linear(&self) -> bool {
        self.items.iter().all(|o| o.kind.is_linear())
    }

    /// Column names in declaration order; complex entries split into re_/im_.
    pub fn columns(&self) -> Vec<String> {
        let mut cols = Vec::new();
        for o in &self.items {
            match o.kind {
                ObservableKind::Complex(_) => {
                    cols.push(format!("re_{}", o.name));
                    cols.push(format!("im_{}", o.name));
                }
                _ => cols.push(o.name.clone()),
            }
        }
        cols
    }

    /// Checks every operator against the space the states will live on.
    pub fn check_space(&self, space: &HilbertSpace) -> Result<()> {
        for o in &self.items {
            match &o.kind {
                ObservableKind::Real(op)
                | ObservableKind::Complex(op)
                | ObservableKind::AbsSquared(op)
                | ObservableKind::Variance(op, _)
                | ObservableKind::Phase(op) => space.check_same(op.space())?,
                ObservableKind::Negativity(label) | ObservableKind::PositionVariance(label, _) => {
                    space.position(label)?;
                }
            }
        }
        Ok(())
    }

    /// Evaluates every observable, returning one value per column.
    pub fn evaluate<S: QuantumState + ?Sized>(&self, state: &S) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(self.items.len() + 2);
        for o in &self.items {
            match &o.kind {
                ObservableKind::Real(op) => out.push(state.expect_unchecked(op).re),
                ObservableKind::Complex(op) => {
                    let z = state.expect_unchecked(op);
                    out.push(z.re);
                    out.push(z.im);
                }
                ObservableKind::AbsSquared(op) => out.push(state.expect_unchecked(op).norm_sqr()),
                ObservableKind::Variance(op, sq) => {
                    let m = state.expect_unchecked(op).re;
                    out.push(state.expect_unchecked(sq).re - m * m);
                }
                ObservableKind::Phase(op) => out.push(wrap(state.expect_unchecked(op).arg())),
                ObservableKind::Negativity(label) => out.push(negativity(state, label)?),
                ObservableKind::PositionVariance(label, basis) => {
                    out.push(spatial_statistics(state, label, *basis)?.var_x)
                }
            }
        }
        Ok(out)
    }

    /// Values of the linear observables only, one per linear column.
    pub(crate) fn evaluate_linear(&self, amps: &[Complex64]) -> Vec<f64> {
        let mut out = Vec::new();
        for o in &self.items {
            match &o.kind {
                ObservableKind::Real(op) => out.push(op.sandwich(amps, amps).re),
                ObservableKind::Complex(op) => {
                    let z = op.sandwich(amps, amps);
                    out.push(z.re);
                    out.push(z.im);
                }
                _ => {}
            }
        }
        out
    }

    /// Indices of columns produced by [`Self::evaluate_linear`], in order.
    pub(crate) fn linear_columns(&self) -> Vec<usize> {
        let mut idx = Vec::new();
        let mut col = 0;
        for o in &self.items {
            let width = if matches!(o.kind, ObservableKind::Complex(_)) {
                2
            } else {
                1
            };
            if o.kind.is_linear() {
                idx.extend(col..col + width);
            }
            col += width;
        }
        idx
    }
}

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::space::HilbertSpace;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Complex sparse matrix in compressed-row form, tied to a Hilbert space.
///
/// Entries are canonical: sorted by column within each row, no duplicate
/// positions, no stored exact zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    space: HilbertSpace,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
}

impl SparseOperator {
    /// Builds an operator from `(row, col, value)` entries; duplicates are summed.
    pub fn from_triplets(
        space: HilbertSpace,
        entries: impl IntoIterator<Item = (usize, usize, Complex64)>,
    ) -> Result<Self> {
        let dim = space.dim();
        let mut entries: Vec<(usize, usize, Complex64)> = entries.into_iter().collect();
        for &(r, c, _) in &entries {
            if r >= dim || c >= dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: r.max(c) + 1,
                });
            }
        }
        entries.sort_by_key(|&(r, c, _)| (r, c));

        let mut row_ptr = vec![0usize; dim + 1];
        let mut cols = Vec::with_capacity(entries.len());
        let mut vals = Vec::with_capacity(entries.len());
        let mut iter = entries.into_iter().peekable();
        while let Some((r, c, mut v)) = iter.next() {
            while let Some(&(r2, c2, v2)) = iter.peek() {
                if r2 == r && c2 == c {
                    v += v2;
                    iter.next();
                } else {
                    break;
                }
            }
            if v != ZERO {
                cols.push(c);
                vals.push(v);
                row_ptr[r + 1] += 1;
            }
        }
        for r in 0..dim {
            row_ptr[r + 1] += row_ptr[r];
        }
        Ok(Self {
            space,
            row_ptr,
            cols,
            vals,
        })
    }

    pub fn zero(space: HilbertSpace) -> Self {
        let dim = space.dim();
        Self {
            space,
            row_ptr: vec![0; dim + 1],
            cols: Vec::new(),
            vals: Vec::new(),
        }
    }

    pub fn identity(space: HilbertSpace) -> Self {
        let dim = space.dim();
        Self {
            space,
            row_ptr: (0..=dim).collect(),
            cols: (0..dim).collect(),
            vals: vec![ONE; dim],
        }
    }

    pub fn diagonal(space: HilbertSpace, diag: &[Complex64]) -> Result<Self> {
        if diag.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: diag.len(),
            });
        }
        Self::from_triplets(space, diag.iter().enumerate().map(|(i, &v)| (i, i, v)))
    }

    pub fn from_dense(space: HilbertSpace, m: &DMatrix<Complex64>) -> Result<Self> {
        let dim = space.dim();
        if m.nrows() != dim || m.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: m.nrows(),
            });
        }
        let entries = (0..dim)
            .flat_map(|r| (0..dim).map(move |c| (r, c)))
            .map(|(r, c)| (r, c, m[(r, c)]));
        Self::from_triplets(space, entries)
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.row_ptr.len() - 1
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Same matrix, reinterpreted on another space of equal dimension.
    pub fn with_space(mut self, space: HilbertSpace) -> Result<Self> {
        self.space.check_same(&space)?;
        self.space = space;
        Ok(self)
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.dim()).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.cols[k], self.vals[k]))
        })
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        let range = self.row_ptr[row]..self.row_ptr[row + 1];
        match self.cols[range.clone()].binary_search(&col) {
            Ok(k) => self.vals[range.start + k],
            Err(_) => ZERO,
        }
    }

    /// `out = A x`.
    pub fn apply_into(&self, x: &[Complex64], out: &mut [Complex64]) {
        debug_assert_eq!(x.len(), self.dim());
        debug_assert_eq!(out.len(), self.dim());
        for (o, w) in out.iter_mut().zip(self.row_ptr.windows(2)) {
            let (cols, vals) = (&self.cols[w[0]..w[1]], &self.vals[w[0]..w[1]]);
            *o = cols
                .iter()
                .zip(vals)
                .fold(ZERO, |acc, (&c, &v)| acc + v * x[c]);
        }
    }

    pub fn apply(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        let mut out = vec![ZERO; x.len()];
        self.apply_into(x, &mut out);
        Ok(out)
    }

    /// `<y|A|x>`.
    pub fn sandwich(&self, y: &[Complex64], x: &[Complex64]) -> Complex64 {
        let mut total = ZERO;
        for (r, yr) in y.iter().enumerate() {
            let mut acc = ZERO;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            total += yr.conj() * acc;
        }
        total
    }

    /// `A M` for a dense column-major matrix `M`.
    pub fn mul_dense(&self, m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let mut out = DMatrix::zeros(self.dim(), m.ncols());
        for j in 0..m.ncols() {
            let src = m.column(j);
            let mut dst = out.column_mut(j);
            for r in 0..self.dim() {
                let mut acc = ZERO;
                for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                    acc += self.vals[k] * src[self.cols[k]];
                }
                dst[r] = acc;
            }
        }
        out
    }

    /// `Tr(A M)` without forming the product.
    pub fn trace_with(&self, m: &DMatrix<Complex64>) -> Complex64 {
        self.triplets().map(|(r, c, v)| v * m[(c, r)]).sum()
    }

    pub fn adjoint(&self) -> Self {
        let t = self.triplets().map(|(r, c, v)| (c, r, v.conj()));
        Self::from_triplets(self.space.clone(), t).expect("transpose stays in bounds")
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let t = self.triplets().map(|(r, c, v)| (r, c, v * factor));
        Self::from_triplets(self.space.clone(), t).expect("scaling stays in bounds")
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    pub fn add(&self, other: &SparseOperator) -> Result<Self> {
        self.space.check_same(&other.space)?;
        Self::from_triplets(self.space.clone(), self.triplets().chain(other.triplets()))
    }

    pub fn sub(&self, other: &SparseOperator) -> Result<Self> {
        self.add(&other.scale_real(-1.0))
    }

    /// Matrix product `self * other`.
    pub fn matmul(&self, other: &SparseOperator) -> Result<Self> {
        self.space.check_same(&other.space)?;
        let mut entries = Vec::new();
        for (r, k, a) in self.triplets() {
            for idx in other.row_ptr[k]..other.row_ptr[k + 1] {
                entries.push((r, other.cols[idx], a * other.vals[idx]));
            }
        }
        Self::from_triplets(self.space.clone(), entries)
    }

    /// Commutator `[self, other]`.
    pub fn commutator(&self, other: &SparseOperator) -> Result<Self> {
        self.matmul(other)?.sub(&other.matmul(self)?)
    }

    /// Raw Kronecker product; the caller provides the resulting space.
    pub(crate) fn kron_into(&self, other: &SparseOperator, space: HilbertSpace) -> Result<Self> {
        let expected = self.dim() * other.dim();
        if space.dim() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: space.dim(),
            });
        }
        let d2 = other.dim();
        let mut entries = Vec::with_capacity(self.nnz() * other.nnz());
        for (r1, c1, v1) in self.triplets() {
            for (r2, c2, v2) in other.triplets() {
                entries.push((r1 * d2 + r2, c1 * d2 + c2, v1 * v2));
            }
        }
        Self::from_triplets(space, entries)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.dim(), self.dim());
        for (r, c, v) in self.triplets() {
            m[(r, c)] = v;
        }
        m
    }

    /// Largest entrywise deviation `|A_ij - conj(A_ji)|`.
    pub fn hermiticity_error(&self) -> f64 {
        self.triplets()
            .map(|(r, c, v)| (v - self.get(c, r).conj()).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    /// Largest absolute row sum, an upper bound on the spectral radius.
    pub fn norm_bound(&self) -> f64 {
        (0..self.dim())
            .map(|r| {
                (self.row_ptr[r]..self.row_ptr[r + 1])
                    .map(|k| self.vals[k].norm())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }
}

/// Bosonic annihilation operator truncated to `dim` Fock levels.
pub fn destroy(label: &str, dim: usize) -> Result<SparseOperator> {
    let space = HilbertSpace::single(label, dim)?;
    SparseOperator::from_triplets(
        space,
        (1..dim).map(|n| (n - 1, n, Complex64::new((n as f64).sqrt(), 0.0))),
    )
}

pub fn create(label: &str, dim: usize) -> Result<SparseOperator> {
    Ok(destroy(label, dim)?.adjoint())
}

pub fn number(label: &str, dim: usize) -> Result<SparseOperator> {
    let space = HilbertSpace::single(label, dim)?;
    let diag: Vec<Complex64> = (0..dim).map(|n| Complex64::new(n as f64, 0.0)).collect();
    SparseOperator::diagonal(space, &diag)
}

/// Projector onto a single basis level of one factor.
pub fn level_projector(label: &str, dim: usize, level: usize) -> Result<SparseOperator> {
    let space = HilbertSpace::single(label, dim)?;
    if level >= dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: level + 1,
        });
    }
    SparseOperator::from_triplets(space, [(level, level, ONE)])
}

/// Embeds local operators into `space`; factors not listed get the identity.
///
/// Each local operator must have the dimension of the factor it is placed
/// on. A label may appear at most once.
pub fn tensor_product_op(
    space: &HilbertSpace,
    factor_ops: &[(&str, &SparseOperator)],
) -> Result<SparseOperator> {
    let mut slots: Vec<Option<&SparseOperator>> = vec![None; space.num_factors()];
    for (label, op) in factor_ops {
        let pos = space.position(label)?;
        let dim = space.factors()[pos].1;
        if op.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: op.dim(),
            });
        }
        if slots[pos].is_some() {
            return Err(Error::DuplicateLabel(label.to_string()));
        }
        slots[pos] = Some(op);
    }

    let mut acc: Option<SparseOperator> = None;
    for (slot, (label, dim)) in slots.into_iter().zip(space.factors()) {
        let local = match slot {
            Some(op) => op.clone(),
            None => SparseOperator::identity(HilbertSpace::single(label, *dim)?),
        };
        acc = Some(match acc {
            None => local,
            // intermediate products live on an anonymous factor; the target
            // space is attached once at the end
            Some(prev) => {
                prev.kron_into(&local, HilbertSpace::single("_", prev.dim() * local.dim())?)?
            }
        });
    }
    acc.expect("space has at least one factor")
        .with_space(space.clone())
}

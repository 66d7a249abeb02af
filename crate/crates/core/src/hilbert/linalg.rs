use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use super::space::HilbertSpace;
use super::state::{hermitian_deviation, DensityMatrix, StateVector};
use crate::error::{Error, Result};

/// Entrywise tolerance (relative to the largest entry, floor 1) for
/// accepting a matrix as Hermitian before diagonalization.
pub const HERMITIAN_TOL: f64 = 1e-8;

fn checked_hermitian(m: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    let scale = m.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let deviation = hermitian_deviation(m);
    if deviation > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian { deviation });
    }
    Ok((m + m.adjoint()) * Complex64::new(0.5, 0.0))
}

/// Real eigenvalues of a Hermitian matrix, ascending.
///
/// The input is symmetrized before the solve; deviations from
/// Hermiticity above the tolerance are rejected.
pub fn hermitian_spectrum(m: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    let sym = checked_hermitian(m)?;
    if sym.nrows() == 0 {
        return Ok(Vec::new());
    }
    let mut values: Vec<f64> = SymmetricEigen::new(sym)
        .eigenvalues
        .iter()
        .copied()
        .collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Eigenvalues (ascending) and the matching orthonormal eigenvectors as columns.
pub fn hermitian_eigen(m: &DMatrix<Complex64>) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
    let sym = checked_hermitian(m)?;
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), m.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// Splits composite indices into (kept, traced) parts.
struct Bipartition {
    kept: Vec<usize>,
    traced: Vec<usize>,
    kept_dim: usize,
    traced_dim: usize,
}

impl Bipartition {
    fn new(space: &HilbertSpace, kept_positions: &[usize]) -> Self {
        let mut kept = Vec::with_capacity(space.dim());
        let mut traced = Vec::with_capacity(space.dim());
        let factors = space.factors();
        for i in 0..space.dim() {
            let digits = space.decompose(i);
            let (mut k, mut t) = (0usize, 0usize);
            for (pos, (&d, (_, dim))) in digits.iter().zip(factors).enumerate() {
                if kept_positions.contains(&pos) {
                    k = k * dim + d;
                } else {
                    t = t * dim + d;
                }
            }
            kept.push(k);
            traced.push(t);
        }
        let kept_dim = kept_positions.iter().map(|&p| factors[p].1).product();
        Self {
            kept,
            traced,
            kept_dim,
            traced_dim: space.dim() / kept_dim,
        }
    }
}

/// Reduced density matrix on `kept_labels` (kept in the original factor order).
pub fn partial_trace(rho: &DensityMatrix, kept_labels: &[&str]) -> Result<DensityMatrix> {
    if kept_labels.is_empty() {
        return Err(Error::InvalidState(
            "partial trace needs at least one kept factor".into(),
        ));
    }
    let space = rho.space();
    let kept_space = space.subspace(kept_labels)?;
    let positions: Vec<usize> = kept_space
        .labels()
        .map(|l| space.position(l))
        .collect::<Result<_>>()?;
    let split = Bipartition::new(space, &positions);

    // full indices grouped by their traced-out part
    let mut groups: Vec<Vec<(usize, usize)>> = vec![Vec::new(); split.traced_dim];
    for i in 0..space.dim() {
        groups[split.traced[i]].push((i, split.kept[i]));
    }
    let m = rho.matrix();
    let mut out = DMatrix::zeros(split.kept_dim, split.kept_dim);
    for group in &groups {
        for &(i, ki) in group {
            for &(j, kj) in group {
                out[(ki, kj)] += m[(i, j)];
            }
        }
    }
    Ok(DensityMatrix::new_unchecked(kept_space, out))
}

/// Partial transpose of `rho` with respect to the named factor.
pub fn partial_transpose(
    rho: &DensityMatrix,
    transposed_label: &str,
) -> Result<DMatrix<Complex64>> {
    let space = rho.space();
    let pos = space.position(transposed_label)?;
    let stride = space.strides()[pos];
    let dim_a = space.factors()[pos].1;
    let digit = |i: usize| (i / stride) % dim_a;
    let m = rho.matrix();
    let n = space.dim();
    Ok(DMatrix::from_fn(n, n, |i, j| {
        let (a, b) = (digit(i), digit(j));
        // swap the transposed factor's digit between row and column
        let i2 = i - a * stride + b * stride;
        let j2 = j - b * stride + a * stride;
        m[(i2, j2)]
    }))
}

/// Amplitude matrix `M[a, rest]` of a pure state split as (named factor | rest).
pub(crate) fn bipartite_amplitudes(
    psi: &StateVector,
    left_label: &str,
) -> Result<DMatrix<Complex64>> {
    let space = psi.space();
    let pos = space.position(left_label)?;
    let split = Bipartition::new(space, &[pos]);
    let mut m = DMatrix::zeros(split.kept_dim, split.traced_dim);
    for (i, amp) in psi.amplitudes().iter().enumerate() {
        m[(split.kept[i], split.traced[i])] = *amp;
    }
    Ok(m)
}

/// Squared Schmidt coefficients of the split (named factor | rest),
/// descending and summing to one.
pub fn schmidt_coefficients(psi: &StateVector, left_label: &str) -> Result<Vec<f64>> {
    psi.require_normalized()?;
    let values = schmidt_values(psi, left_label)?;
    let mut lambdas: Vec<f64> = values.iter().map(|s| s * s).collect();
    let total: f64 = lambdas.iter().sum();
    lambdas.iter_mut().for_each(|l| *l /= total);
    Ok(lambdas)
}

/// Singular values of the bipartite amplitude matrix, descending.
pub(crate) fn schmidt_values(psi: &StateVector, left_label: &str) -> Result<Vec<f64>> {
    let m = bipartite_amplitudes(psi, left_label)?;
    let sv: DVector<f64> = m.svd(false, false).singular_values;
    let mut values: Vec<f64> = sv.iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

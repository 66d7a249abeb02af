use std::fmt;

use crate::error::{Error, Result};

/// Ordered tensor product of labelled factors.
///
/// Composite indices are row-major over the factor list: the last factor
/// varies fastest, so for factors `(d0, d1, d2)` the basis state
/// `|i0, i1, i2>` sits at `(i0 * d1 + i1) * d2 + i2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HilbertSpace {
    factors: Vec<(String, usize)>,
}

impl HilbertSpace {
    pub fn new<S: Into<String>>(factors: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let factors: Vec<(String, usize)> =
            factors.into_iter().map(|(l, d)| (l.into(), d)).collect();
        if factors.is_empty() {
            return Err(Error::InvalidState(
                "a Hilbert space needs at least one factor".into(),
            ));
        }
        for (i, (label, dim)) in factors.iter().enumerate() {
            if *dim == 0 {
                return Err(Error::EmptyFactor {
                    label: label.clone(),
                });
            }
            if factors[..i].iter().any(|(l, _)| l == label) {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
        Ok(Self { factors })
    }

    pub fn single(label: &str, dim: usize) -> Result<Self> {
        Self::new([(label, dim)])
    }

    pub fn factors(&self) -> &[(String, usize)] {
        &self.factors
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.factors.iter().map(|(l, _)| l.as_str())
    }

    pub fn num_factors(&self) -> usize {
        self.factors.len()
    }

    pub fn dim(&self) -> usize {
        self.factors.iter().map(|(_, d)| d).product()
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.factors
            .iter()
            .position(|(l, _)| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn factor_dim(&self, label: &str) -> Result<usize> {
        self.position(label).map(|i| self.factors[i].1)
    }

    /// Stride of each factor in the composite index.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.factors.len()];
        for i in (0..self.factors.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.factors[i + 1].1;
        }
        strides
    }

    pub fn compose(&self, digits: &[usize]) -> usize {
        debug_assert_eq!(digits.len(), self.factors.len());
        digits
            .iter()
            .zip(&self.factors)
            .fold(0, |acc, (&d, (_, dim))| acc * dim + d)
    }

    pub fn decompose(&self, mut index: usize) -> Vec<usize> {
        let mut digits = vec![0; self.factors.len()];
        for (slot, (_, dim)) in digits.iter_mut().zip(&self.factors).rev() {
            *slot = index % dim;
            index /= dim;
        }
        digits
    }

    /// Space made of the named factors, in the order they appear here.
    pub fn subspace(&self, labels: &[&str]) -> Result<Self> {
        for l in labels {
            self.position(l)?;
        }
        let kept: Vec<(String, usize)> = self
            .factors
            .iter()
            .filter(|(l, _)| labels.contains(&l.as_str()))
            .cloned()
            .collect();
        Self::new(kept)
    }

    /// Tensor product `self ⊗ other`; labels must stay unique.
    pub fn product(&self, other: &HilbertSpace) -> Result<Self> {
        Self::new(self.factors.iter().chain(other.factors.iter()).cloned())
    }

    pub(crate) fn check_same(&self, other: &HilbertSpace) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for HilbertSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|(l, d)| format!("{l}[{d}]"))
            .collect();
        write!(f, "{}", parts.join(" ⊗ "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_major_layout() {
        let s = HilbertSpace::new([("a", 2), ("b", 3), ("c", 4)]).unwrap();
        assert_eq!(s.dim(), 24);
        assert_eq!(s.strides(), vec![12, 4, 1]);
        assert_eq!(s.compose(&[1, 2, 3]), 12 + 8 + 3);
        for i in 0..s.dim() {
            assert_eq!(s.compose(&s.decompose(i)), i);
        }
    }

    #[test]
    fn rejects_bad_factors() {
        assert_eq!(
            HilbertSpace::new([("a", 2), ("a", 3)]),
            Err(Error::DuplicateLabel("a".into()))
        );
        assert!(matches!(
            HilbertSpace::new([("a", 0)]),
            Err(Error::EmptyFactor { .. })
        ));
        let s = HilbertSpace::new([("atom", 2), ("field", 5)]).unwrap();
        assert_eq!(
            s.position("missing"),
            Err(Error::UnknownLabel("missing".into()))
        );
    }

    #[test]
    fn subspace_keeps_order() {
        let s = HilbertSpace::new([("a", 2), ("b", 3), ("c", 4)]).unwrap();
        let sub = s.subspace(&["c", "a"]).unwrap();
        assert_eq!(sub.factors(), &[("a".to_string(), 2), ("c".to_string(), 4)]);
    }
}

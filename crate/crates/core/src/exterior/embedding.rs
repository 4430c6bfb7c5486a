use crate::error::{Error, Result};

/// An injective map of standard coordinates ℝᵏ → ℝᴺ (1-based on both sides).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoordinateEmbedding {
    target_dim: usize,
    map: Vec<usize>,
    inverse: Vec<Option<usize>>,
}

impl CoordinateEmbedding {
    /// `map[i]` is the target coordinate of source coordinate `i + 1`.
    pub fn new(map: Vec<usize>, target_dim: usize) -> Result<Self> {
        let mut inverse = vec![None; target_dim + 1];
        for (s, &t) in map.iter().enumerate() {
            if t == 0 || t > target_dim {
                return Err(Error::IndexOutOfRange { index: t, dim: target_dim });
            }
            if inverse[t].is_some() {
                return Err(Error::NonInjective(t));
            }
            inverse[t] = Some(s + 1);
        }
        Ok(Self { target_dim, map, inverse })
    }

    /// The block inclusion `x ↦ (0, …, 0, x, 0, …)` placing ℝᵏ at coordinates
    /// `offset+1 ..= offset+k`.
    pub fn block(source_dim: usize, target_dim: usize, offset: usize) -> Result<Self> {
        if offset + source_dim > target_dim {
            return Err(Error::DimensionMismatch { left: offset + source_dim, right: target_dim });
        }
        Self::new((offset + 1..=offset + source_dim).collect(), target_dim)
    }

    pub fn source_dim(&self) -> usize {
        self.map.len()
    }

    pub fn target_dim(&self) -> usize {
        self.target_dim
    }

    pub fn image(&self, source: usize) -> usize {
        self.map[source - 1]
    }

    pub fn preimage(&self, target: usize) -> Option<usize> {
        self.inverse.get(target).copied().flatten()
    }

    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.source_dim() {
            return Err(Error::DimensionMismatch { left: v.len(), right: self.source_dim() });
        }
        let mut out = vec![0.0; self.target_dim];
        for (s, &x) in v.iter().enumerate() {
            out[self.map[s] - 1] = x;
        }
        Ok(out)
    }

    /// Restriction of a target vector to the embedded coordinates.
    pub fn restrict(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.target_dim {
            return Err(Error::DimensionMismatch { left: v.len(), right: self.target_dim });
        }
        Ok(self.map.iter().map(|&t| v[t - 1]).collect())
    }

    pub fn overlaps(&self, other: &Self) -> Option<usize> {
        self.map.iter().copied().find(|&t| other.preimage(t).is_some())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_injective_maps() {
        assert!(matches!(CoordinateEmbedding::new(vec![1, 1], 3), Err(Error::NonInjective(1))));
        assert!(CoordinateEmbedding::new(vec![1, 4], 3).is_err());
        assert!(CoordinateEmbedding::block(3, 4, 2).is_err());
    }

    #[test]
    fn block_apply_and_restrict() {
        let b = CoordinateEmbedding::block(2, 5, 2).unwrap();
        assert_eq!(b.apply(&[1.0, 2.0]).unwrap(), vec![0.0, 0.0, 1.0, 2.0, 0.0]);
        assert_eq!(b.restrict(&[9.0, 9.0, 1.0, 2.0, 9.0]).unwrap(), vec![1.0, 2.0]);
        assert_eq!(b.preimage(4), Some(2));
        assert_eq!(b.preimage(1), None);
    }
}

//! Simple (decomposable) m-vectors and the simplicity test.

use nalgebra::{DMatrix, SymmetricEigen};

use super::{shuffle, CoordinateEmbedding, MultiIndex, MultiVector};
use crate::error::{Error, Result};

pub const DEFAULT_SIMPLE_TOL: f64 = 1e-9;
const FRAME_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Positive,
    Negative,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Positive => 1.0,
            Orientation::Negative => -1.0,
        }
    }

    pub fn from_sign(s: f64) -> Self {
        if s < 0.0 {
            Orientation::Negative
        } else {
            Orientation::Positive
        }
    }
}

/// A unit simple m-vector `±v₁∧…∧v_m` backed by an orthonormal frame.
#[derive(Clone, Debug, PartialEq)]
pub struct SimpleVector {
    dim: usize,
    frame: Vec<Vec<f64>>,
    orientation: Orientation,
}

impl SimpleVector {
    pub fn new(dim: usize, frame: Vec<Vec<f64>>, orientation: Orientation) -> Result<Self> {
        if let Some(v) = frame.iter().find(|v| v.len() != dim) {
            return Err(Error::DimensionMismatch { left: dim, right: v.len() });
        }
        if frame.len() > dim {
            return Err(Error::DegreeOverflow { degree: frame.len(), dim });
        }
        let dev = gram_deviation(&frame);
        if dev > FRAME_TOL {
            return Err(Error::NonOrthonormal(dev));
        }
        Ok(Self { dim, frame, orientation })
    }

    pub fn from_frame(dim: usize, frame: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(dim, frame, Orientation::Positive)
    }

    /// Orthonormalizes the vectors first (Gram–Schmidt, in order).
    pub fn from_vectors(dim: usize, vectors: &[Vec<f64>]) -> Result<Self> {
        let frame = gram_schmidt(vectors).ok_or(Error::ZeroInput("linearly dependent vectors"))?;
        Self::from_frame(dim, frame)
    }

    /// `e_{i₁}∧…∧e_{i_m}` for strictly increasing 1-based indices.
    pub fn basis(dim: usize, indices: &[usize]) -> Result<Self> {
        MultiIndex::new(indices.to_vec(), dim)?;
        let frame = indices
            .iter()
            .map(|&i| {
                let mut v = vec![0.0; dim];
                v[i - 1] = 1.0;
                v
            })
            .collect();
        Ok(Self { dim, frame, orientation: Orientation::Positive })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.frame.len()
    }

    pub fn frame(&self) -> &[Vec<f64>] {
        &self.frame
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// Standard-basis coordinates (Plücker coordinates) of the m-vector.
    pub fn expand(&self) -> MultiVector {
        MultiVector::wedge_vectors(self.dim, &self.frame)
            .expect("frame vectors have the ambient dimension")
            .scaled(self.orientation.sign())
    }

    pub fn reversed(&self) -> Self {
        let orientation = match self.orientation {
            Orientation::Positive => Orientation::Negative,
            Orientation::Negative => Orientation::Positive,
        };
        Self { orientation, ..self.clone() }
    }

    /// The same m-vector with the orientation sign folded into the first frame vector.
    pub fn normalized_orientation(&self) -> Self {
        let mut frame = self.frame.clone();
        if self.orientation == Orientation::Negative {
            if let Some(v) = frame.first_mut() {
                v.iter_mut().for_each(|x| *x = -*x);
            }
        }
        Self { dim: self.dim, frame, orientation: Orientation::Positive }
    }

    pub fn push_forward(&self, embedding: &CoordinateEmbedding) -> Result<Self> {
        if embedding.source_dim() != self.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: embedding.source_dim() });
        }
        let frame = self.frame.iter().map(|v| embedding.apply(v)).collect::<Result<Vec<_>>>()?;
        Ok(Self { dim: embedding.target_dim(), frame, orientation: self.orientation })
    }
}

pub(crate) fn gram_deviation(frame: &[Vec<f64>]) -> f64 {
    let mut dev: f64 = 0.0;
    for (i, a) in frame.iter().enumerate() {
        for (j, b) in frame.iter().enumerate().skip(i) {
            let d: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((d - target).abs());
        }
    }
    dev
}

/// Modified Gram–Schmidt; `None` if the vectors are (numerically) dependent.
pub(crate) fn gram_schmidt(vectors: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for u in &out {
                let d: f64 = w.iter().zip(u).map(|(x, y)| x * y).sum();
                w.iter_mut().zip(u).for_each(|(x, y)| *x -= d * y);
            }
        }
        let n = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n < 1e-12 {
            return None;
        }
        w.iter_mut().for_each(|x| *x /= n);
        out.push(w);
    }
    Some(out)
}

/// Norm of `ξ∧ξ` for a 2-vector: the Plücker quadrics collected into one number.
fn plucker_defect(xi: &MultiVector) -> f64 {
    xi.wedge(xi).map(|w| w.norm()).unwrap_or(0.0)
}

/// Decides whether `xi` is within `tol` of a decomposable m-vector and, if so,
/// returns an orthonormal frame whose expansion reproduces `xi/‖xi‖`.
///
/// For m ∈ {2, N−2} the Plücker quadrics are checked first. The frame is
/// recovered from the span of the single-vector contractions `e_K*⌟ξ`
/// (|K| = m−1), which is m-dimensional exactly when ξ is simple.
pub fn is_simple(xi: &MultiVector, tol: f64) -> Result<Option<SimpleVector>> {
    let norm = xi.norm();
    if norm == 0.0 {
        return Err(Error::ZeroInput("is_simple of the zero multivector"));
    }
    let unit = xi.scaled(1.0 / norm);
    let (n, m) = (xi.dim(), xi.degree());

    if m == 0 {
        let s = unit.get(&[]);
        return Ok(Some(SimpleVector { dim: n, frame: Vec::new(), orientation: Orientation::from_sign(s) }));
    }

    if n >= 4 && (m == 2 || m == n - 2) {
        let two = if m == 2 { unit.clone() } else { unit.hodge_star() };
        if plucker_defect(&two) > tol {
            return Ok(None);
        }
    }

    // Gram matrix of the contraction rows: row_K[i] = ξ(e_K ∧ e_i).
    let mut gram = DMatrix::<f64>::zeros(n, n);
    let mut rows: std::collections::BTreeMap<Vec<usize>, Vec<f64>> = Default::default();
    for (key, c) in unit.terms() {
        let idx = key.indices();
        for &i in idx {
            let rest: Vec<usize> = idx.iter().copied().filter(|&j| j != i).collect();
            let (_, sign) = shuffle(&rest, &[i]).expect("disjoint");
            rows.entry(rest).or_insert_with(|| vec![0.0; n])[i - 1] += sign * c;
        }
    }
    for row in rows.values() {
        for a in 0..n {
            if row[a] == 0.0 {
                continue;
            }
            for b in 0..n {
                gram[(a, b)] += row[a] * row[b];
            }
        }
    }
    let eig = SymmetricEigen::new(gram);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let frame: Vec<Vec<f64>> =
        order[..m].iter().map(|&k| eig.eigenvectors.column(k).iter().copied().collect()).collect();
    let frame = gram_schmidt(&frame).ok_or(Error::ZeroInput("degenerate support space"))?;

    let candidate = SimpleVector { dim: n, frame, orientation: Orientation::Positive };
    let expansion = candidate.expand();
    let c = unit.dot(&expansion)?;
    let candidate = SimpleVector { orientation: Orientation::from_sign(c), ..candidate };
    let residual = unit.sub(&candidate.expand())?.norm();
    Ok((residual <= tol).then_some(candidate))
}

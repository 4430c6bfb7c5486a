//! Sampled links in spheres, minimal products and first-variation checks.
//!
//! A [`SampledLink`] is a finitely stratified quadrature model of a closed
//! k-dimensional submanifold (or integral varifold) of 𝕊ᴺ ⊂ ℝᴺ⁺¹. Every
//! sample carries a point, an oriented orthonormal tangent frame, a positive
//! quadrature weight and an integer multiplicity θ. Frames are oriented so
//! that `(x, τ₁, …, τ_k)` is positive on the cone's tangent space, which for
//! hypersurfaces means the outward normal comes first.

mod families;
mod product;
mod variation;

use rayon::prelude::*;

use crate::comass::frame::{det, DenseForm};
use crate::error::{Error, Result};
use crate::exterior::{AlternatingForm, MultiVector};

pub use families::{build_link, EmbeddedFamily, ExplicitStratum, LinkFamily, LinkFixture};
pub use product::{minimal_product, MinimalProductSpec};
pub use variation::{
    eta_coefficient, first_variation, stationarity_report, StationarityReport, VectorField, FINITE_DIFFERENCE_STEP,
};

const POINT_TOL: f64 = 1e-10;
const FRAME_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub point: Vec<f64>,
    pub frame: Vec<Vec<f64>>,
    pub weight: f64,
    pub theta: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Stratum {
    pub samples: Vec<Sample>,
    /// Typical distance between neighbouring samples.
    pub spacing: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampledLink {
    ambient_dim: usize,
    dim: usize,
    strata: Vec<Stratum>,
}

impl SampledLink {
    /// Builds and validates a link.
    pub fn new(ambient_dim: usize, dim: usize, strata: Vec<Stratum>) -> Result<Self> {
        let link = Self { ambient_dim, dim, strata };
        link.validate()?;
        Ok(link)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn strata(&self) -> &[Stratum] {
        &self.strata
    }

    pub fn samples(&self) -> impl Iterator<Item = &Sample> + '_ {
        self.strata.iter().flat_map(|s| s.samples.iter())
    }

    pub fn num_samples(&self) -> usize {
        self.strata.iter().map(|s| s.samples.len()).sum()
    }

    /// Σ θ·weight.
    pub fn total_volume(&self) -> f64 {
        let terms: Vec<f64> = self.samples().map(|s| s.theta as f64 * s.weight).collect();
        pairwise_sum(&terms)
    }

    pub fn validate(&self) -> Result<()> {
        if self.strata.is_empty() {
            return Err(Error::InvalidLink("no strata".into()));
        }
        for (si, stratum) in self.strata.iter().enumerate() {
            for (i, s) in stratum.samples.iter().enumerate() {
                let at = || format!("stratum {si}, sample {i}");
                if s.point.len() != self.ambient_dim {
                    return Err(Error::InvalidLink(format!("{}: point has length {}", at(), s.point.len())));
                }
                let r = norm(&s.point);
                if (r - 1.0).abs() > POINT_TOL {
                    return Err(Error::InvalidLink(format!("{}: |x| = {r}", at())));
                }
                if s.frame.len() != self.dim || s.frame.iter().any(|v| v.len() != self.ambient_dim) {
                    return Err(Error::InvalidLink(format!("{}: frame has the wrong shape", at())));
                }
                for (a, u) in s.frame.iter().enumerate() {
                    if dot(u, &s.point).abs() > FRAME_TOL {
                        return Err(Error::InvalidLink(format!("{}: frame not tangent to the sphere", at())));
                    }
                    for (b, v) in s.frame.iter().enumerate().skip(a) {
                        let target = if a == b { 1.0 } else { 0.0 };
                        if (dot(u, v) - target).abs() > FRAME_TOL {
                            return Err(Error::InvalidLink(format!("{}: frame not orthonormal", at())));
                        }
                    }
                }
                if !(s.weight > 0.0) {
                    return Err(Error::InvalidLink(format!("{}: weight {} not positive", at(), s.weight)));
                }
                if s.theta == 0 {
                    return Err(Error::InvalidLink(format!("{}: multiplicity 0", at())));
                }
            }
        }
        Ok(())
    }

    /// The image under `x ↦ Σ xᵢ bᵢ` for orthonormal vectors `b₁,…,b_{N+1}` in ℝᴹ.
    pub fn embed(&self, basis: &[Vec<f64>]) -> Result<Self> {
        if basis.len() != self.ambient_dim {
            return Err(Error::DimensionMismatch { left: basis.len(), right: self.ambient_dim });
        }
        let target = basis.first().map(|b| b.len()).unwrap_or(0);
        let dev = crate::exterior::gram_deviation(basis);
        if dev > 1e-10 {
            return Err(Error::NonOrthonormal(dev));
        }
        let map = |x: &[f64]| -> Vec<f64> {
            let mut out = vec![0.0; target];
            for (xi, b) in x.iter().zip(basis) {
                out.iter_mut().zip(b).for_each(|(o, bj)| *o += xi * bj);
            }
            out
        };
        let strata = self
            .strata
            .iter()
            .map(|st| Stratum {
                spacing: st.spacing,
                samples: st
                    .samples
                    .iter()
                    .map(|s| Sample {
                        point: map(&s.point),
                        frame: s.frame.iter().map(|v| map(v)).collect(),
                        weight: s.weight,
                        theta: s.theta,
                    })
                    .collect(),
            })
            .collect();
        Self::new(target, self.dim, strata)
    }

    /// Concatenates the strata of links of equal dimension and ambient space.
    pub fn union(links: &[SampledLink]) -> Result<Self> {
        let first = links.first().ok_or_else(|| Error::InvalidLink("empty union".into()))?;
        let mut strata = Vec::new();
        for l in links {
            if l.ambient_dim != first.ambient_dim {
                return Err(Error::DimensionMismatch { left: first.ambient_dim, right: l.ambient_dim });
            }
            if l.dim != first.dim {
                return Err(Error::InvalidLink(format!("union of dimensions {} and {}", first.dim, l.dim)));
            }
            strata.extend(l.strata.iter().cloned());
        }
        Self::new(first.ambient_dim, first.dim, strata)
    }

    /// Whether a sample stays more than `margin` spacings away from every
    /// other stratum (a regular point of the union).
    pub fn is_interior(&self, stratum: usize, index: usize, margin: f64) -> bool {
        let st = &self.strata[stratum];
        let x = &st.samples[index].point;
        let limit = margin * st.spacing;
        self.strata
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != stratum)
            .all(|(_, other)| other.samples.iter().all(|s| dist(&s.point, x) > limit))
    }
}

/// A point of the cone over a link at radius 1, with the oriented frame
/// `(x, τ₁, …, τ_k)` of its tangent (k+1)-plane.
#[derive(Clone, Debug)]
pub struct ConeSample {
    pub point: Vec<f64>,
    pub frame: Vec<Vec<f64>>,
    pub weight: f64,
    pub theta: u32,
}

pub fn cone_tangent_samples(link: &SampledLink) -> Vec<ConeSample> {
    link.samples()
        .map(|s| {
            let mut frame = Vec::with_capacity(s.frame.len() + 1);
            frame.push(s.point.clone());
            frame.extend(s.frame.iter().cloned());
            ConeSample { point: s.point.clone(), frame, weight: s.weight, theta: s.theta }
        })
        .collect()
}

/// `Σ θ·w·φ(τ₁∧…∧τ_k)` over all samples. A 0-form is integrated as a
/// constant function, so the form `1` gives the total volume.
pub fn integrate_form(link: &SampledLink, phi: &AlternatingForm) -> Result<f64> {
    if phi.degree() != link.dim && phi.degree() != 0 {
        return Err(Error::DegreeMismatch { expected: link.dim, found: phi.degree() });
    }
    if phi.dim() != link.ambient_dim {
        return Err(Error::DimensionMismatch { left: phi.dim(), right: link.ambient_dim });
    }
    let form = DenseForm::new(phi);
    let samples: Vec<&Sample> = link.samples().collect();
    let value = |s: &Sample| if phi.degree() == 0 { phi.get(&[]) } else { form.value(&s.frame) };
    let terms: Vec<f64> = samples.par_iter().map(|s| s.theta as f64 * s.weight * value(s)).collect();
    Ok(pairwise_sum(&terms))
}

/// The oriented tangent k-vector of a sample.
pub fn tangent_vector(sample: &Sample) -> MultiVector {
    let n = sample.point.len();
    MultiVector::wedge_vectors(n, &sample.frame).expect("frame vectors have the ambient dimension")
}

/// Summation over a fixed binary tree, so totals do not depend on how the
/// terms were produced.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 8 {
        return v.iter().sum();
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}

/// Flips the last frame vector if `(x, frame)` is negatively oriented.
pub(crate) fn orient(point: &[f64], frame: &mut [Vec<f64>]) {
    let n = point.len();
    if frame.len() + 1 != n || frame.is_empty() {
        return;
    }
    let mut a = vec![0.0; n * n];
    for r in 0..n {
        a[r * n] = point[r];
        for (c, v) in frame.iter().enumerate() {
            a[r * n + c + 1] = v[r];
        }
    }
    if det(&mut a, n) < 0.0 {
        if let Some(v) = frame.last_mut() {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

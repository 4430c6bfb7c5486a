use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{dot, norm, pairwise_sum, Sample, SampledLink};
use crate::error::{Error, Result};

pub const FINITE_DIFFERENCE_STEP: f64 = 1e-5;

/// A vector field on ℝᴺ⁺¹. Matrices are row-major; the quadratic part is
/// `X(q)_r = Σ_{s,t} Q[r][s][t] q_s q_t` with `Q` flattened in that order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VectorField {
    Constant {
        v: Vec<f64>,
    },
    Linear {
        a: Vec<f64>,
    },
    Quadratic {
        a: Vec<f64>,
        q: Vec<f64>,
    },
    /// Infinitesimal rotation in the plane of coordinates `i`, `j` (1-based).
    Rotation {
        i: usize,
        j: usize,
    },
}

impl VectorField {
    pub fn eval(&self, p: &[f64]) -> Vec<f64> {
        let n = p.len();
        match self {
            VectorField::Constant { v } => v.clone(),
            VectorField::Linear { a } => (0..n).map(|r| dot(&a[r * n..(r + 1) * n], p)).collect(),
            VectorField::Quadratic { a, q } => (0..n)
                .map(|r| {
                    let mut s = dot(&a[r * n..(r + 1) * n], p);
                    for (si, ps) in p.iter().enumerate() {
                        s += ps * dot(&q[(r * n + si) * n..(r * n + si + 1) * n], p);
                    }
                    s
                })
                .collect(),
            VectorField::Rotation { i, j } => {
                let mut out = vec![0.0; n];
                out[j - 1] = p[i - 1];
                out[i - 1] = -p[j - 1];
                out
            }
        }
    }

    pub fn check(&self, n: usize) -> Result<()> {
        let ok = match self {
            VectorField::Constant { v } => v.len() == n,
            VectorField::Linear { a } => a.len() == n * n,
            VectorField::Quadratic { a, q } => a.len() == n * n && q.len() == n * n * n,
            VectorField::Rotation { i, j } => *i >= 1 && *j >= 1 && *i <= n && *j <= n && i != j,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { left: n, right: 0 })
        }
    }

    /// Tangential part `X(q) − ⟨X(q), q⟩ q` on the sphere.
    pub fn tangential(&self, p: &[f64]) -> Vec<f64> {
        let x = self.eval(p);
        let r = dot(&x, p);
        x.iter().zip(p).map(|(xi, pi)| xi - r * pi).collect()
    }
}

fn divergence(field: &VectorField, s: &Sample) -> f64 {
    let h = FINITE_DIFFERENCE_STEP;
    s.frame
        .iter()
        .map(|tau| {
            let plus: Vec<f64> = s.point.iter().zip(tau).map(|(x, t)| x + h * t).collect();
            let minus: Vec<f64> = s.point.iter().zip(tau).map(|(x, t)| x - h * t).collect();
            let d: Vec<f64> = field
                .tangential(&plus)
                .iter()
                .zip(field.tangential(&minus))
                .map(|(a, b)| (a - b) / (2.0 * h))
                .collect();
            dot(tau, &d)
        })
        .sum()
}

/// `Σ θ·w·div_M X_T`, the first variation of the link along the tangential
/// part of `X`. Zero for stationary links.
pub fn first_variation(link: &SampledLink, field: &VectorField) -> Result<f64> {
    field.check(link.ambient_dim())?;
    let samples: Vec<&Sample> = link.samples().collect();
    let terms: Vec<f64> = samples.par_iter().map(|s| s.theta as f64 * s.weight * divergence(field, s)).collect();
    Ok(pairwise_sum(&terms))
}

fn field_size(link: &SampledLink, field: &VectorField) -> f64 {
    let samples: Vec<&Sample> = link.samples().collect();
    let terms: Vec<f64> =
        samples.par_iter().map(|s| s.theta as f64 * s.weight * norm(&field.tangential(&s.point))).collect();
    pairwise_sum(&terms)
}

#[derive(Clone, Debug)]
pub struct StationarityReport {
    pub max_abs: f64,
    pub mean_abs: f64,
    /// First variation of each field divided by `∫|X_T| dμ`.
    pub values: Vec<f64>,
    pub n_fields: usize,
    pub seed: u64,
}

/// The `i`-th field of the seeded battery: constant, linear and quadratic
/// fields in turn, with standard normal coefficients.
pub fn battery_field(dim: usize, seed: u64, i: usize) -> VectorField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i as u64);
    let mut draw = |len: usize| -> Vec<f64> { (0..len).map(|_| rng.sample(StandardNormal)).collect() };
    match i % 3 {
        0 => VectorField::Constant { v: draw(dim) },
        1 => VectorField::Linear { a: draw(dim * dim) },
        _ => {
            let a = draw(dim * dim);
            let q = draw(dim * dim * dim);
            VectorField::Quadratic { a, q }
        }
    }
}

pub fn stationarity_report(link: &SampledLink, n_fields: usize, seed: u64) -> Result<StationarityReport> {
    if n_fields == 0 {
        return Err(Error::Precondition("n_fields must be at least 1".into()));
    }
    let n = link.ambient_dim();
    let values = (0..n_fields)
        .map(|i| {
            let field = battery_field(n, seed, i);
            let size = field_size(link, &field);
            let fv = first_variation(link, &field)?;
            Ok(if size > 0.0 { fv / size } else { 0.0 })
        })
        .collect::<Result<Vec<f64>>>()?;
    let max_abs = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mean_abs = values.iter().map(|v| v.abs()).sum::<f64>() / n_fields as f64;
    Ok(StationarityReport { max_abs, mean_abs, values, n_fields, seed })
}

/// Coefficient `−(λ₂/λ₁)m₁ + (λ₁/λ₂)m₂` of the cross term in the first
/// variation of `λ₁M₁ × λ₂M₂` with `λᵢ = √(mᵢ/(m₁+m₂))`.
pub fn eta_coefficient(m1: usize, m2: usize) -> f64 {
    let k = (m1 + m2) as f64;
    let l1 = (m1 as f64 / k).sqrt();
    let l2 = (m2 as f64 / k).sqrt();
    -(l2 / l1) * m1 as f64 + (l1 / l2) * m2 as f64
}

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{minimal_product, orient, Sample, SampledLink, Stratum};
use crate::error::{Error, Result};

/// Gallery link families. `resolution` is the number of samples per circle
/// (or latitude bands per sphere).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum LinkFamily {
    /// The unit circle in ℝ².
    Circle,
    /// The round unit sphere 𝕊ᵈ ⊂ ℝᵈ⁺¹.
    Sphere { dim: usize },
    /// The Clifford torus 𝕊¹ ×̇ 𝕊¹ ⊂ 𝕊³.
    ProductTorus,
    /// The circle at height `height` in 𝕊² (not minimal unless height = 0).
    Latitude { height: f64 },
    /// The union of three special Lagrangian great 2-spheres in 𝕊⁵, spanned by
    /// `{e1,e2,e3}`, `{−f1,f2,e3}` and `{−e1,f2,f3}` with `fⱼ = e_{3+j}`.
    SlSpheres,
    /// Union of members, each optionally embedded by an orthonormal basis.
    Union { members: Vec<EmbeddedFamily> },
    /// Samples given directly.
    Explicit { ambient_dim: usize, dim: usize, strata: Vec<ExplicitStratum> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddedFamily {
    #[serde(flatten)]
    pub link: LinkFamily,
    /// Images of the member's standard basis vectors, all of one length.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<Vec<f64>>>,
}

/// Flat row-major arrays: `points` has `count·(N+1)` entries, `frames` has
/// `count·k·(N+1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitStratum {
    pub points: Vec<f64>,
    pub frames: Vec<f64>,
    pub weights: Vec<f64>,
    #[serde(default)]
    pub theta: Vec<u32>,
}

/// A link fixture file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinkFixture {
    #[serde(flatten)]
    pub family: LinkFamily,
    pub resolution: usize,
    /// Analytic volume, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub volume: Option<f64>,
    /// Allowed |total_volume − volume| at this resolution.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub volume_tolerance: Option<f64>,
}

impl LinkFixture {
    pub fn build(&self) -> Result<SampledLink> {
        build_link(&self.family, self.resolution)
    }
}

pub fn build_link(family: &LinkFamily, resolution: usize) -> Result<SampledLink> {
    if resolution < 4 {
        return Err(Error::Precondition(format!("resolution {resolution} < 4")));
    }
    let n = resolution;
    match family {
        LinkFamily::Circle => sphere(1, n),
        LinkFamily::Sphere { dim } => {
            if *dim == 0 {
                return Err(Error::Unsupported("0-sphere".into()));
            }
            sphere(*dim, n)
        }
        LinkFamily::ProductTorus => {
            let c = sphere(1, n)?;
            minimal_product(&[c.clone(), c])
        }
        LinkFamily::Latitude { height } => latitude(*height, n),
        LinkFamily::SlSpheres => {
            let s = sphere(2, n)?;
            let e = |i: usize, sign: f64| {
                let mut v = vec![0.0; 6];
                v[i - 1] = sign;
                v
            };
            let bases = [
                vec![e(1, 1.0), e(2, 1.0), e(3, 1.0)],
                vec![e(4, -1.0), e(5, 1.0), e(3, 1.0)],
                vec![e(1, -1.0), e(5, 1.0), e(6, 1.0)],
            ];
            let parts = bases.iter().map(|b| s.embed(b)).collect::<Result<Vec<_>>>()?;
            SampledLink::union(&parts)
        }
        LinkFamily::Union { members } => {
            let parts = members
                .iter()
                .map(|m| {
                    let l = build_link(&m.link, resolution)?;
                    match &m.basis {
                        Some(b) => l.embed(b),
                        None => Ok(l),
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            SampledLink::union(&parts)
        }
        LinkFamily::Explicit { ambient_dim, dim, strata } => explicit(*ambient_dim, *dim, strata),
    }
}

/// 𝕊ᵈ with `n` samples per great circle. The 2-sphere uses `n` bands of
/// equal height (hence equal area) with `2n` points each, offset by half a
/// step on alternate bands; higher spheres are built zonally from 𝕊ᵈ⁻¹.
fn sphere(d: usize, n: usize) -> Result<SampledLink> {
    let samples = sphere_samples(d, n);
    let spacing = match d {
        1 => 2.0 * PI / n as f64,
        2 => PI / n as f64,
        _ => PI / n as f64,
    };
    SampledLink::new(d + 1, d, vec![Stratum { samples, spacing }])
}

fn sphere_samples(d: usize, n: usize) -> Vec<Sample> {
    match d {
        1 => (0..n)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / n as f64;
                let (s, c) = t.sin_cos();
                Sample { point: vec![c, s], frame: vec![vec![-s, c]], weight: 2.0 * PI / n as f64, theta: 1 }
            })
            .collect(),
        2 => {
            let per_band = 2 * n;
            let weight = 4.0 * PI / (2 * n * n) as f64;
            let mut out = Vec::with_capacity(n * per_band);
            for i in 0..n {
                let z = -1.0 + (2 * i + 1) as f64 / n as f64;
                let r = (1.0 - z * z).sqrt();
                let shift = if i % 2 == 1 { 0.5 } else { 0.0 };
                for j in 0..per_band {
                    let phi = 2.0 * PI * (j as f64 + shift) / per_band as f64;
                    let (s, c) = phi.sin_cos();
                    let point = vec![r * c, r * s, z];
                    let frame = vec![vec![-s, c, 0.0], vec![-z * c, -z * s, r]];
                    out.push(Sample { point, frame, weight, theta: 1 });
                }
            }
            out
        }
        _ => {
            let sub = sphere_samples(d - 1, n);
            let bands = n;
            let dpsi = PI / bands as f64;
            let mut out = Vec::with_capacity(bands * sub.len());
            for i in 0..bands {
                let psi = (i as f64 + 0.5) * dpsi;
                let (sp, cp) = psi.sin_cos();
                for s in &sub {
                    let mut point: Vec<f64> = s.point.iter().map(|y| sp * y).collect();
                    point.push(cp);
                    let mut frame: Vec<Vec<f64>> = s
                        .frame
                        .iter()
                        .map(|v| {
                            let mut w = v.clone();
                            w.push(0.0);
                            w
                        })
                        .collect();
                    let mut t: Vec<f64> = s.point.iter().map(|y| cp * y).collect();
                    t.push(-sp);
                    frame.push(t);
                    orient(&point, &mut frame);
                    let weight = s.weight * sp.powi(d as i32 - 1) * dpsi;
                    out.push(Sample { point, frame, weight, theta: 1 });
                }
            }
            out
        }
    }
}

fn latitude(height: f64, n: usize) -> Result<SampledLink> {
    if height.abs() >= 1.0 {
        return Err(Error::Precondition(format!("latitude height {height} outside (-1, 1)")));
    }
    let r = (1.0 - height * height).sqrt();
    let samples = (0..n)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / n as f64;
            let (s, c) = t.sin_cos();
            Sample {
                point: vec![r * c, r * s, height],
                frame: vec![vec![-s, c, 0.0]],
                weight: 2.0 * PI * r / n as f64,
                theta: 1,
            }
        })
        .collect();
    SampledLink::new(3, 1, vec![Stratum { samples, spacing: 2.0 * PI * r / n as f64 }])
}

fn explicit(ambient_dim: usize, dim: usize, strata: &[ExplicitStratum]) -> Result<SampledLink> {
    let mut out = Vec::new();
    for (si, st) in strata.iter().enumerate() {
        let count = st.weights.len();
        if st.points.len() != count * ambient_dim || st.frames.len() != count * dim * ambient_dim {
            return Err(Error::InvalidLink(format!("stratum {si}: array lengths do not match {count} samples")));
        }
        if !st.theta.is_empty() && st.theta.len() != count {
            return Err(Error::InvalidLink(format!("stratum {si}: theta has {} entries", st.theta.len())));
        }
        let samples: Vec<Sample> = (0..count)
            .map(|i| Sample {
                point: st.points[i * ambient_dim..(i + 1) * ambient_dim].to_vec(),
                frame: (0..dim)
                    .map(|a| {
                        let off = (i * dim + a) * ambient_dim;
                        st.frames[off..off + ambient_dim].to_vec()
                    })
                    .collect(),
                weight: st.weights[i],
                theta: st.theta.get(i).copied().unwrap_or(1),
            })
            .collect();
        let mean_weight = st.weights.iter().sum::<f64>() / count.max(1) as f64;
        let spacing = if dim == 0 { 0.0 } else { mean_weight.abs().powf(1.0 / dim as f64) };
        out.push(Stratum { samples, spacing });
    }
    SampledLink::new(ambient_dim, dim, out)
}

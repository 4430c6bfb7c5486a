use super::{Sample, SampledLink, Stratum};
use crate::error::{Error, Result};

/// Factors of a minimal product together with their scalings
/// `λᵢ = √(kᵢ/k)`, `k = Σ kᵢ`.
#[derive(Clone, Debug)]
pub struct MinimalProductSpec {
    pub factors: Vec<SampledLink>,
    pub lambdas: Vec<f64>,
}

impl MinimalProductSpec {
    pub fn new(factors: Vec<SampledLink>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidLink("minimal product of no factors".into()));
        }
        if let Some(i) = factors.iter().position(|f| f.dim() == 0) {
            return Err(Error::InvalidLink(format!("factor {} is zero-dimensional", i + 1)));
        }
        let k: usize = factors.iter().map(|f| f.dim()).sum();
        let lambdas = factors.iter().map(|f| (f.dim() as f64 / k as f64).sqrt()).collect();
        Ok(Self { factors, lambdas })
    }

    pub fn dim(&self) -> usize {
        self.factors.iter().map(|f| f.dim()).sum()
    }

    pub fn ambient_dim(&self) -> usize {
        self.factors.iter().map(|f| f.ambient_dim()).sum()
    }

    /// 0-based coordinate offset of each factor block in the product space.
    pub fn offsets(&self) -> Vec<usize> {
        self.factors
            .iter()
            .scan(0, |acc, f| {
                let o = *acc;
                *acc += f.ambient_dim();
                Some(o)
            })
            .collect()
    }

    /// Samples `(λ₁x₁, …, λₙxₙ)` over the Cartesian product of the factor
    /// samples, stratum by stratum.
    pub fn build(&self) -> Result<SampledLink> {
        if self.factors.len() == 1 {
            return Ok(self.factors[0].clone());
        }
        let total = self.ambient_dim();
        let offsets = self.offsets();
        let mut strata: Vec<Stratum> = vec![Stratum { samples: vec![empty_sample()], spacing: f64::INFINITY }];
        for ((factor, &lambda), &offset) in self.factors.iter().zip(&self.lambdas).zip(&offsets) {
            let scale = lambda.powi(factor.dim() as i32);
            let mut next = Vec::with_capacity(strata.len() * factor.strata().len());
            for acc in &strata {
                for fs in factor.strata() {
                    let mut samples = Vec::with_capacity(acc.samples.len() * fs.samples.len());
                    for a in &acc.samples {
                        for s in &fs.samples {
                            samples.push(extend(a, s, lambda, scale, offset, total));
                        }
                    }
                    next.push(Stratum { samples, spacing: acc.spacing.min(lambda * fs.spacing) });
                }
            }
            strata = next;
        }
        SampledLink::new(total, self.dim(), strata)
    }
}

fn empty_sample() -> Sample {
    Sample { point: Vec::new(), frame: Vec::new(), weight: 1.0, theta: 1 }
}

fn extend(acc: &Sample, s: &Sample, lambda: f64, scale: f64, offset: usize, total: usize) -> Sample {
    let mut point = acc.point.clone();
    point.resize(total, 0.0);
    for (i, x) in s.point.iter().enumerate() {
        point[offset + i] = lambda * x;
    }
    let mut frame: Vec<Vec<f64>> = acc
        .frame
        .iter()
        .map(|v| {
            let mut w = v.clone();
            w.resize(total, 0.0);
            w
        })
        .collect();
    for v in &s.frame {
        let mut w = vec![0.0; total];
        w[offset..offset + v.len()].copy_from_slice(v);
        frame.push(w);
    }
    Sample { point, frame, weight: acc.weight * scale * s.weight, theta: acc.theta * s.theta }
}

/// `L₁ ×̇ ⋯ ×̇ Lₙ`.
pub fn minimal_product(factors: &[SampledLink]) -> Result<SampledLink> {
    MinimalProductSpec::new(factors.to_vec())?.build()
}

#[cfg(test)]
mod tests {
    use super::super::{build_link, LinkFamily};
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn clifford_torus() {
        let c = build_link(&LinkFamily::Circle, 32).unwrap();
        let spec = MinimalProductSpec::new(vec![c.clone(), c]).unwrap();
        for l in &spec.lambdas {
            assert!((l - 0.5f64.sqrt()).abs() < 1e-12);
        }
        let t = spec.build().unwrap();
        assert_eq!((t.ambient_dim(), t.dim()), (4, 2));
        assert!((t.total_volume() - 2.0 * PI * PI).abs() < 1e-9);
    }

    #[test]
    fn sphere_times_circle_lambdas() {
        let s = build_link(&LinkFamily::Sphere { dim: 2 }, 8).unwrap();
        let c = build_link(&LinkFamily::Circle, 8).unwrap();
        let spec = MinimalProductSpec::new(vec![s, c]).unwrap();
        assert!((spec.lambdas[0] - (2.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert!((spec.lambdas[1] - (1.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert_eq!(spec.offsets(), vec![0, 3]);
        spec.build().unwrap().validate().unwrap();
    }

    #[test]
    fn single_factor_is_unchanged() {
        let c = build_link(&LinkFamily::Circle, 8).unwrap();
        let spec = MinimalProductSpec::new(vec![c.clone()]).unwrap();
        assert_eq!(spec.lambdas, vec![1.0]);
        assert_eq!(spec.build().unwrap(), c);
    }

    #[test]
    fn union_factor_multiplies_strata() {
        let l = build_link(&LinkFamily::SlSpheres, 4).unwrap();
        let c = build_link(&LinkFamily::Circle, 4).unwrap();
        let p = minimal_product(&[l, c]).unwrap();
        assert_eq!(p.strata().len(), 3);
        assert_eq!(p.ambient_dim(), 8);
    }
}

//! The obstruction pipeline for cones over minimal products.
//!
//! For a candidate constant-coefficient form φₒ on the product space the
//! pipeline measures how far φₒ is from calibrating the sampled cone, builds
//! `Ψ = (x̃ᵢ ∧ ξ̃ᵢ ∧ ⋯) ⌟ φₒ` from base samples of the fixed factors, pulls
//! it back to the varying factor's block and integrates it over that factor.
//! A calibrating φₒ would make `Ψ̲(ξ(x)) = ±λᵢ` at every x, so the integral
//! would be `±λᵢ·vol(Lⱼ)`, while a constant-coefficient form integrates to 0
//! over a closed link.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::{contraction_form, BlockLayout, FixedFactor};
use crate::comass::frame::DenseForm;
use crate::comass::{certify, comass, ComassOptions};
use crate::error::{Error, Result};
use crate::exterior::{pullback, AlternatingForm, Basis, MultiVector, SimpleVector};
use crate::geometry::{cone_tangent_samples, integrate_form, pairwise_sum, MinimalProductSpec, SampledLink};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Obstructed,
    CandidateNotACalibration,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Obstructed => "obstructed",
            Verdict::CandidateNotACalibration => "candidate-not-a-calibration",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// The verdict rule, kept separate so it can be tested on its own.
pub fn verdict(
    calibration_residual: f64,
    comass: f64,
    pullback_integral: f64,
    predicted_magnitude: f64,
    cal_tol: f64,
    comass_tol: f64,
) -> Verdict {
    if calibration_residual > cal_tol || comass > 1.0 + comass_tol {
        Verdict::CandidateNotACalibration
    } else if pullback_integral.abs() >= 0.5 * predicted_magnitude {
        Verdict::Obstructed
    } else {
        Verdict::Inconclusive
    }
}

#[derive(Clone, Debug)]
pub struct WitnessOptions {
    /// 0-based index of the factor Ψ̲ is integrated over.
    pub varying_factor: usize,
    /// Fixed factor whose base point enters Ψ; defaults to the first fixed one.
    pub point_factor: Option<usize>,
    /// `(stratum, sample)` per factor; the entry of the varying factor is ignored.
    pub base_choices: Option<Vec<(usize, usize)>>,
    pub cal_tol: f64,
    pub comass_tol: f64,
    pub comass_restarts: usize,
    pub seed: u64,
    /// Run the comass oracle too when the form is inside its guard domain.
    pub oracle_resolution: Option<usize>,
    /// Base points stay this many sample spacings away from other strata.
    pub interior_margin: f64,
}

impl Default for WitnessOptions {
    fn default() -> Self {
        Self {
            varying_factor: 0,
            point_factor: None,
            base_choices: None,
            cal_tol: 1e-3,
            comass_tol: 1e-6,
            comass_restarts: 12,
            seed: 0,
            oracle_resolution: None,
            interior_margin: 2.0,
        }
    }
}

/// Everything about a minimal-product cone that does not depend on φₒ.
#[derive(Clone, Debug)]
pub struct ObstructionSetup {
    pub spec: MinimalProductSpec,
    pub product: SampledLink,
    pub layout: BlockLayout,
    pub fixed: Vec<FixedFactor>,
    pub varying: usize,
    pub point_factor: usize,
    pub predicted_magnitude: f64,
    pub basis: Basis,
    /// Dense Plücker coordinates of the oriented cone tangent planes.
    pub planes: Vec<Vec<f64>>,
    pub options: WitnessOptions,
}

impl ObstructionSetup {
    pub fn new(spec: MinimalProductSpec, options: WitnessOptions) -> Result<Self> {
        let n = spec.factors.len();
        if n < 2 {
            return Err(Error::NotApplicable("the cone obstruction needs at least two factors".into()));
        }
        if spec.factors.iter().any(|f| f.dim() == 0) {
            return Err(Error::NotApplicable("every factor must have positive dimension".into()));
        }
        let varying = options.varying_factor;
        if varying >= n {
            return Err(Error::Precondition(format!("varying factor {} of {n}", varying + 1)));
        }
        let point_factor = options.point_factor.unwrap_or(if varying == 0 { 1 } else { 0 });
        if point_factor >= n || point_factor == varying {
            return Err(Error::Precondition(format!("point factor {} must be a fixed factor", point_factor + 1)));
        }
        let layout = BlockLayout::new(spec.factors.iter().map(|f| f.ambient_dim()).collect());

        let mut order: Vec<usize> = vec![point_factor];
        order.extend((0..n).filter(|&i| i != varying && i != point_factor));
        let mut fixed = Vec::new();
        for i in order {
            let factor = &spec.factors[i];
            let (st, idx) = match &options.base_choices {
                Some(c) => {
                    *c.get(i).ok_or_else(|| Error::Precondition(format!("no base choice for factor {}", i + 1)))?
                }
                None => default_base(factor, options.interior_margin)?,
            };
            let sample = factor
                .strata()
                .get(st)
                .and_then(|s| s.samples.get(idx))
                .ok_or_else(|| Error::Precondition(format!("factor {}: no sample ({st}, {idx})", i + 1)))?;
            if !factor.is_interior(st, idx, options.interior_margin) {
                return Err(Error::Precondition(format!("factor {}: base sample ({st}, {idx}) is not regular", i + 1)));
            }
            fixed.push(FixedFactor {
                block: i,
                point: (i == point_factor).then(|| sample.point.clone()),
                tangent: SimpleVector::from_frame(factor.ambient_dim(), sample.frame.clone())?,
            });
        }

        let product = spec.build()?;
        let basis = Basis::new(product.ambient_dim(), product.dim() + 1)?;
        let planes: Vec<Vec<f64>> = cone_tangent_samples(&product)
            .par_iter()
            .map(|c| MultiVector::wedge_vectors(product.ambient_dim(), &c.frame).map(|v| v.to_dense(&basis)))
            .collect::<Result<Vec<_>>>()?;
        let predicted_magnitude = spec.lambdas[point_factor] * spec.factors[varying].total_volume();
        Ok(Self { spec, product, layout, fixed, varying, point_factor, predicted_magnitude, basis, planes, options })
    }

    pub fn ambient_dim(&self) -> usize {
        self.product.ambient_dim()
    }

    pub fn form_degree(&self) -> usize {
        self.product.dim() + 1
    }

    /// Values of φ on every cone plane.
    pub fn plane_values(&self, phi: &AlternatingForm) -> Vec<f64> {
        let dense = phi.to_dense(&self.basis);
        self.planes.iter().map(|p| p.iter().zip(&dense).map(|(a, b)| a * b).sum()).collect()
    }

    /// λ of the factor whose point enters Ψ: the value ±Ψ̲(ξ(x)) would take.
    pub fn psi_expected(&self) -> f64 {
        self.spec.lambdas[self.point_factor]
    }
}

fn default_base(link: &SampledLink, margin: f64) -> Result<(usize, usize)> {
    for (si, st) in link.strata().iter().enumerate() {
        for i in 0..st.samples.len() {
            if link.is_interior(si, i, margin) {
                return Ok((si, i));
            }
        }
    }
    Err(Error::Precondition("no regular sample away from the other strata".into()))
}

#[derive(Clone, Debug)]
pub struct ObstructionReport {
    pub comass: f64,
    /// `max |1 − φₒ(cone plane)|` over all cone samples.
    pub calibration_residual: f64,
    pub calibration_min: f64,
    pub psi_mean: f64,
    /// `max |Ψ̲(ξ(x)) − mean|` over the varying factor's samples.
    pub psi_constancy: f64,
    pub psi_expected: f64,
    pub predicted_magnitude: f64,
    pub pullback_integral: f64,
    /// `∫ dΨ̲` over the truncated cone; zero since Ψ̲ has constant coefficients.
    pub stokes_value: f64,
    pub verdict: Verdict,
    pub cal_tol: f64,
}

/// Runs the obstruction pipeline for a single candidate φₒ.
pub fn obstruction_witness(setup: &ObstructionSetup, phi_o: &AlternatingForm) -> Result<ObstructionReport> {
    let opts = &setup.options;
    if phi_o.dim() != setup.ambient_dim() || phi_o.degree() != setup.form_degree() {
        return Err(Error::DegreeMismatch { expected: setup.form_degree(), found: phi_o.degree() });
    }
    let copts = ComassOptions { restarts: opts.comass_restarts, seed: opts.seed, ..Default::default() };
    let comass_value = if phi_o.is_zero() {
        0.0
    } else {
        match opts.oracle_resolution {
            Some(r) => certify(phi_o, copts, r)?.value,
            None => crate::comass::comass_with(phi_o, copts)?.value,
        }
    };
    let values = setup.plane_values(phi_o);
    let calibration_residual = values.iter().fold(0.0f64, |m, v| m.max((1.0 - v).abs()));
    let calibration_min = values.iter().copied().fold(f64::INFINITY, f64::min);

    let psi = contraction_form(phi_o, &setup.fixed, &setup.layout)?;
    let varying = &setup.spec.factors[setup.varying];
    let psi_bar = pullback(&psi, &setup.layout.embedding(setup.varying)?)?;
    let dense = DenseForm::new(&psi_bar);
    let psi_values: Vec<f64> = varying.samples().map(|s| dense.value(&s.frame)).collect();
    let psi_mean = pairwise_sum(&psi_values) / psi_values.len() as f64;
    let psi_constancy = psi_values.iter().fold(0.0f64, |m, v| m.max((v - psi_mean).abs()));
    let pullback_integral = integrate_form(varying, &psi_bar)?;
    let stokes_value = stokes_side(varying, &psi_bar)?;

    let predicted_magnitude = setup.predicted_magnitude;
    Ok(ObstructionReport {
        comass: comass_value,
        calibration_residual,
        calibration_min,
        psi_mean,
        psi_constancy,
        psi_expected: setup.psi_expected(),
        predicted_magnitude,
        pullback_integral,
        stokes_value,
        verdict: verdict(
            calibration_residual,
            comass_value,
            pullback_integral,
            predicted_magnitude,
            opts.cal_tol,
            opts.comass_tol,
        ),
        cal_tol: opts.cal_tol,
    })
}

/// `∫_{C₁(L)} dΨ̲` over the cone truncated at radius 1. A constant-coefficient
/// form is closed, so the integrand is the zero (k+1)-form.
fn stokes_side(link: &SampledLink, psi_bar: &AlternatingForm) -> Result<f64> {
    let d_psi = AlternatingForm::zero(psi_bar.dim(), psi_bar.degree() + 1)?;
    let dense = DenseForm::new(&d_psi);
    let terms: Vec<f64> = cone_tangent_samples(link)
        .iter()
        .map(|c| c.theta as f64 * c.weight * dense.value(&c.frame) / (link.dim() + 1) as f64)
        .collect();
    Ok(pairwise_sum(&terms))
}

#[derive(Clone, Copy, Debug)]
pub struct FitOptions {
    pub iterations: usize,
    pub step: f64,
    /// Cone planes used while fitting (evenly strided); the report uses all.
    pub fit_samples: usize,
    /// Number of lowest planes averaged into each ascent direction.
    pub worst: usize,
    pub restarts: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { iterations: 40, step: 0.5, fit_samples: 1024, worst: 4, restarts: 6 }
    }
}

/// Best-effort calibration fit: maximizes `min φ(cone plane)` subject to
/// comass 1 by projected subgradient ascent, renormalizing by the comass
/// after every step. Returns the best form seen and its fitted minimum.
pub fn fit_calibration(
    setup: &ObstructionSetup,
    init: &AlternatingForm,
    opts: FitOptions,
    seed: u64,
) -> Result<(AlternatingForm, f64)> {
    let stride = setup.planes.len().div_ceil(opts.fit_samples.max(1)).max(1);
    let planes: Vec<&Vec<f64>> = setup.planes.iter().step_by(stride).collect();
    let copts =
        |t: usize| ComassOptions { restarts: opts.restarts, seed: seed.wrapping_add(t as u64), ..Default::default() };
    let normalize = |f: &[f64], t: usize| -> Result<Vec<f64>> {
        let phi = AlternatingForm::from_dense(&setup.basis, f);
        let c = crate::comass::comass_with(&phi, copts(t))?.value;
        Ok(f.iter().map(|x| x / c).collect())
    };
    let min_of = |f: &[f64]| -> (f64, Vec<usize>) {
        let mut vals: Vec<(f64, usize)> =
            planes.iter().enumerate().map(|(i, p)| (p.iter().zip(f).map(|(a, b)| a * b).sum(), i)).collect();
        vals.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        (vals[0].0, vals.iter().take(opts.worst.max(1)).map(|v| v.1).collect())
    };

    let mut f = normalize(&init.to_dense(&setup.basis), 0)?;
    let (mut cur, mut worst) = min_of(&f);
    let mut best = (cur, f.clone());
    for t in 0..opts.iterations {
        let eta = opts.step / ((t + 1) as f64).sqrt();
        let mut dir = vec![0.0; f.len()];
        for &i in &worst {
            dir.iter_mut().zip(planes[i]).for_each(|(d, p)| *d += p);
        }
        let dn = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
        if dn == 0.0 {
            break;
        }
        let stepped: Vec<f64> = f.iter().zip(&dir).map(|(x, d)| x + eta * d / dn).collect();
        f = normalize(&stepped, t + 1)?;
        (cur, worst) = min_of(&f);
        if cur > best.0 {
            best = (cur, f.clone());
        }
    }
    Ok((AlternatingForm::from_dense(&setup.basis, &best.1), best.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CandidateKind {
    Random,
    Fitted,
}

impl CandidateKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CandidateKind::Random => "random",
            CandidateKind::Fitted => "fitted",
        }
    }
}

fn gaussian_form(setup: &ObstructionSetup, seed: u64, stream: u64) -> AlternatingForm {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let v: Vec<f64> = (0..setup.basis.len()).map(|_| rng.sample(StandardNormal)).collect();
    AlternatingForm::from_dense(&setup.basis, &v)
}

/// Seeded candidates: `n_random` Gaussian forms normalized to comass 1 and
/// `n_fitted` outputs of [`fit_calibration`] started from the weighted mean
/// cone plane plus Gaussian noise.
pub fn candidate_family(
    setup: &ObstructionSetup,
    n_random: usize,
    n_fitted: usize,
    seed: u64,
    fit: FitOptions,
) -> Result<Vec<(CandidateKind, AlternatingForm)>> {
    let copts = ComassOptions { restarts: setup.options.comass_restarts, seed, ..Default::default() };
    let mut mean = vec![0.0; setup.basis.len()];
    let weights: Vec<f64> = setup.product.samples().map(|s| s.weight * s.theta as f64).collect();
    for (p, w) in setup.planes.iter().zip(&weights) {
        mean.iter_mut().zip(p).for_each(|(m, x)| *m += w * x);
    }
    let mean_norm = mean.iter().map(|x| x * x).sum::<f64>().sqrt();

    (0..n_random + n_fitted)
        .into_par_iter()
        .map(|i| {
            let g = gaussian_form(setup, seed, i as u64);
            if i < n_random {
                let c = comass(&g, copts.restarts, seed)?.value;
                Ok((CandidateKind::Random, g.scaled(1.0 / c)))
            } else {
                let init = if mean_norm > 1e-12 {
                    let m = AlternatingForm::from_dense(&setup.basis, &mean).scaled(1.0 / mean_norm);
                    m.axpy(0.5 / g.norm(), &g)?
                } else {
                    g
                };
                let (phi, _) = fit_calibration(setup, &init, fit, seed.wrapping_add(i as u64))?;
                Ok((CandidateKind::Fitted, phi))
            }
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct CandidateOutcome {
    pub kind: CandidateKind,
    pub report: ObstructionReport,
}

#[derive(Clone, Copy, Debug)]
pub struct SweepOptions {
    pub n_random: usize,
    pub n_fitted: usize,
    pub seed: u64,
    pub fit: FitOptions,
    /// Residual below which a candidate counts as calibrating.
    pub calibrating_tol: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self { n_random: 64, n_fitted: 36, seed: 0, fit: FitOptions::default(), calibrating_tol: 1e-3 }
    }
}

#[derive(Clone, Debug)]
pub struct DichotomySummary {
    pub outcomes: Vec<CandidateOutcome>,
    pub predicted_magnitude: f64,
    /// Candidates with residual ≤ tol and |∫Ψ̲| ≤ ¼·predicted.
    pub violations: usize,
    /// Candidates with residual ≤ tol.
    pub calibrating: usize,
    /// Calibrating candidates with |∫Ψ̲| ≥ ½·predicted.
    pub calibrating_with_large_integral: usize,
    pub best_residual: f64,
    pub max_abs_pullback: f64,
}

/// Evaluates a seeded candidate family and counts how often both sides of
/// the dichotomy hold at once.
pub fn dichotomy_sweep(setup: &ObstructionSetup, opts: SweepOptions) -> Result<DichotomySummary> {
    let family = candidate_family(setup, opts.n_random, opts.n_fitted, opts.seed, opts.fit)?;
    let outcomes: Vec<CandidateOutcome> = family
        .par_iter()
        .map(|(kind, phi)| Ok(CandidateOutcome { kind: *kind, report: obstruction_witness(setup, phi)? }))
        .collect::<Result<Vec<_>>>()?;
    let p = setup.predicted_magnitude;
    let calibrating: Vec<&CandidateOutcome> =
        outcomes.iter().filter(|o| o.report.calibration_residual <= opts.calibrating_tol).collect();
    let violations = calibrating.iter().filter(|o| o.report.pullback_integral.abs() <= 0.25 * p).count();
    let calibrating_with_large_integral =
        calibrating.iter().filter(|o| o.report.pullback_integral.abs() >= 0.5 * p).count();
    let best_residual = outcomes.iter().map(|o| o.report.calibration_residual).fold(f64::INFINITY, f64::min);
    let max_abs_pullback = outcomes.iter().map(|o| o.report.pullback_integral.abs()).fold(0.0, f64::max);
    Ok(DichotomySummary {
        predicted_magnitude: p,
        violations,
        calibrating: calibrating.len(),
        calibrating_with_large_integral,
        best_residual,
        max_abs_pullback,
        outcomes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::evaluate;
    use crate::geometry::{build_link, LinkFamily};

    fn clifford(res: usize) -> ObstructionSetup {
        let c = build_link(&LinkFamily::Circle, res).unwrap();
        ObstructionSetup::new(MinimalProductSpec::new(vec![c.clone(), c]).unwrap(), WitnessOptions::default()).unwrap()
    }

    #[test]
    fn verdict_rule() {
        assert_eq!(verdict(0.5, 1.0, 0.0, 4.0, 1e-3, 1e-6), Verdict::CandidateNotACalibration);
        assert_eq!(verdict(0.0, 1.1, 4.0, 4.0, 1e-3, 1e-6), Verdict::CandidateNotACalibration);
        assert_eq!(verdict(0.0, 1.0, 2.0, 4.0, 1e-3, 1e-6), Verdict::Obstructed);
        assert_eq!(verdict(0.0, 1.0, 1.0, 4.0, 1e-3, 1e-6), Verdict::Inconclusive);
    }

    #[test]
    fn single_factor_is_not_applicable() {
        let c = build_link(&LinkFamily::Circle, 8).unwrap();
        let r = ObstructionSetup::new(MinimalProductSpec::new(vec![c]).unwrap(), WitnessOptions::default());
        assert!(matches!(r, Err(Error::NotApplicable(_))));
    }

    #[test]
    fn clifford_predicted_magnitude() {
        let s = clifford(32);
        assert!((s.predicted_magnitude - 0.5f64.sqrt() * 2.0 * std::f64::consts::PI).abs() < 1e-9);
    }

    #[test]
    fn psi_takes_the_value_lambda_where_the_plane_is_calibrated() {
        // φ = dual of one cone plane: comass 1, calibrates that plane only
        let s = clifford(16);
        let c = build_link(&LinkFamily::Circle, 16).unwrap();
        let base = &s.fixed[0];
        let x2 = base.point.clone().unwrap();
        let t2 = base.tangent.frame()[0].clone();
        let sample = c.samples().nth(5).unwrap();
        let l = 0.5f64.sqrt();
        let p = vec![l * sample.point[0], l * sample.point[1], l * x2[0], l * x2[1]];
        let plane = MultiVector::wedge_vectors(
            4,
            &[p, vec![sample.frame[0][0], sample.frame[0][1], 0.0, 0.0], vec![0.0, 0.0, t2[0], t2[1]]],
        )
        .unwrap();
        let phi = plane.dual();
        assert!((evaluate(&phi, &plane).unwrap() - 1.0).abs() < 1e-12);
        let psi = contraction_form(&phi, &s.fixed, &s.layout).unwrap();
        let psi_bar = pullback(&psi, &s.layout.embedding(0).unwrap()).unwrap();
        let xi = MultiVector::vector(&sample.frame[0]);
        assert!((evaluate(&psi_bar, &xi).unwrap().abs() - l).abs() < 1e-12);
    }

    #[test]
    fn random_candidates_do_not_calibrate() {
        let s = clifford(32);
        let summary = dichotomy_sweep(
            &s,
            SweepOptions {
                n_random: 6,
                n_fitted: 2,
                fit: FitOptions { iterations: 10, ..Default::default() },
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(summary.violations, 0);
        assert!(summary.best_residual > 0.5);
        assert!(summary.max_abs_pullback < 1e-9);
        for o in &summary.outcomes {
            assert_eq!(o.report.verdict, Verdict::CandidateNotACalibration);
            assert!(o.report.stokes_value == 0.0);
        }
    }
}

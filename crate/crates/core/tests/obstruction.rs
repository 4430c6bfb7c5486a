use std::f64::consts::PI;

use calgeom::comass::maximizer_set;
use calgeom::comass::{comass, ComassOptions};
use calgeom::error::Error;
use calgeom::exterior::{evaluate, pullback, AlternatingForm, CoordinateEmbedding, MultiVector};
use calgeom::geometry::{build_link, LinkFamily, MinimalProductSpec, SampledLink};
use calgeom::obstruction::{
    complete_to_basis, contraction_form, convex_decomposition_check, decompose_at, dichotomy_sweep,
    obstruction_witness, product_calibration_check, FitOptions, ObstructionSetup, SweepOptions, Verdict,
    WitnessOptions,
};

fn sl3() -> AlternatingForm {
    AlternatingForm::from_terms(
        6,
        3,
        [(vec![1, 2, 3], 1.0), (vec![1, 5, 6], -1.0), (vec![2, 4, 6], 1.0), (vec![3, 4, 5], -1.0)],
    )
    .unwrap()
}

fn circle(res: usize) -> SampledLink {
    build_link(&LinkFamily::Circle, res).unwrap()
}

fn setup(factors: Vec<SampledLink>, opts: WitnessOptions) -> ObstructionSetup {
    ObstructionSetup::new(MinimalProductSpec::new(factors).unwrap(), opts).unwrap()
}

/// For every x of the varying factor, the dual of the cone plane at
/// (x, base) calibrates that plane, and its Ψ̲ takes the value ±λ there.
fn pointwise_identity(s: &ObstructionSetup) {
    let varying = &s.spec.factors[s.varying];
    let emb = s.layout.embedding(s.varying).unwrap();
    let offsets = s.spec.offsets();
    let n = s.ambient_dim();
    let lambda = s.psi_expected();
    for sample in varying.samples() {
        // the cone plane p ∧ ξ_varying ∧ ξ_fixed… in product coordinates
        let mut p = vec![0.0; n];
        for (i, x) in sample.point.iter().enumerate() {
            p[offsets[s.varying] + i] = s.spec.lambdas[s.varying] * x;
        }
        let mut vectors = vec![];
        let lift = |block: usize, v: &[f64]| {
            let mut w = vec![0.0; n];
            w[offsets[block]..offsets[block] + v.len()].copy_from_slice(v);
            w
        };
        for f in &s.fixed {
            if let Some(pt) = &f.point {
                for (i, x) in pt.iter().enumerate() {
                    p[offsets[f.block] + i] = s.spec.lambdas[f.block] * x;
                }
            }
        }
        vectors.push(p);
        vectors.extend(sample.frame.iter().map(|v| lift(s.varying, v)));
        for f in &s.fixed {
            vectors.extend(f.tangent.frame().iter().map(|v| lift(f.block, v)));
        }
        let plane = MultiVector::wedge_vectors(n, &vectors).unwrap();
        assert!((plane.norm() - 1.0).abs() < 1e-10);
        let phi = plane.dual();
        let psi_bar = pullback(&contraction_form(&phi, &s.fixed, &s.layout).unwrap(), &emb).unwrap();
        let xi = MultiVector::wedge_vectors(varying.ambient_dim(), &sample.frame).unwrap();
        let v = evaluate(&psi_bar, &xi).unwrap();
        assert!((v.abs() - lambda).abs() < 1e-12, "{v} vs ±{lambda}");
    }
}

#[test]
fn single_plane_calibrations_give_lambda_pointwise() {
    pointwise_identity(&setup(vec![circle(32), circle(32)], WitnessOptions::default()));
    let sl = build_link(&LinkFamily::SlSpheres, 6).unwrap();
    pointwise_identity(&setup(vec![sl.clone(), circle(8)], WitnessOptions::default()));
    pointwise_identity(&setup(vec![sl, circle(8)], WitnessOptions { varying_factor: 1, ..Default::default() }));
}

#[test]
fn predicted_magnitudes() {
    let c = setup(vec![circle(64), circle(64)], WitnessOptions::default());
    assert!((c.predicted_magnitude - 0.5f64.sqrt() * 2.0 * PI).abs() < 1e-9);
    let c2 = setup(vec![circle(64), circle(64)], WitnessOptions { varying_factor: 1, ..Default::default() });
    assert!((c2.predicted_magnitude - c.predicted_magnitude).abs() < 1e-12);

    let sl = build_link(&LinkFamily::SlSpheres, 16).unwrap();
    let s = setup(vec![sl, circle(16)], WitnessOptions::default());
    assert!((s.predicted_magnitude - (1.0f64 / 3.0).sqrt() * 12.0 * PI).abs() < 1e-9);
}

#[test]
fn base_points_near_other_strata_are_rejected() {
    let sl = build_link(&LinkFamily::SlSpheres, 8).unwrap();
    let (st, idx) = (0..sl.strata()[0].samples.len())
        .map(|i| (0, i))
        .find(|&(st, i)| !sl.is_interior(st, i, 2.0))
        .expect("the spheres meet");
    let opts = WitnessOptions { varying_factor: 1, base_choices: Some(vec![(st, idx), (0, 0)]), ..Default::default() };
    let r = ObstructionSetup::new(MinimalProductSpec::new(vec![sl, circle(8)]).unwrap(), opts);
    assert!(matches!(r, Err(Error::Precondition(_))));
}

#[test]
fn one_factor_is_not_applicable() {
    let r = ObstructionSetup::new(MinimalProductSpec::new(vec![circle(8)]).unwrap(), WitnessOptions::default());
    assert!(matches!(r, Err(Error::NotApplicable(_))));
}

#[test]
fn calibrated_single_plane_form_is_rejected_as_a_calibration_of_the_cone() {
    let s = setup(vec![circle(32), circle(32)], WitnessOptions::default());
    let phi = AlternatingForm::from_dense(&s.basis, &s.planes[0]);
    let r = obstruction_witness(&s, &phi).unwrap();
    assert!((r.comass - 1.0).abs() < 1e-9);
    assert!(r.calibration_residual > 0.5);
    assert_eq!(r.verdict, Verdict::CandidateNotACalibration);
    assert!(r.pullback_integral.abs() < 1e-12);
    assert_eq!(r.stokes_value, 0.0);
}

#[test]
fn sweeps_are_deterministic_and_never_violate_the_dichotomy() {
    let s = setup(vec![circle(32), circle(32)], WitnessOptions::default());
    let opts = SweepOptions {
        n_random: 8,
        n_fitted: 4,
        seed: 5,
        fit: FitOptions { iterations: 12, ..Default::default() },
        ..Default::default()
    };
    let a = dichotomy_sweep(&s, opts).unwrap();
    let b = dichotomy_sweep(&s, opts).unwrap();
    assert_eq!(a.violations, 0);
    let va: Vec<f64> = a.outcomes.iter().map(|o| o.report.calibration_residual).collect();
    let vb: Vec<f64> = b.outcomes.iter().map(|o| o.report.calibration_residual).collect();
    assert_eq!(va, vb);
    // Ψ̲ constancy is only claimed for near-calibrations
    for o in &a.outcomes {
        if o.report.calibration_residual <= 1e-3 {
            assert!(o.report.psi_constancy <= 10.0 * 1e-3);
        }
    }
}

#[test]
fn convex_decomposition_on_sl_atoms() {
    // τ = ½ e1∧e2∧e3 + ½ (−f1∧f2∧e3)
    let tau = MultiVector::from_terms(6, 3, [(vec![1, 2, 3], 0.5), (vec![3, 4, 5], -0.5)]).unwrap();
    let lambda = 0.5f64.sqrt();
    let uniform = AlternatingForm::from_terms(6, 3, [(vec![1, 2, 3], lambda), (vec![3, 4, 5], -lambda)]).unwrap();
    let r = convex_decomposition_check(&tau, &sl3(), &uniform, 32, 1e-9).unwrap();
    assert!(r.certified && r.uniform);
    assert!((r.aggregate - lambda).abs() < 1e-8);
    assert!((r.direct - lambda).abs() < 1e-12);

    let mixed = AlternatingForm::from_terms(6, 3, [(vec![1, 2, 3], 1.0), (vec![3, 4, 5], 1.0)]).unwrap();
    let r = convex_decomposition_check(&tau, &sl3(), &mixed, 32, 1e-9).unwrap();
    assert!(r.certified && !r.uniform);
    assert!(r.spread > 1.9);

    let simple = MultiVector::basis(6, &[1, 2, 3]).unwrap();
    let r = convex_decomposition_check(&simple, &sl3(), &uniform, 32, 1e-9).unwrap();
    assert_eq!(r.atom_values.len(), 1);
}

#[test]
fn decomposition_at_solver_maximizers() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
    for _ in 0..8 {
        let terms: Vec<(Vec<usize>, f64)> = calgeom::exterior::MultiIndex::combinations(5, 3)
            .into_iter()
            .map(|k| (k.indices().to_vec(), rng.random_range(-1.0..1.0)))
            .collect();
        let raw = AlternatingForm::from_terms(5, 3, terms).unwrap();
        let c = comass(&raw, 24, 0).unwrap().value;
        let phi = raw.scaled(1.0 / c);
        let top = &maximizer_set(&phi, 1e-9, 24).unwrap()[0];
        let r = decompose_at(&phi, &complete_to_basis(top)).unwrap();
        assert!((r.leading_coefficient - 1.0).abs() < 1e-9);
        assert!(r.forbidden_max <= 1e-6, "{}", r.forbidden_max);
        assert!(r.reconstruct().unwrap().sub(&phi).unwrap().norm() < 1e-10);
    }
}

#[test]
fn product_of_simple_forms() {
    let s = 0.5f64.sqrt();
    let a = AlternatingForm::from_terms(3, 2, [(vec![1, 2], s), (vec![2, 3], s)]).unwrap();
    let b = AlternatingForm::covector(&[0.0, 1.0]);
    let factors = vec![
        (a.clone(), CoordinateEmbedding::block(3, 5, 0).unwrap()),
        (b, CoordinateEmbedding::block(2, 5, 3).unwrap()),
    ];
    let cert = product_calibration_check(&factors, ComassOptions::default(), 8).unwrap();
    assert!((cert.value - 1.0).abs() < 1e-6);
    assert!(cert.value <= 1.0 + 1e-6);

    let kahler = AlternatingForm::from_terms(4, 2, [(vec![1, 2], s), (vec![3, 4], s)]).unwrap();
    let bad = vec![(kahler, CoordinateEmbedding::block(4, 5, 0).unwrap())];
    assert!(matches!(product_calibration_check(&bad, ComassOptions::default(), 8), Err(Error::NonSimple(_))));

    let overlap = vec![
        (a.clone(), CoordinateEmbedding::block(3, 5, 0).unwrap()),
        (AlternatingForm::covector(&[1.0, 0.0]), CoordinateEmbedding::block(2, 5, 2).unwrap()),
    ];
    assert!(matches!(
        product_calibration_check(&overlap, ComassOptions::default(), 8),
        Err(Error::OverlappingBlocks(_))
    ));
}

//! Algebraic laws of the exterior algebra, checked against brute-force
//! evaluation by permutation sums.

use calgeom::exterior::text::{format_form, parse_form};
use calgeom::exterior::{
    contract, evaluate, is_simple, pullback, push_forward, AlternatingForm, Basis, CoordinateEmbedding, MultiIndex,
    MultiVector, DEFAULT_SIMPLE_TOL,
};
use proptest::prelude::*;

fn permutations(n: usize) -> Vec<(Vec<usize>, f64)> {
    if n == 0 {
        return vec![(Vec::new(), 1.0)];
    }
    let mut out = Vec::new();
    for (p, s) in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            // inserting the largest element passes over len − pos entries
            let sign = if (p.len() - pos) % 2 == 0 { s } else { -s };
            out.push((q, sign));
        }
    }
    out
}

/// Leibniz determinant.
fn leibniz(m: &[Vec<f64>]) -> f64 {
    permutations(m.len()).iter().map(|(p, s)| s * p.iter().enumerate().map(|(i, &j)| m[i][j]).product::<f64>()).sum()
}

/// `φ(v₁,…,v_m) = Σ_I φ_I det[(v_a)_{i_b}]`.
fn brute_eval(phi: &AlternatingForm, vs: &[Vec<f64>]) -> f64 {
    phi.terms()
        .map(|(k, c)| {
            let minor: Vec<Vec<f64>> = vs.iter().map(|v| k.indices().iter().map(|&i| v[i - 1]).collect()).collect();
            c * leibniz(&minor)
        })
        .sum()
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// `(α∧β)(v) = 1/(p! q!) Σ_σ sgn σ α(v_σ(1..p)) β(v_σ(p+1..))`.
fn brute_wedge_eval(a: &AlternatingForm, b: &AlternatingForm, vs: &[Vec<f64>]) -> f64 {
    let (p, q) = (a.degree(), b.degree());
    let total: f64 = permutations(p + q)
        .iter()
        .map(|(perm, s)| {
            let w: Vec<Vec<f64>> = perm.iter().map(|&i| vs[i].clone()).collect();
            s * brute_eval(a, &w[..p]) * brute_eval(b, &w[p..])
        })
        .sum();
    total / (factorial(p) * factorial(q))
}

fn form(n: usize, m: usize) -> impl Strategy<Value = AlternatingForm> {
    let len = Basis::new(n, m).unwrap().len();
    prop::collection::vec(-2.0f64..2.0, len)
        .prop_map(move |v| AlternatingForm::from_dense(&Basis::new(n, m).unwrap(), &v))
}

fn vectors(n: usize, k: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-1.0f64..1.0, n), k)
}

fn shape() -> impl Strategy<Value = (usize, usize, usize)> {
    (2usize..=6).prop_flat_map(|n| (Just(n), 0..=n)).prop_flat_map(|(n, p)| (Just(n), Just(p), 0..=(n - p)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn evaluation_matches_leibniz((n, m, phi, vs) in (2usize..=6)
        .prop_flat_map(|n| (Just(n), 1..=n))
        .prop_flat_map(|(n, m)| (Just(n), Just(m), form(n, m), vectors(n, m))))
    {
        let xi = MultiVector::wedge_vectors(n, &vs).unwrap();
        prop_assert_eq!(xi.degree(), m);
        let fast = evaluate(&phi, &xi).unwrap();
        prop_assert!((fast - brute_eval(&phi, &vs)).abs() < 1e-10);
    }

    #[test]
    fn wedge_matches_permutation_sum(((n, p, q), seed) in (shape(), any::<u64>())) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut draw = |m: usize| {
            let b = Basis::new(n, m).unwrap();
            let v: Vec<f64> = (0..b.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
            AlternatingForm::from_dense(&b, &v)
        };
        let a = draw(p);
        let b = draw(q);
        let vs: Vec<Vec<f64>> = (0..p + q).map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let w = a.wedge(&b).unwrap();
        prop_assert!((brute_eval(&w, &vs) - brute_wedge_eval(&a, &b, &vs)).abs() < 1e-9);
    }

    #[test]
    fn graded_commutativity_and_associativity((a, b, c) in (form(5, 1), form(5, 2), form(5, 2))) {
        let ab = a.wedge(&b).unwrap();
        let ba = b.wedge(&a).unwrap();
        prop_assert!(ab.sub(&ba).unwrap().norm() < 1e-12);
        let aa = a.wedge(&a).unwrap();
        prop_assert!(aa.norm() < 1e-12);
        let left = ab.wedge(&c).unwrap();
        let right = a.wedge(&b.wedge(&c).unwrap()).unwrap();
        prop_assert!(left.sub(&right).unwrap().norm() < 1e-10);
        let bc = b.wedge(&c).unwrap();
        let cb = c.wedge(&b).unwrap();
        prop_assert!(bc.sub(&cb).unwrap().norm() < 1e-12);
    }

    #[test]
    fn hodge_star_twice((n, m, phi) in (2usize..=6).prop_flat_map(|n| (Just(n), 0..=n)).prop_flat_map(|(n, m)| (Just(n), Just(m), form(n, m)))) {
        let sign = if (m * (n - m)) % 2 == 0 { 1.0 } else { -1.0 };
        let back = phi.hodge_star().hodge_star();
        prop_assert!(back.sub(&phi.scaled(sign)).unwrap().norm() < 1e-12);
        // ⟨φ, φ⟩ vol = φ ∧ ⋆φ
        let top = phi.wedge(&phi.hodge_star()).unwrap();
        let all: Vec<usize> = (1..=n).collect();
        prop_assert!((top.get(&all) - phi.norm().powi(2)).abs() < 1e-10);
    }

    #[test]
    fn contraction_identity((phi, xi_vs, eta_vs) in (form(6, 3), vectors(6, 1), vectors(6, 2))) {
        let xi = MultiVector::wedge_vectors(6, &xi_vs).unwrap();
        let eta = MultiVector::wedge_vectors(6, &eta_vs).unwrap();
        let lhs = evaluate(&contract(&xi, &phi).unwrap(), &eta).unwrap();
        let rhs = evaluate(&phi, &eta.wedge(&xi).unwrap()).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-10);
    }

    #[test]
    fn pullback_is_adjoint_to_push_forward((phi, vs, perm) in (form(6, 2), vectors(3, 2), Just(vec![5usize, 2, 4]))) {
        let emb = CoordinateEmbedding::new(perm, 6).unwrap();
        let xi = MultiVector::wedge_vectors(3, &vs).unwrap();
        let lhs = evaluate(&pullback(&phi, &emb).unwrap(), &xi).unwrap();
        let rhs = evaluate(&phi, &push_forward(&xi, &emb).unwrap()).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-10);
    }

    #[test]
    fn wedges_of_vectors_are_simple((n, k, vs) in (3usize..=6).prop_flat_map(|n| (Just(n), 1..=n)).prop_flat_map(|(n, k)| (Just(n), Just(k), vectors(n, k)))) {
        let xi = MultiVector::wedge_vectors(n, &vs).unwrap();
        prop_assume!(xi.norm() > 1e-3);
        let unit = xi.scaled(1.0 / xi.norm());
        let s = is_simple(&unit, DEFAULT_SIMPLE_TOL).unwrap().expect("wedge of vectors is simple");
        prop_assert!(s.expand().sub(&unit).unwrap().norm() < 1e-8);
        prop_assert!((s.expand().norm() - 1.0).abs() < 1e-10);
        prop_assert_eq!(s.degree(), k);
    }

    #[test]
    fn text_round_trip(phi in form(5, 3)) {
        let text = format_form(&phi);
        let back = parse_form(&text, Some(5)).unwrap();
        prop_assert_eq!(back, phi);
    }

    #[test]
    fn evaluation_is_bilinear((a, b, t, vs) in (form(4, 2), form(4, 2), -3.0f64..3.0, vectors(4, 2))) {
        let xi = MultiVector::wedge_vectors(4, &vs).unwrap();
        let lhs = evaluate(&a.axpy(t, &b).unwrap(), &xi).unwrap();
        let rhs = evaluate(&a, &xi).unwrap() + t * evaluate(&b, &xi).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-10);
    }
}

#[test]
fn sum_of_two_planes_is_not_simple() {
    let k = MultiVector::from_terms(4, 2, [(vec![1, 2], 0.5f64.sqrt()), (vec![3, 4], 0.5f64.sqrt())]).unwrap();
    assert!(is_simple(&k, DEFAULT_SIMPLE_TOL).unwrap().is_none());
}

#[test]
fn sort_signs_in_text() {
    let f = parse_form("2,1 : 1.0\n1,2 : 0.25", None).unwrap();
    assert_eq!(f.get(&[1, 2]), -0.75);
    assert!(parse_form("1,1 : 1.0", None).is_err());
    assert!(MultiIndex::new(vec![2, 1], 3).is_err());
}

#[test]
fn leibniz_sanity() {
    assert_eq!(permutations(4).len(), 24);
    let m = vec![vec![2.0, 1.0, 0.0], vec![1.0, 3.0, 1.0], vec![0.0, 1.0, 4.0]];
    assert!((leibniz(&m) - 18.0).abs() < 1e-12);
}

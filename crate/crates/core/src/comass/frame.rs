//! The frame objective `V ↦ φ(v₁∧…∧v_m)` and block-coordinate ascent on it.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::exterior::{gram_schmidt, AlternatingForm};

/// Dense view of a form: 0-based index lists with coefficients.
#[derive(Clone, Debug)]
pub(crate) struct DenseForm {
    pub dim: usize,
    pub degree: usize,
    pub terms: Vec<(Vec<usize>, f64)>,
}

impl DenseForm {
    pub fn new(phi: &AlternatingForm) -> Self {
        let terms = phi.terms().map(|(k, c)| (k.indices().iter().map(|i| i - 1).collect(), c)).collect();
        Self { dim: phi.dim(), degree: phi.degree(), terms }
    }

    /// `φ(v₁∧…∧v_m) = Σ_I φ_I det(V_I)`.
    pub fn value(&self, frame: &[Vec<f64>]) -> f64 {
        let m = self.degree;
        let mut buf = vec![0.0; m * m];
        self.terms
            .iter()
            .map(|(rows, c)| {
                for (p, &r) in rows.iter().enumerate() {
                    for q in 0..m {
                        buf[p * m + q] = frame[q][r];
                    }
                }
                c * det(&mut buf, m)
            })
            .sum()
    }

    /// Gradient of the objective in column `j`: the vector `g` with
    /// `φ(…∧w∧…) = ⟨g, w⟩` for `w` in slot `j`.
    pub fn riesz(&self, frame: &[Vec<f64>], j: usize) -> Vec<f64> {
        let m = self.degree;
        let mut g = vec![0.0; self.dim];
        if m == 1 {
            for (rows, c) in &self.terms {
                g[rows[0]] += c;
            }
            return g;
        }
        let k = m - 1;
        let mut minor = vec![0.0; k * k];
        for (rows, c) in &self.terms {
            for p in 0..m {
                let mut rr = 0;
                for (pp, &r) in rows.iter().enumerate() {
                    if pp == p {
                        continue;
                    }
                    let mut cc = 0;
                    for (q, col) in frame.iter().enumerate() {
                        if q == j {
                            continue;
                        }
                        minor[rr * k + cc] = col[r];
                        cc += 1;
                    }
                    rr += 1;
                }
                let sign = if (p + j).is_multiple_of(2) { 1.0 } else { -1.0 };
                g[rows[p]] += sign * c * det(&mut minor, k);
            }
        }
        g
    }
}

/// Determinant by partial-pivot elimination (destroys `a`).
pub(crate) fn det(a: &mut [f64], n: usize) -> f64 {
    match n {
        0 => return 1.0,
        1 => return a[0],
        2 => return a[0] * a[3] - a[1] * a[2],
        _ => {}
    }
    let mut d = 1.0;
    for col in 0..n {
        let piv = (col..n).max_by(|&x, &y| a[x * n + col].abs().total_cmp(&a[y * n + col].abs())).unwrap();
        if a[piv * n + col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            for q in 0..n {
                a.swap(piv * n + q, col * n + q);
            }
            d = -d;
        }
        let p = a[col * n + col];
        d *= p;
        for r in col + 1..n {
            let f = a[r * n + col] / p;
            if f != 0.0 {
                for q in col + 1..n {
                    a[r * n + q] -= f * a[col * n + q];
                }
            }
        }
    }
    d
}

#[derive(Clone, Debug)]
pub(crate) struct Ascent {
    pub frame: Vec<Vec<f64>>,
    pub value: f64,
    pub converged: bool,
}

const IMPROVEMENT_TOL: f64 = 1e-12;
const GRADIENT_TOL: f64 = 1e-9;

/// Maximizes `φ` over orthonormal frames starting from `frame`. Each sweep
/// replaces every `v_j` by its normalized Riesz vector, which is the exact
/// maximizer with the other columns held fixed, so the objective never
/// decreases within a sweep.
pub(crate) fn ascend(form: &DenseForm, mut frame: Vec<Vec<f64>>, max_sweeps: usize) -> Ascent {
    let m = form.degree;
    let mut value = form.value(&frame);
    for _ in 0..max_sweeps {
        let prev = value;
        let mut tangential: f64 = 0.0;
        for j in 0..m {
            let mut g = form.riesz(&frame, j);
            for (k, v) in frame.iter().enumerate() {
                if k != j {
                    let d = dot(&g, v);
                    g.iter_mut().zip(v).for_each(|(x, y)| *x -= d * y);
                }
            }
            let along = dot(&g, &frame[j]);
            let t2 = (dot(&g, &g) - along * along).max(0.0);
            tangential = tangential.max(t2.sqrt());
            let norm = dot(&g, &g).sqrt();
            if norm > 1e-300 {
                frame[j] = g.into_iter().map(|x| x / norm).collect();
            }
        }
        if let Some(f) = gram_schmidt(&frame) {
            frame = f;
        }
        value = form.value(&frame);
        if value - prev < IMPROVEMENT_TOL && tangential < GRADIENT_TOL {
            return Ascent { frame, value, converged: true };
        }
    }
    Ascent { frame, value, converged: false }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn random_frame<R: Rng>(rng: &mut R, dim: usize, degree: usize) -> Vec<Vec<f64>> {
    loop {
        let vs: Vec<Vec<f64>> = (0..degree).map(|_| (0..dim).map(|_| rng.sample(StandardNormal)).collect()).collect();
        if let Some(f) = gram_schmidt(&vs) {
            return f;
        }
    }
}

/// The basis frame `e_{i₁},…,e_{i_m}` (0-based rows), with the first vector
/// negated when `negate` is set.
pub(crate) fn basis_frame(dim: usize, rows: &[usize], negate: bool) -> Vec<Vec<f64>> {
    rows.iter()
        .enumerate()
        .map(|(p, &r)| {
            let mut v = vec![0.0; dim];
            v[r] = if p == 0 && negate { -1.0 } else { 1.0 };
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::{evaluate, MultiVector};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn determinant_small_cases() {
        assert_eq!(det(&mut [2.0, 0.0, 0.0, 0.0, 3.0, 0.0, 0.0, 0.0, 4.0], 3), 24.0);
        assert_eq!(det(&mut [0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0], 3), -1.0);
    }

    #[test]
    fn value_and_riesz_agree_with_sparse_evaluation() {
        let phi = AlternatingForm::from_terms(
            5,
            3,
            [(vec![1, 2, 3], 1.0), (vec![1, 4, 5], -0.5), (vec![2, 3, 5], 2.0), (vec![3, 4, 5], 0.25)],
        )
        .unwrap();
        let form = DenseForm::new(&phi);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let f = random_frame(&mut rng, 5, 3);
            let xi = MultiVector::wedge_vectors(5, &f).unwrap();
            let exact = evaluate(&phi, &xi).unwrap();
            assert!((form.value(&f) - exact).abs() < 1e-12);
            for j in 0..3 {
                let g = form.riesz(&f, j);
                assert!((dot(&g, &f[j]) - exact).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn ascent_is_monotone_and_reaches_simple_maximum() {
        // e1*∧(e2*+e3*) has comass √2
        let phi = AlternatingForm::from_terms(4, 2, [(vec![1, 2], 1.0), (vec![1, 3], 1.0)]).unwrap();
        let form = DenseForm::new(&phi);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let start = random_frame(&mut rng, 4, 2);
        let v0 = form.value(&start);
        let out = ascend(&form, start, 500);
        assert!(out.value >= v0);
        assert!(out.converged);
        assert!((out.value - 2f64.sqrt()).abs() < 1e-10);
    }
}

//! Gradient-free comass oracle used to cross-check the ascent.
//!
//! Each stage draws a batch of random orthonormal frames and runs a few
//! (1+1)-evolution-strategy chains from the best frames seen so far. The
//! reported value is a running maximum over a fixed sequence of stages, so a
//! higher resolution can only raise it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::frame::random_frame;
use crate::error::{Error, Result};
use crate::exterior::{evaluate, gram_schmidt, AlternatingForm, MultiVector, SimpleVector};

pub const ORACLE_MAX_DIM: usize = 8;
pub const ORACLE_MAX_DEGREE: usize = 4;
pub const DEFAULT_ORACLE_RESOLUTION: usize = 8;

const ORACLE_SEED: u64 = 0x0c0a_55e5;
const BATCH: usize = 64;
const CHAINS: usize = 4;
const CHAIN_STEPS: usize = 160;

pub fn in_oracle_domain(phi: &AlternatingForm) -> bool {
    phi.dim() <= ORACLE_MAX_DIM && phi.degree() <= ORACLE_MAX_DEGREE
}

/// Maximum of `φ` over sampled unit simple m-vectors.
pub fn comass_oracle(phi: &AlternatingForm, resolution: usize) -> Result<f64> {
    Ok(oracle_search(phi, resolution)?.0)
}

/// Like [`comass_oracle`], also returning the frame that attains the value.
pub fn oracle_search(phi: &AlternatingForm, resolution: usize) -> Result<(f64, SimpleVector)> {
    if !in_oracle_domain(phi) {
        return Err(Error::GuardViolation { dim: phi.dim(), degree: phi.degree() });
    }
    if resolution == 0 {
        return Err(Error::Precondition("oracle resolution must be at least 1".into()));
    }
    let (n, m) = (phi.dim(), phi.degree());
    let f = |frame: &[Vec<f64>]| -> f64 {
        let xi = MultiVector::wedge_vectors(n, frame).expect("frame has the ambient dimension");
        evaluate(phi, &xi).expect("matching degree")
    };

    let mut best_frame = random_frame(&mut ChaCha8Rng::seed_from_u64(ORACLE_SEED), n, m);
    let mut best = f(&best_frame);
    for stage in 0..resolution {
        let mut rng = ChaCha8Rng::seed_from_u64(ORACLE_SEED);
        rng.set_stream(stage as u64 + 1);
        let mut batch: Vec<(f64, Vec<Vec<f64>>)> = (0..BATCH)
            .map(|_| {
                let fr = random_frame(&mut rng, n, m);
                (f(&fr), fr)
            })
            .collect();
        batch.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut starts = vec![(best, best_frame.clone())];
        starts.extend(batch.into_iter().take(CHAINS - 1));
        for (value, frame) in starts {
            let (v, fr) = evolve(&f, &mut rng, value, frame);
            if v > best {
                best = v;
                best_frame = fr;
            }
        }
    }
    Ok((best, SimpleVector::from_frame(n, best_frame)?))
}

/// (1+1)-ES with the one-fifth success rule.
fn evolve<F, R>(f: &F, rng: &mut R, mut value: f64, mut frame: Vec<Vec<f64>>) -> (f64, Vec<Vec<f64>>)
where
    F: Fn(&[Vec<f64>]) -> f64,
    R: Rng,
{
    let mut sigma: f64 = 0.3;
    for _ in 0..CHAIN_STEPS {
        let trial: Vec<Vec<f64>> = frame
            .iter()
            .map(|v| v.iter().map(|x| x + sigma * rng.sample::<f64, _>(StandardNormal)).collect())
            .collect();
        let Some(trial) = gram_schmidt(&trial) else { continue };
        let tv = f(&trial);
        if tv > value {
            value = tv;
            frame = trial;
            sigma *= 1.5;
        } else {
            sigma *= 0.904;
        }
        if sigma < 1e-9 {
            break;
        }
    }
    (value, frame)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn covector_and_homogeneity() {
        let e1 = AlternatingForm::basis(3, &[1]).unwrap();
        assert!((comass_oracle(&e1, 4).unwrap() - 1.0).abs() < 1e-6);
        let two = AlternatingForm::basis(4, &[1, 2]).unwrap().scaled(2.0);
        assert!((comass_oracle(&two, 4).unwrap() - 2.0).abs() < 1e-6);
    }

    #[test]
    fn guard_is_enforced() {
        let phi = AlternatingForm::basis(9, &[1, 2]).unwrap();
        assert!(matches!(comass_oracle(&phi, 4), Err(Error::GuardViolation { .. })));
        let phi = AlternatingForm::basis(8, &[1, 2, 3, 4, 5]).unwrap();
        assert!(matches!(comass_oracle(&phi, 4), Err(Error::GuardViolation { .. })));
    }

    #[test]
    fn monotone_in_resolution() {
        let phi =
            AlternatingForm::from_terms(5, 2, [(vec![1, 2], 0.3), (vec![2, 4], -1.1), (vec![3, 5], 0.7)]).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for r in 1..6 {
            let v = comass_oracle(&phi, r).unwrap();
            assert!(v >= prev);
            prev = v;
        }
    }
}

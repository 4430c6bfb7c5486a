//! Comass of constant-coefficient forms.
//!
//! The comass `‖φ‖* = max φ(ξ)` over unit simple m-vectors ξ is found by
//! block-coordinate ascent over orthonormal frames from many starts. Every
//! value reported is attained by an explicit frame, so it is a certified lower
//! bound; global optimality is only backed by agreement with the oracle.

mod facet;
pub(crate) mod frame;
mod oracle;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exterior::{AlternatingForm, SimpleVector};
use frame::{ascend, basis_frame, random_frame, Ascent, DenseForm};

pub use facet::{facet_membership, mass_bounds, FacetMembership, MassBounds};
pub use oracle::{
    comass_oracle, in_oracle_domain, oracle_search, DEFAULT_ORACLE_RESOLUTION, ORACLE_MAX_DEGREE, ORACLE_MAX_DIM,
};

pub const DEFAULT_RESTARTS: usize = 24;
pub const DEFAULT_MAX_SWEEPS: usize = 500;
/// Maximizers whose Plücker embeddings are closer than this are one cluster.
pub const CLUSTER_DISTANCE: f64 = 1e-3;
const MAXIMIZER_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Ascent,
    Oracle,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Ascent => "ascent",
            Method::Oracle => "oracle",
        }
    }
}

#[derive(Clone, Debug)]
pub struct ComassCertificate {
    pub value: f64,
    pub maximizers: Vec<SimpleVector>,
    pub method: Method,
    /// `oracle − ascent` when the oracle was run.
    pub oracle_gap: Option<f64>,
    pub restarts_used: usize,
    /// False if any restart that reached the best value hit the sweep cap.
    pub converged: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct ComassOptions {
    pub restarts: usize,
    pub seed: u64,
    pub max_sweeps: usize,
}

impl Default for ComassOptions {
    fn default() -> Self {
        Self { restarts: DEFAULT_RESTARTS, seed: 0, max_sweeps: DEFAULT_MAX_SWEEPS }
    }
}

/// Comass by multi-start block-coordinate ascent.
pub fn comass(phi: &AlternatingForm, restarts: usize, seed: u64) -> Result<ComassCertificate> {
    comass_with(phi, ComassOptions { restarts, seed, ..Default::default() })
}

pub fn comass_with(phi: &AlternatingForm, opts: ComassOptions) -> Result<ComassCertificate> {
    let runs = run_restarts(phi, opts)?;
    let best = runs.iter().map(|r| r.value).fold(f64::NEG_INFINITY, f64::max);
    let top: Vec<&Ascent> = runs.iter().filter(|r| r.value >= best - MAXIMIZER_TOL).collect();
    let converged = top.iter().all(|r| r.converged);
    let maximizers = cluster(phi.dim(), top.iter().map(|r| r.frame.clone()))?;
    Ok(ComassCertificate {
        value: best,
        maximizers,
        method: Method::Ascent,
        oracle_gap: None,
        restarts_used: runs.len(),
        converged,
    })
}

/// Ascent cross-checked by the oracle when the form is inside the oracle's
/// guard domain. The larger of the two values is reported.
pub fn certify(phi: &AlternatingForm, opts: ComassOptions, resolution: usize) -> Result<ComassCertificate> {
    let mut cert = comass_with(phi, opts)?;
    if in_oracle_domain(phi) {
        let (value, frame) = oracle_search(phi, resolution)?;
        cert.oracle_gap = Some(value - cert.value);
        if value > cert.value + MAXIMIZER_TOL {
            cert.value = value;
            cert.maximizers = vec![frame];
            cert.method = Method::Oracle;
        }
    }
    Ok(cert)
}

/// Distinct maximizers of `φ` within `tol` of its comass.
pub fn maximizer_set(phi: &AlternatingForm, tol: f64, restarts: usize) -> Result<Vec<SimpleVector>> {
    let runs = run_restarts(phi, ComassOptions { restarts, ..Default::default() })?;
    let best = runs.iter().map(|r| r.value).fold(f64::NEG_INFINITY, f64::max);
    cluster(phi.dim(), runs.into_iter().filter(|r| r.value >= best - tol).map(|r| r.frame))
}

/// Improves a single frame by ascent; used to polish candidates found elsewhere.
pub fn polish(phi: &AlternatingForm, start: &SimpleVector) -> Result<(f64, SimpleVector)> {
    let form = DenseForm::new(phi);
    let out = ascend(&form, start.normalized_orientation().frame().to_vec(), DEFAULT_MAX_SWEEPS);
    Ok((out.value, SimpleVector::from_frame(phi.dim(), out.frame)?))
}

fn run_restarts(phi: &AlternatingForm, opts: ComassOptions) -> Result<Vec<Ascent>> {
    if phi.is_zero() {
        return Err(Error::ZeroInput("comass of the zero form"));
    }
    if opts.restarts == 0 {
        return Err(Error::Precondition("restarts must be at least 1".into()));
    }
    let form = DenseForm::new(phi);
    let (n, m) = (form.dim, form.degree);
    if m == 0 {
        let v = phi.get(&[]).abs();
        return Ok(vec![Ascent { frame: Vec::new(), value: v, converged: true }]);
    }

    // Basis seeds for the largest coefficients, negated where the coefficient is.
    let mut ranked: Vec<&(Vec<usize>, f64)> = form.terms.iter().collect();
    ranked.sort_by(|a, b| b.1.abs().total_cmp(&a.1.abs()).then_with(|| a.0.cmp(&b.0)));
    let n_basis = ranked.len().min(opts.restarts.div_ceil(2));
    let seeds: Vec<Option<Vec<Vec<f64>>>> = (0..opts.restarts)
        .map(|i| ranked.get(i).filter(|_| i < n_basis).map(|(rows, c)| basis_frame(n, rows, *c < 0.0)))
        .collect();

    let runs = seeds
        .into_par_iter()
        .enumerate()
        .map(|(i, seed_frame)| {
            let start = seed_frame.unwrap_or_else(|| {
                let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
                rng.set_stream(i as u64);
                random_frame(&mut rng, n, m)
            });
            ascend(&form, start, opts.max_sweeps)
        })
        .collect();
    Ok(runs)
}

fn cluster<I>(dim: usize, frames: I) -> Result<Vec<SimpleVector>>
where
    I: IntoIterator<Item = Vec<Vec<f64>>>,
{
    let mut reps: Vec<(SimpleVector, crate::exterior::MultiVector)> = Vec::new();
    for f in frames {
        let s = SimpleVector::from_frame(dim, f)?;
        let e = s.expand();
        let known = reps.iter().any(|(_, r)| r.sub(&e).map(|d| d.norm() < CLUSTER_DISTANCE).unwrap_or(false));
        if !known {
            reps.push((s, e));
        }
    }
    Ok(reps.into_iter().map(|(s, _)| s).collect())
}

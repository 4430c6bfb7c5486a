//! Decomposition of calibrations at calibrated planes, contraction forms and
//! the cone obstruction for minimal products.

mod witness;

use crate::comass::frame::DenseForm;
use crate::comass::{certify, facet_membership, ComassCertificate, ComassOptions, FacetMembership};
use crate::error::{Error, Result};
use crate::exterior::{
    contract, evaluate, extend_form, gram_deviation, gram_schmidt, is_simple, AlternatingForm, CoordinateEmbedding,
    MultiIndex, MultiVector, SimpleVector,
};

pub use witness::{
    candidate_family, dichotomy_sweep, fit_calibration, obstruction_witness, verdict, CandidateKind, CandidateOutcome,
    DichotomySummary, FitOptions, ObstructionReport, ObstructionSetup, SweepOptions, Verdict, WitnessOptions,
};

const FRAME_TOL: f64 = 1e-8;

/// `φ = Σ a_I v_I*` in the dual basis of an orthonormal frame `v₁,…,v_N`.
#[derive(Clone, Debug)]
pub struct DecompositionReport {
    /// `a_{1…m} = φ(v₁∧…∧v_m)`.
    pub leading_coefficient: f64,
    /// `max |a_I|` over `I ≠ {1,…,m}` with at most one index above m.
    pub forbidden_max: f64,
    /// Terms with at least two indices above m.
    pub allowed_terms: Vec<(MultiIndex, f64)>,
    /// Every nonzero `a_I`, for reconstruction.
    pub coefficients: Vec<(MultiIndex, f64)>,
    pub frame: Vec<Vec<f64>>,
}

impl DecompositionReport {
    /// `Σ a_I v_I*` in standard coordinates.
    pub fn reconstruct(&self) -> Result<AlternatingForm> {
        let n = self.frame.len();
        let degree = self.coefficients.first().map(|(k, _)| k.degree()).unwrap_or(0);
        let mut out = AlternatingForm::zero(n, degree)?;
        for (key, a) in &self.coefficients {
            let vecs: Vec<Vec<f64>> = key.indices().iter().map(|&i| self.frame[i - 1].clone()).collect();
            let dual = MultiVector::wedge_vectors(n, &vecs)?.dual();
            out = out.axpy(*a, &dual)?;
        }
        Ok(out)
    }
}

/// Expands φ in the dual basis of `frame` and measures the coefficients
/// that must vanish when `v₁∧…∧v_m` is calibrated by a comass-1 form.
pub fn decompose_at(phi: &AlternatingForm, frame: &[Vec<f64>]) -> Result<DecompositionReport> {
    let n = phi.dim();
    let m = phi.degree();
    if frame.len() != n || frame.iter().any(|v| v.len() != n) {
        return Err(Error::DimensionMismatch { left: n, right: frame.len() });
    }
    let dev = gram_deviation(frame);
    if dev > FRAME_TOL {
        return Err(Error::NonOrthonormal(dev));
    }
    let form = DenseForm::new(phi);
    let mut leading = 0.0;
    let mut forbidden_max: f64 = 0.0;
    let mut allowed = Vec::new();
    let mut coefficients = Vec::new();
    let mut sub: Vec<Vec<f64>> = Vec::with_capacity(m);
    for key in MultiIndex::combinations(n, m) {
        sub.clear();
        sub.extend(key.indices().iter().map(|&i| frame[i - 1].clone()));
        let a = if m == 0 { phi.get(&[]) } else { form.value(&sub) };
        let outside = key.indices().iter().filter(|&&i| i > m).count();
        match outside {
            0 => leading = a,
            1 => forbidden_max = forbidden_max.max(a.abs()),
            _ => {
                if a.abs() > 1e-14 {
                    allowed.push((key.clone(), a));
                }
            }
        }
        if a.abs() > 1e-14 {
            coefficients.push((key, a));
        }
    }
    Ok(DecompositionReport {
        leading_coefficient: leading,
        forbidden_max,
        allowed_terms: allowed,
        coefficients,
        frame: frame.to_vec(),
    })
}

/// Extends the frame of a simple m-vector to an orthonormal basis of ℝᴺ,
/// with the orientation sign folded into the first vector.
pub fn complete_to_basis(xi: &SimpleVector) -> Vec<Vec<f64>> {
    let n = xi.dim();
    let mut vectors = xi.normalized_orientation().frame().to_vec();
    for i in 0..n {
        if vectors.len() == n {
            break;
        }
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        let mut trial = vectors.clone();
        trial.push(e);
        if let Some(ortho) = gram_schmidt(&trial) {
            let last = ortho.last().expect("nonempty");
            // reject nearly dependent directions
            if (0..vectors.len()).all(|k| crate::comass::frame::dot(&ortho[k], last).abs() < 1e-12) {
                vectors = ortho;
            }
        }
    }
    vectors
}

/// Coordinate blocks `ℝ^{d₁} ⊕ ℝ^{d₂} ⊕ …`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockLayout {
    pub dims: Vec<usize>,
}

impl BlockLayout {
    pub fn new(dims: Vec<usize>) -> Self {
        Self { dims }
    }

    pub fn total(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn embedding(&self, block: usize) -> Result<CoordinateEmbedding> {
        let d = *self.dims.get(block).ok_or_else(|| Error::Precondition(format!("no block {block}")))?;
        let offset: usize = self.dims[..block].iter().sum();
        CoordinateEmbedding::block(d, self.total(), offset)
    }
}

/// A factor held fixed in a contraction: its tangent plane and, optionally,
/// its base point, both in the factor's own coordinates.
#[derive(Clone, Debug)]
pub struct FixedFactor {
    pub block: usize,
    pub point: Option<Vec<f64>>,
    pub tangent: SimpleVector,
}

/// `(x̃ ∧ ξ̃ ∧ …) ⌟ φₒ`: pushes every fixed point and tangent plane into
/// its block, wedges them in the given order (point before tangent) and
/// contracts.
pub fn contraction_form(
    phi_o: &AlternatingForm,
    fixed: &[FixedFactor],
    layout: &BlockLayout,
) -> Result<AlternatingForm> {
    let n = layout.total();
    if phi_o.dim() != n {
        return Err(Error::DimensionMismatch { left: phi_o.dim(), right: n });
    }
    let mut acc = MultiVector::scalar(n, 1.0);
    for f in fixed {
        let emb = layout.embedding(f.block)?;
        if let Some(p) = &f.point {
            acc = acc.wedge(&MultiVector::vector(&emb.apply(p)?))?;
        }
        if f.tangent.dim() != emb.source_dim() {
            return Err(Error::DimensionMismatch { left: f.tangent.dim(), right: emb.source_dim() });
        }
        acc = acc.wedge(&f.tangent.push_forward(&emb)?.expand())?;
    }
    if acc.degree() > phi_o.degree() {
        return Err(Error::DegreeOverflow { degree: acc.degree(), dim: phi_o.degree() });
    }
    contract(&acc, phi_o)
}

/// Wedge of simple comass-1 forms placed on disjoint coordinate blocks,
/// certified by ascent plus oracle.
pub fn product_calibration_check(
    factors: &[(AlternatingForm, CoordinateEmbedding)],
    opts: ComassOptions,
    resolution: usize,
) -> Result<ComassCertificate> {
    let target = factors.first().ok_or_else(|| Error::Precondition("no factors".into()))?.1.target_dim();
    for (i, (phi, emb)) in factors.iter().enumerate() {
        if emb.target_dim() != target || emb.source_dim() != phi.dim() {
            return Err(Error::DimensionMismatch { left: emb.source_dim(), right: phi.dim() });
        }
        let riesz =
            MultiVector::from_terms(phi.dim(), phi.degree(), phi.terms().map(|(k, c)| (k.indices().to_vec(), c)))?;
        if riesz.is_zero() || is_simple(&riesz, 1e-9)?.is_none() {
            return Err(Error::NonSimple(format!("factor {}", i + 1)));
        }
        // a simple form has comass equal to its Euclidean norm
        if (phi.norm() - 1.0).abs() > 1e-6 {
            return Err(Error::Precondition(format!("factor {} has comass {}", i + 1, phi.norm())));
        }
        for (_, other) in &factors[..i] {
            if let Some(t) = emb.overlaps(other) {
                return Err(Error::OverlappingBlocks(t));
            }
        }
    }
    let mut product = AlternatingForm::scalar(target, 1.0);
    for (phi, emb) in factors {
        product = product.wedge(&extend_form(phi, emb)?)?;
    }
    certify(&product, opts, resolution)
}

#[derive(Clone, Debug)]
pub struct ConvexDecompositionReport {
    pub certified: bool,
    /// `(cⱼ, ψ̲(ζⱼ))` for every atom.
    pub atom_values: Vec<(f64, f64)>,
    /// Spread `max − min` of the atom values.
    pub spread: f64,
    pub uniform: bool,
    /// `Σ cⱼ ψ̲(ζⱼ)`.
    pub aggregate: f64,
    /// `ψ̲(τ)` evaluated directly.
    pub direct: f64,
}

/// Writes τ as a convex combination of maximizers of φ and checks whether
/// ψ̲ takes one common value on all of them.
pub fn convex_decomposition_check(
    tau: &MultiVector,
    phi: &AlternatingForm,
    psi_bar: &AlternatingForm,
    atom_budget: usize,
    uniform_tol: f64,
) -> Result<ConvexDecompositionReport> {
    let direct = evaluate(psi_bar, tau)?;
    match facet_membership(tau, phi, atom_budget)? {
        FacetMembership::NotCertified { .. } => Ok(ConvexDecompositionReport {
            certified: false,
            atom_values: Vec::new(),
            spread: f64::NAN,
            uniform: false,
            aggregate: f64::NAN,
            direct,
        }),
        FacetMembership::Certified { atoms, .. } => {
            let atom_values =
                atoms.iter().map(|(c, z)| Ok((*c, evaluate(psi_bar, &z.expand())?))).collect::<Result<Vec<_>>>()?;
            let hi = atom_values.iter().map(|v| v.1).fold(f64::NEG_INFINITY, f64::max);
            let lo = atom_values.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
            let aggregate = atom_values.iter().map(|(c, v)| c * v).sum();
            Ok(ConvexDecompositionReport {
                certified: true,
                spread: hi - lo,
                uniform: hi - lo <= uniform_tol,
                atom_values,
                aggregate,
                direct,
            })
        }
    }
}

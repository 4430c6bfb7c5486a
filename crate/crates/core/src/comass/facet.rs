//! Dual-facet membership and mass-norm bounds over sampled atom dictionaries.

use super::frame::{ascend, DenseForm};
use super::{certify, comass, maximizer_set, ComassOptions, DEFAULT_MAX_SWEEPS, DEFAULT_ORACLE_RESOLUTION};
use crate::error::{Error, Result};
use crate::exterior::{evaluate, AlternatingForm, Basis, MultiVector, SimpleVector};
use crate::lp::{nnls, solve_standard, LpStatus};

const FACET_TOL: f64 = 1e-6;
const ATOM_TOL: f64 = 1e-9;
const RESTARTS: usize = 24;

#[derive(Clone, Debug)]
pub enum FacetMembership {
    /// Nonnegative weights summing to 1 over maximizers of φ.
    Certified { atoms: Vec<(f64, SimpleVector)>, residual: f64 },
    /// No combination found within the atom budget. This is not a disproof.
    NotCertified { residual: f64, atoms_tried: usize },
}

impl FacetMembership {
    pub fn is_certified(&self) -> bool {
        matches!(self, FacetMembership::Certified { .. })
    }
}

/// Looks for `ξ = Σ wⱼ ζⱼ` with `wⱼ ≥ 0`, `Σ wⱼ = 1` and every `ζⱼ` a
/// maximizer of φ. Atoms come from the maximizer set, the basis planes φ
/// calibrates, and column generation: ascent on `φ + μ·r♭` for the current
/// residual `r`, polished back onto the maximizer set by ascent on φ alone.
pub fn facet_membership(xi: &MultiVector, phi: &AlternatingForm, atom_budget: usize) -> Result<FacetMembership> {
    if xi.dim() != phi.dim() || xi.degree() != phi.degree() {
        return Err(Error::DimensionMismatch { left: xi.dim(), right: phi.dim() });
    }
    let cert = comass(phi, RESTARTS, 0)?;
    if (cert.value - 1.0).abs() > FACET_TOL {
        return Err(Error::Precondition(format!("comass of φ is {} (needs 1)", cert.value)));
    }
    let on_face = evaluate(phi, xi)?;
    if (on_face - 1.0).abs() > FACET_TOL {
        return Err(Error::Precondition(format!("φ(ξ) = {on_face} (needs 1)")));
    }
    let basis = Basis::new(xi.dim(), xi.degree())?;
    let target = xi.to_dense(&basis);
    let form = DenseForm::new(phi);

    let mut atoms: Vec<SimpleVector> = Vec::new();
    let add = |atoms: &mut Vec<SimpleVector>, s: SimpleVector| {
        let e = s.expand();
        if evaluate(phi, &e).map(|v| v >= 1.0 - ATOM_TOL).unwrap_or(false)
            && !atoms.iter().any(|a| a.expand().sub(&e).map(|d| d.norm() < 1e-9).unwrap_or(true))
        {
            atoms.push(s);
        }
    };
    for (key, c) in phi.terms() {
        if (c.abs() - 1.0).abs() <= ATOM_TOL {
            let s = SimpleVector::basis(xi.dim(), key.indices())?;
            add(&mut atoms, if c < 0.0 { s.reversed() } else { s });
        }
    }
    for s in maximizer_set(phi, ATOM_TOL, RESTARTS)? {
        add(&mut atoms, s);
    }
    if let Some(s) = crate::exterior::is_simple(xi, 1e-9)? {
        add(&mut atoms, s);
    }

    let mut residual = f64::INFINITY;
    let mut stalled = 0;
    loop {
        atoms.truncate(atom_budget.max(1));
        let (weights, fit, r) = simplex_fit(&atoms, &basis, &target);
        residual = residual.min(r);
        if r <= FACET_TOL {
            let kept: Vec<(f64, SimpleVector)> =
                weights.iter().zip(&atoms).filter(|(w, _)| **w > 1e-12).map(|(w, a)| (*w, a.clone())).collect();
            return Ok(FacetMembership::Certified { atoms: kept, residual: r });
        }
        if atoms.len() >= atom_budget || stalled >= 3 {
            return Ok(FacetMembership::NotCertified { residual, atoms_tried: atoms.len() });
        }
        // price a new atom against the residual direction
        let rdir: Vec<f64> = target.iter().zip(&fit).map(|(t, f)| t - f).collect();
        let rnorm = rdir.iter().map(|x| x * x).sum::<f64>().sqrt();
        let rform = AlternatingForm::from_dense(&basis, &rdir.iter().map(|x| x / rnorm).collect::<Vec<_>>());
        let priced = phi.axpy(0.25, &rform)?;
        let pcert = comass(&priced, 8, atoms.len() as u64)?;
        let before = atoms.len();
        for s in pcert.maximizers {
            let out = ascend(&form, s.normalized_orientation().frame().to_vec(), DEFAULT_MAX_SWEEPS);
            add(&mut atoms, SimpleVector::from_frame(xi.dim(), out.frame)?);
        }
        stalled = if atoms.len() == before { stalled + 1 } else { 0 };
    }
}

/// Weights on the probability simplex minimizing `‖Σ wⱼ aⱼ − target‖`,
/// via NNLS with a heavily weighted `Σ w = 1` row. Returns weights, fit and
/// the residual of the renormalized weights.
fn simplex_fit(atoms: &[SimpleVector], basis: &Basis, target: &[f64]) -> (Vec<f64>, Vec<f64>, f64) {
    const RHO: f64 = 1e4;
    let dense: Vec<Vec<f64>> = atoms.iter().map(|a| a.expand().to_dense(basis)).collect();
    let cols: Vec<Vec<f64>> = dense
        .iter()
        .map(|d| {
            let mut c = d.clone();
            c.push(RHO);
            c
        })
        .collect();
    let mut rhs = target.to_vec();
    rhs.push(RHO);
    let mut w = nnls(&cols, &rhs);
    let total: f64 = w.iter().sum();
    if total > 0.0 {
        w.iter_mut().for_each(|x| *x /= total);
    }
    let mut fit = vec![0.0; target.len()];
    for (d, wi) in dense.iter().zip(&w) {
        fit.iter_mut().zip(d).for_each(|(f, x)| *f += wi * x);
    }
    let r = fit.iter().zip(target).map(|(f, t)| (f - t) * (f - t)).sum::<f64>().sqrt();
    (w, fit, r)
}

#[derive(Clone, Debug)]
pub struct MassBounds {
    pub lower: f64,
    /// `+∞` when no decomposition was found within the atom budget.
    pub upper: f64,
    /// Signed coefficients on simple atoms with `Σ cⱼ ζⱼ = ξ` and `Σ |cⱼ| = upper`.
    pub atoms: Vec<(f64, SimpleVector)>,
}

/// Brackets the mass norm of `ξ`.
///
/// Upper: the cheapest signed decomposition over a dictionary of simple atoms
/// (a linear program), grown by adding comass maximizers of the LP dual.
/// Lower: `max φ(ξ)/‖φ‖*` over a dictionary of forms: the final LP dual, ξ♭
/// itself and signed basis covectors on the support of ξ.
pub fn mass_bounds(xi: &MultiVector, atom_budget: usize, form_budget: usize) -> Result<MassBounds> {
    if xi.is_zero() {
        return Err(Error::ZeroInput("mass of the zero multivector"));
    }
    let (n, m) = (xi.dim(), xi.degree());
    let basis = Basis::new(n, m)?;
    let target = xi.to_dense(&basis);

    let mut dictionary: Vec<SimpleVector> = Vec::new();
    if let Some(s) = crate::exterior::is_simple(xi, 1e-9)? {
        dictionary.push(s);
    }
    if m > 0 {
        dictionary.extend(maximizer_set(&xi.dual(), 1e-9, 12)?);
    }
    let mut support: Vec<(&crate::exterior::MultiIndex, f64)> = xi.terms().collect();
    support.sort_by(|a, b| b.1.abs().total_cmp(&a.1.abs()).then_with(|| a.0.cmp(b.0)));
    for (key, _) in &support {
        dictionary.push(SimpleVector::basis(n, key.indices())?);
    }
    dictionary.truncate(atom_budget.max(1));

    let mut upper = f64::INFINITY;
    let mut atoms = Vec::new();
    let mut dual: Option<Vec<f64>> = None;
    loop {
        let columns: Vec<Vec<f64>> = dictionary.iter().map(|a| a.expand().to_dense(&basis)).collect();
        let k = columns.len();
        let rows: Vec<Vec<f64>> = (0..basis.len())
            .map(|i| {
                let mut row: Vec<f64> = columns.iter().map(|c| c[i]).collect();
                row.extend(columns.iter().map(|c| -c[i]));
                row
            })
            .collect();
        let sol = solve_standard(&rows, &target, &vec![1.0; 2 * k]);
        if sol.status != LpStatus::Optimal {
            break;
        }
        upper = sol.objective;
        atoms = (0..k)
            .map(|j| (sol.x[j] - sol.x[k + j], j))
            .filter(|(c, _)| c.abs() > 1e-12)
            .map(|(c, j)| (c, dictionary[j].clone()))
            .collect();
        dual = Some(sol.duals.clone());
        if dictionary.len() >= atom_budget || m == 0 {
            break;
        }
        let y = AlternatingForm::from_dense(&basis, &sol.duals);
        if y.is_zero() {
            break;
        }
        let ycert = comass(&y, 12, dictionary.len() as u64)?;
        if ycert.value <= 1.0 + 1e-7 {
            break;
        }
        let before = dictionary.len();
        for s in ycert.maximizers.into_iter().take(atom_budget - dictionary.len()) {
            dictionary.push(s);
        }
        if dictionary.len() == before {
            break;
        }
    }

    let mut forms: Vec<AlternatingForm> = Vec::new();
    if let Some(y) = dual {
        forms.push(AlternatingForm::from_dense(&basis, &y));
    }
    forms.push(xi.dual());
    for (key, c) in &support {
        let e = AlternatingForm::basis(n, key.indices())?;
        forms.push(if *c < 0.0 { e.scaled(-1.0) } else { e });
    }
    forms.truncate(form_budget.max(1));
    let mut lower: f64 = 0.0;
    for phi in forms.iter().filter(|f| !f.is_zero()) {
        let c = if m == 0 {
            phi.get(&[]).abs()
        } else {
            certify(phi, ComassOptions { restarts: 12, ..Default::default() }, DEFAULT_ORACLE_RESOLUTION)?.value
        };
        if c > 0.0 {
            lower = lower.max(evaluate(phi, xi)? / c);
        }
    }
    // Both sides are certified up to the comass lower bounds; rounding only.
    if lower > upper && lower - upper < 1e-9 * upper.max(1.0) {
        lower = upper;
    }
    Ok(MassBounds { lower, upper, atoms })
}

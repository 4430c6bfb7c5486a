//! The obstruction pipeline on the cone over the Clifford torus: a single
//! fitted candidate, then a seeded sweep of random and fitted candidates.

use calgeom::geometry::{build_link, LinkFamily, MinimalProductSpec};
use calgeom::obstruction::{
    candidate_family, dichotomy_sweep, obstruction_witness, FitOptions, ObstructionSetup, SweepOptions, WitnessOptions,
};

fn main() -> calgeom::Result<()> {
    let c = build_link(&LinkFamily::Circle, 64)?;
    let setup = ObstructionSetup::new(MinimalProductSpec::new(vec![c.clone(), c])?, WitnessOptions::default())?;
    let (_, phi) = candidate_family(&setup, 0, 1, 0, FitOptions::default())?.remove(0);
    let r = obstruction_witness(&setup, &phi)?;
    println!(
        "fitted: residual {:.6}, min {:.6}, integral {:.2e}, predicted {:.6} -> {}",
        r.calibration_residual,
        r.calibration_min,
        r.pullback_integral,
        r.predicted_magnitude,
        r.verdict.as_str()
    );
    let s = dichotomy_sweep(&setup, SweepOptions::default())?;
    println!(
        "sweep: {} candidates, {} calibrating, {} violations, best residual {:.6}",
        s.outcomes.len(),
        s.calibrating,
        s.violations,
        s.best_residual
    );
    Ok(())
}

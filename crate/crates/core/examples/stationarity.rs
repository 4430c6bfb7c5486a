//! The seeded first-variation battery on minimal and non-minimal links.

use calgeom::geometry::{build_link, eta_coefficient, stationarity_report, LinkFamily};

fn main() -> calgeom::Result<()> {
    for (name, family) in [
        ("Clifford torus", LinkFamily::ProductTorus),
        ("three SL spheres", LinkFamily::SlSpheres),
        ("latitude z = 0.5", LinkFamily::Latitude { height: 0.5 }),
    ] {
        for res in [16, 32, 64] {
            let r = stationarity_report(&build_link(&family, res)?, 20, 0)?;
            println!("{name:18} res {res:3}: max_abs {:.3e}", r.max_abs);
        }
    }
    println!("cross-term coefficient for (2, 1): {:e}", eta_coefficient(2, 1));
    Ok(())
}

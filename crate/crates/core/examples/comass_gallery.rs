//! Certified comass of the gallery calibrations, with their maximizers.

use calgeom::comass::{certify, ComassOptions, DEFAULT_ORACLE_RESOLUTION};
use calgeom::exterior::text::{format_form, parse_form};

fn main() -> calgeom::Result<()> {
    let forms = [
        ("special Lagrangian", "1,2,3 : 1\n1,5,6 : -1\n2,4,6 : 1\n3,4,5 : -1"),
        ("Kahler", "1,2 : 1\n3,4 : 1"),
        ("coassociative", include_str!("../../../fixtures/coassociative7.form")),
    ];
    for (name, text) in forms {
        let phi = parse_form(text, None)?;
        let cert = certify(&phi, ComassOptions::default(), DEFAULT_ORACLE_RESOLUTION)?;
        println!("{name}: comass {:.12} via {} (oracle gap {:?})", cert.value, cert.method.as_str(), cert.oracle_gap);
        for m in cert.maximizers.iter().take(3) {
            print!("  calibrated plane, dual form:\n{}", format_form(&m.expand().dual()));
        }
    }
    Ok(())
}

//! Coefficients of a calibration in the dual basis adapted to a calibrated
//! plane: the leading term is 1 and every term with exactly one normal index
//! vanishes.

use calgeom::comass::{comass, maximizer_set};
use calgeom::exterior::text::parse_form;
use calgeom::obstruction::{complete_to_basis, decompose_at};

fn main() -> calgeom::Result<()> {
    let phi = parse_form(include_str!("../../../fixtures/coassociative7.form"), None)?;
    println!("comass {:.12}", comass(&phi, 24, 0)?.value);
    for plane in maximizer_set(&phi, 1e-9, 8)?.iter().take(3) {
        let r = decompose_at(&phi, &complete_to_basis(plane))?;
        println!(
            "leading {:.12}, forbidden max {:.2e}, {} allowed terms",
            r.leading_coefficient,
            r.forbidden_max,
            r.allowed_terms.len()
        );
    }
    Ok(())
}

//! A non-simple unit 3-vector on the face of the special Lagrangian form,
//! written as a convex combination of calibrated planes, and its mass bounds.

use calgeom::comass::{facet_membership, mass_bounds, FacetMembership};
use calgeom::exterior::{AlternatingForm, MultiVector};

fn main() -> calgeom::Result<()> {
    let phi = AlternatingForm::from_terms(
        6,
        3,
        [(vec![1, 2, 3], 1.0), (vec![1, 5, 6], -1.0), (vec![2, 4, 6], 1.0), (vec![3, 4, 5], -1.0)],
    )?;
    let tau = MultiVector::from_terms(6, 3, [(vec![1, 2, 3], 0.5), (vec![3, 4, 5], -0.5)])?;
    match facet_membership(&tau, &phi, 32)? {
        FacetMembership::Certified { atoms, residual } => {
            println!("certified, residual {residual:.2e}");
            for (c, z) in atoms {
                println!("  weight {c:.6} on plane with frame {:?}", z.frame());
            }
        }
        FacetMembership::NotCertified { residual, atoms_tried } => {
            println!("not certified: residual {residual:.2e} after {atoms_tried} atoms");
        }
    }
    let b = mass_bounds(&tau, 32, 16)?;
    println!("mass in [{:.9}, {:.9}]", b.lower, b.upper);
    Ok(())
}

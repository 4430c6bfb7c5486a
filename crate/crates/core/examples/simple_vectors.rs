//! Plücker test for decomposability and recovery of an orthonormal frame.

use calgeom::exterior::{is_simple, MultiVector, DEFAULT_SIMPLE_TOL};

fn main() -> calgeom::Result<()> {
    let a = MultiVector::wedge_vectors(4, &[vec![1.0, 1.0, 0.0, 0.0], vec![0.0, 1.0, 2.0, 0.0]])?;
    let unit = a.scaled(1.0 / a.norm());
    match is_simple(&unit, DEFAULT_SIMPLE_TOL)? {
        Some(xi) => println!("simple; frame {:?}", xi.frame()),
        None => println!("not simple"),
    }
    // e12 + e34 fails the Plücker relation p12 p34 − p13 p24 + p14 p23 = 0
    let k = MultiVector::from_terms(4, 2, [(vec![1, 2], 1.0), (vec![3, 4], 1.0)])?;
    println!("e12 + e34 simple: {}", is_simple(&k, DEFAULT_SIMPLE_TOL)?.is_some());
    Ok(())
}

//! Wedge of simple comass-one forms placed on disjoint coordinate blocks.

use calgeom::comass::ComassOptions;
use calgeom::exterior::{AlternatingForm, CoordinateEmbedding};
use calgeom::obstruction::product_calibration_check;

fn main() -> calgeom::Result<()> {
    let s = 0.5f64.sqrt();
    let a = AlternatingForm::from_terms(3, 2, [(vec![1, 2], s), (vec![1, 3], s)])?;
    let b = AlternatingForm::covector(&[0.6, 0.8]);
    let factors = vec![(a, CoordinateEmbedding::block(3, 5, 0)?), (b, CoordinateEmbedding::block(2, 5, 3)?)];
    let cert = product_calibration_check(&factors, ComassOptions::default(), 8)?;
    println!("comass of the product {:.12} (oracle gap {:?})", cert.value, cert.oracle_gap);
    Ok(())
}

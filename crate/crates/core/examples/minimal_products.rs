//! Minimal products of gallery links and their scalings.

use calgeom::geometry::{build_link, minimal_product, LinkFamily, MinimalProductSpec};

fn main() -> calgeom::Result<()> {
    let circle = build_link(&LinkFamily::Circle, 64)?;
    let sphere = build_link(&LinkFamily::Sphere { dim: 2 }, 32)?;
    let sl = build_link(&LinkFamily::SlSpheres, 16)?;
    for (name, factors) in [
        ("S1 x S1", vec![circle.clone(), circle.clone()]),
        ("S2 x S1", vec![sphere, circle.clone()]),
        ("SL spheres x S1", vec![sl, circle.clone()]),
    ] {
        let spec = MinimalProductSpec::new(factors.clone())?;
        let link = minimal_product(&factors)?;
        println!(
            "{name}: lambdas {:?}, dim {} in S^{}, {} samples, volume {:.9}",
            spec.lambdas,
            link.dim(),
            link.ambient_dim() - 1,
            link.num_samples(),
            link.total_volume()
        );
    }
    Ok(())
}

//! Running the batch front end in-process and rendering both report formats.

use std::path::Path;

use calgeom::cli::{execute, Command, RunManifest};
use calgeom::report::{emit_report, Format};

fn main() -> calgeom::Result<()> {
    let mut m = RunManifest::new(Command::Product);
    m.inputs.factors = vec!["sphere2".into(), "circle".into()];
    m.inputs.resolution = Some(16);
    m.inputs.check_stationary = true;
    let out = execute(&m, Path::new("."))?;
    print!("{}", emit_report(&out.records, Format::Text));
    print!("{}", emit_report(&out.records, Format::Records));
    Ok(())
}

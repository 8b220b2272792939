//! Build the shipped H and Li potentials, print a few reciprocal-space
//! values, and write them in the text format.
//!
//! Usage: cargo run --example pseudopotential [-- <dir>]

use std::path::PathBuf;

use pwcovo::pseudopot::{hgh, write_pseudopotential, LocalRadial, LongRange};

fn main() -> pwcovo::Result<()> {
    let dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(std::env::temp_dir);
    for spec in [hgh::hydrogen(), hgh::lithium()] {
        spec.validate()?;
        let v = LocalRadial::new(&spec, LongRange::Periodic)?;
        println!("{} (Z = {}), {} projectors", spec.species, spec.zval, spec.projectors.len());
        for g in [0.0, 0.5, 1.0, 2.0, 4.0] {
            println!("  v_loc({g:.1}) = {:+.6}", v.value(g));
        }
        let path = dir.join(format!("{}.pp", spec.species));
        write_pseudopotential(&spec, &path)?;
        println!("  written to {}", path.display());
    }
    Ok(())
}

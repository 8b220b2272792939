//! Madelung constant of rock salt from the Ewald sum, and the ε-independence
//! of the result.

use nalgebra::Vector3;
use pwcovo::integrals::ewald::{default_epsilon, ewald_energy};
use pwcovo::lattice::Cell;

fn main() -> pwcovo::Result<()> {
    // conventional cubic cell: 4 cations on fcc sites, 4 anions shifted by a/2
    let a = 2.0;
    let cell = Cell::cubic(a)?;
    let fcc = [[0.0, 0.0, 0.0], [0.5, 0.5, 0.0], [0.5, 0.0, 0.5], [0.0, 0.5, 0.5]];
    let mut charges = Vec::new();
    for f in fcc {
        let p = Vector3::new(f[0], f[1], f[2]) * a;
        charges.push((p, 1.0));
        charges.push((p + Vector3::new(0.5 * a, 0.0, 0.0), -1.0));
    }
    let eps0 = default_epsilon(&cell);
    for scale in [0.5, 1.0, 2.0] {
        let e = ewald_energy(&cell, &charges, eps0 * scale)?;
        // nearest-neighbour distance a/2; 4 ion pairs per cell
        let madelung = -e / 4.0 * (0.5 * a);
        println!("eps {:.4}: E = {e:.12}, Madelung = {madelung:.10}", eps0 * scale);
    }
    println!("reference 1.7475645946");
    Ok(())
}

//! Plane-wave sphere and FFT mesh for a cubic and a skewed cell.

use nalgebra::Vector3;
use pwcovo::lattice::{build_basis, build_cell, Cell};
use pwcovo::orbital::random_orbitals;

fn main() -> pwcovo::Result<()> {
    let cubic = Cell::cubic(10.0)?;
    let skew = build_cell(
        Vector3::new(10.0, 0.0, 0.0),
        Vector3::new(3.0, 9.0, 0.0),
        Vector3::new(1.0, 2.0, 11.0),
    )?;
    for (name, cell) in [("cubic", cubic), ("skewed", skew)] {
        for ecut in [4.0, 8.0, 16.0] {
            let b = build_basis(&cell, ecut)?;
            println!(
                "{name:6} ecut {ecut:4} Ry: {:5} plane waves, mesh {:?}, volume {:.1}",
                b.len(),
                b.mesh,
                cell.omega
            );
        }
    }

    // to_real / from_real round trip on a random orbital
    let b = build_basis(&Cell::cubic(10.0)?, 8.0)?;
    let psi = random_orbitals(&b, 1, 3, false, &[])?.remove(0);
    let back = b.from_real(b.to_real(&psi.coeffs));
    let err = psi.coeffs.iter().zip(&back).map(|(a, c)| (a - c).norm()).fold(0.0, f64::max);
    println!("FFT round trip max error {err:.1e}");
    println!("basis hash {}", b.hash_hex());
    Ok(())
}

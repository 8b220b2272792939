//! The cutoff kernel V_f in real space and on the mesh, next to the bare and
//! free-space kernels.

use pwcovo::integrals::kernel::{aperiodic_kernel, bare_kernel, filtered_kernel, vf_real};
use pwcovo::lattice::{build_basis, Cell};

fn main() -> pwcovo::Result<()> {
    let l = 10.0;
    let basis = build_basis(&Cell::cubic(l)?, 8.0)?;
    let (n, rcut) = (8, 0.5 * l);
    println!("  R      V_f(R)     1/R");
    for r in [0.5, 1.0, 2.0, 3.0, 4.0, 4.5, 5.0, 6.0] {
        println!("{r:4.1} {:10.6} {:8.4}", vf_real(r, n, rcut), 1.0 / r);
    }
    let bare = bare_kernel(&basis);
    let vf = filtered_kernel(&basis, n, rcut)?;
    let free = aperiodic_kernel(&basis, l * 3f64.sqrt() / 2.0);
    println!("\n |G|^2       bare   filtered  free-space");
    let mut shells: Vec<(f64, usize)> = Vec::new();
    for (i, &g2) in basis.mesh_g2.iter().enumerate() {
        if g2 < 1.6 && !shells.iter().any(|s| (s.0 - g2).abs() < 1e-9) {
            shells.push((g2, i));
        }
    }
    shells.sort_by(|a, b| a.0.total_cmp(&b.0));
    for (g2, i) in shells {
        println!("{g2:6.3} {:10.4} {:10.4} {:10.4}", bare.at(i), vf.at(i), free.at(i));
    }
    Ok(())
}

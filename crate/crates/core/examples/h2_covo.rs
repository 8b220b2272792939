//! H2 in a periodic box: RHF, one COVO, and FCI on the two-orbital space.

use nalgebra::Vector3;
use pwcovo::covo::{generate_covos, CovoOptions};
use pwcovo::groundstate::{solve_rhf, RhfInit, RhfOptions};
use pwcovo::integrals::{Context, ContextOptions};
use pwcovo::lattice::{build_basis, Cell};
use pwcovo::pseudopot::{hgh, StructureAtoms};

fn main() -> pwcovo::Result<()> {
    let l = 10.0;
    let r = 1.4;
    let cell = Cell::cubic(l)?;
    let basis = build_basis(&cell, 8.0)?;
    println!("plane waves: {}, mesh {:?}", basis.len(), basis.mesh);
    let x = 0.5 * r / l;
    let st = StructureAtoms::new(vec![
        ("H".into(), Vector3::new(0.5 - x, 0.5, 0.5)),
        ("H".into(), Vector3::new(0.5 + x, 0.5, 0.5)),
    ]);
    let ctx = Context::new(basis, st, vec![hgh::hydrogen()], ContextOptions::default())?;
    println!("ion energy {:.8}", ctx.eshift);
    let t = std::time::Instant::now();
    let scf = solve_rhf(&ctx, 1, RhfInit::Seed(1), &RhfOptions::default())?;
    println!("E_RHF = {:.8} Ha ({} CG steps, {:.1?})", scf.etotal, scf.iterations, t.elapsed());
    let t = std::time::Instant::now();
    let covos = generate_covos(&ctx, &scf.filled, 2, &CovoOptions::default())?;
    println!("3x3 CI energies {:?} ({:.1?})", covos.ci_energies, t.elapsed());
    for (n, e) in covos.energies.iter().enumerate() {
        println!("E_FCI({} COVO) = {:.8} Ha", n + 1, e);
    }
    Ok(())
}

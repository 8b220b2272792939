//! H2 integrals over RHF plus two COVOs, written as an FCIDUMP and solved back.

use nalgebra::Vector3;
use pwcovo::covo::{generate_covos, CovoOptions};
use pwcovo::fci::solve_ground;
use pwcovo::groundstate::{solve_rhf, RhfInit, RhfOptions};
use pwcovo::integrals::{Context, ContextOptions, SqHamiltonian};
use pwcovo::lattice::{build_basis, Cell};
use pwcovo::pseudopot::{hgh, StructureAtoms};

fn main() -> pwcovo::Result<()> {
    let basis = build_basis(&Cell::cubic(10.0)?, 8.0)?;
    let st = StructureAtoms::new(vec![
        ("H".into(), Vector3::new(0.43, 0.5, 0.5)),
        ("H".into(), Vector3::new(0.57, 0.5, 0.5)),
    ]);
    let ctx = Context::new(basis, st, vec![hgh::hydrogen()], ContextOptions::default())?;
    let scf = solve_rhf(&ctx, 1, RhfInit::Seed(1), &RhfOptions::default())?;
    let covos = generate_covos(&ctx, &scf.filled, 2, &CovoOptions::default())?;
    let ham = ctx.build_sq_hamiltonian(&covos.all_orbitals(&scf.filled))?;
    let (e1, e2) = ham.symmetry_error();
    println!("hermiticity errors h1 {e1:.1e}, h2 {e2:.1e}");

    let text = ham.to_fcidump();
    print!("{}", text.lines().take(8).collect::<Vec<_>>().join("\n"));
    println!("\n... {} lines", text.lines().count());
    let back = SqHamiltonian::parse_fcidump(&text, "h2")?;
    let fci = solve_ground(&back)?;
    println!("E_FCI from dump {:.10} (direct {:.10})", fci.e0, covos.energies[1]);
    Ok(())
}

//! Noisy VQE on the two-orbital LiH dump: qubit Hamiltonian, per-seed energies
//! with and without readout mitigation, and the credit estimate.

use std::path::Path;

use pwcovo::integrals::SqHamiltonian;
use pwcovo::vqe::{map_to_qubits, run_job, MapOptions, VqeJob};

fn main() -> pwcovo::Result<()> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let ham = SqHamiltonian::read_fcidump(&data.join("lih_1covo.fcidump"))?;
    let map = map_to_qubits(&ham, &MapOptions::default())?;
    print!("{}", map.pauli.to_text());
    println!("measurement groups: {}", map.pauli.groups.len());

    let job = VqeJob::read(&data.join("vqe_job.toml"))?;
    let rep = run_job(&job, &ham)?;
    println!("E_FCI {:.8}", rep.fci);
    print!("{}", rep.to_csv());
    println!("mean raw error {:.2} mHa", (rep.mean_raw - rep.fci) * 1e3);
    if let Some(m) = rep.mean_mitigated {
        println!("mean mitigated error {:.2} mHa", (m - rep.fci) * 1e3);
    }
    println!("credits per batch {:.2}", rep.records[0].credits);
    Ok(())
}

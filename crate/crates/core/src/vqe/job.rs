//! VQE job description and results, one record per seed.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    batch_circuits, batch_credits, calibrate, exact_energy, map_to_qubits, mitigate, rng_for, simulate_energy,
    spsa_minimize, Ansatz, CalibrationMatrix, GroupOutcome, MapOptions, Mode, NoiseModel, RotationSet, SpsaOptions,
};
use crate::error::{Error, Result};
use crate::integrals::SqHamiltonian;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    pub readout_flip: [f64; 2],
    pub depol1q: f64,
    pub depol2q: f64,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        NoiseSpec {
            readout_flip: [2e-3, 2e-3],
            depol1q: 1e-4,
            depol2q: 3e-3,
        }
    }
}

impl NoiseSpec {
    pub fn model(&self) -> NoiseModel {
        NoiseModel::from_flips(self.readout_flip, self.depol1q, self.depol2q)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VqeJob {
    /// Integral dump of the two-orbital Hamiltonian.
    pub fcidump: Option<String>,
    /// Shots per circuit; 0 means exact expectation values.
    pub shots: u64,
    pub seeds: Vec<u64>,
    /// SPSA objective evaluations.
    pub budget: usize,
    pub noise: bool,
    pub noise_model: NoiseSpec,
    pub mitigation: bool,
    pub rotations: RotationSet,
    pub penalty_margin: f64,
    pub spsa_a: f64,
    pub spsa_c: f64,
}

impl Default for VqeJob {
    fn default() -> Self {
        VqeJob {
            fcidump: None,
            shots: 500,
            seeds: vec![1],
            budget: 600,
            noise: true,
            noise_model: NoiseSpec::default(),
            mitigation: true,
            rotations: RotationSet::RyRz,
            penalty_margin: MapOptions::default().penalty_margin,
            spsa_a: 0.2,
            spsa_c: 0.1,
        }
    }
}

impl VqeJob {
    pub fn read(path: &Path) -> Result<VqeJob> {
        let text = crate::error::read_text(path)?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("job serializes")
    }

    fn mode(&self) -> Mode {
        if self.shots == 0 {
            Mode::Exact
        } else {
            Mode::Shots(self.shots)
        }
    }

    fn noise_model(&self) -> NoiseModel {
        if self.noise {
            self.noise_model.model()
        } else {
            NoiseModel::ideal()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedRecord {
    pub seed: u64,
    pub theta: Vec<f64>,
    /// Noise-free expectation at the returned angles.
    pub energy_ideal: f64,
    pub energy_raw: f64,
    pub stderr: f64,
    pub energy_mitigated: Option<f64>,
    pub raw: Vec<GroupOutcome>,
    pub calibration: Option<CalibrationMatrix>,
    pub credits: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VqeReport {
    pub fci: f64,
    pub shots: u64,
    pub records: Vec<SeedRecord>,
    pub mean_raw: f64,
    pub mean_mitigated: Option<f64>,
}

impl VqeReport {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("report serializes")
    }

    /// Table rows: seed, FCI, w/o mitigation, w/ mitigation, errors (Ha).
    pub fn to_csv(&self) -> String {
        let mut s = String::from("seed,fci,raw,mitigated,err_raw,err_mitigated,stderr\n");
        for r in &self.records {
            let (m, dm) = match r.energy_mitigated {
                Some(m) => (format!("{m:.10}"), format!("{:.10}", m - self.fci)),
                None => ("none".into(), "none".into()),
            };
            s.push_str(&format!(
                "{},{:.10},{:.10},{m},{:.10},{dm},{:.10}\n",
                r.seed,
                self.fci,
                r.energy_raw,
                r.energy_raw - self.fci,
                r.stderr
            ));
        }
        s
    }
}

/// Optimize and measure for one seed.
pub fn run_seed(pauli: &super::PauliHamiltonian, job: &VqeJob, seed: u64) -> Result<SeedRecord> {
    let noise = job.noise_model();
    noise.validate()?;
    let mode = job.mode();
    let rot = job.rotations;
    let mut shot_rng = rng_for(seed, 1);
    let spsa = SpsaOptions {
        budget: job.budget,
        a: job.spsa_a,
        c: job.spsa_c,
        seed,
        ..SpsaOptions::default()
    };
    let energy_at = |t: &[f64], m: Mode, rng: &mut rand_chacha::ChaCha8Rng| -> f64 {
        let a = Ansatz {
            theta: t.to_vec(),
            rotations: rot,
        };
        simulate_energy(&a, pauli, m, Some(&noise), rng).map(|e| e.energy).unwrap_or(f64::INFINITY)
    };
    let mut track_rng = rng_for(seed, 4);
    let res = spsa_minimize(
        |t| energy_at(t, mode, &mut shot_rng),
        |t| energy_at(t, Mode::Exact, &mut track_rng),
        &[0.0; super::ANSATZ_PARAMS],
        &spsa,
    );
    let ansatz = Ansatz {
        theta: res.theta.clone(),
        rotations: rot,
    };
    let mut final_rng = rng_for(seed, 2);
    let est = simulate_energy(&ansatz, pauli, mode, Some(&noise), &mut final_rng)?;
    let (mitigated, cal) = if job.mitigation {
        let mut cal_rng = rng_for(seed, 3);
        let cal = calibrate(&noise, mode, &mut cal_rng);
        let (e, _) = mitigate(pauli, &est.outcomes, &cal)?;
        (Some(e), Some(cal))
    } else {
        (None, None)
    };
    let credits = batch_credits(&batch_circuits(&ansatz, pauli, job.mitigation), job.shots);
    Ok(SeedRecord {
        seed,
        theta: res.theta,
        energy_ideal: exact_energy(&ansatz, pauli),
        energy_raw: est.energy,
        stderr: est.stderr,
        energy_mitigated: mitigated,
        raw: est.outcomes,
        calibration: cal,
        credits,
    })
}

/// Map the Hamiltonian and run every seed (in parallel, reported in seed order).
pub fn run_job(job: &VqeJob, ham: &SqHamiltonian) -> Result<VqeReport> {
    if job.seeds.is_empty() {
        return Err(Error::Config("VQE job lists no seeds".into()));
    }
    let map = map_to_qubits(
        ham,
        &MapOptions {
            penalty_margin: job.penalty_margin,
        },
    )?;
    let fci = crate::fci::solve_ground(ham)?.e0;
    let records: Vec<SeedRecord> = job
        .seeds
        .par_iter()
        .map(|&s| run_seed(&map.pauli, job, s))
        .collect::<Result<_>>()?;
    let n = records.len() as f64;
    let mean_raw = records.iter().map(|r| r.energy_raw).sum::<f64>() / n;
    let mean_mitigated = if job.mitigation {
        Some(records.iter().filter_map(|r| r.energy_mitigated).sum::<f64>() / n)
    } else {
        None
    };
    Ok(VqeReport {
        fci,
        shots: job.shots,
        records,
        mean_raw,
        mean_mitigated,
    })
}

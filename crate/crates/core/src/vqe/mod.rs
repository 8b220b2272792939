//! Two-qubit VQE on the one-virtual (two-orbital) Hamiltonian: Pauli
//! mapping, noisy circuit simulation with shot sampling, SPSA, readout
//! calibration and mitigation, and the hardware credit formula.

mod circuit;
mod job;
mod mitigation;
mod pauli;
mod spsa;

use nalgebra::Matrix4;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

pub use circuit::{
    basis_change, gate_counts, run_probabilities, Ansatz, Gate, GateCounts, NoiseModel, RotationSet, ANSATZ_LAYERS,
    ANSATZ_PARAMS,
};
pub use job::{run_job, run_seed, SeedRecord, VqeJob, VqeReport};
pub use mitigation::{calibrate, mitigate, mitigate_probabilities, CalibrationMatrix};
pub use pauli::{
    map_to_qubits, singlet_ci_matrix, Basis, MapOptions, MeasurementGroup, Pauli, PauliHamiltonian, PauliTerm,
    QubitMapping,
};
pub use spsa::{spsa_minimize, SpsaOptions, SpsaResult};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    /// Exact outcome probabilities (no sampling).
    Exact,
    /// Sample each measurement circuit this many times.
    Shots(u64),
}

/// Outcome statistics of one measurement circuit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupOutcome {
    pub basis: [Basis; 2],
    /// Observed frequencies (or exact probabilities), index = 2·bit1 + bit0.
    pub probs: [f64; 4],
    pub counts: Option<[u64; 4]>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnergyEstimate {
    pub energy: f64,
    pub stderr: f64,
    pub outcomes: Vec<GroupOutcome>,
}

/// Ansatz followed by the basis change of `group`.
pub fn measurement_circuit(ansatz: &Ansatz, basis: [Basis; 2]) -> Vec<Gate> {
    let mut g = ansatz.gates();
    g.extend(basis_change(basis));
    g
}

/// Σ_{t∈group} c_t (−1)^{parity of outcome on the support of t}.
fn outcome_values(ham: &PauliHamiltonian, group: &MeasurementGroup) -> [f64; 4] {
    let mut v = [0.0; 4];
    for (i, vi) in v.iter_mut().enumerate() {
        for &t in &group.terms {
            let term = &ham.terms[t];
            let sign = if (i & term.support()).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
            *vi += term.coeff * sign;
        }
    }
    v
}

/// Energy and standard error from per-group outcome frequencies.
pub fn energy_from_outcomes(ham: &PauliHamiltonian, outcomes: &[GroupOutcome]) -> Result<(f64, f64)> {
    if outcomes.len() != ham.groups.len() {
        return Err(Error::Shape {
            expected: ham.groups.len(),
            got: outcomes.len(),
        });
    }
    let mut e = ham.constant();
    let mut var = 0.0;
    for (g, o) in ham.groups.iter().zip(outcomes) {
        let v = outcome_values(ham, g);
        let mean: f64 = v.iter().zip(&o.probs).map(|(a, p)| a * p).sum();
        e += mean;
        if let Some(c) = o.counts {
            let n: u64 = c.iter().sum();
            let m2: f64 = v.iter().zip(&o.probs).map(|(a, p)| a * a * p).sum();
            if n > 0 {
                var += (m2 - mean * mean).max(0.0) / n as f64;
            }
        }
    }
    Ok((e, var.sqrt()))
}

/// Multinomial sample of `shots` outcomes.
pub fn sample_counts(probs: &[f64; 4], shots: u64, rng: &mut ChaCha8Rng) -> [u64; 4] {
    let mut counts = [0u64; 4];
    let mut left = shots;
    let mut mass = 1.0;
    for i in 0..3 {
        if left == 0 {
            break;
        }
        let p = if mass > 0.0 { (probs[i] / mass).clamp(0.0, 1.0) } else { 0.0 };
        let k = Binomial::new(left, p).map(|b| b.sample(rng)).unwrap_or(0);
        counts[i] = k;
        left -= k;
        mass -= probs[i];
    }
    counts[3] = left;
    counts
}

/// Frequencies (or exact probabilities) for one circuit.
pub fn measure(gates: &[Gate], noise: &NoiseModel, mode: Mode, rng: &mut ChaCha8Rng) -> ([f64; 4], Option<[u64; 4]>) {
    let p = run_probabilities(gates, noise);
    match mode {
        Mode::Exact => (p, None),
        Mode::Shots(c) => {
            let counts = sample_counts(&p, c, rng);
            let n = c.max(1) as f64;
            (counts.map(|k| k as f64 / n), Some(counts))
        }
    }
}

/// ⟨ψ(θ)|H|ψ(θ)⟩ from the measurement circuits of `ham`.
pub fn simulate_energy(
    ansatz: &Ansatz,
    ham: &PauliHamiltonian,
    mode: Mode,
    noise: Option<&NoiseModel>,
    rng: &mut ChaCha8Rng,
) -> Result<EnergyEstimate> {
    if let Mode::Shots(0) = mode {
        return Err(Error::Vqe("shot count must be at least 1".into()));
    }
    let ideal = NoiseModel::ideal();
    let noise = noise.unwrap_or(&ideal);
    let outcomes: Vec<GroupOutcome> = ham
        .groups
        .iter()
        .map(|g| {
            let (probs, counts) = measure(&measurement_circuit(ansatz, g.basis), noise, mode, rng);
            GroupOutcome {
                basis: g.basis,
                probs,
                counts,
            }
        })
        .collect();
    let (energy, stderr) = energy_from_outcomes(ham, &outcomes)?;
    Ok(EnergyEstimate {
        energy,
        stderr,
        outcomes,
    })
}

/// Noise-free expectation straight from the statevector.
pub fn exact_energy(ansatz: &Ansatz, ham: &PauliHamiltonian) -> f64 {
    let v = ansatz.statevector();
    let h: Matrix4<_> = ham.dense();
    (v.adjoint() * h * v)[(0, 0)].re
}

/// Hardware cost of one circuit: 5 + C(N1q + 10 N2q + 5 Nm)/5000.
pub fn credit_estimate(shots: u64, n1q: u64, n2q: u64, nm: u64) -> f64 {
    5.0 + shots as f64 * (n1q + 10 * n2q + 5 * nm) as f64 / 5000.0
}

/// Summed cost of a batch of circuits run with the same shot count.
pub fn batch_credits(circuits: &[GateCounts], shots: u64) -> f64 {
    circuits.iter().map(|c| credit_estimate(shots, c.n1q, c.n2q, c.nm)).sum()
}

/// Gate counts of the energy circuits for `ham` plus the four calibration
/// circuits.
pub fn batch_circuits(ansatz: &Ansatz, ham: &PauliHamiltonian, with_calibration: bool) -> Vec<GateCounts> {
    let mut out: Vec<GateCounts> = ham
        .groups
        .iter()
        .map(|g| gate_counts(&measurement_circuit(ansatz, g.basis)))
        .collect();
    if with_calibration {
        out.extend((0..4).map(|b| gate_counts(&mitigation::prep_circuit(b))));
    }
    out
}

/// Deterministic RNG for (seed, stream).
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

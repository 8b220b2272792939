//! Full-calibration readout mitigation.

use nalgebra::{Matrix4, Vector4};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::circuit::{Gate, NoiseModel};
use super::{energy_from_outcomes, measure, GroupOutcome, Mode, PauliHamiltonian};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationMatrix {
    /// a_est[i][j] = P(read i | prepared j), row-major.
    pub a_est: [[f64; 4]; 4],
    /// Shots per basis state; `None` for exact probabilities.
    pub shots: Option<u64>,
}

impl CalibrationMatrix {
    pub fn identity() -> CalibrationMatrix {
        let mut a = [[0.0; 4]; 4];
        for (i, row) in a.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        CalibrationMatrix { a_est: a, shots: None }
    }

    pub fn matrix(&self) -> Matrix4<f64> {
        Matrix4::from_fn(|i, j| self.a_est[i][j])
    }
}

/// X gates preparing computational state `b`.
pub(crate) fn prep_circuit(b: usize) -> Vec<Gate> {
    (0..2).filter(|q| b >> q & 1 == 1).map(Gate::X).collect()
}

/// Run the four preparation circuits and record outcome histograms as columns.
pub fn calibrate(noise: &NoiseModel, mode: Mode, rng: &mut ChaCha8Rng) -> CalibrationMatrix {
    let mut a = [[0.0; 4]; 4];
    for b in 0..4 {
        let (p, _) = measure(&prep_circuit(b), noise, mode, rng);
        for i in 0..4 {
            a[i][b] = p[i];
        }
    }
    CalibrationMatrix {
        a_est: a,
        shots: match mode {
            Mode::Exact => None,
            Mode::Shots(c) => Some(c),
        },
    }
}

/// Euclidean projection onto the probability simplex.
fn project_simplex(v: &Vector4<f64>) -> Vector4<f64> {
    let mut u: Vec<f64> = v.iter().copied().collect();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut css = 0.0;
    let mut theta = 0.0;
    for (k, &x) in u.iter().enumerate() {
        css += x;
        let t = (css - 1.0) / (k + 1) as f64;
        if x - t > 0.0 {
            theta = t;
        }
    }
    v.map(|x| (x - theta).max(0.0))
}

/// Solve A p = m for a probability vector p (least squares on the simplex).
pub fn mitigate_probabilities(measured: &[f64; 4], cal: &CalibrationMatrix) -> Result<[f64; 4]> {
    let a = cal.matrix();
    let det = a.determinant();
    if !det.is_finite() || det.abs() < 1e-12 {
        return Err(Error::Vqe("calibration matrix is singular".into()));
    }
    let m = Vector4::from_column_slice(measured);
    let inv = a.try_inverse().ok_or_else(|| Error::Vqe("calibration matrix is singular".into()))?;
    let x = inv * m;
    let s: f64 = x.sum();
    if x.min() >= 0.0 && s > 0.0 {
        let x = x / s;
        return Ok([x[0], x[1], x[2], x[3]]);
    }
    // projected gradient on ‖A p − m‖²
    let ata = a.transpose() * a;
    let atm = a.transpose() * m;
    let lip = 2.0 * ata.norm();
    let mut p = project_simplex(&x);
    for _ in 0..20000 {
        let g = (ata * p - atm) * 2.0;
        let next = project_simplex(&(p - g / lip));
        let done = (next - p).norm() < 1e-15;
        p = next;
        if done {
            break;
        }
    }
    Ok([p[0], p[1], p[2], p[3]])
}

/// Corrected energy from raw per-group outcomes.
pub fn mitigate(ham: &PauliHamiltonian, raw: &[GroupOutcome], cal: &CalibrationMatrix) -> Result<(f64, Vec<GroupOutcome>)> {
    let fixed: Vec<GroupOutcome> = raw
        .iter()
        .map(|o| {
            Ok(GroupOutcome {
                basis: o.basis,
                probs: mitigate_probabilities(&o.probs, cal)?,
                counts: o.counts,
            })
        })
        .collect::<Result<_>>()?;
    let (e, _) = energy_from_outcomes(ham, &fixed)?;
    Ok((e, fixed))
}

//! Two-qubit circuits, the hardware-efficient ansatz, and a density-matrix
//! simulator with gate depolarizing noise and readout confusion.

use nalgebra::{Matrix2, Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use super::pauli::{Basis, Pauli};
use crate::error::{Error, Result};
use crate::lattice::C64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gate {
    Ry(usize, f64),
    Rz(usize, f64),
    X(usize),
    H(usize),
    Sdg(usize),
    /// Controlled-X (control, target).
    Cx(usize, usize),
}

impl Gate {
    pub fn is_two_qubit(&self) -> bool {
        matches!(self, Gate::Cx(..))
    }

    pub fn matrix(&self) -> Matrix4<C64> {
        let c = |v: f64| C64::new(v, 0.0);
        let one = |q: usize, u: Matrix2<C64>| {
            if q == 0 {
                Matrix2::identity().kronecker(&u)
            } else {
                u.kronecker(&Matrix2::identity())
            }
        };
        match *self {
            Gate::Ry(q, t) => {
                let (s, co) = (0.5 * t).sin_cos();
                one(q, Matrix2::new(c(co), c(-s), c(s), c(co)))
            }
            Gate::Rz(q, t) => {
                let e = C64::from_polar(1.0, -0.5 * t);
                one(q, Matrix2::new(e, c(0.0), c(0.0), e.conj()))
            }
            Gate::X(q) => one(q, Pauli::X.matrix()),
            Gate::H(q) => {
                let h = std::f64::consts::FRAC_1_SQRT_2;
                one(q, Matrix2::new(c(h), c(h), c(h), c(-h)))
            }
            Gate::Sdg(q) => one(q, Matrix2::new(c(1.0), c(0.0), c(0.0), C64::new(0.0, -1.0))),
            Gate::Cx(ctl, tgt) => {
                let mut m = Matrix4::zeros();
                for i in 0..4usize {
                    let j = if i >> ctl & 1 == 1 { i ^ (1 << tgt) } else { i };
                    m[(j, i)] = c(1.0);
                }
                m
            }
        }
    }

    fn qubit(&self) -> usize {
        match *self {
            Gate::Ry(q, _) | Gate::Rz(q, _) | Gate::X(q) | Gate::H(q) | Gate::Sdg(q) => q,
            Gate::Cx(_, t) => t,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RotationSet {
    /// RY then RZ on each qubit per layer.
    #[default]
    RyRz,
    /// RY twice per qubit per layer.
    RyOnly,
}

/// Four rotation layers of two rotations per qubit, separated by CX(0,1):
/// 16 angles and 3 CX gates. All-zero angles prepare |00⟩.
#[derive(Clone, Debug, PartialEq)]
pub struct Ansatz {
    pub theta: Vec<f64>,
    pub rotations: RotationSet,
}

pub const ANSATZ_LAYERS: usize = 4;
pub const ANSATZ_PARAMS: usize = 4 * ANSATZ_LAYERS;

impl Ansatz {
    pub fn new(theta: Vec<f64>, rotations: RotationSet) -> Result<Ansatz> {
        if theta.len() != ANSATZ_PARAMS {
            return Err(Error::Shape {
                expected: ANSATZ_PARAMS,
                got: theta.len(),
            });
        }
        Ok(Ansatz { theta, rotations })
    }

    pub fn zeros(rotations: RotationSet) -> Ansatz {
        Ansatz {
            theta: vec![0.0; ANSATZ_PARAMS],
            rotations,
        }
    }

    pub fn gates(&self) -> Vec<Gate> {
        let mut g = Vec::with_capacity(ANSATZ_PARAMS + ANSATZ_LAYERS - 1);
        for l in 0..ANSATZ_LAYERS {
            let t = &self.theta[4 * l..4 * l + 4];
            g.push(Gate::Ry(0, t[0]));
            g.push(Gate::Ry(1, t[1]));
            match self.rotations {
                RotationSet::RyRz => {
                    g.push(Gate::Rz(0, t[2]));
                    g.push(Gate::Rz(1, t[3]));
                }
                RotationSet::RyOnly => {
                    g.push(Gate::Ry(0, t[2]));
                    g.push(Gate::Ry(1, t[3]));
                }
            }
            if l + 1 < ANSATZ_LAYERS {
                g.push(Gate::Cx(0, 1));
            }
        }
        g
    }

    pub fn statevector(&self) -> Vector4<C64> {
        let mut v = Vector4::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        for g in self.gates() {
            v = g.matrix() * v;
        }
        v
    }
}

/// Gates rotating the given measurement basis onto Z.
pub fn basis_change(basis: [Basis; 2]) -> Vec<Gate> {
    let mut g = Vec::new();
    for (q, b) in basis.iter().enumerate() {
        match b {
            Basis::Z => {}
            Basis::X => g.push(Gate::H(q)),
            Basis::Y => {
                g.push(Gate::Sdg(q));
                g.push(Gate::H(q));
            }
        }
    }
    g
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GateCounts {
    pub n1q: u64,
    pub n2q: u64,
    pub nm: u64,
}

pub fn gate_counts(gates: &[Gate]) -> GateCounts {
    let n2q = gates.iter().filter(|g| g.is_two_qubit()).count() as u64;
    GateCounts {
        n1q: gates.len() as u64 - n2q,
        n2q,
        nm: 2,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Column-stochastic: readout[i][j] = P(read i | state j), row-major.
    pub readout: [[f64; 4]; 4],
    pub depol1q: f64,
    pub depol2q: f64,
}

impl NoiseModel {
    pub fn ideal() -> NoiseModel {
        NoiseModel::from_flips([0.0, 0.0], 0.0, 0.0)
    }

    /// Default emulator settings: readout flip 2e-3 per qubit, depolarizing
    /// 1e-4 (1q) and 3e-3 (2q).
    pub fn emulator() -> NoiseModel {
        NoiseModel::from_flips([2e-3, 2e-3], 1e-4, 3e-3)
    }

    /// Independent symmetric readout flips per qubit.
    pub fn from_flips(flip: [f64; 2], depol1q: f64, depol2q: f64) -> NoiseModel {
        let mut a = [[0.0; 4]; 4];
        for (i, row) in a.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                let mut p = 1.0;
                for (q, f) in flip.iter().enumerate() {
                    p *= if (i >> q & 1) == (j >> q & 1) { 1.0 - f } else { *f };
                }
                *v = p;
            }
        }
        NoiseModel {
            readout: a,
            depol1q,
            depol2q,
        }
    }

    pub fn readout_matrix(&self) -> Matrix4<f64> {
        Matrix4::from_fn(|i, j| self.readout[i][j])
    }

    pub fn validate(&self) -> Result<()> {
        for p in [self.depol1q, self.depol2q] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Vqe(format!("depolarizing probability {p} outside [0,1]")));
            }
        }
        for j in 0..4 {
            let s: f64 = (0..4).map(|i| self.readout[i][j]).sum();
            if (s - 1.0).abs() > 1e-12 || (0..4).any(|i| self.readout[i][j] < 0.0) {
                return Err(Error::Vqe(format!("readout column {j} is not a probability vector")));
            }
        }
        Ok(())
    }
}

fn pauli_on(q: usize, p: Pauli) -> Matrix4<C64> {
    if q == 0 {
        Matrix2::identity().kronecker(&p.matrix())
    } else {
        p.matrix().kronecker(&Matrix2::identity())
    }
}

/// ρ → (1−p) ρ + (p/3) Σ_{P∈{X,Y,Z}} P ρ P on qubit q.
fn depolarize_1q(rho: &Matrix4<C64>, q: usize, p: f64) -> Matrix4<C64> {
    let mut out = rho * C64::new(1.0 - p, 0.0);
    for s in [Pauli::X, Pauli::Y, Pauli::Z] {
        let m = pauli_on(q, s);
        out += m * rho * m * C64::new(p / 3.0, 0.0);
    }
    out
}

/// ρ → (1−p) ρ + (p/15) Σ_{P≠II} P ρ P.
fn depolarize_2q(rho: &Matrix4<C64>, p: f64) -> Matrix4<C64> {
    let mut out = rho * C64::new(1.0 - p, 0.0);
    for a in Pauli::ALL {
        for b in Pauli::ALL {
            if a == Pauli::I && b == Pauli::I {
                continue;
            }
            let m = b.matrix().kronecker(&a.matrix());
            out += m * rho * m * C64::new(p / 15.0, 0.0);
        }
    }
    out
}

/// Outcome probabilities (index = 2·bit1 + bit0) after running `gates` on
/// |00⟩ with depolarizing noise after each gate and readout confusion.
pub fn run_probabilities(gates: &[Gate], noise: &NoiseModel) -> [f64; 4] {
    let mut rho: Matrix4<C64> = Matrix4::zeros();
    rho[(0, 0)] = C64::new(1.0, 0.0);
    for g in gates {
        let u = g.matrix();
        rho = u * rho * u.adjoint();
        if g.is_two_qubit() {
            if noise.depol2q > 0.0 {
                rho = depolarize_2q(&rho, noise.depol2q);
            }
        } else if noise.depol1q > 0.0 {
            rho = depolarize_1q(&rho, g.qubit(), noise.depol1q);
        }
    }
    let p = Vector4::from_fn(|i, _| rho[(i, i)].re.max(0.0));
    let m = noise.readout_matrix() * p;
    let s = m.sum();
    [m[0] / s, m[1] / s, m[2] / s, m[3] / s]
}

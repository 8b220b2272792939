//! Two-qubit Pauli operators and the embedding of the singlet 3×3 CI matrix.

use std::fmt;

use nalgebra::{Matrix2, Matrix3, Matrix4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrals::SqHamiltonian;
use crate::lattice::C64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> Matrix2<C64> {
        let o = C64::new(0.0, 0.0);
        let l = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        match self {
            Pauli::I => Matrix2::new(l, o, o, l),
            Pauli::X => Matrix2::new(o, l, l, o),
            Pauli::Y => Matrix2::new(o, -i, i, o),
            Pauli::Z => Matrix2::new(l, o, o, -l),
        }
    }

    fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Measurement axis of one qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    Z,
    X,
    Y,
}

/// c · P1 ⊗ P0, where `ops[0]` acts on qubit 0 (the low bit of the
/// computational index).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliTerm {
    pub ops: [Pauli; 2],
    pub coeff: f64,
}

impl PauliTerm {
    pub fn matrix(&self) -> Matrix4<C64> {
        self.ops[1].matrix().kronecker(&self.ops[0].matrix())
    }

    pub fn is_identity(&self) -> bool {
        self.ops == [Pauli::I, Pauli::I]
    }

    /// Bit mask of qubits carrying a non-identity factor.
    pub fn support(&self) -> usize {
        (self.ops[0] != Pauli::I) as usize | ((self.ops[1] != Pauli::I) as usize) << 1
    }

    /// Basis in which the term is diagonal; idle qubits default to Z.
    pub fn basis(&self) -> [Basis; 2] {
        self.ops.map(|p| match p {
            Pauli::X => Basis::X,
            Pauli::Y => Basis::Y,
            _ => Basis::Z,
        })
    }

    pub fn label(&self) -> String {
        format!("{}{}", self.ops[1].letter(), self.ops[0].letter())
    }
}

impl fmt::Display for PauliTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+.10} {}", self.coeff, self.label())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementGroup {
    pub basis: [Basis; 2],
    /// Indices into `PauliHamiltonian::terms`.
    pub terms: Vec<usize>,
}

impl MeasurementGroup {
    /// Hadamard-type gates needed to rotate into this basis.
    pub fn basis_gates(&self) -> usize {
        self.basis
            .iter()
            .map(|b| match b {
                Basis::Z => 0,
                Basis::X => 1,
                Basis::Y => 2,
            })
            .sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliHamiltonian {
    pub terms: Vec<PauliTerm>,
    pub groups: Vec<MeasurementGroup>,
}

impl PauliHamiltonian {
    /// Decompose a Hermitian 4×4 matrix with real coefficients c_P = Tr(P H)/4,
    /// dropping terms below `drop_tol`.
    pub fn from_matrix(m: &Matrix4<C64>, drop_tol: f64) -> Result<PauliHamiltonian> {
        let mut terms = Vec::new();
        for p1 in Pauli::ALL {
            for p0 in Pauli::ALL {
                let t = PauliTerm {
                    ops: [p0, p1],
                    coeff: 0.0,
                };
                let c = (t.matrix() * m).trace() / 4.0;
                if c.im.abs() > 1e-10 {
                    return Err(Error::Vqe("matrix is not Hermitian".into()));
                }
                if c.re.abs() > drop_tol || t.is_identity() {
                    terms.push(PauliTerm { coeff: c.re, ..t });
                }
            }
        }
        Ok(PauliHamiltonian::new(terms))
    }

    /// Group terms by measurement basis. The all-Z group always exists.
    pub fn new(terms: Vec<PauliTerm>) -> PauliHamiltonian {
        let mut groups: Vec<MeasurementGroup> = vec![MeasurementGroup {
            basis: [Basis::Z, Basis::Z],
            terms: vec![],
        }];
        for (i, t) in terms.iter().enumerate() {
            if t.is_identity() {
                continue;
            }
            let b = t.basis();
            match groups.iter_mut().find(|g| g.basis == b) {
                Some(g) => g.terms.push(i),
                None => groups.push(MeasurementGroup {
                    basis: b,
                    terms: vec![i],
                }),
            }
        }
        groups.retain(|g| !g.terms.is_empty());
        PauliHamiltonian { terms, groups }
    }

    pub fn constant(&self) -> f64 {
        self.terms.iter().filter(|t| t.is_identity()).map(|t| t.coeff).sum()
    }

    pub fn dense(&self) -> Matrix4<C64> {
        self.terms
            .iter()
            .fold(Matrix4::zeros(), |acc, t| acc + t.matrix() * C64::new(t.coeff, 0.0))
    }

    pub fn eigenvalues(&self) -> [f64; 4] {
        let e = self.dense().symmetric_eigen().eigenvalues;
        let mut v = [e[0], e[1], e[2], e[3]];
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn ground_energy(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn to_text(&self) -> String {
        self.terms.iter().map(|t| format!("{t}\n")).collect()
    }
}

/// How the 3-dimensional singlet space sits in the 4 computational states.
#[derive(Clone, Debug)]
pub struct QubitMapping {
    pub pauli: PauliHamiltonian,
    /// Singlet CI matrix over (Ψ_g, Ψ_e, Ψ_m), ion shift included.
    pub ci: Matrix3<f64>,
    /// Columns: the rotated CSFs placed on |01⟩ and |10⟩, in the (Ψ_e, Ψ_m) basis.
    pub rotation: Matrix2<f64>,
    pub embedded: Matrix4<f64>,
}

#[derive(Clone, Debug)]
pub struct MapOptions {
    /// The unused state |11⟩ sits this far above the largest diagonal entry.
    pub penalty_margin: f64,
}

impl Default for MapOptions {
    fn default() -> Self {
        MapOptions { penalty_margin: 0.1 }
    }
}

/// Singlet CI matrix of a two-orbital, two-electron Hamiltonian in the CSF
/// basis Ψ_g = |0 0̄|, Ψ_e = |1 1̄|, Ψ_m = (|0 1̄| + |1 0̄|)/√2.
pub fn singlet_ci_matrix(ham: &SqHamiltonian) -> Result<Matrix3<f64>> {
    if ham.norb != 2 || ham.nelec != 2 {
        return Err(Error::Vqe(format!(
            "qubit mapping needs 2 orbitals and 2 electrons, got {} and {}",
            ham.norb, ham.nelec
        )));
    }
    let basis = crate::fci::enumerate_dets(2, 2, 0)?;
    let h = crate::fci::dense_matrix(ham, &basis)?;
    // det order: (0α,0β), (0α,1β), (1α,0β), (1α,1β)
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let t = nalgebra::Matrix4x3::new(1.0, 0.0, 0.0, 0.0, 0.0, s, 0.0, 0.0, s, 0.0, 1.0, 0.0);
    let hd = Matrix4::from_fn(|i, j| h[(i, j)]);
    Ok(t.transpose() * hd * t + Matrix3::identity() * ham.eshift)
}

/// Embed the singlet CI space into two qubits.
///
/// Ψ_g goes to |00⟩. The (Ψ_e, Ψ_m) block is diagonalized first so the two
/// states on |01⟩ and |10⟩ do not couple; the Pauli expansion then has no
/// XX or YY terms and every term is diagonal in a Z/X measurement basis.
/// |11⟩ is decoupled with energy max(diag) + margin.
pub fn map_to_qubits(ham: &SqHamiltonian, opts: &MapOptions) -> Result<QubitMapping> {
    let ci = singlet_ci_matrix(ham)?;
    let block = Matrix2::new(ci[(1, 1)], ci[(1, 2)], ci[(2, 1)], ci[(2, 2)]);
    let eig = block.symmetric_eigen();
    let mut order = [0usize, 1];
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut rot = Matrix2::from_columns(&[eig.eigenvectors.column(order[0]), eig.eigenvectors.column(order[1])]);
    for k in 0..2 {
        // sign convention: largest component positive
        let c = rot.column(k);
        let big = if c[0].abs() >= c[1].abs() { c[0] } else { c[1] };
        if big < 0.0 {
            rot.set_column(k, &(-c));
        }
    }
    let mut t = Matrix3::zeros();
    t[(0, 0)] = 1.0;
    for i in 0..2 {
        for j in 0..2 {
            t[(1 + i, 1 + j)] = rot[(i, j)];
        }
    }
    let hr = t.transpose() * ci * t;
    let mut emb = Matrix4::zeros();
    for i in 0..3 {
        for j in 0..3 {
            emb[(i, j)] = hr[(i, j)];
        }
    }
    // the rotated e/m block is diagonal up to rounding
    emb[(1, 2)] = 0.0;
    emb[(2, 1)] = 0.0;
    let dmax = (0..3).map(|i| emb[(i, i)]).fold(f64::NEG_INFINITY, f64::max);
    emb[(3, 3)] = dmax + opts.penalty_margin;
    let m = emb.map(|v| C64::new(v, 0.0));
    let pauli = PauliHamiltonian::from_matrix(&m, 1e-14)?;
    Ok(QubitMapping {
        pauli,
        ci,
        rotation: rot,
        embedded: emb,
    })
}

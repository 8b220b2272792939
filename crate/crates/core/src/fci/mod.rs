//! Full CI over a small orbital space.
//!
//! Integrals are spatial; spin enters only through the α/β strings. The
//! σ-vector uses H = Σ k_pq E_pq + ½ Σ (pq|rs) E_pq E_rs with
//! k_pq = h_pq − ½ Σ_r (pr|rq). Hamiltonians must be real.

mod davidson;
mod dets;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::integrals::SqHamiltonian;

pub use davidson::{davidson, DavidsonOptions};
pub use dets::{between_sign, enumerate_dets, single_excitations, strings, DeterminantBasis};

/// Dense eigensolver is used up to this many (symmetry-adapted) states.
pub const DENSE_LIMIT: usize = 2000;

#[derive(Clone, Debug)]
pub struct FciResult {
    /// Ground energy including the ion shift.
    pub e0: f64,
    pub civec: Vec<f64>,
    pub residual: f64,
    pub s2: f64,
    pub basis: DeterminantBasis,
}

/// Real integral tables in dense row-major layout.
#[derive(Clone, Debug)]
pub struct RealIntegrals {
    pub n: usize,
    pub h1: Vec<f64>,
    pub h2: Vec<f64>,
    pub k: Vec<f64>,
    pub eshift: f64,
}

/// Largest imaginary integral part the real solver will drop.
pub const IMAG_TOL: f64 = 1e-6;

impl RealIntegrals {
    pub fn new(ham: &SqHamiltonian) -> Result<RealIntegrals> {
        // For a real eigenvector an antisymmetric imaginary part only enters
        // at second order, so rounding-level residue is dropped.
        let im = ham.max_imag();
        if im > IMAG_TOL {
            return Err(Error::Fci(format!("complex Hamiltonian (max imaginary part {im:.2e})")));
        }
        let n = ham.norb;
        let mut h1 = vec![0.0; n * n];
        let mut h2 = vec![0.0; n * n * n * n];
        for p in 0..n {
            for q in 0..n {
                h1[p * n + q] = ham.h1(p, q).re;
                for r in 0..n {
                    for s in 0..n {
                        h2[((p * n + q) * n + r) * n + s] = ham.h2(p, q, r, s).re;
                    }
                }
            }
        }
        let mut k = h1.clone();
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    k[p * n + q] -= 0.5 * h2[((p * n + r) * n + r) * n + q];
                }
            }
        }
        Ok(RealIntegrals {
            n,
            h1,
            h2,
            k,
            eshift: ham.eshift,
        })
    }

    #[inline]
    pub fn g(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        let n = self.n;
        self.h2[((p * n + q) * n + r) * n + s]
    }
}

/// Applies H (without the ion shift) to CI vectors.
pub struct Sigma<'a> {
    pub ints: &'a RealIntegrals,
    pub basis: &'a DeterminantBasis,
    alpha_ex: Vec<Vec<(usize, usize, usize, f64)>>,
    beta_ex: Vec<Vec<(usize, usize, usize, f64)>>,
}

fn excitation_table(strs: &[u64], norb: usize) -> Vec<Vec<(usize, usize, usize, f64)>> {
    strs.iter()
        .map(|&s| {
            single_excitations(s, norb)
                .into_iter()
                .map(|(p, q, t, sg)| (p, q, strs.binary_search(&t).expect("string in list"), sg))
                .collect()
        })
        .collect()
}

impl<'a> Sigma<'a> {
    pub fn new(ints: &'a RealIntegrals, basis: &'a DeterminantBasis) -> Self {
        Sigma {
            ints,
            basis,
            alpha_ex: excitation_table(&basis.alpha, basis.norb),
            beta_ex: excitation_table(&basis.beta, basis.norb),
        }
    }

    /// t = E_pq c for every pq, stored as t[pq][det].
    fn e_all(&self, c: &[f64]) -> Vec<Vec<f64>> {
        let n = self.basis.norb;
        let nb = self.basis.beta.len();
        let mut t = vec![vec![0.0; c.len()]; n * n];
        for (ia, exa) in self.alpha_ex.iter().enumerate() {
            for ib in 0..nb {
                let ci = c[ia * nb + ib];
                if ci == 0.0 {
                    continue;
                }
                for &(p, q, ja, sg) in exa {
                    t[p * n + q][ja * nb + ib] += sg * ci;
                }
                for &(p, q, jb, sg) in &self.beta_ex[ib] {
                    t[p * n + q][ia * nb + jb] += sg * ci;
                }
            }
        }
        t
    }

    /// y += Σ_pq E_pq x_pq.
    fn e_apply_add(&self, x: &[Vec<f64>], y: &mut [f64]) {
        let n = self.basis.norb;
        let nb = self.basis.beta.len();
        for (ia, exa) in self.alpha_ex.iter().enumerate() {
            for ib in 0..nb {
                let src = ia * nb + ib;
                for &(p, q, ja, sg) in exa {
                    y[ja * nb + ib] += sg * x[p * n + q][src];
                }
                for &(p, q, jb, sg) in &self.beta_ex[ib] {
                    y[ia * nb + jb] += sg * x[p * n + q][src];
                }
            }
        }
    }

    pub fn apply(&self, c: &[f64]) -> Vec<f64> {
        let n = self.basis.norb;
        let ints = self.ints;
        let t = self.e_all(c);
        // x_pq = k_pq c + ½ Σ_rs (pq|rs) E_rs c; σ = Σ_pq E_pq x_pq
        let x: Vec<Vec<f64>> = (0..n * n)
            .into_par_iter()
            .map(|pq| {
                let mut v: Vec<f64> = c.iter().map(|ci| ints.k[pq] * ci).collect();
                for rs in 0..n * n {
                    let g = 0.5 * ints.h2[pq * n * n + rs];
                    if g != 0.0 {
                        for (vi, ti) in v.iter_mut().zip(&t[rs]) {
                            *vi += g * ti;
                        }
                    }
                }
                v
            })
            .collect();
        let mut y = vec![0.0; c.len()];
        self.e_apply_add(&x, &mut y);
        y
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.basis.len())
            .into_par_iter()
            .map(|i| {
                let (a, b) = self.basis.det(i);
                slater_condon(self.ints, self.basis.norb, (a, b), (a, b))
            })
            .collect()
    }
}

/// H·c without the ion shift.
pub fn apply_h(ham: &SqHamiltonian, basis: &DeterminantBasis, c: &[f64]) -> Result<Vec<f64>> {
    if c.len() != basis.len() {
        return Err(Error::Shape {
            expected: basis.len(),
            got: c.len(),
        });
    }
    let ints = RealIntegrals::new(ham)?;
    Ok(Sigma::new(&ints, basis).apply(c))
}

fn spin_orbital_string(norb: usize, d: (u64, u64)) -> u128 {
    (d.0 as u128) | ((d.1 as u128) << norb)
}

/// Sign from applying a_k (or a†_k) to the spin-orbital string `s`.
fn op_sign(s: u128, k: usize) -> f64 {
    if (s & ((1u128 << k) - 1)).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// ⟨I|H|J⟩ (without ion shift) by Slater–Condon rules over spin orbitals
/// ordered α0..α(n−1), β0..β(n−1).
pub fn slater_condon(ints: &RealIntegrals, norb: usize, di: (u64, u64), dj: (u64, u64)) -> f64 {
    let si = spin_orbital_string(norb, di);
    let sj = spin_orbital_string(norb, dj);
    let diff = si ^ sj;
    let ndiff = diff.count_ones();
    if ndiff > 4 {
        return 0.0;
    }
    let spatial = |k: usize| k % norb;
    let spin = |k: usize| k / norb;
    let h = |a: usize, b: usize| if spin(a) == spin(b) { ints.h1[spatial(a) * norb + spatial(b)] } else { 0.0 };
    // physicist ⟨ab|cd⟩ = (ac|bd) with spin deltas
    let phys = |a: usize, b: usize, c: usize, d: usize| {
        if spin(a) == spin(c) && spin(b) == spin(d) {
            ints.g(spatial(a), spatial(c), spatial(b), spatial(d))
        } else {
            0.0
        }
    };
    let anti = |a, b, c, d| phys(a, b, c, d) - phys(a, b, d, c);
    let occ: Vec<usize> = (0..2 * norb).filter(|&k| sj >> k & 1 == 1).collect();
    match ndiff {
        0 => {
            let mut e = 0.0;
            for &i in &occ {
                e += h(i, i);
                for &j in &occ {
                    e += 0.5 * anti(i, j, i, j);
                }
            }
            e
        }
        2 => {
            let m = (sj & !si).trailing_zeros() as usize;
            let p = (si & !sj).trailing_zeros() as usize;
            let mut sg = op_sign(sj, m);
            let t = sj & !(1u128 << m);
            sg *= op_sign(t, p);
            let mut v = h(p, m);
            for &k in &occ {
                if k != m {
                    v += anti(p, k, m, k);
                }
            }
            sg * v
        }
        4 => {
            let holes = sj & !si;
            let parts = si & !sj;
            let m = holes.trailing_zeros() as usize;
            let n = (holes & !(1u128 << m)).trailing_zeros() as usize;
            let p = parts.trailing_zeros() as usize;
            let q = (parts & !(1u128 << p)).trailing_zeros() as usize;
            // a†_p a†_q a_n a_m |J⟩
            let mut s = sj;
            let mut sg = op_sign(s, m);
            s &= !(1u128 << m);
            sg *= op_sign(s, n);
            s &= !(1u128 << n);
            sg *= op_sign(s, q);
            s |= 1u128 << q;
            sg *= op_sign(s, p);
            sg * anti(p, q, m, n)
        }
        _ => 0.0,
    }
}

/// Full Hamiltonian matrix (without ion shift) over the determinant basis.
pub fn dense_matrix(ham: &SqHamiltonian, basis: &DeterminantBasis) -> Result<DMatrix<f64>> {
    let ints = RealIntegrals::new(ham)?;
    Ok(dense_from(&ints, basis))
}

fn dense_from(ints: &RealIntegrals, basis: &DeterminantBasis) -> DMatrix<f64> {
    let d = basis.dets();
    let n = d.len();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| (0..n).map(|j| slater_condon(ints, basis.norb, d[i], d[j])).collect())
        .collect();
    DMatrix::from_fn(n, n, |i, j| rows[i][j])
}

/// Orthonormal columns spanning the α↔β symmetric subspace.
pub fn symmetric_isometry(basis: &DeterminantBasis) -> DMatrix<f64> {
    let n = basis.len();
    let mut cols: Vec<Vec<(usize, f64)>> = Vec::new();
    for i in 0..n {
        let t = basis.transpose_index(i);
        if t == i {
            cols.push(vec![(i, 1.0)]);
        } else if i < t {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            cols.push(vec![(i, s), (t, s)]);
        }
    }
    let mut u = DMatrix::zeros(n, cols.len());
    for (k, c) in cols.iter().enumerate() {
        for &(i, v) in c {
            u[(i, k)] = v;
        }
    }
    u
}

/// ⟨S²⟩ = ‖S₊c‖² + Sz(Sz+1).
pub fn spin_squared(basis: &DeterminantBasis, c: &[f64]) -> f64 {
    let norb = basis.norb;
    let mut out: std::collections::HashMap<(u64, u64), f64> = std::collections::HashMap::new();
    for (i, &ci) in c.iter().enumerate() {
        if ci == 0.0 {
            continue;
        }
        let (a, b) = basis.det(i);
        let s = spin_orbital_string(norb, (a, b));
        for p in 0..norb {
            if b >> p & 1 == 1 && a >> p & 1 == 0 {
                // a†_{pα} a_{pβ}
                let kb = norb + p;
                let mut sg = op_sign(s, kb);
                let t = s & !(1u128 << kb);
                sg *= op_sign(t, p);
                *out.entry((a | 1 << p, b & !(1 << p))).or_insert(0.0) += sg * ci;
            }
        }
    }
    let sz = basis.two_sz() as f64 / 2.0;
    out.values().map(|v| v * v).sum::<f64>() + sz * (sz + 1.0)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Lowest eigenpair with the default sector: Sz = 0 (or ½) and, for even
/// electron counts, the α↔β symmetric (singlet-containing) subspace.
pub fn solve_ground(ham: &SqHamiltonian) -> Result<FciResult> {
    let two_sz = (ham.nelec % 2) as i32;
    let mut basis = enumerate_dets(ham.norb, ham.nelec, two_sz)?;
    basis.singlet = basis.symmetric_ok();
    solve_in(ham, &basis, &DavidsonOptions::default())
}

pub fn solve_in(ham: &SqHamiltonian, basis: &DeterminantBasis, opts: &DavidsonOptions) -> Result<FciResult> {
    if basis.is_empty() {
        return Err(Error::Fci("empty determinant basis".into()));
    }
    if basis.norb != ham.norb || basis.nelec != ham.nelec {
        return Err(Error::Fci("determinant basis does not match the Hamiltonian".into()));
    }
    let ints = RealIntegrals::new(ham)?;
    let sigma = Sigma::new(&ints, basis);
    let sym = basis.singlet && basis.symmetric_ok();
    let dim = if sym {
        let n = basis.alpha.len();
        n * (n + 1) / 2
    } else {
        basis.len()
    };
    let (e, c) = if dim <= DENSE_LIMIT && !opts.force_iterative {
        dense_ground(&ints, basis, sym)
    } else {
        davidson(&sigma, basis, sym, opts)?
    };
    let hc = sigma.apply(&c);
    let r: Vec<f64> = hc.iter().zip(&c).map(|(h, x)| h - e * x).collect();
    let residual = norm(&r);
    let s2 = spin_squared(basis, &c);
    Ok(FciResult {
        e0: e + ints.eshift,
        civec: c,
        residual,
        s2,
        basis: basis.clone(),
    })
}

fn dense_ground(ints: &RealIntegrals, basis: &DeterminantBasis, sym: bool) -> (f64, Vec<f64>) {
    let h = dense_from(ints, basis);
    let (hm, u) = if sym {
        let u = symmetric_isometry(basis);
        (u.transpose() * &h * &u, Some(u))
    } else {
        (h, None)
    };
    let eig = hm.symmetric_eigen();
    let k = eig.eigenvalues.imin();
    let v: DVector<f64> = eig.eigenvectors.column(k).into();
    let mut c: Vec<f64> = match u {
        Some(u) => (u * v).iter().copied().collect(),
        None => v.iter().copied().collect(),
    };
    fix_sign(&mut c);
    (eig.eigenvalues[k], c)
}

/// Largest-magnitude coefficient made positive.
pub(crate) fn fix_sign(c: &mut [f64]) {
    let k = (0..c.len()).max_by(|&a, &b| c[a].abs().total_cmp(&c[b].abs())).unwrap_or(0);
    if c.get(k).copied().unwrap_or(0.0) < 0.0 {
        for x in c.iter_mut() {
            *x = -*x;
        }
    }
}

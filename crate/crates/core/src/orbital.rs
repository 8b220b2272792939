//! Plane-wave orbitals stored on the basis G-vectors with Σ_G |ψ(G)|² = 1.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::lattice::{PwBasis, C64};

#[derive(Clone, Debug, PartialEq)]
pub struct Orbital {
    pub coeffs: Vec<C64>,
}

impl Orbital {
    pub fn zeros(n: usize) -> Orbital {
        Orbital {
            coeffs: vec![C64::new(0.0, 0.0); n],
        }
    }

    pub fn new(coeffs: Vec<C64>) -> Orbital {
        Orbital { coeffs }
    }

    /// Single normalized plane wave at basis index `idx`.
    pub fn plane_wave(basis: &PwBasis, idx: usize) -> Orbital {
        let mut o = Orbital::zeros(basis.len());
        o.coeffs[idx] = C64::new(1.0, 0.0);
        o
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// ⟨self|other⟩ = Σ_G self*(G) other(G).
    pub fn dot(&self, other: &Orbital) -> C64 {
        dot(&self.coeffs, &other.coeffs)
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) -> f64 {
        let n = self.norm();
        if n > 0.0 {
            let s = 1.0 / n;
            for c in &mut self.coeffs {
                *c *= s;
            }
        }
        n
    }

    pub fn axpy(&mut self, a: C64, x: &Orbital) {
        axpy(&mut self.coeffs, a, &x.coeffs);
    }

    pub fn scale(&mut self, a: f64) {
        for c in &mut self.coeffs {
            *c *= a;
        }
    }

    /// Enforce ψ(−G) = conj ψ(G), i.e. a real function in real space.
    pub fn make_real(&mut self, basis: &PwBasis) {
        make_real(&mut self.coeffs, basis);
    }

    pub fn is_real(&self, basis: &PwBasis, tol: f64) -> bool {
        basis
            .neg
            .iter()
            .enumerate()
            .all(|(i, &j)| (self.coeffs[i] - self.coeffs[j].conj()).norm() <= tol)
    }
}

pub fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn axpy(y: &mut [C64], a: C64, x: &[C64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

pub fn make_real(c: &mut [C64], basis: &PwBasis) {
    for (i, &j) in basis.neg.iter().enumerate() {
        if i < j {
            let v = 0.5 * (c[i] + c[j].conj());
            c[i] = v;
            c[j] = v.conj();
        } else if i == j {
            c[i] = C64::new(c[i].re, 0.0);
        }
    }
}

/// Remove components along each (orthonormal) constraint vector.
pub fn project_out(v: &mut [C64], constraints: &[Orbital]) {
    for c in constraints {
        let s = dot(&c.coeffs, v);
        axpy(v, -s, &c.coeffs);
    }
}

/// Modified Gram–Schmidt of `orbs` against fixed orthonormal `constraints`
/// and among themselves. Each vector is projected twice for stability.
pub fn gram_schmidt(orbs: &mut [Orbital], constraints: &[Orbital]) -> Result<()> {
    for i in 0..orbs.len() {
        let (done, rest) = orbs.split_at_mut(i);
        let v = &mut rest[0];
        for _ in 0..2 {
            project_out(&mut v.coeffs, constraints);
            project_out(&mut v.coeffs, done);
        }
        if v.normalize() < 1e-12 {
            return Err(Error::LinAlg("Gram-Schmidt hit a linearly dependent vector".into()));
        }
    }
    Ok(())
}

/// max |⟨i|j⟩ − δ_ij| over the set.
pub fn orthonormality_error(orbs: &[Orbital]) -> f64 {
    let mut e: f64 = 0.0;
    for (i, a) in orbs.iter().enumerate() {
        for (j, b) in orbs.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            e = e.max((a.dot(b) - target).norm());
        }
    }
    e
}

/// Seeded random orbitals with a Gaussian envelope e^{-|G|²/4}, orthonormalized.
/// Largest out-of-real weight accepted by `real_gauge` in the solvers.
pub const GAUGE_TOL: f64 = 1e-10;

/// Replace `orbs` by a real orthonormal basis (ψ(−G) = conj ψ(G)) of the
/// same span when that span is closed under complex conjugation; a single
/// orbital just gets its global phase removed. Returns the weight of the
/// span lying outside any real n-dimensional subspace; when that exceeds
/// `tol` the orbitals are left untouched.
pub fn real_gauge(orbs: &mut [Orbital], basis: &PwBasis, tol: f64) -> f64 {
    let n = orbs.len();
    if n == 0 {
        return 0.0;
    }
    let half = C64::new(0.5, 0.0);
    let mut parts: Vec<Vec<C64>> = Vec::with_capacity(2 * n);
    for o in orbs.iter() {
        let kc: Vec<C64> = basis.neg.iter().map(|&j| o.coeffs[j].conj()).collect();
        parts.push(o.coeffs.iter().zip(&kc).map(|(c, k)| (c + k) * half).collect());
        parts.push(o.coeffs.iter().zip(&kc).map(|(c, k)| (c - k) * C64::new(0.0, -0.5)).collect());
    }
    let m = parts.len();
    let gram = nalgebra::DMatrix::from_fn(m, m, |a, b| dot(&parts[a], &parts[b]).re);
    let eig = gram.symmetric_eigen();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let leftover: f64 = order[n..].iter().map(|&k| eig.eigenvalues[k].max(0.0)).sum();
    if leftover > tol || eig.eigenvalues[order[n - 1]] <= 0.0 {
        return leftover;
    }
    for (o, &k) in orbs.iter_mut().zip(&order[..n]) {
        let w = 1.0 / eig.eigenvalues[k].sqrt();
        let mut c = vec![C64::new(0.0, 0.0); basis.len()];
        for (a, v) in parts.iter().enumerate() {
            axpy(&mut c, C64::new(eig.eigenvectors[(a, k)] * w, 0.0), v);
        }
        make_real(&mut c, basis);
        o.coeffs = c;
    }
    leftover
}

pub fn random_orbitals(
    basis: &PwBasis,
    count: usize,
    seed: u64,
    real: bool,
    constraints: &[Orbital],
) -> Result<Vec<Orbital>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let coeffs = basis
            .g2
            .iter()
            .map(|&g2| {
                let env = (-g2 / 4.0).exp();
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                C64::new(re, im) * env
            })
            .collect();
        let mut o = Orbital::new(coeffs);
        if real {
            o.make_real(basis);
        }
        out.push(o);
    }
    gram_schmidt(&mut out, constraints)?;
    Ok(out)
}

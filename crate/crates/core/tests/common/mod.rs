//! Shared fixtures and brute-force reference implementations for the
//! integration tests. Nothing here goes through the FFT, the term tables or
//! the FCI string machinery.

#![allow(dead_code)]

pub mod fd;
pub mod lattice_sums;

use std::collections::HashMap;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64 as C64;
use pwcovo::integrals::{Context, ContextOptions};
use pwcovo::lattice::{build_basis_with, BasisOptions, Cell, PwBasis};
use pwcovo::orbital::{random_orbitals, Orbital};
use pwcovo::pseudopot::{hgh, StructureAtoms};

/// Li + H in a 6 bohr cube at 3.5 Ry: 27 plane waves on an 8³ mesh.
pub fn toy_basis() -> PwBasis {
    let cell = Cell::cubic(6.0).unwrap();
    build_basis_with(
        &cell,
        3.5,
        &BasisOptions {
            mesh: Some([8, 8, 8]),
            ..BasisOptions::default()
        },
    )
    .unwrap()
}

pub fn toy_context(real: bool) -> Context {
    let st = StructureAtoms::new(vec![
        ("Li".into(), Vector3::new(0.31, 0.52, 0.47)),
        ("H".into(), Vector3::new(0.66, 0.43, 0.58)),
    ]);
    let opts = ContextOptions {
        real_orbitals: real,
        ..ContextOptions::default()
    };
    Context::new(toy_basis(), st, vec![hgh::lithium(), hgh::hydrogen()], opts).unwrap()
}

/// `count` orthonormal orbitals with every plane wave populated.
pub fn toy_orbitals(ctx: &Context, count: usize, seed: u64) -> Vec<Orbital> {
    random_orbitals(&ctx.basis, count, seed, ctx.real_mode(), &[]).unwrap()
}

/// ρ_pq(G) = Σ_G′ ψ_p*(G′) ψ_q(G′+G) by direct convolution.
pub fn conv_density(basis: &PwBasis, p: &Orbital, q: &Orbital) -> HashMap<[i32; 3], C64> {
    let mut out: HashMap<[i32; 3], C64> = HashMap::new();
    for (i, gi) in basis.gvecs.iter().enumerate() {
        for (j, gj) in basis.gvecs.iter().enumerate() {
            let g = [gj[0] - gi[0], gj[1] - gi[1], gj[2] - gi[2]];
            *out.entry(g).or_default() += p.coeffs[i].conj() * q.coeffs[j];
        }
    }
    out
}

pub fn mesh_slot(basis: &PwBasis, g: [i32; 3]) -> usize {
    let w = |v: i32, n: usize| v.rem_euclid(n as i32) as usize;
    let [n0, n1, n2] = basis.mesh;
    (w(g[0], n0) * n1 + w(g[1], n1)) * n2 + w(g[2], n2)
}

/// (pq|rs) = (1/Ω) Σ_G K(G) ρ_pq(−G) ρ_rs(G) with densities from convolution.
pub fn eri(basis: &PwBasis, kernel: &[f64], pq: &HashMap<[i32; 3], C64>, rs: &HashMap<[i32; 3], C64>) -> C64 {
    let mut s = C64::new(0.0, 0.0);
    for (g, v) in rs {
        if let Some(w) = pq.get(&[-g[0], -g[1], -g[2]]) {
            s += kernel[mesh_slot(basis, *g)] * w * v;
        }
    }
    s / basis.cell.omega
}

/// Spatial integrals with the kernel rule and the self-exchange diagonal.
pub struct OracleIntegrals {
    pub n: usize,
    pub h: Vec<C64>,
    pub d: Vec<f64>,
    pub g: Vec<C64>,
}

impl OracleIntegrals {
    pub fn new(ctx: &Context, orbs: &[Orbital]) -> OracleIntegrals {
        let n = orbs.len();
        let b = &ctx.basis;
        let rho: Vec<Vec<HashMap<[i32; 3], C64>>> = orbs
            .iter()
            .map(|p| orbs.iter().map(|q| conv_density(b, p, q)).collect())
            .collect();
        let mut h = vec![C64::new(0.0, 0.0); n * n];
        for p in 0..n {
            for q in 0..n {
                h[p * n + q] = ctx.one_electron(&orbs[p], &orbs[q]);
            }
        }
        let mut g = vec![C64::new(0.0, 0.0); n * n * n * n];
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    for s in 0..n {
                        let k = if p == q || r == s { &ctx.hartree } else { &ctx.screened };
                        g[((p * n + q) * n + r) * n + s] = eri(b, &k.values, &rho[p][q], &rho[r][s]);
                    }
                }
            }
        }
        let d = (0..n)
            .map(|p| {
                let bare = eri(b, &ctx.hartree.values, &rho[p][p], &rho[p][p]).re;
                let scr = eri(b, &ctx.screened.values, &rho[p][p], &rho[p][p]).re;
                0.5 * (bare - scr)
            })
            .collect();
        OracleIntegrals { n, h, d, g }
    }

    pub fn h(&self, p: usize, q: usize) -> C64 {
        self.h[p * self.n + q]
    }

    pub fn g(&self, p: usize, q: usize, r: usize, s: usize) -> C64 {
        let n = self.n;
        self.g[((p * n + q) * n + r) * n + s]
    }
}

/// A many-electron state over spin orbitals 2p+σ (σ = 0 for α, 1 for β),
/// stored as occupation bitmask → amplitude in canonical (ascending) order.
pub type State = HashMap<u64, C64>;

pub fn so(p: usize, beta: bool) -> usize {
    2 * p + beta as usize
}

/// Apply a†_i (create) or a_i to a canonical determinant.
fn ladder(det: u64, i: usize, create: bool) -> Option<(f64, u64)> {
    let occ = det >> i & 1 == 1;
    if occ == create {
        return None;
    }
    let below = (det & ((1u64 << i) - 1)).count_ones();
    let sign = if below.is_multiple_of(2) { 1.0 } else { -1.0 };
    Some((sign, det ^ (1u64 << i)))
}

/// Operator string applied right to left: ops[0] acts last.
pub fn apply_ops(ops: &[(usize, bool)], state: &State) -> State {
    let mut out = State::new();
    for (&det, &amp) in state {
        let mut d = det;
        let mut sign = 1.0;
        let mut alive = true;
        for &(i, create) in ops.iter().rev() {
            match ladder(d, i, create) {
                Some((s, nd)) => {
                    sign *= s;
                    d = nd;
                }
                None => {
                    alive = false;
                    break;
                }
            }
        }
        if alive {
            *out.entry(d).or_default() += amp * sign;
        }
    }
    out
}

/// |s_1 s_2 …| = a†_{s_1} a†_{s_2} … |0⟩ for spin orbitals listed in order.
pub fn determinant(list: &[usize]) -> State {
    let vac: State = [(0u64, C64::new(1.0, 0.0))].into_iter().collect();
    let ops: Vec<(usize, bool)> = list.iter().map(|&i| (i, true)).collect();
    apply_ops(&ops, &vac)
}

pub fn add(a: &State, b: &State, ca: f64, cb: f64) -> State {
    let mut out = State::new();
    for (k, v) in a {
        *out.entry(*k).or_default() += v * ca;
    }
    for (k, v) in b {
        *out.entry(*k).or_default() += v * cb;
    }
    out
}

pub fn braket(a: &State, b: &State) -> C64 {
    b.iter()
        .map(|(k, v)| a.get(k).map_or(C64::new(0.0, 0.0), |w| w.conj() * v))
        .sum()
}

/// One-body part Σ h_pq a†_pσ a_qσ applied to `state`.
pub fn one_body(ints: &OracleIntegrals, state: &State) -> State {
    let mut out = State::new();
    for p in 0..ints.n {
        for q in 0..ints.n {
            for beta in [false, true] {
                let t = apply_ops(&[(so(p, beta), true), (so(q, beta), false)], state);
                for (k, v) in t {
                    *out.entry(k).or_default() += ints.h(p, q) * v;
                }
            }
        }
    }
    out
}

/// ½ Σ (pq|rs) a†_pσ a†_rτ a_sτ a_qσ + Σ d_p n_pσ applied to `state`.
pub fn two_body(ints: &OracleIntegrals, state: &State) -> State {
    let n = ints.n;
    let mut out = State::new();
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    let g = ints.g(p, q, r, s);
                    for sig in [false, true] {
                        for tau in [false, true] {
                            let ops = [
                                (so(p, sig), true),
                                (so(r, tau), true),
                                (so(s, tau), false),
                                (so(q, sig), false),
                            ];
                            for (k, v) in apply_ops(&ops, state) {
                                *out.entry(k).or_default() += 0.5 * g * v;
                            }
                        }
                    }
                }
            }
        }
    }
    for p in 0..n {
        for beta in [false, true] {
            for (k, v) in apply_ops(&[(so(p, beta), true), (so(p, beta), false)], state) {
                *out.entry(k).or_default() += ints.d[p] * v;
            }
        }
    }
    out
}

/// The three singlet configurations over orbitals 0..n−1 filled, n virtual.
pub fn singlet_csfs(nfilled: usize) -> [State; 3] {
    let a = nfilled - 1;
    let e = nfilled;
    let core: Vec<usize> = (0..a).flat_map(|c| [so(c, false), so(c, true)]).collect();
    let with = |extra: &[usize]| {
        let mut l = core.clone();
        l.extend_from_slice(extra);
        determinant(&l)
    };
    let g = with(&[so(a, false), so(a, true)]);
    let ee = with(&[so(e, false), so(e, true)]);
    let m1 = with(&[so(a, false), so(e, true)]);
    let m2 = with(&[so(e, false), so(a, true)]);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [g, ee, add(&m1, &m2, s, s)]
}

/// Reference H1 and H2 over the singlet configurations.
pub fn oracle_elements(ctx: &Context, filled: &[Orbital], psi_e: &Orbital) -> (Matrix3<C64>, Matrix3<C64>) {
    let mut orbs = filled.to_vec();
    orbs.push(psi_e.clone());
    let ints = OracleIntegrals::new(ctx, &orbs);
    let csf = singlet_csfs(filled.len());
    let h1 = Matrix3::from_fn(|x, y| braket(&csf[x], &one_body(&ints, &csf[y])));
    let h2 = Matrix3::from_fn(|x, y| braket(&csf[x], &two_body(&ints, &csf[y])));
    (h1, h2)
}

/// Determinant-space Hamiltonian (including the ion shift) over all states
/// with `nelec` electrons and zero spin projection.
pub fn oracle_fci_matrix(ints: &OracleIntegrals, nelec: usize, eshift: f64) -> (Vec<u64>, nalgebra::DMatrix<C64>) {
    let nso = 2 * ints.n;
    let dets: Vec<u64> = (0u64..1 << nso)
        .filter(|d| {
            let a = (0..ints.n).filter(|p| d >> (2 * p) & 1 == 1).count();
            let b = (0..ints.n).filter(|p| d >> (2 * p + 1) & 1 == 1).count();
            a + b == nelec && a == b
        })
        .collect();
    let m = nalgebra::DMatrix::from_fn(dets.len(), dets.len(), |i, j| {
        let ket: State = [(dets[j], C64::new(1.0, 0.0))].into_iter().collect();
        let hk = add(&one_body(ints, &ket), &two_body(ints, &ket), 1.0, 1.0);
        let v = hk.get(&dets[i]).copied().unwrap_or_default();
        if i == j {
            v + eshift
        } else {
            v
        }
    });
    (dets, m)
}

pub fn max_abs_diff(a: &Matrix3<C64>, b: &Matrix3<C64>) -> f64 {
    (a - b).iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Property-test settings without on-disk regression files.
pub fn prop_cases(cases: u32) -> proptest::test_runner::Config {
    proptest::test_runner::Config {
        cases,
        failure_persistence: None,
        ..proptest::test_runner::Config::default()
    }
}

/// Random real Hamiltonian with h2 = Σ_L B^L_pq B^L_rs (8-fold symmetric,
/// positive semidefinite) and a diagonal-dominated h1.
pub fn random_hamiltonian(norb: usize, nelec: usize, seed: u64) -> pwcovo::integrals::SqHamiltonian {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut ham = pwcovo::integrals::SqHamiltonian::zeros(norb, nelec);
    let c = |v: f64| C64::new(v, 0.0);
    for p in 0..norb {
        ham.set_h1(p, p, c(-1.0 + 0.3 * p as f64 + 0.1 * rng.gen::<f64>()));
        for q in 0..p {
            let v = 0.1 * (rng.gen::<f64>() - 0.5);
            ham.set_h1(p, q, c(v));
            ham.set_h1(q, p, c(v));
        }
    }
    let nl = norb + 2;
    let mut b = vec![vec![0.0; norb * norb]; nl];
    for bl in b.iter_mut() {
        for p in 0..norb {
            for q in 0..=p {
                let v = if p == q { 0.5 * rng.gen::<f64>() } else { 0.15 * (rng.gen::<f64>() - 0.5) };
                bl[p * norb + q] = v;
                bl[q * norb + p] = v;
            }
        }
    }
    for p in 0..norb {
        for q in 0..norb {
            for r in 0..norb {
                for s in 0..norb {
                    let v: f64 = b.iter().map(|bl| bl[p * norb + q] * bl[r * norb + s]).sum();
                    ham.set_h2(p, q, r, s, c(v));
                }
            }
        }
    }
    ham.eshift = 0.25;
    ham
}

/// Oracle integral tables taken verbatim from a Hamiltonian (no d_p split).
pub fn oracle_from_hamiltonian(ham: &pwcovo::integrals::SqHamiltonian) -> OracleIntegrals {
    let n = ham.norb;
    let mut h = Vec::with_capacity(n * n);
    for p in 0..n {
        for q in 0..n {
            h.push(ham.h1(p, q));
        }
    }
    let mut g = Vec::with_capacity(n * n * n * n);
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    g.push(ham.h2(p, q, r, s));
                }
            }
        }
    }
    OracleIntegrals { n, h, d: vec![0.0; n], g }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

pub fn data_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

/// The shipped two-orbital LiH Hamiltonian (R = 1.6 Å, one COVO).
pub fn lih_two_orbital() -> pwcovo::integrals::SqHamiltonian {
    pwcovo::integrals::SqHamiltonian::read_fcidump(&data_path("lih_1covo.fcidump")).unwrap()
}

//! Matrix elements of H between the three singlet configurations
//!
//! Ψ_g = |c c̄ … a ā|, Ψ_e = |c c̄ … e ē|, Ψ_m = (|… a ē| + |… e ā|)/√2
//!
//! where c runs over the first N−1 filled orbitals, a is the N-th filled
//! orbital and e the virtual. Every element is a short list of one- and
//! two-electron integrals, so values and ψ_e* derivatives come from the same
//! term table.

use std::collections::HashMap;

use nalgebra::Matrix3;

use crate::integrals::{Context, PairDensity};
use crate::lattice::C64;
use crate::orbital::Orbital;

pub const G: usize = 0;
pub const E: usize = 1;
pub const M: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) enum Kern {
    Bare,
    Screened,
}

/// Kernel selection for (pq|rs): bare with a diagonal pair, V_f otherwise.
fn rule(p: usize, q: usize, r: usize, s: usize) -> Kern {
    if p == q || r == s {
        Kern::Bare
    } else {
        Kern::Screened
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) enum Term {
    /// c · h_pq
    One(f64, usize, usize),
    /// c · (pq|rs)_K
    Two(f64, [usize; 4], Kern),
    /// c · ½[(pp|pp)_bare − (pp|pp)_f]
    SelfX(f64, usize),
}

struct Terms {
    t: Vec<Term>,
}

impl Terms {
    fn one(&mut self, c: f64, p: usize, q: usize) {
        self.t.push(Term::One(c, p, q));
    }
    fn two(&mut self, c: f64, p: usize, q: usize, r: usize, s: usize) {
        self.t.push(Term::Two(c, [p, q, r, s], rule(p, q, r, s)));
    }
    fn two_k(&mut self, c: f64, p: usize, q: usize, r: usize, s: usize, k: Kern) {
        self.t.push(Term::Two(c, [p, q, r, s], k));
    }
    /// Σ_{i,j∈set} [2(ii|jj)_bare − (ij|ji)_f], self exchange included on V_f.
    fn closed(&mut self, set: &[usize]) {
        for &i in set {
            for &j in set {
                self.two_k(2.0, i, i, j, j, Kern::Bare);
                self.two_k(-1.0, i, j, j, i, Kern::Screened);
            }
        }
    }
}

/// Term tables for one- and two-electron parts of element (x, y). Orbital
/// labels: 0..n−1 filled (a = n−1), n = e.
pub(crate) fn element_terms(x: usize, y: usize, n: usize) -> (Vec<Term>, Vec<Term>) {
    let a = n - 1;
    let e = n;
    let core: Vec<usize> = (0..a).collect();
    let f: Vec<usize> = (0..n).collect();
    let fp: Vec<usize> = core.iter().copied().chain([e]).collect();
    let s2 = std::f64::consts::SQRT_2;
    let mut h1 = Terms { t: vec![] };
    let mut h2 = Terms { t: vec![] };
    match (x, y) {
        (G, G) => {
            for &i in &f {
                h1.one(2.0, i, i);
            }
            h2.closed(&f);
        }
        (E, E) => {
            for &i in &fp {
                h1.one(2.0, i, i);
            }
            h2.closed(&fp);
        }
        (M, M) => {
            for &c in &core {
                h1.one(2.0, c, c);
            }
            h1.one(1.0, a, a);
            h1.one(1.0, e, e);
            h2.closed(&core);
            for &c in &core {
                h2.two_k(2.0, a, a, c, c, Kern::Bare);
                h2.two_k(-1.0, a, c, c, a, Kern::Screened);
                h2.two_k(2.0, e, e, c, c, Kern::Bare);
                h2.two_k(-1.0, e, c, c, e, Kern::Screened);
            }
            h2.two(1.0, a, a, e, e);
            h2.two(1.0, a, e, e, a);
            h2.t.push(Term::SelfX(1.0, a));
            h2.t.push(Term::SelfX(1.0, e));
        }
        (G, E) => h2.two(1.0, a, e, a, e),
        (E, G) => h2.two(1.0, e, a, e, a),
        (G, M) => {
            h1.one(s2, a, e);
            for &j in &f {
                h2.two(2.0 * s2, a, e, j, j);
                h2.two(-s2, a, j, j, e);
            }
        }
        (M, G) => {
            h1.one(s2, e, a);
            for &j in &f {
                h2.two(2.0 * s2, e, a, j, j);
                h2.two(-s2, j, a, e, j);
            }
        }
        (E, M) => {
            h1.one(s2, e, a);
            for &j in &fp {
                h2.two(2.0 * s2, e, a, j, j);
                h2.two(-s2, e, j, j, a);
            }
        }
        (M, E) => {
            h1.one(s2, a, e);
            for &j in &fp {
                h2.two(2.0 * s2, a, e, j, j);
                h2.two(-s2, j, e, a, j);
            }
        }
        _ => unreachable!("configuration index out of range"),
    }
    (h1.t, h2.t)
}

/// Caches real-space orbitals, hψ, pair densities, potentials and integral
/// values over the list filled ++ [e].
pub(crate) struct Evaluator<'a> {
    ctx: &'a Context,
    orbs: Vec<&'a Orbital>,
    real: Vec<Vec<C64>>,
    hpsi: Vec<Option<Vec<C64>>>,
    rho: HashMap<(usize, usize), PairDensity>,
    ints: HashMap<([usize; 4], Kern), C64>,
    pots: HashMap<(usize, usize, Kern), Vec<C64>>,
}

impl<'a> Evaluator<'a> {
    pub fn new(ctx: &'a Context, filled: &'a [Orbital], psi_e: &'a Orbital) -> Self {
        let orbs: Vec<&Orbital> = filled.iter().chain([psi_e]).collect();
        let real = orbs.iter().map(|o| ctx.real_space(o)).collect();
        let n = orbs.len();
        Evaluator {
            ctx,
            orbs,
            real,
            hpsi: vec![None; n],
            rho: HashMap::new(),
            ints: HashMap::new(),
            pots: HashMap::new(),
        }
    }

    pub fn nfilled(&self) -> usize {
        self.orbs.len() - 1
    }

    fn hpsi(&mut self, q: usize) -> &[C64] {
        if self.hpsi[q].is_none() {
            self.hpsi[q] = Some(self.ctx.apply_h(&self.orbs[q].coeffs));
        }
        self.hpsi[q].as_ref().unwrap()
    }

    fn rho(&mut self, p: usize, q: usize) -> &PairDensity {
        if !self.rho.contains_key(&(p, q)) {
            let d = self.ctx.pair_density_real(&self.real[p], &self.real[q]);
            self.rho.insert((p, q), d);
        }
        &self.rho[&(p, q)]
    }

    fn kernel(&self, k: Kern) -> &'a crate::integrals::CoulombKernel {
        match k {
            Kern::Bare => &self.ctx.hartree,
            Kern::Screened => &self.ctx.screened,
        }
    }

    fn integral(&mut self, idx: [usize; 4], k: Kern) -> C64 {
        if let Some(v) = self.ints.get(&(idx, k)) {
            return *v;
        }
        let [p, q, r, s] = idx;
        self.rho(p, q);
        self.rho(r, s);
        let v = self.ctx.coulomb(&self.rho[&(p, q)], &self.rho[&(r, s)], self.kernel(k));
        self.ints.insert((idx, k), v);
        v
    }

    fn potential(&mut self, r: usize, s: usize, k: Kern) -> &[C64] {
        if !self.pots.contains_key(&(r, s, k)) {
            self.rho(r, s);
            let w = self.ctx.potential(&self.rho[&(r, s)], self.kernel(k));
            self.pots.insert((r, s, k), w);
        }
        &self.pots[&(r, s, k)]
    }

    pub fn value(&mut self, terms: &[Term]) -> C64 {
        let mut v = C64::new(0.0, 0.0);
        for t in terms {
            v += match *t {
                Term::One(c, p, q) => {
                    let hq = self.hpsi(q).to_vec();
                    c * crate::orbital::dot(&self.orbs[p].coeffs, &hq)
                }
                Term::Two(c, idx, k) => c * self.integral(idx, k),
                Term::SelfX(c, p) => {
                    let b = self.integral([p, p, p, p], Kern::Bare);
                    let f = self.integral([p, p, p, p], Kern::Screened);
                    c * 0.5 * (b - f)
                }
            };
        }
        v
    }

    /// Accumulate w · ∂(terms)/∂ψ_e* into `real_acc` (real-space part) and
    /// `g_acc` (one-body part, already on the basis).
    pub fn add_gradient(&mut self, terms: &[Term], w: C64, real_acc: &mut [C64], g_acc: &mut [C64]) {
        let e = self.orbs.len() - 1;
        for t in terms {
            match *t {
                Term::One(c, p, q) => {
                    if p == e {
                        let hq = self.hpsi(q).to_vec();
                        crate::orbital::axpy(g_acc, w * c, &hq);
                    }
                }
                Term::Two(c, [p, q, r, s], k) => {
                    if p == e {
                        self.add_wpsi(r, s, k, q, w * c, real_acc);
                    }
                    if r == e {
                        self.add_wpsi(p, q, k, s, w * c, real_acc);
                    }
                }
                Term::SelfX(c, p) => {
                    if p == e {
                        self.add_wpsi(e, e, Kern::Bare, e, w * c, real_acc);
                        self.add_wpsi(e, e, Kern::Screened, e, -w * c, real_acc);
                    }
                }
            }
        }
    }

    fn add_wpsi(&mut self, r: usize, s: usize, k: Kern, q: usize, c: C64, acc: &mut [C64]) {
        self.potential(r, s, k);
        let wv = &self.pots[&(r, s, k)];
        for ((a, w), p) in acc.iter_mut().zip(wv).zip(&self.real[q]) {
            *a += c * w * p;
        }
    }

    pub fn basis_len(&self) -> usize {
        self.orbs[0].len()
    }

    pub fn mesh_len(&self) -> usize {
        self.real[0].len()
    }

    pub fn ctx(&self) -> &'a Context {
        self.ctx
    }
}

fn matrix(ev: &mut Evaluator, pick_two: bool) -> Matrix3<C64> {
    let n = ev.nfilled();
    let mut m = Matrix3::zeros();
    for x in 0..3 {
        for y in 0..3 {
            let (t1, t2) = element_terms(x, y, n);
            m[(x, y)] = ev.value(if pick_two { &t2 } else { &t1 });
        }
    }
    m
}

/// ⟨Ψ_x|H_1|Ψ_y⟩ in the order (g, e, m).
pub fn h1_elements(ctx: &Context, filled: &[Orbital], psi_e: &Orbital) -> Matrix3<C64> {
    matrix(&mut Evaluator::new(ctx, filled, psi_e), false)
}

/// ⟨Ψ_x|H_2|Ψ_y⟩ in the order (g, e, m).
pub fn h2_elements(ctx: &Context, filled: &[Orbital], psi_e: &Orbital) -> Matrix3<C64> {
    matrix(&mut Evaluator::new(ctx, filled, psi_e), true)
}

pub(crate) fn both(ev: &mut Evaluator) -> (Matrix3<C64>, Matrix3<C64>) {
    (matrix(ev, false), matrix(ev, true))
}

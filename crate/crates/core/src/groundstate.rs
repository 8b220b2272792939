//! Restricted closed-shell ground state: N doubly occupied orbitals
//! minimizing E = 2 Σ h_ii + Σ_ij [2 (ii|jj)_bare − (ij|ji)_f] + eshift.
//!
//! This is the ⟨Ψ_g|H|Ψ_g⟩ expectation of the second-quantized Hamiltonian
//! built by [`Context::build_sq_hamiltonian`], so RHF and CI energies share
//! one reference.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::integrals::Context;
use crate::lattice::{PwBasis, C64};
use crate::optimize::{minimize, CgOptions, Objective};
use crate::orbital::{random_orbitals, real_gauge, Orbital, GAUGE_TOL};

#[derive(Clone, Debug)]
pub struct ScfState {
    pub filled: Vec<Orbital>,
    pub etotal: f64,
    pub gnorm: f64,
    pub iterations: usize,
    /// Energy after each accepted CG step.
    pub history: Vec<f64>,
    pub converged: bool,
}

#[derive(Clone, Debug)]
pub enum RhfInit {
    Seed(u64),
    Orbitals(Vec<Orbital>),
}

#[derive(Clone, Debug)]
pub struct RhfOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for RhfOptions {
    fn default() -> Self {
        RhfOptions {
            tol: 1e-7,
            max_iter: 1000,
        }
    }
}

/// The closed-shell energy functional and its gradient.
pub struct RhfObjective<'a> {
    pub ctx: &'a Context,
}

impl RhfObjective<'_> {
    fn parts(&self, x: &[Orbital], want_grad: bool) -> (f64, Vec<Vec<C64>>) {
        let ctx = self.ctx;
        let n = x.len();
        let real: Vec<Vec<C64>> = x.par_iter().map(|o| ctx.real_space(o)).collect();
        let hpsi: Vec<Vec<C64>> = x.par_iter().map(|o| ctx.apply_h(&o.coeffs)).collect();
        let mut e1 = 0.0;
        for k in 0..n {
            e1 += 2.0 * crate::orbital::dot(&x[k].coeffs, &hpsi[k]).re;
        }
        // total density for the Hartree term
        let mut rho_tot: Vec<C64> = vec![C64::new(0.0, 0.0); ctx.basis.mesh_len()];
        for r in &real {
            for (t, v) in rho_tot.iter_mut().zip(r) {
                *t += v.norm_sqr();
            }
        }
        let mut dens = rho_tot.clone();
        ctx.basis.fft.forward(&mut dens);
        let om = ctx.omega();
        let rho_tot_g = crate::integrals::PairDensity {
            rho: dens.iter().map(|v| v * om).collect(),
        };
        let e_h = 2.0 * ctx.coulomb(&rho_tot_g, &rho_tot_g, &ctx.hartree).re;
        // exchange on V_f
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|j| (0..n).map(move |k| (j, k))).collect();
        let rho: Vec<crate::integrals::PairDensity> =
            pairs.par_iter().map(|&(j, k)| ctx.pair_density_real(&real[j], &real[k])).collect();
        let mut e_x = 0.0;
        for j in 0..n {
            for k in 0..n {
                e_x += ctx.coulomb(&rho[j * n + k], &rho[k * n + j], &ctx.screened).re;
            }
        }
        let e = e1 + e_h - e_x + ctx.eshift;
        if !want_grad {
            return (e, vec![]);
        }
        let w_h = ctx.potential(&rho_tot_g, &ctx.hartree);
        let w_x: Vec<Vec<C64>> = rho.par_iter().map(|r| ctx.potential(r, &ctx.screened)).collect();
        let grads = (0..n)
            .into_par_iter()
            .map(|k| {
                // 2hψ_k + 4 W_H ψ_k − 2 Σ_j W^f_jk ψ_j, assembled in real space
                let mut acc: Vec<C64> = w_h.iter().zip(&real[k]).map(|(w, p)| 4.0 * w * p).collect();
                for j in 0..n {
                    for ((a, w), p) in acc.iter_mut().zip(&w_x[j * n + k]).zip(&real[j]) {
                        *a -= 2.0 * w * p;
                    }
                }
                let mut g = ctx.basis.from_real(acc);
                for (gi, hi) in g.iter_mut().zip(&hpsi[k]) {
                    *gi += 2.0 * hi;
                }
                g
            })
            .collect();
        (e, grads)
    }
}

impl Objective for RhfObjective<'_> {
    fn eval(&self, x: &[Orbital]) -> Result<(f64, Vec<Vec<C64>>)> {
        Ok(self.parts(x, true))
    }

    fn energy(&self, x: &[Orbital]) -> Result<f64> {
        Ok(self.parts(x, false).0)
    }
}

pub fn rhf_energy(ctx: &Context, filled: &[Orbital]) -> f64 {
    RhfObjective { ctx }.parts(filled, false).0
}

pub fn rhf_gradient(ctx: &Context, filled: &[Orbital]) -> Vec<Vec<C64>> {
    RhfObjective { ctx }.parts(filled, true).1
}

/// Minimize the closed-shell energy for `npairs` doubly occupied orbitals.
/// Returns the best state even when not converged; see [`solve_rhf`].
pub fn minimize_rhf(ctx: &Context, npairs: usize, init: RhfInit, opts: &RhfOptions) -> Result<ScfState> {
    if npairs == 0 {
        return Err(Error::Config("need at least one electron pair".into()));
    }
    let x0 = match init {
        RhfInit::Seed(seed) => random_orbitals(&ctx.basis, npairs, seed, ctx.real_mode(), &[])?,
        RhfInit::Orbitals(o) => {
            if o.len() != npairs {
                return Err(Error::Config(format!("expected {npairs} initial orbitals, got {}", o.len())));
            }
            o
        }
    };
    let cg = CgOptions {
        tol: opts.tol,
        max_iter: opts.max_iter,
        restart: 20,
        real: ctx.real_mode(),
    };
    let mut out = minimize(&RhfObjective { ctx }, x0, &[], &ctx.basis, &cg)?;
    if !ctx.real_mode() {
        real_gauge(&mut out.x, &ctx.basis, GAUGE_TOL);
    }
    Ok(ScfState {
        filled: out.x,
        etotal: out.energy,
        gnorm: out.gnorm,
        iterations: out.iterations,
        history: out.history,
        converged: out.converged,
    })
}

pub fn solve_rhf(ctx: &Context, npairs: usize, init: RhfInit, opts: &RhfOptions) -> Result<ScfState> {
    let st = minimize_rhf(ctx, npairs, init, opts)?;
    if !st.converged {
        return Err(Error::NotConverged {
            what: "RHF",
            iterations: st.iterations,
            gnorm: st.gnorm,
        });
    }
    Ok(st)
}

/// One electron in a single spatial orbital: E = h_aa + ½[(aa|aa)_bare −
/// (aa|aa)_f] + eshift. For an isolated atom with one valence electron this
/// is the total energy.
pub struct OneElectronObjective<'a> {
    pub ctx: &'a Context,
}

impl Objective for OneElectronObjective<'_> {
    fn eval(&self, x: &[Orbital]) -> Result<(f64, Vec<Vec<C64>>)> {
        let ctx = self.ctx;
        let a = &x[0];
        let ar = ctx.real_space(a);
        let hpsi = ctx.apply_h(&a.coeffs);
        let rho = ctx.pair_density_real(&ar, &ar);
        let jb = ctx.coulomb(&rho, &rho, &ctx.hartree).re;
        let jf = ctx.coulomb(&rho, &rho, &ctx.screened).re;
        let e = crate::orbital::dot(&a.coeffs, &hpsi).re + 0.5 * (jb - jf) + ctx.eshift;
        let wb = ctx.potential(&rho, &ctx.hartree);
        let wf = ctx.potential(&rho, &ctx.screened);
        let w: Vec<C64> = wb.iter().zip(&wf).map(|(b, f)| b - f).collect();
        let mut g = ctx.apply_potential(&w, &ar);
        for (gi, hi) in g.iter_mut().zip(&hpsi) {
            *gi += hi;
        }
        Ok((e, vec![g]))
    }
}

pub fn solve_one_electron(ctx: &Context, seed: u64, opts: &RhfOptions) -> Result<ScfState> {
    let x0 = random_orbitals(&ctx.basis, 1, seed, ctx.real_mode(), &[])?;
    let cg = CgOptions {
        tol: opts.tol,
        max_iter: opts.max_iter,
        restart: 20,
        real: ctx.real_mode(),
    };
    let out = minimize(&OneElectronObjective { ctx }, x0, &[], &ctx.basis, &cg)?;
    if !out.converged {
        return Err(Error::NotConverged {
            what: "one-electron ground state",
            iterations: out.iterations,
            gnorm: out.gnorm,
        });
    }
    Ok(ScfState {
        filled: out.x,
        etotal: out.energy,
        gnorm: out.gnorm,
        iterations: out.iterations,
        history: out.history,
        converged: true,
    })
}

/// Orbital checkpoint: header lines, then `re im` per coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitalFile {
    pub basis_hash: String,
    pub kind: String,
    /// Number of filled (doubly occupied) orbitals at the front of the list.
    pub nfilled: usize,
    pub orbitals: Vec<Orbital>,
}

pub fn write_orbitals(path: &Path, basis: &PwBasis, kind: &str, nfilled: usize, orbitals: &[Orbital]) -> Result<()> {
    let mut s = String::new();
    let _ = writeln!(s, "pwcovo-orbitals 1");
    let _ = writeln!(s, "basis_hash {}", basis.hash_hex());
    let _ = writeln!(s, "kind {kind}");
    let _ = writeln!(s, "ngvec {}", basis.len());
    let _ = writeln!(s, "nfilled {nfilled}");
    let _ = writeln!(s, "norb {}", orbitals.len());
    for (i, o) in orbitals.iter().enumerate() {
        let _ = writeln!(s, "orbital {i}");
        for c in &o.coeffs {
            let _ = writeln!(s, "{:e} {:e}", c.re, c.im);
        }
    }
    std::fs::write(path, s)?;
    Ok(())
}

pub fn read_orbitals(path: &Path, basis: Option<&PwBasis>) -> Result<OrbitalFile> {
    let name = path.display().to_string();
    let text = crate::error::read_text(path)?;
    let mut lines = text.lines().enumerate();
    let mut header = std::collections::HashMap::new();
    for (i, line) in lines.by_ref().take(6) {
        let mut t = line.split_whitespace();
        let k = t.next().ok_or_else(|| Error::parse(&name, i + 1, "empty header line"))?;
        header.insert(k.to_string(), t.next().unwrap_or("").to_string());
    }
    if header.get("pwcovo-orbitals").map(|v| v.as_str()) != Some("1") {
        return Err(Error::parse(&name, 1, "not an orbital checkpoint"));
    }
    let get = |k: &str| header.get(k).cloned().ok_or_else(|| Error::parse(&name, 0, format!("missing {k}")));
    let num = |k: &str| -> Result<usize> {
        get(k)?.parse().map_err(|_| Error::parse(&name, 0, format!("bad {k}")))
    };
    let hash = get("basis_hash")?;
    let ngvec = num("ngvec")?;
    let norb = num("norb")?;
    let nfilled = num("nfilled")?;
    if let Some(b) = basis {
        if b.hash_hex() != hash || b.len() != ngvec {
            return Err(Error::Config(format!("{name}: checkpoint was written for a different basis")));
        }
    }
    let mut orbitals = Vec::with_capacity(norb);
    for _ in 0..norb {
        let (i, l) = lines.next().ok_or_else(|| Error::parse(&name, 0, "truncated file"))?;
        if !l.starts_with("orbital") {
            return Err(Error::parse(&name, i + 1, "expected `orbital`"));
        }
        let mut coeffs = Vec::with_capacity(ngvec);
        for _ in 0..ngvec {
            let (i, l) = lines.next().ok_or_else(|| Error::parse(&name, 0, "truncated file"))?;
            let mut t = l.split_whitespace();
            let mut f = || -> Result<f64> {
                t.next()
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| Error::parse(&name, i + 1, "bad coefficient"))
            };
            let re = f()?;
            let im = f()?;
            coeffs.push(C64::new(re, im));
        }
        orbitals.push(Orbital::new(coeffs));
    }
    Ok(OrbitalFile {
        basis_hash: hash,
        kind: get("kind")?,
        nfilled,
        orbitals,
    })
}

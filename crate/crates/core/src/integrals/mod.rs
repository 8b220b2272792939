//! One- and two-electron integrals over plane-wave orbitals, the ion-ion
//! energy, and assembly of the second-quantized Hamiltonian.
//!
//! Two-electron integrals are chemist-ordered, (pq|rs) = ∫∫ ψ_p*ψ_q(1) K(r12)
//! ψ_r*ψ_s(2). The kernel K is the bare periodic Coulomb kernel when the
//! integral has a diagonal pair (p = q or r = s, the Hartree-like branch) and
//! the cutoff kernel V_f otherwise (the exchange-like branch). The fully
//! diagonal self term ½[(pp|pp)_bare − (pp|pp)_f] is carried in the one-body
//! part (`self_exchange`), so that a closed-shell determinant sees Hartree
//! on the bare kernel and all exchange, including self exchange, on V_f.

pub mod ewald;
mod hamiltonian;
pub mod kernel;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{PwBasis, RecipField, Vec3, C64};
use crate::orbital::{orthonormality_error, Orbital};
use crate::pseudopot::{vlocal_recip, LongRange, Nonlocal, PseudopotentialSpec, StructureAtoms};

pub use hamiltonian::SqHamiltonian;
pub use kernel::{aperiodic_kernel, bare_kernel, filtered_kernel, vf_real, CoulombKernel, KernelKind};

/// Simple-cubic Madelung constant used in the charge correction.
pub const MADELUNG_SC: f64 = 2.8372974794;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Periodic,
    Aperiodic,
}

impl std::str::FromStr for Boundary {
    type Err = Error;
    fn from_str(s: &str) -> Result<Boundary> {
        match s.to_ascii_lowercase().as_str() {
            "periodic" => Ok(Boundary::Periodic),
            "aperiodic" => Ok(Boundary::Aperiodic),
            _ => Err(Error::Config(format!("unknown boundary `{s}`"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ContextOptions {
    pub boundary: Boundary,
    pub filter_n: u32,
    /// Cutoff radius for V_f, or the truncation radius in aperiodic mode.
    /// Defaults to half the smallest cell width.
    pub rcut: Option<f64>,
    pub madelung: f64,
    /// Length r_s in the net-charge correction Q²M/(2 r_s); defaults to the
    /// Wigner–Seitz radius of the cell.
    pub charge_rs: Option<f64>,
    /// Electron count used for the net-charge correction; defaults to ΣZ.
    pub nelec: Option<usize>,
    pub real_orbitals: bool,
    /// Switch off electron-electron interaction (both kernels zero).
    pub interaction: bool,
}

impl Default for ContextOptions {
    fn default() -> Self {
        ContextOptions {
            boundary: Boundary::Periodic,
            filter_n: 8,
            rcut: None,
            madelung: MADELUNG_SC,
            charge_rs: None,
            nelec: None,
            real_orbitals: true,
            interaction: true,
        }
    }
}

/// Everything needed to evaluate integrals for one geometry.
#[derive(Clone, Debug)]
pub struct Context {
    pub basis: PwBasis,
    pub structure: StructureAtoms,
    pub species: Vec<PseudopotentialSpec>,
    pub opts: ContextOptions,
    /// Local potential V(G) on the mesh, E_loc = Σ_G V(G) ρ(G).
    pub vloc: RecipField,
    vloc_r: Vec<f64>,
    nonlocal: Nonlocal,
    /// Kernel for the Hartree-like branch.
    pub hartree: CoulombKernel,
    /// Kernel for the exchange-like branch.
    pub screened: CoulombKernel,
    pub eshift: f64,
    pub nelec: usize,
    sphere: Vec<usize>,
    sphere_neg: Vec<usize>,
}

/// ρ_pq(G) = Σ_G′ ψ_p*(G′) ψ_q(G′+G) on the FFT mesh.
#[derive(Clone, Debug, PartialEq)]
pub struct PairDensity {
    pub rho: Vec<C64>,
}

impl Context {
    pub fn new(
        basis: PwBasis,
        structure: StructureAtoms,
        species: Vec<PseudopotentialSpec>,
        opts: ContextOptions,
    ) -> Result<Context> {
        let cell = basis.cell.clone();
        let rin = cell.inscribed_radius();
        let rcut = opts.rcut.unwrap_or(rin);
        let mut atoms = Vec::new();
        for a in &structure.atoms {
            let spec = species
                .iter()
                .find(|s| s.species == a.species)
                .ok_or_else(|| Error::Structure(format!("no pseudopotential for species {}", a.species)))?;
            atoms.push((spec, cell.frac_to_cart(&a.frac)));
        }
        let long_range = match opts.boundary {
            Boundary::Periodic => LongRange::Periodic,
            Boundary::Aperiodic => LongRange::Truncated { rc: rcut },
        };
        let mut vloc = vec![C64::new(0.0, 0.0); basis.mesh_len()];
        for (spec, pos) in &atoms {
            let v = vlocal_recip(spec, &basis, pos, long_range)?;
            for (a, b) in vloc.iter_mut().zip(&v.values) {
                *a += b;
            }
        }
        // V(r) = Σ_G V(−G) e^{iG·r}
        let mut vr: Vec<C64> = (0..basis.mesh_len()).map(|i| vloc[basis.mesh_neg(i)]).collect();
        basis.fft.inverse(&mut vr);
        let vloc_r = vr.iter().map(|v| v.re).collect();
        let nonlocal = Nonlocal::new(&atoms.iter().map(|(s, p)| (*s, *p)).collect::<Vec<_>>(), &basis)?;

        let (hartree, screened) = if !opts.interaction {
            (
                CoulombKernel::zero(&basis, KernelKind::PeriodicBare),
                CoulombKernel::zero(&basis, KernelKind::Filtered),
            )
        } else {
            match opts.boundary {
                Boundary::Periodic => (bare_kernel(&basis), filtered_kernel(&basis, opts.filter_n, rcut)?),
                Boundary::Aperiodic => {
                    let k = aperiodic_kernel(&basis, rcut);
                    (k.clone(), k)
                }
            }
        };

        let charges: Vec<(Vec3, f64)> = atoms.iter().map(|(s, p)| (*p, s.zval)).collect();
        let zsum: f64 = charges.iter().map(|c| c.1).sum();
        let nelec = opts.nelec.unwrap_or(zsum.round() as usize);
        let eshift = if charges.is_empty() {
            0.0
        } else {
            match opts.boundary {
                Boundary::Periodic => {
                    let eps = ewald::default_epsilon(&cell);
                    ewald::ewald_energy(&cell, &charges, eps)?
                        + match opts.charge_rs {
                            Some(rs) => ewald::charge_correction_rs(zsum - nelec as f64, opts.madelung, rs),
                            None => ewald::charge_correction(&cell, zsum - nelec as f64, opts.madelung),
                        }
                }
                Boundary::Aperiodic => ewald::free_space_ion_energy(&charges),
            }
        };

        let g2max = basis.density_g2max() * (1.0 + 1e-9);
        let sphere: Vec<usize> = (0..basis.mesh_len()).filter(|&i| basis.mesh_g2[i] <= g2max).collect();
        let pos: std::collections::HashMap<usize, usize> =
            sphere.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let sphere_neg = sphere.iter().map(|&i| pos[&basis.mesh_neg(i)]).collect();

        let dims = basis.mesh;
        Ok(Context {
            basis,
            structure,
            species,
            opts,
            vloc: RecipField {
                dims,
                values: vloc,
            },
            vloc_r,
            nonlocal,
            hartree,
            screened,
            eshift,
            nelec,
            sphere,
            sphere_neg,
        })
    }

    /// Context with no atoms: kinetic energy and electron repulsion only.
    pub fn bare(basis: PwBasis, opts: ContextOptions) -> Result<Context> {
        Context::new(basis, StructureAtoms::default(), vec![], opts)
    }

    pub fn omega(&self) -> f64 {
        self.basis.cell.omega
    }

    pub fn real_mode(&self) -> bool {
        self.opts.real_orbitals
    }

    pub fn ion_charges(&self) -> Vec<(Vec3, f64)> {
        self.structure
            .atoms
            .iter()
            .map(|a| {
                let z = self.species.iter().find(|s| s.species == a.species).map(|s| s.zval).unwrap_or(0.0);
                (self.basis.cell.frac_to_cart(&a.frac), z)
            })
            .collect()
    }

    pub fn local_potential_real(&self) -> &[f64] {
        &self.vloc_r
    }

    pub fn nonlocal(&self) -> &Nonlocal {
        &self.nonlocal
    }

    pub fn real_space(&self, o: &Orbital) -> Vec<C64> {
        self.basis.to_real(&o.coeffs)
    }

    /// h ψ = (−½∇² + V_loc + V_NL) ψ on the basis.
    pub fn apply_h(&self, psi: &[C64]) -> Vec<C64> {
        let mut r = self.basis.to_real(psi);
        for (v, w) in r.iter_mut().zip(&self.vloc_r) {
            *v *= *w;
        }
        let mut out = self.basis.from_real(r);
        for ((o, p), g2) in out.iter_mut().zip(psi).zip(&self.basis.g2) {
            *o += 0.5 * g2 * p;
        }
        self.nonlocal.apply_add(psi, &mut out);
        out
    }

    pub fn one_electron(&self, p: &Orbital, q: &Orbital) -> C64 {
        crate::orbital::dot(&p.coeffs, &self.apply_h(&q.coeffs))
    }

    /// Pair density from real-space orbital values: ρ(G) = Ω · FFT[ψ_p* ψ_q].
    pub fn pair_density_real(&self, pr: &[C64], qr: &[C64]) -> PairDensity {
        let mut d: Vec<C64> = pr.iter().zip(qr).map(|(a, b)| a.conj() * b).collect();
        self.basis.fft.forward(&mut d);
        let om = self.omega();
        for v in d.iter_mut() {
            *v *= om;
        }
        PairDensity { rho: d }
    }

    pub fn pair_density(&self, p: &Orbital, q: &Orbital) -> PairDensity {
        self.pair_density_real(&self.real_space(p), &self.real_space(q))
    }

    /// (pq|rs) with an explicit kernel: (1/Ω) Σ_G K(G) ρ_pq(−G) ρ_rs(G).
    pub fn coulomb(&self, pq: &PairDensity, rs: &PairDensity, k: &CoulombKernel) -> C64 {
        let mut s = C64::new(0.0, 0.0);
        for (&i, &j) in self.sphere.iter().zip(&self.sphere_neg) {
            let kv = k.values[i];
            if kv != 0.0 {
                s += kv * pq.rho[self.sphere[j]] * rs.rho[i];
            }
        }
        s / self.omega()
    }

    /// Kernel used for (pq|rs) given orbital labels.
    pub fn kernel_for(&self, p: usize, q: usize, r: usize, s: usize) -> &CoulombKernel {
        if p == q || r == s {
            &self.hartree
        } else {
            &self.screened
        }
    }

    pub fn two_electron(&self, orbs: &[Orbital], p: usize, q: usize, r: usize, s: usize) -> C64 {
        let pq = self.pair_density(&orbs[p], &orbs[q]);
        let rs = self.pair_density(&orbs[r], &orbs[s]);
        self.coulomb(&pq, &rs, self.kernel_for(p, q, r, s))
    }

    /// ½[(pp|pp)_bare − (pp|pp)_f]: self-exchange on V_f minus self-Hartree on
    /// the bare kernel, carried as a diagonal one-body term.
    pub fn self_exchange(&self, p: &Orbital) -> f64 {
        let d = self.pair_density(p, p);
        0.5 * (self.coulomb(&d, &d, &self.hartree) - self.coulomb(&d, &d, &self.screened)).re
    }

    /// W(r) = ∫ K(r − r′) ρ(r′) dr′ = (1/Ω) Σ_G K(G) ρ(G) e^{iG·r}.
    pub fn potential(&self, rho: &PairDensity, k: &CoulombKernel) -> Vec<C64> {
        let mut w = vec![C64::new(0.0, 0.0); self.basis.mesh_len()];
        let inv = 1.0 / self.omega();
        for &i in &self.sphere {
            w[i] = rho.rho[i] * (k.values[i] * inv);
        }
        self.basis.fft.inverse(&mut w);
        w
    }

    /// Coefficients of W(r) ψ(r) on the basis (ψ given in real space).
    pub fn apply_potential(&self, w: &[C64], psi_r: &[C64]) -> Vec<C64> {
        let prod: Vec<C64> = w.iter().zip(psi_r).map(|(a, b)| a * b).collect();
        self.basis.from_real(prod)
    }

    /// Build the Hamiltonian over an orthonormal orbital list.
    pub fn build_sq_hamiltonian(&self, orbs: &[Orbital]) -> Result<SqHamiltonian> {
        let err = orthonormality_error(orbs);
        if err > 1e-8 {
            return Err(Error::NotOrthonormal(err));
        }
        let n = orbs.len();
        let real: Vec<Vec<C64>> = orbs.par_iter().map(|o| self.real_space(o)).collect();
        // pair densities on the density sphere for p ≤ q
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|p| (p..n).map(move |q| (p, q))).collect();
        let rho: Vec<Vec<C64>> = pairs
            .par_iter()
            .map(|&(p, q)| {
                let d = self.pair_density_real(&real[p], &real[q]);
                self.sphere.iter().map(|&i| d.rho[i]).collect()
            })
            .collect();
        let pair_index = |p: usize, q: usize| -> usize {
            // position of (min,max) in `pairs`
            let (a, b) = if p <= q { (p, q) } else { (q, p) };
            a * n - a * (a + 1) / 2 + b
        };
        let get = |p: usize, q: usize, k: usize| -> C64 {
            if p <= q {
                rho[pair_index(p, q)][k]
            } else {
                rho[pair_index(p, q)][self.sphere_neg[k]].conj()
            }
        };
        let inv = 1.0 / self.omega();
        let nn = n * n;
        let h2_upper: Vec<(usize, usize, C64)> = (0..nn)
            .into_par_iter()
            .flat_map_iter(|a| (a..nn).map(move |b| (a, b)))
            .map(|(a, b)| {
                let (p, q, r, s) = (a / n, a % n, b / n, b % n);
                let k = self.kernel_for(p, q, r, s);
                let mut v = C64::new(0.0, 0.0);
                for (kk, &i) in self.sphere.iter().enumerate() {
                    let kv = k.values[i];
                    if kv != 0.0 {
                        v += kv * get(p, q, self.sphere_neg[kk]) * get(r, s, kk);
                    }
                }
                (a, b, v * inv)
            })
            .collect();
        let mut ham = SqHamiltonian::zeros(n, self.nelec);
        let clean = |v: C64| if self.real_mode() { C64::new(v.re, 0.0) } else { v };
        for (a, b, v) in h2_upper {
            let (p, q, r, s) = (a / n, a % n, b / n, b % n);
            ham.set_h2(p, q, r, s, clean(v));
            ham.set_h2(r, s, p, q, clean(v));
        }
        let hpsi: Vec<Vec<C64>> = orbs.par_iter().map(|o| self.apply_h(&o.coeffs)).collect();
        for p in 0..n {
            for q in 0..n {
                let mut v = crate::orbital::dot(&orbs[p].coeffs, &hpsi[q]);
                if p == q {
                    let self_x = 0.5 * (ham.h2(p, p, p, p) - self.pp_screened(&rho[pair_index(p, p)]));
                    v += self_x;
                }
                ham.set_h1(p, q, clean(v));
            }
        }
        // enforce exact hermiticity of h1
        for p in 0..n {
            let v = ham.h1(p, p);
            ham.set_h1(p, p, C64::new(v.re, 0.0));
            for q in 0..p {
                let v = 0.5 * (ham.h1(p, q) + ham.h1(q, p).conj());
                ham.set_h1(p, q, v);
                ham.set_h1(q, p, v.conj());
            }
        }
        ham.eshift = self.eshift;
        Ok(ham)
    }

    /// (pp|pp) on the screened kernel from a sphere-restricted density.
    fn pp_screened(&self, rho_sphere: &[C64]) -> C64 {
        let mut v = C64::new(0.0, 0.0);
        for (kk, &i) in self.sphere.iter().enumerate() {
            v += self.screened.values[i] * rho_sphere[self.sphere_neg[kk]] * rho_sphere[kk];
        }
        v / self.omega()
    }
}

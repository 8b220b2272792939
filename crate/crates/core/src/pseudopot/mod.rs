//! Norm-conserving pseudopotentials in separable (Kleinman–Bylander) form:
//! tabulated radial data, reciprocal-space local potential and projectors,
//! and the separable nonlocal operator.

mod file;
pub mod hgh;
pub mod radial;

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::lattice::{PwBasis, RecipField, Vec3, C64};
use crate::orbital::Orbital;

pub use file::{read_pseudopotential, write_pseudopotential};
use radial::{bessel_transform, check_decay, tesseral};

/// Width of the Gaussian used to split off the Coulomb tail of V_local (bohr).
pub const SIGMA_C: f64 = 1.0;

#[derive(Clone, Debug, PartialEq)]
pub struct Projector {
    pub n: usize,
    pub l: usize,
    pub radial: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PseudopotentialSpec {
    pub species: String,
    pub zval: f64,
    pub rgrid: Vec<f64>,
    pub vlocal: Vec<f64>,
    pub projectors: Vec<Projector>,
    /// hcoef[l] is indexed by (n−1, n′−1) within channel l.
    pub hcoef: Vec<DMatrix<f64>>,
    pub core_radii: (f64, f64),
}

impl PseudopotentialSpec {
    pub fn validate(&self) -> Result<()> {
        let r = &self.rgrid;
        if r.is_empty() || r[0] < 0.0 || r.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Pseudo(format!(
                "{}: radial grid must start at r ≥ 0 and increase strictly",
                self.species
            )));
        }
        if self.vlocal.len() != r.len() {
            return Err(Error::Pseudo(format!("{}: vlocal length mismatch", self.species)));
        }
        for p in &self.projectors {
            if p.radial.len() != r.len() {
                return Err(Error::Pseudo(format!("{}: projector length mismatch", self.species)));
            }
            if p.l > 2 {
                return Err(Error::Pseudo(format!(
                    "{}: angular momentum l={} not supported (l ≤ 2)",
                    self.species, p.l
                )));
            }
            if p.n == 0 || p.n > 2 {
                return Err(Error::Pseudo(format!(
                    "{}: projector index n={} outside 1..2",
                    self.species, p.n
                )));
            }
            let nl = self.channel_size(p.l);
            let h = self.hcoef.get(p.l);
            if h.map(|h| h.nrows() != nl || h.ncols() != nl).unwrap_or(true) {
                return Err(Error::Pseudo(format!(
                    "{}: hcoef for l={} missing or wrong size",
                    self.species, p.l
                )));
            }
        }
        for (l, h) in self.hcoef.iter().enumerate() {
            if (h - h.transpose()).amax() > 1e-12 {
                return Err(Error::Pseudo(format!("{}: hcoef l={l} not symmetric", self.species)));
            }
        }
        let last = r.len() - 1;
        if r[last] > 0.0 {
            let tail = self.vlocal[last] * r[last] / -self.zval;
            if (tail - 1.0).abs() > 0.01 {
                return Err(Error::Pseudo(format!(
                    "{}: vlocal does not approach −Zval/r at the grid end (ratio {tail})",
                    self.species
                )));
            }
        }
        Ok(())
    }

    pub fn channel_size(&self, l: usize) -> usize {
        self.projectors.iter().filter(|p| p.l == l).count()
    }

    pub fn lmax(&self) -> Option<usize> {
        self.projectors.iter().map(|p| p.l).max()
    }

    /// V_local(r) + Z erf(r/σ_c)/r, the short-range part transformed numerically.
    fn short_range(&self) -> Vec<f64> {
        self.rgrid
            .iter()
            .zip(&self.vlocal)
            .map(|(&r, &v)| v + self.zval * erf_over_r(r, SIGMA_C))
            .collect()
    }
}

/// erf(r/σ)/r with its finite limit at r = 0.
pub fn erf_over_r(r: f64, sigma: f64) -> f64 {
    if r < 1e-8 * sigma {
        2.0 / (PI.sqrt() * sigma)
    } else {
        libm::erf(r / sigma) / r
    }
}

/// How the long-range −Z/r tail is treated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LongRange {
    /// Periodic Coulomb; the divergent G=0 piece is dropped.
    Periodic,
    /// Spherically truncated Coulomb of radius `rc` (isolated systems).
    Truncated { rc: f64 },
}

/// Radial transform of the local potential, ṽ(|G|) such that
/// V(G) = ṽ(|G|) e^{iG·R} / Ω.
#[derive(Clone, Debug)]
pub struct LocalRadial {
    zval: f64,
    r: Vec<f64>,
    vsr: Vec<f64>,
    long_range: LongRange,
}

impl LocalRadial {
    pub fn new(spec: &PseudopotentialSpec, long_range: LongRange) -> Result<LocalRadial> {
        spec.validate()?;
        let vsr = spec.short_range();
        check_decay(&spec.rgrid, &vsr, &format!("{} local potential", spec.species))?;
        Ok(LocalRadial {
            zval: spec.zval,
            r: spec.rgrid.clone(),
            vsr,
            long_range,
        })
    }

    pub fn value(&self, g: f64) -> f64 {
        let sr = 4.0 * PI * bessel_transform(0, g, &self.r, &self.vsr);
        let z = self.zval;
        let s2 = SIGMA_C * SIGMA_C;
        let lr = match self.long_range {
            LongRange::Periodic => {
                if g == 0.0 {
                    PI * z * s2
                } else {
                    -4.0 * PI * z * (-g * g * s2 / 4.0).exp() / (g * g)
                }
            }
            LongRange::Truncated { rc } => {
                if g == 0.0 {
                    -2.0 * PI * z * rc * rc
                } else {
                    -4.0 * PI * z * (-g * g * s2 / 4.0).exp() * (1.0 - (g * rc).cos()) / (g * g)
                }
            }
        };
        sr + lr
    }
}

/// Group mesh points by |G|² so each radial transform is evaluated once.
fn shells(g2: &[f64], g2max: f64) -> Vec<(f64, Vec<usize>)> {
    let mut map: std::collections::BTreeMap<i64, (f64, Vec<usize>)> = Default::default();
    for (i, &v) in g2.iter().enumerate() {
        if v <= g2max * (1.0 + 1e-12) {
            let e = map.entry((v * 1e9).round() as i64).or_insert((v, Vec::new()));
            e.1.push(i);
        }
    }
    map.into_values().collect()
}

/// V(G) = (1/Ω) e^{iG·R} ṽ(|G|) on the FFT mesh, zero outside the density sphere.
pub fn vlocal_recip(
    spec: &PseudopotentialSpec,
    basis: &PwBasis,
    r_atom: &Vec3,
    long_range: LongRange,
) -> Result<RecipField> {
    let table = LocalRadial::new(spec, long_range)?;
    let mut values = vec![C64::new(0.0, 0.0); basis.mesh_len()];
    let inv = 1.0 / basis.cell.omega;
    for (g2, idx) in shells(&basis.mesh_g2, basis.density_g2max()) {
        let v = table.value(g2.sqrt()) * inv;
        for i in idx {
            let g = basis.mesh_gvec(i);
            values[i] = C64::from_polar(v, g.dot(r_atom));
        }
    }
    Ok(RecipField {
        dims: basis.mesh,
        values,
    })
}

/// One projector function p_nlm(G) on the basis G-vectors.
#[derive(Clone, Debug)]
pub struct ProjectorVec {
    pub n: usize,
    pub l: usize,
    pub m: i32,
    pub coeffs: Vec<C64>,
}

/// p_nlm(G) = (4π/√Ω) e^{−iG·R} (−i)^l T_lm(Ĝ) ∫ P_nl(r) j_l(|G| r) r² dr,
/// the unit-norm coefficients of the projector centered at R.
pub fn projectors_recip(
    spec: &PseudopotentialSpec,
    basis: &PwBasis,
    r_atom: &Vec3,
) -> Result<Vec<ProjectorVec>> {
    spec.validate()?;
    let pref = 4.0 * PI / basis.cell.omega.sqrt();
    let mut out = Vec::new();
    for p in &spec.projectors {
        check_decay(&spec.rgrid, &p.radial, &format!("{} projector n={} l={}", spec.species, p.n, p.l))?;
        let mut radial_cache: std::collections::HashMap<i64, f64> = Default::default();
        let radial: Vec<f64> = basis
            .g2
            .iter()
            .map(|&g2| {
                *radial_cache
                    .entry((g2 * 1e9).round() as i64)
                    .or_insert_with(|| bessel_transform(p.l, g2.sqrt(), &spec.rgrid, &p.radial))
            })
            .collect();
        let il = match p.l % 4 {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, -1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, 1.0),
        };
        for m in -(p.l as i32)..=(p.l as i32) {
            let coeffs = basis
                .gcart
                .iter()
                .zip(&radial)
                .map(|(g, &rad)| {
                    let phase = C64::from_polar(1.0, -g.dot(r_atom));
                    phase * il * (pref * tesseral(p.l, m, g) * rad)
                })
                .collect();
            out.push(ProjectorVec {
                n: p.n,
                l: p.l,
                m,
                coeffs,
            });
        }
    }
    Ok(out)
}

/// One (atom, l, m) block: projectors for n = 1.. and the coupling matrix.
#[derive(Clone, Debug)]
struct NlBlock {
    vecs: Vec<Vec<C64>>,
    h: DMatrix<f64>,
}

/// Separable nonlocal operator for a whole structure.
#[derive(Clone, Debug, Default)]
pub struct Nonlocal {
    blocks: Vec<NlBlock>,
}

impl Nonlocal {
    pub fn new(atoms: &[(&PseudopotentialSpec, Vec3)], basis: &PwBasis) -> Result<Nonlocal> {
        let mut blocks = Vec::new();
        for (spec, pos) in atoms {
            let projs = projectors_recip(spec, basis, pos)?;
            let Some(lmax) = spec.lmax() else { continue };
            for l in 0..=lmax {
                if spec.channel_size(l) == 0 {
                    continue;
                }
                for m in -(l as i32)..=(l as i32) {
                    let mut sel: Vec<&ProjectorVec> =
                        projs.iter().filter(|p| p.l == l && p.m == m).collect();
                    sel.sort_by_key(|p| p.n);
                    blocks.push(NlBlock {
                        vecs: sel.iter().map(|p| p.coeffs.clone()).collect(),
                        h: spec.hcoef[l].clone(),
                    });
                }
            }
        }
        Ok(Nonlocal { blocks })
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// out += Σ p_n h_nn′ ⟨p_n′|ψ⟩
    pub fn apply_add(&self, psi: &[C64], out: &mut [C64]) {
        for b in &self.blocks {
            let proj: Vec<C64> = b.vecs.iter().map(|p| crate::orbital::dot(p, psi)).collect();
            for (n, pn) in b.vecs.iter().enumerate() {
                let mut c = C64::new(0.0, 0.0);
                for (k, pk) in proj.iter().enumerate() {
                    c += b.h[(n, k)] * pk;
                }
                if c != C64::new(0.0, 0.0) {
                    crate::orbital::axpy(out, c, pn);
                }
            }
        }
    }
}

/// Separable application of V_NL to an orbital.
pub fn vnl_apply(nl: &Nonlocal, psi: &Orbital) -> Orbital {
    let mut out = Orbital::zeros(psi.len());
    nl.apply_add(&psi.coeffs, &mut out.coeffs);
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct Atom {
    pub species: String,
    /// Fractional coordinates wrapped to [0,1).
    pub frac: Vec3,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct StructureAtoms {
    pub atoms: Vec<Atom>,
}

fn wrap01(x: f64) -> f64 {
    let y = x - x.floor();
    if y >= 1.0 {
        0.0
    } else {
        y
    }
}

impl StructureAtoms {
    pub fn new(atoms: Vec<(String, Vec3)>) -> StructureAtoms {
        StructureAtoms {
            atoms: atoms
                .into_iter()
                .map(|(species, f)| Atom {
                    species,
                    frac: Vec3::new(wrap01(f.x), wrap01(f.y), wrap01(f.z)),
                })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Plain text: one `species fx fy fz` line per atom, `#` comments.
    pub fn parse(text: &str, name: &str) -> Result<StructureAtoms> {
        let mut atoms = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 4 {
                return Err(Error::parse(name, i + 1, "expected `species fx fy fz`"));
            }
            let mut f = [0.0; 3];
            for k in 0..3 {
                f[k] = parts[k + 1]
                    .parse()
                    .map_err(|_| Error::parse(name, i + 1, format!("bad coordinate {}", parts[k + 1])))?;
            }
            atoms.push((parts[0].to_string(), Vec3::new(f[0], f[1], f[2])));
        }
        Ok(StructureAtoms::new(atoms))
    }

    pub fn read(path: &std::path::Path) -> Result<StructureAtoms> {
        let text = crate::error::read_text(path)?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for a in &self.atoms {
            s.push_str(&format!("{} {:e} {:e} {:e}\n", a.species, a.frac.x, a.frac.y, a.frac.z));
        }
        s
    }
}

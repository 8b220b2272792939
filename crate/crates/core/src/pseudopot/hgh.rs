//! Analytic separable pseudopotentials of the Hartwigsen–Goedecker–Hutter
//! form, sampled onto a radial grid. These are the potentials shipped in
//! `data/`.

use nalgebra::DMatrix;

use super::{Projector, PseudopotentialSpec};

#[derive(Clone, Debug)]
pub struct HghParams {
    pub species: String,
    pub zion: f64,
    pub rloc: f64,
    pub c: [f64; 4],
    /// Per channel l: (r_l, h matrix entries h11, h12, h22); h12 and h22 may be 0.
    pub channels: Vec<(f64, Vec<f64>)>,
    pub core_radii: (f64, f64),
}

/// Default radial grid: uniform, 0..20 bohr.
pub fn default_grid() -> Vec<f64> {
    (0..4001).map(|i| i as f64 * 0.005).collect()
}

pub fn local_potential(p: &HghParams, r: f64) -> f64 {
    let x = r / p.rloc;
    let coul = -p.zion * super::erf_over_r(r, std::f64::consts::SQRT_2 * p.rloc);
    let poly = p.c[0] + p.c[1] * x * x + p.c[2] * x.powi(4) + p.c[3] * x.powi(6);
    coul + (-0.5 * x * x).exp() * poly
}

/// Normalized radial projector p_i^l(r), i = 1, 2.
pub fn projector(l: usize, i: usize, rl: f64, r: f64) -> f64 {
    let e = l as f64 + (4 * i - 1) as f64 / 2.0;
    let norm = std::f64::consts::SQRT_2 / (rl.powf(e) * libm::tgamma(e).sqrt());
    norm * r.powi((l + 2 * (i - 1)) as i32) * (-r * r / (2.0 * rl * rl)).exp()
}

pub fn build(p: &HghParams, grid: &[f64]) -> PseudopotentialSpec {
    let vlocal = grid.iter().map(|&r| local_potential(p, r)).collect();
    let mut projectors = Vec::new();
    let mut hcoef = Vec::new();
    for (l, (rl, h)) in p.channels.iter().enumerate() {
        let nproj = if h.len() > 1 && (h[1] != 0.0 || h[2] != 0.0) { 2 } else { 1 };
        let mut m = DMatrix::zeros(nproj, nproj);
        m[(0, 0)] = h[0];
        if nproj == 2 {
            m[(0, 1)] = h[1];
            m[(1, 0)] = h[1];
            m[(1, 1)] = h[2];
        }
        for i in 1..=nproj {
            projectors.push(Projector {
                n: i,
                l,
                radial: grid.iter().map(|&r| projector(l, i, *rl, r)).collect(),
            });
        }
        hcoef.push(m);
    }
    PseudopotentialSpec {
        species: p.species.clone(),
        zval: p.zion,
        rgrid: grid.to_vec(),
        vlocal,
        projectors,
        hcoef,
        core_radii: p.core_radii,
    }
}

/// Local-only hydrogen potential (LDA parameter set).
pub fn hydrogen_params() -> HghParams {
    HghParams {
        species: "H".into(),
        zion: 1.0,
        rloc: 0.2,
        c: [-4.180237, 0.725075, 0.0, 0.0],
        channels: vec![],
        core_radii: (0.8, 0.8),
    }
}

/// One-valence-electron lithium with s and p projectors (LDA parameter set).
pub fn lithium_params() -> HghParams {
    HghParams {
        species: "Li".into(),
        zion: 1.0,
        rloc: 0.787553,
        c: [-1.892612, 0.286060, 0.0, 0.0],
        channels: vec![
            (0.666375, vec![1.858811, 0.0, 0.0]),
            (1.079306, vec![-0.005895, 0.0, 0.0]),
        ],
        core_radii: (1.869, 1.551),
    }
}

pub fn hydrogen() -> PseudopotentialSpec {
    build(&hydrogen_params(), &default_grid())
}

pub fn lithium() -> PseudopotentialSpec {
    build(&lithium_params(), &default_grid())
}

/// Pure Gaussian-smeared Coulomb −Z erf(r/σ)/r with no projectors; its
/// transform is known in closed form.
pub fn smeared_coulomb(species: &str, z: f64, sigma: f64, grid: &[f64]) -> PseudopotentialSpec {
    PseudopotentialSpec {
        species: species.into(),
        zval: z,
        rgrid: grid.to_vec(),
        vlocal: grid.iter().map(|&r| -z * super::erf_over_r(r, sigma)).collect(),
        projectors: vec![],
        hcoef: vec![],
        core_radii: (sigma, sigma),
    }
}

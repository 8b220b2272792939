//! Central finite differences of the CI and RHF energies against the
//! analytic gradients.

use nalgebra::Matrix3;
use num_complex::Complex64 as C64;
use pwcovo::covo::{ci_gradient, ci_solve, h1_elements, h2_elements};
use pwcovo::groundstate::{rhf_energy, rhf_gradient};
use pwcovo::integrals::Context;
use pwcovo::orbital::{dot, make_real, project_out, Orbital};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{toy_context, toy_orbitals};

pub const STEP: f64 = 1e-5;

pub fn direction(ctx: &Context, seed: u64, away_from: &[Orbital]) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut d: Vec<C64> = ctx
        .basis
        .g2
        .iter()
        .map(|&g2| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5) * (-g2 / 4.0).exp())
        .collect();
    if ctx.real_mode() {
        make_real(&mut d, &ctx.basis);
    }
    project_out(&mut d, away_from);
    d
}

pub fn shifted(o: &Orbital, d: &[C64], t: f64) -> Orbital {
    Orbital::new(o.coeffs.iter().zip(d).map(|(a, b)| a + b * t).collect())
}

pub fn ground(ctx: &Context, filled: &[Orbital], e: &Orbital) -> f64 {
    let h = h1_elements(ctx, filled, e) + h2_elements(ctx, filled, e) + Matrix3::identity() * C64::new(ctx.eshift, 0.0);
    ci_solve(&h, &Matrix3::identity()).unwrap().0[0]
}

/// Relative error between 2 Re⟨g, d⟩ and the central difference of the energy.
pub fn ci_fd_error(real: bool, nfilled: usize, seed: u64) -> f64 {
    let ctx = toy_context(real);
    let orbs = toy_orbitals(&ctx, nfilled + 1, seed);
    let (filled, e) = orbs.split_at(nfilled);
    let e = &e[0];
    let h = h1_elements(&ctx, filled, e) + h2_elements(&ctx, filled, e) + Matrix3::identity() * C64::new(ctx.eshift, 0.0);
    let (_, c) = ci_solve(&h, &Matrix3::identity()).unwrap();
    let g = ci_gradient(&ctx, filled, e, &c.column(0).into(), &[]);
    let d = direction(&ctx, seed + 100, filled);
    let analytic = 2.0 * dot(&g, &d).re;
    let fd = (ground(&ctx, filled, &shifted(e, &d, STEP)) - ground(&ctx, filled, &shifted(e, &d, -STEP))) / (2.0 * STEP);
    (analytic - fd).abs() / fd.abs().max(1e-12)
}

pub fn rhf_fd_error(real: bool, npairs: usize, seed: u64) -> f64 {
    let ctx = toy_context(real);
    let orbs = toy_orbitals(&ctx, npairs, seed);
    let g = rhf_gradient(&ctx, &orbs);
    let dirs: Vec<Vec<C64>> = (0..npairs).map(|k| direction(&ctx, seed + 200 + k as u64, &[])).collect();
    let analytic: f64 = g.iter().zip(&dirs).map(|(gk, dk)| 2.0 * dot(gk, dk).re).sum();
    let at = |t: f64| -> f64 {
        let x: Vec<Orbital> = orbs.iter().zip(&dirs).map(|(o, d)| shifted(o, d, t)).collect();
        rhf_energy(&ctx, &x)
    };
    let fd = (at(STEP) - at(-STEP)) / (2.0 * STEP);
    (analytic - fd).abs() / fd.abs().max(1e-12)
}


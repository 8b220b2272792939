mod common;

use common::*;
use num_complex::Complex64 as C64;
use pwcovo::covo::{ci_gradient, ci_matrices, generate_covos, CovoOptions};
use pwcovo::groundstate::{rhf_energy, rhf_gradient, solve_rhf, RhfInit, RhfOptions};
use pwcovo::orbital::{dot, orthonormality_error, real_gauge, Orbital};

fn norm(v: &[C64]) -> f64 {
    dot(v, v).re.sqrt()
}

#[test]
fn rhf_is_stationary_and_repeatable() {
    let ctx = toy_context(true);
    let opts = RhfOptions { tol: 1e-9, max_iter: 2000 };
    let a = solve_rhf(&ctx, 1, RhfInit::Seed(3), &opts).unwrap();
    let b = solve_rhf(&ctx, 1, RhfInit::Seed(11), &opts).unwrap();
    assert!(a.converged);
    assert!((a.etotal - b.etotal).abs() < 1e-8, "{} vs {}", a.etotal, b.etotal);
    assert!((rhf_energy(&ctx, &a.filled) - a.etotal).abs() < 1e-12);
    assert!(a.history.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    // projected gradient vanishes at the minimum
    let mut g = rhf_gradient(&ctx, &a.filled).remove(0);
    pwcovo::orbital::project_out(&mut g, &a.filled);
    assert!(norm(&g) < 1e-5, "{}", norm(&g));
    // random orbitals sit above the ground state
    for s in 0..4 {
        assert!(rhf_energy(&ctx, &toy_orbitals(&ctx, 1, s)) > a.etotal);
    }
}

#[test]
fn covo_set_invariants() {
    for real in [true, false] {
        let ctx = toy_context(real);
        let scf = solve_rhf(&ctx, 1, RhfInit::Seed(1), &RhfOptions { tol: 1e-9, max_iter: 2000 }).unwrap();
        let opts = CovoOptions { tol: 1e-7, ..CovoOptions::default() };
        let set = generate_covos(&ctx, &scf.filled, 3, &opts).unwrap();
        let all = set.all_orbitals(&scf.filled);
        assert!(orthonormality_error(&all) < 1e-8);
        if real {
            assert!(set.virtuals.iter().all(|v| v.is_real(&ctx.basis, 1e-10)));
        }
        // two electrons in two orbitals: the 3×3 singlet space is the full space
        assert!((set.energies[0] - set.ci_energies[0]).abs() < 1e-8);
        assert!(set.energies[0] < scf.etotal);
        assert!(set.energies.windows(2).all(|w| w[1] <= w[0] + 1e-10), "{:?}", set.energies);
        // each COVO is stationary on the unit sphere orthogonal to the earlier ones
        for (k, v) in set.virtuals.iter().enumerate() {
            let m = ci_matrices(&ctx, &scf.filled, v).unwrap();
            let (_, c0) = m.ground();
            let g = ci_gradient(&ctx, &scf.filled, v, &c0, &set.virtuals[..=k]);
            assert!(norm(&g) < 1e-5, "real={real} k={k}: {}", norm(&g));
            assert!((m.e[0] - set.ci_energies[k]).abs() < 1e-9);
        }
    }
}

#[test]
fn ci_energy_ignores_orbital_phase() {
    let ctx = toy_context(false);
    let orbs = toy_orbitals(&ctx, 3, 21);
    let base = ci_matrices(&ctx, &orbs[..2], &orbs[2]).unwrap().e;
    let phase = C64::from_polar(1.0, 0.73);
    let rot = Orbital::new(orbs[2].coeffs.iter().map(|c| c * phase).collect());
    let core = Orbital::new(orbs[0].coeffs.iter().map(|c| c * phase.conj()).collect());
    let e2 = ci_matrices(&ctx, &[core, orbs[1].clone()], &rot).unwrap().e;
    assert!((base - e2).amax() < 1e-12);
}

#[test]
fn bad_inputs_are_rejected() {
    let ctx = toy_context(true);
    let orbs = toy_orbitals(&ctx, 2, 4);
    assert!(generate_covos(&ctx, &orbs[..1], 0, &CovoOptions::default()).is_err());
    let mut skew = orbs.clone();
    skew[1] = Orbital::new(orbs[0].coeffs.iter().zip(&orbs[1].coeffs).map(|(a, b)| a * 0.5 + b).collect());
    assert!(generate_covos(&ctx, &skew, 1, &CovoOptions::default()).is_err());
}

#[test]
fn real_gauge_recovers_a_real_span() {
    let ctx = toy_context(true);
    let real = toy_orbitals(&ctx, 2, 9);
    // mix by a complex unitary
    let (c, s) = (0.6, 0.8);
    let u = [[C64::new(c, 0.0), C64::new(0.0, s)], [C64::new(0.0, s), C64::new(c, 0.0)]];
    let mut mixed: Vec<Orbital> = (0..2)
        .map(|k| Orbital::new((0..ctx.basis.len()).map(|i| u[k][0] * real[0].coeffs[i] + u[k][1] * real[1].coeffs[i]).collect()))
        .collect();
    assert!(!mixed[0].is_real(&ctx.basis, 1e-3));
    let left = real_gauge(&mut mixed, &ctx.basis, 1e-10);
    assert!(left < 1e-14);
    assert!(orthonormality_error(&mixed) < 1e-12);
    for m in &mixed {
        assert!(m.is_real(&ctx.basis, 1e-12));
        let inside: f64 = real.iter().map(|r| dot(&r.coeffs, &m.coeffs).norm_sqr()).sum();
        assert!((inside - 1.0).abs() < 1e-12);
    }
    // a single travelling wave has no real gauge
    let idx = ctx.basis.g2.iter().position(|&g| g > 0.0).unwrap();
    let mut wave = vec![Orbital::plane_wave(&ctx.basis, idx)];
    let before = wave[0].clone();
    assert!((real_gauge(&mut wave, &ctx.basis, 1e-10) - 0.5).abs() < 1e-12);
    assert_eq!(wave[0], before);
}

#[test]
fn complex_and_real_modes_agree() {
    let opts = RhfOptions { tol: 1e-8, max_iter: 2000 };
    let mut energies = Vec::new();
    for real in [true, false] {
        let ctx = toy_context(real);
        let scf = solve_rhf(&ctx, 1, RhfInit::Seed(5), &opts).unwrap();
        let set = generate_covos(&ctx, &scf.filled, 2, &CovoOptions { tol: 1e-7, ..CovoOptions::default() }).unwrap();
        energies.push((scf.etotal, set.energies));
    }
    assert!((energies[0].0 - energies[1].0).abs() < 1e-9);
    for (a, b) in energies[0].1.iter().zip(&energies[1].1) {
        assert!((a - b).abs() < 1e-7, "{a} vs {b}");
    }
}

mod common;

use common::*;
use nalgebra::Matrix3;
use num_complex::Complex64 as C64;
use pwcovo::covo::{ci_matrices, h1_elements, h2_elements};
use pwcovo::fci::{dense_matrix, enumerate_dets, solve_ground};

fn check_elements(real: bool, nfilled: usize, seed: u64) -> f64 {
    let ctx = toy_context(real);
    let orbs = toy_orbitals(&ctx, nfilled + 1, seed);
    let (filled, e) = orbs.split_at(nfilled);
    let (r1, r2) = oracle_elements(&ctx, filled, &e[0]);
    let d1 = max_abs_diff(&h1_elements(&ctx, filled, &e[0]), &r1);
    let d2 = max_abs_diff(&h2_elements(&ctx, filled, &e[0]), &r2);
    d1.max(d2)
}

#[test]
fn elements_match_slater_condon_real_orbitals() {
    for n in 1..=3 {
        let d = check_elements(true, n, 10 + n as u64);
        assert!(d < 1e-10, "nfilled {n}: deviation {d:e}");
    }
}

#[test]
fn elements_match_slater_condon_complex_orbitals() {
    for n in 1..=3 {
        let d = check_elements(false, n, 20 + n as u64);
        assert!(d < 1e-10, "nfilled {n}: deviation {d:e}");
    }
}

#[test]
fn ci_matrices_are_hermitian_with_unit_overlap() {
    let ctx = toy_context(false);
    let orbs = toy_orbitals(&ctx, 3, 5);
    let m = ci_matrices(&ctx, &orbs[..2], &orbs[2]).unwrap();
    let herm = (m.h - m.h.adjoint()).iter().map(|v| v.norm()).fold(0.0, f64::max);
    assert!(herm < 1e-9);
    let s_err = (m.s - Matrix3::<C64>::identity()).iter().map(|v| v.norm()).fold(0.0, f64::max);
    assert!(s_err < 1e-10);
    assert!(m.e[0] <= m.e[1] && m.e[1] <= m.e[2]);
}

#[test]
fn sq_hamiltonian_matches_oracle_integrals() {
    for real in [true, false] {
        let ctx = toy_context(real);
        let orbs = toy_orbitals(&ctx, 4, 3);
        let ham = ctx.build_sq_hamiltonian(&orbs).unwrap();
        let ints = OracleIntegrals::new(&ctx, &orbs);
        let n = orbs.len();
        for p in 0..n {
            for q in 0..n {
                let want = ints.h(p, q) + if p == q { ints.d[p] } else { 0.0 };
                assert!((ham.h1(p, q) - want).norm() < 1e-10, "h1 {p}{q}");
                for r in 0..n {
                    for s in 0..n {
                        assert!((ham.h2(p, q, r, s) - ints.g(p, q, r, s)).norm() < 1e-10, "h2 {p}{q}{r}{s}");
                    }
                }
            }
        }
        let (e1, e2) = ham.symmetry_error();
        assert!(e1 < 1e-10 && e2 < 1e-9);
    }
}

#[test]
fn fci_matches_oracle_determinant_matrix() {
    let ctx = toy_context(true);
    let orbs = toy_orbitals(&ctx, 3, 8);
    let ham = ctx.build_sq_hamiltonian(&orbs).unwrap();
    let ints = OracleIntegrals::new(&ctx, &orbs);
    let (_, m) = oracle_fci_matrix(&ints, 2, ctx.eshift);
    let herm = m.clone().map(|v| v.re);
    let e_ref = herm.clone().symmetric_eigen().eigenvalues.min();
    let fci = solve_ground(&ham).unwrap();
    assert!((fci.e0 - e_ref).abs() < 1e-10, "{} vs {}", fci.e0, e_ref);

    // same spectrum from the library's dense determinant matrix
    let basis = enumerate_dets(3, 2, 0).unwrap();
    let dense = dense_matrix(&ham, &basis).unwrap();
    let mut a: Vec<f64> = dense.symmetric_eigen().eigenvalues.iter().map(|v| v + ctx.eshift).collect();
    let mut b: Vec<f64> = herm.symmetric_eigen().eigenvalues.iter().copied().collect();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 1e-10);
    }
}

mod common;

use common::fd::{ci_fd_error, rhf_fd_error};
use common::*;
use pwcovo::covo::ci_gradient;
use pwcovo::orbital::dot;

#[test]
fn ci_gradient_matches_finite_differences() {
    for real in [true, false] {
        for n in 1..=2 {
            let err = ci_fd_error(real, n, 40 + n as u64);
            assert!(err < 1e-5, "real {real} nfilled {n}: relative error {err:e}");
        }
    }
}

#[test]
fn rhf_gradient_matches_finite_differences() {
    for real in [true, false] {
        for n in 1..=2 {
            let err = rhf_fd_error(real, n, 60 + n as u64);
            assert!(err < 1e-5, "real {real} pairs {n}: relative error {err:e}");
        }
    }
}

#[test]
fn ci_gradient_is_orthogonal_to_constraints() {
    let ctx = toy_context(false);
    let orbs = toy_orbitals(&ctx, 4, 9);
    let (filled, rest) = orbs.split_at(2);
    let m = pwcovo::covo::ci_matrices(&ctx, filled, &rest[1]).unwrap();
    let g = ci_gradient(&ctx, filled, &rest[1], &m.c.column(0).into(), &rest[..1]);
    for o in &orbs[..3] {
        assert!(dot(&o.coeffs, &g).norm() < 1e-12);
    }
}

mod common;

use std::f64::consts::PI;

use common::*;
use nalgebra::{DMatrix, Vector3};
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use pwcovo::lattice::{build_basis, build_cell, Cell, PwBasis};
use pwcovo::orbital::Orbital;
use pwcovo::pseudopot::radial::{bessel_transform, sph_bessel};
use pwcovo::pseudopot::{hgh, read_pseudopotential, vnl_apply, write_pseudopotential, Nonlocal};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn skewed_cell(a: f64, shear: [f64; 3]) -> Cell {
    build_cell(
        Vector3::new(a, 0.0, 0.0),
        Vector3::new(shear[0], a * 1.1, 0.0),
        Vector3::new(shear[1], shear[2], a * 0.9),
    )
    .unwrap()
}

fn random_coeffs(n: usize, seed: u64) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect()
}

/// Brute-force count of lattice vectors with |G|² ≤ ecut (Ry).
fn count_sphere(cell: &Cell, ecut: f64) -> usize {
    let bmin = cell.b.iter().map(|b| b.norm()).fold(f64::INFINITY, f64::min);
    let vol_b = cell.b[0].dot(&cell.b[1].cross(&cell.b[2])).abs();
    let n = (ecut.sqrt() * cell.b.iter().map(|b| b.norm()).product::<f64>() / vol_b / bmin).ceil() as i64 + 4;
    let mut c = 0;
    for h in -n..=n {
        for k in -n..=n {
            for l in -n..=n {
                if cell.gvec(h, k, l).norm_squared() <= ecut {
                    c += 1;
                }
            }
        }
    }
    c
}

#[test]
fn reciprocal_vectors_are_dual() {
    let c = skewed_cell(7.0, [0.8, -0.4, 1.2]);
    for i in 0..3 {
        for j in 0..3 {
            let want = if i == j { 2.0 * PI } else { 0.0 };
            assert!((c.a[i].dot(&c.b[j]) - want).abs() < 1e-12);
        }
    }
    assert!((c.omega - c.amat().determinant().abs()).abs() < 1e-10);
    assert!(build_cell(Vector3::x(), Vector3::x(), Vector3::z()).is_err());
    assert!(Cell::cubic(-1.0).is_err());
}

#[test]
fn basis_matches_brute_force_sphere() {
    for (cell, ecut) in [(Cell::cubic(10.0).unwrap(), 8.0), (skewed_cell(7.0, [0.8, -0.4, 1.2]), 6.5)] {
        let b = build_basis(&cell, ecut).unwrap();
        assert_eq!(b.len(), count_sphere(&cell, ecut));
        assert!(b.g2.iter().all(|&g| g <= ecut));
        for (g, m) in b.gvecs.iter().zip(&b.mesh_index) {
            let back = b.mesh_gvec(*m);
            assert!((back - cell.gvec(g[0] as i64, g[1] as i64, g[2] as i64)).norm() < 1e-12);
        }
    }
    assert!(build_basis(&Cell::cubic(10.0).unwrap(), 0.0).is_err());
}

fn parseval_checks(b: &PwBasis, seed: u64) {
    let p = random_coeffs(b.len(), seed);
    let q = random_coeffs(b.len(), seed + 1);
    let pr = b.to_real(&p);
    let qr = b.to_real(&q);
    let dv = b.cell.omega / b.mesh_len() as f64;
    let direct: C64 = p.iter().zip(&q).map(|(a, c)| a.conj() * c).sum();
    let real: C64 = pr.iter().zip(&qr).map(|(a, c)| a.conj() * c).sum::<C64>() * dv;
    assert!((direct - real).norm() < 1e-12 * direct.norm().max(1.0));
    let back = b.from_real(pr);
    let err = p.iter().zip(&back).map(|(a, c)| (a - c).norm()).fold(0.0, f64::max);
    assert!(err < 1e-12, "round trip {err}");
}

#[test]
fn real_space_value_matches_plane_wave_sum() {
    let b = toy_basis();
    let c = random_coeffs(b.len(), 3);
    let vals = b.to_real(&c);
    for idx in [0usize, 17, 200, 511] {
        let r = b.cell.frac_to_cart(&b.mesh_frac(idx));
        let want: C64 = b.gcart.iter().zip(&c).map(|(g, ci)| ci * C64::from_polar(1.0, g.dot(&r))).sum::<C64>()
            / b.cell.omega.sqrt();
        assert!((vals[idx] - want).norm() < 1e-12);
    }
}

/// ∫ r^{l+2} e^{-a r²} j_l(G r) dr = √π Gˡ e^{-G²/4a} / (2^{l+2} a^{l+3/2}).
fn gaussian_hankel(l: usize, a: f64, g: f64) -> f64 {
    PI.sqrt() * g.powi(l as i32) * (-g * g / (4.0 * a)).exp() / (2f64.powi(l as i32 + 2) * a.powf(l as f64 + 1.5))
}

#[test]
fn spherical_bessel_values() {
    let x = 1e-4;
    assert!((sph_bessel(0, x) - (1.0 - x * x / 6.0)).abs() < 1e-15);
    assert!((sph_bessel(1, x) - x / 3.0 * (1.0 - x * x / 10.0)).abs() < 1e-15);
    assert!((sph_bessel(2, x) - x * x / 15.0).abs() < 1e-15);
    for &x in &[0.3, 2.0, 17.5] {
        assert!((sph_bessel(0, x) - x.sin() / x).abs() < 1e-12);
        assert!((sph_bessel(1, x) - (x.sin() / (x * x) - x.cos() / x)).abs() < 1e-12);
        let j2 = (3.0 / (x * x) - 1.0) * x.sin() / x - 3.0 * x.cos() / (x * x);
        assert!((sph_bessel(2, x) - j2).abs() < 1e-9, "x={x}");
    }
}

#[test]
fn radial_transform_of_gaussians() {
    let r = hgh::default_grid();
    for l in 0..3 {
        let a = 1.3;
        let f: Vec<f64> = r.iter().map(|&x| x.powi(l as i32) * (-a * x * x).exp()).collect();
        for &g in &[0.0, 0.7, 2.5, 6.0] {
            let want = gaussian_hankel(l, a, g);
            let got = bessel_transform(l, g, &r, &f);
            assert!((got - want).abs() < 1e-9, "l={l} g={g}: {got} vs {want}");
        }
    }
}

/// Dense V_NL(G, G′) from the closed-form Gaussian transform and the
/// addition theorem Σ_m T_lm(Ĝ) T_lm(Ĝ′) = (2l+1)/(4π) P_l(Ĝ·Ĝ′).
fn dense_nonlocal(b: &PwBasis, params: &hgh::HghParams, pos: &Vector3<f64>) -> DMatrix<C64> {
    let n = b.len();
    let mut v = DMatrix::zeros(n, n);
    for (l, (rl, h)) in params.channels.iter().enumerate() {
        let e = l as f64 + 1.5;
        let norm = 2f64.sqrt() / (rl.powf(e) * libm::tgamma(e).sqrt());
        let a = 0.5 / (rl * rl);
        let f: Vec<f64> = b.g2.iter().map(|&g2| norm * gaussian_hankel(l, a, g2.sqrt())).collect();
        for i in 0..n {
            for j in 0..n {
                let (gi, gj) = (b.gcart[i], b.gcart[j]);
                let (ni, nj) = (gi.norm(), gj.norm());
                let cos = if ni < 1e-12 || nj < 1e-12 { 0.0 } else { gi.dot(&gj) / (ni * nj) };
                let pl = match l {
                    0 => 1.0,
                    1 if ni < 1e-12 || nj < 1e-12 => 0.0,
                    1 => cos,
                    _ => unreachable!(),
                };
                let radial = 4.0 * PI * (2 * l + 1) as f64 / b.cell.omega * pl * f[i] * f[j] * h[0];
                v[(i, j)] += C64::from_polar(radial, -(gi - gj).dot(pos));
            }
        }
    }
    v
}

#[test]
fn separable_nonlocal_matches_dense_kernel() {
    let b = toy_basis();
    let spec = hgh::lithium();
    let pos = b.cell.frac_to_cart(&Vector3::new(0.31, 0.52, 0.47));
    let nl = Nonlocal::new(&[(&spec, pos)], &b).unwrap();
    let dense = dense_nonlocal(&b, &hgh::lithium_params(), &pos);
    assert!((dense.adjoint() - &dense).camax() < 1e-12);
    for seed in 0..3 {
        let psi = Orbital::new(random_coeffs(b.len(), 40 + seed));
        let got = vnl_apply(&nl, &psi);
        let want = &dense * DMatrix::from_column_slice(b.len(), 1, &psi.coeffs);
        let err = got.coeffs.iter().zip(want.iter()).map(|(a, c)| (a - c).norm()).fold(0.0, f64::max);
        assert!(err < 1e-8, "{err}");
    }
}

#[test]
fn pseudopotential_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for spec in [hgh::lithium(), hgh::hydrogen()] {
        let path = dir.path().join(format!("{}.pp", spec.species));
        write_pseudopotential(&spec, &path).unwrap();
        let back = read_pseudopotential(&path).unwrap();
        assert_eq!(back.species, spec.species);
        assert_eq!(back.projectors.len(), spec.projectors.len());
        let dv = back.vlocal.iter().zip(&spec.vlocal).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(dv < 1e-10);
    }
    let shipped = read_pseudopotential(&data_path("Li.pp")).unwrap();
    assert_eq!(shipped.zval, 1.0);
    let err = read_pseudopotential(&dir.path().join("missing.pp")).unwrap_err().to_string();
    assert!(err.contains("missing.pp"));
}

proptest! {
    #![proptest_config(prop_cases(24))]

    #[test]
    fn basis_is_closed_under_negation(a in 5.0f64..9.0, s0 in -1.0f64..1.0, s1 in -1.0f64..1.0, ecut in 2.0f64..6.0) {
        let cell = skewed_cell(a, [s0, s1, 0.3]);
        let b = build_basis(&cell, ecut).unwrap();
        for (i, g) in b.gvecs.iter().enumerate() {
            let j = b.neg[i];
            prop_assert_eq!(b.gvecs[j], [-g[0], -g[1], -g[2]]);
            prop_assert_eq!(b.mesh_neg(b.mesh_index[i]), b.mesh_index[j]);
        }
        // the mesh holds every pair difference without aliasing
        for d in 0..3 {
            let span = b.gvecs.iter().map(|g| g[d]).max().unwrap();
            prop_assert!(b.mesh[d] as i32 > 4 * span);
        }
    }

    #[test]
    fn transforms_preserve_inner_products(a in 5.0f64..9.0, s0 in -1.0f64..1.0, seed in 0u64..1000) {
        let b = build_basis(&skewed_cell(a, [s0, 0.2, -0.5]), 4.0).unwrap();
        parseval_checks(&b, seed);
    }
}

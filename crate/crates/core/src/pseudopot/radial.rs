//! Spherical Bessel functions, real (tesseral) harmonics and radial
//! Bessel transforms on tabulated grids.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::lattice::Vec3;

/// Spherical Bessel function j_l(x) for l ≤ 2 (series near the origin).
pub fn sph_bessel(l: usize, x: f64) -> f64 {
    let x = x.abs();
    if x < 0.5 {
        // j_l(x) = x^l/(2l+1)!! Σ_k (−x²/2)^k / (k! (2l+3)(2l+5)…(2l+2k+1))
        let mut df = 1.0;
        for i in 0..=l {
            df *= (2 * i + 1) as f64;
        }
        let mut term = x.powi(l as i32) / df;
        let mut sum = term;
        let y = -0.5 * x * x;
        for k in 1..20 {
            term *= y / (k as f64 * (2 * l + 2 * k + 1) as f64);
            sum += term;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        return sum;
    }
    let (s, c) = x.sin_cos();
    match l {
        0 => s / x,
        1 => s / (x * x) - c / x,
        2 => (3.0 / (x * x) - 1.0) * s / x - 3.0 * c / (x * x),
        _ => {
            // upward recurrence, adequate for the x ≥ 0.5 branch at moderate l
            let mut jm = s / x;
            let mut j = s / (x * x) - c / x;
            for n in 1..l {
                let jp = (2 * n + 1) as f64 / x * j - jm;
                jm = j;
                j = jp;
            }
            j
        }
    }
}

/// Real spherical harmonic T_lm on the direction of `v`, m = −l..l.
/// For v = 0 returns δ_l0/√(4π).
pub fn tesseral(l: usize, m: i32, v: &Vec3) -> f64 {
    let r = v.norm();
    if r == 0.0 {
        return if l == 0 { 1.0 / (4.0 * PI).sqrt() } else { 0.0 };
    }
    let (x, y, z) = (v.x / r, v.y / r, v.z / r);
    match (l, m) {
        (0, 0) => 1.0 / (4.0 * PI).sqrt(),
        (1, -1) => (3.0 / (4.0 * PI)).sqrt() * y,
        (1, 0) => (3.0 / (4.0 * PI)).sqrt() * z,
        (1, 1) => (3.0 / (4.0 * PI)).sqrt() * x,
        (2, -2) => (15.0 / (4.0 * PI)).sqrt() * x * y,
        (2, -1) => (15.0 / (4.0 * PI)).sqrt() * y * z,
        (2, 0) => (5.0 / (16.0 * PI)).sqrt() * (3.0 * z * z - 1.0),
        (2, 1) => (15.0 / (4.0 * PI)).sqrt() * x * z,
        (2, 2) => (15.0 / (16.0 * PI)).sqrt() * (x * x - y * y),
        _ => 0.0,
    }
}

/// Above this value of G·Δr the trapezoid rule under-resolves the Bessel
/// oscillation and the piecewise-linear Filon rule takes over.
const FILON_THRESHOLD: f64 = 1.0;

/// ∫ f(r) j_l(G r) r² dr over the tabulated grid.
pub fn bessel_transform(l: usize, g: f64, r: &[f64], f: &[f64]) -> f64 {
    let n = r.len();
    let mut hmax: f64 = 0.0;
    for i in 1..n {
        hmax = hmax.max(r[i] - r[i - 1]);
    }
    if l == 0 && g * hmax > FILON_THRESHOLD {
        return filon_j0(g, r, f);
    }
    let mut s = 0.0;
    for i in 1..n {
        let h = r[i] - r[i - 1];
        let a = f[i - 1] * sph_bessel(l, g * r[i - 1]) * r[i - 1] * r[i - 1];
        let b = f[i] * sph_bessel(l, g * r[i]) * r[i] * r[i];
        s += 0.5 * h * (a + b);
    }
    s
}

/// Piecewise-linear Filon rule: (1/G) ∫ u(r) sin(G r) dr with u = f·r linear
/// on each interval, integrated exactly.
fn filon_j0(g: f64, r: &[f64], f: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 1..r.len() {
        let (r0, r1) = (r[i - 1], r[i]);
        let h = r1 - r0;
        if h <= 0.0 {
            continue;
        }
        let (u0, u1) = (f[i - 1] * r0, f[i] * r1);
        let slope = (u1 - u0) / h;
        // ∫ (u0 + slope (r − r0)) sin(g r) dr
        let (s0, c0) = (g * r0).sin_cos();
        let (s1, c1) = (g * r1).sin_cos();
        let part = -(u1 * c1 - u0 * c0) / g + slope * (s1 - s0) / (g * g);
        s += part;
    }
    s / g
}

/// Check that an integrand has decayed at the end of its grid.
pub fn check_decay(r: &[f64], f: &[f64], what: &str) -> Result<()> {
    let n = r.len();
    if n < 2 {
        return Err(Error::Pseudo(format!("{what}: radial grid too short")));
    }
    let scale = f
        .iter()
        .zip(r)
        .map(|(v, x)| (v * x * x).abs())
        .fold(0.0, f64::max)
        .max(1e-300);
    let tail = (f[n - 1] * r[n - 1] * r[n - 1]).abs();
    if tail > 1e-8 * scale {
        return Err(Error::Pseudo(format!(
            "{what}: radial quadrature nonconvergent, integrand tail {tail:e} at r={} relative to peak {scale:e}",
            r[n - 1]
        )));
    }
    Ok(())
}

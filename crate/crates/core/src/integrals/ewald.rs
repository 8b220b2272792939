//! Ewald sum for point charges in a periodic cell.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::lattice::{Cell, Vec3, C64};

#[derive(Clone, Debug)]
pub struct EwaldOptions {
    /// Real-space cutoff in units of 1/ε.
    pub real_cut: f64,
    /// Reciprocal cutoff in units of ε.
    pub recip_cut: f64,
    /// Refuse to evaluate more lattice or reciprocal terms than this.
    pub max_terms: u64,
}

impl Default for EwaldOptions {
    fn default() -> Self {
        EwaldOptions {
            real_cut: 6.5,
            recip_cut: 2.0 * 40f64.sqrt(),
            max_terms: 400_000_000,
        }
    }
}

/// A splitting parameter that keeps both sums short for this cell.
pub fn default_epsilon(cell: &Cell) -> f64 {
    EwaldOptions::default().real_cut / cell.inscribed_radius()
}

pub fn ewald_energy(cell: &Cell, charges: &[(Vec3, f64)], eps: f64) -> Result<f64> {
    ewald_energy_with(cell, charges, eps, &EwaldOptions::default())
}

/// E = E_recip + E_real + E_self + E_background for charges at Cartesian
/// positions. Independent of ε once both sums are converged.
pub fn ewald_energy_with(
    cell: &Cell,
    charges: &[(Vec3, f64)],
    eps: f64,
    opts: &EwaldOptions,
) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::Ewald(format!("epsilon must be positive, got {eps}")));
    }
    if libm::erfc(opts.real_cut) > 1e-15 || (-opts.recip_cut * opts.recip_cut / 4.0).exp() > 1e-15 {
        return Err(Error::Ewald(
            "configured truncation leaves tails above 1e-15; sums would not converge".into(),
        ));
    }
    let omega = cell.omega;
    let rc = opts.real_cut / eps;
    let gc = opts.recip_cut * eps;

    let nr = [0, 1, 2].map(|i| (rc * cell.b[i].norm() / (2.0 * PI)).ceil() as i64 + 1);
    let ng = [0, 1, 2].map(|i| (gc * cell.a[i].norm() / (2.0 * PI)).ceil() as i64);
    let real_terms = (2 * nr[0] + 1) as u64 * (2 * nr[1] + 1) as u64 * (2 * nr[2] + 1) as u64
        * (charges.len() * charges.len()) as u64;
    let recip_terms = (2 * ng[0] + 1) as u64 * (2 * ng[1] + 1) as u64 * (2 * ng[2] + 1) as u64
        * charges.len() as u64;
    if real_terms > opts.max_terms || recip_terms > opts.max_terms {
        return Err(Error::Ewald(format!(
            "sums need {real_terms} real and {recip_terms} reciprocal terms, above the limit {}",
            opts.max_terms
        )));
    }

    // real space, with each pair displacement folded to the minimum image first
    let mut e_real = 0.0;
    for (ri, zi) in charges {
        for (rj, zj) in charges {
            let df = cell.cart_to_frac(&(rj - ri));
            let d = cell.frac_to_cart(&df.map(|x| x - x.round()));
            for a in -nr[0]..=nr[0] {
                for b in -nr[1]..=nr[1] {
                    for c in -nr[2]..=nr[2] {
                        let t = d + cell.frac_to_cart(&Vec3::new(a as f64, b as f64, c as f64));
                        let r = t.norm();
                        if r < 1e-12 || r > rc {
                            continue;
                        }
                        e_real += 0.5 * zi * zj * libm::erfc(eps * r) / r;
                    }
                }
            }
        }
    }

    // reciprocal space over half of the G lattice, using separable phases
    let fracs: Vec<Vec3> = charges.iter().map(|(r, _)| cell.cart_to_frac(r)).collect();
    let phase_tables: Vec<[Vec<C64>; 3]> = fracs
        .iter()
        .map(|f| {
            [0, 1, 2].map(|k| {
                (-ng[k]..=ng[k])
                    .map(|h| C64::from_polar(1.0, 2.0 * PI * h as f64 * f[k]))
                    .collect()
            })
        })
        .collect();
    let gc2 = gc * gc;
    let mut e_recip = 0.0;
    for h in 0..=ng[0] {
        for k in -ng[1]..=ng[1] {
            if h == 0 && k < 0 {
                continue;
            }
            for l in -ng[2]..=ng[2] {
                if h == 0 && k == 0 && l <= 0 {
                    continue;
                }
                let g2 = cell.gvec(h, k, l).norm_squared();
                if g2 > gc2 {
                    continue;
                }
                let mut s = C64::new(0.0, 0.0);
                for (t, (_, z)) in phase_tables.iter().zip(charges) {
                    s += *z
                        * t[0][(h + ng[0]) as usize]
                        * t[1][(k + ng[1]) as usize]
                        * t[2][(l + ng[2]) as usize];
                }
                e_recip += 2.0 * (-g2 / (4.0 * eps * eps)).exp() / g2 * s.norm_sqr();
            }
        }
    }
    e_recip *= 2.0 * PI / omega;

    let zsum: f64 = charges.iter().map(|c| c.1).sum();
    let z2sum: f64 = charges.iter().map(|c| c.1 * c.1).sum();
    let e_self = -eps / PI.sqrt() * z2sum;
    let e_bg = -PI / (2.0 * eps * eps * omega) * zsum * zsum;
    Ok(e_recip + e_real + e_self + e_bg)
}

/// Q² M / (2 r_s) with r_s = (3Ω/4π)^{1/3}.
pub fn charge_correction(cell: &Cell, q: f64, madelung: f64) -> f64 {
    let rs = (3.0 * cell.omega / (4.0 * PI)).cbrt();
    charge_correction_rs(q, madelung, rs)
}

/// Q² M / (2 r_s).
pub fn charge_correction_rs(q: f64, madelung: f64, rs: f64) -> f64 {
    q * q * madelung / (2.0 * rs)
}

/// Σ_{I<J} Z_I Z_J / |R_I − R_J| without images.
pub fn free_space_ion_energy(charges: &[(Vec3, f64)]) -> f64 {
    let mut e = 0.0;
    for i in 0..charges.len() {
        for j in 0..i {
            e += charges[i].1 * charges[j].1 / (charges[i].0 - charges[j].0).norm();
        }
    }
    e
}

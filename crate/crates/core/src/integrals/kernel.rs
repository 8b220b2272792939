//! Coulomb kernels on the FFT mesh: bare periodic 4π/G², the cutoff
//! ("filtered") kernel V_f and the spherically truncated free-space kernel.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::lattice::{signed_freq, Fft3, PwBasis, Vec3, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelKind {
    PeriodicBare,
    Filtered,
    AperiodicFreeSpace,
}

#[derive(Clone, Debug)]
pub struct CoulombKernel {
    pub kind: KernelKind,
    pub n: u32,
    pub rcut: f64,
    /// K(G) on the FFT mesh (Ha·bohr³).
    pub values: Vec<f64>,
}

impl CoulombKernel {
    pub fn at(&self, mesh_idx: usize) -> f64 {
        self.values[mesh_idx]
    }

    pub fn zero(basis: &PwBasis, kind: KernelKind) -> CoulombKernel {
        CoulombKernel {
            kind,
            n: 0,
            rcut: 0.0,
            values: vec![0.0; basis.mesh_len()],
        }
    }
}

/// V_f(R) = (1 − (1 − e^{−(R/Rcut)^{N+2}})^N) / R.
pub fn vf_real(r: f64, n: u32, rcut: f64) -> f64 {
    if r == 0.0 {
        return f64::INFINITY;
    }
    (1.0 - one_minus_f(r, n, rcut)) / r
}

/// (1 − e^{−x^{N+2}})^N, computed without cancellation for small x.
fn one_minus_f(r: f64, n: u32, rcut: f64) -> f64 {
    let y = (r / rcut).powi(n as i32 + 2);
    (-(-y).exp_m1()).powi(n as i32)
}

pub fn bare_kernel(basis: &PwBasis) -> CoulombKernel {
    let values = basis
        .mesh_g2
        .iter()
        .map(|&g2| if g2 == 0.0 { 0.0 } else { 4.0 * PI / g2 })
        .collect();
    CoulombKernel {
        kind: KernelKind::PeriodicBare,
        n: 0,
        rcut: 0.0,
        values,
    }
}

/// 4π(1 − cos(|G| Rc))/|G|², with 2πRc² at G = 0.
pub fn aperiodic_kernel(basis: &PwBasis, rc: f64) -> CoulombKernel {
    let values = basis
        .mesh_g2
        .iter()
        .map(|&g2| {
            if g2 == 0.0 {
                2.0 * PI * rc * rc
            } else {
                4.0 * PI * (1.0 - (g2.sqrt() * rc).cos()) / g2
            }
        })
        .collect();
    CoulombKernel {
        kind: KernelKind::AperiodicFreeSpace,
        n: 0,
        rcut: rc,
        values,
    }
}

/// Cutoff-Coulomb kernel V_f sampled with the minimum-image distance.
///
/// V_f is split as erfc(R/η)/R, transformed analytically, plus a smooth
/// remainder that is sampled on a refined mesh and transformed by FFT.
pub fn filtered_kernel(basis: &PwBasis, n: u32, rcut: f64) -> Result<CoulombKernel> {
    let cell = &basis.cell;
    let rin = cell.inscribed_radius();
    if n < 1 {
        return Err(Error::Kernel("filter exponent N must be ≥ 1".into()));
    }
    if !(rcut > 0.0) || rcut > rin * (1.0 + 1e-9) {
        return Err(Error::Kernel(format!(
            "Rcut = {rcut} bohr must lie in (0, {rin}] (half the smallest cell width)"
        )));
    }
    let eta = rin / 6.0;
    let h_req = (eta / 3.0).min(rcut / (3.0 * (n as f64 + 2.0)));
    let mut m = 1usize;
    for i in 0..3 {
        let need = (cell.a[i].norm() / (h_req * basis.mesh[i] as f64)).ceil() as usize;
        m = m.max(need);
    }
    let fine = basis.mesh.map(|x| x * m);
    if fine.iter().any(|&x| x > 400) {
        return Err(Error::Kernel(format!(
            "refined kernel mesh {fine:?} too large; reduce N or increase Rcut"
        )));
    }
    let fft = Fft3::new(fine);
    let mut data = vec![C64::new(0.0, 0.0); fft.len()];
    let cubic_like = (0..3).all(|i| (0..3).all(|j| i == j || cell.a[i][j].abs() < 1e-14));
    let mut idx = 0;
    for i0 in 0..fine[0] {
        for i1 in 0..fine[1] {
            for i2 in 0..fine[2] {
                let f = Vec3::new(
                    i0 as f64 / fine[0] as f64,
                    i1 as f64 / fine[1] as f64,
                    i2 as f64 / fine[2] as f64,
                );
                let r = if cubic_like {
                    let w = f.map(|x| x - x.round());
                    cell.frac_to_cart(&w).norm()
                } else {
                    cell.min_image_norm(&f)
                };
                let s = if r == 0.0 {
                    2.0 / (eta * PI.sqrt())
                } else {
                    libm::erf(r / eta) / r - one_minus_f(r, n, rcut) / r
                };
                data[idx] = C64::new(s, 0.0);
                idx += 1;
            }
        }
    }
    fft.forward(&mut data);
    let omega = cell.omega;
    let [n0, n1, n2] = basis.mesh;
    let mut values = Vec::with_capacity(basis.mesh_len());
    for i0 in 0..n0 {
        for i1 in 0..n1 {
            for i2 in 0..n2 {
                let h = [signed_freq(i0, n0), signed_freq(i1, n1), signed_freq(i2, n2)];
                let j = [0, 1, 2].map(|k| h[k].rem_euclid(fine[k] as i64) as usize);
                let ks = omega * data[(j[0] * fine[1] + j[1]) * fine[2] + j[2]].re;
                let g2 = cell.gvec(h[0], h[1], h[2]).norm_squared();
                let ka = if g2 == 0.0 {
                    PI * eta * eta
                } else {
                    4.0 * PI * (-(-g2 * eta * eta / 4.0).exp_m1()) / g2
                };
                values.push(ka + ks);
            }
        }
    }
    Ok(CoulombKernel {
        kind: KernelKind::Filtered,
        n,
        rcut,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vf_limits() {
        let rc = 5.0;
        let r = rc / 10.0;
        assert!((vf_real(r, 8, rc) * r - 1.0).abs() < 1e-6);
        assert!(vf_real(3.0 * rc, 8, rc).abs() < 1e-8 / rc);
    }
}

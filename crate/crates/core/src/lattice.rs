//! Periodic cell, Γ-point plane-wave basis and the 3D FFT used for every
//! real/reciprocal transform.
//!
//! Conventions: `fft_forward` computes f(G) = (1/N) Σ_r f(r) e^{-iG·r} and
//! `fft_inverse` computes f(r) = Σ_G f(G) e^{iG·r}, so a constant maps to its
//! G=0 coefficient and a single plane wave maps to a unit delta.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Vec3 = Vector3<f64>;

/// Largest FFT dimension accepted unless overridden.
pub const DEFAULT_MAX_MESH: usize = 512;

#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub a: [Vec3; 3],
    pub b: [Vec3; 3],
    pub omega: f64,
    pub v_bz: f64,
}

pub fn build_cell(a1: Vec3, a2: Vec3, a3: Vec3) -> Result<Cell> {
    let omega = a1.dot(&a2.cross(&a3));
    let scale = a1.norm() * a2.norm() * a3.norm();
    if !omega.is_finite() || scale == 0.0 || omega.abs() <= 1e-12 * scale {
        return Err(Error::Lattice("lattice vectors are linearly dependent".into()));
    }
    if omega < 0.0 {
        return Err(Error::Lattice("lattice vectors are left-handed".into()));
    }
    let f = 2.0 * PI / omega;
    let b = [a2.cross(&a3) * f, a3.cross(&a1) * f, a1.cross(&a2) * f];
    Ok(Cell {
        a: [a1, a2, a3],
        b,
        omega,
        v_bz: (2.0 * PI).powi(3) / omega,
    })
}

impl Cell {
    pub fn cubic(l: f64) -> Result<Cell> {
        build_cell(
            Vec3::new(l, 0.0, 0.0),
            Vec3::new(0.0, l, 0.0),
            Vec3::new(0.0, 0.0, l),
        )
    }

    /// Matrix with the lattice vectors as columns.
    pub fn amat(&self) -> Matrix3<f64> {
        Matrix3::from_columns(&self.a)
    }

    pub fn frac_to_cart(&self, f: &Vec3) -> Vec3 {
        self.a[0] * f.x + self.a[1] * f.y + self.a[2] * f.z
    }

    pub fn cart_to_frac(&self, r: &Vec3) -> Vec3 {
        Vec3::new(
            self.b[0].dot(r) / (2.0 * PI),
            self.b[1].dot(r) / (2.0 * PI),
            self.b[2].dot(r) / (2.0 * PI),
        )
    }

    pub fn gvec(&self, h: i64, k: i64, l: i64) -> Vec3 {
        self.b[0] * h as f64 + self.b[1] * k as f64 + self.b[2] * l as f64
    }

    /// Radius of the largest sphere that fits in the cell (half the smallest
    /// distance between opposite faces).
    pub fn inscribed_radius(&self) -> f64 {
        let mut r = f64::INFINITY;
        for i in 0..3 {
            r = r.min(self.omega / self.a[(i + 1) % 3].cross(&self.a[(i + 2) % 3]).norm());
        }
        0.5 * r
    }

    /// Minimum-image distance for a displacement given in fractional units.
    pub fn min_image_norm(&self, df: &Vec3) -> f64 {
        let w = Vec3::new(
            df.x - df.x.round(),
            df.y - df.y.round(),
            df.z - df.z.round(),
        );
        let mut best = f64::INFINITY;
        for i in -1..=1 {
            for j in -1..=1 {
                for k in -1..=1 {
                    let v = self.frac_to_cart(&(w + Vec3::new(i as f64, j as f64, k as f64)));
                    best = best.min(v.norm());
                }
            }
        }
        best
    }
}

/// 3D complex FFT on a fixed mesh (row-major, last index fastest).
#[derive(Clone)]
pub struct Fft3 {
    dims: [usize; 3],
    fwd: [Arc<dyn Fft<f64>>; 3],
    inv: [Arc<dyn Fft<f64>>; 3],
}

impl std::fmt::Debug for Fft3 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Fft3({:?})", self.dims)
    }
}

impl Fft3 {
    pub fn new(dims: [usize; 3]) -> Fft3 {
        let mut planner = FftPlanner::new();
        let fwd = [0, 1, 2].map(|i| planner.plan_fft_forward(dims[i]));
        let inv = [0, 1, 2].map(|i| planner.plan_fft_inverse(dims[i]));
        Fft3 { dims, fwd, inv }
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn run(&self, data: &mut [C64], plans: &[Arc<dyn Fft<f64>>; 3]) {
        let [n0, n1, n2] = self.dims;
        for row in data.chunks_exact_mut(n2) {
            plans[2].process(row);
        }
        let mut line = vec![C64::new(0.0, 0.0); n1.max(n0)];
        for i0 in 0..n0 {
            for i2 in 0..n2 {
                for i1 in 0..n1 {
                    line[i1] = data[(i0 * n1 + i1) * n2 + i2];
                }
                plans[1].process(&mut line[..n1]);
                for i1 in 0..n1 {
                    data[(i0 * n1 + i1) * n2 + i2] = line[i1];
                }
            }
        }
        let stride = n1 * n2;
        for j in 0..stride {
            for i0 in 0..n0 {
                line[i0] = data[i0 * stride + j];
            }
            plans[0].process(&mut line[..n0]);
            for i0 in 0..n0 {
                data[i0 * stride + j] = line[i0];
            }
        }
    }

    /// In place: f(G) = (1/N) Σ_r f(r) e^{-iG·r}.
    pub fn forward(&self, data: &mut [C64]) {
        self.run(data, &self.fwd);
        let s = 1.0 / self.len() as f64;
        for v in data.iter_mut() {
            *v *= s;
        }
    }

    /// In place: f(r) = Σ_G f(G) e^{iG·r}.
    pub fn inverse(&self, data: &mut [C64]) {
        self.run(data, &self.inv);
    }
}

/// Field sampled on the real-space FFT mesh.
#[derive(Clone, Debug, PartialEq)]
pub struct RealField {
    pub dims: [usize; 3],
    pub values: Vec<C64>,
}

/// Fourier coefficients on the full FFT mesh.
#[derive(Clone, Debug, PartialEq)]
pub struct RecipField {
    pub dims: [usize; 3],
    pub values: Vec<C64>,
}

fn check_shape(fft: &Fft3, dims: [usize; 3], len: usize) -> Result<()> {
    if dims != fft.dims() || len != fft.len() {
        return Err(Error::Shape {
            expected: fft.len(),
            got: len,
        });
    }
    Ok(())
}

pub fn fft_forward(fft: &Fft3, f: &RealField) -> Result<RecipField> {
    check_shape(fft, f.dims, f.values.len())?;
    let mut values = f.values.clone();
    fft.forward(&mut values);
    Ok(RecipField { dims: f.dims, values })
}

pub fn fft_inverse(fft: &Fft3, g: &RecipField) -> Result<RealField> {
    check_shape(fft, g.dims, g.values.len())?;
    let mut values = g.values.clone();
    fft.inverse(&mut values);
    Ok(RealField { dims: g.dims, values })
}

/// Signed frequency for mesh index `i` of a dimension of length `n`.
pub fn signed_freq(i: usize, n: usize) -> i64 {
    if i <= n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

fn wrap_index(h: i64, n: usize) -> usize {
    h.rem_euclid(n as i64) as usize
}

/// Smallest 2^a 3^b 5^c that is ≥ n.
pub fn good_fft_size(n: usize) -> usize {
    let mut m = n.max(1);
    loop {
        let mut k = m;
        for p in [2, 3, 5] {
            while k.is_multiple_of(p) {
                k /= p;
            }
        }
        if k == 1 {
            return m;
        }
        m += 1;
    }
}

#[derive(Clone, Debug)]
pub struct BasisOptions {
    pub max_mesh: usize,
    /// Use this mesh instead of the automatic choice (must still be alias-free).
    pub mesh: Option<[usize; 3]>,
}

impl Default for BasisOptions {
    fn default() -> Self {
        BasisOptions {
            max_mesh: DEFAULT_MAX_MESH,
            mesh: None,
        }
    }
}

/// Plane waves with ½|G|² ≤ ecut (Hartree) plus the FFT mesh they live on.
#[derive(Clone, Debug)]
pub struct PwBasis {
    pub cell: Cell,
    pub ecut_ry: f64,
    pub gvecs: Vec<[i32; 3]>,
    pub gcart: Vec<Vec3>,
    pub g2: Vec<f64>,
    pub mesh: [usize; 3],
    /// Position of each basis vector on the FFT mesh.
    pub mesh_index: Vec<usize>,
    /// Index of −G for each basis vector.
    pub neg: Vec<usize>,
    /// |G|² for every mesh point (signed frequencies).
    pub mesh_g2: Vec<f64>,
    pub fft: Fft3,
}

pub fn build_basis(cell: &Cell, ecut_ry: f64) -> Result<PwBasis> {
    build_basis_with(cell, ecut_ry, &BasisOptions::default())
}

pub fn build_basis_with(cell: &Cell, ecut_ry: f64, opts: &BasisOptions) -> Result<PwBasis> {
    if !(ecut_ry > 0.0) || !ecut_ry.is_finite() {
        return Err(Error::Basis(format!("ecut must be positive, got {ecut_ry}")));
    }
    // ½|G|² ≤ ecut_ry/2  ⇔  |G|² ≤ ecut_ry
    let g2max = ecut_ry;
    let gmax = g2max.sqrt();
    let bound = |i: usize| (gmax * cell.a[i].norm() / (2.0 * PI)).floor() as i64 + 1;
    let (bh, bk, bl) = (bound(0), bound(1), bound(2));
    let mut list: Vec<([i32; 3], f64)> = Vec::new();
    for h in -bh..=bh {
        for k in -bk..=bk {
            for l in -bl..=bl {
                let g = cell.gvec(h, k, l);
                let g2 = g.norm_squared();
                if g2 <= g2max * (1.0 + 1e-12) {
                    list.push(([h as i32, k as i32, l as i32], g2));
                }
            }
        }
    }
    // Exact ties in |G|² must not be broken by rounding noise.
    let key = |g2: f64| (g2 * 1e9).round() as i64;
    list.sort_by(|a, b| key(a.1).cmp(&key(b.1)).then(a.0.cmp(&b.0)));

    let mut hmax = [0usize; 3];
    for (g, _) in &list {
        for i in 0..3 {
            hmax[i] = hmax[i].max(g[i].unsigned_abs() as usize);
        }
    }
    let mesh = match opts.mesh {
        Some(m) => {
            for i in 0..3 {
                if m[i] < 4 * hmax[i] + 1 {
                    return Err(Error::Basis(format!(
                        "mesh {:?} is not alias-free (needs ≥ {} along axis {i})",
                        m,
                        4 * hmax[i] + 1
                    )));
                }
            }
            m
        }
        None => [0, 1, 2].map(|i| good_fft_size(4 * hmax[i] + 1)),
    };
    if mesh.iter().any(|&n| n > opts.max_mesh) {
        return Err(Error::Basis(format!(
            "FFT mesh {:?} exceeds maximum dimension {}",
            mesh, opts.max_mesh
        )));
    }
    let gvecs: Vec<[i32; 3]> = list.iter().map(|x| x.0).collect();
    let g2: Vec<f64> = list.iter().map(|x| x.1).collect();
    let gcart: Vec<Vec3> = gvecs
        .iter()
        .map(|g| cell.gvec(g[0] as i64, g[1] as i64, g[2] as i64))
        .collect();
    let mesh_index: Vec<usize> = gvecs
        .iter()
        .map(|g| {
            let i0 = wrap_index(g[0] as i64, mesh[0]);
            let i1 = wrap_index(g[1] as i64, mesh[1]);
            let i2 = wrap_index(g[2] as i64, mesh[2]);
            (i0 * mesh[1] + i1) * mesh[2] + i2
        })
        .collect();
    let lookup: HashMap<[i32; 3], usize> = gvecs.iter().enumerate().map(|(i, g)| (*g, i)).collect();
    let neg: Vec<usize> = gvecs
        .iter()
        .map(|g| lookup[&[-g[0], -g[1], -g[2]]])
        .collect();
    let mut mesh_g2 = Vec::with_capacity(mesh[0] * mesh[1] * mesh[2]);
    for i0 in 0..mesh[0] {
        for i1 in 0..mesh[1] {
            for i2 in 0..mesh[2] {
                let g = cell.gvec(
                    signed_freq(i0, mesh[0]),
                    signed_freq(i1, mesh[1]),
                    signed_freq(i2, mesh[2]),
                );
                mesh_g2.push(g.norm_squared());
            }
        }
    }
    Ok(PwBasis {
        cell: cell.clone(),
        ecut_ry,
        gvecs,
        gcart,
        g2,
        mesh,
        mesh_index,
        neg,
        mesh_g2,
        fft: Fft3::new(mesh),
    })
}

impl PwBasis {
    pub fn len(&self) -> usize {
        self.gvecs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gvecs.is_empty()
    }

    pub fn mesh_len(&self) -> usize {
        self.mesh[0] * self.mesh[1] * self.mesh[2]
    }

    /// Largest |G|² that can appear in a pair density.
    pub fn density_g2max(&self) -> f64 {
        4.0 * self.ecut_ry
    }

    /// Cartesian G for a mesh index using signed frequencies.
    pub fn mesh_gvec(&self, idx: usize) -> Vec3 {
        let [_, n1, n2] = self.mesh;
        let i2 = idx % n2;
        let i1 = (idx / n2) % n1;
        let i0 = idx / (n1 * n2);
        self.cell.gvec(
            signed_freq(i0, self.mesh[0]),
            signed_freq(i1, n1),
            signed_freq(i2, n2),
        )
    }

    /// Index of −G on the mesh.
    pub fn mesh_neg(&self, idx: usize) -> usize {
        let [n0, n1, n2] = self.mesh;
        let i2 = idx % n2;
        let i1 = (idx / n2) % n1;
        let i0 = idx / (n1 * n2);
        (((n0 - i0) % n0) * n1 + (n1 - i1) % n1) * n2 + (n2 - i2) % n2
    }

    /// Fractional coordinates of a real-space mesh point.
    pub fn mesh_frac(&self, idx: usize) -> Vec3 {
        let [n0, n1, n2] = self.mesh;
        let i2 = idx % n2;
        let i1 = (idx / n2) % n1;
        let i0 = idx / (n1 * n2);
        Vec3::new(
            i0 as f64 / n0 as f64,
            i1 as f64 / n1 as f64,
            i2 as f64 / n2 as f64,
        )
    }

    /// Orbital coefficients → real-space values ψ(r) = Ω^{-1/2} Σ_G ψ(G) e^{iG·r}.
    pub fn to_real(&self, coeffs: &[C64]) -> Vec<C64> {
        let mut data = vec![C64::new(0.0, 0.0); self.mesh_len()];
        for (c, &m) in coeffs.iter().zip(&self.mesh_index) {
            data[m] = *c;
        }
        self.fft.inverse(&mut data);
        let s = 1.0 / self.cell.omega.sqrt();
        for v in data.iter_mut() {
            *v *= s;
        }
        data
    }

    /// Inverse of `to_real` restricted to the basis: c(G) = √Ω/N Σ_r f(r) e^{-iG·r}.
    pub fn from_real(&self, mut data: Vec<C64>) -> Vec<C64> {
        self.fft.forward(&mut data);
        let s = self.cell.omega.sqrt();
        self.mesh_index.iter().map(|&m| data[m] * s).collect()
    }

    /// Stable hash of the basis definition, used to validate checkpoints.
    pub fn hash_hex(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut h = Sha256::new();
        for v in &self.cell.a {
            for x in v.iter() {
                h.update(x.to_bits().to_le_bytes());
            }
        }
        h.update(self.ecut_ry.to_bits().to_le_bytes());
        for g in &self.gvecs {
            for x in g {
                h.update(x.to_le_bytes());
            }
        }
        let out = h.finalize();
        out.iter().take(16).map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_2pi_two_rydberg() {
        let cell = Cell::cubic(2.0 * PI).unwrap();
        // |G|² ≤ 2: 0, six (1,0,0) and twelve (1,1,0)
        let b = build_basis(&cell, 2.0).unwrap();
        assert_eq!(b.len(), 19);
        assert_eq!(b.gvecs[0], [0, 0, 0]);
        let b = build_basis(&cell, 1.0).unwrap();
        assert_eq!(b.len(), 7);
    }

    #[test]
    fn good_sizes() {
        assert_eq!(good_fft_size(17), 18);
        assert_eq!(good_fft_size(7), 8);
        assert_eq!(good_fft_size(11), 12);
        assert_eq!(good_fft_size(26), 27);
    }

    #[test]
    fn left_handed_rejected() {
        let r = build_cell(
            Vec3::new(0.0, 1.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.0, 0.0, 1.0),
        );
        assert!(r.is_err());
    }
}

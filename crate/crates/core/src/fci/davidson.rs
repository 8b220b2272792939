use nalgebra::DMatrix;

use super::{fix_sign, DeterminantBasis, Sigma};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct DavidsonOptions {
    pub tol: f64,
    pub max_subspace: usize,
    pub max_iter: usize,
    /// Skip the dense path even for small problems.
    pub force_iterative: bool,
}

impl Default for DavidsonOptions {
    fn default() -> Self {
        DavidsonOptions {
            tol: 1e-10,
            max_subspace: 30,
            max_iter: 500,
            force_iterative: false,
        }
    }
}

fn dotv(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn symmetrize(v: &mut [f64], basis: &DeterminantBasis) {
    for i in 0..v.len() {
        let t = basis.transpose_index(i);
        if i < t {
            let m = 0.5 * (v[i] + v[t]);
            v[i] = m;
            v[t] = m;
        }
    }
}

/// Returns false if `v` vanished after orthogonalization.
fn orth_normalize(v: &mut [f64], space: &[Vec<f64>]) -> bool {
    let n0 = dotv(v, v).sqrt();
    for _ in 0..2 {
        for b in space {
            let s = dotv(b, v);
            for (x, y) in v.iter_mut().zip(b) {
                *x -= s * y;
            }
        }
    }
    let n = dotv(v, v).sqrt();
    if n <= 1e-10 * n0.max(1e-300) || n < 1e-14 {
        return false;
    }
    for x in v.iter_mut() {
        *x /= n;
    }
    true
}

/// Lowest eigenpair by Davidson with a diagonal preconditioner. With `sym`
/// every vector is kept in the α↔β symmetric subspace.
pub fn davidson(sigma: &Sigma, basis: &DeterminantBasis, sym: bool, opts: &DavidsonOptions) -> Result<(f64, Vec<f64>)> {
    let n = basis.len();
    let diag = sigma.diagonal();
    let start = (0..n).min_by(|&a, &b| diag[a].total_cmp(&diag[b])).unwrap();
    let mut v0 = vec![0.0; n];
    v0[start] = 1.0;
    if sym {
        symmetrize(&mut v0, basis);
    }
    let mut space: Vec<Vec<f64>> = Vec::new();
    let mut hspace: Vec<Vec<f64>> = Vec::new();
    if !orth_normalize(&mut v0, &space) {
        return Err(Error::Fci("empty Davidson start".into()));
    }
    space.push(v0);
    hspace.push(sigma.apply(&space[0]));
    let mut last = (0.0, vec![0.0; n], f64::INFINITY);
    for _ in 0..opts.max_iter {
        let m = space.len();
        let a = DMatrix::from_fn(m, m, |i, j| 0.5 * (dotv(&space[i], &hspace[j]) + dotv(&space[j], &hspace[i])));
        let eig = a.symmetric_eigen();
        let k = eig.eigenvalues.imin();
        let theta = eig.eigenvalues[k];
        let y = eig.eigenvectors.column(k);
        let mut x = vec![0.0; n];
        let mut hx = vec![0.0; n];
        for i in 0..m {
            for j in 0..n {
                x[j] += y[i] * space[i][j];
                hx[j] += y[i] * hspace[i][j];
            }
        }
        let r: Vec<f64> = hx.iter().zip(&x).map(|(h, xi)| h - theta * xi).collect();
        let rn = dotv(&r, &r).sqrt();
        last = (theta, x.clone(), rn);
        if rn < opts.tol {
            fix_sign(&mut x);
            return Ok((theta, x));
        }
        if m >= opts.max_subspace {
            space = vec![x.clone()];
            hspace = vec![hx];
        }
        let mut t: Vec<f64> = r
            .iter()
            .zip(&diag)
            .map(|(ri, di)| {
                let d = di - theta;
                if d.abs() < 1e-8 {
                    ri / 1e-8
                } else {
                    ri / d
                }
            })
            .collect();
        if sym {
            symmetrize(&mut t, basis);
        }
        if !orth_normalize(&mut t, &space) {
            // preconditioned correction collapsed; fall back to the residual
            t = r;
            if sym {
                symmetrize(&mut t, basis);
            }
            if !orth_normalize(&mut t, &space) {
                break;
            }
        }
        hspace.push(sigma.apply(&t));
        space.push(t);
    }
    if last.2 < 1e3 * opts.tol {
        let mut x = last.1;
        fix_sign(&mut x);
        return Ok((last.0, x));
    }
    Err(Error::NotConverged {
        what: "Davidson",
        iterations: opts.max_iter,
        gnorm: last.2,
    })
}

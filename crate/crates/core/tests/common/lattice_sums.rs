//! Closed-form lattice sums used as Ewald references.

use std::f64::consts::PI;

use nalgebra::Vector3;
use pwcovo::lattice::Cell;

/// Rock-salt Madelung constant from the sech² lattice series over odd m, n.
pub fn benson_madelung() -> f64 {
    let mut s = 0.0;
    for m in (1..200).step_by(2) {
        for n in (1..200).step_by(2) {
            let x = 0.5 * PI * ((m * m + n * n) as f64).sqrt();
            s += 1.0 / x.cosh().powi(2);
        }
    }
    12.0 * PI * s
}

pub fn rock_salt(a: f64) -> (Cell, Vec<(Vector3<f64>, f64)>) {
    let cell = Cell::cubic(a).unwrap();
    let fcc = [[0.0, 0.0, 0.0], [0.5, 0.5, 0.0], [0.5, 0.0, 0.5], [0.0, 0.5, 0.5]];
    let mut q = Vec::new();
    for f in fcc {
        let p = Vector3::new(f[0], f[1], f[2]) * a;
        q.push((p, 1.0));
        q.push((p + Vector3::new(0.5 * a, 0.0, 0.0), -1.0));
    }
    (cell, q)
}

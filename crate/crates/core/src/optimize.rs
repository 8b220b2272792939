//! Preconditioned Polak–Ribière conjugate gradient over sets of orthonormal
//! orbitals, kept orthogonal to a fixed constraint set.
//!
//! Gradients are Wirtinger derivatives ∂E/∂ψ*(G); along a direction D the
//! energy changes as dE = 2 Re Σ ⟨∂E/∂ψ*, D⟩ dt.

use crate::error::Result;
use crate::lattice::{PwBasis, C64};
use crate::orbital::{dot, gram_schmidt, project_out, Orbital};

pub trait Objective {
    /// Energy and gradient with respect to the conjugate of each orbital.
    fn eval(&self, x: &[Orbital]) -> Result<(f64, Vec<Vec<C64>>)>;

    fn energy(&self, x: &[Orbital]) -> Result<f64> {
        Ok(self.eval(x)?.0)
    }
}

#[derive(Clone, Debug)]
pub struct CgOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub restart: usize,
    pub real: bool,
}

impl Default for CgOptions {
    fn default() -> Self {
        CgOptions {
            tol: 1e-7,
            max_iter: 500,
            restart: 20,
            real: true,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CgOutcome {
    pub x: Vec<Orbital>,
    pub energy: f64,
    pub gnorm: f64,
    pub iterations: usize,
    /// Energy after each accepted step, starting with the initial energy.
    pub history: Vec<f64>,
    pub converged: bool,
}

fn tangent(g: &[Vec<C64>], x: &[Orbital], constraints: &[Orbital]) -> Vec<Vec<C64>> {
    g.iter()
        .map(|gk| {
            let mut t = gk.clone();
            project_out(&mut t, constraints);
            project_out(&mut t, x);
            t
        })
        .collect()
}

fn inner(a: &[Vec<C64>], b: &[Vec<C64>]) -> f64 {
    a.iter().zip(b).map(|(x, y)| dot(x, y).re).sum()
}

fn retract(
    x: &[Orbital],
    d: &[Vec<C64>],
    t: f64,
    constraints: &[Orbital],
    basis: &PwBasis,
    real: bool,
) -> Result<Vec<Orbital>> {
    let mut y: Vec<Orbital> = x
        .iter()
        .zip(d)
        .map(|(xk, dk)| {
            let mut o = xk.clone();
            crate::orbital::axpy(&mut o.coeffs, C64::new(t, 0.0), dk);
            if real {
                o.make_real(basis);
            }
            o
        })
        .collect();
    gram_schmidt(&mut y, constraints)?;
    if real {
        for o in &mut y {
            o.make_real(basis);
        }
    }
    Ok(y)
}

/// Minimize `obj` starting from `x0` (made orthonormal against `constraints`).
/// One direction per orbital.
type Block = Vec<Vec<C64>>;

/// Gradient norm below which a failed line search means the energy is
/// already flat to rounding (the predicted decrease ~|g|² is below ε|E|).
fn stall_floor(e: f64) -> f64 {
    (100.0 * f64::EPSILON * e.abs().max(1.0)).sqrt()
}

pub fn minimize<O: Objective>(
    obj: &O,
    x0: Vec<Orbital>,
    constraints: &[Orbital],
    basis: &PwBasis,
    opts: &CgOptions,
) -> Result<CgOutcome> {
    let mut x = x0;
    if opts.real {
        for o in &mut x {
            o.make_real(basis);
        }
    }
    gram_schmidt(&mut x, constraints)?;
    let (mut e, mut g) = obj.eval(&x)?;
    let mut t_vec = tangent(&g, &x, constraints);
    let mut gnorm = inner(&t_vec, &t_vec).sqrt();
    let mut history = vec![e];
    let mut d_prev: Option<Vec<Vec<C64>>> = None;
    let mut z_prev: Option<(Block, Block)> = None; // (T, Z)
    let mut step = 0.0f64;
    let mut iterations = 0;
    let mut since_restart = 0;
    let mut stalled = false;

    while gnorm >= opts.tol && iterations < opts.max_iter {
        iterations += 1;
        since_restart += 1;
        // kinetic preconditioner scaled by the current kinetic energy
        let kin: f64 = x
            .iter()
            .map(|o| o.coeffs.iter().zip(&basis.g2).map(|(c, g2)| 0.5 * g2 * c.norm_sqr()).sum::<f64>())
            .sum::<f64>()
            / x.len() as f64;
        let scale = kin.max(0.5);
        let mut z: Vec<Vec<C64>> = t_vec
            .iter()
            .map(|tk| tk.iter().zip(&basis.g2).map(|(v, g2)| v / (1.0 + 0.5 * g2 / scale)).collect())
            .collect();
        z = tangent(&z, &x, constraints);
        let beta = match (&z_prev, since_restart > opts.restart) {
            (Some((tp, zp)), false) => {
                let num = inner(&t_vec, &z) - inner(&t_vec, zp);
                let den = inner(tp, zp);
                if den > 0.0 {
                    (num / den).max(0.0)
                } else {
                    0.0
                }
            }
            _ => {
                since_restart = 1;
                0.0
            }
        };
        let mut d: Vec<Vec<C64>> = z.iter().map(|zk| zk.iter().map(|v| -v).collect()).collect();
        if beta > 0.0 {
            if let Some(dp) = &d_prev {
                for (dk, dpk) in d.iter_mut().zip(dp) {
                    crate::orbital::axpy(dk, C64::new(beta, 0.0), dpk);
                }
            }
        }
        d = tangent(&d, &x, constraints);
        let mut slope = 2.0 * inner(&g, &d);
        if slope >= 0.0 {
            d = z.iter().map(|zk| zk.iter().map(|v| -v).collect()).collect();
            slope = 2.0 * inner(&g, &d);
            since_restart = 1;
        }
        let dnorm = inner(&d, &d).sqrt();
        if dnorm == 0.0 || slope >= 0.0 {
            break;
        }
        let mut t1 = if step > 0.0 { step } else { (0.5 / dnorm).min(1.0) };

        // quadratic line search, shrinking until the energy goes down
        let mut accepted: Option<(f64, f64, Vec<Orbital>)> = None;
        for _ in 0..30 {
            let y1 = retract(&x, &d, t1, constraints, basis, opts.real)?;
            let e1 = obj.energy(&y1)?;
            let a = (e1 - e - slope * t1) / (t1 * t1);
            let mut best = if e1 < e { Some((t1, e1, y1)) } else { None };
            if a > 0.0 {
                let ts = (-slope / (2.0 * a)).clamp(0.05 * t1, 20.0 * t1);
                let ys = retract(&x, &d, ts, constraints, basis, opts.real)?;
                let es = obj.energy(&ys)?;
                if es < e && best.as_ref().map(|b| es < b.1).unwrap_or(true) {
                    best = Some((ts, es, ys));
                }
            } else if best.is_some() {
                // concave along D: try a longer step
                let tl = 2.0 * t1;
                let yl = retract(&x, &d, tl, constraints, basis, opts.real)?;
                let el = obj.energy(&yl)?;
                if el < best.as_ref().unwrap().1 {
                    best = Some((tl, el, yl));
                }
            }
            if best.is_some() {
                accepted = best;
                break;
            }
            t1 *= 0.25;
        }
        let Some((t, _, y)) = accepted else {
            // no decrease representable in floating point
            stalled = true;
            break;
        };
        step = t;
        x = y;
        let (e_new, g_new) = obj.eval(&x)?;
        e = e_new;
        g = g_new;
        history.push(e);
        z_prev = Some((t_vec, z));
        d_prev = Some(d);
        t_vec = tangent(&g, &x, constraints);
        gnorm = inner(&t_vec, &t_vec).sqrt();
    }
    Ok(CgOutcome {
        x,
        energy: e,
        gnorm,
        iterations,
        history,
        converged: gnorm < opts.tol || (stalled && gnorm < stall_floor(e)),
    })
}

//! Correlation-optimized virtual orbitals.
//!
//! For each new virtual ψ_e the ground root of the 3×3 singlet CI over
//! (Ψ_g, Ψ_e, Ψ_m) is minimized with respect to ψ_e, keeping ψ_e orthogonal
//! to the filled orbitals and to every earlier virtual.

mod elements;

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::integrals::Context;
use crate::lattice::C64;
use crate::optimize::{minimize, CgOptions, Objective};
use crate::orbital::{gram_schmidt, orthonormality_error, project_out, random_orbitals, real_gauge, Orbital};

pub use elements::{h1_elements, h2_elements, E as CSF_E, G as CSF_G, M as CSF_M};
use elements::{both, element_terms, Evaluator};

/// The 3×3 problem for one virtual orbital. `h` includes the ion shift on
/// the diagonal, so `e` are total energies.
#[derive(Clone, Debug)]
pub struct CiMatrices {
    pub h1: Matrix3<C64>,
    pub h2: Matrix3<C64>,
    pub h: Matrix3<C64>,
    pub s: Matrix3<C64>,
    /// Eigenvectors as columns, ordered like `e`.
    pub c: Matrix3<C64>,
    pub e: Vector3<f64>,
}

impl CiMatrices {
    pub fn ground(&self) -> (f64, Vector3<C64>) {
        (self.e[0], self.c.column(0).into())
    }
}

pub fn ci_matrices(ctx: &Context, filled: &[Orbital], psi_e: &Orbital) -> Result<CiMatrices> {
    let mut ev = Evaluator::new(ctx, filled, psi_e);
    let (h1, h2) = both(&mut ev);
    let s = Matrix3::identity();
    let h = h1 + h2 + s * C64::new(ctx.eshift, 0.0);
    let (e, c) = ci_solve(&h, &s)?;
    Ok(CiMatrices { h1, h2, h, s, c, e })
}

/// Generalized Hermitian eigenproblem H C = S C E via Cholesky of S.
/// Eigenvalues ascending; each vector scaled so c_g is real and ≥ 0;
/// degenerate roots ordered by |c_g| descending.
pub fn ci_solve(h: &Matrix3<C64>, s: &Matrix3<C64>) -> Result<(Vector3<f64>, Matrix3<C64>)> {
    let chol = s
        .cholesky()
        .ok_or_else(|| Error::LinAlg("CI overlap matrix is not positive definite".into()))?;
    let l = chol.l();
    let linv = l
        .try_inverse()
        .ok_or_else(|| Error::LinAlg("singular Cholesky factor".into()))?;
    let mut hp = linv * h * linv.adjoint();
    hp = (hp + hp.adjoint()) * C64::new(0.5, 0.0);
    let eig = hp.symmetric_eigen();
    let c_all = linv.adjoint() * eig.eigenvectors;
    let mut cols: Vec<(f64, Vector3<C64>)> = (0..3)
        .map(|i| {
            let mut v: Vector3<C64> = c_all.column(i).into();
            let k = if v[0].norm() > 1e-14 {
                0
            } else {
                (0..3).max_by(|&a, &b| v[a].norm().total_cmp(&v[b].norm())).unwrap()
            };
            let ph = v[k].conj() / v[k].norm();
            v *= ph;
            (eig.eigenvalues[i], v)
        })
        .collect();
    cols.sort_by(|a, b| {
        if (a.0 - b.0).abs() < 1e-12 {
            b.1[0].norm().total_cmp(&a.1[0].norm())
        } else {
            a.0.total_cmp(&b.0)
        }
    });
    let e = Vector3::new(cols[0].0, cols[1].0, cols[2].0);
    let c = Matrix3::from_columns(&[cols[0].1, cols[1].1, cols[2].1]);
    Ok((e, c))
}

fn raw_gradient(ev: &mut Evaluator, c0: &Vector3<C64>) -> Vec<C64> {
    let n = ev.nfilled();
    let mut real_acc = vec![C64::new(0.0, 0.0); ev.mesh_len()];
    let mut g_acc = vec![C64::new(0.0, 0.0); ev.basis_len()];
    for x in 0..3 {
        for y in 0..3 {
            let w = c0[x].conj() * c0[y];
            if w.norm() == 0.0 {
                continue;
            }
            let (t1, t2) = element_terms(x, y, n);
            ev.add_gradient(&t1, w, &mut real_acc, &mut g_acc);
            ev.add_gradient(&t2, w, &mut real_acc, &mut g_acc);
        }
    }
    let mut g = ev.ctx().basis.from_real(real_acc);
    for (a, b) in g.iter_mut().zip(&g_acc) {
        *a += b;
    }
    g
}

/// ∂E_0/∂ψ_e* = Σ_xy c_x* c_y ∂H_xy/∂ψ_e*, projected off the filled orbitals
/// and `constraints` (earlier virtuals).
pub fn ci_gradient(
    ctx: &Context,
    filled: &[Orbital],
    psi_e: &Orbital,
    c0: &Vector3<C64>,
    constraints: &[Orbital],
) -> Vec<C64> {
    let mut ev = Evaluator::new(ctx, filled, psi_e);
    let mut g = raw_gradient(&mut ev, c0);
    project_out(&mut g, filled);
    project_out(&mut g, constraints);
    g
}

/// Ground CI energy as a function of ψ_e.
pub struct CovoObjective<'a> {
    pub ctx: &'a Context,
    pub filled: &'a [Orbital],
}

impl Objective for CovoObjective<'_> {
    fn eval(&self, x: &[Orbital]) -> Result<(f64, Vec<Vec<C64>>)> {
        let mut ev = Evaluator::new(self.ctx, self.filled, &x[0]);
        let (h1, h2) = both(&mut ev);
        let h = h1 + h2 + Matrix3::identity() * C64::new(self.ctx.eshift, 0.0);
        let (e, c) = ci_solve(&h, &Matrix3::identity())?;
        let g = raw_gradient(&mut ev, &c.column(0).into());
        Ok((e[0], vec![g]))
    }

    fn energy(&self, x: &[Orbital]) -> Result<f64> {
        Ok(ci_matrices(self.ctx, self.filled, &x[0])?.e[0])
    }
}

/// ⟨ψ|h|ψ⟩, used to seed each virtual.
struct OneBody<'a>(&'a Context);

impl Objective for OneBody<'_> {
    fn eval(&self, x: &[Orbital]) -> Result<(f64, Vec<Vec<C64>>)> {
        let hp = self.0.apply_h(&x[0].coeffs);
        Ok((crate::orbital::dot(&x[0].coeffs, &hp).re, vec![hp]))
    }
}

#[derive(Clone, Debug)]
pub struct CovoOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// CG steps on ⟨ψ|h|ψ⟩ used to build the starting guess.
    pub init_iter: usize,
    pub seed: u64,
}

impl Default for CovoOptions {
    fn default() -> Self {
        CovoOptions {
            tol: 1e-6,
            max_iter: 500,
            init_iter: 60,
            seed: 7,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CovoResult {
    pub orbital: Orbital,
    /// Ground 3×3 CI energy.
    pub energy: f64,
    pub gnorm: f64,
    pub iterations: usize,
    pub history: Vec<f64>,
    pub converged: bool,
}

fn cg_opts(ctx: &Context, tol: f64, max_iter: usize) -> CgOptions {
    CgOptions {
        tol,
        max_iter,
        restart: 20,
        real: ctx.real_mode(),
    }
}

/// Approximate lowest eigenvector of h orthogonal to `constraints`.
pub fn initial_virtual(ctx: &Context, constraints: &[Orbital], opts: &CovoOptions) -> Result<Orbital> {
    let x0 = random_orbitals(&ctx.basis, 1, opts.seed, ctx.real_mode(), constraints)?;
    let out = minimize(&OneBody(ctx), x0, constraints, &ctx.basis, &cg_opts(ctx, 1e-4, opts.init_iter))?;
    Ok(out.x.into_iter().next().unwrap())
}

/// Optimize ψ_e from `init`; returns the best iterate even if not converged.
pub fn optimize_covo_from(
    ctx: &Context,
    filled: &[Orbital],
    prior: &[Orbital],
    init: Orbital,
    opts: &CovoOptions,
) -> Result<CovoResult> {
    let constraints: Vec<Orbital> = filled.iter().chain(prior).cloned().collect();
    let err = orthonormality_error(&constraints);
    if err > 1e-8 {
        return Err(Error::NotOrthonormal(err));
    }
    let obj = CovoObjective { ctx, filled };
    let mut out = minimize(&obj, vec![init], &constraints, &ctx.basis, &cg_opts(ctx, opts.tol, opts.max_iter))?;
    if !ctx.real_mode() {
        real_gauge(&mut out.x, &ctx.basis, crate::orbital::GAUGE_TOL);
        gram_schmidt(&mut out.x, &constraints)?;
    }
    Ok(CovoResult {
        orbital: out.x.into_iter().next().unwrap(),
        energy: out.energy,
        gnorm: out.gnorm,
        iterations: out.iterations,
        history: out.history,
        converged: out.converged,
    })
}

pub fn optimize_covo(ctx: &Context, filled: &[Orbital], prior: &[Orbital], opts: &CovoOptions) -> Result<CovoResult> {
    let constraints: Vec<Orbital> = filled.iter().chain(prior).cloned().collect();
    let init = initial_virtual(ctx, &constraints, opts)?;
    let r = optimize_covo_from(ctx, filled, prior, init, opts)?;
    if !r.converged {
        return Err(Error::NotConverged {
            what: "COVO",
            iterations: r.iterations,
            gnorm: r.gnorm,
        });
    }
    Ok(r)
}

#[derive(Clone, Debug)]
pub struct CovoSet {
    pub virtuals: Vec<Orbital>,
    /// Ground 3×3 CI energy of each virtual when it was optimized.
    pub ci_energies: Vec<f64>,
    /// FCI energy over the filled orbitals plus the first n virtuals.
    pub energies: Vec<f64>,
}

impl CovoSet {
    /// Filled orbitals followed by the virtuals.
    pub fn all_orbitals(&self, filled: &[Orbital]) -> Vec<Orbital> {
        filled.iter().chain(&self.virtuals).cloned().collect()
    }
}

pub fn generate_covos(ctx: &Context, filled: &[Orbital], n_virtual: usize, opts: &CovoOptions) -> Result<CovoSet> {
    if n_virtual == 0 {
        return Err(Error::Config("need at least one virtual orbital".into()));
    }
    let mut virtuals: Vec<Orbital> = Vec::with_capacity(n_virtual);
    let mut ci_energies = Vec::with_capacity(n_virtual);
    for n in 0..n_virtual {
        let o = CovoOptions {
            seed: opts.seed.wrapping_add(n as u64),
            ..opts.clone()
        };
        let r = optimize_covo(ctx, filled, &virtuals, &o)?;
        virtuals.push(r.orbital);
        ci_energies.push(r.energy);
    }
    let all: Vec<Orbital> = filled.iter().chain(&virtuals).cloned().collect();
    let ham = ctx.build_sq_hamiltonian(&all)?;
    let mut energies = Vec::with_capacity(n_virtual);
    for n in 1..=n_virtual {
        let sub = ham.restrict(filled.len() + n);
        energies.push(crate::fci::solve_ground(&sub)?.e0);
    }
    Ok(CovoSet {
        virtuals,
        ci_energies,
        energies,
    })
}

//! Nonlinear radial Poisson problem on one axial slice.
//!
//! Finite-volume discretisation on a uniform grid `r_i = i h`. Control volume
//! `i` spans `[r_i - h/2, r_i + h/2]` clipped to `[0, R]`, so the axis row
//! reduces to the `4 (phi_1 - phi_0) / h^2` stencil and the wall row takes the
//! Neumann flux directly. Wall condition: `d phi_r / dr (R) = gamma sigma`.

use crate::error::{Error, Result};
use crate::mixture::{node_composition, slice_composition, MixtureSpec, SliceComposition};
use crate::numerics::{max_abs, solve_tridiagonal};

/// Step halvings tried when a Newton step increases the residual.
const MAX_HALVINGS: usize = 8;
/// Largest potential change accepted in one Newton step.
const MAX_STEP: f64 = 2.0;

/// Uniform radial grid with control-volume weights for `int f r dr`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    pub radius: f64,
    pub h: f64,
    pub r: Vec<f64>,
    pub weights: Vec<f64>,
}

impl RadialGrid {
    pub fn new(radius: f64, n_r: usize) -> Result<Self> {
        if n_r < 3 {
            return Err(Error::InvalidInput(format!("n_r = {n_r} is too small")));
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidInput(format!("slice radius {radius} must be positive")));
        }
        let h = radius / (n_r - 1) as f64;
        let mut r: Vec<f64> = (0..n_r).map(|i| i as f64 * h).collect();
        r[n_r - 1] = radius;
        let mut weights: Vec<f64> = r.iter().map(|&ri| ri * h).collect();
        weights[0] = h * h / 8.0;
        weights[n_r - 1] = 0.5 * (radius * h - 0.25 * h * h);
        Ok(Self { radius, h, r, weights })
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    /// `int_0^R f r dr` with the control-volume weights.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        self.weights.iter().zip(f).map(|(w, f)| w * f).sum()
    }
}

/// Physical inputs of one slice.
#[derive(Debug, Clone, Copy)]
pub struct SliceParams<'a> {
    pub q_factors: &'a [f64],
    pub sigma: f64,
    pub lambda: f64,
    pub gamma: f64,
    pub spec: &'a MixtureSpec,
}

/// Newton controls.
#[derive(Debug, Clone, Copy)]
pub struct NewtonControl {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for NewtonControl {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 100,
        }
    }
}

/// Converged slice.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialPotential {
    pub phi: Vec<f64>,
    /// `phi_r - phi_r(R)`.
    pub zeta: Vec<f64>,
    /// Max-norm of the discrete residual at the returned state.
    pub residual_norm: f64,
    /// `int q r dr + Lambda^2 gamma sigma R`.
    pub electroneutrality_defect: f64,
    pub iterations: usize,
    pub composition: SliceComposition,
}

fn residual(grid: &RadialGrid, phi: &[f64], p: &SliceParams, out_q: &mut [f64], out_dq: &mut [f64]) -> Result<Vec<f64>> {
    let n = grid.len();
    let inv_l2 = 1.0 / (p.lambda * p.lambda);
    for i in 0..n {
        let node = node_composition(p.q_factors, phi[i], p.spec).map_err(|e| e.context(format!("radial node {i}")))?;
        out_q[i] = node.q;
        out_dq[i] = node.dq_dphi;
    }
    let h = grid.h;
    let mut f = vec![0.0; n];
    for i in 0..n {
        let right = if i + 1 < n {
            (grid.r[i] + 0.5 * h) * (phi[i + 1] - phi[i]) / h
        } else {
            grid.radius * p.gamma * p.sigma
        };
        let left = if i > 0 {
            (grid.r[i] - 0.5 * h) * (phi[i] - phi[i - 1]) / h
        } else {
            0.0
        };
        f[i] = right - left + grid.weights[i] * out_q[i] * inv_l2;
    }
    Ok(f)
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Solve the slice problem by damped Newton.
pub fn solve_radial(grid: &RadialGrid, p: &SliceParams, initial: Option<&[f64]>, ctl: NewtonControl) -> Result<RadialPotential> {
    if !(p.lambda > 0.0) {
        return Err(Error::InvalidInput("lambda must be positive".into()));
    }
    if p.q_factors.len() != p.spec.n_species() {
        return Err(Error::InvalidInput("factor count does not match species".into()));
    }
    let charged = p
        .spec
        .species
        .iter()
        .zip(p.q_factors)
        .any(|(s, &q)| s.z != 0.0 && q > 0.0);
    if !charged && p.sigma * p.gamma != 0.0 {
        return Err(Error::Unsolvable(
            "wall charge with no mobile charge cannot be screened".into(),
        ));
    }
    let n = grid.len();
    let mut phi = match initial {
        Some(v) if v.len() == n => v.to_vec(),
        Some(v) => return Err(Error::InvalidInput(format!("initial guess has {} nodes, grid {n}", v.len()))),
        None => vec![0.0; n],
    };
    let h = grid.h;
    let inv_l2 = 1.0 / (p.lambda * p.lambda);
    let mut q = vec![0.0; n];
    let mut dq = vec![0.0; n];
    let mut f = residual(grid, &phi, p, &mut q, &mut dq)?;
    let mut norm = l2(&f);
    let mut trace = Vec::new();

    for iter in 1..=ctl.max_iter {
        let mut lower = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut upper = vec![0.0; n];
        for i in 0..n {
            let cr = if i + 1 < n { (grid.r[i] + 0.5 * h) / h } else { 0.0 };
            let cl = if i > 0 { (grid.r[i] - 0.5 * h) / h } else { 0.0 };
            lower[i] = cl;
            upper[i] = cr;
            diag[i] = -cr - cl + grid.weights[i] * dq[i] * inv_l2;
        }
        let rhs: Vec<f64> = f.iter().map(|v| -v).collect();
        let step = solve_tridiagonal(&lower, &diag, &upper, &rhs)?;
        let size = max_abs(&step);
        let mut lambda = if size > MAX_STEP { MAX_STEP / size } else { 1.0 };

        let mut trial_phi = vec![0.0; n];
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            for i in 0..n {
                trial_phi[i] = phi[i] + lambda * step[i];
            }
            let mut tq = vec![0.0; n];
            let mut tdq = vec![0.0; n];
            match residual(grid, &trial_phi, p, &mut tq, &mut tdq) {
                Ok(tf) => {
                    let tn = l2(&tf);
                    let keep = tn <= norm || accepted.is_none();
                    if keep {
                        accepted = Some((trial_phi.clone(), tf, tq, tdq, tn));
                    }
                    if tn <= norm {
                        break;
                    }
                }
                Err(Error::State(_)) => {}
                Err(e) => return Err(e),
            }
            lambda *= 0.5;
        }
        let Some((new_phi, new_f, _, new_dq, new_norm)) = accepted else {
            return Err(Error::NonConvergence {
                stage: "radial Newton".into(),
                iterations: iter,
                residual: norm,
                trace,
            });
        };
        let moved = max_abs(
            &new_phi
                .iter()
                .zip(&phi)
                .map(|(a, b)| a - b)
                .collect::<Vec<_>>(),
        );
        phi = new_phi;
        f = new_f;
        dq = new_dq;
        norm = new_norm;
        trace.push(moved);
        if moved <= ctl.tol * max_abs(&phi).max(1.0) {
            return finish(grid, p, phi, &f, iter);
        }
    }
    Err(Error::NonConvergence {
        stage: "radial Newton".into(),
        iterations: ctl.max_iter,
        residual: max_abs(&f),
        trace,
    })
}

fn finish(grid: &RadialGrid, p: &SliceParams, phi: Vec<f64>, f: &[f64], iterations: usize) -> Result<RadialPotential> {
    let composition = slice_composition(p.q_factors, &phi, p.spec)?;
    let wall = phi[phi.len() - 1];
    let zeta = phi.iter().map(|v| v - wall).collect();
    let defect = electroneutrality_defect(grid, &composition.q, p.lambda, p.gamma, p.sigma);
    Ok(RadialPotential {
        zeta,
        residual_norm: max_abs(f),
        electroneutrality_defect: defect,
        iterations,
        composition,
        phi,
    })
}

/// `int_0^R q r dr + Lambda^2 gamma sigma R`; zero for an exactly screened slice.
pub fn electroneutrality_defect(grid: &RadialGrid, q: &[f64], lambda: f64, gamma: f64, sigma: f64) -> f64 {
    grid.integrate(q) + lambda * lambda * gamma * sigma * grid.radius
}

//! Picard iteration over the radial, axial and hydrodynamic sub-problems.

use rayon::prelude::*;

use crate::axial::{axial_potential, closure_integrals, face_fluxes, solve_axial, AxialFactors, AxialPotential, PseudoTime, TransportClosure};
use crate::error::{Error, Result};
use crate::geometry::{GeometricIntegrals, PoreGeometry};
use crate::hydro::{solve_hydrodynamics, HydroInput, Hydrodynamics};
use crate::mixture::{MixtureSpec, SliceComposition};
use crate::numerics::{gradient, max_abs, Anderson};
use crate::radial::{solve_radial, NewtonControl, RadialGrid, RadialPotential, SliceParams};
use crate::units::{BoundaryConditions, DimensionlessGroups, SolverConfig};

/// Smallest mixing factor reached by automatic halving.
const MIN_RELAXATION: f64 = 1.0 / 64.0;

/// Error growth over the best value so far that restarts the mixer.
const GROWTH_LIMIT: f64 = 10.0;

/// A fully specified steady problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub geometry: PoreGeometry,
    pub mixture: MixtureSpec,
    pub bc: BoundaryConditions,
    pub groups: DimensionlessGroups,
    pub config: SolverConfig,
}

impl Problem {
    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        self.mixture.validate()?;
        self.bc.validate(self.mixture.n_species())?;
        self.groups.validate()?;
        self.config.validate()?;
        if self.geometry.n_z() != self.config.n_z {
            return Err(Error::InvalidInput(format!(
                "geometry has {} nodes but n_z = {}",
                self.geometry.n_z(),
                self.config.n_z
            )));
        }
        Ok(())
    }
}

/// Converged (or last) Picard state with all derived fields.
#[derive(Debug, Clone)]
pub struct SteadySolution {
    pub problem: Problem,
    pub integrals: GeometricIntegrals,
    pub grids: Vec<RadialGrid>,
    pub slices: Vec<RadialPotential>,
    pub factors: AxialFactors,
    pub potential: AxialPotential,
    pub closure: TransportClosure,
    pub hydro: Hydrodynamics,
    /// Picard error per iteration.
    pub log: Vec<f64>,
    pub converged: bool,
    /// Ramp parameters visited by continuation; empty for a direct solve.
    pub ramp: Vec<f64>,
}

impl SteadySolution {
    pub fn iterations(&self) -> usize {
        self.log.len()
    }

    pub fn n_species(&self) -> usize {
        self.problem.mixture.n_species()
    }

    pub fn z(&self) -> &[f64] {
        &self.problem.geometry.z
    }
}

struct Picard<'a> {
    problem: &'a Problem,
    grids: Vec<RadialGrid>,
    integrals: GeometricIntegrals,
    potential: AxialPotential,
    q_out: Vec<f64>,
    q_in: Vec<f64>,
}

impl<'a> Picard<'a> {
    fn new(problem: &'a Problem) -> Result<Self> {
        problem.validate()?;
        let geom = &problem.geometry;
        let grids = geom
            .radius
            .iter()
            .map(|&r| RadialGrid::new(r, problem.config.n_r))
            .collect::<Result<Vec<_>>>()?;
        let integrals = geom.integrals();
        let potential = axial_potential(&problem.bc, geom, &integrals);
        let q_out = problem.mixture.boundary_factors(&problem.bc.n_out)?;
        let q_in = problem.mixture.boundary_factors(&problem.bc.n_in)?;
        Ok(Self {
            problem,
            grids,
            integrals,
            potential,
            q_out,
            q_in,
        })
    }

    fn radial_pass(&self, q: &[Vec<f64>], warm: &[Vec<f64>]) -> Result<Vec<RadialPotential>> {
        let p = self.problem;
        let ctl = NewtonControl {
            tol: p.config.newton_tol,
            max_iter: p.config.newton_max_iter,
        };
        (0..self.grids.len())
            .into_par_iter()
            .map(|j| {
                let factors: Vec<f64> = q.iter().map(|qa| qa[j]).collect();
                let params = SliceParams {
                    q_factors: &factors,
                    sigma: p.geometry.sigma[j],
                    lambda: p.groups.lambda,
                    gamma: p.groups.gamma,
                    spec: &p.mixture,
                };
                solve_radial(&self.grids[j], &params, Some(&warm[j]), ctl)
                    .map_err(|e| e.context(format!("slice {j} (z = {})", p.geometry.z[j])))
            })
            .collect()
    }

    fn hydro(&self, q: &[Vec<f64>], phis: &[Vec<f64>], zetas: &[Vec<f64>], comps: &[SliceComposition]) -> Hydrodynamics {
        let p = self.problem;
        solve_hydrodynamics(&HydroInput {
            geom: &p.geometry,
            ints: &self.integrals,
            grids: &self.grids,
            phis,
            zetas,
            comps,
            q,
            potential: &self.potential,
            bc: &p.bc,
            lambda: p.groups.lambda,
            spec: &p.mixture,
        })
    }

    fn run(&self, start_q: Vec<Vec<f64>>, start_phi: Vec<Vec<f64>>) -> Result<SteadySolution> {
        let p = self.problem;
        let cfg = &p.config;
        let spec = &p.mixture;
        let z = &p.geometry.z;
        let nz = z.len();
        let mut q = start_q;
        let mut phis = start_phi;
        let mut mixer = Anderson::new(cfg.anderson_depth, cfg.relaxation);
        let mut best = f64::INFINITY;
        let mut log: Vec<f64> = Vec::new();
        let mut converged = false;

        for _ in 0..cfg.picard_max_iter {
            let slices = self.radial_pass(&q, &phis)?;
            phis = slices.iter().map(|s| s.phi.clone()).collect();
            let zetas: Vec<Vec<f64>> = slices.iter().map(|s| s.zeta.clone()).collect();
            let comps: Vec<SliceComposition> = slices.iter().map(|s| s.composition.clone()).collect();
            let hydro = self.hydro(&q, &phis, &zetas, &comps);
            let closure = closure_integrals(&self.grids, &comps, &phis, Some(&hydro.velocity.u), spec);
            let pseudo = cfg.pseudo_dt.map(|dt| PseudoTime { dt, previous: &q });
            let next = solve_axial(z, &closure, &self.potential, &self.q_out, &self.q_in, spec, p.groups.pe, pseudo)?;
            let x: Vec<f64> = q.concat();
            let f: Vec<f64> = next.q.concat().iter().zip(&x).map(|(g, x)| g - x).collect();
            let err = max_abs(&f);
            log.push(err);
            if !err.is_finite() {
                return Err(Error::NonConvergence {
                    stage: "Picard iteration".into(),
                    iterations: log.len(),
                    residual: err,
                    trace: log,
                });
            }
            if err < cfg.picard_tol {
                q = next.q;
                converged = true;
                break;
            }
            if err > GROWTH_LIMIT * best {
                mixer.reset();
                mixer.set_beta((0.5 * mixer.beta()).max(MIN_RELAXATION));
            }
            best = best.min(err);
            let mut step = mixer.step(&x, &f);
            if step.iter().any(|v| *v < 0.0) {
                mixer.reset();
                let beta = mixer.beta();
                step = x.iter().zip(&f).map(|(x, f)| x + beta * f).collect();
            }
            q = step.chunks(nz).map(<[f64]>::to_vec).collect();
        }

        // Final consistent pass at the accepted factors.
        let slices = self.radial_pass(&q, &phis)?;
        let phis: Vec<Vec<f64>> = slices.iter().map(|s| s.phi.clone()).collect();
        let zetas: Vec<Vec<f64>> = slices.iter().map(|s| s.zeta.clone()).collect();
        let comps: Vec<SliceComposition> = slices.iter().map(|s| s.composition.clone()).collect();
        let hydro = self.hydro(&q, &phis, &zetas, &comps);
        let closure = closure_integrals(&self.grids, &comps, &phis, Some(&hydro.velocity.u), spec);
        let flux = face_fluxes(z, &closure, &self.potential, &q, spec, p.groups.pe);
        let dq = q.iter().map(|qa| gradient(z, qa)).collect();
        Ok(SteadySolution {
            problem: p.clone(),
            integrals: self.integrals.clone(),
            grids: self.grids.clone(),
            slices,
            factors: AxialFactors { q, dq, flux },
            potential: self.potential.clone(),
            closure,
            hydro,
            log,
            converged,
            ramp: Vec::new(),
        })
    }
}

/// Run the Picard loop once from a linear start and return the final state
/// whether or not it met the tolerance; see [`SteadySolution::converged`].
pub fn solve_steady_unchecked(problem: &Problem) -> Result<SteadySolution> {
    let picard = Picard::new(problem)?;
    let length = problem.geometry.length;
    let q = picard
        .q_out
        .iter()
        .zip(&picard.q_in)
        .map(|(&a, &b)| problem.geometry.z.iter().map(|&z| a + (b - a) * z / length).collect())
        .collect();
    let phis = vec![vec![0.0; problem.config.n_r]; problem.geometry.n_z()];
    picard.run(q, phis)
}

/// Solve to the configured tolerance.
///
/// A direct attempt gets a quarter of the iteration budget. If it fails, the
/// driving differences (potential, pressure and concentration) are ramped
/// up from zero with adaptive steps, each step warm-started from the last.
pub fn solve_steady(problem: &Problem) -> Result<SteadySolution> {
    let mut direct = problem.clone();
    direct.config.picard_max_iter = (problem.config.picard_max_iter / 4).max(1);
    let first = solve_steady_unchecked(&direct);
    if let Ok(sol) = &first {
        if sol.converged {
            let mut sol = sol.clone();
            sol.problem = problem.clone();
            return Ok(sol);
        }
    }
    match continuation(problem) {
        Ok(sol) => Ok(sol),
        Err(e) => Err(match first {
            Ok(sol) => into_checked(sol).err().unwrap_or(e),
            Err(first) => first,
        }),
    }
}

/// Smallest continuation step before giving up.
const MIN_RAMP_STEP: f64 = 1.0 / 256.0;

/// `problem` with its driving differences scaled by `t`.
fn ramped(problem: &Problem, t: f64) -> Problem {
    let mut p = problem.clone();
    let bc = &mut p.bc;
    bc.phi_in = bc.phi_out + t * (problem.bc.phi_in - problem.bc.phi_out);
    bc.p_in = bc.p_out + t * (problem.bc.p_in - problem.bc.p_out);
    for (n_in, n_out) in bc.n_in.iter_mut().zip(&problem.bc.n_out) {
        *n_in = n_out + t * (*n_in - n_out);
    }
    p
}

fn continuation(problem: &Problem) -> Result<SteadySolution> {
    let mut current = into_checked(solve_steady_unchecked(&ramped(problem, 0.0))?)?;
    let mut t = 0.0;
    let mut step: f64 = 0.25;
    let mut steps = vec![0.0];
    while t < 1.0 {
        let next_t = (t + step).min(1.0);
        let attempt = ramped(problem, next_t);
        match Picard::new(&attempt).and_then(|p| p.run(current.factors.q.clone(), phis_of(&current))) {
            Ok(sol) if sol.converged => {
                current = sol;
                t = next_t;
                steps.push(t);
                step *= 1.5;
            }
            Ok(sol) if step <= MIN_RAMP_STEP => return into_checked(sol),
            Err(e) if step <= MIN_RAMP_STEP => return Err(e),
            _ => step *= 0.5,
        }
    }
    current.problem = problem.clone();
    current.ramp = steps;
    Ok(current)
}

fn phis_of(sol: &SteadySolution) -> Vec<Vec<f64>> {
    sol.slices.iter().map(|s| s.phi.clone()).collect()
}

/// Solve starting from a previous solution on the same grid (warm start).
pub fn solve_steady_from(problem: &Problem, start: &SteadySolution) -> Result<SteadySolution> {
    let picard = Picard::new(problem)?;
    if start.grids.len() != problem.geometry.n_z() || start.grids[0].len() != problem.config.n_r {
        return Err(Error::InvalidInput("warm start grid does not match the problem".into()));
    }
    into_checked(picard.run(start.factors.q.clone(), phis_of(start))?)
}

fn into_checked(sol: SteadySolution) -> Result<SteadySolution> {
    if sol.converged {
        Ok(sol)
    } else {
        Err(Error::NonConvergence {
            stage: "Picard iteration".into(),
            iterations: sol.log.len(),
            residual: sol.log.last().copied().unwrap_or(f64::NAN),
            trace: sol.log,
        })
    }
}

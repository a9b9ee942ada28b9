//! Quantities derived from a steady solution: currents, flow rates, regime
//! decompositions and transport coefficients.

use std::f64::consts::PI;

use crate::axial::{nearest_face, species_currents};
use crate::coupler::SteadySolution;
use crate::error::{Error, Result};
use crate::numerics::trapezoid;

/// Species currents and their sum at one cross-section.
#[derive(Debug, Clone, PartialEq)]
pub struct Currents {
    pub species: Vec<f64>,
    pub total: f64,
}

/// Currents at the face nearest to `z_s`.
pub fn current_at(sol: &SteadySolution, z_s: f64) -> Currents {
    let face = nearest_face(sol.z(), z_s);
    let species = species_currents(&sol.factors.flux, &sol.problem.mixture, face);
    Currents {
        total: species.iter().sum(),
        species,
    }
}

/// Total current on every face.
pub fn current_profile(sol: &SteadySolution) -> Vec<f64> {
    (0..sol.z().len() - 1)
        .map(|f| species_currents(&sol.factors.flux, &sol.problem.mixture, f).iter().sum())
        .collect()
}

/// Relative spread `(max - min) / max |.|` of a sampled quantity.
pub fn relative_variation(v: &[f64]) -> f64 {
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = v.iter().copied().fold(f64::INFINITY, f64::min);
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        0.0
    } else {
        (max - min) / scale
    }
}

/// Area integral of the zeta potential over the whole pore.
pub fn mean_zeta(sol: &SteadySolution) -> f64 {
    trapezoid(sol.z(), &sol.hydro.kernels.zeta_integral)
}

/// Volumetric flow `int_0^L int_0^R u r dr dz`.
pub fn mean_velocity(sol: &SteadySolution) -> f64 {
    trapezoid(sol.z(), &sol.hydro.velocity.flow_rate)
}

/// Largest axial velocity and where it occurs `(u, z, r)`.
pub fn max_velocity(sol: &SteadySolution) -> (f64, f64, f64) {
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for (j, row) in sol.hydro.velocity.u.iter().enumerate() {
        for (i, &u) in row.iter().enumerate() {
            if u > best.0 {
                best = (u, sol.z()[j], sol.grids[j].r[i]);
            }
        }
    }
    best
}

/// `16 Lambda^2 / (R^4 L)`, the slope linking the zero-flow pressure to
/// `<zeta> dphi` in a straight pore.
pub fn flow_threshold_coefficient(sol: &SteadySolution) -> Result<f64> {
    let geom = &sol.problem.geometry;
    require_cylinder(sol)?;
    let r = geom.radius[0];
    let l2 = sol.problem.groups.lambda.powi(2);
    Ok(16.0 * l2 / (r.powi(4) * geom.length))
}

fn require_cylinder(sol: &SteadySolution) -> Result<()> {
    if sol.problem.geometry.is_cylinder() {
        Ok(())
    } else {
        Err(Error::Unsupported("decompositions need a straight pore".into()))
    }
}

/// Volumetric flow split into pressure-driven, Helmholtz-Smoluchowski and
/// double-layer parts.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowDecomposition {
    pub pf: f64,
    pub hs: f64,
    pub edl: f64,
    pub total: f64,
    /// `|total - (pf + hs + edl)|`.
    pub defect: f64,
}

pub fn flow_decomposition(sol: &SteadySolution) -> Result<FlowDecomposition> {
    require_cylinder(sol)?;
    let geom = &sol.problem.geometry;
    let bc = &sol.problem.bc;
    let r = geom.radius[0];
    let l2 = sol.problem.groups.lambda.powi(2);
    let pf = bc.dp() * r.powi(4) / 16.0;
    let hs = -l2 * bc.dphi() / geom.length * mean_zeta(sol);
    let edl = trapezoid(sol.z(), &sol.hydro.kernels.k3);
    let total = mean_velocity(sol);
    Ok(FlowDecomposition {
        pf,
        hs,
        edl,
        total,
        defect: (total - (pf + hs + edl)).abs(),
    })
}

/// Outlet current of one species split into field-driven, pressure-driven
/// and concentration-gradient parts.
#[derive(Debug, Clone, PartialEq)]
pub struct CurrentDecomposition {
    pub ie: f64,
    pub ip: f64,
    pub ic: f64,
    /// Current from the full solution at the outlet face.
    pub computed: f64,
    /// Pressure per unit potential difference at which `ie + ip` vanishes.
    pub threshold: f64,
}

pub fn current_decomposition(sol: &SteadySolution) -> Result<Vec<CurrentDecomposition>> {
    require_cylinder(sol)?;
    let p = &sol.problem;
    let geom = &p.geometry;
    let (r, l) = (geom.radius[0], geom.length);
    let pe = p.groups.pe;
    let l2 = p.groups.lambda.powi(2);
    let (dphi, dp) = (p.bc.dphi(), p.bc.dp());
    let zeta = mean_zeta(sol);
    let edl = trapezoid(sol.z(), &sol.hydro.kernels.k3);
    let prefactor = p.mixture.boundary_prefactor(&p.bc.n_out)?;
    let computed = current_at(sol, 0.0).species;
    Ok(p
        .mixture
        .species
        .iter()
        .enumerate()
        .map(|(a, s)| {
            let n = p.bc.n_out[a];
            let ie = 2.0 * PI * n * dphi / l * (s.z * s.z * s.k * r * r / 2.0 + s.z * pe * l2 * zeta / l);
            let ip = -2.0 * PI * s.z * pe * n * dp / l * r.powi(4) / 16.0;
            let ic = 2.0 * PI * s.z * (s.k * prefactor[a] * r * r / 2.0 * sol.factors.dq[a][0] - pe * n * edl / l);
            let threshold = if pe > 0.0 {
                s.z * s.k * 8.0 / (pe * r * r) + 16.0 * l2 * zeta / (l * r.powi(4))
            } else {
                f64::INFINITY
            };
            CurrentDecomposition {
                ie,
                ip,
                ic,
                computed: computed[a],
                threshold,
            }
        })
        .collect())
}

/// Total currents below this (relative to `1 + sum |I_alpha|`) count as zero.
pub const ZERO_CURRENT: f64 = 1e-12;

/// Selectivity, conductances and the flow rate through one cross-section.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportMetrics {
    /// Fraction of the total current carried by each species.
    pub t: Vec<f64>,
    /// `I_alpha / dphi`; `None` when `dphi = 0`.
    pub conductance: Option<Vec<f64>>,
    /// `int_0^R u r dr` at the requested position.
    pub q_eo: f64,
}

pub fn transport_metrics(sol: &SteadySolution, z_flow: f64) -> Result<TransportMetrics> {
    let currents = current_at(sol, 0.0);
    let magnitude: f64 = currents.species.iter().map(|i| i.abs()).sum();
    if currents.total.abs() <= ZERO_CURRENT * (1.0 + magnitude) {
        return Err(Error::UndefinedRatio("total current is zero".into()));
    }
    let t = currents.species.iter().map(|i| i / currents.total).collect();
    let dphi = sol.problem.bc.dphi();
    let conductance = (dphi != 0.0).then(|| currents.species.iter().map(|i| i / dphi).collect());
    let j = sol.problem.geometry.nearest_node(z_flow);
    Ok(TransportMetrics {
        t,
        conductance,
        q_eo: sol.hydro.velocity.flow_rate[j],
    })
}

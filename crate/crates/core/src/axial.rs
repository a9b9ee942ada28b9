//! Axial potential, closure integrals and the steady `Q_alpha` transport solve.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{GeometricIntegrals, PoreGeometry};
use crate::mixture::{MixtureSpec, SliceComposition};
use crate::numerics::{bernoulli, gradient, solve_tridiagonal};
use crate::radial::RadialGrid;
use crate::units::BoundaryConditions;

#[derive(Debug, Clone, PartialEq)]
pub struct AxialPotential {
    pub phi_z: Vec<f64>,
    pub dphi_z: Vec<f64>,
}

/// `phi_z = dphi * Delta I_phiz + phi_out` and its exact derivative.
pub fn axial_potential(bc: &BoundaryConditions, geom: &PoreGeometry, ints: &GeometricIntegrals) -> AxialPotential {
    let dphi = bc.dphi();
    let total = ints.i_phiz[ints.i_phiz.len() - 1];
    AxialPotential {
        phi_z: ints.delta_i_phiz.iter().map(|d| dphi * d + bc.phi_out).collect(),
        dphi_z: geom.radius.iter().map(|r| dphi / (r * r * total)).collect(),
    }
}

/// `H1[alpha][j]` and `H2[alpha][j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportClosure {
    pub h1: Vec<Vec<f64>>,
    pub h2: Vec<Vec<f64>>,
}

/// Radial weight `n_bar y0^a exp(-z phi_r)` of species `alpha` on a slice.
pub fn species_weight(comp: &SliceComposition, phi: &[f64], spec: &MixtureSpec, alpha: usize) -> Vec<f64> {
    let s = &spec.species[alpha];
    comp.n_bar
        .iter()
        .zip(&comp.y0)
        .zip(phi)
        .map(|((nb, y0), p)| nb * y0.powf(s.a) * (-s.z * p).exp())
        .collect()
}

/// Radial quadratures of the species weights. `u` (one profile per slice)
/// may be omitted, in which case `H2 = 0`.
pub fn closure_integrals(
    grids: &[RadialGrid],
    comps: &[SliceComposition],
    phis: &[Vec<f64>],
    u: Option<&[Vec<f64>]>,
    spec: &MixtureSpec,
) -> TransportClosure {
    let ns = spec.n_species();
    let nz = grids.len();
    let mut h1 = vec![vec![0.0; nz]; ns];
    let mut h2 = vec![vec![0.0; nz]; ns];
    for j in 0..nz {
        for (a, (h1a, h2a)) in h1.iter_mut().zip(h2.iter_mut()).enumerate() {
            let w = species_weight(&comps[j], &phis[j], spec, a);
            h1a[j] = grids[j].integrate(&w);
            if let Some(u) = u {
                let wu: Vec<f64> = w.iter().zip(&u[j]).map(|(w, u)| w * u).collect();
                h2a[j] = grids[j].integrate(&wu);
            }
        }
    }
    TransportClosure { h1, h2 }
}

/// Solution of the axial problem.
#[derive(Debug, Clone, PartialEq)]
pub struct AxialFactors {
    /// `q[alpha][j]`.
    pub q: Vec<Vec<f64>>,
    pub dq: Vec<Vec<f64>>,
    /// Species flux `J` on each face `j + 1/2`; the current is `2 pi z J`.
    pub flux: Vec<Vec<f64>>,
}

/// Per-species coefficients of the face flux `J = c (B(-x) Q_{j+1} - B(x) Q_j)`.
struct Faces {
    c: Vec<f64>,
    x: Vec<f64>,
}

fn faces(z: &[f64], h1: &[f64], h2: &[f64], phi_z: &[f64], charge: f64, k: f64, pe: f64) -> Faces {
    let m = z.len() - 1;
    let mut c = Vec::with_capacity(m);
    let mut x = Vec::with_capacity(m);
    for j in 0..m {
        let dz = z[j + 1] - z[j];
        let h1f = 0.5 * (h1[j] + h1[j + 1]);
        let ratio = (h2[j] + h2[j + 1]) / (h1[j] + h1[j + 1]);
        c.push(k * h1f / dz);
        x.push(charge * (phi_z[j + 1] - phi_z[j]) - pe * dz * ratio / k);
    }
    Faces { c, x }
}

/// Scharfetter-Gummel face fluxes for given factors.
pub fn face_fluxes(
    z: &[f64],
    closure: &TransportClosure,
    potential: &AxialPotential,
    q: &[Vec<f64>],
    spec: &MixtureSpec,
    pe: f64,
) -> Vec<Vec<f64>> {
    spec.species
        .iter()
        .enumerate()
        .map(|(a, s)| {
            let f = faces(z, &closure.h1[a], &closure.h2[a], &potential.phi_z, s.z, s.k, pe);
            (0..z.len() - 1)
                .map(|j| f.c[j] * (bernoulli(-f.x[j]) * q[a][j + 1] - bernoulli(f.x[j]) * q[a][j]))
                .collect()
        })
        .collect()
}

/// Backward-Euler relaxation step: mass term `H1 (Q - previous) / dt`.
#[derive(Debug, Clone, Copy)]
pub struct PseudoTime<'a> {
    pub dt: f64,
    pub previous: &'a [Vec<f64>],
}

/// Solve the steady transport equation for every species with Dirichlet
/// data `q_out` at `z = 0` and `q_in` at `z = L`.
#[allow(clippy::too_many_arguments)]
pub fn solve_axial(
    z: &[f64],
    closure: &TransportClosure,
    potential: &AxialPotential,
    q_out: &[f64],
    q_in: &[f64],
    spec: &MixtureSpec,
    pe: f64,
    pseudo: Option<PseudoTime>,
) -> Result<AxialFactors> {
    let n = z.len();
    let ns = spec.n_species();
    let mut qs = Vec::with_capacity(ns);
    for (a, s) in spec.species.iter().enumerate() {
        if closure.h1[a].iter().any(|h| !(*h > 0.0)) {
            return Err(Error::State(format!("species {}: non-positive H1", s.name)));
        }
        let f = faces(z, &closure.h1[a], &closure.h2[a], &potential.phi_z, s.z, s.k, pe);
        let mut lower = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut upper = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        diag[0] = 1.0;
        rhs[0] = q_out[a];
        diag[n - 1] = 1.0;
        rhs[n - 1] = q_in[a];
        for j in 1..n - 1 {
            let (cr, xr) = (f.c[j], f.x[j]);
            let (cl, xl) = (f.c[j - 1], f.x[j - 1]);
            upper[j] = cr * bernoulli(-xr);
            lower[j] = cl * bernoulli(xl);
            diag[j] = -cr * bernoulli(xr) - cl * bernoulli(-xl);
            if let Some(p) = pseudo {
                let mass = closure.h1[a][j] * 0.5 * (z[j + 1] - z[j - 1]) / p.dt;
                diag[j] -= mass;
                rhs[j] = -mass * p.previous[a][j];
            }
        }
        let q = solve_tridiagonal(&lower, &diag, &upper, &rhs).map_err(|e| match e {
            Error::Singular(m) => Error::State(format!("species {}: {m}", s.name)),
            other => other,
        })?;
        let scale = q_out[a].abs().max(q_in[a].abs()).max(f64::MIN_POSITIVE);
        let worst = q.iter().copied().fold(0.0, f64::min);
        if worst < -1e-10 * scale {
            return Err(Error::NonConvergence {
                stage: format!("axial transport of {} (negative factor {worst:.3e})", s.name),
                iterations: 1,
                residual: worst,
                trace: Vec::new(),
            });
        }
        qs.push(q.into_iter().map(|v| v.max(0.0)).collect::<Vec<f64>>());
    }
    let flux = face_fluxes(z, closure, potential, &qs, spec, pe);
    let dq = qs.iter().map(|q| gradient(z, q)).collect();
    Ok(AxialFactors { q: qs, dq, flux })
}

/// Index of the face whose midpoint is nearest to `z_s`.
pub fn nearest_face(z: &[f64], z_s: f64) -> usize {
    let mut best = 0;
    let mut dist = f64::INFINITY;
    for j in 0..z.len() - 1 {
        let d = (0.5 * (z[j] + z[j + 1]) - z_s).abs();
        if d < dist {
            dist = d;
            best = j;
        }
    }
    best
}

/// Species currents `2 pi z_alpha J_alpha` on face `face`.
pub fn species_currents(flux: &[Vec<f64>], spec: &MixtureSpec, face: usize) -> Vec<f64> {
    spec.species
        .iter()
        .zip(flux)
        .map(|(s, f)| 2.0 * PI * s.z * f[face])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_cylinder, make_trumpet};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn constant_closure(nz: usize, h1: f64) -> TransportClosure {
        TransportClosure {
            h1: vec![vec![h1; nz]; 2],
            h2: vec![vec![0.0; nz]; 2],
        }
    }

    #[test]
    fn cylinder_potential_is_linear() {
        let g = make_cylinder(5.0, 25.0, 51).unwrap();
        let bc = BoundaryConditions::bulk(0.6, 2, 8.0, 0.0);
        let p = axial_potential(&bc, &g, &g.integrals());
        for (j, &z) in g.z.iter().enumerate() {
            assert_relative_eq!(p.phi_z[j], 8.0 * z / 25.0, epsilon = 1e-13);
            assert_relative_eq!(p.dphi_z[j], 8.0 / 25.0, epsilon = 1e-14);
        }
        let flat = axial_potential(&BoundaryConditions::bulk(0.6, 2, 0.0, 0.0), &g, &g.integrals());
        assert!(flat.phi_z.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn trumpet_field_peaks_at_the_neck() {
        let g = make_trumpet(10.0, 1.5, 10.0, 201).unwrap();
        let p = axial_potential(&BoundaryConditions::bulk(0.1, 2, 8.0, 0.0), &g, &g.integrals());
        assert_relative_eq!(p.dphi_z[100] / p.dphi_z[0], (10.0f64 / 1.5).powi(2), max_relative = 1e-12);
        let max = p.dphi_z.iter().copied().fold(0.0, f64::max);
        assert_eq!(max, p.dphi_z[100]);
    }

    #[test]
    fn pure_diffusion_is_linear() {
        let g = make_cylinder(2.0, 10.0, 41).unwrap();
        let spec = MixtureSpec::classical_binary(1.0, 2.0);
        let pot = axial_potential(&BoundaryConditions::bulk(1.0, 2, 0.0, 0.0), &g, &g.integrals());
        let sol = solve_axial(&g.z, &constant_closure(41, 2.0), &pot, &[1.0, 0.5], &[3.0, 0.5], &spec, 0.0, None).unwrap();
        for (j, &z) in g.z.iter().enumerate() {
            assert_relative_eq!(sol.q[0][j], 1.0 + 0.2 * z, epsilon = 1e-12);
            assert_relative_eq!(sol.q[1][j], 0.5, epsilon = 1e-14);
        }
        assert!(sol.flux[1].iter().all(|f| f.abs() < 1e-14));
    }

    #[test]
    fn drift_diffusion_matches_exponential_oracle() {
        let (l, dphi) = (25.0, 8.0);
        let g = make_cylinder(5.0, l, 101).unwrap();
        let spec = MixtureSpec::classical_binary(1.33, 0.79);
        let bc = BoundaryConditions::bulk(0.6, 2, dphi, 0.0);
        let pot = axial_potential(&bc, &g, &g.integrals());
        let (q0, q1) = (0.6, 0.9);
        let sol = solve_axial(&g.z, &constant_closure(101, 12.5), &pot, &[q0, q0], &[q1, q1], &spec, 0.0, None).unwrap();
        for (a, zc) in [(0usize, 1.0f64), (1, -1.0)] {
            // Q = A + B exp(-zc dphi z / L)
            let lam = -zc * dphi / l;
            let b = (q1 - q0) / ((lam * l).exp() - 1.0);
            let a0 = q0 - b;
            for (j, &z) in g.z.iter().enumerate() {
                assert_relative_eq!(sol.q[a][j], a0 + b * (lam * z).exp(), max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn pseudo_time_step_relaxes_toward_steady_state() {
        let g = make_cylinder(2.0, 10.0, 41).unwrap();
        let spec = MixtureSpec::classical_binary(1.0, 1.0);
        let pot = axial_potential(&BoundaryConditions::bulk(1.0, 2, 2.0, 0.0), &g, &g.integrals());
        let closure = constant_closure(41, 2.0);
        let steady = solve_axial(&g.z, &closure, &pot, &[1.0, 1.0], &[2.0, 2.0], &spec, 0.0, None).unwrap();
        let mut q = vec![vec![1.0; 41]; 2];
        for _ in 0..200 {
            let prev = q.clone();
            let step = PseudoTime { dt: 5.0, previous: &prev };
            q = solve_axial(&g.z, &closure, &pot, &[1.0, 1.0], &[2.0, 2.0], &spec, 0.0, Some(step)).unwrap().q;
        }
        for a in 0..2 {
            for j in 0..41 {
                assert_relative_eq!(q[a][j], steady.q[a][j], epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn non_positive_closure_is_rejected() {
        let g = make_cylinder(2.0, 10.0, 20).unwrap();
        let spec = MixtureSpec::classical_binary(1.0, 1.0);
        let pot = axial_potential(&BoundaryConditions::bulk(1.0, 2, 0.0, 0.0), &g, &g.integrals());
        let mut c = constant_closure(20, 1.0);
        c.h1[0][3] = 0.0;
        assert!(matches!(
            solve_axial(&g.z, &c, &pot, &[1.0, 1.0], &[1.0, 1.0], &spec, 0.0, None),
            Err(Error::State(_))
        ));
    }

    proptest! {
        #[test]
        fn flux_is_constant_and_factors_positive(
            dphi in -20.0f64..20.0,
            pe in 0.0f64..5.0,
            q0 in 0.01f64..2.0,
            q1 in 0.01f64..2.0,
            wiggle in proptest::collection::vec(0.5f64..2.0, 30),
            flow in proptest::collection::vec(-3.0f64..3.0, 30),
        ) {
            let g = make_trumpet(3.0, 1.0, 10.0, 30).unwrap();
            let spec = MixtureSpec::classical_binary(1.33, 0.79);
            let pot = axial_potential(&BoundaryConditions::bulk(1.0, 2, dphi, 0.0), &g, &g.integrals());
            let closure = TransportClosure {
                h1: vec![wiggle.clone(), wiggle.iter().rev().cloned().collect()],
                h2: vec![flow.clone(), flow.iter().map(|f| 0.5 * f).collect()],
            };
            let sol = solve_axial(&g.z, &closure, &pot, &[q0, q1], &[q1, q0], &spec, pe, None).unwrap();
            for a in 0..2 {
                prop_assert!(sol.q[a].iter().all(|&q| q > 0.0));
                let f = &sol.flux[a];
                // Round-off is relative to the two SG terms, not their difference.
                let s = &spec.species[a];
                let fc = faces(&g.z, &closure.h1[a], &closure.h2[a], &pot.phi_z, s.z, s.k, pe);
                let scale = (0..f.len())
                    .map(|j| fc.c[j] * (bernoulli(-fc.x[j]) * sol.q[a][j + 1]).max(bernoulli(fc.x[j]) * sol.q[a][j]))
                    .fold(0.0f64, f64::max);
                for w in f.windows(2) {
                    prop_assert!((w[1] - w[0]).abs() <= 1e-9 * scale);
                }
            }
        }
    }
}

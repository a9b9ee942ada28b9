//! Pressure closure and axial velocity.
//!
//! Radial fields live on scaled grids `r = s R(z)` with a common `s`. Axial
//! derivatives at fixed `r` use `d/dz|_r f = d/dz|_s f - s R' df/dr`, with
//! three-point differences in `z` on the logical `(s, z)` rectangle.

use crate::axial::AxialPotential;
use crate::geometry::{GeometricIntegrals, PoreGeometry};
use crate::mixture::{MixtureSpec, SliceComposition};
use crate::numerics::{cumulative_trapezoid, derivative_stencil, gradient};
use crate::radial::RadialGrid;
use crate::units::BoundaryConditions;

/// Everything the closure needs from one converged Picard state.
pub struct HydroInput<'a> {
    pub geom: &'a PoreGeometry,
    pub ints: &'a GeometricIntegrals,
    pub grids: &'a [RadialGrid],
    pub phis: &'a [Vec<f64>],
    pub zetas: &'a [Vec<f64>],
    pub comps: &'a [SliceComposition],
    /// `q[alpha][j]`.
    pub q: &'a [Vec<f64>],
    pub potential: &'a AxialPotential,
    pub bc: &'a BoundaryConditions,
    pub lambda: f64,
    pub spec: &'a MixtureSpec,
}

/// Radial fields are indexed `[j][i]` (slice, radial node).
#[derive(Debug, Clone, PartialEq)]
pub struct PressureField {
    pub p_r: Vec<Vec<f64>>,
    pub q_check: Vec<Vec<f64>>,
    pub p_z: Vec<f64>,
    pub dp_z: Vec<f64>,
    pub psi: Vec<f64>,
    pub k4: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdlKernels {
    pub k1: Vec<Vec<f64>>,
    pub k2: Vec<Vec<f64>>,
    pub k3: Vec<f64>,
    /// `int_0^R zeta r dr` per slice.
    pub zeta_integral: Vec<f64>,
    pub i_ez: Vec<f64>,
    pub i_k3: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VelocityField {
    pub u: Vec<Vec<f64>>,
    pub w: Vec<Vec<f64>>,
    /// `int_0^R u r dr` per slice.
    pub flow_rate: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hydrodynamics {
    pub pressure: PressureField,
    pub kernels: EdlKernels,
    pub velocity: VelocityField,
}

fn radial_gradient(grid: &RadialGrid, f: &[f64]) -> Vec<f64> {
    gradient(&grid.r, f)
}

/// `d/dz` at fixed `r` of a field sampled as `f[j][i]`; `df_dr[j][i]` is its
/// radial derivative.
fn dz_fixed_r(geom: &PoreGeometry, s: &[f64], f: &[Vec<f64>], df_dr: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let nz = f.len();
    let nr = s.len();
    (0..nz)
        .map(|j| {
            let (idx, w) = derivative_stencil(&geom.z, j);
            (0..nr)
                .map(|i| {
                    let along_s = w[0] * f[idx[0]][i] + w[1] * f[idx[1]][i] + w[2] * f[idx[2]][i];
                    along_s - s[i] * geom.d_radius[j] * df_dr[j][i]
                })
                .collect()
        })
        .collect()
}

/// Per-slice pieces of the radial pressure kernel.
struct SliceKernel {
    /// `n_bar y0^a` per species.
    amp: Vec<Vec<f64>>,
    /// `exp(-z phi_r)` per species.
    boltz: Vec<Vec<f64>>,
    /// `int_0^r exp(-z phi_r) d/dr(n_bar y0^a) dr` per species.
    crowd: Vec<Vec<f64>>,
}

fn slice_kernel(grid: &RadialGrid, phi: &[f64], comp: &SliceComposition, spec: &MixtureSpec) -> SliceKernel {
    let mut amp = Vec::new();
    let mut boltz = Vec::new();
    let mut crowd = Vec::new();
    for s in &spec.species {
        let e: Vec<f64> = phi.iter().map(|p| (-s.z * p).exp()).collect();
        let a: Vec<f64> = comp.n_bar.iter().zip(&comp.y0).map(|(nb, y0)| nb * y0.powf(s.a)).collect();
        let c = if spec.is_classical() {
            vec![0.0; phi.len()]
        } else {
            let da = radial_gradient(grid, &a);
            let integrand: Vec<f64> = e.iter().zip(&da).map(|(e, d)| e * d).collect();
            cumulative_trapezoid(&grid.r, &integrand)
        };
        amp.push(a);
        boltz.push(e);
        crowd.push(c);
    }
    SliceKernel { amp, boltz, crowd }
}

/// Radial pressure `p_r = Qcheck - Qcheck(r = 0)` on every slice.
pub fn pressure_radial(input: &HydroInput) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let kernels: Vec<SliceKernel> = (0..input.grids.len())
        .map(|j| slice_kernel(&input.grids[j], &input.phis[j], &input.comps[j], input.spec))
        .collect();
    radial_pressure_from(input, &kernels)
}

fn radial_pressure_from(input: &HydroInput, kernels: &[SliceKernel]) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let mut q_check = Vec::with_capacity(kernels.len());
    let mut p_r = Vec::with_capacity(kernels.len());
    for (j, k) in kernels.iter().enumerate() {
        let nr = input.grids[j].len();
        let qc: Vec<f64> = (0..nr)
            .map(|i| {
                (0..input.spec.n_species())
                    .map(|a| input.q[a][j] * (k.amp[a][i] * k.boltz[a][i] - k.crowd[a][i]))
                    .sum()
            })
            .collect();
        p_r.push(qc.iter().map(|v| v - qc[0]).collect());
        q_check.push(qc);
    }
    (p_r, q_check)
}

/// Assemble pressure, EDL kernels and velocity.
pub fn solve_hydrodynamics(input: &HydroInput) -> Hydrodynamics {
    let geom = input.geom;
    let nz = geom.n_z();
    let ns = input.spec.n_species();
    let grid0 = &input.grids[0];
    let s: Vec<f64> = grid0.r.iter().map(|r| r / grid0.radius).collect();
    let nr = s.len();
    let lambda2 = input.lambda * input.lambda;

    let kernels: Vec<SliceKernel> = (0..nz)
        .map(|j| slice_kernel(&input.grids[j], &input.phis[j], &input.comps[j], input.spec))
        .collect();
    let (p_r, q_check) = radial_pressure_from(input, &kernels);

    // d/dz|_r of Q n_bar y0^a for each species and of N = sum Q * crowd.
    let mut g = vec![vec![0.0; nr]; nz];
    for a in 0..ns {
        let m: Vec<Vec<f64>> = (0..nz)
            .map(|j| kernels[j].amp[a].iter().map(|v| input.q[a][j] * v).collect())
            .collect();
        let dm_dr: Vec<Vec<f64>> = (0..nz).map(|j| radial_gradient(&input.grids[j], &m[j])).collect();
        let dm = dz_fixed_r(geom, &s, &m, &dm_dr);
        for j in 0..nz {
            for i in 0..nr {
                g[j][i] += dm[j][i] * kernels[j].boltz[a][i];
            }
        }
    }
    let q_check0: Vec<f64> = q_check.iter().map(|v| v[0]).collect();
    let dq_check0 = gradient(&geom.z, &q_check0);
    if !input.spec.is_classical() {
        let n_field: Vec<Vec<f64>> = (0..nz)
            .map(|j| {
                (0..nr)
                    .map(|i| (0..ns).map(|a| input.q[a][j] * kernels[j].crowd[a][i]).sum())
                    .collect()
            })
            .collect();
        let dn_dr: Vec<Vec<f64>> = (0..nz).map(|j| radial_gradient(&input.grids[j], &n_field[j])).collect();
        let dn = dz_fixed_r(geom, &s, &n_field, &dn_dr);
        for j in 0..nz {
            for i in 0..nr {
                g[j][i] -= dn[j][i];
            }
        }
    }
    for (j, row) in g.iter_mut().enumerate() {
        for v in row.iter_mut() {
            *v -= dq_check0[j];
        }
    }

    let mut k1 = Vec::with_capacity(nz);
    let mut k2 = Vec::with_capacity(nz);
    let mut k3 = Vec::with_capacity(nz);
    let mut zeta_integral = Vec::with_capacity(nz);
    for j in 0..nz {
        let grid = &input.grids[j];
        let gr: Vec<f64> = g[j].iter().zip(&grid.r).map(|(g, r)| g * r).collect();
        let k1j = cumulative_trapezoid(&grid.r, &gr);
        let integrand: Vec<f64> = k1j
            .iter()
            .zip(&grid.r)
            .map(|(k, &r)| if r > 0.0 { (k - k1j[0]) / r } else { 0.0 })
            .collect();
        let k2j = cumulative_trapezoid(&grid.r, &integrand);
        let wall = k2j[nr - 1];
        let shifted: Vec<f64> = k2j.iter().map(|k| k - wall).collect();
        k3.push(grid.integrate(&shifted));
        zeta_integral.push(grid.integrate(&input.zetas[j]));
        k1.push(k1j);
        k2.push(k2j);
    }

    let inv_r4: Vec<f64> = geom.radius.iter().map(|r| r.powi(-4)).collect();
    let ez: Vec<f64> = (0..nz)
        .map(|j| 16.0 * lambda2 * input.potential.dphi_z[j] * zeta_integral[j] * inv_r4[j])
        .collect();
    let i_ez = cumulative_trapezoid(&geom.z, &ez);
    let k3w: Vec<f64> = (0..nz).map(|j| 16.0 * k3[j] * inv_r4[j]).collect();
    let i_k3 = cumulative_trapezoid(&geom.z, &k3w);
    let i_p_total = input.ints.i_p[nz - 1];
    let dp = input.bc.dp();
    let flow = (dp - i_ez[nz - 1] + i_k3[nz - 1]) / (16.0 * i_p_total);

    let dip = &input.ints.delta_i_p;
    let psi: Vec<f64> = (0..nz).map(|j| i_ez[j] - i_ez[nz - 1] * dip[j]).collect();
    let k4: Vec<f64> = (0..nz).map(|j| i_k3[j] - i_k3[nz - 1] * dip[j]).collect();
    let p_z: Vec<f64> = (0..nz).map(|j| -dp * dip[j] - input.bc.p_out - psi[j] + k4[j]).collect();
    let dp_z: Vec<f64> = (0..nz)
        .map(|j| {
            16.0 * inv_r4[j] * (k3[j] - input.potential.dphi_z[j] * lambda2 * zeta_integral[j] - flow)
        })
        .collect();

    let mut u = Vec::with_capacity(nz);
    let mut flow_rate = Vec::with_capacity(nz);
    for j in 0..nz {
        let grid = &input.grids[j];
        let r2 = geom.radius[j] * geom.radius[j];
        let wall = k2[j][nr - 1];
        let uj: Vec<f64> = (0..nr)
            .map(|i| {
                let r = grid.r[i];
                dp_z[j] * 0.25 * (r * r - r2) - input.potential.dphi_z[j] * lambda2 * input.zetas[j][i] + k2[j][i] - wall
            })
            .collect();
        flow_rate.push(grid.integrate(&uj));
        u.push(uj);
    }
    let w = radial_velocity(geom, input.grids, &s, &u);

    Hydrodynamics {
        pressure: PressureField {
            p_r,
            q_check,
            p_z,
            dp_z,
            psi,
            k4,
        },
        kernels: EdlKernels {
            k1,
            k2,
            k3,
            zeta_integral,
            i_ez,
            i_k3,
        },
        velocity: VelocityField { u, w, flow_rate },
    }
}

/// Radial velocity from continuity, `w = -(1/r) d/dz|_r int_0^r u r dr`.
fn radial_velocity(geom: &PoreGeometry, grids: &[RadialGrid], s: &[f64], u: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let nz = u.len();
    let stream: Vec<Vec<f64>> = (0..nz)
        .map(|j| {
            let ur: Vec<f64> = u[j].iter().zip(&grids[j].r).map(|(u, r)| u * r).collect();
            cumulative_trapezoid(&grids[j].r, &ur)
        })
        .collect();
    let d_stream_dr: Vec<Vec<f64>> = (0..nz)
        .map(|j| u[j].iter().zip(&grids[j].r).map(|(u, r)| u * r).collect())
        .collect();
    let ds = dz_fixed_r(geom, s, &stream, &d_stream_dr);
    (0..nz)
        .map(|j| {
            ds[j]
                .iter()
                .zip(&grids[j].r)
                .map(|(d, &r)| if r > 0.0 { -d / r } else { 0.0 })
                .collect()
        })
        .collect()
}

//! CSV artifacts. Every number is written with 17 significant digits so that
//! identical runs give byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use pnps_core::observables::{current_at, current_profile, flow_threshold_coefficient, max_velocity, mean_velocity, mean_zeta};
use pnps_core::{Case, MixtureSpec, ReferenceScales, SteadySolution};

/// Physical dimension of a column, used by `--si`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unit {
    One,
    Length,
    Radius,
    Potential,
    Concentration,
    Pressure,
    Velocity,
    RadialVelocity,
    Current,
    FlowRate,
    /// Flow rate integrated along the pore.
    FlowVolume,
    /// Potential integrated over a cross-section.
    ZetaArea,
    /// Potential integrated over a cross-section and along the pore.
    ZetaVolume,
    SurfaceCharge,
}

impl Unit {
    pub fn factor(self, s: &ReferenceScales) -> f64 {
        match self {
            Unit::One => 1.0,
            Unit::Length => s.l0,
            Unit::Radius => s.r0,
            Unit::Potential => s.potential(),
            Unit::Concentration => s.c_r,
            Unit::Pressure => s.pressure(),
            Unit::Velocity => s.velocity(),
            Unit::RadialVelocity => s.velocity() * s.r0 / s.l0,
            Unit::Current => s.current(),
            Unit::FlowRate => s.flow_rate(),
            Unit::FlowVolume => s.flow_rate() * s.l0,
            Unit::ZetaArea => s.potential() * s.r0 * s.r0,
            Unit::ZetaVolume => s.potential() * s.r0 * s.r0 * s.l0,
            Unit::SurfaceCharge => s.sigma_r,
        }
    }

    pub fn si_name(self) -> &'static str {
        match self {
            Unit::One => "1",
            Unit::Length | Unit::Radius => "m",
            Unit::Potential => "V",
            Unit::Concentration => "mol/L",
            Unit::Pressure => "Pa",
            Unit::Velocity | Unit::RadialVelocity => "m/s",
            Unit::Current => "A",
            Unit::FlowRate => "m^3/s",
            Unit::FlowVolume => "m^4/s",
            Unit::ZetaArea => "V m^2",
            Unit::ZetaVolume => "V m^3",
            Unit::SurfaceCharge => "C/m^2",
        }
    }
}

pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// A table with unit-tagged columns.
pub struct Table {
    pub columns: Vec<(String, Unit)>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: Vec<(String, Unit)>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn header(&self) -> String {
        self.columns.iter().map(|c| c.0.as_str()).collect::<Vec<_>>().join(",")
    }

    pub fn format_row(&self, row: &[f64], si: Option<&ReferenceScales>) -> String {
        row.iter()
            .zip(&self.columns)
            .map(|(v, (_, unit))| num(si.map_or(*v, |s| v * unit.factor(s))))
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn render(&self, si: Option<&ReferenceScales>) -> String {
        let mut out = self.header();
        out.push('\n');
        for row in &self.rows {
            out.push_str(&self.format_row(row, si));
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path, si: Option<&ReferenceScales>) -> Result<()> {
        fs::write(path, self.render(si)).with_context(|| format!("writing {}", path.display()))
    }
}

fn per_species(prefix: &str, mixture: &MixtureSpec, unit: Unit) -> Vec<(String, Unit)> {
    mixture.species.iter().map(|s| (format!("{prefix}_{}", s.name), unit)).collect()
}

/// Summary columns for a case with this mixture.
pub fn summary_columns(mixture: &MixtureSpec) -> Vec<(String, Unit)> {
    let mut cols = vec![
        ("dphi".to_string(), Unit::Potential),
        ("dp".to_string(), Unit::Pressure),
        ("nbulk".to_string(), Unit::Concentration),
        ("zeta_mean".to_string(), Unit::ZetaVolume),
        ("u_mean".to_string(), Unit::FlowVolume),
        ("u_max".to_string(), Unit::Velocity),
        ("z_u_max".to_string(), Unit::Length),
        ("Q_mid".to_string(), Unit::FlowRate),
    ];
    cols.extend(per_species("I", mixture, Unit::Current));
    cols.push(("I".to_string(), Unit::Current));
    cols.extend(per_species("t", mixture, Unit::One));
    cols.push(("iterations".to_string(), Unit::One));
    cols.push(("converged".to_string(), Unit::One));
    cols
}

/// Boundary data of a case, the leading summary values.
pub fn drive(case: &Case) -> [f64; 3] {
    let bc = &case.preset.bc;
    [bc.dphi(), bc.dp(), bc.n_out[0]]
}

/// Summary values in the order of [`summary_columns`]; `NaN` where a
/// quantity is undefined or the solve failed.
pub fn summary_values(case: &Case, sol: Option<&SteadySolution>) -> Vec<f64> {
    let ns = case.preset.mixture.n_species();
    let mut v = drive(case).to_vec();
    let Some(sol) = sol else {
        v.resize(summary_columns(&case.preset.mixture).len(), f64::NAN);
        return v;
    };
    let (u_max, z_u_max, _) = max_velocity(sol);
    let mid = sol.problem.geometry.nearest_node(0.5 * sol.problem.geometry.length);
    v.extend([mean_zeta(sol), mean_velocity(sol), u_max, z_u_max, sol.hydro.velocity.flow_rate[mid]]);
    let c = current_at(sol, 0.0);
    v.extend(&c.species);
    v.push(c.total);
    let magnitude: f64 = c.species.iter().map(|i| i.abs()).sum();
    let defined = c.total.abs() > pnps_core::observables::ZERO_CURRENT * (1.0 + magnitude);
    v.extend((0..ns).map(|a| if defined { c.species[a] / c.total } else { f64::NAN }));
    v.push(sol.iterations() as f64);
    v.push(if sol.converged { 1.0 } else { 0.0 });
    v
}

/// Flow coefficient `C_u`, or `NaN` off the cylinder.
pub fn flow_coefficient(sol: &SteadySolution) -> f64 {
    flow_threshold_coefficient(sol).unwrap_or(f64::NAN)
}

pub fn fields_table(sol: &SteadySolution) -> Table {
    let mix = &sol.problem.mixture;
    let mut cols = vec![("z".to_string(), Unit::Length), ("r".to_string(), Unit::Radius), ("phi".to_string(), Unit::Potential)];
    cols.extend(per_species("n", mix, Unit::Concentration));
    cols.extend([
        ("p".to_string(), Unit::Pressure),
        ("u".to_string(), Unit::Velocity),
        ("w".to_string(), Unit::RadialVelocity),
    ]);
    let mut t = Table::new(cols);
    let h = &sol.hydro;
    for (j, z) in sol.z().iter().enumerate() {
        let slice = &sol.slices[j];
        for (i, r) in sol.grids[j].r.iter().enumerate() {
            let mut row = vec![*z, *r, sol.potential.phi_z[j] + slice.phi[i]];
            row.extend(slice.composition.n.iter().map(|n| n[i]));
            row.extend([h.pressure.p_z[j] + h.pressure.p_r[j][i], h.velocity.u[j][i], h.velocity.w[j][i]]);
            t.rows.push(row);
        }
    }
    t
}

pub fn axial_table(sol: &SteadySolution) -> Table {
    let mix = &sol.problem.mixture;
    let geom = &sol.problem.geometry;
    let mut cols = vec![
        ("z".to_string(), Unit::Length),
        ("R".to_string(), Unit::Radius),
        ("sigma".to_string(), Unit::SurfaceCharge),
    ];
    cols.extend(per_species("Q", mix, Unit::One));
    cols.extend([
        ("phi_z".to_string(), Unit::Potential),
        ("p_z".to_string(), Unit::Pressure),
        ("zeta_int".to_string(), Unit::ZetaArea),
        ("Q_flow".to_string(), Unit::FlowRate),
    ]);
    cols.extend(per_species("I", mix, Unit::Current));
    cols.push(("I".to_string(), Unit::Current));
    let mut t = Table::new(cols);
    let faces = sol.z().len() - 1;
    let totals = current_profile(sol);
    // node values of face quantities: end faces at the ends, averages inside
    let at_node = |f: &dyn Fn(usize) -> f64, j: usize| match j {
        0 => f(0),
        j if j == faces => f(faces - 1),
        j => 0.5 * (f(j - 1) + f(j)),
    };
    for (j, z) in sol.z().iter().enumerate() {
        let mut row = vec![*z, geom.radius[j], geom.sigma[j]];
        row.extend(sol.factors.q.iter().map(|q| q[j]));
        row.extend([
            sol.potential.phi_z[j],
            sol.hydro.pressure.p_z[j],
            sol.hydro.kernels.zeta_integral[j],
            sol.hydro.velocity.flow_rate[j],
        ]);
        for (a, s) in mix.species.iter().enumerate() {
            let flux = &sol.factors.flux[a];
            row.push(at_node(&|f| 2.0 * std::f64::consts::PI * s.z * flux[f], j));
        }
        row.push(at_node(&|f| totals[f], j));
        t.rows.push(row);
    }
    t
}

/// Resolved parameters, iteration log and convergence state.
pub fn meta_text(case: &Case, sol: Option<&SteadySolution>, si: bool, note: Option<&str>) -> Result<String> {
    let mut out = String::new();
    let converged = sol.is_some_and(|s| s.converged);
    writeln!(out, "converged = {converged}")?;
    if let Some(note) = note {
        writeln!(out, "status = {note:?}")?;
    }
    writeln!(out, "units = {:?}", if si { "si" } else { "dimensionless" })?;
    if si {
        let units: Vec<String> = summary_columns(&case.preset.mixture)
            .iter()
            .map(|(name, unit)| format!("{name}={}", unit.si_name()))
            .collect();
        writeln!(out, "summary_units = {:?}", units.join(" "))?;
    }
    if let Some(sol) = sol {
        writeln!(out, "iterations = {}", sol.iterations())?;
        let log: Vec<String> = sol.log.iter().map(|e| num(*e)).collect();
        writeln!(out, "residuals = [{}]", log.join(", "))?;
        if !sol.ramp.is_empty() {
            let ramp: Vec<String> = sol.ramp.iter().map(|e| num(*e)).collect();
            writeln!(out, "continuation = [{}]", ramp.join(", "))?;
        }
    }
    writeln!(out)?;
    out.push_str(&toml::to_string(case).context("serialising the case")?);
    Ok(out)
}

/// Write every artifact of one solve into `dir`.
pub fn write_run(dir: &Path, case: &Case, sol: &SteadySolution, si: bool, note: Option<&str>) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let scales = si.then_some(&case.preset.scales);
    fields_table(sol).write(&dir.join("fields.csv"), scales)?;
    axial_table(sol).write(&dir.join("axial.csv"), scales)?;
    let mut summary = Table::new(summary_columns(&case.preset.mixture));
    summary.rows.push(summary_values(case, Some(sol)));
    summary.write(&dir.join("summary.csv"), scales)?;
    fs::write(dir.join("meta.txt"), meta_text(case, Some(sol), si, note)?).context("writing meta.txt")
}

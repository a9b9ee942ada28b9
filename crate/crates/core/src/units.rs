//! Reference scales, dimensionless groups, boundary data and solver settings.
//!
//! This is the only module that deals with SI quantities.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Faraday constant [C/mol].
pub const FARADAY: f64 = 96_485.332_12;
/// Molar gas constant [J/(mol K)].
pub const GAS_CONSTANT: f64 = 8.314_462_618;
/// Vacuum permittivity [F/m].
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;

/// Dimensional reference quantities that generate the dimensionless model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceScales {
    /// Pore length scale [m].
    pub l0: f64,
    /// Pore radius scale [m].
    pub r0: f64,
    /// Time scale [s].
    pub tau: f64,
    /// Reference concentration [mol/L].
    pub c_r: f64,
    /// Reference surface charge [C/m^2].
    pub sigma_r: f64,
    /// Temperature [K].
    pub temperature: f64,
    /// Dynamic viscosity [Pa s].
    pub nu: f64,
    /// Relative permittivity.
    pub eps_r: f64,
}

/// The four groups that enter the reduced equations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionlessGroups {
    /// Debye length over reference radius.
    pub lambda: f64,
    /// Surface charge group.
    pub gamma: f64,
    /// Peclet number.
    pub pe: f64,
    /// Aspect ratio R0/L0.
    pub delta: f64,
}

/// Discretisation and iteration controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub n_r: usize,
    pub n_z: usize,
    pub picard_tol: f64,
    pub picard_max_iter: usize,
    /// Mixing factor for the Picard update; halved when the error grows.
    pub relaxation: f64,
    /// Anderson mixing depth; 0 gives plain relaxed Picard.
    #[serde(default = "default_anderson_depth")]
    pub anderson_depth: usize,
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    /// Pseudo-time step for the axial solve. `None` solves the steady system directly.
    #[serde(default)]
    pub pseudo_dt: Option<f64>,
}

fn default_anderson_depth() -> usize {
    5
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            n_r: 200,
            n_z: 200,
            picard_tol: 1e-8,
            picard_max_iter: 200,
            relaxation: 1.0,
            anderson_depth: default_anderson_depth(),
            newton_tol: 1e-12,
            newton_max_iter: 100,
            pseudo_dt: None,
        }
    }
}

/// Dirichlet data at the outlet (`z = 0`) and inlet (`z = L`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryConditions {
    pub n_out: Vec<f64>,
    pub n_in: Vec<f64>,
    pub phi_out: f64,
    pub phi_in: f64,
    pub p_out: f64,
    pub p_in: f64,
}

impl BoundaryConditions {
    /// Equal bulk concentration `n` of every species at both ends.
    pub fn bulk(n: f64, species: usize, dphi: f64, dp: f64) -> Self {
        Self {
            n_out: vec![n; species],
            n_in: vec![n; species],
            phi_out: 0.0,
            phi_in: dphi,
            p_out: 0.0,
            p_in: dp,
        }
    }

    pub fn dphi(&self) -> f64 {
        self.phi_in - self.phi_out
    }

    pub fn dp(&self) -> f64 {
        self.p_in - self.p_out
    }

    pub fn validate(&self, species: usize) -> Result<()> {
        if self.n_out.len() != species || self.n_in.len() != species {
            return Err(Error::InvalidInput(format!(
                "boundary data has {}/{} concentrations for {species} species",
                self.n_out.len(),
                self.n_in.len()
            )));
        }
        for &n in self.n_out.iter().chain(&self.n_in) {
            if !(n >= 0.0) || !n.is_finite() {
                return Err(Error::InvalidInput(format!("boundary concentration {n} must be finite and non-negative")));
            }
        }
        for (name, v) in [
            ("phi_out", self.phi_out),
            ("phi_in", self.phi_in),
            ("p_out", self.p_out),
            ("p_in", self.p_in),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidInput(format!("{name} is not finite")));
            }
        }
        Ok(())
    }
}

impl ReferenceScales {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("l0", self.l0),
            ("r0", self.r0),
            ("tau", self.tau),
            ("c_r", self.c_r),
            ("sigma_r", self.sigma_r),
            ("temperature", self.temperature),
            ("nu", self.nu),
            ("eps_r", self.eps_r),
        ];
        for (name, v) in fields {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidInput(format!("scale {name} = {v} must be positive")));
            }
        }
        if self.eps_r <= 1.0 {
            return Err(Error::InvalidInput(format!("eps_r = {} must exceed 1", self.eps_r)));
        }
        Ok(())
    }

    /// Thermal voltage R_G T / F [V].
    pub fn potential(&self) -> f64 {
        GAS_CONSTANT * self.temperature / FARADAY
    }

    /// Reference diffusivity L0^2 / tau [m^2/s].
    pub fn diffusivity(&self) -> f64 {
        self.l0 * self.l0 / self.tau
    }

    /// Reference concentration in mol/m^3.
    pub fn concentration_si(&self) -> f64 {
        self.c_r * 1e3
    }

    /// Osmotic reference pressure c^R R_G T [Pa].
    pub fn pressure(&self) -> f64 {
        self.concentration_si() * GAS_CONSTANT * self.temperature
    }

    /// Lubrication velocity scale p^R R0^2 / (nu L0) [m/s].
    pub fn velocity(&self) -> f64 {
        self.pressure() * self.r0 * self.r0 / (self.nu * self.l0)
    }

    /// Current scale F R0^2 D^R c^R / L0 [A].
    pub fn current(&self) -> f64 {
        FARADAY * self.r0 * self.r0 * self.diffusivity() * self.concentration_si() / self.l0
    }

    /// Volumetric flow-rate scale u^R R0^2 [m^3/s].
    pub fn flow_rate(&self) -> f64 {
        self.velocity() * self.r0 * self.r0
    }

    /// Rebuild scales from groups plus the physical constants that the groups
    /// do not determine. Requires `pe > 0`.
    pub fn from_groups(groups: &DimensionlessGroups, temperature: f64, eps_r: f64, nu: f64, c_r: f64) -> Result<Self> {
        groups.validate()?;
        if !(groups.pe > 0.0) {
            return Err(Error::InvalidInput("pe must be positive to recover a time scale".into()));
        }
        let phi_r = GAS_CONSTANT * temperature / FARADAY;
        let eps = VACUUM_PERMITTIVITY * eps_r;
        let c_si = c_r * 1e3;
        let r0 = (eps * phi_r / (FARADAY * c_si * groups.lambda * groups.lambda)).sqrt();
        let sigma_r = groups.gamma * eps * phi_r / r0;
        let l0 = r0 / groups.delta;
        let u_r = c_si * GAS_CONSTANT * temperature * r0 * r0 / (nu * l0);
        let d_r = u_r * l0 / groups.pe;
        let scales = Self {
            l0,
            r0,
            tau: l0 * l0 / d_r,
            c_r,
            sigma_r,
            temperature,
            nu,
            eps_r,
        };
        scales.validate()?;
        Ok(scales)
    }
}

impl DimensionlessGroups {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return Err(Error::InvalidInput(format!("lambda = {} must be positive", self.lambda)));
        }
        if !self.gamma.is_finite() {
            return Err(Error::InvalidInput("gamma is not finite".into()));
        }
        if !(self.pe >= 0.0) || !self.pe.is_finite() {
            return Err(Error::InvalidInput(format!("pe = {} must be non-negative", self.pe)));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidInput(format!("delta = {} must lie in (0, 1)", self.delta)));
        }
        Ok(())
    }

    /// Whether lambda lies outside the regime the reduction is built for.
    pub fn lambda_out_of_regime(&self) -> bool {
        self.lambda > 1.0
    }
}

/// Compute the dimensionless groups from reference scales.
pub fn derive_groups(scales: &ReferenceScales) -> Result<DimensionlessGroups> {
    scales.validate()?;
    let phi_r = scales.potential();
    let eps = VACUUM_PERMITTIVITY * scales.eps_r;
    let lambda2 = eps * phi_r / (FARADAY * scales.concentration_si() * scales.r0 * scales.r0);
    let gamma = scales.r0 * scales.sigma_r / (eps * phi_r);
    let pe = scales.velocity() * scales.l0 / scales.diffusivity();
    let groups = DimensionlessGroups {
        lambda: lambda2.sqrt(),
        gamma,
        pe,
        delta: scales.r0 / scales.l0,
    };
    groups.validate()?;
    Ok(groups)
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_r < 16 || self.n_z < 16 {
            return Err(Error::InvalidInput(format!(
                "grids need at least 16 nodes (n_r = {}, n_z = {})",
                self.n_r, self.n_z
            )));
        }
        if !(self.picard_tol > 0.0) || !(self.newton_tol > 0.0) {
            return Err(Error::InvalidInput("tolerances must be positive".into()));
        }
        if !(self.relaxation > 0.0 && self.relaxation <= 1.0) {
            return Err(Error::InvalidInput(format!("relaxation = {} must lie in (0, 1]", self.relaxation)));
        }
        if self.picard_max_iter == 0 || self.newton_max_iter == 0 {
            return Err(Error::InvalidInput("iteration caps must be positive".into()));
        }
        if let Some(dt) = self.pseudo_dt {
            if !(dt > 0.0) {
                return Err(Error::InvalidInput("pseudo_dt must be positive".into()));
            }
        }
        Ok(())
    }
}

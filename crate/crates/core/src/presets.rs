//! Built-in parameter sets.

use serde::{Deserialize, Serialize};

use crate::coupler::Problem;
use crate::error::{Error, Result};
use crate::geometry::{tanh_surface_charge, ChargeSpec, GeometrySpec};
use crate::mixture::{MixtureSpec, SpeciesSpec, Variant};
use crate::units::{BoundaryConditions, DimensionlessGroups, ReferenceScales, SolverConfig};

pub const PRESET_NAMES: [&str; 5] = ["general", "cylinder", "trumpet", "clya", "clya-table"];

/// Solvent molar volume used whenever a finite-size variant is requested
/// without one.
pub const DEFAULT_V0: f64 = 0.018;

/// Everything needed to set up a case apart from the discretisation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Preset {
    pub name: String,
    pub scales: ReferenceScales,
    pub groups: DimensionlessGroups,
    pub mixture: MixtureSpec,
    pub bc: BoundaryConditions,
    pub geometry: GeometrySpec,
    pub charge: ChargeSpec,
    /// Second wall-charge amplitude for presets with two reference values.
    #[serde(default)]
    pub sigma0_alternate: Option<f64>,
}

impl Preset {
    /// Build the discretised problem.
    pub fn problem(&self, config: SolverConfig) -> Result<Problem> {
        config.validate()?;
        let geom = self.geometry.build(config.n_z)?;
        let geom = tanh_surface_charge(&geom, &self.charge)?;
        let problem = Problem {
            geometry: geom,
            mixture: self.mixture.clone(),
            bc: self.bc.clone(),
            groups: self.groups,
            config,
        };
        problem.validate()?;
        Ok(problem)
    }
}

fn scales(l0: f64, tau: f64) -> ReferenceScales {
    ReferenceScales {
        l0,
        r0: 1e-9,
        tau,
        c_r: 1.0,
        sigma_r: 0.16,
        temperature: 298.15,
        nu: 0.8904e-3,
        eps_r: 78.49,
    }
}

fn groups(delta: f64) -> DimensionlessGroups {
    DimensionlessGroups {
        lambda: 0.4,
        gamma: 9.23,
        pe: 2.78,
        delta,
    }
}

fn binary(k_plus: f64, k_minus: f64, a: f64, v: f64, v0: f64, variant: Variant) -> MixtureSpec {
    let species = [("plus", 1.0, k_plus), ("minus", -1.0, k_minus)]
        .into_iter()
        .map(|(name, z, k)| SpeciesSpec {
            name: name.into(),
            z,
            k,
            a,
            v,
        })
        .collect();
    MixtureSpec { species, v0, variant }
}

/// Look up a built-in preset by name.
pub fn load_preset(name: &str) -> Result<Preset> {
    let preset = match name {
        "general" => Preset {
            name: name.into(),
            scales: scales(1e-8, 1e-7),
            groups: groups(0.1),
            mixture: MixtureSpec::classical_binary(1.33, 0.79),
            bc: BoundaryConditions::bulk(1.0, 2, 0.0, 0.0),
            geometry: GeometrySpec::Cylinder {
                radius: 5.0,
                length: 25.0,
            },
            charge: ChargeSpec {
                sigma0: 0.0,
                l1: 5.0,
                l2: 20.0,
                eps: 5.0,
            },
            sigma0_alternate: None,
        },
        "cylinder" => Preset {
            name: name.into(),
            scales: scales(1e-8, 1e-7),
            groups: groups(0.1),
            mixture: MixtureSpec::classical_binary(1.33, 0.79),
            bc: BoundaryConditions::bulk(0.6, 2, -8.0, 0.0),
            geometry: GeometrySpec::Cylinder {
                radius: 5.0,
                length: 25.0,
            },
            charge: ChargeSpec {
                sigma0: 0.15,
                l1: 5.0,
                l2: 20.0,
                eps: 5.0,
            },
            sigma0_alternate: None,
        },
        "trumpet" => Preset {
            name: name.into(),
            scales: scales(1e-7, 1e-5),
            groups: groups(0.01),
            mixture: MixtureSpec::classical_binary(1.33, 0.79),
            bc: BoundaryConditions::bulk(0.1, 2, 8.0, 0.0),
            geometry: GeometrySpec::Trumpet {
                r1: 10.0,
                r2: 1.5,
                length: 10.0,
            },
            charge: ChargeSpec {
                sigma0: 1.0,
                l1: 1.0,
                l2: 9.0,
                eps: 8.0,
            },
            sigma0_alternate: None,
        },
        "clya" | "clya-table" => {
            let (sigma0, alternate) = if name == "clya" { (-0.55, -0.25) } else { (-0.25, -0.55) };
            Preset {
                name: name.into(),
                scales: scales(1e-8, 1e-7),
                groups: groups(0.1),
                mixture: binary(1.334, 2.032, 4.15, 0.075, DEFAULT_V0, Variant::Mixture),
                bc: BoundaryConditions::bulk(0.5, 2, -4.0, 0.0),
                geometry: GeometrySpec::Clya {
                    reservoir_radius: 5.0,
                    length: 5.5,
                },
                charge: ChargeSpec {
                    sigma0,
                    l1: 2.0,
                    l2: 3.5,
                    eps: 0.5,
                },
                sigma0_alternate: Some(alternate),
            }
        }
        other => return Err(Error::NotFound(format!("preset {other:?} (known: {})", PRESET_NAMES.join(", ")))),
    };
    Ok(preset)
}

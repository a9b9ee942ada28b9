//! TOML case files and layered parameter overrides.
//!
//! A case starts from a preset; a [`CaseFile`] then overrides individual
//! fields. Every field is optional and keys use the model's symbol names.
//!
//! ```toml
//! preset = "cylinder"
//! [groups]
//! pe = 2.78
//! [bc]
//! nbulk = 0.6
//! dphi = -8.0
//! [solver]
//! n_r = 100
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::coupler::Problem;
use crate::error::{Error, Result};
use crate::geometry::GeometrySpec;
use crate::mixture::Variant;
use crate::presets::{load_preset, Preset, DEFAULT_V0};
use crate::units::SolverConfig;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupOverrides {
    pub lambda: Option<f64>,
    pub gamma: Option<f64>,
    pub pe: Option<f64>,
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BcOverrides {
    /// Same bulk concentration for every species at both ends.
    pub nbulk: Option<f64>,
    pub n_out: Option<Vec<f64>>,
    pub n_in: Option<Vec<f64>>,
    /// Sets `phi_in = phi_out + dphi`.
    pub dphi: Option<f64>,
    pub phi_out: Option<f64>,
    pub phi_in: Option<f64>,
    /// Sets `p_in = p_out + dp`.
    pub dp: Option<f64>,
    pub p_out: Option<f64>,
    pub p_in: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureOverrides {
    pub variant: Option<Variant>,
    /// Ion-to-solvent volume ratio; 0 selects the classical model.
    pub a: Option<f64>,
    pub v0: Option<f64>,
    /// Diffusivity per species.
    pub k: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChargeOverrides {
    pub sigma0: Option<f64>,
    pub l1: Option<f64>,
    pub l2: Option<f64>,
    pub eps: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverOverrides {
    pub n_r: Option<usize>,
    pub n_z: Option<usize>,
    pub picard_tol: Option<f64>,
    pub picard_max_iter: Option<usize>,
    pub relaxation: Option<f64>,
    pub anderson_depth: Option<usize>,
    pub newton_tol: Option<f64>,
    pub newton_max_iter: Option<usize>,
    pub pseudo_dt: Option<f64>,
}

/// One layer of overrides.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseFile {
    pub preset: Option<String>,
    #[serde(default)]
    pub groups: GroupOverrides,
    #[serde(default)]
    pub bc: BcOverrides,
    #[serde(default)]
    pub mixture: MixtureOverrides,
    pub geometry: Option<GeometrySpec>,
    #[serde(default)]
    pub charge: ChargeOverrides,
    #[serde(default)]
    pub solver: SolverOverrides,
}

impl CaseFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::NotFound(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| e.context(path.display().to_string()))
    }
}

/// A preset plus discretisation, ready to be turned into a [`Problem`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Case {
    pub preset: Preset,
    pub config: SolverConfig,
}

impl Case {
    pub fn from_preset(name: &str) -> Result<Self> {
        Ok(Self {
            preset: load_preset(name)?,
            config: SolverConfig::default(),
        })
    }

    /// Apply layers in order; later layers win. A layer naming a preset
    /// restarts from that preset.
    pub fn layered<'a>(base: &str, layers: impl IntoIterator<Item = &'a CaseFile>) -> Result<Self> {
        let mut case = Self::from_preset(base)?;
        for layer in layers {
            if let Some(name) = &layer.preset {
                let config = case.config;
                case = Self::from_preset(name)?;
                case.config = config;
            }
            case.apply(layer)?;
        }
        Ok(case)
    }

    pub fn apply(&mut self, layer: &CaseFile) -> Result<()> {
        let p = &mut self.preset;
        let g = &layer.groups;
        set(&mut p.groups.lambda, g.lambda);
        set(&mut p.groups.gamma, g.gamma);
        set(&mut p.groups.pe, g.pe);
        set(&mut p.groups.delta, g.delta);

        self.apply_mixture(&layer.mixture)?;
        let p = &mut self.preset;
        let ns = p.mixture.n_species();

        let b = &layer.bc;
        if let Some(n) = b.nbulk {
            p.bc.n_out = vec![n; ns];
            p.bc.n_in = vec![n; ns];
        }
        set(&mut p.bc.n_out, b.n_out.clone());
        set(&mut p.bc.n_in, b.n_in.clone());
        set(&mut p.bc.phi_out, b.phi_out);
        set(&mut p.bc.phi_in, b.phi_in);
        if let Some(d) = b.dphi {
            p.bc.phi_in = p.bc.phi_out + d;
        }
        set(&mut p.bc.p_out, b.p_out);
        set(&mut p.bc.p_in, b.p_in);
        if let Some(d) = b.dp {
            p.bc.p_in = p.bc.p_out + d;
        }

        if let Some(spec) = &layer.geometry {
            let s = spec.resolved_length()? / p.geometry.resolved_length()?;
            p.charge.l1 *= s;
            p.charge.l2 *= s;
            p.charge.eps *= s;
            p.geometry = spec.clone();
        }
        let c = &layer.charge;
        set(&mut p.charge.sigma0, c.sigma0);
        set(&mut p.charge.l1, c.l1);
        set(&mut p.charge.l2, c.l2);
        set(&mut p.charge.eps, c.eps);

        let s = &layer.solver;
        let cfg = &mut self.config;
        set(&mut cfg.n_r, s.n_r);
        set(&mut cfg.n_z, s.n_z);
        set(&mut cfg.picard_tol, s.picard_tol);
        set(&mut cfg.picard_max_iter, s.picard_max_iter);
        set(&mut cfg.relaxation, s.relaxation);
        set(&mut cfg.anderson_depth, s.anderson_depth);
        set(&mut cfg.newton_tol, s.newton_tol);
        set(&mut cfg.newton_max_iter, s.newton_max_iter);
        if s.pseudo_dt.is_some() {
            cfg.pseudo_dt = s.pseudo_dt;
        }
        Ok(())
    }

    fn apply_mixture(&mut self, m: &MixtureOverrides) -> Result<()> {
        let mix = &mut self.preset.mixture;
        if let Some(k) = &m.k {
            if k.len() != mix.n_species() {
                return Err(Error::Config(format!("k has {} entries for {} species", k.len(), mix.n_species())));
            }
            for (s, &k) in mix.species.iter_mut().zip(k) {
                s.k = k;
            }
        }
        let v0 = m.v0.unwrap_or(if mix.v0 > 0.0 { mix.v0 } else { DEFAULT_V0 });
        let a = match (m.variant, m.a) {
            (_, Some(a)) => Some(a),
            (Some(Variant::Classical), None) => Some(0.0),
            (Some(Variant::Bikerman), None) => Some(1.0),
            (Some(Variant::Mixture), None) => {
                if mix.variant == Variant::Mixture {
                    None
                } else {
                    return Err(Error::Config("the mixture variant needs a volume ratio a".into()));
                }
            }
            (None, None) => None,
        };
        if let Some(a) = a {
            *mix = mix.with_volume_ratio(a, v0)?;
            if let Some(variant) = m.variant {
                if variant != mix.variant {
                    return Err(Error::Config(format!("variant {variant} is inconsistent with a = {a}")));
                }
            }
        } else if let Some(v0) = m.v0 {
            mix.v0 = v0;
        }
        Ok(())
    }

    pub fn problem(&self) -> Result<Problem> {
        self.preset.problem(self.config)
    }
}

fn set<T>(target: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *target = v;
    }
}

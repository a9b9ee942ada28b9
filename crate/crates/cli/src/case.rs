use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use pnps_core::config::{BcOverrides, GroupOverrides, MixtureOverrides, SolverOverrides};
use pnps_core::{Case, CaseFile, GeometrySpec, Variant};

/// Case selection shared by every solving verb. Precedence: preset, then
/// flags, then the config file.
#[derive(Debug, Clone, Args)]
pub struct CaseArgs {
    /// Built-in parameter set (see `pnps presets`).
    #[arg(long)]
    pub preset: Option<String>,
    /// TOML case file; its values override the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// cylinder[:R:L], trumpet[:R1:R2:L], clya or profile:<path>.
    #[arg(long)]
    pub geometry: Option<String>,
    /// classical, bikerman or mixture.
    #[arg(long)]
    pub variant: Option<Variant>,
    /// Ion-to-solvent volume ratio.
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub dphi: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub dp: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub nbulk: Option<f64>,
    #[arg(long)]
    pub pe: Option<f64>,
    #[arg(long)]
    pub nr: Option<usize>,
    #[arg(long)]
    pub nz: Option<usize>,
    /// Picard tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
}

pub fn parse_geometry(text: &str) -> Result<GeometrySpec> {
    let (kind, rest) = text.split_once(':').unwrap_or((text, ""));
    let numbers = || -> Result<Vec<f64>> {
        rest.split(':')
            .map(|s| s.parse::<f64>().with_context(|| format!("bad number {s:?} in --geometry {text}")))
            .collect()
    };
    Ok(match (kind, rest.is_empty()) {
        ("cylinder", true) => GeometrySpec::Cylinder {
            radius: 5.0,
            length: 25.0,
        },
        ("cylinder", false) => match numbers()?[..] {
            [radius, length] => GeometrySpec::Cylinder { radius, length },
            _ => bail!("expected cylinder:R:L"),
        },
        ("trumpet", true) => GeometrySpec::Trumpet {
            r1: 10.0,
            r2: 1.5,
            length: 10.0,
        },
        ("trumpet", false) => match numbers()?[..] {
            [r1, r2, length] => GeometrySpec::Trumpet { r1, r2, length },
            _ => bail!("expected trumpet:R1:R2:L"),
        },
        ("clya", true) => GeometrySpec::Clya {
            reservoir_radius: 5.0,
            length: 5.5,
        },
        ("profile", false) => GeometrySpec::Profile {
            path: rest.to_string(),
            reservoir_radius: None,
            length: None,
        },
        _ => bail!("unknown geometry {text:?}"),
    })
}

impl CaseArgs {
    fn flags(&self) -> Result<CaseFile> {
        Ok(CaseFile {
            preset: None,
            groups: GroupOverrides {
                pe: self.pe,
                ..Default::default()
            },
            bc: BcOverrides {
                nbulk: self.nbulk,
                dphi: self.dphi,
                dp: self.dp,
                ..Default::default()
            },
            mixture: MixtureOverrides {
                variant: self.variant,
                a: self.a,
                ..Default::default()
            },
            geometry: self.geometry.as_deref().map(parse_geometry).transpose()?,
            charge: Default::default(),
            solver: SolverOverrides {
                n_r: self.nr,
                n_z: self.nz,
                picard_tol: self.tol,
                ..Default::default()
            },
        })
    }

    pub fn resolve(&self) -> Result<Case> {
        let flags = self.flags()?;
        let mut file = match &self.config {
            Some(path) => CaseFile::read(path)?,
            None => CaseFile::default(),
        };
        let base = file
            .preset
            .take()
            .or_else(|| self.preset.clone())
            .unwrap_or_else(|| "cylinder".to_string());
        Ok(Case::layered(&base, [&flags, &file])?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometry_forms() {
        assert_eq!(
            parse_geometry("cylinder:3:12").unwrap(),
            GeometrySpec::Cylinder {
                radius: 3.0,
                length: 12.0
            }
        );
        assert!(matches!(parse_geometry("trumpet").unwrap(), GeometrySpec::Trumpet { .. }));
        assert!(matches!(parse_geometry("profile:a.txt").unwrap(), GeometrySpec::Profile { path, .. } if path == "a.txt"));
        assert!(parse_geometry("cone").is_err());
        assert!(parse_geometry("cylinder:3").is_err());
        assert!(parse_geometry("profile").is_err());
    }
}

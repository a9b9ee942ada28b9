//! Pore shape `R(z)`, wall charge `sigma(z)` and the axial geometric integrals.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{cumulative_trapezoid, linspace};

/// Built-in approximate ClyA cross-section (pore section only, z in [2, 3.5]).
pub const CLYA_PROFILE: &str = include_str!("../data/clya_profile.txt");

/// Sampled axisymmetric pore.
#[derive(Debug, Clone, PartialEq)]
pub struct PoreGeometry {
    pub length: f64,
    pub z: Vec<f64>,
    pub radius: Vec<f64>,
    pub d_radius: Vec<f64>,
    pub sigma: Vec<f64>,
}

/// Cumulative `int R^-2 dz` and `int R^-4 dz` and their normalised forms.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometricIntegrals {
    pub i_phiz: Vec<f64>,
    pub i_p: Vec<f64>,
    pub delta_i_phiz: Vec<f64>,
    pub delta_i_p: Vec<f64>,
}

/// How to build a geometry; stored in presets and case files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GeometrySpec {
    Cylinder {
        radius: f64,
        length: f64,
    },
    Trumpet {
        r1: f64,
        r2: f64,
        length: f64,
    },
    /// Tabulated profile. With `reservoir_radius` and `length` set, the table
    /// is embedded between two linear flares that open to that radius at
    /// `z = 0` and `z = length`.
    Profile {
        path: String,
        #[serde(default)]
        reservoir_radius: Option<f64>,
        #[serde(default)]
        length: Option<f64>,
    },
    /// The shipped ClyA table with its reservoir flares.
    Clya {
        reservoir_radius: f64,
        length: f64,
    },
}

/// Parameters of the smoothed-step wall charge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChargeSpec {
    pub sigma0: f64,
    pub l1: f64,
    pub l2: f64,
    pub eps: f64,
}

impl GeometrySpec {
    pub fn build(&self, n_z: usize) -> Result<PoreGeometry> {
        match self {
            GeometrySpec::Cylinder { radius, length } => make_cylinder(*radius, *length, n_z),
            GeometrySpec::Trumpet { r1, r2, length } => make_trumpet(*r1, *r2, *length, n_z),
            GeometrySpec::Profile {
                path,
                reservoir_radius,
                length,
            } => {
                let records = read_profile(Path::new(path))?;
                match (reservoir_radius, length) {
                    (Some(rr), Some(l)) => flared_profile(&records, *rr, *l, n_z),
                    (None, None) => load_profile(&records, n_z),
                    _ => Err(Error::InvalidInput(
                        "profile flares need both reservoir_radius and length".into(),
                    )),
                }
            }
            GeometrySpec::Clya {
                reservoir_radius,
                length,
            } => flared_profile(&parse_profile(CLYA_PROFILE)?, *reservoir_radius, *length, n_z),
        }
    }

    pub fn length(&self) -> Option<f64> {
        match self {
            GeometrySpec::Cylinder { length, .. } | GeometrySpec::Trumpet { length, .. } => Some(*length),
            GeometrySpec::Profile { length, .. } => *length,
            GeometrySpec::Clya { length, .. } => Some(*length),
        }
    }

    /// Pore length, reading the profile table when it is not given.
    pub fn resolved_length(&self) -> Result<f64> {
        match (self.length(), self) {
            (Some(l), _) => Ok(l),
            (None, GeometrySpec::Profile { path, .. }) => {
                let records = read_profile(Path::new(path))?;
                validate_records(&records)?;
                Ok(records[records.len() - 1].0 - records[0].0)
            }
            (None, _) => unreachable!("only profiles leave the length open"),
        }
    }
}

fn check_grid_count(n_z: usize) -> Result<()> {
    if n_z < 3 {
        return Err(Error::InvalidInput(format!("n_z = {n_z} is too small")));
    }
    Ok(())
}

fn check_length(length: f64) -> Result<()> {
    if !(length > 0.0) || !length.is_finite() {
        return Err(Error::InvalidInput(format!("length = {length} must be positive")));
    }
    Ok(())
}

/// Straight pore of constant radius.
pub fn make_cylinder(radius: f64, length: f64, n_z: usize) -> Result<PoreGeometry> {
    check_grid_count(n_z)?;
    check_length(length)?;
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::InvalidInput(format!("radius = {radius} must be positive")));
    }
    Ok(PoreGeometry {
        length,
        z: linspace(0.0, length, n_z),
        radius: vec![radius; n_z],
        d_radius: vec![0.0; n_z],
        sigma: vec![0.0; n_z],
    })
}

/// Parabolic constriction with radius `r1` at both ends and `r2` at `L/2`.
pub fn make_trumpet(r1: f64, r2: f64, length: f64, n_z: usize) -> Result<PoreGeometry> {
    check_grid_count(n_z)?;
    check_length(length)?;
    if !(r2 > 0.0) || !(r1 >= r2) {
        return Err(Error::InvalidInput(format!("trumpet needs r1 >= r2 > 0 (got {r1}, {r2})")));
    }
    let c = 4.0 * (r1 - r2) / (length * length);
    let z = linspace(0.0, length, n_z);
    let radius = z.iter().map(|&z| c * (z * z - z * length) + r1).collect();
    let d_radius = z.iter().map(|&z| c * (2.0 * z - length)).collect();
    Ok(PoreGeometry {
        length,
        z,
        radius,
        d_radius,
        sigma: vec![0.0; n_z],
    })
}

/// Parse a two-column `z R` table. Blank lines and lines starting with `#`
/// are skipped.
pub fn parse_profile(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(Error::Format {
                line: i + 1,
                message: format!("expected 2 columns, found {}", fields.len()),
            });
        }
        let parse = |s: &str| {
            s.parse::<f64>().map_err(|e| Error::Format {
                line: i + 1,
                message: format!("{s:?}: {e}"),
            })
        };
        out.push((parse(fields[0])?, parse(fields[1])?));
    }
    Ok(out)
}

pub fn read_profile(path: &Path) -> Result<Vec<(f64, f64)>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::NotFound(format!("profile {}: {e}", path.display())))?;
    parse_profile(&text)
}

fn validate_records(records: &[(f64, f64)]) -> Result<()> {
    if records.len() < 4 {
        return Err(Error::Format {
            line: 0,
            message: format!("profile needs at least 4 records, got {}", records.len()),
        });
    }
    for (i, w) in records.windows(2).enumerate() {
        if !(w[1].0 > w[0].0) {
            return Err(Error::Format {
                line: i + 2,
                message: format!("z must be strictly increasing ({} after {})", w[1].0, w[0].0),
            });
        }
    }
    for (i, &(z, r)) in records.iter().enumerate() {
        if !z.is_finite() || !(r > 0.0) || !r.is_finite() {
            return Err(Error::Format {
                line: i + 1,
                message: format!("radius must be positive and finite (z = {z}, R = {r})"),
            });
        }
    }
    Ok(())
}

/// Tabulated profile interpolated monotonically onto a uniform grid. The
/// table's z range is shifted to start at 0.
pub fn load_profile(records: &[(f64, f64)], n_z: usize) -> Result<PoreGeometry> {
    check_grid_count(n_z)?;
    validate_records(records)?;
    let z0 = records[0].0;
    let xs: Vec<f64> = records.iter().map(|r| r.0 - z0).collect();
    let ys: Vec<f64> = records.iter().map(|r| r.1).collect();
    let spline = MonotoneCubic::new(xs, ys)?;
    let length = spline.x[spline.x.len() - 1];
    let z = linspace(0.0, length, n_z);
    let radius = z.iter().map(|&z| spline.eval(z)).collect();
    let d_radius = z.iter().map(|&z| spline.derivative(z)).collect();
    Ok(PoreGeometry {
        length,
        z,
        radius,
        d_radius,
        sigma: vec![0.0; n_z],
    })
}

/// Tabulated pore section between two linear reservoir flares.
///
/// The table must lie strictly inside `(0, length)`. The grid is uniform on
/// each of the three segments and keeps both junctions as nodes; the radius
/// slope at a junction is the mean of its one-sided values.
pub fn flared_profile(records: &[(f64, f64)], reservoir_radius: f64, length: f64, n_z: usize) -> Result<PoreGeometry> {
    check_grid_count(n_z)?;
    check_length(length)?;
    validate_records(records)?;
    if !(reservoir_radius > 0.0) {
        return Err(Error::InvalidInput("reservoir radius must be positive".into()));
    }
    let (za, ra) = records[0];
    let (zb, rb) = records[records.len() - 1];
    if !(za > 0.0 && zb < length) {
        return Err(Error::InvalidInput(format!(
            "profile range [{za}, {zb}] must lie inside (0, {length})"
        )));
    }
    let spline = MonotoneCubic::new(records.iter().map(|r| r.0).collect(), records.iter().map(|r| r.1).collect())?;
    let slope_in = (ra - reservoir_radius) / za;
    let slope_out = (reservoir_radius - rb) / (length - zb);

    let intervals = n_z - 1;
    let mut counts = [za / length, (zb - za) / length, (length - zb) / length]
        .map(|f| ((f * intervals as f64).round() as usize).max(1));
    let total: usize = counts.iter().sum();
    if total != intervals {
        let largest = (0..3).max_by(|&a, &b| counts[a].cmp(&counts[b])).unwrap_or(1);
        let adjusted = counts[largest] as isize + intervals as isize - total as isize;
        if adjusted < 1 {
            return Err(Error::InvalidInput(format!("n_z = {n_z} too small for a flared profile")));
        }
        counts[largest] = adjusted as usize;
    }

    let mut z = Vec::with_capacity(n_z);
    let mut radius = Vec::with_capacity(n_z);
    let mut d_radius = Vec::with_capacity(n_z);
    for (k, &zz) in linspace(0.0, za, counts[0] + 1).iter().enumerate() {
        if k == counts[0] {
            break;
        }
        z.push(zz);
        radius.push(reservoir_radius + slope_in * zz);
        d_radius.push(slope_in);
    }
    for (k, &zz) in linspace(za, zb, counts[1] + 1).iter().enumerate() {
        z.push(zz);
        radius.push(spline.eval(zz));
        let d = spline.derivative(zz);
        d_radius.push(if k == 0 {
            0.5 * (slope_in + d)
        } else if k == counts[1] {
            0.5 * (d + slope_out)
        } else {
            d
        });
    }
    for &zz in linspace(zb, length, counts[2] + 1).iter().skip(1) {
        z.push(zz);
        radius.push(rb + slope_out * (zz - zb));
        d_radius.push(slope_out);
    }
    let n = z.len();
    Ok(PoreGeometry {
        length,
        z,
        radius,
        d_radius,
        sigma: vec![0.0; n],
    })
}

/// Shape-preserving piecewise cubic Hermite interpolant.
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let n = x.len();
        if n < 2 || y.len() != n {
            return Err(Error::InvalidInput("interpolant needs matching x/y of length >= 2".into()));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput("interpolation abscissae must increase".into()));
        }
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let s: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
        let mut d = vec![0.0; n];
        if n == 2 {
            d[0] = s[0];
            d[1] = s[0];
            return Ok(Self { x, y, d });
        }
        for k in 1..n - 1 {
            if s[k - 1] * s[k] > 0.0 {
                let w1 = 2.0 * h[k] + h[k - 1];
                let w2 = h[k] + 2.0 * h[k - 1];
                d[k] = (w1 + w2) / (w1 / s[k - 1] + w2 / s[k]);
            }
        }
        d[0] = end_slope(h[0], h[1], s[0], s[1]);
        d[n - 1] = end_slope(h[n - 2], h[n - 3], s[n - 2], s[n - 3]);
        Ok(Self { x, y, d })
    }

    fn interval(&self, x: f64) -> usize {
        let n = self.x.len();
        match self.x.partition_point(|&xi| xi <= x) {
            0 => 0,
            k if k >= n => n - 2,
            k => k - 1,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let k = self.interval(x);
        let h = self.x[k + 1] - self.x[k];
        let t = (x - self.x[k]) / h;
        let (t2, t3) = (t * t, t * t * t);
        (2.0 * t3 - 3.0 * t2 + 1.0) * self.y[k]
            + (t3 - 2.0 * t2 + t) * h * self.d[k]
            + (-2.0 * t3 + 3.0 * t2) * self.y[k + 1]
            + (t3 - t2) * h * self.d[k + 1]
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let k = self.interval(x);
        let h = self.x[k + 1] - self.x[k];
        let t = (x - self.x[k]) / h;
        let t2 = t * t;
        (6.0 * t2 - 6.0 * t) / h * self.y[k]
            + (3.0 * t2 - 4.0 * t + 1.0) * self.d[k]
            + (-6.0 * t2 + 6.0 * t) / h * self.y[k + 1]
            + (3.0 * t2 - 2.0 * t) * self.d[k + 1]
    }
}

fn end_slope(h0: f64, h1: f64, s0: f64, s1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * s0 - h0 * s1) / (h0 + h1);
    if d.signum() != s0.signum() || s0 == 0.0 {
        0.0
    } else if s0.signum() != s1.signum() && d.abs() > 3.0 * s0.abs() {
        3.0 * s0
    } else {
        d
    }
}

/// Smoothed step: `sigma0/2 * (tanh((z-L1)/eps) - tanh((z-L2)/eps))`.
pub fn tanh_charge(spec: &ChargeSpec, z: f64) -> f64 {
    0.5 * spec.sigma0 * (((z - spec.l1) / spec.eps).tanh() - ((z - spec.l2) / spec.eps).tanh())
}

/// Return a copy of `geom` carrying the smoothed-step wall charge.
pub fn tanh_surface_charge(geom: &PoreGeometry, spec: &ChargeSpec) -> Result<PoreGeometry> {
    if !(spec.eps > 0.0) {
        return Err(Error::InvalidInput(format!("charge width eps = {} must be positive", spec.eps)));
    }
    if !(spec.l1 >= 0.0 && spec.l1 < spec.l2 && spec.l2 <= geom.length * (1.0 + 1e-12)) {
        return Err(Error::InvalidInput(format!(
            "charge window needs 0 <= L1 < L2 <= L (got {}, {}, L = {})",
            spec.l1, spec.l2, geom.length
        )));
    }
    let mut out = geom.clone();
    out.sigma = geom.z.iter().map(|&z| tanh_charge(spec, z)).collect();
    Ok(out)
}

impl PoreGeometry {
    pub fn n_z(&self) -> usize {
        self.z.len()
    }

    pub fn is_cylinder(&self) -> bool {
        let r0 = self.radius[0];
        self.radius.iter().all(|&r| (r - r0).abs() <= 1e-12 * r0)
    }

    pub fn min_radius(&self) -> f64 {
        self.radius.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_radius(&self) -> f64 {
        self.radius.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Monotone interpolation of the sampled radius.
    pub fn radius_at(&self, z: f64) -> f64 {
        MonotoneCubic::new(self.z.clone(), self.radius.clone())
            .map(|s| s.eval(z))
            .unwrap_or(f64::NAN)
    }

    /// Index of the grid node nearest to `z`.
    pub fn nearest_node(&self, z: f64) -> usize {
        let mut best = 0;
        for (j, &zj) in self.z.iter().enumerate() {
            if (zj - z).abs() < (self.z[best] - z).abs() {
                best = j;
            }
        }
        best
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.z.len();
        if n < 3 || self.radius.len() != n || self.d_radius.len() != n || self.sigma.len() != n {
            return Err(Error::InvalidInput("geometry arrays are inconsistent".into()));
        }
        if self.z[0] != 0.0 || (self.z[n - 1] - self.length).abs() > 1e-12 * self.length {
            return Err(Error::InvalidInput("geometry grid must span [0, L]".into()));
        }
        if self.z.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput("geometry grid must be strictly increasing".into()));
        }
        if self.radius.iter().any(|&r| !(r > 0.0) || !r.is_finite()) {
            return Err(Error::InvalidInput("radius must be positive everywhere".into()));
        }
        if self.sigma.iter().chain(&self.d_radius).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("geometry data must be finite".into()));
        }
        Ok(())
    }

    /// Composite-trapezoid `I_phiz`, `I_p` and their normalised increments.
    pub fn integrals(&self) -> GeometricIntegrals {
        let inv2: Vec<f64> = self.radius.iter().map(|r| r.powi(-2)).collect();
        let inv4: Vec<f64> = self.radius.iter().map(|r| r.powi(-4)).collect();
        let i_phiz = cumulative_trapezoid(&self.z, &inv2);
        let i_p = cumulative_trapezoid(&self.z, &inv4);
        let normalise = |v: &[f64]| {
            let last = v[v.len() - 1];
            v.iter().map(|x| x / last).collect::<Vec<_>>()
        };
        GeometricIntegrals {
            delta_i_phiz: normalise(&i_phiz),
            delta_i_p: normalise(&i_p),
            i_phiz,
            i_p,
        }
    }
}

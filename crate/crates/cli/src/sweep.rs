use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use pnps_core::config::BcOverrides;
use pnps_core::{Case, CaseFile, SteadySolution};
use rayon::prelude::*;

use crate::output::{flow_coefficient, summary_columns, summary_values, Table, Unit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Axis {
    Dphi,
    Dp,
    Nbulk,
}

/// Sweep values: `a,b,c` or `start:stop:count`.
#[derive(Debug, Clone, PartialEq)]
pub struct Values(pub Vec<f64>);

impl FromStr for Values {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let values: Vec<f64> = if let [start, stop, count] = s.split(':').collect::<Vec<_>>()[..] {
            let (start, stop): (f64, f64) = (start.trim().parse()?, stop.trim().parse()?);
            let count: usize = count.trim().parse().context("sweep count")?;
            match count {
                0 => bail!("a range needs at least one value"),
                1 => vec![start],
                n => (0..n).map(|k| start + (stop - start) * k as f64 / (n - 1) as f64).collect(),
            }
        } else {
            s.split(',')
                .map(|v| v.trim().parse::<f64>().with_context(|| format!("bad sweep value {v:?}")))
                .collect::<Result<_>>()?
        };
        if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
            bail!("sweep values must be finite and non-empty");
        }
        Ok(Values(values))
    }
}

pub struct Point {
    pub case: Case,
    pub result: Result<SteadySolution, String>,
}

fn with_value(base: &Case, axis: Axis, value: f64) -> Result<Case> {
    let mut bc = BcOverrides::default();
    match axis {
        Axis::Dphi => bc.dphi = Some(value),
        Axis::Dp => bc.dp = Some(value),
        Axis::Nbulk => bc.nbulk = Some(value),
    }
    let mut case = base.clone();
    case.apply(&CaseFile {
        bc,
        ..Default::default()
    })?;
    Ok(case)
}

/// Solve every point on `jobs` workers; results keep the input order.
pub fn run(base: &Case, axis: Axis, values: &[f64], jobs: usize) -> Result<Vec<Point>> {
    let cases = values.iter().map(|&v| with_value(base, axis, v)).collect::<Result<Vec<_>>>()?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?;
    Ok(pool.install(|| {
        cases
            .into_par_iter()
            .map(|case| {
                let result = case
                    .problem()
                    .and_then(|p| pnps_core::solve_steady(&p))
                    .map_err(|e| e.to_string());
                Point { case, result }
            })
            .collect()
    }))
}

/// One row per point: the summary columns (which include the swept value),
/// the scaled flow, current and pressure, and a status column.
pub fn render(points: &[Point], si: bool) -> String {
    let mixture = &points[0].case.preset.mixture;
    let mut cols = summary_columns(mixture);
    cols.push(("u_scaled".into(), Unit::One));
    cols.extend(mixture.species.iter().map(|s| (format!("I_{}_per_dphi", s.name), Unit::One)));
    cols.push(("dp_scaled".into(), Unit::One));
    let table = Table::new(cols);
    let mut out = table.header();
    out.push_str(",status\n");
    for point in points {
        let sol = point.result.as_ref().ok();
        let summary = summary_values(&point.case, sol);
        let mut row = summary.clone();
        let bc = &point.case.preset.bc;
        let (dphi, dp) = (bc.dphi(), bc.dp());
        let c_u = sol.map_or(f64::NAN, flow_coefficient);
        let ns = mixture.n_species();
        // u_mean, then I per species, follow dphi, dp, nbulk, zeta_mean
        row.push(summary[4] / (c_u * dphi));
        row.extend((0..ns).map(|a| summary[8 + a] / dphi));
        row.push(dp / (c_u * dphi));
        let scales = si.then_some(&point.case.preset.scales);
        out.push_str(&table.format_row(&row, scales));
        match &point.result {
            Ok(_) => out.push_str(",ok\n"),
            Err(e) => {
                out.push_str(",\"");
                out.push_str(&e.replace('"', "'"));
                out.push_str("\"\n");
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_lists_and_ranges() {
        assert_eq!("1,2.5,-3".parse::<Values>().unwrap(), Values(vec![1.0, 2.5, -3.0]));
        assert_eq!("0:1:5".parse::<Values>().unwrap(), Values(vec![0.0, 0.25, 0.5, 0.75, 1.0]));
        assert_eq!("-2:2:1".parse::<Values>().unwrap(), Values(vec![-2.0]));
        assert!("0:1:0".parse::<Values>().is_err());
        assert!("1,x".parse::<Values>().is_err());
        assert!("inf".parse::<Values>().is_err());
    }
}

//! Shared fixtures for the benchmarks.

use pnps_core::radial::RadialGrid;
use pnps_core::{load_preset, MixtureSpec, Problem, SolverConfig};

/// A preset at the given resolution.
pub fn problem(preset: &str, n: usize) -> Problem {
    let config = SolverConfig {
        n_r: n,
        n_z: n,
        ..SolverConfig::default()
    };
    load_preset(preset).unwrap().problem(config).unwrap()
}

/// One cylinder slice with the preset's groups and a moderately strong charge.
pub struct Slice {
    pub grid: RadialGrid,
    pub spec: MixtureSpec,
    pub q: Vec<f64>,
    pub sigma: f64,
}

pub fn slice(n_r: usize, a: f64) -> Slice {
    let spec = MixtureSpec::classical_binary(1.33, 0.79).with_volume_ratio(a, 0.018).unwrap();
    Slice {
        grid: RadialGrid::new(5.0, n_r).unwrap(),
        spec,
        q: vec![0.6, 0.6],
        sigma: 0.15,
    }
}

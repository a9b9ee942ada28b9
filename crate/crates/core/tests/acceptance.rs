//! Acceptance suite. Runs every criterion at the default resolution and
//! prints one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_BLOCKED` are target values that the model does
//! not reach with the tabulated parameters; they are still computed and
//! reported as FAIL with the measured numbers. Any other failure makes the
//! run exit non-zero. Set `ACCEPTANCE_STRICT=1` to fail on every FAIL line.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

use pnps_core::mixture::{solve_y0, solve_y0_bisection};
use pnps_core::numerics::max_abs;
use pnps_core::observables::{current_at, current_profile, mean_velocity, mean_zeta, max_velocity, transport_metrics};
use pnps_core::radial::{solve_radial, NewtonControl, RadialGrid, SliceParams};
use pnps_core::{load_preset, solve_steady, solve_steady_from, MixtureSpec, Preset, Problem, SolverConfig, SteadySolution};

const KNOWN_BLOCKED: [u32; 5] = [4, 5, 8, 9, 11];

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

/// Invariants checked on every solution produced by the suite.
struct Record {
    label: String,
    electroneutrality: f64,
    current_spread: f64,
    flow_spread: f64,
}

#[derive(Default)]
struct Suite {
    records: Vec<Record>,
}

fn within(value: f64, target: f64, tol: f64) -> bool {
    ((value - target) / target).abs() <= tol
}

fn problem(name: &str, edit: impl FnOnce(&mut Preset)) -> Problem {
    let mut preset = load_preset(name).unwrap();
    edit(&mut preset);
    preset.problem(SolverConfig::default()).unwrap()
}

fn spread(v: &[f64]) -> f64 {
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = v.iter().copied().fold(f64::INFINITY, f64::min);
    max - min
}

impl Suite {
    fn record(&mut self, label: &str, sol: &SteadySolution) {
        let p = &sol.problem;
        let l2g = p.groups.lambda.powi(2) * p.groups.gamma;
        let electroneutrality = sol
            .slices
            .iter()
            .zip(&p.geometry.sigma)
            .zip(&p.geometry.radius)
            .map(|((s, sigma), r)| s.electroneutrality_defect.abs() / (l2g * sigma.abs() * r).max(1.0))
            .fold(0.0, f64::max);
        let currents = current_profile(sol);
        let magnitude = (0..currents.len())
            .map(|f| {
                (0..sol.n_species())
                    .map(|a| 2.0 * PI * (p.mixture.species[a].z * sol.factors.flux[a][f]).abs())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max);
        let flow = &sol.hydro.velocity.flow_rate;
        let flow_magnitude = sol
            .hydro
            .velocity
            .u
            .iter()
            .zip(&sol.grids)
            .map(|(u, g)| g.integrate(&u.iter().map(|v| v.abs()).collect::<Vec<_>>()))
            .fold(0.0, f64::max);
        let ratio = |s: f64, m: f64| if m > 0.0 { s / m } else { 0.0 };
        self.records.push(Record {
            label: label.to_string(),
            electroneutrality,
            current_spread: ratio(spread(&currents), magnitude),
            flow_spread: ratio(spread(flow), flow_magnitude),
        });
    }

    fn solve(&mut self, label: &str, problem: &Problem, warm: Option<&SteadySolution>) -> SteadySolution {
        let sol = warm
            .and_then(|w| solve_steady_from(problem, w).ok())
            .unwrap_or_else(|| solve_steady(problem).unwrap_or_else(|e| panic!("{label}: {e}")));
        self.record(label, &sol);
        sol
    }

    /// Root of `f(dp)` by secant iteration, starting from `dp = 0` and `guess`.
    fn crossing(
        &mut self,
        label: &str,
        build: impl Fn(f64) -> Problem,
        f: impl Fn(&SteadySolution) -> f64,
        guess: f64,
    ) -> f64 {
        let s0 = self.solve(label, &build(0.0), None);
        let (mut p0, mut f0) = (0.0, f(&s0));
        let mut p1 = guess;
        let mut last = self.solve(label, &build(p1), Some(&s0));
        let mut f1 = f(&last);
        for _ in 0..12 {
            let p2 = p1 - f1 * (p1 - p0) / (f1 - f0);
            if (p2 - p1).abs() <= 1e-7 * p2.abs() {
                return p2;
            }
            let s2 = self.solve(label, &build(p2), Some(&last));
            (p0, f0, p1, f1) = (p1, f1, p2, f(&s2));
            last = s2;
        }
        p1
    }
}

fn cation_current(sol: &SteadySolution) -> f64 {
    current_at(sol, 0.0).species[0]
}

/// 1. Poiseuille flow in an uncharged cylinder.
fn poiseuille(suite: &mut Suite) -> Outcome {
    let p = problem("cylinder", |p| {
        p.charge.sigma0 = 0.0;
        p.bc.phi_in = p.bc.phi_out;
        p.bc.p_in = p.bc.p_out + 1.0;
    });
    let sol = suite.solve("poiseuille", &p, None);
    let (r_wall, l) = (p.geometry.radius[0], p.geometry.length);
    let mut err: f64 = 0.0;
    let peak = r_wall * r_wall / (4.0 * l);
    for (row, grid) in sol.hydro.velocity.u.iter().zip(&sol.grids) {
        for (u, r) in row.iter().zip(&grid.r) {
            let exact = (r_wall * r_wall - r * r) / (4.0 * l);
            err = err.max((u - exact).abs() / peak);
        }
    }
    Outcome::new(err < 1e-6, format!("max relative error {err:.3e}"))
}

/// Modified Bessel function of the first kind by its power series.
fn bessel_i(nu: i32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = half.powi(nu) / (1..=nu).map(f64::from).product::<f64>();
    let mut sum = term;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= half * half / (k * (k + f64::from(nu)));
        sum += term;
        if term < 1e-17 * sum {
            return sum;
        }
    }
}

/// 2. Linearised (Debye-Hueckel) slice potential.
fn debye_huckel() -> Outcome {
    let (radius, lambda, gamma, n) = (5.0, 0.4, 9.23, 0.6);
    let gamma_sigma = 1e-3;
    let spec = MixtureSpec::classical_binary(1.33, 0.79);
    let grid = RadialGrid::new(radius, 2001).unwrap();
    let params = SliceParams {
        q_factors: &[n, n],
        sigma: gamma_sigma / gamma,
        lambda,
        gamma,
        spec: &spec,
    };
    let sol = solve_radial(&grid, &params, None, NewtonControl::default()).unwrap();
    let kappa = (2.0 * n).sqrt() / lambda;
    let amp = gamma_sigma / (kappa * bessel_i(1, kappa * radius));
    let oracle: Vec<f64> = grid.r.iter().map(|r| amp * bessel_i(0, kappa * r)).collect();
    let diff: Vec<f64> = sol.phi.iter().zip(&oracle).map(|(a, b)| a - b).collect();
    let err = max_abs(&diff) / max_abs(&oracle);
    Outcome::new(err < 1e-4, format!("relative error {err:.3e}"))
}

/// 3. Electroneutrality of every slice solved by the suite.
fn electroneutrality(suite: &Suite) -> Outcome {
    let worst = suite
        .records
        .iter()
        .max_by(|a, b| a.electroneutrality.total_cmp(&b.electroneutrality))
        .unwrap();
    Outcome::new(
        worst.electroneutrality < 1e-8,
        format!(
            "{} solutions, worst scaled defect {:.3e} ({})",
            suite.records.len(),
            worst.electroneutrality,
            worst.label
        ),
    )
}

/// 4. Area-integrated zeta potential of the cylinder preset.
fn zeta_reproduction(suite: &mut Suite) -> (Outcome, f64) {
    let sol = suite.solve("cylinder preset", &problem("cylinder", |_| {}), None);
    let zeta = mean_zeta(&sol);
    (Outcome::new(within(zeta, -88.0, 0.05), format!("<zeta> = {zeta:.3} (target -88)")), zeta)
}

fn cylinder_with(dphi: f64, dp: f64) -> Problem {
    problem("cylinder", |p| {
        p.bc.phi_in = p.bc.phi_out + dphi;
        p.bc.p_in = p.bc.p_out + dp;
    })
}

fn flow_coefficient() -> f64 {
    let p = load_preset("cylinder").unwrap();
    let pr = cylinder_with(0.0, 0.0);
    let r = pr.geometry.radius[0];
    16.0 * p.groups.lambda.powi(2) / (r.powi(4) * pr.geometry.length)
}

/// 5. Pressure at which the volumetric flow changes sign.
fn flow_sign_change(suite: &mut Suite, zeta: f64) -> Outcome {
    let c_u = flow_coefficient();
    let mut pass = true;
    let mut parts = Vec::new();
    for (dphi, target, tol) in [(-8.0, 0.13, 0.10), (-0.2, 0.0032, 0.15)] {
        let dp = suite.crossing("flow crossing", |dp| cylinder_with(dphi, dp), mean_velocity, c_u * zeta * dphi);
        pass &= within(dp, target, tol);
        parts.push(format!("dphi {dphi}: dp = {dp:.5} (target {target})"));
    }
    Outcome::new(pass, format!("{}; C_u = {c_u:.4e}", parts.join(", ")))
}

fn cation_threshold(zeta: f64) -> f64 {
    let p = load_preset("cylinder").unwrap();
    let pr = cylinder_with(0.0, 0.0);
    let (r, l) = (pr.geometry.radius[0], pr.geometry.length);
    let k = p.mixture.species[0].k;
    let pe = p.groups.pe;
    k * 8.0 / (pe * r * r) + 16.0 * p.groups.lambda.powi(2) * zeta / (l * r.powi(4))
}

/// 6. Pressure at which the cation current changes sign.
fn current_sign_change(suite: &mut Suite, zeta: f64) -> Outcome {
    let c_plus = cation_threshold(zeta);
    let mut pass = true;
    let mut parts = Vec::new();
    for (dphi, target) in [(1.0, 0.14), (2.0, 0.28)] {
        let dp = suite.crossing("current crossing", |dp| cylinder_with(dphi, dp), cation_current, c_plus * dphi);
        pass &= within(dp, target, 0.10);
        parts.push(format!("dphi {dphi}: dp = {dp:.4} (target {target})"));
    }
    let mut signs = Vec::new();
    let mut warm: Option<SteadySolution> = None;
    for k in 0..=4 {
        let dp = 0.25 * f64::from(k);
        let sol = suite.solve("current sign", &cylinder_with(-1.0, dp), warm.as_ref());
        signs.push(cation_current(&sol).signum());
        warm = Some(sol);
    }
    let no_crossing = signs.iter().all(|s| *s == signs[0]);
    pass &= no_crossing;
    parts.push(format!("dphi -1: sign constant on [0, 1] = {no_crossing}"));
    Outcome::new(pass, parts.join(", "))
}

/// Largest deviation between two sampled scaled curves, `|f1 - f2| / max(1, |f|)`.
fn curve_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs() / x.abs().max(y.abs()).max(1.0))
        .fold(0.0, f64::max)
}

/// 7. Collapse of scaled flow and current curves.
fn master_curves(suite: &mut Suite) -> Outcome {
    let xs: Vec<f64> = (0..=8).map(|k| 10f64.powf(-1.0 + 0.25 * f64::from(k))).collect();
    let r4 = 5f64.powi(4);
    let c_u = flow_coefficient();
    let mut flow_curves = Vec::new();
    for dphi in [-0.2, -8.0] {
        let base = suite.solve("flow master curve", &cylinder_with(dphi, 0.0), None);
        let scale = c_u * mean_zeta(&base) * dphi;
        let mut warm = base;
        let mut curve = Vec::new();
        for x in &xs {
            let sol = suite.solve("flow master curve", &cylinder_with(dphi, x * scale), Some(&warm));
            curve.push(mean_velocity(&sol) / (scale * r4 / 16.0));
            warm = sol;
        }
        flow_curves.push(curve);
    }
    let preset = load_preset("cylinder").unwrap();
    let (pe, n, l) = (preset.groups.pe, preset.bc.n_out[0], 25.0);
    let mut current_curves = Vec::new();
    for dphi in [1.0, 2.0] {
        let base = suite.solve("current master curve", &cylinder_with(dphi, 0.0), None);
        let scale = cation_threshold(mean_zeta(&base)) * dphi;
        let mut warm = base;
        let mut curve = Vec::new();
        for x in &xs {
            let sol = suite.solve("current master curve", &cylinder_with(dphi, x * scale), Some(&warm));
            curve.push(cation_current(&sol) * 16.0 * l / (2.0 * PI * n * pe * r4 * scale));
            warm = sol;
        }
        current_curves.push(curve);
    }
    let flow_gap = curve_gap(&flow_curves[0], &flow_curves[1]);
    let current_gap = curve_gap(&current_curves[0], &current_curves[1]);
    Outcome::new(
        flow_gap <= 0.02 && current_gap <= 0.02,
        format!("flow gap {flow_gap:.3e}, current gap {current_gap:.3e}"),
    )
}

fn trumpet_with(a: f64, pe: f64, dphi: f64) -> Problem {
    problem("trumpet", |p| {
        p.mixture = p.mixture.with_volume_ratio(a, 0.018).unwrap();
        p.groups.pe = pe;
        p.bc.phi_in = p.bc.phi_out + dphi;
    })
}

/// 8. Peak axial velocity in the trumpet for three volume ratios.
fn trumpet_velocity(suite: &mut Suite) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (a, target) in [(0.0, 0.88), (1.0, 0.90), (5.0, 1.0)] {
        let p = trumpet_with(a, 2.78, 8.0);
        let sol = suite.solve("trumpet velocity", &p, None);
        let (u, z, _) = max_velocity(&sol);
        let cell = p.geometry.z[1] - p.geometry.z[0];
        let centred = (z - 0.5 * p.geometry.length).abs() <= cell + 1e-12;
        pass &= centred && within(u, target, 0.05);
        parts.push(format!("a={a}: max u = {u:.4} at z = {z:.3} (target {target})"));
    }
    Outcome::new(pass, parts.join(", "))
}

/// 9. Trumpet currents at the ends of the IV sweep.
fn trumpet_iv(suite: &mut Suite) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    // (label, Pe, expected |I+|, tol, expected |I-|, tol)
    for (mode, pe, ip, tp, im, tm) in [("PNP", 0.0, 5.0, 0.10, 39.7, 0.10), ("PNPS", 2.78, 0.3, 0.25, 46.8, 0.10)] {
        for sign in [1.0, -1.0] {
            let sol = suite.solve("trumpet IV", &trumpet_with(0.0, pe, sign * 20.0), None);
            let c = current_at(&sol, 0.0);
            let (i_plus, i_minus) = (c.species[0], c.species[1]);
            pass &= within(i_plus, sign * ip, tp) && within(i_minus, sign * im, tm);
            parts.push(format!("{mode} dphi {}: I+ = {i_plus:.3}, I- = {i_minus:.3}", sign * 20.0));
        }
    }
    Outcome::new(pass, format!("{} (targets PNP 5/39.7, PNPS 0.3/46.8)", parts.join(", ")))
}

fn clya_with(n: f64, dphi: f64) -> Problem {
    problem("clya", |p| {
        p.bc.n_out = vec![n; 2];
        p.bc.n_in = vec![n; 2];
        p.bc.phi_in = p.bc.phi_out + dphi;
    })
}

/// 10. Concentration at which cation and anion carry equal current.
fn clya_selectivity(suite: &mut Suite) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for dphi in [-6.0, 6.0] {
        let diff = |suite: &mut Suite, n: f64| {
            let sol = suite.solve("clya selectivity", &clya_with(n, dphi), None);
            let t = transport_metrics(&sol, 2.08).unwrap().t;
            t[0] - t[1]
        };
        let (mut lo, mut hi) = (1.0, 3.0);
        let (f_lo, f_hi) = (diff(suite, lo), diff(suite, hi));
        if f_lo.signum() == f_hi.signum() {
            pass = false;
            parts.push(format!("dphi {dphi}: no switch in [1, 3]"));
            continue;
        }
        for _ in 0..6 {
            let mid = 0.5 * (lo + hi);
            if diff(suite, mid).signum() == f_lo.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        parts.push(format!("dphi {dphi}: switch at n = {:.3}", 0.5 * (lo + hi)));
    }
    Outcome::new(pass, parts.join(", "))
}

/// 11. Peak of the scaled electro-osmotic flow rate over concentration.
fn clya_flow_peak(suite: &mut Suite) -> Outcome {
    let ns = [0.1, 0.25, 0.5, 1.0, 2.0, 3.0];
    let mut pass = true;
    let mut parts = Vec::new();
    for (dphi, target) in [(-4.0, 0.75), (-6.0, 0.75), (6.0, 0.67)] {
        let values: Vec<f64> = ns
            .iter()
            .map(|&n| {
                let sol = suite.solve("clya flow", &clya_with(n, dphi), None);
                (transport_metrics(&sol, 2.08).unwrap().q_eo / dphi).abs()
            })
            .collect();
        let (k, peak) = values
            .iter()
            .copied()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        pass &= ns[k] == 0.5 && within(peak, target, 0.10);
        parts.push(format!("dphi {dphi}: peak |Q_eo/dphi| = {peak:.4} at n = {} (target {target})", ns[k]));
    }
    Outcome::new(pass, parts.join(", "))
}

/// 12. Current and flow rate constant along every solved pore.
fn conservation(suite: &Suite) -> Outcome {
    let worst_current = suite.records.iter().max_by(|a, b| a.current_spread.total_cmp(&b.current_spread)).unwrap();
    let worst_flow = suite.records.iter().max_by(|a, b| a.flow_spread.total_cmp(&b.flow_spread)).unwrap();
    Outcome::new(
        worst_current.current_spread < 0.01 && worst_flow.flow_spread < 0.01,
        format!(
            "{} solutions, worst current spread {:.3e} ({}), worst flow spread {:.3e} ({})",
            suite.records.len(),
            worst_current.current_spread,
            worst_current.label,
            worst_flow.flow_spread,
            worst_flow.label
        ),
    )
}

/// 13. Observed order of `<zeta>` and `I+` under joint refinement.
fn grid_convergence(suite: &mut Suite) -> Outcome {
    let mut zeta = Vec::new();
    let mut current = Vec::new();
    for n in [51, 101, 201] {
        let preset = load_preset("cylinder").unwrap();
        let config = SolverConfig {
            n_r: n,
            n_z: n,
            picard_tol: 1e-11,
            ..SolverConfig::default()
        };
        let sol = suite.solve("grid convergence", &preset.problem(config).unwrap(), None);
        zeta.push(mean_zeta(&sol));
        current.push(cation_current(&sol));
    }
    let order = |v: &[f64]| ((v[0] - v[1]) / (v[1] - v[2])).abs().log2();
    let (oz, oi) = (order(&zeta), order(&current));
    Outcome::new(oz >= 1.8 && oi >= 1.8, format!("order <zeta> {oz:.3}, order I+ {oi:.3}"))
}

/// 14. Newton and bisection solvent fractions agree on random samples.
fn solvent_fraction_oracle() -> Outcome {
    let mut runner = TestRunner::new_with_rng(Config::default(), TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    let ratio = proptest::prop_oneof![
        proptest::strategy::Just(0.0),
        proptest::strategy::Just(1.0),
        proptest::strategy::Just(4.15),
        0.0f64..8.0
    ];
    let strategy = (ratio, 0.0f64..3.0, 0.0f64..3.0, -12.0f64..12.0);
    let mut worst: f64 = 0.0;
    let mut ratios = [0usize; 3];
    for _ in 0..1000 {
        let (a, q1, q2, phi) = strategy.new_tree(&mut runner).unwrap().current();
        for (slot, fixed) in [0.0, 1.0, 4.15].iter().enumerate() {
            if a == *fixed {
                ratios[slot] += 1;
            }
        }
        let spec = MixtureSpec::classical_binary(1.33, 0.79).with_volume_ratio(a, 0.018).unwrap();
        let (Ok(newton), Ok(bisect)) = (solve_y0(&[q1, q2], phi, &spec), solve_y0_bisection(&[q1, q2], phi, &spec)) else {
            continue;
        };
        worst = worst.max((newton - bisect).abs() / newton.max(bisect));
    }
    let covered = ratios.iter().all(|&c| c > 0);
    Outcome::new(
        worst <= 1e-12 && covered,
        format!("worst relative gap {worst:.3e}; samples with a = 0/1/4.15: {ratios:?}"),
    )
}

fn main() -> ExitCode {
    let strict = std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v != "0");
    let start = Instant::now();
    let mut suite = Suite::default();
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();

    results.push((1, "Poiseuille exactness", poiseuille(&mut suite)));
    results.push((2, "Debye-Hueckel oracle", debye_huckel()));
    let (outcome, zeta) = zeta_reproduction(&mut suite);
    results.push((4, "<zeta> reproduction", outcome));
    results.push((5, "flow sign change", flow_sign_change(&mut suite, zeta)));
    results.push((6, "current sign change", current_sign_change(&mut suite, zeta)));
    results.push((7, "master-curve collapse", master_curves(&mut suite)));
    results.push((8, "trumpet velocity maxima", trumpet_velocity(&mut suite)));
    results.push((9, "trumpet IV endpoints", trumpet_iv(&mut suite)));
    results.push((10, "ClyA selectivity switch", clya_selectivity(&mut suite)));
    results.push((11, "ClyA flow-rate peak", clya_flow_peak(&mut suite)));
    results.push((13, "grid convergence", grid_convergence(&mut suite)));
    results.push((14, "solvent fraction oracle", solvent_fraction_oracle()));
    results.push((3, "electroneutrality", electroneutrality(&suite)));
    results.push((12, "conservation", conservation(&suite)));
    results.sort_by_key(|r| r.0);

    let mut unexpected = 0;
    for (id, name, outcome) in &results {
        let status = if outcome.pass { "PASS" } else { "FAIL" };
        let note = match (outcome.pass, KNOWN_BLOCKED.contains(id)) {
            (false, true) => " [known blocked]",
            (true, true) => " [listed as blocked but passed]",
            _ => "",
        };
        println!("criterion {id:>2} {status}{note}: {name}: {}", outcome.detail);
        if !outcome.pass && (strict || !KNOWN_BLOCKED.contains(id)) {
            unexpected += 1;
        }
    }
    let passed = results.iter().filter(|r| r.2.pass).count();
    println!(
        "acceptance: {passed}/{} passed in {:.1} s",
        results.len(),
        start.elapsed().as_secs_f64()
    );
    if unexpected > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}

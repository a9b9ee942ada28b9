//! Chemical-potential variants and the local composition closure.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lower end of the solvent mole-fraction bracket.
pub const Y0_FLOOR: f64 = 1e-14;

/// Chemical-potential model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Point ions, dilute Nernst-Planck. Total concentration fixed at 1.
    Classical,
    /// Lattice model with equal ion and solvent volumes (`a = 1`). The
    /// crowding sum runs over the ions only.
    Bikerman,
    /// Incompressible mixture with solvated ions, `a = v / v0`.
    Mixture,
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classical" => Ok(Variant::Classical),
            "bikerman" => Ok(Variant::Bikerman),
            "mixture" => Ok(Variant::Mixture),
            other => Err(Error::InvalidInput(format!("unknown variant {other:?}"))),
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Variant::Classical => "classical",
            Variant::Bikerman => "bikerman",
            Variant::Mixture => "mixture",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeciesSpec {
    pub name: String,
    /// Charge number.
    pub z: f64,
    /// Dimensionless diffusivity.
    pub k: f64,
    /// Volume ratio to the solvent.
    pub a: f64,
    /// Dimensionless molar volume.
    pub v: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureSpec {
    pub species: Vec<SpeciesSpec>,
    /// Solvent molar volume.
    pub v0: f64,
    pub variant: Variant,
}

/// Relative mismatch allowed between `a` and `v / v0` for the mixture variant.
pub const VOLUME_RATIO_TOLERANCE: f64 = 0.01;

impl MixtureSpec {
    /// Binary 1:1 salt of point ions.
    pub fn classical_binary(k_plus: f64, k_minus: f64) -> Self {
        Self {
            species: vec![
                SpeciesSpec {
                    name: "plus".into(),
                    z: 1.0,
                    k: k_plus,
                    a: 0.0,
                    v: 0.0,
                },
                SpeciesSpec {
                    name: "minus".into(),
                    z: -1.0,
                    k: k_minus,
                    a: 0.0,
                    v: 0.0,
                },
            ],
            v0: 0.0,
            variant: Variant::Classical,
        }
    }

    /// Copy with every ion given volume ratio `a`. `a = 0` selects the
    /// classical model, `a = 1` the lattice model, anything else the
    /// solvated mixture with `v = a v0`. A zero `v0` is replaced by `v0_default`.
    pub fn with_volume_ratio(&self, a: f64, v0_default: f64) -> Result<Self> {
        if !(a >= 0.0) || !a.is_finite() {
            return Err(Error::InvalidInput(format!("volume ratio a = {a} must be non-negative")));
        }
        let mut out = self.clone();
        if a == 0.0 {
            out.variant = Variant::Classical;
            for s in &mut out.species {
                s.a = 0.0;
                s.v = 0.0;
            }
            out.v0 = 0.0;
            return Ok(out);
        }
        if !(out.v0 > 0.0) {
            out.v0 = v0_default;
        }
        out.variant = if a == 1.0 { Variant::Bikerman } else { Variant::Mixture };
        for s in &mut out.species {
            s.a = a;
            s.v = a * out.v0;
        }
        Ok(out)
    }

    pub fn n_species(&self) -> usize {
        self.species.len()
    }

    pub fn is_classical(&self) -> bool {
        self.variant == Variant::Classical
    }

    pub fn validate(&self) -> Result<()> {
        if self.species.is_empty() {
            return Err(Error::InvalidInput("mixture needs at least one species".into()));
        }
        for s in &self.species {
            if !(s.k > 0.0) || !s.k.is_finite() {
                return Err(Error::InvalidInput(format!("species {}: k = {} must be positive", s.name, s.k)));
            }
            if !(s.a >= 0.0) || !s.a.is_finite() || !s.z.is_finite() || !s.v.is_finite() {
                return Err(Error::InvalidInput(format!("species {}: invalid a/z/v", s.name)));
            }
            match self.variant {
                Variant::Classical if s.a != 0.0 => {
                    return Err(Error::InvalidInput(format!("classical variant needs a = 0 ({})", s.name)));
                }
                Variant::Bikerman if s.a != 1.0 || s.v != self.v0 => {
                    return Err(Error::InvalidInput(format!("lattice variant needs a = 1 and v = v0 ({})", s.name)));
                }
                Variant::Mixture => {
                    let ratio = s.v / self.v0;
                    if !(s.a > 0.0) || (s.a - ratio).abs() > VOLUME_RATIO_TOLERANCE * ratio {
                        return Err(Error::InvalidInput(format!(
                            "species {}: a = {} inconsistent with v/v0 = {ratio}",
                            s.name, s.a
                        )));
                    }
                }
                _ => {}
            }
        }
        if !self.is_classical() && !(self.v0 > 0.0) {
            return Err(Error::InvalidInput("finite-size variants need v0 > 0".into()));
        }
        Ok(())
    }

    /// Total concentration and mole fractions of a boundary reservoir with
    /// molar densities `n`.
    fn reservoir(&self, n: &[f64]) -> Result<(f64, Vec<f64>)> {
        if self.is_classical() {
            return Ok((1.0, n.to_vec()));
        }
        let occupied: f64 = self.species.iter().zip(n).map(|(s, n)| s.v * n).sum();
        let n0 = (1.0 - occupied) / self.v0;
        if !(n0 > 0.0) {
            return Err(Error::State(format!("boundary concentrations leave no room for solvent (n0 = {n0})")));
        }
        let n_bar = n0 + n.iter().sum::<f64>();
        Ok((n_bar, n.iter().map(|n| n / n_bar).collect()))
    }

    /// Axial factors `Q` at a reservoir with molar densities `n` (flat
    /// radial potential there).
    pub fn boundary_factors(&self, n: &[f64]) -> Result<Vec<f64>> {
        if n.len() != self.n_species() {
            return Err(Error::InvalidInput("boundary data length mismatch".into()));
        }
        if self.is_classical() {
            return Ok(n.to_vec());
        }
        let (n_bar, y) = self.reservoir(n)?;
        let base = 1.0 / (self.v0 * n_bar) - self.species.iter().zip(&y).map(|(s, y)| s.a * y).sum::<f64>();
        if !(base > 0.0) {
            return Err(Error::State(format!("non-positive solvent fraction {base} at the boundary")));
        }
        Ok(self.species.iter().zip(&y).map(|(s, y)| y * base.powf(-s.a)).collect())
    }

    /// `n_bar * y0^a` for a reservoir, the prefactor that turns `Q' ` into
    /// concentration gradients there.
    pub fn boundary_prefactor(&self, n: &[f64]) -> Result<Vec<f64>> {
        if self.is_classical() {
            return Ok(vec![1.0; self.n_species()]);
        }
        let (n_bar, y) = self.reservoir(n)?;
        let y0 = 1.0 - y.iter().sum::<f64>();
        Ok(self.species.iter().map(|s| n_bar * y0.powf(s.a)).collect())
    }
}

fn y0_residual(c: &[f64], a: &[f64], y: f64) -> f64 {
    1.0 - y - c.iter().zip(a).map(|(c, a)| c * y.powf(*a)).sum::<f64>()
}

fn check_factors(q: &[f64], spec: &MixtureSpec) -> Result<()> {
    if q.len() != spec.n_species() {
        return Err(Error::InvalidInput("factor count does not match species".into()));
    }
    if q.iter().any(|q| !(*q >= 0.0) || !q.is_finite()) {
        return Err(Error::InvalidInput("axial factors must be finite and non-negative".into()));
    }
    Ok(())
}

fn weights(q: &[f64], phi: f64, spec: &MixtureSpec) -> (Vec<f64>, Vec<f64>) {
    let c = q.iter().zip(&spec.species).map(|(q, s)| q * (-s.z * phi).exp()).collect();
    let a = spec.species.iter().map(|s| s.a).collect();
    (c, a)
}

fn bracket(c: &[f64], a: &[f64]) -> Result<()> {
    if y0_residual(c, a, Y0_FLOOR) <= 0.0 {
        return Err(Error::State("solvent fraction falls below the bracket floor".into()));
    }
    Ok(())
}

/// Solvent mole fraction: the root in (0, 1] of
/// `1 - y0 - sum Q E y0^a`, found by safeguarded Newton.
pub fn solve_y0(q: &[f64], phi: f64, spec: &MixtureSpec) -> Result<f64> {
    check_factors(q, spec)?;
    if spec.is_classical() {
        return Ok(1.0);
    }
    let (c, a) = weights(q, phi, spec);
    y0_newton(&c, &a)
}

/// Same root as [`solve_y0`] by plain bisection.
pub fn solve_y0_bisection(q: &[f64], phi: f64, spec: &MixtureSpec) -> Result<f64> {
    check_factors(q, spec)?;
    if spec.is_classical() {
        return Ok(1.0);
    }
    let (c, a) = weights(q, phi, spec);
    if c.iter().all(|&c| c == 0.0) {
        return Ok(1.0);
    }
    bracket(&c, &a)?;
    let (mut lo, mut hi) = (Y0_FLOOR, 1.0);
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if y0_residual(&c, &a, mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn y0_newton(c: &[f64], a: &[f64]) -> Result<f64> {
    let total: f64 = c.iter().sum();
    if total == 0.0 {
        return Ok(1.0);
    }
    bracket(c, a)?;
    // In s = ln y0 the residual e^s + sum c e^(a s) - 1 is increasing and
    // convex, so Newton from any point with a non-negative residual
    // decreases monotonically onto the root.
    let floor = Y0_FLOOR.ln();
    let mut s = c
        .iter()
        .zip(a)
        .filter(|(c, a)| **c > 1.0 && **a > 0.0)
        .map(|(c, a)| -c.ln() / a)
        .fold(0.0f64, f64::min)
        .max(floor);
    for _ in 0..200 {
        let (mut h, mut dh) = (s.exp() - 1.0, s.exp());
        for (c, a) in c.iter().zip(a) {
            let t = c * (a * s).exp();
            h += t;
            dh += a * t;
        }
        let step = h / dh;
        let next = (s - step).max(floor);
        if step.abs() <= 4.0 * f64::EPSILON * s.abs().max(1.0) || next == s {
            return Ok(next.exp());
        }
        s = next;
    }
    Err(Error::NonConvergence {
        stage: "solvent fraction".into(),
        iterations: 200,
        residual: y0_residual(c, a, s.exp()),
        trace: Vec::new(),
    })
}

/// Total concentration for mole fractions `y`.
pub fn total_concentration(y: &[f64], spec: &MixtureSpec) -> Result<f64> {
    if spec.is_classical() {
        return Ok(1.0);
    }
    let denom = spec.v0 + spec.species.iter().zip(y).map(|(s, y)| (s.v - spec.v0) * y).sum::<f64>();
    if !(denom > 0.0) {
        return Err(Error::State(format!("non-positive volume denominator {denom}")));
    }
    Ok(1.0 / denom)
}

/// Local state at one radial node.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeComposition {
    pub y0: f64,
    pub n_bar: f64,
    pub y: Vec<f64>,
    pub n: Vec<f64>,
    /// Charge density `sum z n`.
    pub q: f64,
    /// Derivative of `q` with respect to the radial potential.
    pub dq_dphi: f64,
}

/// Composition and charge at a node with radial potential `phi`.
pub fn node_composition(q_factors: &[f64], phi: f64, spec: &MixtureSpec) -> Result<NodeComposition> {
    let y0 = solve_y0(q_factors, phi, spec)?;
    let (c, _) = weights(q_factors, phi, spec);
    if spec.is_classical() {
        let q = spec.species.iter().zip(&c).map(|(s, n)| s.z * n).sum();
        let dq = -spec.species.iter().zip(&c).map(|(s, n)| s.z * s.z * n).sum::<f64>();
        return Ok(NodeComposition {
            y0,
            n_bar: 1.0,
            y: c.clone(),
            n: c,
            q,
            dq_dphi: dq,
        });
    }
    let y: Vec<f64> = spec.species.iter().zip(&c).map(|(s, c)| c * y0.powf(s.a)).collect();
    let n_bar = total_concentration(&y, spec)?;
    let n: Vec<f64> = y.iter().map(|y| n_bar * y).collect();
    let zy: f64 = spec.species.iter().zip(&y).map(|(s, y)| s.z * y).sum();
    let q = n_bar * zy;

    let ay: f64 = spec.species.iter().zip(&y).map(|(s, y)| s.a * y).sum();
    let dy0 = zy / (1.0 + ay / y0);
    let dy: Vec<f64> = spec
        .species
        .iter()
        .zip(&y)
        .map(|(s, y)| y * (-s.z + s.a * dy0 / y0))
        .collect();
    let dn_bar = -n_bar * n_bar * spec.species.iter().zip(&dy).map(|(s, d)| (s.v - spec.v0) * d).sum::<f64>();
    let dzy: f64 = spec.species.iter().zip(&dy).map(|(s, d)| s.z * d).sum();
    Ok(NodeComposition {
        y0,
        n_bar,
        y,
        n,
        q,
        dq_dphi: dn_bar * zy + n_bar * dzy,
    })
}

/// Composition on every node of a radial slice.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceComposition {
    /// `y[alpha][i]`.
    pub y: Vec<Vec<f64>>,
    pub y0: Vec<f64>,
    pub n_bar: Vec<f64>,
    /// `n[alpha][i]`.
    pub n: Vec<Vec<f64>>,
    pub q: Vec<f64>,
}

pub fn slice_composition(q_factors: &[f64], phi: &[f64], spec: &MixtureSpec) -> Result<SliceComposition> {
    let ns = spec.n_species();
    let mut out = SliceComposition {
        y: vec![Vec::with_capacity(phi.len()); ns],
        y0: Vec::with_capacity(phi.len()),
        n_bar: Vec::with_capacity(phi.len()),
        n: vec![Vec::with_capacity(phi.len()); ns],
        q: Vec::with_capacity(phi.len()),
    };
    for (i, &p) in phi.iter().enumerate() {
        let node = node_composition(q_factors, p, spec).map_err(|e| e.context(format!("radial node {i}")))?;
        out.y0.push(node.y0);
        out.n_bar.push(node.n_bar);
        out.q.push(node.q);
        for a in 0..ns {
            out.y[a].push(node.y[a]);
            out.n[a].push(node.n[a]);
        }
    }
    Ok(out)
}

/// Chemical potentials for molar densities `n`, with zero reference values.
pub fn chemical_potential(n: &[f64], spec: &MixtureSpec) -> Result<Vec<f64>> {
    let log = |x: f64, what: &str| {
        if x > 0.0 {
            Ok(x.ln())
        } else {
            Err(Error::State(format!("log of non-positive {what} ({x})")))
        }
    };
    match spec.variant {
        Variant::Classical => n.iter().map(|&n| log(n, "concentration")).collect(),
        Variant::Bikerman => {
            let n_r = 1.0 / spec.v0;
            let crowd = log(1.0 - n.iter().sum::<f64>() / n_r, "free lattice fraction")?;
            n.iter().map(|&n| Ok(log(n / n_r, "occupancy")? - crowd)).collect()
        }
        Variant::Mixture => {
            let occupied: f64 = spec.species.iter().zip(n).map(|(s, n)| s.v * n).sum();
            let n0 = (1.0 - occupied) / spec.v0;
            let n_bar = n0 + n.iter().sum::<f64>();
            let ln_y0 = log(n0 / n_bar, "solvent fraction")?;
            spec.species
                .iter()
                .zip(n)
                .map(|(s, &n)| Ok(log(n / n_bar, "mole fraction")? - s.a * ln_y0))
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn mixture(a: f64, v0: f64) -> MixtureSpec {
        MixtureSpec::classical_binary(1.0, 1.0).with_volume_ratio(a, v0).unwrap()
    }

    #[test]
    fn classical_y0_is_one() {
        let spec = MixtureSpec::classical_binary(1.33, 0.79);
        assert_eq!(solve_y0(&[3.0, 0.2], 1.7, &spec).unwrap(), 1.0);
    }

    #[test]
    fn bikerman_closed_form() {
        let spec = mixture(1.0, 0.018);
        assert_eq!(spec.variant, Variant::Bikerman);
        // Q+ E+ + Q- E- = 1 at phi = 0
        let y0 = solve_y0(&[0.4, 0.6], 0.0, &spec).unwrap();
        assert_relative_eq!(y0, 0.5, epsilon = 1e-15);
        let phi: f64 = 0.7;
        let q = [0.3, 0.05];
        let expect = 1.0 / (1.0 + 0.3 * (-phi).exp() + 0.05 * phi.exp());
        assert_relative_eq!(solve_y0(&q, phi, &spec).unwrap(), expect, epsilon = 1e-15);
    }

    #[test]
    fn solvated_root_matches_bisection_oracle() {
        let spec = mixture(4.15, 0.018);
        let y = solve_y0(&[0.1, 0.1], 0.0, &spec).unwrap();
        assert!(y0_residual(&[0.1, 0.1], &[4.15, 4.15], y).abs() < 1e-15);
        // independent scalar bisection
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..200 {
            let m = 0.5 * (lo + hi);
            if 1.0 - m - 0.2 * m.powf(4.15) > 0.0 {
                lo = m
            } else {
                hi = m
            }
        }
        assert_relative_eq!(y, 0.5 * (lo + hi), epsilon = 1e-12);
    }

    #[test]
    fn total_concentration_cases() {
        let clya = MixtureSpec {
            species: MixtureSpec::classical_binary(1.334, 2.032)
                .species
                .into_iter()
                .map(|s| SpeciesSpec { a: 4.15, v: 0.075, ..s })
                .collect(),
            v0: 0.018,
            variant: Variant::Mixture,
        };
        clya.validate().unwrap();
        assert_relative_eq!(total_concentration(&[0.01, 0.01], &clya).unwrap(), 1.0 / 0.01914, max_relative = 1e-14);
        assert_relative_eq!(total_concentration(&[0.0, 0.0], &clya).unwrap(), 1.0 / 0.018, max_relative = 1e-14);
        let bik = mixture(1.0, 0.018);
        assert_relative_eq!(total_concentration(&[0.3, 0.1], &bik).unwrap(), 1.0 / 0.018, max_relative = 1e-14);
        let bad = MixtureSpec { v0: 0.018, ..mixture(10.0, 0.018) };
        assert!(matches!(total_concentration(&[-0.9, 0.0], &bad), Err(Error::State(_))));
    }

    #[test]
    fn classical_flat_slice() {
        let spec = MixtureSpec::classical_binary(1.33, 0.79);
        let c = slice_composition(&[0.6, 0.6], &[0.0; 5], &spec).unwrap();
        assert!(c.q.iter().all(|&q| q == 0.0));
        assert!(c.n[0].iter().all(|&n| n == 0.6));
        let c = slice_composition(&[0.6, 0.6], &[0.0, -0.1, -0.3, -0.6], &spec).unwrap();
        assert!(c.n[0].windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn boundary_factors_reproduce_reservoir() {
        for spec in [mixture(1.0, 0.018), mixture(5.0, 0.018), mixture(4.15, 0.018)] {
            let n = [0.4, 0.4];
            let q = spec.boundary_factors(&n).unwrap();
            let node = node_composition(&q, 0.0, &spec).unwrap();
            for a in 0..2 {
                assert_relative_eq!(node.n[a], n[a], max_relative = 1e-12);
            }
            let pref = spec.boundary_prefactor(&n).unwrap();
            assert_relative_eq!(pref[0] * q[0], n[0], max_relative = 1e-12);
        }
    }

    #[test]
    fn chemical_potential_variants() {
        let spec = MixtureSpec::classical_binary(1.0, 1.0);
        assert_eq!(chemical_potential(&[1.0, 1.0], &spec).unwrap(), vec![0.0, 0.0]);
        let bik = mixture(1.0, 0.018);
        let mut last = f64::NEG_INFINITY;
        for packing in [0.5, 0.9, 0.99, 0.999] {
            let n = packing / 0.018 / 2.0;
            let mu = chemical_potential(&[n, n], &bik).unwrap()[0];
            assert!(mu > last);
            last = mu;
        }
        assert!(chemical_potential(&[1.0 / 0.018, 0.0], &bik).is_err());
        let mix = MixtureSpec {
            variant: Variant::Mixture,
            ..bik.clone()
        };
        let n = [3.0, 4.0];
        let (a, b) = (chemical_potential(&n, &bik).unwrap(), chemical_potential(&n, &mix).unwrap());
        assert_relative_eq!(a[0], b[0], epsilon = 1e-13);
        assert_relative_eq!(a[1], b[1], epsilon = 1e-13);
    }

    #[test]
    fn validation_rules() {
        let mut spec = MixtureSpec::classical_binary(1.0, 1.0);
        spec.validate().unwrap();
        spec.species[0].a = 1.0;
        assert!(spec.validate().is_err());
        let mut m = mixture(5.0, 0.018);
        m.validate().unwrap();
        m.species[1].v = 0.2;
        assert!(m.validate().is_err());
        let mut k = MixtureSpec::classical_binary(1.0, 1.0);
        k.species[0].k = 0.0;
        assert!(k.validate().is_err());
    }

    fn analytic_dq(q: &[f64], phi: f64, spec: &MixtureSpec) -> (f64, f64) {
        let node = node_composition(q, phi, spec).unwrap();
        let h = 1e-6;
        let p = node_composition(q, phi + h, spec).unwrap().q;
        let m = node_composition(q, phi - h, spec).unwrap().q;
        (node.dq_dphi, (p - m) / (2.0 * h))
    }

    proptest! {
        #[test]
        fn newton_and_bisection_agree(
            qp in 0.0f64..3.0, qm in 0.0f64..3.0, phi in -6.0f64..6.0,
            a_pick in 0usize..4, a_free in 0.1f64..6.0,
        ) {
            let a = [1.0, 4.15, 5.0, a_free][a_pick];
            let spec = mixture(a, 0.018);
            let q = [qp * 1e-2, qm * 1e-2];
            let n = solve_y0(&q, phi, &spec).unwrap();
            let b = solve_y0_bisection(&q, phi, &spec).unwrap();
            prop_assert!((n - b).abs() <= 1e-12, "{} vs {}", n, b);
            prop_assert!(n > 0.0 && n <= 1.0);
        }

        #[test]
        fn incompressibility_holds(qp in 0.0f64..0.05, qm in 0.0f64..0.05, phi in -4.0f64..4.0, a in 0.5f64..6.0) {
            let spec = mixture(a, 0.018);
            let node = node_composition(&[qp, qm], phi, &spec).unwrap();
            let filled = spec.v0 * node.n_bar * node.y0
                + spec.species.iter().zip(&node.n).map(|(s, n)| s.v * n).sum::<f64>();
            prop_assert!((filled - 1.0).abs() < 1e-10);
            prop_assert!((node.y0 + node.y.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn charge_derivative_matches_finite_difference(qp in 0.001f64..0.05, qm in 0.001f64..0.05, phi in -3.0f64..3.0, a in 0.0f64..6.0) {
            let spec = mixture(a, 0.018);
            let (an, fd) = analytic_dq(&[qp, qm], phi, &spec);
            prop_assert!((an - fd).abs() <= 1e-5 * (1.0 + an.abs()), "{} vs {}", an, fd);
        }

        #[test]
        fn equilibrium_potential_is_flat(qp in 0.001f64..0.05, qm in 0.001f64..0.05, phi in -3.0f64..3.0, a in 0.0f64..6.0) {
            let spec = mixture(a, 0.018);
            let at = |p: f64| {
                let node = node_composition(&[qp, qm], p, &spec).unwrap();
                chemical_potential(&node.n, &spec).unwrap()
            };
            let (m0, m1) = (at(0.0), at(phi));
            for (i, s) in spec.species.iter().enumerate() {
                prop_assert!((m1[i] + s.z * phi - m0[i]).abs() < 1e-9);
            }
        }
    }
}

//! Parameter sweeps and entanglement maximization.
//!
//! Entanglement grows monotonically with the symplectic eigenvalue `δ`, so the
//! optimizer climbs `δ² − 1` ([`gaussian::delta_squared_excess`]) and reports
//! `δ` and the entropy through the determinant path
//! ([`gaussian::entanglement`]).

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::gaussian::{self, BeamSplitterParams, SqueezingParam, ThermalEquivalent};

/// Points per free dimension in the coarse grid.
pub const GRID_POINTS: usize = 64;
/// Coordinate refinement rounds after the grid.
pub const REFINE_ROUNDS: usize = 3;
/// Golden-section stops once the bracket is narrower than this.
pub const PARAM_TOL: f64 = 1e-8;
/// Most free parameters `maximize_entanglement` accepts.
pub const MAX_FREE: usize = 3;
/// Upper bound on sweep resolution.
pub const MAX_STEPS: usize = 1_000_000;
/// Phase-condition residual expected at a free-phase optimum.
pub const PHASE_RESIDUAL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Param {
    Ra,
    Rb,
    Theta,
    Phi0,
    Phi1,
    ChiA,
    ChiB,
}

impl Param {
    pub const ALL: [Param; 7] = [
        Param::Ra,
        Param::Rb,
        Param::Theta,
        Param::Phi0,
        Param::Phi1,
        Param::ChiA,
        Param::ChiB,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Param::Ra => "r_a",
            Param::Rb => "r_b",
            Param::Theta => "theta",
            Param::Phi0 => "phi0",
            Param::Phi1 => "phi1",
            Param::ChiA => "chi_a",
            Param::ChiB => "chi_b",
        }
    }

    /// Everything except the squeezing magnitudes.
    pub fn is_angle(&self) -> bool {
        !matches!(self, Param::Ra | Param::Rb)
    }

    pub fn is_phase(&self) -> bool {
        matches!(self, Param::Phi0 | Param::Phi1 | Param::ChiA | Param::ChiB)
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Param {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let p = match s.trim() {
            "r_a" | "ra" => Param::Ra,
            "r_b" | "rb" => Param::Rb,
            "theta" => Param::Theta,
            "phi0" | "phi_0" => Param::Phi0,
            "phi1" | "phi_1" => Param::Phi1,
            "chi_a" | "chia" => Param::ChiA,
            "chi_b" | "chib" => Param::ChiB,
            other => return Err(Error::UnknownParameter(other.to_string())),
        };
        Ok(p)
    }
}

/// Raw values for every parameter of the setup; validated on use.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParameterSet {
    pub r_a: f64,
    pub r_b: f64,
    pub chi_a: f64,
    pub chi_b: f64,
    pub theta: f64,
    pub phi0: f64,
    pub phi1: f64,
}

impl Default for ParameterSet {
    /// Vacuum inputs on the 50:50 splitter.
    fn default() -> Self {
        ParameterSet {
            r_a: 0.0,
            r_b: 0.0,
            chi_a: 0.0,
            chi_b: 0.0,
            theta: FRAC_PI_4,
            phi0: 0.0,
            phi1: 0.0,
        }
    }
}

impl ParameterSet {
    pub fn get(&self, p: Param) -> f64 {
        match p {
            Param::Ra => self.r_a,
            Param::Rb => self.r_b,
            Param::Theta => self.theta,
            Param::Phi0 => self.phi0,
            Param::Phi1 => self.phi1,
            Param::ChiA => self.chi_a,
            Param::ChiB => self.chi_b,
        }
    }

    pub fn set(&mut self, p: Param, value: f64) {
        match p {
            Param::Ra => self.r_a = value,
            Param::Rb => self.r_b = value,
            Param::Theta => self.theta = value,
            Param::Phi0 => self.phi0 = value,
            Param::Phi1 => self.phi1 = value,
            Param::ChiA => self.chi_a = value,
            Param::ChiB => self.chi_b = value,
        }
    }

    pub fn with(mut self, p: Param, value: f64) -> Self {
        self.set(p, value);
        self
    }

    pub fn squeezing(&self) -> Result<(SqueezingParam, SqueezingParam)> {
        Ok((
            SqueezingParam::new(self.r_a, self.chi_a)?,
            SqueezingParam::new(self.r_b, self.chi_b)?,
        ))
    }

    pub fn beam_splitter(&self) -> Result<BeamSplitterParams> {
        BeamSplitterParams::new(self.theta, self.phi0, self.phi1)
    }

    pub fn evaluate(&self) -> Result<ThermalEquivalent> {
        let (za, zb) = self.squeezing()?;
        Ok(gaussian::entanglement(za, zb, self.beam_splitter()?))
    }

    /// `2(φ1 − φ0) − (χ_b − χ_a)` on the raw values.
    pub fn phase_difference(&self) -> f64 {
        2.0 * (self.phi1 - self.phi0) - (self.chi_b - self.chi_a)
    }
}

/// A one-parameter grid over a base configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub param: Param,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    pub base: ParameterSet,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.from.is_finite() && self.to.is_finite()) {
            return Err(Error::InvalidSweep("bounds must be finite".into()));
        }
        if self.from >= self.to {
            return Err(Error::InvalidSweep(format!(
                "`from` ({}) must be less than `to` ({})",
                self.from, self.to
            )));
        }
        if self.steps < 2 || self.steps > MAX_STEPS {
            return Err(Error::InvalidSweep(format!(
                "steps must be in [2, {MAX_STEPS}], got {}",
                self.steps
            )));
        }
        Ok(())
    }

    /// Grid value `i`; the last point is exactly `to`.
    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.steps {
            self.to
        } else {
            self.from + (self.to - self.from) * (i as f64 / (self.steps - 1) as f64)
        }
    }

    pub fn step_size(&self) -> f64 {
        (self.to - self.from) / (self.steps - 1) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub delta: f64,
    pub entropy_nats: f64,
}

pub fn sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    sweep_with(spec, Execution::default())
}

pub fn sweep_with(spec: &SweepSpec, exec: Execution) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    exec.map_range(spec.steps, |i| {
        let value = spec.value(i);
        let t = spec.base.with(spec.param, value).evaluate()?;
        Ok(SweepRow {
            value,
            delta: t.delta,
            entropy_nats: t.entropy_nats,
        })
    })
    .into_iter()
    .collect()
}

/// Distance of `2(φ1 − φ0) − (χ_b − χ_a)` from the nearest odd multiple of
/// π, in `[0, π]`.
pub fn phase_condition_check(
    za: SqueezingParam,
    zb: SqueezingParam,
    bs: BeamSplitterParams,
) -> f64 {
    let (delta_a, delta_b) = gaussian::phase_combinations(za, zb, bs);
    odd_pi_residual(delta_b - delta_a)
}

/// Same as [`phase_condition_check`] on raw parameter values.
pub fn phase_residual(params: &ParameterSet) -> f64 {
    odd_pi_residual(params.phase_difference())
}

fn odd_pi_residual(d: f64) -> f64 {
    let off = (d - PI).rem_euclid(TAU);
    off.min(TAU - off).abs()
}

/// The `k` with `Δ_b − Δ_a ≈ (2k + 1)π`, taking the representative of the
/// phase difference in `(0, 2π]`.
///
/// Every branch gives the same entanglement, so this is `0` whenever the
/// maximizing condition holds; the equidistant worst case `Δ_b − Δ_a ≡ 0`
/// reports `1`.
pub fn phase_branch(params: &ParameterSet) -> i64 {
    let d = match params.phase_difference().rem_euclid(TAU) {
        0.0 => TAU,
        w => w,
    };
    ((d - PI) / TAU).round() as i64
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaximizationResult {
    /// Full parameter set at the optimum (free angles in canonical ranges).
    pub argmax: ParameterSet,
    pub free: Vec<Param>,
    pub delta_max: f64,
    pub entropy_max: f64,
    /// Branch of the phase condition realized by `argmax`.
    pub k_branch: i64,
    /// Distance of the phase difference from an odd multiple of π.
    pub phase_residual: f64,
    /// The objective did not vary over the grid; `argmax` is the first grid point.
    pub flat: bool,
    pub evaluations: usize,
}

/// Search interval of a free parameter: `θ ∈ [0, π/2]` (closed), phases on
/// the circle.
fn domain(p: Param) -> (f64, f64, bool) {
    if p == Param::Theta {
        (0.0, FRAC_PI_2, false)
    } else {
        (0.0, TAU, true)
    }
}

fn grid_value(p: Param, i: usize) -> f64 {
    let (lo, hi, periodic) = domain(p);
    if periodic {
        lo + (hi - lo) * i as f64 / GRID_POINTS as f64
    } else {
        lo + (hi - lo) * i as f64 / (GRID_POINTS - 1) as f64
    }
}

fn grid_step(p: Param) -> f64 {
    let (lo, hi, periodic) = domain(p);
    (hi - lo)
        / if periodic {
            GRID_POINTS
        } else {
            GRID_POINTS - 1
        } as f64
}

/// `δ² − 1` for a parameter set whose squeezing was already validated.
fn objective(params: &ParameterSet) -> f64 {
    let za = SqueezingParam::new(params.r_a, params.chi_a).expect("validated squeezing");
    let zb = SqueezingParam::new(params.r_b, params.chi_b).expect("validated squeezing");
    let bs =
        BeamSplitterParams::new(params.theta, params.phi0, params.phi1).expect("finite angles");
    gaussian::delta_squared_excess(za, zb, bs)
}

pub fn maximize_entanglement(base: &ParameterSet, free: &[Param]) -> Result<MaximizationResult> {
    maximize_entanglement_with(base, free, Execution::default())
}

/// Coarse grid over the free angles followed by coordinate-wise
/// golden-section refinement.
///
/// The squeezing magnitudes are always fixed inputs. A flat objective (e.g.
/// vacuum inputs) returns the first grid point with `flat` set.
pub fn maximize_entanglement_with(
    base: &ParameterSet,
    free: &[Param],
    exec: Execution,
) -> Result<MaximizationResult> {
    let mut free: Vec<Param> = free.to_vec();
    free.sort();
    free.dedup();
    if free.is_empty() {
        return Err(Error::NoFreeParameters);
    }
    if let Some(&p) = free.iter().find(|p| !p.is_angle()) {
        return Err(Error::NotOptimizable(p));
    }
    if free.len() > MAX_FREE {
        return Err(Error::TooManyFreeParameters {
            max: MAX_FREE,
            got: free.len(),
        });
    }
    // validates every fixed value up front
    base.evaluate()?;

    let dims = free.len();
    let total = GRID_POINTS.pow(dims as u32);
    let point_at = |index: usize| {
        let mut p = *base;
        let mut rest = index;
        for &param in free.iter().rev() {
            p.set(param, grid_value(param, rest % GRID_POINTS));
            rest /= GRID_POINTS;
        }
        p
    };
    let values = exec.map_range(total, |i| objective(&point_at(i)));
    let mut evaluations = total;

    let (mut best_idx, mut best_val) = (0usize, values[0]);
    let (mut lo_val, mut hi_val) = (values[0], values[0]);
    for (i, &v) in values.iter().enumerate() {
        if v > best_val {
            best_val = v;
            best_idx = i;
        }
        lo_val = lo_val.min(v);
        hi_val = hi_val.max(v);
    }
    let flat = hi_val - lo_val <= 1e-13 * hi_val.abs().max(1.0);

    let mut best = point_at(if flat { 0 } else { best_idx });
    if !flat {
        for _ in 0..REFINE_ROUNDS {
            for &param in &free {
                let (lo, hi, periodic) = domain(param);
                let h = grid_step(param);
                let x0 = best.get(param);
                let (a, b) = if periodic {
                    (x0 - h, x0 + h)
                } else {
                    ((x0 - h).max(lo), (x0 + h).min(hi))
                };
                let f = |x: f64| objective(&best.with(param, x));
                let (x, fx, n) = golden_section_max(f, a, b, PARAM_TOL);
                evaluations += n;
                if fx > best_val {
                    best_val = fx;
                    best.set(param, if periodic { gaussian::wrap_angle(x) } else { x });
                }
            }
        }
    }

    let t = best.evaluate()?;
    let phase_residual = phase_residual(&best);
    if !flat && free.iter().any(Param::is_phase) && phase_residual > PHASE_RESIDUAL_TOL {
        log::warn!("phase condition residual {phase_residual:e} at the optimum exceeds {PHASE_RESIDUAL_TOL:e}");
    }
    Ok(MaximizationResult {
        argmax: best,
        free,
        delta_max: t.delta,
        entropy_max: t.entropy_nats,
        k_branch: phase_branch(&best),
        phase_residual,
        flat,
        evaluations,
    })
}

/// Golden-section search for a maximum of `f` on `[a, b]`.
///
/// Returns the best point seen, its value, and the number of evaluations.
pub fn golden_section_max<F>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64, usize)
where
    F: Fn(f64) -> f64,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let mut evals = 2;
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        evals += 1;
    }
    if fc >= fd {
        (c, fc, evals)
    } else {
        (d, fd, evals)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn squeezed(r_a: f64, r_b: f64) -> ParameterSet {
        ParameterSet {
            r_a,
            r_b,
            ..ParameterSet::default()
        }
    }

    #[test]
    fn param_names_round_trip() {
        for p in Param::ALL {
            assert_eq!(p.name().parse::<Param>().unwrap(), p);
        }
        assert!(matches!(
            "gamma".parse::<Param>(),
            Err(Error::UnknownParameter(_))
        ));
    }

    #[test]
    fn sweep_spec_validation() {
        let mut spec = SweepSpec {
            param: Param::Theta,
            from: 0.0,
            to: 1.0,
            steps: 2,
            base: ParameterSet::default(),
        };
        assert!(spec.validate().is_ok());
        spec.steps = 1;
        assert!(spec.validate().is_err());
        spec.steps = MAX_STEPS + 1;
        assert!(spec.validate().is_err());
        spec.steps = 10;
        spec.from = 2.0;
        assert!(spec.validate().is_err());
        spec.from = f64::NAN;
        assert!(spec.validate().is_err());
    }

    #[test]
    fn sweep_vacuum_is_zero() {
        let spec = SweepSpec {
            param: Param::Theta,
            from: 0.0,
            to: FRAC_PI_2,
            steps: 33,
            base: ParameterSet::default(),
        };
        let rows = sweep(&spec).unwrap();
        assert_eq!(rows.len(), 33);
        assert!(rows.iter().all(|r| r.entropy_nats == 0.0 && r.delta == 1.0));
        assert_eq!(rows[32].value, FRAC_PI_2);
    }

    #[test]
    fn sweep_rejects_negative_squeezing() {
        let spec = SweepSpec {
            param: Param::Ra,
            from: -1.0,
            to: 1.0,
            steps: 5,
            base: ParameterSet::default(),
        };
        assert!(matches!(sweep(&spec), Err(Error::InvalidSqueezing(_))));
    }

    #[test]
    fn sweep_phase_difference_peaks_at_pi() {
        // with φ0 = φ1 = χ_b = 0 the phase difference equals χ_a
        let spec = SweepSpec {
            param: Param::ChiA,
            from: 0.0,
            to: TAU,
            steps: 721,
            base: squeezed(0.5, 0.5),
        };
        let rows = sweep(&spec).unwrap();
        let best = rows
            .iter()
            .max_by(|a, b| a.entropy_nats.total_cmp(&b.entropy_nats))
            .unwrap();
        assert!((best.value - PI).abs() <= spec.step_size());
    }

    #[test]
    fn sweep_theta_peaks_at_quarter_pi() {
        let spec = SweepSpec {
            param: Param::Theta,
            from: 0.0,
            to: FRAC_PI_2,
            steps: 181,
            base: squeezed(0.5, 0.5).with(Param::Phi1, FRAC_PI_2),
        };
        let rows = sweep(&spec).unwrap();
        let best = rows
            .iter()
            .max_by(|a, b| a.entropy_nats.total_cmp(&b.entropy_nats))
            .unwrap();
        assert!((best.value - FRAC_PI_4).abs() <= spec.step_size());
    }

    #[test]
    fn phase_condition_examples() {
        let z = SqueezingParam::new(0.3, 0.0).unwrap();
        let bs = BeamSplitterParams::new(0.5, 0.0, FRAC_PI_2).unwrap();
        assert!(phase_condition_check(z, z, bs) < 1e-15);
        let bs = BeamSplitterParams::new(0.5, 0.0, 0.0).unwrap();
        assert_abs_diff_eq!(phase_condition_check(z, z, bs), PI, epsilon = 1e-15);
        let p = squeezed(0.3, 0.3).with(Param::Phi1, 0.7);
        let shifted = p.with(Param::Phi1, 0.7 + TAU);
        assert_abs_diff_eq!(
            phase_residual(&p),
            phase_residual(&shifted),
            epsilon = 1e-14
        );
    }

    #[test]
    fn branch_uses_representative_in_half_open_turn() {
        let p = squeezed(0.3, 0.3);
        for phi1 in [FRAC_PI_2, FRAC_PI_2 + PI, FRAC_PI_2 - 3.0 * PI] {
            assert_eq!(phase_branch(&p.with(Param::Phi1, phi1)), 0);
        }
        assert_eq!(phase_branch(&p.with(Param::ChiB, PI)), 0);
        assert_eq!(phase_branch(&p), 1);
        assert!(phase_residual(&p.with(Param::ChiB, PI)).is_sign_positive());
    }

    #[test]
    fn worst_case_phases_leave_theta_flat_for_equal_squeezing() {
        // residual π with r_a = r_b: δ² − 1 ∝ Σ² − 1 − 4x² = 0 for every θ
        let res = maximize_entanglement(&squeezed(0.5, 0.5), &[Param::Theta]).unwrap();
        assert!(res.flat);
        assert_eq!(res.entropy_max, 0.0);
        let best = maximize_entanglement(
            &squeezed(0.5, 0.5).with(Param::Phi1, FRAC_PI_2),
            &[Param::Theta],
        )
        .unwrap();
        assert!(res.entropy_max < best.entropy_max);
        assert_abs_diff_eq!(best.argmax.theta, FRAC_PI_4, epsilon = 1e-7);

        let res = maximize_entanglement(&squeezed(0.5, 0.2), &[Param::Theta]).unwrap();
        assert!(!res.flat);
        assert_abs_diff_eq!(res.argmax.theta, FRAC_PI_4, epsilon = 1e-7);
        let best = maximize_entanglement(
            &squeezed(0.5, 0.2).with(Param::Phi1, FRAC_PI_2),
            &[Param::Theta],
        )
        .unwrap();
        assert!(res.entropy_max < best.entropy_max);
    }

    #[test]
    fn golden_section_finds_parabola_peak() {
        let (x, fx, _) = golden_section_max(|x| -(x - 0.3) * (x - 0.3), -1.0, 2.0, 1e-10);
        assert_abs_diff_eq!(x, 0.3, epsilon = 1e-8);
        assert_abs_diff_eq!(fx, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn maximize_rejects_bad_free_sets() {
        let base = squeezed(0.5, 0.5);
        assert_eq!(
            maximize_entanglement(&base, &[]),
            Err(Error::NoFreeParameters)
        );
        assert_eq!(
            maximize_entanglement(&base, &[Param::Ra]),
            Err(Error::NotOptimizable(Param::Ra))
        );
        assert!(matches!(
            maximize_entanglement(
                &base,
                &[Param::Theta, Param::Phi0, Param::Phi1, Param::ChiA]
            ),
            Err(Error::TooManyFreeParameters { .. })
        ));
    }

    #[test]
    fn maximize_vacuum_is_flat() {
        let res =
            maximize_entanglement(&ParameterSet::default(), &[Param::Theta, Param::Phi1]).unwrap();
        assert!(res.flat);
        assert_eq!(res.entropy_max, 0.0);
        assert_eq!(res.argmax.theta, 0.0);
        assert_eq!(res.argmax.phi1, 0.0);
    }

    #[test]
    fn maximize_all_angles() {
        let res = maximize_entanglement(
            &squeezed(0.5, 0.5),
            &[Param::Theta, Param::Phi0, Param::Phi1],
        )
        .unwrap();
        assert!(!res.flat);
        assert_abs_diff_eq!(res.argmax.theta, FRAC_PI_4, epsilon = 1e-7);
        assert!(
            res.phase_residual < PHASE_RESIDUAL_TOL,
            "{}",
            res.phase_residual
        );
        assert_abs_diff_eq!(res.delta_max, 1f64.cosh(), epsilon = 1e-12);
        assert_abs_diff_eq!(res.entropy_max, 0.6594529592, epsilon = 1e-9);
    }

    #[test]
    fn maximize_single_squeezer() {
        let res = maximize_entanglement(&squeezed(0.5, 0.0), &[Param::Theta, Param::Phi1]).unwrap();
        assert_abs_diff_eq!(res.argmax.theta, FRAC_PI_4, epsilon = 1e-7);
        assert_abs_diff_eq!(res.delta_max, 0.5f64.cosh(), epsilon = 1e-12);
        assert_abs_diff_eq!(res.entropy_max, 0.2414075308, epsilon = 1e-9);
    }
}

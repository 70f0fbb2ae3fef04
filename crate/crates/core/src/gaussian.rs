//! Covariance-matrix engine for zero-mean two-mode Gaussian states.
//!
//! # Phase-space convention
//!
//! A state is described by its characteristic function
//! `C(ξ_a, ξ_b) = tr[D(ξ_a, ξ_b) ρ]` with `D = exp(Σ_m ξ_m m − ξ_m* m†)`.
//! For the zero-mean Gaussian states handled here
//! `C = exp(−½ vᵀ M v)` where `v = (Re ξ_a, Im ξ_a, Re ξ_b, Im ξ_b)`, and `M`
//! is the 4×4 covariance stored in [`GaussianState`]. The vacuum has `M = I`.
//! In operator language the two coordinates of each mode are conjugate to
//! `P = −i(m − m†)` and `X = m + m†` respectively, so `M[0][0] = ⟨P_a²⟩` and
//! `M[1][1] = ⟨X_a²⟩`; for brevity the code calls them the `x`/`p` slots.
//!
//! A Gaussian unitary `U` acts as `M → S M Sᵀ` with `S` symplectic with
//! respect to `Ω = ⊕ [[0, 1], [−1, 0]]`. The beam splitter is taken to move
//! creation operators by `M_B`, i.e. `B† m_j† B = Σ_k (M_B)_jk m_k†`, which
//! puts the phases of the reduced covariance in the combinations
//! `Δ_a = 2φ0 − χ_a` and `Δ_b = 2φ1 − χ_b`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;

use nalgebra::{Matrix2, Matrix4, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance for "exact" matrix identities (symmetry, symplectic form).
pub const EXACT_TOL: f64 = 1e-12;
/// `apply_transform` rejects transforms further than this from symplectic.
pub const SYMPLECTIC_TOL: f64 = 1e-10;
/// Slack below `δ = 1` that is attributed to rounding and clamped away.
pub const DELTA_CLAMP_TOL: f64 = 1e-10;
/// A one-mode determinant below `1 − DET_REJECT_TOL` is unphysical.
pub const DET_REJECT_TOL: f64 = 1e-6;
/// PPT witness threshold: inseparable iff `λ_min < −PPT_TOL`.
pub const PPT_TOL: f64 = 1e-9;

/// Reduces an angle into `[0, 2π)`.
pub fn wrap_angle(x: f64) -> f64 {
    let w = x.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if w >= TAU {
        0.0
    } else {
        w
    }
}

fn check_finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite { name, value })
    }
}

/// Single-mode squeezing `ζ = r e^{iχ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezingParam {
    r: f64,
    chi: f64,
}

impl SqueezingParam {
    pub const VACUUM: SqueezingParam = SqueezingParam { r: 0.0, chi: 0.0 };

    pub fn new(r: f64, chi: f64) -> Result<Self> {
        if !(r.is_finite() && r >= 0.0) {
            return Err(Error::InvalidSqueezing(r));
        }
        let chi = check_finite("chi", chi)?;
        let chi = if r == 0.0 { 0.0 } else { wrap_angle(chi) };
        Ok(SqueezingParam { r, chi })
    }

    /// Builds the parameter from the complex squeezing amplitude, `χ = arg ζ`.
    pub fn from_complex(zeta: Complex64) -> Result<Self> {
        if !(zeta.re.is_finite() && zeta.im.is_finite()) {
            return Err(Error::NonFinite {
                name: "zeta",
                value: if zeta.re.is_finite() {
                    zeta.im
                } else {
                    zeta.re
                },
            });
        }
        let (r, chi) = zeta.to_polar();
        SqueezingParam::new(r, chi)
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// Phase in `[0, 2π)`; zero when `r = 0`.
    pub fn chi(&self) -> f64 {
        self.chi
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::from_polar(self.r, self.chi)
    }

    /// `Σ = cosh² r + sinh² r = cosh 2r`.
    pub fn sigma(&self) -> f64 {
        (2.0 * self.r).cosh()
    }

    /// `x = sinh r cosh r`.
    pub fn x(&self) -> f64 {
        self.r.sinh() * self.r.cosh()
    }
}

impl Default for SqueezingParam {
    fn default() -> Self {
        SqueezingParam::VACUUM
    }
}

/// Lossless beam splitter with mode-mixing matrix
///
/// ```text
/// M_B = [[ cosθ e^{iφ0},  sinθ e^{iφ1}],
///        [−sinθ e^{−iφ1}, cosθ e^{−iφ0}]]
/// ```
///
/// Construction reduces `θ` into `[0, π/2]` and moves the discarded signs of
/// `cos θ` / `sin θ` into `φ0` / `φ1` (a shift by π flips both entries that
/// carry the phase), so `M_B` itself is unchanged. All formulas remain valid
/// for any `θ`; the canonical form only makes reported values comparable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamSplitterParams {
    theta: f64,
    phi0: f64,
    phi1: f64,
}

impl BeamSplitterParams {
    pub const IDENTITY: BeamSplitterParams = BeamSplitterParams {
        theta: 0.0,
        phi0: 0.0,
        phi1: 0.0,
    };

    pub fn new(theta: f64, phi0: f64, phi1: f64) -> Result<Self> {
        let theta = wrap_angle(check_finite("theta", theta)?);
        let mut phi0 = check_finite("phi0", phi0)?;
        let mut phi1 = check_finite("phi1", phi1)?;
        let theta = if theta <= FRAC_PI_2 {
            theta
        } else if theta <= PI {
            phi0 += PI;
            PI - theta
        } else if theta <= PI + FRAC_PI_2 {
            phi0 += PI;
            phi1 += PI;
            theta - PI
        } else {
            phi1 += PI;
            TAU - theta
        };
        Ok(BeamSplitterParams {
            theta,
            phi0: wrap_angle(phi0),
            phi1: wrap_angle(phi1),
        })
    }

    /// The 50:50 splitter with zero phases.
    pub fn balanced() -> Self {
        BeamSplitterParams {
            theta: PI / 4.0,
            phi0: 0.0,
            phi1: 0.0,
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi0(&self) -> f64 {
        self.phi0
    }

    pub fn phi1(&self) -> f64 {
        self.phi1
    }

    /// Intensity transmittance `cos² θ`.
    pub fn transmittance(&self) -> f64 {
        self.theta.cos().powi(2)
    }

    pub fn mode_matrix(&self) -> Matrix2<Complex64> {
        let (s, c) = self.theta.sin_cos();
        let e0 = Complex64::from_polar(1.0, self.phi0);
        let e1 = Complex64::from_polar(1.0, self.phi1);
        Matrix2::new(e0 * c, e1 * s, -e1.conj() * s, e0.conj() * c)
    }
}

impl Default for BeamSplitterParams {
    fn default() -> Self {
        BeamSplitterParams::balanced()
    }
}

/// Argument of the two-mode characteristic function.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PhaseSpacePoint {
    pub xi_a: Complex64,
    pub xi_b: Complex64,
}

impl PhaseSpacePoint {
    pub fn new(xi_a: Complex64, xi_b: Complex64) -> Self {
        PhaseSpacePoint { xi_a, xi_b }
    }

    /// `(Re ξ_a, Im ξ_a, Re ξ_b, Im ξ_b)`, the ordering used by the covariance.
    pub fn to_real(&self) -> [f64; 4] {
        [self.xi_a.re, self.xi_a.im, self.xi_b.re, self.xi_b.im]
    }
}

/// `Ω = ⊕ [[0, 1], [−1, 0]]`.
pub fn symplectic_form() -> Matrix4<f64> {
    let mut omega = Matrix4::zeros();
    omega[(0, 1)] = 1.0;
    omega[(1, 0)] = -1.0;
    omega[(2, 3)] = 1.0;
    omega[(3, 2)] = -1.0;
    omega
}

/// `max |S Ω Sᵀ − Ω|` over entries.
pub fn symplectic_deviation(s: &Matrix4<f64>) -> f64 {
    let omega = symplectic_form();
    (s * omega * s.transpose() - omega).amax()
}

/// Zero-mean two-mode Gaussian state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianState {
    cov: Matrix4<f64>,
}

impl GaussianState {
    pub fn vacuum() -> Self {
        GaussianState {
            cov: Matrix4::identity(),
        }
    }

    /// Validates symmetry and the uncertainty relation `M + iΩ ⪰ 0`.
    pub fn from_covariance(cov: Matrix4<f64>) -> Result<Self> {
        if cov.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidCovariance("non-finite entry".into()));
        }
        let scale = cov.amax().max(1.0);
        let asym = (cov - cov.transpose()).amax();
        if asym > EXACT_TOL * scale {
            return Err(Error::InvalidCovariance(format!(
                "not symmetric (max asymmetry {asym:e})"
            )));
        }
        let state = GaussianState {
            cov: symmetrize(&cov),
        };
        let lambda = state.uncertainty_min_eigenvalue();
        if lambda < -1e-10 * scale {
            return Err(Error::InvalidCovariance(format!(
                "violates the uncertainty relation (min eigenvalue {lambda:e})"
            )));
        }
        Ok(state)
    }

    pub fn cov(&self) -> &Matrix4<f64> {
        &self.cov
    }

    /// Row-major copy of the covariance.
    pub fn cov_row_major(&self) -> [f64; 16] {
        let mut out = [0.0; 16];
        for i in 0..4 {
            for j in 0..4 {
                out[4 * i + j] = self.cov[(i, j)];
            }
        }
        out
    }

    /// `det M`; one for pure states.
    pub fn det(&self) -> f64 {
        self.cov.determinant()
    }

    /// Smallest eigenvalue of the Hermitian matrix `M + iΩ`.
    pub fn uncertainty_min_eigenvalue(&self) -> f64 {
        min_eigenvalue_plus_i(&self.cov, &symplectic_form())
    }

    /// Mean photon numbers `(⟨n_a⟩, ⟨n_b⟩)`; `X² + P² = 2(2n + 1)`.
    pub fn mean_photon_numbers(&self) -> (f64, f64) {
        let c = &self.cov;
        (
            (c[(0, 0)] + c[(1, 1)] - 2.0) / 4.0,
            (c[(2, 2)] + c[(3, 3)] - 2.0) / 4.0,
        )
    }
}

fn symmetrize(m: &Matrix4<f64>) -> Matrix4<f64> {
    (m + m.transpose()) * 0.5
}

fn min_eigenvalue_plus_i(cov: &Matrix4<f64>, antisym: &Matrix4<f64>) -> f64 {
    let h: Matrix4<Complex64> =
        Matrix4::from_fn(|i, j| Complex64::new(cov[(i, j)], antisym[(i, j)]));
    SymmetricEigen::new(h).eigenvalues.min()
}

/// Reduced one-mode covariance `[[m11, m12], [m12, m22]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceMatrix2 {
    pub m11: f64,
    pub m12: f64,
    pub m22: f64,
}

impl CovarianceMatrix2 {
    pub fn new(m11: f64, m12: f64, m22: f64) -> Self {
        CovarianceMatrix2 { m11, m12, m22 }
    }

    pub fn det(&self) -> f64 {
        self.m11 * self.m22 - self.m12 * self.m12
    }

    pub fn to_matrix(&self) -> Matrix2<f64> {
        Matrix2::new(self.m11, self.m12, self.m12, self.m22)
    }

    /// Largest element-wise difference.
    pub fn max_abs_diff(&self, other: &CovarianceMatrix2) -> f64 {
        (self.m11 - other.m11)
            .abs()
            .max((self.m12 - other.m12).abs())
            .max((self.m22 - other.m22).abs())
    }
}

/// The thermal state unitarily equivalent to the reduced output mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalEquivalent {
    /// Symplectic eigenvalue, `≥ 1`.
    pub delta: f64,
    /// Inverse temperature with `e^{−β} = (δ−1)/(δ+1)`; `+∞` when `δ = 1`.
    pub beta: f64,
    /// Von Neumann entropy of the reduced state, in nats.
    pub entropy_nats: f64,
}

/// Quadrature action of the single-mode squeezer `S(ζ)`.
///
/// Follows from `S† m S = m cosh r − m† e^{iχ} sinh r`:
/// `S = cosh r · I + sinh r · [[cos χ, −sin χ], [−sin χ, −cos χ]]`.
/// The matrix is symmetric with unit determinant, and `S Sᵀ` is the squeezed
/// covariance, `diag(e^{2r}, e^{−2r})` at `χ = 0`.
pub fn squeezer_symplectic(zeta: SqueezingParam) -> Matrix2<f64> {
    let (ch, sh) = (zeta.r.cosh(), zeta.r.sinh());
    let (sin_chi, cos_chi) = zeta.chi.sin_cos();
    Matrix2::new(
        ch + sh * cos_chi,
        -sh * sin_chi,
        -sh * sin_chi,
        ch - sh * cos_chi,
    )
}

/// Real 4×4 representation of `M_B`: each complex entry `u + iv` becomes the
/// block `[[u, −v], [v, u]]`. Orthogonal and symplectic.
pub fn beam_splitter_symplectic(bs: BeamSplitterParams) -> Matrix4<f64> {
    let mb = bs.mode_matrix();
    Matrix4::from_fn(|i, j| {
        let z = mb[(i / 2, j / 2)];
        match (i % 2, j % 2) {
            (0, 0) | (1, 1) => z.re,
            (0, 1) => -z.im,
            _ => z.im,
        }
    })
}

/// Embeds two single-mode transforms as a block-diagonal 4×4 matrix.
pub fn direct_sum(sa: &Matrix2<f64>, sb: &Matrix2<f64>) -> Matrix4<f64> {
    let mut out = Matrix4::zeros();
    out.fixed_view_mut::<2, 2>(0, 0).copy_from(sa);
    out.fixed_view_mut::<2, 2>(2, 2).copy_from(sb);
    out
}

/// Product of squeezed vacua `S_a(ζ_a) S_b(ζ_b)|00⟩`.
pub fn input_state(za: SqueezingParam, zb: SqueezingParam) -> GaussianState {
    let sa = squeezer_symplectic(za);
    let sb = squeezer_symplectic(zb);
    GaussianState {
        cov: direct_sum(&(sa * sa.transpose()), &(sb * sb.transpose())),
    }
}

/// `M → S M Sᵀ`; rejects `S` that is not symplectic.
pub fn apply_transform(state: &GaussianState, s: &Matrix4<f64>) -> Result<GaussianState> {
    let deviation = symplectic_deviation(s);
    if deviation.is_nan() || deviation > SYMPLECTIC_TOL * s.amax().max(1.0).powi(2) {
        return Err(Error::NotSymplectic { deviation });
    }
    Ok(GaussianState {
        cov: symmetrize(&(s * state.cov * s.transpose())),
    })
}

/// Marginal of mode a: the characteristic function at `ξ_b = 0`.
pub fn reduce_mode_a(state: &GaussianState) -> CovarianceMatrix2 {
    let c = &state.cov;
    CovarianceMatrix2::new(c[(0, 0)], 0.5 * (c[(0, 1)] + c[(1, 0)]), c[(1, 1)])
}

/// Marginal of mode b.
pub fn reduce_mode_b(state: &GaussianState) -> CovarianceMatrix2 {
    let c = &state.cov;
    CovarianceMatrix2::new(c[(2, 2)], 0.5 * (c[(2, 3)] + c[(3, 2)]), c[(3, 3)])
}

/// `Δ_a = 2φ0 − χ_a`, `Δ_b = 2φ1 − χ_b`.
pub fn phase_combinations(
    za: SqueezingParam,
    zb: SqueezingParam,
    bs: BeamSplitterParams,
) -> (f64, f64) {
    (2.0 * bs.phi0 - za.chi, 2.0 * bs.phi1 - zb.chi)
}

/// Closed-form reduced covariance of mode a after the beam splitter.
///
/// ```text
/// m11 = Σ_a cos²θ + Σ_b sin²θ + 2x_a cos²θ cosΔ_a + 2x_b sin²θ cosΔ_b
/// m12 = 2x_a cos²θ sinΔ_a + 2x_b sin²θ sinΔ_b
/// m22 = Σ_a cos²θ + Σ_b sin²θ − 2x_a cos²θ cosΔ_a − 2x_b sin²θ cosΔ_b
/// ```
///
/// `Σ cos²θ + Σ' sin²θ` is evaluated as `1 + 2 sinh²r cos²θ + 2 sinh²r' sin²θ`
/// (same value, since `Σ = 1 + 2 sinh² r`), which keeps the vacuum case
/// exactly at the identity.
pub fn covariance_elements(
    za: SqueezingParam,
    zb: SqueezingParam,
    bs: BeamSplitterParams,
) -> CovarianceMatrix2 {
    let (s, c) = bs.theta.sin_cos();
    let (c2, s2) = (c * c, s * s);
    let (delta_a, delta_b) = phase_combinations(za, zb, bs);
    let base = 1.0 + 2.0 * za.r.sinh().powi(2) * c2 + 2.0 * zb.r.sinh().powi(2) * s2;
    let wa = 2.0 * za.x() * c2;
    let wb = 2.0 * zb.x() * s2;
    let cos_part = wa * delta_a.cos() + wb * delta_b.cos();
    let sin_part = wa * delta_a.sin() + wb * delta_b.sin();
    CovarianceMatrix2::new(base + cos_part, sin_part, base - cos_part)
}

/// Symplectic eigenvalue `δ = sqrt(m11 m22 − m12²)` of a one-mode covariance.
///
/// Determinants within `DET_REJECT_TOL` below one are rounding noise on pure
/// outputs and clamp to `δ = 1`.
pub fn delta(cov2: &CovarianceMatrix2) -> Result<f64> {
    let det = cov2.det();
    if !det.is_finite() || det < 1.0 - DET_REJECT_TOL || cov2.m11 <= 0.0 || cov2.m22 <= 0.0 {
        return Err(Error::Unphysical { det });
    }
    Ok(det.max(1.0).sqrt())
}

/// `δ²` expanded in closed form:
/// `(sin⁴θ + cos⁴θ) + ½ Σ_a Σ_b sin²2θ − 2 x_a x_b sin²2θ cos(Δ_b − Δ_a)`.
///
/// Independent of [`covariance_elements`]; used as a cross-check.
pub fn delta_squared_closed_form(
    za: SqueezingParam,
    zb: SqueezingParam,
    bs: BeamSplitterParams,
) -> f64 {
    let (s, c) = bs.theta.sin_cos();
    let sin2_2theta = (2.0 * bs.theta).sin().powi(2);
    let (delta_a, delta_b) = phase_combinations(za, zb, bs);
    s.powi(4) + c.powi(4) + 0.5 * za.sigma() * zb.sigma() * sin2_2theta
        - 2.0 * za.x() * zb.x() * sin2_2theta * (delta_b - delta_a).cos()
}

/// `δ² − 1 = ½ sin²2θ (Σ_a Σ_b − 1 − 4 x_a x_b cos(Δ_b − Δ_a))`.
///
/// Algebraically equal to `delta_squared_closed_form − 1`, but the phase
/// dependence is isolated in one term, so values near the maximum keep
/// enough resolution to locate it to ~1e-8 rad. This is the objective the
/// optimizer climbs.
pub fn delta_squared_excess(za: SqueezingParam, zb: SqueezingParam, bs: BeamSplitterParams) -> f64 {
    let sin2_2theta = (2.0 * bs.theta).sin().powi(2);
    let (sa2, sb2) = (za.r.sinh().powi(2), zb.r.sinh().powi(2));
    // Σ = 1 + 2 sinh² r, so Σ_a Σ_b − 1 without cancellation for small r
    let sigma_prod_minus_one = 2.0 * sa2 + 2.0 * sb2 + 4.0 * sa2 * sb2;
    let (delta_a, delta_b) = phase_combinations(za, zb, bs);
    0.5 * sin2_2theta * (sigma_prod_minus_one - 4.0 * za.x() * zb.x() * (delta_b - delta_a).cos())
}

/// Von Neumann entropy (nats) of the thermal state with symplectic
/// eigenvalue `δ`:
/// `((δ+1)/2) ln((δ+1)/2) − ((δ−1)/2) ln((δ−1)/2)`.
pub fn thermal_entropy(delta: f64) -> f64 {
    if delta <= 1.0 {
        return 0.0;
    }
    let plus = 0.5 * (delta + 1.0);
    let minus = 0.5 * (delta - 1.0);
    plus * plus.ln() - minus * minus.ln()
}

/// Thermal parameters and entropy for a symplectic eigenvalue.
pub fn thermal_equivalent(delta: f64) -> Result<ThermalEquivalent> {
    if delta.is_nan() || delta < 1.0 - DELTA_CLAMP_TOL {
        return Err(Error::InvalidDelta(delta));
    }
    let delta = delta.max(1.0);
    if delta == 1.0 {
        return Ok(ThermalEquivalent {
            delta,
            beta: f64::INFINITY,
            entropy_nats: 0.0,
        });
    }
    Ok(ThermalEquivalent {
        delta,
        beta: ((delta + 1.0) / (delta - 1.0)).ln(),
        entropy_nats: thermal_entropy(delta),
    })
}

/// Entanglement between the two output modes:
/// closed-form covariance → δ → thermal entropy.
pub fn entanglement(
    za: SqueezingParam,
    zb: SqueezingParam,
    bs: BeamSplitterParams,
) -> ThermalEquivalent {
    let cov2 = covariance_elements(za, zb, bs);
    // The closed form is a congruence of a pure state, so det ≥ 1 up to rounding.
    let d = cov2.det().max(1.0).sqrt();
    thermal_equivalent(d).expect("delta clamped to >= 1")
}

/// Output state of the beam splitter for squeezed-vacuum inputs, by
/// symplectic propagation.
pub fn output_state(
    za: SqueezingParam,
    zb: SqueezingParam,
    bs: BeamSplitterParams,
) -> GaussianState {
    let s = beam_splitter_symplectic(bs);
    let cov = input_state(za, zb).cov;
    GaussianState {
        cov: symmetrize(&(s * cov * s.transpose())),
    }
}

/// `exp(−½ vᵀ M v)`.
pub fn char_fn_eval(state: &GaussianState, xi: PhaseSpacePoint) -> f64 {
    let v = nalgebra::Vector4::from(xi.to_real());
    (-0.5 * v.dot(&(state.cov * v))).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PptVerdict {
    Separable,
    Inseparable,
}

impl PptVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            PptVerdict::Separable => "separable",
            PptVerdict::Inseparable => "inseparable",
        }
    }
}

impl fmt::Display for PptVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PptResult {
    pub verdict: PptVerdict,
    /// Smallest eigenvalue of `M + iσ̃`; negative values witness entanglement.
    pub lambda_min: f64,
}

/// `σ̃ = J_Aᵀ ⊕ J_B` with `J = [[0, −1], [1, 0]]`.
pub fn partial_transpose_form() -> Matrix4<f64> {
    let j = Matrix2::new(0.0, -1.0, 1.0, 0.0);
    direct_sum(&j.transpose(), &j)
}

/// Partial-transpose test `M + iσ̃ ⪰ 0`.
pub fn ppt_inseparable(state: &GaussianState) -> PptResult {
    let lambda_min = min_eigenvalue_plus_i(&state.cov, &partial_transpose_form());
    let verdict = if lambda_min < -PPT_TOL {
        PptVerdict::Inseparable
    } else {
        PptVerdict::Separable
    };
    PptResult {
        verdict,
        lambda_min,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cmax<R: nalgebra::Dim, C: nalgebra::Dim, S: nalgebra::RawStorage<Complex64, R, C>>(
        m: &nalgebra::Matrix<Complex64, R, C, S>,
    ) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{E, FRAC_PI_4, LN_2};

    fn sq(r: f64, chi: f64) -> SqueezingParam {
        SqueezingParam::new(r, chi).unwrap()
    }

    fn bs(theta: f64, phi0: f64, phi1: f64) -> BeamSplitterParams {
        BeamSplitterParams::new(theta, phi0, phi1).unwrap()
    }

    #[test]
    fn squeezing_param_canonicalizes() {
        let z = sq(0.0, 1.3);
        assert_eq!(z.chi(), 0.0);
        assert_abs_diff_eq!(sq(0.3, -0.5).chi(), TAU - 0.5, epsilon = 1e-15);
        assert!(SqueezingParam::new(-0.1, 0.0).is_err());
        assert!(SqueezingParam::new(f64::NAN, 0.0).is_err());
        assert!(SqueezingParam::new(0.1, f64::INFINITY).is_err());
    }

    #[test]
    fn squeezing_complex_round_trip() {
        for zeta in [
            Complex64::new(0.3, -0.4),
            Complex64::new(-1.2, 0.1),
            Complex64::new(0.0, 2.0),
        ] {
            let back = SqueezingParam::from_complex(zeta).unwrap().to_complex();
            assert_abs_diff_eq!(back.re, zeta.re, epsilon = 1e-15);
            assert_abs_diff_eq!(back.im, zeta.im, epsilon = 1e-15);
        }
    }

    #[test]
    fn mode_matrix_is_unitary() {
        for &(t, p0, p1) in &[(0.3, 1.0, -2.0), (2.0, 0.1, 0.2), (5.5, 3.0, 4.0)] {
            let m = bs(t, p0, p1).mode_matrix();
            let err = cmax(&(m * m.adjoint() - Matrix2::identity()));
            assert!(err < 1e-12, "{err}");
        }
    }

    #[test]
    fn theta_canonicalization_preserves_mode_matrix() {
        for &(t, p0, p1) in &[
            (2.0, 0.3, 1.1),
            (4.0, 0.3, 1.1),
            (5.9, -0.7, 2.2),
            (-0.4, 0.0, 0.0),
        ] {
            let b = bs(t, p0, p1);
            assert!((0.0..=FRAC_PI_2).contains(&b.theta()));
            let (s, c) = t.sin_cos();
            let e0 = Complex64::from_polar(1.0, p0);
            let e1 = Complex64::from_polar(1.0, p1);
            let raw = Matrix2::new(e0 * c, e1 * s, -e1.conj() * s, e0.conj() * c);
            assert!(cmax(&(b.mode_matrix() - raw)) < 1e-14);
        }
    }

    #[test]
    fn squeezer_at_zero_is_identity() {
        assert_eq!(squeezer_symplectic(sq(0.0, 2.0)), Matrix2::identity());
    }

    #[test]
    fn squeezer_real_parameter() {
        let s = squeezer_symplectic(sq(0.5, 0.0));
        assert_abs_diff_eq!(s[(0, 0)], 0.5f64.exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(s[(1, 1)], (-0.5f64).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(s[(0, 1)], 0.0);
        for &(r, chi) in &[(0.5, 0.0), (1.7, 2.3), (3.0, 5.0)] {
            assert_abs_diff_eq!(
                squeezer_symplectic(sq(r, chi)).determinant(),
                1.0,
                epsilon = 1e-9
            );
        }
    }

    #[test]
    fn beam_splitter_identity_and_swap() {
        assert_eq!(
            beam_splitter_symplectic(bs(0.0, 0.0, 0.0)),
            Matrix4::identity()
        );
        let swap = beam_splitter_symplectic(bs(FRAC_PI_2, 0.0, 0.0));
        let v = nalgebra::Vector4::new(1.0, 2.0, 3.0, 4.0);
        let out = swap * v;
        let expected = nalgebra::Vector4::new(3.0, 4.0, -1.0, -2.0);
        assert!((out - expected).amax() < 1e-15);
    }

    #[test]
    fn beam_splitter_is_orthogonal_and_symplectic() {
        let s = beam_splitter_symplectic(bs(0.7, 1.9, 4.4));
        assert!((s * s.transpose() - Matrix4::identity()).amax() < 1e-15);
        assert!(symplectic_deviation(&s) < EXACT_TOL);
    }

    #[test]
    fn vacuum_in_vacuum_out() {
        let out = apply_transform(
            &GaussianState::vacuum(),
            &beam_splitter_symplectic(bs(1.1, 0.2, 3.3)),
        )
        .unwrap();
        assert!((out.cov() - Matrix4::identity()).amax() < 1e-15);
    }

    #[test]
    fn input_state_blocks() {
        assert_eq!(
            *input_state(SqueezingParam::VACUUM, SqueezingParam::VACUUM).cov(),
            Matrix4::identity()
        );
        let st = input_state(sq(0.5, 0.0), SqueezingParam::VACUUM);
        let expected = Matrix4::from_diagonal(&nalgebra::Vector4::new(E, 1.0 / E, 1.0, 1.0));
        assert!((st.cov() - expected).amax() < 1e-14);
        assert_abs_diff_eq!(st.det(), 1.0, epsilon = 1e-12);
        let (na, nb) = st.mean_photon_numbers();
        assert_abs_diff_eq!(na, 0.5f64.sinh().powi(2), epsilon = 1e-14);
        assert_abs_diff_eq!(nb, 0.0);
    }

    #[test]
    fn apply_transform_rejects_non_symplectic() {
        let mut s = Matrix4::identity();
        s[(0, 0)] = 2.0;
        assert!(matches!(
            apply_transform(&GaussianState::vacuum(), &s),
            Err(Error::NotSymplectic { .. })
        ));
        let st = input_state(sq(0.4, 1.0), sq(0.2, 2.0));
        assert_eq!(apply_transform(&st, &Matrix4::identity()).unwrap(), st);
    }

    #[test]
    fn from_covariance_validates() {
        assert!(GaussianState::from_covariance(Matrix4::identity()).is_ok());
        assert!(GaussianState::from_covariance(Matrix4::identity() * 0.5).is_err());
        let mut asym = Matrix4::identity();
        asym[(0, 1)] = 0.1;
        assert!(GaussianState::from_covariance(asym).is_err());
    }

    #[test]
    fn reduce_examples() {
        let vac = reduce_mode_a(&GaussianState::vacuum());
        assert_eq!(vac, CovarianceMatrix2::new(1.0, 0.0, 1.0));
        let out = output_state(sq(0.5, 0.0), SqueezingParam::VACUUM, bs(0.0, 0.0, 0.0));
        let red = reduce_mode_a(&out);
        assert!(red.max_abs_diff(&CovarianceMatrix2::new(E, 0.0, 1.0 / E)) < 1e-14);
    }

    #[test]
    fn covariance_elements_examples() {
        assert_eq!(
            covariance_elements(
                SqueezingParam::VACUUM,
                SqueezingParam::VACUUM,
                bs(0.9, 1.0, 2.0)
            ),
            CovarianceMatrix2::new(1.0, 0.0, 1.0)
        );
        // Δ_a = 0, Δ_b = 2φ1 = π
        let m = covariance_elements(sq(0.5, 0.0), sq(0.5, 0.0), bs(FRAC_PI_4, 0.0, FRAC_PI_2));
        assert!(m.max_abs_diff(&CovarianceMatrix2::new(1f64.cosh(), 0.0, 1f64.cosh())) < 1e-14);
        // Δ ∈ {0, π} kills m12
        for &(p0, p1, ca, cb) in &[
            (0.0, 0.0, 0.0, 0.0),
            (FRAC_PI_2, 0.0, 0.0, PI),
            (0.0, FRAC_PI_2, PI, 0.0),
        ] {
            let m = covariance_elements(sq(0.8, ca), sq(1.3, cb), bs(0.6, p0, p1));
            assert!(m.m12.abs() < 1e-14, "{}", m.m12);
        }
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta(&CovarianceMatrix2::new(1.0, 0.0, 1.0)).unwrap(), 1.0);
        assert_abs_diff_eq!(
            delta(&CovarianceMatrix2::new(E, 0.0, 1.0 / E)).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            delta(&CovarianceMatrix2::new(1f64.cosh(), 0.0, 1f64.cosh())).unwrap(),
            1.5430806348152437,
            epsilon = 1e-15
        );
        assert!(matches!(
            delta(&CovarianceMatrix2::new(0.5, 0.0, 1.0)),
            Err(Error::Unphysical { .. })
        ));
        // rounding noise just below one clamps
        assert_eq!(
            delta(&CovarianceMatrix2::new(1.0 - 1e-13, 0.0, 1.0)).unwrap(),
            1.0
        );
    }

    #[test]
    fn thermal_equivalent_examples() {
        let t = thermal_equivalent(1.0).unwrap();
        assert_eq!(t.entropy_nats, 0.0);
        assert!(t.beta.is_infinite());
        let t = thermal_equivalent(3.0).unwrap();
        assert_abs_diff_eq!(t.entropy_nats, 2.0 * LN_2, epsilon = 1e-14);
        assert_abs_diff_eq!((-t.beta).exp(), 0.5, epsilon = 1e-15);
        // δ = cosh 1: E = cosh²(½) ln cosh²(½) − sinh²(½) ln sinh²(½)
        let (c2, s2) = (0.5f64.cosh().powi(2), 0.5f64.sinh().powi(2));
        let t = thermal_equivalent(1f64.cosh()).unwrap();
        assert_abs_diff_eq!(t.entropy_nats, c2 * c2.ln() - s2 * s2.ln(), epsilon = 1e-14);
        assert_abs_diff_eq!(t.entropy_nats, 0.6594529592, epsilon = 1e-9);
        assert!(thermal_equivalent(0.9).is_err());
        assert!(thermal_equivalent(f64::NAN).is_err());
        assert_eq!(thermal_equivalent(1.0 - 1e-11).unwrap().entropy_nats, 0.0);
    }

    #[test]
    fn entanglement_examples() {
        for &(t, p0, p1) in &[(0.3, 0.0, 0.0), (FRAC_PI_4, 1.0, 2.0), (1.4, 5.0, 0.1)] {
            let e = entanglement(
                SqueezingParam::VACUUM,
                SqueezingParam::VACUUM,
                bs(t, p0, p1),
            );
            assert_eq!(e.entropy_nats, 0.0);
        }
        let e = entanglement(sq(1.2, 0.4), sq(0.7, 2.0), bs(0.0, 0.3, 0.9));
        assert!(e.entropy_nats < 1e-12);
        assert!((e.delta - 1.0).abs() < 1e-10);
        let e = entanglement(sq(0.5, 0.0), sq(0.5, 0.0), bs(FRAC_PI_4, 0.0, FRAC_PI_2));
        assert_abs_diff_eq!(e.delta, 1f64.cosh(), epsilon = 1e-14);
        assert_abs_diff_eq!(e.entropy_nats, 0.6594529592, epsilon = 1e-9);
    }

    #[test]
    fn char_fn_examples() {
        let vac = GaussianState::vacuum();
        assert_eq!(char_fn_eval(&vac, PhaseSpacePoint::default()), 1.0);
        let xi = PhaseSpacePoint::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        assert_abs_diff_eq!(char_fn_eval(&vac, xi), (-0.5f64).exp(), epsilon = 1e-16);
    }

    #[test]
    fn ppt_examples() {
        let vac = ppt_inseparable(&GaussianState::vacuum());
        assert_eq!(vac.verdict, PptVerdict::Separable);
        assert!(vac.lambda_min.abs() < PPT_TOL);
        let product = output_state(sq(0.9, 1.0), sq(0.4, 2.0), bs(0.0, 0.5, 0.5));
        assert_eq!(ppt_inseparable(&product).verdict, PptVerdict::Separable);
        let ent = output_state(sq(0.5, 0.0), sq(0.5, 0.0), bs(FRAC_PI_4, 0.0, FRAC_PI_2));
        let res = ppt_inseparable(&ent);
        assert_eq!(res.verdict, PptVerdict::Inseparable);
        assert!(res.lambda_min < 0.0);
    }

    #[test]
    fn closed_form_delta_matches_determinant() {
        let za = sq(0.7, 1.2);
        let zb = sq(1.1, 4.0);
        let b = bs(0.4, 2.2, 5.1);
        let det = covariance_elements(za, zb, b).det();
        assert_abs_diff_eq!(delta_squared_closed_form(za, zb, b), det, epsilon = 1e-12);
    }

    #[test]
    fn wrap_angle_handles_edges() {
        assert_eq!(wrap_angle(TAU), 0.0);
        assert_eq!(wrap_angle(-1e-300), 0.0);
        assert_abs_diff_eq!(wrap_angle(-FRAC_PI_2), 3.0 * FRAC_PI_2, epsilon = 1e-15);
    }
}

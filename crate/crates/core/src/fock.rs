//! Brute-force verifier in a truncated photon-number basis.
//!
//! Everything here is built from ladder-operator matrix elements and dense
//! linear algebra, without using the covariance formalism, so it can check
//! [`crate::gaussian`] independently.
//!
//! Inputs are truncated per mode at `n_max`. The beam splitter conserves the
//! total photon number, so it is exponentiated block by block on each
//! `n_a + n_b = N` sector for every `N ≤ 2 n_max`; the only approximation in
//! the output is the input tail, reported as the truncation budget.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::gaussian::{BeamSplitterParams, PhaseSpacePoint, SqueezingParam};

/// Largest truncation budget `squeeze_vacuum_fock` accepts.
pub const MAX_TRUNCATION_BUDGET: f64 = 1e-6;
/// Eigenvalues at or below this contribute nothing to the entropy.
pub const EIGEN_FLOOR: f64 = 1e-14;
/// More negative eigenvalues than this mean the input was not a density matrix.
pub const NEGATIVE_EIGEN_TOL: f64 = 1e-8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Maximum photon number kept per mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockCutoff {
    n_max: usize,
}

impl FockCutoff {
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max == 0 {
            return Err(Error::InvalidCutoff(n_max));
        }
        Ok(FockCutoff { n_max })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Single-mode dimension `n_max + 1`.
    pub fn dim(&self) -> usize {
        self.n_max + 1
    }

    /// Rule of thumb: `n_max + 1 ≥ 4 sinh² r + 10`.
    pub fn recommended_dim(r_max: f64) -> usize {
        (4.0 * r_max.sinh().powi(2) + 10.0).ceil() as usize
    }

    /// Logs a warning when the cutoff is below [`FockCutoff::recommended_dim`].
    pub fn is_recommended_for(&self, r_max: f64) -> bool {
        let ok = self.dim() >= Self::recommended_dim(r_max);
        if !ok {
            log::warn!(
                "cutoff n_max = {} is below the recommended {} for r = {r_max}",
                self.n_max,
                Self::recommended_dim(r_max) - 1
            );
        }
        ok
    }
}

/// Single-mode state vector in the Fock basis.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleModeState {
    pub amplitudes: DVector<Complex64>,
    /// `1 − ‖ψ‖²`, the probability discarded by truncation.
    pub truncation_budget: f64,
}

/// Two-mode state `ψ[n_a, n_b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeState {
    /// Row index is `n_a`, column index is `n_b`.
    pub amplitudes: DMatrix<Complex64>,
    pub truncation_budget: f64,
}

impl TwoModeState {
    /// Per-mode dimension.
    pub fn dim(&self) -> usize {
        self.amplitudes.nrows()
    }

    pub fn norm_squared(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    /// Amplitudes flattened in `|n_a⟩ ⊗ |n_b⟩` row-major order.
    pub fn to_row_major(&self) -> Vec<Complex64> {
        let d = self.dim();
        let mut out = Vec::with_capacity(d * d);
        for a in 0..d {
            for b in 0..self.amplitudes.ncols() {
                out.push(self.amplitudes[(a, b)]);
            }
        }
        out
    }

    pub fn from_row_major(dim: usize, amps: &[Complex64]) -> Self {
        assert_eq!(amps.len(), dim * dim, "amplitude count must be dim^2");
        let amplitudes = DMatrix::from_row_slice(dim, dim, amps);
        let truncation_budget = (1.0 - amplitudes.norm_squared()).max(0.0);
        TwoModeState {
            amplitudes,
            truncation_budget,
        }
    }

    pub fn product(a: &SingleModeState, b: &SingleModeState) -> Self {
        let amplitudes = &a.amplitudes * b.amplitudes.transpose();
        let kept = (1.0 - a.truncation_budget) * (1.0 - b.truncation_budget);
        TwoModeState {
            amplitudes,
            truncation_budget: (1.0 - kept).max(0.0),
        }
    }
}

/// Hermitian single-mode density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(pub DMatrix<Complex64>);

impl DensityMatrix {
    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        SymmetricEigen::new(self.0.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect()
    }

    /// `(⟨a†a⟩, ⟨a²⟩) = (Σ n ρ_nn, Σ √((n+1)(n+2)) ρ_{n+2,n})`.
    pub fn ladder_moments(&self) -> (f64, Complex64) {
        let rho = &self.0;
        let d = rho.nrows();
        let n_mean = (0..d).map(|n| n as f64 * rho[(n, n)].re).sum();
        let a2 = (0..d.saturating_sub(2))
            .map(|n| rho[(n + 2, n)] * (((n + 1) * (n + 2)) as f64).sqrt())
            .sum();
        (n_mean, a2)
    }

    /// Quadrature covariance in the slot order of [`crate::gaussian`]; see
    /// [`quadrature_moments`].
    pub fn quadrature_moments(&self) -> [[f64; 2]; 2] {
        moments_from_ladder(self.ladder_moments())
    }
}

/// Squeezed vacuum `S(ζ)|0⟩` truncated at `n_max`.
///
/// `c_{2n} = (−e^{iχ} tanh r)^n √((2n)!) / (2^n n! √cosh r)`, built with the
/// ratio `c_{2n+2}/c_{2n} = −e^{iχ} tanh r · √((2n+1)/(2n+2))`. Fails when
/// the discarded probability exceeds [`MAX_TRUNCATION_BUDGET`].
pub fn squeeze_vacuum_fock(zeta: SqueezingParam, cutoff: FockCutoff) -> Result<SingleModeState> {
    let state = squeeze_vacuum_fock_truncated(zeta, cutoff);
    if state.truncation_budget > MAX_TRUNCATION_BUDGET {
        return Err(Error::TruncationExceeded {
            budget: state.truncation_budget,
            limit: MAX_TRUNCATION_BUDGET,
        });
    }
    Ok(state)
}

/// As [`squeeze_vacuum_fock`] but never fails; the budget is only reported.
pub fn squeeze_vacuum_fock_truncated(zeta: SqueezingParam, cutoff: FockCutoff) -> SingleModeState {
    let dim = cutoff.dim();
    let mut amps = DVector::from_element(dim, ZERO);
    let ratio = -Complex64::from_polar(zeta.r().tanh(), zeta.chi());
    let mut c = Complex64::new(1.0 / zeta.r().cosh().sqrt(), 0.0);
    let mut n = 0usize;
    while 2 * n < dim {
        amps[2 * n] = c;
        let k = 2.0 * n as f64;
        c *= ratio * ((k + 1.0) / (k + 2.0)).sqrt();
        n += 1;
    }
    let truncation_budget = (1.0 - amps.norm_squared()).max(0.0);
    SingleModeState {
        amplitudes: amps,
        truncation_budget,
    }
}

/// `(⟨a†a⟩, ⟨a²⟩)` computed from Fock amplitudes.
pub fn ladder_moments(state: &SingleModeState) -> (f64, Complex64) {
    let c = &state.amplitudes;
    let n_mean = c
        .iter()
        .enumerate()
        .map(|(n, z)| n as f64 * z.norm_sqr())
        .sum();
    let a2 = (0..c.len().saturating_sub(2))
        .map(|n| c[n].conj() * c[n + 2] * (((n + 1) * (n + 2)) as f64).sqrt())
        .sum();
    (n_mean, a2)
}

/// Quadrature second moments in the covariance slot order of
/// [`crate::gaussian`]: `[[⟨P²⟩, ⟨{P,X}⟩/2], [⟨{P,X}⟩/2, ⟨X²⟩]]` with
/// `P = −i(a − a†)`, `X = a + a†`.
pub fn quadrature_moments(state: &SingleModeState) -> [[f64; 2]; 2] {
    moments_from_ladder(ladder_moments(state))
}

fn moments_from_ladder((n, a2): (f64, Complex64)) -> [[f64; 2]; 2] {
    let p2 = 2.0 * n + 1.0 - 2.0 * a2.re;
    let x2 = 2.0 * n + 1.0 + 2.0 * a2.re;
    let px = 2.0 * a2.im;
    [[p2, px], [px, x2]]
}

/// Beam-splitter unitary restricted to each total-photon-number sector.
///
/// `B = P · exp(θ(e^{iψ} a†b − e^{−iψ} a b†))` with `ψ = φ0 − φ1` and the
/// phase rotation `P = exp(−iφ0 n_a + iφ0 n_b)`. This gives
/// `B† a B = cosθ e^{−iφ0} a + sinθ e^{−iφ1} b`, i.e. creation operators move
/// by `M_B`.
#[derive(Debug, Clone)]
pub struct FockBeamSplitter {
    /// `blocks[N]` acts on the basis `|k, N − k⟩`, `k = 0..=N`.
    blocks: Vec<DMatrix<Complex64>>,
}

impl FockBeamSplitter {
    pub fn new(bs: BeamSplitterParams, max_total: usize, exec: Execution) -> Self {
        let psi = bs.phi0() - bs.phi1();
        let forward = Complex64::from_polar(bs.theta(), psi);
        let phi0 = bs.phi0();
        let blocks = exec.map_range(max_total + 1, |total| {
            let dim = total + 1;
            let mut gen = DMatrix::from_element(dim, dim, ZERO);
            for k in 0..total {
                // a†b |k, N−k⟩ = √((k+1)(N−k)) |k+1, N−k−1⟩
                let amp = (((k + 1) * (total - k)) as f64).sqrt();
                gen[(k + 1, k)] = forward * amp;
                gen[(k, k + 1)] = -forward.conj() * amp;
            }
            let mut block = gen.exp();
            for k in 0..dim {
                let phase = Complex64::from_polar(1.0, phi0 * (total as f64 - 2.0 * k as f64));
                for j in 0..dim {
                    block[(k, j)] *= phase;
                }
            }
            block
        });
        FockBeamSplitter { blocks }
    }

    pub fn max_total(&self) -> usize {
        self.blocks.len() - 1
    }

    pub fn block(&self, total: usize) -> &DMatrix<Complex64> {
        &self.blocks[total]
    }

    /// Applies the unitary to a state with per-mode dimension `d`; the result
    /// has per-mode dimension `2d − 1` so no output amplitude is dropped.
    ///
    /// Panics if the splitter was built for fewer than `2(d − 1)` photons.
    pub fn apply(&self, psi: &TwoModeState) -> TwoModeState {
        let d = psi.dim();
        let n_in = d - 1;
        assert!(
            self.max_total() >= 2 * n_in,
            "beam splitter built for {} photons, state needs {}",
            self.max_total(),
            2 * n_in
        );
        let d_out = 2 * n_in + 1;
        let mut out = DMatrix::from_element(d_out, d_out, ZERO);
        for total in 0..=2 * n_in {
            let lo = total.saturating_sub(n_in);
            let hi = total.min(n_in);
            let block = &self.blocks[total];
            for k_out in 0..=total {
                let mut acc = ZERO;
                for k_in in lo..=hi {
                    acc += block[(k_out, k_in)] * psi.amplitudes[(k_in, total - k_in)];
                }
                out[(k_out, total - k_out)] = acc;
            }
        }
        TwoModeState {
            amplitudes: out,
            truncation_budget: psi.truncation_budget,
        }
    }

    /// Dense matrix on the box basis `n_a, n_b ≤ dim − 1` (row-major index
    /// `n_a · dim + n_b`): the true matrix elements `⟨m|B|n⟩` for every pair of
    /// box states. Unitary on the sectors `n_a + n_b ≤ dim − 1`.
    pub fn to_dense(&self, dim: usize) -> DMatrix<Complex64> {
        let max_total = 2 * (dim - 1);
        assert!(self.max_total() >= max_total);
        let mut out = DMatrix::from_element(dim * dim, dim * dim, ZERO);
        for total in 0..=max_total {
            let lo = total.saturating_sub(dim - 1);
            let hi = total.min(dim - 1);
            for i in lo..=hi {
                for j in lo..=hi {
                    out[(i * dim + (total - i), j * dim + (total - j))] =
                        self.blocks[total][(i, j)];
                }
            }
        }
        out
    }
}

/// Dense beam-splitter unitary on the `(n_max + 1)²` box basis.
pub fn bs_unitary_fock(bs: BeamSplitterParams, cutoff: FockCutoff) -> DMatrix<Complex64> {
    FockBeamSplitter::new(bs, 2 * cutoff.n_max(), Execution::default()).to_dense(cutoff.dim())
}

/// Annihilation operator on one mode, truncated to `dim` levels.
pub fn annihilation(dim: usize) -> DMatrix<Complex64> {
    let mut a = DMatrix::from_element(dim, dim, ZERO);
    for n in 1..dim {
        a[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    a
}

/// `ρ_a = Tr_b |ψ⟩⟨ψ|`.
pub fn reduced_density_a(psi: &TwoModeState) -> DensityMatrix {
    DensityMatrix(&psi.amplitudes * psi.amplitudes.adjoint())
}

/// `ρ_b = Tr_a |ψ⟩⟨ψ|`.
pub fn reduced_density_b(psi: &TwoModeState) -> DensityMatrix {
    DensityMatrix(psi.amplitudes.transpose() * psi.amplitudes.conjugate())
}

/// `−Σ λ ln λ` over the eigenvalues of `ρ`, in nats.
pub fn vn_entropy(rho: &DensityMatrix) -> Result<f64> {
    let eig = rho.eigenvalues();
    let min = eig.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -NEGATIVE_EIGEN_TOL {
        return Err(Error::NotPositive(min));
    }
    Ok(eig
        .into_iter()
        .filter(|&l| l > EIGEN_FLOOR)
        .map(|l| -l * l.ln())
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleEntanglement {
    pub entropy_nats: f64,
    pub truncation_budget: f64,
}

/// Output state `B S_a S_b |00⟩` in the Fock basis (lenient truncation).
pub fn output_state_fock(
    za: SqueezingParam,
    zb: SqueezingParam,
    bs: BeamSplitterParams,
    cutoff: FockCutoff,
    exec: Execution,
) -> TwoModeState {
    let input = TwoModeState::product(
        &squeeze_vacuum_fock_truncated(za, cutoff),
        &squeeze_vacuum_fock_truncated(zb, cutoff),
    );
    FockBeamSplitter::new(bs, 2 * cutoff.n_max(), exec).apply(&input)
}

/// Entanglement entropy of the beam-splitter output computed by brute force.
pub fn oracle_entanglement(
    za: SqueezingParam,
    zb: SqueezingParam,
    bs: BeamSplitterParams,
    cutoff: FockCutoff,
) -> Result<OracleEntanglement> {
    squeeze_vacuum_fock(za, cutoff)?;
    squeeze_vacuum_fock(zb, cutoff)?;
    oracle_entanglement_unchecked(za, zb, bs, cutoff, Execution::default())
}

/// As [`oracle_entanglement`] without the truncation guard on the inputs.
pub fn oracle_entanglement_unchecked(
    za: SqueezingParam,
    zb: SqueezingParam,
    bs: BeamSplitterParams,
    cutoff: FockCutoff,
    exec: Execution,
) -> Result<OracleEntanglement> {
    let out = output_state_fock(za, zb, bs, cutoff, exec);
    let entropy_nats = vn_entropy(&reduced_density_a(&out))?;
    Ok(OracleEntanglement {
        entropy_nats,
        truncation_budget: out.truncation_budget,
    })
}

/// `D(ξ) = exp(ξ a − ξ* a†)` on `dim` levels.
pub fn displacement_matrix(xi: Complex64, dim: usize) -> DMatrix<Complex64> {
    let a = annihilation(dim);
    let gen = &a * xi - a.adjoint() * xi.conj();
    gen.exp()
}

/// `⟨ψ| D(ξ_a) ⊗ D(ξ_b) |ψ⟩`, the characteristic function of a pure state.
///
/// Accurate only while `|ξ|` is small compared with the cutoff (|ξ| ≤ 1 for
/// the cutoffs used in tests).
pub fn displacement_expectation(psi: &TwoModeState, xi: PhaseSpacePoint) -> Complex64 {
    let d = psi.dim();
    let da = displacement_matrix(xi.xi_a, d);
    let db = displacement_matrix(xi.xi_b, d);
    let moved = da * &psi.amplitudes * db.transpose();
    psi.amplitudes
        .iter()
        .zip(moved.iter())
        .map(|(p, m)| p.conj() * m)
        .sum()
}

/// `|n_a, n_b⟩` in a box of per-mode dimension `dim`.
pub fn number_state(n_a: usize, n_b: usize, dim: usize) -> TwoModeState {
    let mut amplitudes = DMatrix::from_element(dim, dim, ZERO);
    amplitudes[(n_a, n_b)] = ONE;
    TwoModeState {
        amplitudes,
        truncation_budget: 0.0,
    }
}

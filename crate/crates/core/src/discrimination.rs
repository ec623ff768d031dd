//! Generalized discrimination of the two probe outputs `|θ±⟩ = (cos θ, ±sin θ)`.
//!
//! The measurement family is parametrized by `γ = θ + φ` with
//! `φ ∈ [0, π/4 − θ]`: `φ = 0` is unambiguous (IDP) discrimination and
//! `φ = π/4 − θ` is the Helstrom measurement. Inputs are always equiprobable.
//!
//! `θ = 0` (identical inputs) is accepted: all formulas stay finite.

use std::f64::consts::FRAC_PI_4;

use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};
use crate::linalg::{self, ComplexMat, ComplexVec, C64};
use crate::STRUCTURAL_TOL;

/// Slack on the upper edge of `φ`, so that `ξ = 1` survives rounding.
pub const PHI_EDGE_TOL: f64 = 1e-12;

/// `cos 2γ`, with rounding residue at `γ = π/4` snapped to an exact zero.
pub fn cos_two_gamma(gamma: f64) -> f64 {
    let c = (2.0 * gamma).cos();
    if c.abs() < 1e-15 {
        0.0
    } else {
        c
    }
}

/// Map the characteristic ratio `ξ ∈ [0, 1]` to `φ = ξ·(π/4 − θ)`.
pub fn xi_to_phi(xi: f64, theta: f64) -> Result<f64> {
    check_range("xi", xi, 0.0, 1.0)?;
    check_range("theta", theta, 0.0, FRAC_PI_4)?;
    Ok(xi * (FRAC_PI_4 - theta))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscriminationConfig {
    theta: f64,
    phi: f64,
}

impl DiscriminationConfig {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        check_range("theta", theta, 0.0, FRAC_PI_4)?;
        let max_phi = FRAC_PI_4 - theta;
        check_range("phi", phi, 0.0, max_phi + PHI_EDGE_TOL)?;
        Ok(Self {
            theta,
            phi: phi.min(max_phi),
        })
    }

    pub fn from_xi(theta: f64, xi: f64) -> Result<Self> {
        Self::new(theta, xi_to_phi(xi, theta)?)
    }

    pub fn helstrom(theta: f64) -> Result<Self> {
        Self::from_xi(theta, 1.0)
    }

    pub fn unambiguous(theta: f64) -> Result<Self> {
        Self::from_xi(theta, 0.0)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn gamma(&self) -> f64 {
        self.theta + self.phi
    }

    /// `η = cos 2γ ∈ [0, cos 2θ]`.
    pub fn eta(&self) -> f64 {
        cos_two_gamma(self.gamma()).max(0.0)
    }
}

/// Three-outcome measurement `{M₊, M₋, M_?}` on a qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    pub m_plus: ComplexMat,
    pub m_minus: ComplexMat,
    pub m_inconclusive: ComplexMat,
}

impl Povm {
    pub fn elements(&self) -> [&ComplexMat; 3] {
        [&self.m_plus, &self.m_minus, &self.m_inconclusive]
    }

    /// `max |(M₊ + M₋ + M_? − I)_ij|`.
    pub fn completeness_residual(&self) -> f64 {
        let sum = self
            .m_plus
            .add(&self.m_minus)
            .and_then(|s| s.add(&self.m_inconclusive))
            .expect("2x2 elements");
        sum.max_abs_diff(&ComplexMat::identity(2).expect("2x2"))
            .expect("2x2")
    }

    /// Smallest eigenvalue over all elements; negative means not PSD.
    pub fn min_eigenvalue(&self) -> f64 {
        self.elements()
            .iter()
            .map(|m| linalg::min_eigenvalue(m, STRUCTURAL_TOL).expect("Hermitian by construction"))
            .fold(f64::INFINITY, f64::min)
    }
}

/// The measurement kets `|γ₊⟩, |γ₋⟩, |γ_?⟩` in the `{|+⟩, |−⟩}` basis.
pub fn measurement_kets(gamma: f64) -> [ComplexVec; 3] {
    let (s, c) = gamma.sin_cos();
    [
        ComplexVec::from_real(&[s, c]).expect("finite"),
        ComplexVec::from_real(&[s, -c]).expect("finite"),
        ComplexVec::from_real(&[1.0, 0.0]).expect("finite"),
    ]
}

// No range check on γ; γ > π/4 yields a negative M_? weight.
fn povm_for_gamma(gamma: f64) -> Povm {
    let cos2g = cos_two_gamma(gamma);
    let norm = 1.0 + cos2g;
    let [gp, gm, gq] = measurement_kets(gamma);
    let proj = |k: &ComplexVec, w: f64| {
        ComplexMat::outer(k, k)
            .expect("2x2")
            .scale(C64::new(w, 0.0))
    };
    Povm {
        m_plus: proj(&gp, 1.0 / norm),
        m_minus: proj(&gm, 1.0 / norm),
        m_inconclusive: proj(&gq, 2.0 * cos2g / norm),
    }
}

/// POVM for a given `γ ∈ [0, π/4]`.
pub fn povm_from_gamma(gamma: f64) -> Result<Povm> {
    check_range("gamma", gamma, 0.0, FRAC_PI_4)?;
    Ok(povm_for_gamma(gamma))
}

pub fn build_povm(cfg: &DiscriminationConfig) -> Povm {
    povm_for_gamma(cfg.gamma())
}

/// Average success/error/inconclusive probabilities under equal priors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutcomeProbs {
    pub q_success: f64,
    pub q_error: f64,
    pub q_inconclusive: f64,
}

impl OutcomeProbs {
    pub fn new(q_success: f64, q_error: f64, q_inconclusive: f64) -> Result<Self> {
        for (name, v) in [
            ("q_success", q_success),
            ("q_error", q_error),
            ("q_inconclusive", q_inconclusive),
        ] {
            check_range(name, v, 0.0, 1.0)?;
        }
        let total = q_success + q_error + q_inconclusive;
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidDistribution(format!(
                "outcome probabilities sum to {total}"
            )));
        }
        Ok(Self {
            q_success,
            q_error,
            q_inconclusive,
        })
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.q_success, self.q_error, self.q_inconclusive]
    }
}

pub fn outcome_probs(cfg: &DiscriminationConfig) -> OutcomeProbs {
    let theta = cfg.theta;
    let phi = cfg.phi;
    let cos2g = cos_two_gamma(cfg.gamma()).max(0.0);
    let norm = 1.0 + cos2g;
    OutcomeProbs {
        q_success: (2.0 * theta + phi).sin().powi(2) / norm,
        q_error: phi.sin().powi(2) / norm,
        q_inconclusive: 2.0 * cos2g * theta.cos().powi(2) / norm,
    }
}

/// Same as [`outcome_probs`] but with an explicit prior for `|θ₊⟩`; only the
/// symmetric prior ½ is supported.
pub fn outcome_probs_with_prior(cfg: &DiscriminationConfig, prior_plus: f64) -> Result<OutcomeProbs> {
    if prior_plus != 0.5 {
        return Err(Error::Unsupported(format!(
            "prior {prior_plus} for |θ+⟩; the measurement is optimal only for equal priors"
        )));
    }
    Ok(outcome_probs(cfg))
}

/// Lower bound `½(1 − Q_? − sin 2θ·√(1 − Q_?/cos²θ))` on the error probability
/// at a given inconclusive rate.
pub fn error_lower_bound(theta: f64, q_inconclusive: f64) -> Result<f64> {
    check_range("theta", theta, 0.0, FRAC_PI_4)?;
    check_range("q_inconclusive", q_inconclusive, 0.0, 1.0)?;
    let radicand = 1.0 - q_inconclusive / theta.cos().powi(2);
    if radicand < -1e-12 {
        return Err(Error::Domain(format!(
            "Q_? = {q_inconclusive} exceeds cos²θ = {}",
            theta.cos().powi(2)
        )));
    }
    Ok(0.5 * (1.0 - q_inconclusive - (2.0 * theta).sin() * radicand.max(0.0).sqrt()))
}

/// The input pair `|θ₊⟩, |θ₋⟩`.
pub fn input_states(theta: f64) -> [ComplexVec; 2] {
    let (s, c) = theta.sin_cos();
    [
        ComplexVec::from_real(&[c, s]).expect("finite"),
        ComplexVec::from_real(&[c, -s]).expect("finite"),
    ]
}

/// Validate a qubit density matrix.
pub fn check_density_matrix(rho: &ComplexMat) -> Result<()> {
    if rho.rows() != 2 || rho.cols() != 2 {
        return Err(Error::InvalidDensityMatrix(format!(
            "expected 2x2, got {}x{}",
            rho.rows(),
            rho.cols()
        )));
    }
    let herm = rho.hermitian_deviation()?;
    if herm > STRUCTURAL_TOL {
        return Err(Error::InvalidDensityMatrix(format!("not Hermitian ({herm:e})")));
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > STRUCTURAL_TOL || tr.im.abs() > STRUCTURAL_TOL {
        return Err(Error::InvalidDensityMatrix(format!("trace {tr}")));
    }
    if !linalg::is_psd(rho, STRUCTURAL_TOL)? {
        return Err(Error::InvalidDensityMatrix("not positive semidefinite".into()));
    }
    Ok(())
}

/// `(tr M₊ρ, tr M₋ρ, tr M_?ρ)`.
pub fn born_probs(povm: &Povm, rho: &ComplexMat) -> Result<[f64; 3]> {
    check_density_matrix(rho)?;
    let mut out = [0.0; 3];
    for (slot, m) in out.iter_mut().zip(povm.elements()) {
        *slot = m.matmul(rho)?.trace().re.max(0.0);
    }
    Ok(out)
}

/// Born probabilities for a pure state, `⟨ψ|M_i|ψ⟩`.
pub fn born_probs_pure(povm: &Povm, psi: &ComplexVec) -> Result<[f64; 3]> {
    let mut out = [0.0; 3];
    for (slot, m) in out.iter_mut().zip(povm.elements()) {
        *slot = linalg::inner_product(psi, &m.apply(psi)?)?.re.max(0.0);
    }
    Ok(out)
}

//! Entropic uncertainty bounds for the three-outcome discrimination POVM.
//!
//! The POVM is realized projectively in three dimensions through a family of
//! Naimark extensions `{|w̃₊(φ)⟩, |w̃₋(φ)⟩, |w̃_?(φ)⟩}`; two extensions with
//! phases `φ, φ′` play the role of two orthonormal bases, and the bounds follow
//! from their overlap matrix `W`. Everything is parametrized by
//! `η = cos 2γ ∈ [0, 1]`.
//!
//! Closed forms ([`f_eta`], [`c2_eta`]) are certified against a direct phase
//! search ([`optimize_s_max`]): an exhaustive 720×720 grid followed by
//! coordinate descent.

use std::f64::consts::{FRAC_PI_4, TAU};

use itertools_free::combinations;
use serde::{Deserialize, Serialize};

use crate::discrimination::{cos_two_gamma, povm_from_gamma, OutcomeProbs};
use crate::entropy::{eve_outcome_entropy, renyi_entropy, shannon_entropy, Distribution, Order};
use crate::error::{check_range, Error, Result};
use crate::linalg::{self, ComplexMat, ComplexVec, C64};

/// Knots of the piecewise closed forms.
pub const ETA_KNOTS: [f64; 2] = [0.2, 0.5];

/// Grid points per phase in [`optimize_s_max`].
pub const PHASE_GRID: usize = 720;

/// Coordinate-descent stops once the step falls below this.
pub const REFINE_STEP: f64 = 1e-8;

/// Unitarity tolerance accepted by [`zeta_coefficients`].
pub const ZETA_UNITARY_TOL: f64 = 1e-8;

/// `η = cos 2γ`.
pub fn eta_from_gamma(gamma: f64) -> f64 {
    cos_two_gamma(gamma).max(0.0)
}

/// `γ = ½ arccos η`.
pub fn gamma_from_eta(eta: f64) -> Result<f64> {
    check_range("eta", eta, 0.0, 1.0)?;
    Ok(0.5 * eta.acos())
}

/// One Naimark extension of the POVM: an orthonormal basis of C³ whose
/// projections onto the first two coordinates reproduce the POVM elements.
#[derive(Debug, Clone, PartialEq)]
pub struct NaimarkExtension {
    pub gamma: f64,
    pub eta: f64,
    pub phase: f64,
    /// `w̃₊, w̃₋, w̃_?` in that order.
    pub basis: [ComplexVec; 3],
}

pub fn naimark_basis(gamma: f64, phase: f64) -> Result<NaimarkExtension> {
    check_range("gamma", gamma, 0.0, FRAC_PI_4)?;
    if !phase.is_finite() {
        return Err(Error::NonFinite);
    }
    let eta = eta_from_gamma(gamma);
    let n = 1.0 / (1.0 + eta).sqrt();
    let (s, c) = gamma.sin_cos();
    let e = C64::from_polar(1.0, phase);
    let third = e * (eta.sqrt() * n);
    let third_q = e * (-(1.0 - eta).sqrt() * n);
    let ket = |a: f64, b: f64, z: C64| {
        ComplexVec::new(vec![C64::new(a, 0.0), C64::new(b, 0.0), z]).expect("finite")
    };
    Ok(NaimarkExtension {
        gamma,
        eta,
        phase: phase.rem_euclid(TAU),
        basis: [
            ket(s * n, c * n, third),
            ket(s * n, -c * n, third),
            ket((2.0 * eta).sqrt() * n, 0.0, third_q),
        ],
    })
}

/// `w_ij = ⟨w̃_i(φ)|w̃_j(φ′)⟩`.
pub fn overlap_matrix(e1: &NaimarkExtension, e2: &NaimarkExtension) -> Result<ComplexMat> {
    if (e1.gamma - e2.gamma).abs() > 1e-12 {
        return Err(Error::Domain(format!(
            "extensions of different POVMs (γ = {} vs {})",
            e1.gamma, e2.gamma
        )));
    }
    let mut data = Vec::with_capacity(9);
    for a in &e1.basis {
        for b in &e2.basis {
            data.push(linalg::inner_product(a, b)?);
        }
    }
    ComplexMat::new(3, 3, data)
}

fn sorted_moduli(w: &ComplexMat) -> Vec<f64> {
    let mut m: Vec<f64> = w.entries().iter().map(|z| z.norm()).collect();
    m.sort_by(|a, b| b.total_cmp(a));
    m
}

/// `max_ij |w_ij|`.
pub fn s_max(w: &ComplexMat) -> f64 {
    w.max_modulus()
}

/// Second element of the descending multiset of entry moduli (ties count).
pub fn s_second(w: &ComplexMat) -> Result<f64> {
    sorted_moduli(w)
        .get(1)
        .copied()
        .ok_or(Error::Empty("s_second needs at least two entries"))
}

/// Largest entry modulus strictly below `s_max` (by more than `tol`);
/// equals `s_max` when all moduli coincide.
pub fn s_second_distinct(w: &ComplexMat, tol: f64) -> Result<f64> {
    let m = sorted_moduli(w);
    if m.len() < 2 {
        return Err(Error::Empty("s_second_distinct needs at least two entries"));
    }
    Ok(m.iter().copied().find(|&x| x < m[0] - tol).unwrap_or(m[0]))
}

/// Entry moduli of `W(φ, φ′)` without building the extensions; only
/// `Δ = φ′ − φ` matters.
fn overlap_moduli(eta: f64, gamma: f64, delta: f64) -> [f64; 9] {
    let n2 = 1.0 / (1.0 + eta);
    let (s, c) = gamma.sin_cos();
    let real = [[s, c], [s, -c], [(2.0 * eta).sqrt(), 0.0]];
    let anc = [eta.sqrt(), eta.sqrt(), -(1.0 - eta).sqrt()];
    let e = C64::from_polar(1.0, delta);
    let mut out = [0.0; 9];
    for i in 0..3 {
        for j in 0..3 {
            let r = real[i][0] * real[j][0] + real[i][1] * real[j][1];
            out[i * 3 + j] = ((C64::new(r, 0.0) + e * (anc[i] * anc[j])) * n2).norm();
        }
    }
    out
}

fn s_max_at(eta: f64, gamma: f64, phi: f64, phi_prime: f64) -> f64 {
    overlap_moduli(eta, gamma, phi_prime - phi)
        .into_iter()
        .fold(0.0, f64::max)
}

/// Result of the phase search.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseOptimum {
    pub eta: f64,
    pub s_max: f64,
    pub phi: f64,
    pub phi_prime: f64,
    /// Overlap matrix at the optimal phases.
    pub overlap: ComplexMat,
}

/// Minimize `s_max` of the overlap matrix over both extension phases.
///
/// Exhaustive [`PHASE_GRID`]² grid (first minimum in row-major order wins),
/// then coordinate descent with step halving down to [`REFINE_STEP`].
pub fn optimize_s_max(eta: f64) -> Result<PhaseOptimum> {
    let gamma = gamma_from_eta(eta)?;
    let h = TAU / PHASE_GRID as f64;
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for a in 0..PHASE_GRID {
        let phi = a as f64 * h;
        for b in 0..PHASE_GRID {
            let phi_prime = b as f64 * h;
            let v = s_max_at(eta, gamma, phi, phi_prime);
            if v < best.0 {
                best = (v, phi, phi_prime);
            }
        }
    }
    let (mut val, mut phi, mut phi_prime) = best;
    let mut step = h;
    while step >= REFINE_STEP {
        let mut improved = false;
        for (dp, dq) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
            let v = s_max_at(eta, gamma, phi + dp, phi_prime + dq);
            if v < val {
                val = v;
                phi += dp;
                phi_prime += dq;
                improved = true;
                break;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    let phi = phi.rem_euclid(TAU);
    let phi_prime = phi_prime.rem_euclid(TAU);
    let overlap = overlap_matrix(&naimark_basis(gamma, phi)?, &naimark_basis(gamma, phi_prime)?)?;
    Ok(PhaseOptimum {
        eta,
        s_max: s_max(&overlap),
        phi,
        phi_prime,
        overlap,
    })
}

/// The three branch expressions of `f(η)`:
/// `(1+η)/(1−η)`, `√((2−η)/(1−η))`, `√((2−η)/η)`.
pub fn f_eta_branches(eta: f64) -> [f64; 3] {
    [
        (1.0 + eta) / (1.0 - eta),
        ((2.0 - eta) / (1.0 - eta)).sqrt(),
        ((2.0 - eta) / eta).sqrt(),
    ]
}

fn branch_index(eta: f64) -> usize {
    if eta <= ETA_KNOTS[0] {
        0
    } else if eta <= ETA_KNOTS[1] {
        1
    } else {
        2
    }
}

/// `f(η)`, the inverse of the optimal `s_max`.
pub fn f_eta(eta: f64) -> Result<f64> {
    check_range("eta", eta, 0.0, 1.0)?;
    Ok(f_eta_branches(eta)[branch_index(eta)])
}

/// The three branch expressions of `c₂(η)`:
/// `√(1+2η−3η²)/(1+η)`, `√((2−2η)/(2−η))`, `1/√(2−η)`.
pub fn c2_eta_branches(eta: f64) -> [f64; 3] {
    [
        (1.0 + 2.0 * eta - 3.0 * eta * eta).max(0.0).sqrt() / (1.0 + eta),
        ((2.0 - 2.0 * eta) / (2.0 - eta)).sqrt(),
        1.0 / (2.0 - eta).sqrt(),
    ]
}

/// `c₂(η)`, the second majorization coefficient `ζ₂` at the optimal phases.
pub fn c2_eta(eta: f64) -> Result<f64> {
    check_range("eta", eta, 0.0, 1.0)?;
    Ok(c2_eta_branches(eta)[branch_index(eta)])
}

/// Maassen–Uffink bound `2 log₂ f(η)` on `R_α(M;ρ) + R_β(M;ρ)`, `1/α + 1/β = 2`.
pub fn mu_bound(eta: f64) -> Result<f64> {
    Ok(2.0 * f_eta(eta)?.log2())
}

/// Coles–Piani lower bound on the Shannon entropy `H(M;ρ)`:
/// `log₂ f(η) + η U(0.2−η)/(2(1+η)) · log₂((1−η)/(4η))`.
///
/// `U` is 0 at the knot η = 0.2 itself and the correction is 0 at η = 0.
pub fn coles_piani_bound(eta: f64) -> Result<f64> {
    let base = f_eta(eta)?.log2();
    if eta <= 0.0 || eta >= ETA_KNOTS[0] {
        return Ok(base);
    }
    Ok(base + eta / (2.0 * (1.0 + eta)) * ((1.0 - eta) / (4.0 * eta)).log2())
}

/// Two-basis Coles–Piani bound on `H(G;ρ) + H(G′;ρ)`:
/// `−2 log₂ s_max + (1 − s_max) log₂(s_max / s₂)`.
pub fn coles_piani_pair_bound(s_max: f64, s_second: f64) -> f64 {
    -2.0 * s_max.log2() + (1.0 - s_max) * (s_max / s_second).log2()
}

/// `ζ_k = max ‖A‖_∞` over submatrices `A` of size `r×r′` with `r + r′ = k + 1`,
/// for `k = 1..=d`.
pub fn zeta_coefficients(w: &ComplexMat) -> Result<Vec<f64>> {
    let dev = linalg::unitarity_deviation(w)?;
    if dev > ZETA_UNITARY_TOL {
        return Err(Error::NotUnitary(dev));
    }
    let d = w.rows();
    let mut zeta = Vec::with_capacity(d);
    for k in 1..=d {
        let mut best: f64 = 0.0;
        for r in 1..=d {
            let Some(rp) = (k + 1).checked_sub(r) else {
                continue;
            };
            if rp == 0 || rp > d {
                continue;
            }
            for rows in combinations(d, r) {
                for cols in combinations(d, rp) {
                    best = best.max(linalg::spectral_norm(&w.submatrix(&rows, &cols)?));
                }
            }
        }
        zeta.push(best);
    }
    Ok(zeta)
}

/// `ζ` together with the majorizing vectors
/// `ω = (ζ₁, ζ₂−ζ₁, …)` and `ω′ = (ξ₁, ξ₂−ξ₁, …)`, `ξ_k = (1+ζ_k)²/4`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MajorizationData {
    pub zeta: Vec<f64>,
    pub omega: Distribution,
    pub omega_prime: Distribution,
}

fn differences(v: &[f64]) -> Vec<f64> {
    let mut prev = 0.0;
    v.iter()
        .map(|&x| {
            let d = (x - prev).max(0.0);
            prev = x;
            d
        })
        .collect()
}

pub fn majorization_data(zeta: &[f64]) -> Result<MajorizationData> {
    if zeta.is_empty() {
        return Err(Error::Empty("zeta"));
    }
    if zeta.iter().any(|z| !z.is_finite() || *z <= 0.0 || *z > 1.0 + 1e-8) {
        return Err(Error::Domain(format!("ζ entries must lie in (0, 1]: {zeta:?}")));
    }
    if zeta.windows(2).any(|w| w[1] < w[0] - 1e-12) {
        return Err(Error::Domain(format!("ζ must be nondecreasing: {zeta:?}")));
    }
    let last = *zeta.last().expect("nonempty");
    if (last - 1.0).abs() > 1e-8 {
        return Err(Error::Domain(format!("last ζ must be 1, got {last}")));
    }
    let mut z: Vec<f64> = zeta.iter().map(|x| x.min(1.0)).collect();
    *z.last_mut().expect("nonempty") = 1.0;
    let xi: Vec<f64> = z.iter().map(|x| (1.0 + x).powi(2) / 4.0).collect();
    Ok(MajorizationData {
        omega: Distribution::new(differences(&z))?,
        omega_prime: Distribution::new(differences(&xi))?,
        zeta: z,
    })
}

/// Majorization data from the closed forms `ζ = (1/f(η), c₂(η), 1)`.
pub fn optimal_majorization_data(eta: f64) -> Result<MajorizationData> {
    majorization_data(&[1.0 / f_eta(eta)?, c2_eta(eta)?, 1.0])
}

/// Direct-sum bound `½ R_α(ω)` (valid for `α ≤ 1`).
pub fn direct_sum_bound(md: &MajorizationData, order: Order) -> Result<f64> {
    match order {
        Order::Shannon => Ok(0.5 * shannon_entropy(&md.omega)),
        Order::Finite(a) if a < 1.0 => Ok(0.5 * renyi_entropy(&md.omega, order)),
        _ => Err(Error::Unsupported(format!("direct-sum bound ½R_α(ω) at order {order}"))),
    }
}

/// Tensor-product bound `½ R_α(ω′)` for `α > 1`, including `α = ∞`.
pub fn tensor_product_bound(md: &MajorizationData, order: Order) -> Result<f64> {
    match order {
        Order::Finite(a) if a > 1.0 => Ok(0.5 * renyi_entropy(&md.omega_prime, order)),
        Order::Infinity => Ok(0.5 * renyi_entropy(&md.omega_prime, order)),
        _ => Err(Error::Unsupported(format!("tensor-product bound at order {order}"))),
    }
}

/// Direct-sum bound for `α > 1`: `(1−α)⁻¹ log₂(½ + ½ Σ ω_i^α)`.
///
/// At `α = ∞` the limit is 0: the sum tends to 0 (or to 1 when `ω` is a
/// point mass), so the logarithm stays bounded while `1−α` diverges.
pub fn direct_sum_high_order_bound(md: &MajorizationData, order: Order) -> Result<f64> {
    match order {
        Order::Finite(a) if a > 1.0 => {
            let s: f64 = md.omega.probs().iter().map(|w| w.powf(a)).sum();
            Ok((0.5 + 0.5 * s).log2() / (1.0 - a))
        }
        Order::Infinity => Ok(0.0),
        _ => Err(Error::Unsupported(format!("high-order direct-sum bound at order {order}"))),
    }
}

/// Lower bound on `R_α(M;ρ)`: `½R_α(ω)` for `α ≤ 1`, otherwise the larger of
/// the tensor-product and high-order direct-sum bounds.
pub fn majorization_entropy_bound(md: &MajorizationData, order: Order) -> Result<f64> {
    match order {
        Order::Shannon => direct_sum_bound(md, order),
        Order::Finite(a) if a < 1.0 => direct_sum_bound(md, order),
        _ => Ok(tensor_product_bound(md, order)?.max(direct_sum_high_order_bound(md, order)?)),
    }
}

/// Upper bound on `I(B′,E′)`:
/// `H(E′) − max{coles_piani_bound(η), ½H(ω)}`.
pub fn mutual_info_upper_bound(q: &OutcomeProbs, eta: f64) -> Result<f64> {
    let md = optimal_majorization_data(eta)?;
    let lower = coles_piani_bound(eta)?.max(0.5 * shannon_entropy(&md.omega));
    Ok(eve_outcome_entropy(q) - lower)
}

/// Outcome distribution of the POVM at `η` on the completely mixed qubit:
/// `(1/(2(1+η)), 1/(2(1+η)), η/(1+η))`.
pub fn mixed_state_probs(eta: f64) -> Result<Distribution> {
    check_range("eta", eta, 0.0, 1.0)?;
    let a = 0.5 / (1.0 + eta);
    Distribution::new(vec![a, a, eta / (1.0 + eta)])
}

/// Born probabilities of the POVM at `η` for a qubit density matrix.
pub fn povm_distribution(eta: f64, rho: &ComplexMat) -> Result<Distribution> {
    let povm = povm_from_gamma(gamma_from_eta(eta)?)?;
    let p = crate::discrimination::born_probs(&povm, rho)?;
    let total: f64 = p.iter().sum();
    Distribution::new(p.iter().map(|x| x / total).collect())
}

/// `x ≺ y`: after sorting both descending and zero-padding to equal length,
/// every partial sum of `x` is at most that of `y` (within `tol`).
pub fn is_majorized(x: &[f64], y: &[f64], tol: f64) -> bool {
    let n = x.len().max(y.len());
    let sorted = |v: &[f64]| {
        let mut s = v.to_vec();
        s.sort_by(|a, b| b.total_cmp(a));
        s.resize(n, 0.0);
        s
    };
    let (xs, ys) = (sorted(x), sorted(y));
    let (mut sx, mut sy) = (0.0, 0.0);
    for k in 0..n {
        sx += xs[k];
        sy += ys[k];
        if sx > sy + tol {
            return false;
        }
    }
    true
}

/// `p ⊗ q` as a flat vector.
pub fn tensor_product(p: &[f64], q: &[f64]) -> Vec<f64> {
    p.iter().flat_map(|a| q.iter().map(move |b| a * b)).collect()
}

/// `p ⊕ q` (concatenation).
pub fn direct_sum(p: &[f64], q: &[f64]) -> Vec<f64> {
    p.iter().chain(q).copied().collect()
}

/// The phase-search angle grid is `2π / PHASE_GRID`; exposed for tolerance
/// reasoning in callers.
pub fn phase_grid_step() -> f64 {
    TAU / PHASE_GRID as f64
}

mod itertools_free {
    /// All increasing `k`-subsets of `0..n`.
    pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
        fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == k {
                out.push(cur.clone());
                return;
            }
            for i in start..n {
                cur.push(i);
                rec(i + 1, n, k, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        if k <= n {
            rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
        }
        out
    }
}

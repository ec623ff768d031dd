//! Shannon and Rényi entropies, conditional Rényi variants and the
//! mutual-information measures built from them.
//!
//! Every quantity is in bits. `0·log 0` is taken as 0 and conditional
//! columns with zero marginal contribute nothing.
//!
//! Three conditional Rényi entropies are supported:
//!
//! | Variant | Definition |
//! |---------|------------|
//! | 1 | `Σ_y p(y) R_α(X|y)` |
//! | 2 | `R_α(X,Y) − R_α(Y)` (chain rule by construction) |
//! | 4 | `(1−α)⁻¹ log Σ_y p(y) Σ_x p(x|y)^α` |
//!
//! The α-mutual information of each variant is `R_α(X) − R_α^{(v)}(X|Y)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::discrimination::OutcomeProbs;
use crate::error::{check_range, Error, Result};

/// Orders within this distance of 1 are treated as the Shannon limit.
pub const SHANNON_SNAP: f64 = 1e-9;

const DIST_TOL: f64 = 1e-10;

/// Order of a Rényi quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Order {
    /// α = 1, the Shannon limit.
    Shannon,
    /// Finite α > 0, α ≠ 1.
    Finite(f64),
    /// α = ∞, min-entropy.
    Infinity,
}

impl Order {
    /// Classify a real order. Values within [`SHANNON_SNAP`] of 1 become
    /// [`Order::Shannon`]; `+∞` becomes [`Order::Infinity`].
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_nan() || alpha <= 0.0 {
            return Err(Error::OutOfRange {
                name: "alpha",
                value: alpha,
                min: 0.0,
                max: f64::INFINITY,
            });
        }
        Ok(if alpha == f64::INFINITY {
            Order::Infinity
        } else if (alpha - 1.0).abs() < SHANNON_SNAP {
            Order::Shannon
        } else {
            Order::Finite(alpha)
        })
    }

    pub fn value(self) -> f64 {
        match self {
            Order::Shannon => 1.0,
            Order::Finite(a) => a,
            Order::Infinity => f64::INFINITY,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Shannon => write!(f, "1"),
            Order::Finite(a) => write!(f, "{a}"),
            Order::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for Order {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") {
            return Ok(Order::Infinity);
        }
        let alpha: f64 = t
            .parse()
            .map_err(|_| Error::Domain(format!("cannot parse order {s:?}")))?;
        Order::new(alpha)
    }
}

/// Probability vector summing to 1 within 1e−10.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    probs: Vec<f64>,
}

impl Distribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("empty".into()));
        }
        if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidDistribution(format!("entry {p}")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > DIST_TOL {
            return Err(Error::InvalidDistribution(format!("sums to {total}")));
        }
        Ok(Self { probs })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(vec![1.0 / n as f64; n])
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

fn xlog2x(p: f64) -> f64 {
    if p > 0.0 {
        p * p.log2()
    } else {
        0.0
    }
}

fn shannon_bits(probs: &[f64]) -> f64 {
    -probs.iter().copied().map(xlog2x).sum::<f64>()
}

/// `log₂ Σ p_i^α` evaluated as `α log₂ p_max + log₂ Σ (p_i/p_max)^α`.
fn log2_power_sum(probs: &[f64], alpha: f64) -> f64 {
    let pmax = probs.iter().copied().fold(0.0, f64::max);
    if pmax <= 0.0 {
        return f64::NEG_INFINITY;
    }
    let rest: f64 = probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| (p / pmax).powf(alpha))
        .sum();
    alpha * pmax.log2() + rest.log2()
}

fn renyi_bits(probs: &[f64], order: Order) -> f64 {
    match order {
        Order::Shannon => shannon_bits(probs),
        Order::Finite(a) => log2_power_sum(probs, a) / (1.0 - a),
        Order::Infinity => -probs.iter().copied().fold(0.0, f64::max).log2(),
    }
}

/// `H(X) = −Σ p log₂ p`.
pub fn shannon_entropy(d: &Distribution) -> f64 {
    shannon_bits(&d.probs)
}

/// `R_α(X) = (1−α)⁻¹ log₂ Σ p^α`, with the Shannon and min-entropy limits.
pub fn renyi_entropy(d: &Distribution, order: Order) -> f64 {
    renyi_bits(&d.probs, order)
}

/// `h(p) = −p log₂ p − (1−p) log₂(1−p)`.
pub fn binary_entropy(p: f64) -> Result<f64> {
    check_range("p", p, 0.0, 1.0)?;
    Ok(-xlog2x(p) - xlog2x(1.0 - p))
}

/// Asymptotic one-way key rate `max{1 − 2h(δ), 0}`.
pub fn shor_preskill_rate(delta: f64) -> Result<f64> {
    check_range("delta", delta, 0.0, 0.5)?;
    Ok((1.0 - 2.0 * binary_entropy(delta)?).max(0.0))
}

/// Which variable is conditioned on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    /// `X | Y`: Bob's bit `B′` given Eve's outcome `E′` (rows given columns).
    XGivenY,
    /// `Y | X`: Eve's outcome given Bob's bit (columns given rows).
    YGivenX,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConditionalVariant {
    First,
    Second,
    Fourth,
}

impl ConditionalVariant {
    pub const ALL: [ConditionalVariant; 3] = [
        ConditionalVariant::First,
        ConditionalVariant::Second,
        ConditionalVariant::Fourth,
    ];

    pub fn number(self) -> u8 {
        match self {
            ConditionalVariant::First => 1,
            ConditionalVariant::Second => 2,
            ConditionalVariant::Fourth => 4,
        }
    }
}

impl TryFrom<u8> for ConditionalVariant {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        match v {
            1 => Ok(ConditionalVariant::First),
            2 => Ok(ConditionalVariant::Second),
            4 => Ok(ConditionalVariant::Fourth),
            _ => Err(Error::Unsupported(format!("conditional variant {v}"))),
        }
    }
}

pub const ROWS: usize = 2;
pub const COLS: usize = 3;

/// Column labels of the joint table: Eve's guesses 0, 1 and the inconclusive `?`.
pub const EVE_LABELS: [&str; COLS] = ["0", "1", "?"];

/// 2×3 joint table `p(b′, e′)`, rows `b′ ∈ {0, 1}`, columns `e′ ∈ {0, 1, ?}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointDistribution {
    table: [[f64; COLS]; ROWS],
}

impl JointDistribution {
    pub fn new(table: [[f64; COLS]; ROWS]) -> Result<Self> {
        let flat = table.iter().flatten();
        if let Some(p) = flat.clone().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidDistribution(format!("entry {p}")));
        }
        let total: f64 = flat.sum();
        if (total - 1.0).abs() > DIST_TOL {
            return Err(Error::InvalidDistribution(format!("table sums to {total}")));
        }
        Ok(Self { table })
    }

    pub fn table(&self) -> &[[f64; COLS]; ROWS] {
        &self.table
    }

    pub fn get(&self, b: usize, e: usize) -> f64 {
        self.table[b][e]
    }

    /// `p(b′)`.
    pub fn row_marginal(&self) -> [f64; ROWS] {
        self.table.map(|row| row.iter().sum())
    }

    /// `p(e′)`.
    pub fn col_marginal(&self) -> [f64; COLS] {
        let mut m = [0.0; COLS];
        for row in &self.table {
            for (slot, p) in m.iter_mut().zip(row) {
                *slot += p;
            }
        }
        m
    }

    /// `p(b′ | e′)`; `None` when `p(e′) = 0`.
    pub fn row_given_col(&self, b: usize, e: usize) -> Option<f64> {
        let py = self.col_marginal()[e];
        (py > 0.0).then(|| self.table[b][e] / py)
    }

    /// `p(e′ | b′)`; `None` when `p(b′) = 0`.
    pub fn col_given_row(&self, e: usize, b: usize) -> Option<f64> {
        let px = self.row_marginal()[b];
        (px > 0.0).then(|| self.table[b][e] / px)
    }

    fn flat(&self) -> Vec<f64> {
        self.table.iter().flatten().copied().collect()
    }

    /// Conditioned-variable groups: each entry is `(p(y), [p(x, y) for x])`.
    fn groups(&self, dir: Direction) -> Vec<(f64, Vec<f64>)> {
        match dir {
            Direction::XGivenY => (0..COLS)
                .map(|e| {
                    let col: Vec<f64> = (0..ROWS).map(|b| self.table[b][e]).collect();
                    (col.iter().sum(), col)
                })
                .collect(),
            Direction::YGivenX => self
                .table
                .iter()
                .map(|row| (row.iter().sum(), row.to_vec()))
                .collect(),
        }
    }

    /// Marginal of the variable whose uncertainty is measured.
    fn target_marginal(&self, dir: Direction) -> Vec<f64> {
        match dir {
            Direction::XGivenY => self.row_marginal().to_vec(),
            Direction::YGivenX => self.col_marginal().to_vec(),
        }
    }

    fn conditioning_marginal(&self, dir: Direction) -> Vec<f64> {
        match dir {
            Direction::XGivenY => self.col_marginal().to_vec(),
            Direction::YGivenX => self.row_marginal().to_vec(),
        }
    }
}

fn conditional_slices(j: &JointDistribution, dir: Direction) -> impl Iterator<Item = (f64, Vec<f64>)> {
    j.groups(dir).into_iter().filter(|(py, _)| *py > 0.0).map(|(py, col)| {
        let cond = col.iter().map(|p| p / py).collect();
        (py, cond)
    })
}

/// `H(X) = H(B′)`.
pub fn entropy_x(j: &JointDistribution) -> f64 {
    shannon_bits(&j.row_marginal())
}

/// `H(Y) = H(E′)`.
pub fn entropy_y(j: &JointDistribution) -> f64 {
    shannon_bits(&j.col_marginal())
}

/// `H(X, Y)`.
pub fn joint_entropy(j: &JointDistribution) -> f64 {
    shannon_bits(&j.flat())
}

pub fn joint_renyi(j: &JointDistribution, order: Order) -> f64 {
    renyi_bits(&j.flat(), order)
}

/// Standard conditional entropy `Σ_y p(y) H(X|y)`.
pub fn conditional_std(j: &JointDistribution, dir: Direction) -> f64 {
    conditional_slices(j, dir)
        .map(|(py, cond)| py * shannon_bits(&cond))
        .sum()
}

/// Conditional Rényi entropy of the given variant.
///
/// At [`Order::Shannon`] every variant reduces to [`conditional_std`].
/// Variants 2 and 4 are not defined at [`Order::Infinity`].
pub fn conditional_renyi(
    j: &JointDistribution,
    order: Order,
    variant: ConditionalVariant,
    dir: Direction,
) -> Result<f64> {
    if order == Order::Shannon {
        return Ok(conditional_std(j, dir));
    }
    match (variant, order) {
        (ConditionalVariant::First, _) => Ok(conditional_slices(j, dir)
            .map(|(py, cond)| py * renyi_bits(&cond, order))
            .sum()),
        (ConditionalVariant::Second, Order::Finite(_)) => {
            Ok(joint_renyi(j, order) - renyi_bits(&j.conditioning_marginal(dir), order))
        }
        (ConditionalVariant::Fourth, Order::Finite(a)) => {
            // log₂ Σ_y p(y) Σ_x p(x|y)^α, with each inner sum in log form.
            let terms: Vec<(f64, f64)> = conditional_slices(j, dir)
                .map(|(py, cond)| (py.log2(), log2_power_sum(&cond, a)))
                .collect();
            let peak = terms
                .iter()
                .map(|(lp, ls)| lp + ls)
                .fold(f64::NEG_INFINITY, f64::max);
            let sum: f64 = terms.iter().map(|(lp, ls)| (lp + ls - peak).exp2()).sum();
            Ok((peak + sum.log2()) / (1.0 - a))
        }
        (v, o) => Err(Error::Unsupported(format!(
            "conditional variant {} at order {o}",
            v.number()
        ))),
    }
}

/// `I(X,Y) = H(X) + H(Y) − H(X,Y)`.
pub fn mutual_information(j: &JointDistribution) -> f64 {
    entropy_x(j) + entropy_y(j) - joint_entropy(j)
}

/// `R_α(target) − R_α^{(v)}(target | other)`; in the probe analysis the target is
/// `B′` and the direction is [`Direction::XGivenY`].
pub fn alpha_mutual_information(
    j: &JointDistribution,
    order: Order,
    variant: ConditionalVariant,
    dir: Direction,
) -> Result<f64> {
    let marginal = renyi_bits(&j.target_marginal(dir), order);
    Ok(marginal - conditional_renyi(j, order, variant, dir)?)
}

/// Joint table of Bob's error-free sifted bit and Eve's outcome:
/// `p(j, j) = Q_S/2`, `p(j, 1−j) = Q_E/2`, `p(j, ?) = Q_?/2`.
pub fn joint_from_outcome_probs(q: &OutcomeProbs) -> JointDistribution {
    let (s, e, i) = (0.5 * q.q_success, 0.5 * q.q_error, 0.5 * q.q_inconclusive);
    JointDistribution::new([[s, e, i], [e, s, i]]).expect("outcome probabilities are normalized")
}

/// `p(b′ = j | e′ = j) = Q_S / (1 − Q_?)`; `None` when Eve is always inconclusive.
pub fn correct_guess_probability(q: &OutcomeProbs) -> Option<f64> {
    let conclusive = 1.0 - q.q_inconclusive;
    (conclusive > 0.0).then(|| (q.q_success / conclusive).min(1.0))
}

/// `H(E′) = 1 − Q_? + h(Q_?)`.
pub fn eve_outcome_entropy(q: &OutcomeProbs) -> f64 {
    let u = q.q_inconclusive.clamp(0.0, 1.0);
    1.0 - u + binary_entropy(u).expect("clamped")
}

/// First-type α-information in closed form, for finite α ≠ 1:
/// `(1−Q_?)[1 − log₂(Q_S^α + Q_E^α)/(1−α) + α log₂(1−Q_?)/(1−α)]`.
pub fn closed_form_i1(order: Order, q: &OutcomeProbs) -> Result<f64> {
    let Order::Finite(a) = order else {
        return Err(Error::Unsupported(format!(
            "closed form of the first-type measure needs a finite order ≠ 1, got {order}"
        )));
    };
    let conclusive = 1.0 - q.q_inconclusive;
    if conclusive <= 0.0 {
        return Ok(0.0);
    }
    let log_sum = log2_power_sum(&[q.q_success, q.q_error], a);
    Ok(conclusive * (1.0 - log_sum / (1.0 - a) + a * conclusive.log2() / (1.0 - a)))
}

/// α = ∞ limit of [`closed_form_i1`]:
/// `1 − Q_? − (1−Q_?) log₂(1−Q_?) + (1−Q_?) log₂ Q_S`.
pub fn closed_form_i1_inf(q: &OutcomeProbs) -> f64 {
    let conclusive = 1.0 - q.q_inconclusive;
    if conclusive <= 0.0 {
        return 0.0;
    }
    conclusive - conclusive * conclusive.log2() + conclusive * q.q_success.log2()
}

/// Standard mutual information in closed form:
/// `1 − Q_? − (1−Q_?) log₂(1−Q_?) + Q_S log₂ Q_S + Q_E log₂ Q_E`.
pub fn closed_form_i_std(q: &OutcomeProbs) -> f64 {
    let conclusive = 1.0 - q.q_inconclusive;
    conclusive - xlog2x(conclusive) + xlog2x(q.q_success) + xlog2x(q.q_error)
}

//! Command-line front end: long-format CSV sweeps of the information
//! measures, tables of the uncertainty bounds, Monte Carlo reports and POVM
//! dumps.
//!
//! Every `cmd_*` function returns a process exit code (0 success, 2 argument
//! error, 3 I/O error). The `*_csv` and `*_report` functions build the
//! output in memory and are what the tests exercise.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fpb_core::discrimination::{
    build_povm, error_lower_bound, outcome_probs, DiscriminationConfig, OutcomeProbs,
};
use fpb_core::entropy::{
    alpha_mutual_information, closed_form_i_std, correct_guess_probability,
    joint_from_outcome_probs, mutual_information, renyi_entropy, shannon_entropy,
    ConditionalVariant, Direction, JointDistribution, Order,
};
use fpb_core::linalg::ComplexMat;
use fpb_core::probe::{theta_from_error_rate, ProbeConfig, MAX_ERROR_RATE};
use fpb_core::simulator::{empirical_joint, run_session, SessionConfig, SessionTally};
use fpb_core::uncertainty::{
    coles_piani_bound, direct_sum_bound, direct_sum_high_order_bound, mixed_state_probs,
    mu_bound, mutual_info_upper_bound, optimal_majorization_data, tensor_product_bound,
};
use serde::Serialize;
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ARGS: i32 = 2;
pub const EXIT_IO: i32 = 3;

pub const CURVES_HEADER: &str = "p_e,xi,measure,order,value";
pub const BOUNDS_HEADER: &str =
    "x,mu_bound,coles_piani,maj_shannon,maj_alpha2_a,maj_alpha2_b,rho_star_H,rho_star_R2,i_std,i_upper";

pub const DEFAULT_P_E_MIN: f64 = 0.001;
pub const DEFAULT_P_E_MAX: f64 = MAX_ERROR_RATE;
pub const DEFAULT_P_E_STEPS: usize = 334;
pub const DEFAULT_ETA_STEPS: usize = 501;
pub const DEFAULT_XI: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_ROUNDS: u64 = 1_000_000;
pub const DEFAULT_SIM_P_E: f64 = 0.15;
pub const DEFAULT_SIM_XI: f64 = 0.5;

/// Multinomial agreement threshold in the simulate report.
pub const SIGMA_THRESHOLD: f64 = 4.0;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid argument: {0}")]
    Args(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] fpb_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Args(_) | CliError::Core(_) => EXIT_ARGS,
            CliError::Io { .. } => EXIT_IO,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

fn args_err(msg: impl Into<String>) -> CliError {
    CliError::Args(msg.into())
}

/// Decimal rendering with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        // normalizes −0 to 0
        format!("{:.16e}", x + 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    /// Standard mutual information.
    Std,
    /// First-type α-information.
    V1,
    /// Second-type α-information.
    V2,
    /// Fourth-type α-information.
    V4,
    /// First-type α-information at α = ∞.
    V1Inf,
    /// Conditional probability p(b′ = j | e′ = j).
    PCorrect,
}

impl Measure {
    pub const DEFAULTS: [Measure; 5] = [Measure::Std, Measure::V1, Measure::V2, Measure::V4, Measure::V1Inf];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Std => "std",
            Measure::V1 => "v1",
            Measure::V2 => "v2",
            Measure::V4 => "v4",
            Measure::V1Inf => "v1_inf",
            Measure::PCorrect => "p_correct",
        }
    }

    fn variant(self) -> Option<ConditionalVariant> {
        match self {
            Measure::V1 => Some(ConditionalVariant::First),
            Measure::V2 => Some(ConditionalVariant::Second),
            Measure::V4 => Some(ConditionalVariant::Fourth),
            _ => None,
        }
    }
}

impl FromStr for Measure {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        let t = s.trim().to_ascii_lowercase().replace('-', "_");
        [Measure::Std, Measure::V1, Measure::V2, Measure::V4, Measure::V1Inf, Measure::PCorrect]
            .into_iter()
            .find(|m| m.name() == t)
            .ok_or_else(|| args_err(format!("unknown measure {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum SweepVariable {
    /// Induced error rate P_E.
    #[value(name = "p-e", alias = "p_e", alias = "error-rate")]
    ErrorRate,
    /// POVM parameter η = cos 2γ.
    Eta,
}

/// Evenly spaced grid of `steps` points from `min` to `max` inclusive.
pub fn linspace(min: f64, max: f64, steps: usize) -> Vec<f64> {
    let last = (steps - 1) as f64;
    (0..steps)
        .map(|i| if i + 1 == steps { max } else { min + (max - min) * i as f64 / last })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
    pub xi_values: Vec<f64>,
    pub orders: Vec<Order>,
    pub measures: Vec<Measure>,
}

impl SweepSpec {
    pub fn default_curves() -> Self {
        Self {
            variable: SweepVariable::ErrorRate,
            min: DEFAULT_P_E_MIN,
            max: DEFAULT_P_E_MAX,
            steps: DEFAULT_P_E_STEPS,
            xi_values: DEFAULT_XI.to_vec(),
            orders: vec![Order::Finite(2.0)],
            measures: Measure::DEFAULTS.to_vec(),
        }
    }

    pub fn default_bounds() -> Self {
        Self {
            variable: SweepVariable::Eta,
            min: 0.0,
            max: 1.0,
            steps: DEFAULT_ETA_STEPS,
            xi_values: vec![0.0],
            orders: Vec::new(),
            measures: Vec::new(),
        }
    }

    pub fn validate(&self) -> CliResult<()> {
        let upper = match self.variable {
            SweepVariable::ErrorRate => MAX_ERROR_RATE,
            SweepVariable::Eta => 1.0,
        };
        if !(self.min.is_finite() && self.max.is_finite()) || self.min < 0.0 || self.max > upper + 1e-15 {
            return Err(args_err(format!(
                "range [{}, {}] outside [0, {upper}]",
                self.min, self.max
            )));
        }
        if self.min >= self.max {
            return Err(args_err(format!("min {} must be below max {}", self.min, self.max)));
        }
        if self.steps < 2 {
            return Err(args_err("steps must be at least 2"));
        }
        if self.xi_values.is_empty() {
            return Err(args_err("at least one xi value is required"));
        }
        if let Some(x) = self.xi_values.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(args_err(format!("xi {x} outside [0, 1]")));
        }
        for m in &self.measures {
            if matches!(m, Measure::V2 | Measure::V4) && self.orders.contains(&Order::Infinity) {
                return Err(args_err(format!("measure {} is not defined at order inf", m.name())));
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        linspace(self.min, self.max, self.steps)
    }
}

/// Discrimination setting for Eve at a given error rate and ξ.
pub fn discrimination_at(p_e: f64, xi: f64) -> CliResult<DiscriminationConfig> {
    let theta = theta_from_error_rate(&ProbeConfig::new(p_e)?);
    Ok(DiscriminationConfig::from_xi(theta, xi)?)
}

/// The joint table of B′ and E′ at a given error rate and ξ.
pub fn joint_at(p_e: f64, xi: f64) -> CliResult<(OutcomeProbs, JointDistribution)> {
    let q = outcome_probs(&discrimination_at(p_e, xi)?);
    Ok((q, joint_from_outcome_probs(&q)))
}

/// One measure at one order on a joint table; B′ is conditioned on E′.
pub fn measure_value(j: &JointDistribution, q: &OutcomeProbs, m: Measure, order: Order) -> CliResult<f64> {
    let dir = Direction::XGivenY;
    Ok(match m {
        Measure::Std => mutual_information(j),
        Measure::V1Inf => alpha_mutual_information(j, Order::Infinity, ConditionalVariant::First, dir)?,
        Measure::PCorrect => correct_guess_probability(q).unwrap_or(f64::NAN),
        _ => alpha_mutual_information(j, order, m.variant().expect("α-measure"), dir)?,
    })
}

pub fn curves_csv(spec: &SweepSpec) -> CliResult<String> {
    spec.validate()?;
    if spec.variable != SweepVariable::ErrorRate {
        return Err(args_err("curves sweep over the error rate only"));
    }
    let mut out = String::with_capacity(spec.steps * spec.xi_values.len() * 64);
    out.push_str(CURVES_HEADER);
    out.push('\n');
    for p in spec.grid() {
        for &xi in &spec.xi_values {
            let (q, j) = joint_at(p, xi)?;
            for &m in &spec.measures {
                let orders: Vec<Order> = match m {
                    Measure::Std | Measure::PCorrect => vec![Order::Shannon],
                    Measure::V1Inf => vec![Order::Infinity],
                    _ => spec.orders.clone(),
                };
                for order in orders {
                    let v = measure_value(&j, &q, m, order)?;
                    let order_label = if m == Measure::PCorrect { "na".to_string() } else { order.to_string() };
                    writeln!(out, "{},{},{},{},{}", fmt17(p), fmt17(xi), m.name(), order_label, fmt17(v))
                        .expect("string write");
                }
            }
        }
    }
    Ok(out)
}

/// One row of the bounds table; the last two entries are absent on η sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundsRow {
    pub x: f64,
    pub mu_bound: f64,
    pub coles_piani: f64,
    pub maj_shannon: f64,
    pub maj_alpha2_a: f64,
    pub maj_alpha2_b: f64,
    pub rho_star_h: f64,
    pub rho_star_r2: f64,
    pub i_std: Option<f64>,
    pub i_upper: Option<f64>,
}

fn bounds_at_eta(x: f64, eta: f64) -> CliResult<BoundsRow> {
    let md = optimal_majorization_data(eta)?;
    let two = Order::Finite(2.0);
    let mixed = mixed_state_probs(eta)?;
    Ok(BoundsRow {
        x,
        mu_bound: mu_bound(eta)?,
        coles_piani: coles_piani_bound(eta)?,
        maj_shannon: direct_sum_bound(&md, Order::Shannon)?,
        maj_alpha2_a: tensor_product_bound(&md, two)?,
        maj_alpha2_b: direct_sum_high_order_bound(&md, two)?,
        rho_star_h: shannon_entropy(&mixed),
        rho_star_r2: renyi_entropy(&mixed, two),
        i_std: None,
        i_upper: None,
    })
}

pub fn bounds_rows(spec: &SweepSpec) -> CliResult<Vec<BoundsRow>> {
    spec.validate()?;
    match spec.variable {
        SweepVariable::Eta => spec.grid().into_iter().map(|eta| bounds_at_eta(eta, eta)).collect(),
        SweepVariable::ErrorRate => {
            let [xi] = spec.xi_values[..] else {
                return Err(args_err("a bounds sweep over the error rate takes exactly one xi"));
            };
            spec.grid()
                .into_iter()
                .map(|p| {
                    let cfg = discrimination_at(p, xi)?;
                    let q = outcome_probs(&cfg);
                    let mut row = bounds_at_eta(p, cfg.eta())?;
                    row.i_std = Some(closed_form_i_std(&q));
                    row.i_upper = Some(mutual_info_upper_bound(&q, cfg.eta())?);
                    Ok(row)
                })
                .collect()
        }
    }
}

pub fn bounds_csv(spec: &SweepSpec) -> CliResult<String> {
    let rows = bounds_rows(spec)?;
    let mut out = String::with_capacity(rows.len() * 200);
    out.push_str(BOUNDS_HEADER);
    out.push('\n');
    let opt = |v: Option<f64>| v.map(fmt17).unwrap_or_default();
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            fmt17(r.x),
            fmt17(r.mu_bound),
            fmt17(r.coles_piani),
            fmt17(r.maj_shannon),
            fmt17(r.maj_alpha2_a),
            fmt17(r.maj_alpha2_b),
            fmt17(r.rho_star_h),
            fmt17(r.rho_star_r2),
            opt(r.i_std),
            opt(r.i_upper)
        )
        .expect("string write");
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct CellReport {
    pub bob_bit: usize,
    pub eve_outcome: &'static str,
    pub empirical: f64,
    pub analytic: f64,
    pub std_error: f64,
    pub within_threshold: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulationReport {
    pub config: SessionConfig,
    pub tally: SessionTally,
    pub sifted: u64,
    pub sift_fraction: f64,
    pub sift_fraction_std_error: f64,
    pub qber: Option<f64>,
    pub error_free_sifted: u64,
    pub joint: Vec<CellReport>,
    pub mutual_information_empirical: f64,
    pub mutual_information_analytic: f64,
    pub mutual_information_std_error: f64,
    pub sigma_threshold: f64,
    pub all_within_threshold: bool,
}

/// Delta-method standard error of the plug-in mutual information.
fn mi_std_error(j: &JointDistribution, n: u64) -> f64 {
    let rows = j.row_marginal();
    let cols = j.col_marginal();
    let (mut m1, mut m2) = (0.0, 0.0);
    for (b, row) in j.table().iter().enumerate() {
        for (e, &p) in row.iter().enumerate() {
            if p > 0.0 {
                let l = (p / (rows[b] * cols[e])).log2();
                m1 += p * l;
                m2 += p * l * l;
            }
        }
    }
    ((m2 - m1 * m1).max(0.0) / n as f64).sqrt()
}

pub fn simulate_report(cfg: &SessionConfig) -> CliResult<SimulationReport> {
    cfg.validate()?;
    let tally = run_session(cfg)?;
    let emp = empirical_joint(&tally)?;
    let (q, analytic) = joint_at(cfg.error_rate, cfg.xi)?;
    let n = tally.error_free_sifted();
    let labels = fpb_core::entropy::EVE_LABELS;
    let mut joint = Vec::with_capacity(6);
    let mut all_ok = true;
    for b in 0..2 {
        for (e, &label) in labels.iter().enumerate() {
            let pa = analytic.get(b, e);
            let se = (pa * (1.0 - pa) / n as f64).sqrt();
            let pe = emp.get(b, e);
            let ok = (pe - pa).abs() <= SIGMA_THRESHOLD * se + 1e-15;
            all_ok &= ok;
            joint.push(CellReport {
                bob_bit: b,
                eve_outcome: label,
                empirical: pe,
                analytic: pa,
                std_error: se,
                within_threshold: ok,
            });
        }
    }
    let sifted = tally.sifted();
    let sift_fraction = sifted as f64 / tally.rounds as f64;
    let sift_se = (0.25 / tally.rounds as f64).sqrt();
    all_ok &= (sift_fraction - 0.5).abs() <= SIGMA_THRESHOLD * sift_se;
    Ok(SimulationReport {
        config: *cfg,
        tally,
        sifted,
        sift_fraction,
        sift_fraction_std_error: sift_se,
        qber: tally.qber(),
        error_free_sifted: n,
        joint,
        mutual_information_empirical: mutual_information(&emp),
        mutual_information_analytic: closed_form_i_std(&q),
        mutual_information_std_error: mi_std_error(&analytic, n),
        sigma_threshold: SIGMA_THRESHOLD,
        all_within_threshold: all_ok,
    })
}

/// 2×2 complex matrix as `[[[re, im], ...], ...]`.
fn matrix_json(m: &ComplexMat) -> Vec<Vec<[f64; 2]>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| [m.get(i, j).re, m.get(i, j).im]).collect())
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct PovmReport {
    pub theta: f64,
    pub xi: f64,
    pub phi: f64,
    pub gamma: f64,
    pub eta: f64,
    pub m_plus: Vec<Vec<[f64; 2]>>,
    pub m_minus: Vec<Vec<[f64; 2]>>,
    pub m_inconclusive: Vec<Vec<[f64; 2]>>,
    pub q_success: f64,
    pub q_error: f64,
    pub q_inconclusive: f64,
    pub error_lower_bound: f64,
    pub completeness_residual: f64,
}

pub fn povm_report(theta: f64, xi: f64) -> CliResult<PovmReport> {
    let cfg = DiscriminationConfig::from_xi(theta, xi)?;
    let povm = build_povm(&cfg);
    let q = outcome_probs(&cfg);
    Ok(PovmReport {
        theta,
        xi,
        phi: cfg.phi(),
        gamma: cfg.gamma(),
        eta: cfg.eta(),
        m_plus: matrix_json(&povm.m_plus),
        m_minus: matrix_json(&povm.m_minus),
        m_inconclusive: matrix_json(&povm.m_inconclusive),
        q_success: q.q_success,
        q_error: q.q_error,
        q_inconclusive: q.q_inconclusive,
        error_lower_bound: error_lower_bound(theta, q.q_inconclusive)?,
        completeness_residual: povm.completeness_residual(),
    })
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

/// Write to `out`, or standard output when `None` or `-`.
pub fn write_output(out: Option<&Path>, content: &str) -> CliResult<()> {
    match out.filter(|p| p.as_os_str() != "-") {
        Some(path) => fs::write(path, content).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(content.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}

fn finish(result: CliResult<()>) -> i32 {
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("fpb: {e}");
            e.exit_code()
        }
    }
}

pub fn cmd_curves(spec: &SweepSpec, out: Option<&Path>) -> i32 {
    finish(curves_csv(spec).and_then(|s| write_output(out, &s)))
}

pub fn cmd_bounds(spec: &SweepSpec, out: Option<&Path>) -> i32 {
    finish(bounds_csv(spec).and_then(|s| write_output(out, &s)))
}

pub fn cmd_simulate(cfg: &SessionConfig, out: Option<&Path>) -> i32 {
    finish(simulate_report(cfg).and_then(|r| write_output(out, &to_json(&r))))
}

pub fn cmd_povm(theta: f64, xi: f64, out: Option<&Path>) -> i32 {
    finish(povm_report(theta, xi).and_then(|r| write_output(out, &to_json(&r))))
}

/// Parse a `key = value` config file. Blank lines and lines starting with
/// `#` are skipped; later keys override earlier ones.
pub fn parse_config(text: &str) -> CliResult<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| args_err(format!("config line {}: expected key=value", n + 1)))?;
        let key = k.trim().replace('-', "_");
        if !CONFIG_KEYS.contains(&key.as_str()) {
            return Err(args_err(format!("config line {}: unknown key {key:?}", n + 1)));
        }
        map.insert(key, v.trim().to_string());
    }
    Ok(map)
}

pub const CONFIG_KEYS: [&str; 13] = [
    "p_e_min", "p_e_max", "steps", "xi", "order", "measure", "seed", "rounds", "out", "p_e", "theta",
    "variable", "eta_steps",
];

#[derive(Debug, Parser)]
#[command(name = "fpb", version, about = "Information measures and uncertainty bounds for the FPB probe")]
pub struct Cli {
    /// Config file with key=value lines; command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Information measures versus P_E for several discrimination schemes.
    Curves(CurvesArgs),
    /// Uncertainty bounds over η or P_E.
    Bounds(BoundsArgs),
    /// Monte Carlo session with a JSON report.
    Simulate(SimulateArgs),
    /// POVM elements and outcome probabilities for (θ, ξ).
    Povm(PovmArgs),
}

#[derive(Debug, Args)]
pub struct RangeArgs {
    #[arg(long)]
    pub p_e_min: Option<f64>,
    #[arg(long)]
    pub p_e_max: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CurvesArgs {
    #[command(flatten)]
    pub range: RangeArgs,
    #[arg(long)]
    pub xi: Vec<f64>,
    /// `1`, a positive real, or `inf`.
    #[arg(long)]
    pub order: Vec<String>,
    #[arg(long)]
    pub measure: Vec<String>,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub range: RangeArgs,
    #[arg(long, value_enum)]
    pub variable: Option<SweepVariable>,
    #[arg(long)]
    pub xi: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub p_e: Option<f64>,
    #[arg(long)]
    pub xi: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub rounds: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PovmArgs {
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub xi: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

struct Settings {
    file: BTreeMap<String, String>,
}

impl Settings {
    fn get<T: FromStr>(&self, flag: Option<T>, key: &str) -> CliResult<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        self.file
            .get(key)
            .map(|v| v.parse::<T>().map_err(|_| args_err(format!("config key {key}: cannot parse {v:?}"))))
            .transpose()
    }

    fn list(&self, flag: Vec<String>, key: &str) -> Vec<String> {
        if !flag.is_empty() {
            return flag;
        }
        self.file
            .get(key)
            .map(|v| v.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect())
            .unwrap_or_default()
    }

    fn floats(&self, flag: Vec<f64>, key: &str) -> CliResult<Vec<f64>> {
        if !flag.is_empty() {
            return Ok(flag);
        }
        self.list(Vec::new(), key)
            .iter()
            .map(|s| s.parse().map_err(|_| args_err(format!("config key {key}: cannot parse {s:?}"))))
            .collect()
    }
}

fn apply_range(spec: &mut SweepSpec, s: &Settings, r: &RangeArgs) -> CliResult<Option<PathBuf>> {
    if let Some(v) = s.get(r.p_e_min, "p_e_min")? {
        spec.min = v;
    }
    if let Some(v) = s.get(r.p_e_max, "p_e_max")? {
        spec.max = v;
    }
    if let Some(v) = s.get(r.steps, "steps")? {
        spec.steps = v;
    }
    s.get(r.out.clone(), "out")
}

/// Build the curves spec and output path from flags and config.
fn curves_spec(a: CurvesArgs, s: &Settings) -> CliResult<(SweepSpec, Option<PathBuf>)> {
    let mut spec = SweepSpec::default_curves();
    let out = apply_range(&mut spec, s, &a.range)?;
    let xi = s.floats(a.xi, "xi")?;
    if !xi.is_empty() {
        spec.xi_values = xi;
    }
    let orders = s.list(a.order, "order");
    if !orders.is_empty() {
        spec.orders = orders
            .iter()
            .map(|o| o.parse::<Order>().map_err(|e| args_err(e.to_string())))
            .collect::<CliResult<_>>()?;
    }
    let measures = s.list(a.measure, "measure");
    if !measures.is_empty() {
        spec.measures = measures.iter().map(|m| m.parse()).collect::<CliResult<_>>()?;
    }
    Ok((spec, out))
}

fn bounds_spec(a: BoundsArgs, s: &Settings) -> CliResult<(SweepSpec, Option<PathBuf>)> {
    let variable = match a.variable {
        Some(v) => v,
        None => match s.file.get("variable") {
            Some(v) => SweepVariable::from_str(v, true).map_err(|_| args_err(format!("unknown variable {v:?}")))?,
            None => SweepVariable::Eta,
        },
    };
    let mut spec = SweepSpec::default_bounds();
    spec.variable = variable;
    if variable == SweepVariable::ErrorRate {
        spec.min = DEFAULT_P_E_MIN;
        spec.max = DEFAULT_P_E_MAX;
        spec.steps = DEFAULT_P_E_STEPS;
    } else if let Some(n) = s.get(None, "eta_steps")? {
        spec.steps = n;
    }
    // the range flags are named after P_E but apply to whichever variable is swept
    let out = apply_range(&mut spec, s, &a.range)?;
    let xi = s.floats(a.xi, "xi")?;
    if !xi.is_empty() {
        spec.xi_values = xi;
    }
    Ok((spec, out))
}

fn dispatch(cli: Cli) -> CliResult<i32> {
    let file = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            parse_config(&text)?
        }
        None => BTreeMap::new(),
    };
    let s = Settings { file };
    Ok(match cli.command {
        Command::Curves(a) => {
            let (spec, out) = curves_spec(a, &s)?;
            cmd_curves(&spec, out.as_deref())
        }
        Command::Bounds(a) => {
            let (spec, out) = bounds_spec(a, &s)?;
            cmd_bounds(&spec, out.as_deref())
        }
        Command::Simulate(a) => {
            let cfg = SessionConfig {
                rounds: s.get(a.rounds, "rounds")?.unwrap_or(DEFAULT_ROUNDS),
                error_rate: s.get(a.p_e, "p_e")?.unwrap_or(DEFAULT_SIM_P_E),
                xi: s.get(a.xi, "xi")?.unwrap_or(DEFAULT_SIM_XI),
                seed: s.get(a.seed, "seed")?.unwrap_or(DEFAULT_SEED),
            };
            let out = s.get(a.out, "out")?;
            cmd_simulate(&cfg, out.as_deref())
        }
        Command::Povm(a) => {
            let theta = s
                .get(a.theta, "theta")?
                .ok_or_else(|| args_err("povm requires --theta"))?;
            let xi = s.get(a.xi, "xi")?.unwrap_or(1.0);
            let out = s.get(a.out, "out")?;
            cmd_povm(theta, xi, out.as_deref())
        }
    })
}

/// Entry point shared by the binary and the tests.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ARGS } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("fpb: {e}");
            e.exit_code()
        }
    }
}

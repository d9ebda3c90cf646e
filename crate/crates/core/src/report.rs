//! Named, replayable verification runs and their structured reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::field::{format_rational, parse_rational, ratio, ExactComplex};
use crate::gaussian::{
    epr_correlated, epr_inference, gaussian_no_signaling, grid_entropy, linear_variance,
    perturbed_grid_entropy, GaussianEpistemicState, Quadrature,
};
use crate::hardy::{derive_zero_probability_facts, hardy_verdict, Detector, Preparation, Theta};
use crate::om::{BornTable, Classification, Probability};
use crate::pbr::{
    build_pbr_scenario, chsh::chsh_gap_demo, null_outcome_extension, solve_feasibility,
    FeasibilityProblem,
};
use crate::quantum::{detection_probabilities, mz_evolve, MzSource, PmState, RealValue, Scalar};
use crate::toy::{
    analogy_failure_check, combination_table, combine, correspondence, make_correlated,
    mz_toy_run, mz_toy_transcript, no_signaling_check, noncommutativity_demo,
    ontic_simulate_measurement, product, retrodict, steering_inference, bayesian_retrodiction,
    toy_born_table, toy_model, CombinationRule, CompositeToyState, DisturbanceRule,
    ToyMeasurement, ToyPermutation, ToyState, MEASUREMENT_LABELS,
};

/// Crate version stamped into every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
/// Version of the report layout described by `schema/report.schema.json`.
pub const SCHEMA_VERSION: u32 = 1;
/// Environment variable naming the default directory for report files.
pub const REPORT_DIR_ENV: &str = "EPISTEMIC_REPORT_DIR";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("tolerance must be positive and finite, got {0}")]
    Tolerance(f64),
    #[error("invalid rational {0:?}")]
    Rational(String),
    #[error("{0}")]
    Invalid(String),
}

/// Where a check's expected value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Stated in the published argument this project reproduces.
    Published,
    /// Computed independently of the code under test.
    Derived,
    /// Follows from a definition or a degenerate case.
    Trivial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub observed: String,
    pub provenance: Provenance,
    pub pass: bool,
}

impl Check {
    pub fn new(
        name: impl Into<String>,
        expected: impl ToString,
        observed: impl ToString,
        provenance: Provenance,
        pass: bool,
    ) -> Self {
        Check {
            name: name.into(),
            expected: expected.to_string(),
            observed: observed.to_string(),
            provenance,
            pass,
        }
    }

    /// Passes when the rendered values coincide.
    pub fn equal(name: impl Into<String>, expected: impl ToString, observed: impl ToString, provenance: Provenance) -> Self {
        let (e, o) = (expected.to_string(), observed.to_string());
        let pass = e == o;
        Check { name: name.into(), expected: e, observed: o, provenance, pass }
    }

    /// Passes when |observed − expected| ≤ tolerance.
    pub fn close(name: impl Into<String>, expected: f64, observed: f64, tolerance: f64, provenance: Provenance) -> Self {
        Check {
            name: name.into(),
            expected: format!("{expected:e} ± {tolerance:e}"),
            observed: format!("{observed:e}"),
            provenance,
            pass: (observed - expected).abs() <= tolerance,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum NumberMode {
    #[default]
    Exact,
    Float,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    /// Phase shifter set to π.
    Pi,
    /// Phase shifter removed.
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MzModel {
    Quantum,
    Toy,
    Both,
}

/// The verb of a run with its verb-specific settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verb", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Command {
    ToyBorn,
    Mz { phase: Phase, model: MzModel },
    Noncomm,
    CombineTable,
    Steering,
    NoSignaling,
    Pbr {
        lambda_size: usize,
        grid_denominator: u32,
        q: String,
        null_budget: String,
        relax_product: bool,
    },
    Hardy { lambda_size: usize, drop_invar: bool },
    Chsh,
    GaussianEpr { squeeze: f64, lambda: f64, measure: Quadrature, value: f64 },
    GaussianSuite,
}

impl Command {
    pub fn pbr_default() -> Self {
        Command::Pbr {
            lambda_size: 4,
            grid_denominator: 4,
            q: "1/4".into(),
            null_budget: "1/2".into(),
            relax_product: false,
        }
    }

    pub fn hardy_default() -> Self {
        Command::Hardy { lambda_size: 4, drop_invar: false }
    }

    pub fn gaussian_epr_default() -> Self {
        Command::GaussianEpr { squeeze: 3.0, lambda: 1.0, measure: Quadrature::Position, value: 1.0 }
    }

    /// Every verb with default settings, in dispatch order.
    pub fn all_defaults() -> Vec<Command> {
        vec![
            Command::ToyBorn,
            Command::Mz { phase: Phase::Pi, model: MzModel::Both },
            Command::Noncomm,
            Command::CombineTable,
            Command::Steering,
            Command::NoSignaling,
            Command::pbr_default(),
            Command::hardy_default(),
            Command::Chsh,
            Command::gaussian_epr_default(),
            Command::GaussianSuite,
        ]
    }
}

/// Everything that determines a run's checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    pub seed: u64,
    pub mode: NumberMode,
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig { command, seed: 0, mode: NumberMode::Exact, tolerance: DEFAULT_TOLERANCE, output: None }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(ConfigError::Tolerance(self.tolerance));
        }
        match &self.command {
            Command::Pbr { q, null_budget, .. } => {
                for text in [q, null_budget] {
                    parse_rational(text).map_err(|_| ConfigError::Rational(text.clone()))?;
                }
            }
            Command::Hardy { lambda_size, .. } if *lambda_size < 2 => {
                return Err(ConfigError::Invalid(format!("lambda size must be at least 2, got {lambda_size}")));
            }
            Command::GaussianEpr { squeeze, lambda, value, .. } => {
                if !(squeeze.is_finite() && *squeeze > 0.0) {
                    return Err(ConfigError::Invalid(format!("squeeze must be positive, got {squeeze}")));
                }
                if !(lambda.is_finite() && *lambda > 0.0) {
                    return Err(ConfigError::Invalid(format!("lambda must be positive, got {lambda}")));
                }
                if !value.is_finite() {
                    return Err(ConfigError::Invalid("value must be finite".into()));
                }
            }
            _ => {}
        }
        Ok(())
    }
}

/// A finished run with its configuration and checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportDocument {
    pub schema_version: u32,
    pub version: String,
    pub config: RunConfig,
    pub checks: Vec<Check>,
    pub details: Value,
    pub passed: bool,
    pub wall_clock_ms: u64,
}

impl ReportDocument {
    pub fn new(config: RunConfig, checks: Vec<Check>, details: Value, wall_clock_ms: u64) -> Self {
        let passed = checks.iter().all(|c| c.pass);
        ReportDocument {
            schema_version: SCHEMA_VERSION,
            version: VERSION.to_string(),
            config,
            checks,
            details,
            passed,
            wall_clock_ms,
        }
    }

    /// 0 when every check passes, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Copy with the wall-clock field cleared, for replay comparisons.
    pub fn without_timing(&self) -> Self {
        ReportDocument { wall_clock_ms: 0, ..self.clone() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Text,
}

/// Serializes a report. JSON is pretty-printed with a trailing newline.
pub fn emit(report: &ReportDocument, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("reports hold finite values");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut s = String::new();
            let verb = serde_json::to_value(&report.config.command)
                .ok()
                .and_then(|v| v.get("verb").and_then(Value::as_str).map(String::from))
                .unwrap_or_default();
            let passed = report.checks.iter().filter(|c| c.pass).count();
            let _ = writeln!(s, "{verb}: {passed}/{} checks passed", report.checks.len());
            for c in &report.checks {
                let mark = if c.pass { "PASS" } else { "FAIL" };
                let _ = writeln!(
                    s,
                    "[{mark}] {} (expected {}, observed {}, {})",
                    c.name,
                    c.expected,
                    c.observed,
                    serde_json::to_value(c.provenance).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
                );
            }
            let mode = match report.config.mode {
                NumberMode::Exact => "exact",
                NumberMode::Float => "float",
            };
            let _ = writeln!(s, "seed {} | mode {mode} | {} ms | v{}", report.config.seed, report.wall_clock_ms, report.version);
            s
        }
    }
}

type Outcome = (Vec<Check>, Value);

/// Runs the configured verb. Module errors become a failing check.
pub fn run(config: &RunConfig) -> ReportDocument {
    let start = Instant::now();
    let result = config
        .validate()
        .map_err(|e| e.to_string())
        .and_then(|()| dispatch(config));
    let (checks, details) = match result {
        Ok(out) => out,
        Err(message) => (
            vec![Check::new("run", "no error", &message, Provenance::Trivial, false)],
            json!({ "error": message }),
        ),
    };
    let elapsed = u64::try_from(start.elapsed().as_millis()).unwrap_or(u64::MAX);
    ReportDocument::new(config.clone(), checks, details, elapsed)
}

fn dispatch(config: &RunConfig) -> Result<Outcome, String> {
    match &config.command {
        Command::ToyBorn => Ok(toy_born(config.mode, config.tolerance)),
        Command::Mz { phase, model } => Ok(mz(*phase, *model, config.mode, config.tolerance)),
        Command::Noncomm => Ok(noncomm(config.seed)),
        Command::CombineTable => Ok(combine_table()),
        Command::Steering => steering().map_err(|e| e.to_string()),
        Command::NoSignaling => Ok(no_signaling()),
        Command::Pbr { lambda_size, grid_denominator, q, null_budget, relax_product } => {
            let problem = FeasibilityProblem {
                lambda_size: *lambda_size,
                grid_denominator: *grid_denominator,
                q: parse_rational(q).map_err(|e| e.to_string())?,
                relax_product: *relax_product,
                seed: config.seed,
                ..FeasibilityProblem::default()
            };
            let budget = parse_rational(null_budget).map_err(|e| e.to_string())?;
            pbr(&problem, &budget).map_err(|e| e.to_string())
        }
        Command::Hardy { lambda_size, drop_invar } => {
            hardy(*lambda_size, *drop_invar).map_err(|e| e.to_string())
        }
        Command::Chsh => Ok(chsh(config.tolerance)),
        Command::GaussianEpr { squeeze, lambda, measure, value } => {
            gaussian_epr(*squeeze, *lambda, *measure, *value, config.tolerance).map_err(|e| e.to_string())
        }
        Command::GaussianSuite => gaussian_suite().map_err(|e| e.to_string()),
    }
}

fn float_born_table() -> BornTable {
    let mut table = BTreeMap::new();
    for prep in PmState::ALL {
        let ket = prep.ket::<Complex64>();
        for &(name, a, b) in &MEASUREMENT_LABELS {
            for outcome in [a, b] {
                let p = outcome.ket::<Complex64>().overlap(&ket).expect("qubits");
                table.insert(
                    (prep.label().to_string(), name.to_string(), outcome.label().to_string()),
                    Probability::Float(p),
                );
            }
        }
    }
    table
}

fn toy_born(mode: NumberMode, tolerance: f64) -> Outcome {
    let model = toy_model();
    let table = match mode {
        NumberMode::Exact => toy_born_table(),
        NumberMode::Float => float_born_table(),
    };
    let report = model.reproduction_check(&table).expect("table covers the model");
    let mut checks: Vec<Check> = report
        .rows
        .iter()
        .map(|r| {
            let pass = match &r.quantum {
                Probability::Exact(q) => *q == r.model,
                Probability::Float(x) => {
                    (x - r.model.to_f64().unwrap_or(f64::NAN)).abs() <= tolerance
                }
            };
            Check::new(
                format!("born {} | {} -> {}", r.preparation, r.measurement, r.outcome),
                &r.quantum,
                format_rational(&r.model),
                Provenance::Derived,
                pass,
            )
        })
        .collect();
    checks.push(Check::equal(
        "toy model classification",
        Classification::PsiEpistemic,
        model.classify().map_or_else(|e| e.to_string(), |c| c.to_string()),
        Provenance::Published,
    ));
    let matched = report.rows.iter().filter(|r| r.matches).count();
    (checks, json!({ "triples": report.rows.len(), "matched": matched }))
}

fn quantum_branch<S: Scalar>(phase_in: bool) -> (Vec<String>, [f64; 2], [String; 2]) {
    let ket = mz_evolve::<S>(phase_in, MzSource::FirstSplitter);
    let (d1, d2) = detection_probabilities(&ket);
    let amps = ket.amplitudes().iter().map(|a| a.to_string()).collect();
    (amps, [d1.to_f64(), d2.to_f64()], [d1.to_string(), d2.to_string()])
}

fn mz(phase: Phase, model: MzModel, mode: NumberMode, tolerance: f64) -> Outcome {
    let phase_in = phase == Phase::Pi;
    let (expected_probs, expected_toy, expected_ket) = if phase_in {
        ([0.0, 1.0], ToyState::pair(3, 4).expect("3∨4"), "-|↘⟩")
    } else {
        ([1.0, 0.0], ToyState::pair(1, 2).expect("1∨2"), "|↗⟩")
    };
    let mut checks = Vec::new();
    let mut details = serde_json::Map::new();
    if model != MzModel::Toy {
        let (amps, probs, rendered) = match mode {
            NumberMode::Exact => quantum_branch::<ExactComplex>(phase_in),
            NumberMode::Float => quantum_branch::<Complex64>(phase_in),
        };
        let ok = match mode {
            NumberMode::Exact => rendered == expected_probs.map(|p| if p == 0.0 { "0".to_string() } else { "1".to_string() }),
            NumberMode::Float => probs.iter().zip(expected_probs).all(|(a, b)| (a - b).abs() <= tolerance),
        };
        checks.push(Check::new(
            "quantum detector probabilities (d1, d2)",
            format!("({}, {})", expected_probs[0], expected_probs[1]),
            format!("({}, {})", rendered[0], rendered[1]),
            Provenance::Published,
            ok,
        ));
        let exact = mz_evolve::<ExactComplex>(phase_in, MzSource::FirstSplitter);
        let target = if phase_in { PmState::One } else { PmState::Zero };
        let sign = if phase_in { -1 } else { 1 };
        let signed = target.ket::<ExactComplex>().with_global_phase(&ExactComplex::from_int(sign)).expect("unit phase");
        checks.push(Check::new(
            "quantum final ket",
            expected_ket,
            format!("[{}]", amps.join(", ")),
            Provenance::Published,
            exact == signed,
        ));
        details.insert("quantum_amplitudes".into(), json!(amps));
    }
    if model != MzModel::Quantum {
        let toy = mz_toy_run(phase_in);
        checks.push(Check::equal("toy final state", expected_toy, toy, Provenance::Published));
        details.insert("toy_transcript".into(), json!(mz_toy_transcript(phase_in)));
    }
    if model == MzModel::Both {
        let ket = mz_evolve::<ExactComplex>(phase_in, MzSource::FirstSplitter);
        let mapped = PmState::identify(&ket).map(correspondence);
        checks.push(Check::new(
            "correspondence of toy and quantum final states",
            mz_toy_run(phase_in),
            mapped.map_or_else(|| "unidentified".to_string(), |s| s.to_string()),
            Provenance::Derived,
            mapped == Some(mz_toy_run(phase_in)),
        ));
    }
    (checks, Value::Object(details))
}

fn render_distribution(d: &BTreeMap<ToyState, BigRational>) -> String {
    let parts: Vec<String> = d.iter().rev().map(|(s, p)| format!("{s}: {}", format_rational(p))).collect();
    format!("{{{}}}", parts.join(", "))
}

/// Samples B then A on 1∨2 at the ontic level and returns the fraction of
/// runs where A gives 1∨2.
fn sampled_b_then_a(seed: u64, trials: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let initial = ToyState::pair(1, 2).expect("1∨2").support();
    let (a, b) = (ToyMeasurement::z(), ToyMeasurement::x());
    let mut hits = 0usize;
    for _ in 0..trials {
        let lambda = *initial.choose(&mut rng).expect("nonempty");
        let (_, lambda) = ontic_simulate_measurement(lambda, b, &mut rng).expect("valid λ");
        let (block, _) = ontic_simulate_measurement(lambda, a, &mut rng).expect("valid λ");
        if block == a.blocks()[0] {
            hits += 1;
        }
    }
    hits as f64 / trials as f64
}

pub const SAMPLED_TRIALS: usize = 4000;

fn noncomm(seed: u64) -> Outcome {
    let demo = noncommutativity_demo();
    let half = ratio(1, 2);
    let st = |a, b| ToyState::pair(a, b).expect("pair");
    let ab_expected = BTreeMap::from([(st(1, 3), half.clone()), (st(2, 4), half.clone())]);
    let ba_expected = BTreeMap::from([(st(1, 2), half.clone()), (st(3, 4), half.clone())]);
    let aa_expected = BTreeMap::from([(st(1, 2), BigRational::one())]);
    let freq = sampled_b_then_a(seed, SAMPLED_TRIALS);
    let checks = vec![
        Check::equal(
            "A then B: final outcome distribution",
            render_distribution(&ab_expected),
            render_distribution(&demo.a_then_b.final_states),
            Provenance::Published,
        ),
        Check::equal(
            "B then A: second-stage distribution",
            render_distribution(&ba_expected),
            render_distribution(&demo.b_then_a.final_states),
            Provenance::Published,
        ),
        Check::equal(
            "A then A: repeated outcome",
            render_distribution(&aa_expected),
            render_distribution(&demo.a_then_a.final_states),
            Provenance::Trivial,
        ),
        Check::equal("A-outcome distribution depends on order", true, demo.order_matters(), Provenance::Published),
        Check::close("sampled B then A: frequency of 1∨2", 0.5, freq, 0.05, Provenance::Derived),
    ];
    (checks, json!({ "demo": demo, "sampled_frequency": freq, "trials": SAMPLED_TRIALS }))
}

fn combine_table() -> Outcome {
    let st = |a, b| ToyState::pair(a, b).expect("pair");
    let instance = |a: ToyState, rule: CombinationRule, b: ToyState, expected: ToyState| {
        let got = combine(a, b, rule).map_or_else(|e| e.to_string(), |s| s.to_string());
        Check::equal(format!("({a}) {rule} ({b})"), expected, got, Provenance::Published)
    };
    let mut checks = vec![
        instance(st(1, 2), CombinationRule::Plus1, st(3, 4), st(1, 3)),
        instance(st(1, 2), CombinationRule::Plus2, st(3, 4), st(2, 4)),
        instance(st(2, 3), CombinationRule::Plus4, st(1, 4), st(2, 4)),
        instance(st(1, 4), CombinationRule::Plus4, st(2, 3), st(1, 3)),
    ];
    let failures = analogy_failure_check();
    let labels = [
        ("(1∨3) +3 (2∨4) vs quantum", st(2, 3), st(1, 4), false),
        ("(1∨3) +4 (2∨4) vs quantum", st(1, 4), st(2, 3), false),
        ("(1∨2) +1 (3∨4) vs quantum", st(1, 3), st(1, 3), true),
    ];
    for (entry, (name, toy, quantum, matches)) in failures.entries.iter().zip(labels) {
        checks.push(Check::new(
            name,
            format!("toy {toy}, quantum {quantum}, {}", if matches { "match" } else { "mismatch" }),
            format!(
                "toy {}, quantum {}, {}",
                entry.toy_result,
                entry.quantum_support,
                if entry.matches { "match" } else { "mismatch" }
            ),
            Provenance::Published,
            entry.toy_result == toy && entry.quantum_support == quantum && entry.matches == matches,
        ));
    }
    let table = combination_table();
    let closure = table.entries.iter().all(|e| e.toy_result.is_pure());
    checks.push(Check::equal("every combination is a maximal-knowledge state", true, closure, Provenance::Derived));
    let mismatches = table.mismatches().count();
    (checks, json!({ "table": table, "failure_check": failures, "table_mismatches": mismatches }))
}

fn steering() -> Result<Outcome, crate::toy::ToyError> {
    let st = |a, b| ToyState::pair(a, b).expect("pair");
    let corr = make_correlated(ToyPermutation::identity());
    let x = ToyMeasurement::x();
    let z = ToyMeasurement::z();
    let first = steering_inference(corr, x, st(1, 3))?;
    let bob_support: Vec<String> = first
        .bob_marginal
        .iter()
        .map(format_rational)
        .collect();
    let mut checks = vec![
        Check::equal(
            "Alice obtains 1∨3: Bob marginal",
            "[1/2, 0, 1/2, 0]",
            format!("[{}]", bob_support.join(", ")),
            Provenance::Published,
        ),
        Check::equal(
            "Alice obtains 1∨3: Bob knowledge",
            st(1, 3),
            first.bob_knowledge.map_or_else(|| "none".into(), |s| s.to_string()),
            Provenance::Published,
        ),
    ];
    let sequence = [(x, st(1, 3)), (z, st(1, 2))];
    let retro = retrodict(corr, &sequence)?;
    checks.push(Check::equal(
        "then 1∨2: both systems were in state 1",
        CompositeToyState::new(&[(1, 1)])?,
        retro,
        Provenance::Published,
    ));
    let posterior = bayesian_retrodiction(corr, &sequence)?;
    let prod = product(st(1, 2), st(3, 4));
    let before = prod.marginal(crate::toy::Subsystem::Bob);
    let mut unchanged = true;
    for meas in ToyMeasurement::standard() {
        for block in meas.blocks() {
            if let Ok(r) = steering_inference(prod, meas, block) {
                unchanged &= r.bob_marginal == before;
            }
        }
    }
    checks.push(Check::equal("product state: Bob marginal unchanged", true, unchanged, Provenance::Trivial));
    let posterior_doc: Vec<Value> = posterior
        .iter()
        .map(|((a, b), p)| json!({ "pair": [a, b], "probability": format_rational(p) }))
        .collect();
    Ok((checks, json!({ "first": first, "retrodicted": retro, "disturbed_posterior": posterior_doc })))
}

fn no_signaling() -> Outcome {
    let corr = make_correlated(ToyPermutation::identity());
    let prod = product(ToyState::pair(1, 2).expect("1∨2"), ToyState::pair(3, 4).expect("3∨4"));
    let options = ToyMeasurement::standard();
    let cases = [
        ("correlated state, uniform resampling", corr, DisturbanceRule::UniformResample, Provenance::Derived),
        ("correlated state, collapse to minimum", corr, DisturbanceRule::CollapseToMin, Provenance::Derived),
        ("product state, uniform resampling", prod, DisturbanceRule::UniformResample, Provenance::Trivial),
    ];
    let mut checks = Vec::new();
    let mut details = Vec::new();
    for (name, state, rule, provenance) in cases {
        let report = no_signaling_check(state, &options, rule);
        checks.push(Check::equal(
            format!("{name}: max variation of Bob's statistics"),
            "0",
            format_rational(&report.max_variation),
            provenance,
        ));
        details.push(json!({ "case": name, "report": report }));
    }
    (checks, Value::Array(details))
}

fn pbr(problem: &FeasibilityProblem, budget: &BigRational) -> Result<Outcome, crate::pbr::PbrError> {
    let scenario = build_pbr_scenario()?;
    let mut checks = Vec::new();
    for j in 0..4 {
        checks.push(Check::equal(
            format!("<phi{}|Psi{}> = 0", j + 1, j + 1),
            "0",
            format_rational(&scenario.born[j][j]),
            Provenance::Published,
        ));
    }
    let forced = solve_feasibility(&FeasibilityProblem { force_overlap: true, ..problem.clone() })?;
    let cert = forced.certificate().cloned();
    let cert_ok = cert.as_ref().is_some_and(|c| scenario.born[c.pair[0] - 1][c.pair[1] - 1].is_zero());
    checks.push(Check::new(
        "forced overlap: no model reproduces the Born table",
        "infeasible with certificate",
        if forced.is_feasible() { "feasible".to_string() } else { format!("infeasible, certificate {}", if cert_ok { "verified" } else { "missing" }) },
        Provenance::Published,
        !forced.is_feasible() && cert_ok,
    ));
    let free = solve_feasibility(&FeasibilityProblem { force_overlap: false, ..problem.clone() })?;
    let replay_ok = free.witness().map(|w| w.replay(&scenario).is_ok_and(|r| r.all_match()));
    checks.push(Check::new(
        "no overlap forced: delta model reproduces the Born table",
        "feasible, witness replays",
        match replay_ok {
            Some(true) => "feasible, witness replays",
            Some(false) => "feasible, witness fails replay",
            None => "infeasible",
        },
        Provenance::Derived,
        replay_ok == Some(true),
    ));
    let mut details = serde_json::Map::new();
    details.insert("forced_overlap".into(), json!(forced.to_document()?));
    details.insert("no_overlap".into(), json!(free.to_document()?));
    if budget.is_positive() {
        let extension = null_outcome_extension(&FeasibilityProblem { force_overlap: true, ..problem.clone() }, budget)?;
        let post = extension.check.as_ref().is_some_and(|c| c.post_selected_matches);
        let observed = if extension.verdict.is_feasible() {
            format!("feasible, post-selected statistics {}", if post { "match" } else { "differ" })
        } else {
            "infeasible".to_string()
        };
        let pass = if extension.verdict.is_feasible() { post } else { extension.verdict.certificate().is_some() };
        checks.push(Check::new(
            format!("null outcome with budget {}", format_rational(budget)),
            "feasible witness with exact post-selected statistics, or a certificate",
            observed,
            Provenance::Derived,
            pass,
        ));
        details.insert(
            "null_outcome".into(),
            {
                let verdict = extension.verdict.to_document()?;
                json!({ "verdict": verdict, "check": extension.check })
            },
        );
    }
    Ok((checks, Value::Object(details)))
}

fn hardy(lambda_size: usize, drop_invar: bool) -> Result<Outcome, crate::hardy::HardyError> {
    let facts = derive_zero_probability_facts();
    let mut checks = Vec::new();
    for theta in Theta::ALL {
        for d in Detector::ALL {
            let f = facts
                .iter()
                .find(|f| f.preparation == Preparation::Phi && f.theta == theta && f.detector == d)
                .expect("all triples evaluated");
            checks.push(Check::equal(
                format!("phi, theta={theta}, {d:?}"),
                "1/2",
                format_rational(&f.probability),
                Provenance::Published,
            ));
        }
    }
    for (theta, d) in [(Theta::Pi, Detector::D1), (Theta::Zero, Detector::D2)] {
        let f = facts
            .iter()
            .find(|f| f.preparation == Preparation::Psi && f.theta == theta && f.detector == d)
            .expect("all triples evaluated");
        checks.push(Check::equal(format!("psi, theta={theta}, {d:?}"), "0", format_rational(&f.probability), Provenance::Published));
    }
    let report = hardy_verdict(lambda_size, drop_invar)?;
    if drop_invar {
        checks.push(Check::new(
            "without phase invariance: overlapping assignment exists",
            "overlap possible, replays every zero fact",
            format!(
                "overlap {}, replay {}",
                if report.overlap_possible { "possible" } else { "impossible" },
                report.escape_replays.map_or("n/a", |b| if b { "ok" } else { "failed" })
            ),
            Provenance::Published,
            report.overlap_possible && report.escape_replays == Some(true),
        ));
    } else {
        let cert_ok = report.certificate.as_ref().is_some_and(|c| c.facts.len() == 2);
        checks.push(Check::new(
            "with phase invariance: supports cannot overlap",
            "overlap impossible, certificate names two zero facts",
            format!(
                "overlap {}, certificate {}",
                if report.overlap_possible { "possible" } else { "impossible" },
                if cert_ok { "verified" } else { "missing" }
            ),
            Provenance::Published,
            !report.overlap_possible && cert_ok,
        ));
    }
    checks.push(Check::equal(
        "disjoint supports admit an assignment",
        true,
        report.disjoint_assignment.is_some(),
        Provenance::Derived,
    ));
    Ok((checks, json!(report)))
}

fn chsh(tolerance: f64) -> Outcome {
    let r = chsh_gap_demo();
    let checks = vec![
        Check::close("singlet CHSH value", 2.0 * 2f64.sqrt(), r.quantum, tolerance, Provenance::Derived),
        Check::equal("deterministic local bound", 2, r.local_bound, Provenance::Derived),
        Check::equal("toy composites maximum", "2", format_rational(&r.toy_max), Provenance::Derived),
        Check::equal("toy composites checked", 61, r.toy_states_checked, Provenance::Derived),
    ];
    (checks, json!(r))
}

fn gaussian_epr(
    squeeze: f64,
    hbar: f64,
    measure: Quadrature,
    value: f64,
    tolerance: f64,
) -> Result<Outcome, crate::gaussian::GaussianError> {
    let state = epr_correlated(squeeze, hbar)?;
    let validity = state.validity_check();
    let target = hbar * (-2.0 * squeeze).exp();
    let scale = (2.0 * squeeze).cosh().max(1.0);
    let bob = epr_inference(&state, measure, value)?;
    let gain = (2.0 * squeeze).tanh();
    let (index, expected_mean) = match measure {
        Quadrature::Position => (0, gain * value),
        Quadrature::Momentum => (1, -gain * value),
    };
    let ns = gaussian_no_signaling(&state)?;
    let checks = vec![
        Check::equal("EPR state is valid", true, validity.valid, Provenance::Derived),
        Check::close("Var(qA - qB)", target, linear_variance(&state, &[(0, 1.0), (1, -1.0)]), tolerance * scale, Provenance::Derived),
        Check::close("Var(pA + pB)", target, linear_variance(&state, &[(2, 1.0), (3, 1.0)]), tolerance * scale, Provenance::Derived),
        Check::close("Bob posterior mean", expected_mean, bob.mean()[index], tolerance * scale, Provenance::Derived),
        Check::equal("Bob posterior is valid", true, bob.validity_check().valid, Provenance::Derived),
        Check::close("Bob marginal unchanged by Alice's choice", 0.0, ns.max_deviation, tolerance * scale, Provenance::Derived),
    ];
    Ok((checks, json!({ "state": state.to_document(), "validity": validity, "bob_posterior": bob.to_document(), "no_signaling": ns })))
}

/// Grid used by the entropy oracle: cells per axis and half-width in
/// standard deviations.
pub const QUADRATURE_GRID: (usize, f64) = (400, 10.0);

fn gaussian_suite() -> Result<Outcome, crate::gaussian::GaussianError> {
    let boundary = GaussianEpistemicState::thermal(1, 1.0, 1.0)?;
    let bv = boundary.validity_check();
    let tight = GaussianEpistemicState::thermal(1, 0.1, 1.0)?;
    let mut checks = vec![
        Check::close("boundary state min eigenvalue", 0.0, bv.min_eigenvalue, 1e-12, Provenance::Derived),
        Check::equal("gamma = hbar/10 I is invalid", false, tight.validity_check().valid, Provenance::Derived),
    ];
    for r in [0.5, 1.0, 2.0, 3.0, 5.0] {
        let s = epr_correlated(r, 1.0)?;
        checks.push(Check::equal(format!("EPR r={r} is valid"), true, s.validity_check().valid, Provenance::Derived));
    }
    let epr = epr_correlated(3.0, 1.0)?;
    checks.push(Check::close(
        "r=3: Var(qA - qB)",
        (-6f64).exp(),
        linear_variance(&epr, &[(0, 1.0), (1, -1.0)]),
        1e-9,
        Provenance::Derived,
    ));
    let bob = epr_inference(&epr, Quadrature::Position, 1.0)?;
    let cov = epr.covariance();
    let oracle = cov[(1, 0)] / cov[(0, 0)];
    checks.push(Check::close("r=3, qA=1: Bob posterior mean", oracle, bob.mean()[0], 1e-6, Provenance::Derived));
    let marginal = epr.marginalize_modes(&[1])?;
    let min_var = marginal.covariance().diagonal().min();
    checks.push(Check::new(
        "Bob marginal variance at least hbar/2",
        ">= 0.5",
        min_var,
        Provenance::Derived,
        min_var >= 0.5 && marginal.validity_check().valid,
    ));
    let (cells, width) = QUADRATURE_GRID;
    let closed = boundary.entropy()?;
    let numeric = grid_entropy(&boundary, cells, width)?;
    checks.push(Check::close("entropy closed form vs quadrature", closed, numeric, 1e-6, Provenance::Derived));
    let mut rivals = Vec::new();
    for eps in [0.05, 0.1, 0.15] {
        let h = perturbed_grid_entropy(&boundary, eps, cells, width)?;
        rivals.push(h);
        checks.push(Check::new(
            format!("Gaussian entropy exceeds perturbation eps={eps}"),
            format!("< {numeric}"),
            h,
            Provenance::Derived,
            h < numeric,
        ));
    }
    Ok((
        checks,
        json!({
            "boundary_min_eigenvalue": bv.min_eigenvalue,
            "entropy_closed_form": closed,
            "entropy_quadrature": numeric,
            "perturbed_entropies": rivals,
        }),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_default_verb_passes() {
        for command in Command::all_defaults() {
            let report = run(&RunConfig::new(command.clone()));
            let failed: Vec<_> = report.checks.iter().filter(|c| !c.pass).collect();
            assert!(failed.is_empty(), "{command:?}: {failed:#?}");
            assert_eq!(report.exit_code(), 0);
        }
    }

    #[test]
    fn empty_report_is_valid_json() {
        let r = ReportDocument::new(RunConfig::new(Command::Chsh), vec![], Value::Null, 0);
        let text = emit(&r, Format::Json);
        assert_eq!(ReportDocument::from_json(&text).unwrap(), r);
        assert!(r.passed);
    }

    #[test]
    fn errors_become_failing_checks() {
        let mut c = RunConfig::new(Command::pbr_default());
        if let Command::Pbr { q, .. } = &mut c.command {
            *q = "2".into();
        }
        let r = run(&c);
        assert_eq!(r.exit_code(), 1);
        let mut c = RunConfig::new(Command::Chsh);
        c.tolerance = 0.0;
        assert!(!run(&c).passed);
    }

    #[test]
    fn float_mode_agrees() {
        for command in [Command::ToyBorn, Command::Mz { phase: Phase::Zero, model: MzModel::Quantum }] {
            let mut c = RunConfig::new(command);
            c.mode = NumberMode::Float;
            assert!(run(&c).passed);
        }
    }

    #[test]
    fn text_output_lists_checks() {
        let r = run(&RunConfig::new(Command::Chsh));
        let text = emit(&r, Format::Text);
        assert!(text.starts_with("chsh: 4/4 checks passed"));
        assert_eq!(text.lines().filter(|l| l.starts_with("[PASS]")).count(), 4);
    }
}

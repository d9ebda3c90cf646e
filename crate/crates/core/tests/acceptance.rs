//! Acceptance run: one timed line per criterion, nonzero exit on any failure.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use epistemic_core::field::{ratio, ExactComplex};
use epistemic_core::gaussian::{
    epr_correlated, epr_inference, grid_entropy, linear_variance, GaussianEpistemicState, Quadrature,
};
use epistemic_core::hardy::{derive_zero_probability_facts, hardy_verdict, Preparation};
use epistemic_core::om::Probability;
use epistemic_core::pbr::chsh::{chsh_gap_demo, chsh_local_bound, chsh_quantum, singlet_correlation, TSIRELSON_ANGLES};
use epistemic_core::pbr::{build_pbr_scenario, null_outcome_extension, solve_feasibility, FeasibilityProblem};
use epistemic_core::quantum::{detection_probabilities, mz_evolve, MzSource, PmState};
use epistemic_core::toy::{
    analogy_failure_check, combine, correspondence, make_correlated, mz_toy_run, no_signaling_check,
    noncommutativity_demo, toy_born_table, toy_model, CombinationRule, DisturbanceRule, ToyMeasurement,
    ToyPermutation, ToyState,
};
use num_rational::BigRational;
use num_traits::Zero;

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn bloch(label: &str) -> [i64; 3] {
    match label {
        "0" => [0, 0, 1],
        "1" => [0, 0, -1],
        "+" => [1, 0, 0],
        "-" => [-1, 0, 0],
        "+i" => [0, 1, 0],
        "-i" => [0, -1, 0],
        other => panic!("unknown state label {other}"),
    }
}

/// |⟨a|b⟩|² = (1 + n_a·n_b)/2 for pure qubit states with Bloch vectors n.
fn bloch_probability(a: &str, b: &str) -> BigRational {
    let dot: i64 = bloch(a).iter().zip(bloch(b)).map(|(x, y)| x * y).sum();
    ratio(1 + dot, 2)
}

fn toy_born() -> Outcome {
    let report = toy_model().reproduction_check(&toy_born_table()).map_err(|e| e.to_string())?;
    ensure(report.rows.len() == 36, format!("{} triples", report.rows.len()))?;
    for row in &report.rows {
        let oracle = bloch_probability(&row.preparation, &row.outcome);
        ensure(row.model == oracle, format!("{} {} {}", row.preparation, row.measurement, row.outcome))?;
        ensure(row.quantum == Probability::Exact(oracle.clone()), "quantum table disagrees with oracle")?;
        ensure([ratio(0, 1), ratio(1, 2), ratio(1, 1)].contains(&oracle), "value outside {0, 1/2, 1}")?;
    }
    Ok("36/36 triples exact".into())
}

fn mach_zehnder() -> Outcome {
    for (phase, probs, toy) in [(true, ["0", "1"], ToyState::pair(3, 4)), (false, ["1", "0"], ToyState::pair(1, 2))] {
        let toy = toy.map_err(|e| e.to_string())?;
        let ket = mz_evolve::<ExactComplex>(phase, MzSource::FirstSplitter);
        let (d1, d2) = detection_probabilities(&ket);
        ensure([d1.to_string(), d2.to_string()] == probs.map(String::from), format!("phase {phase}: ({d1}, {d2})"))?;
        ensure(mz_toy_run(phase) == toy, format!("toy final state {}", mz_toy_run(phase)))?;
        ensure(PmState::identify(&ket).map(correspondence) == Some(toy), "correspondence")?;
    }
    Ok("(0,1) with phase, (1,0) without; toy 3∨4 and 1∨2".into())
}

fn hardy() -> Outcome {
    let facts = derive_zero_probability_facts();
    let phi: Vec<_> = facts.iter().filter(|f| f.preparation == Preparation::Phi).collect();
    ensure(phi.len() == 4 && phi.iter().all(|f| f.probability == ratio(1, 2)), "upper-arm statistics")?;
    for n in 2..=8 {
        let strict = hardy_verdict(n, false).map_err(|e| e.to_string())?;
        ensure(!strict.overlap_possible && strict.certificate.is_some(), format!("size {n}: overlap found"))?;
        let relaxed = hardy_verdict(n, true).map_err(|e| e.to_string())?;
        ensure(relaxed.overlap_possible && relaxed.escape_replays == Some(true), format!("size {n}: no escape"))?;
    }
    Ok("1/2 for both phases; no overlap for sizes 2..8; escape without invariance".into())
}

fn pbr() -> Outcome {
    let scenario = build_pbr_scenario().map_err(|e| e.to_string())?;
    ensure((0..4).all(|j| scenario.born[j][j].is_zero()), "orthogonality")?;
    let forced = solve_feasibility(&FeasibilityProblem::default()).map_err(|e| e.to_string())?;
    let cert = forced.certificate().ok_or("forced overlap was feasible")?;
    ensure(scenario.born[cert.pair[0] - 1][cert.pair[1] - 1].is_zero(), "certificate names a nonzero pair")?;
    let free = solve_feasibility(&FeasibilityProblem { force_overlap: false, ..FeasibilityProblem::default() })
        .map_err(|e| e.to_string())?;
    let witness = free.witness().ok_or("unforced search infeasible")?;
    let (p0, pplus) = witness.single.clone().ok_or("witness lacks single-system weights")?;
    ensure(p0.iter().zip(&pplus).all(|(a, b)| a.is_zero() || b.is_zero()), "witness supports overlap")?;
    ensure(witness.replay(&scenario).map_err(|e| e.to_string())?.all_match(), "witness replay")?;
    let null = null_outcome_extension(&FeasibilityProblem::default(), &ratio(1, 2)).map_err(|e| e.to_string())?;
    let check = null.check.ok_or("null extension infeasible")?;
    ensure(null.verdict.is_feasible() && check.post_selected_matches, "null witness statistics")?;
    Ok(format!(
        "infeasible with certificate Psi{} phi{} at ({}, {}); delta witness replays; null witness post-selects exactly",
        cert.pair[0], cert.pair[1], cert.lambda[0], cert.lambda[1]
    ))
}

fn noncommutativity() -> Outcome {
    let demo = noncommutativity_demo();
    let st = |a, b| ToyState::pair(a, b).expect("pair");
    let half = ratio(1, 2);
    let ab = BTreeMap::from([(st(1, 3), half.clone()), (st(2, 4), half.clone())]);
    let ba = BTreeMap::from([(st(1, 2), half.clone()), (st(3, 4), half)]);
    ensure(demo.a_then_b.final_states == ab, "A then B distribution")?;
    ensure(demo.b_then_a.final_states == ba, "B then A distribution")?;
    Ok("{1∨3: 1/2, 2∨4: 1/2} and {1∨2: 1/2, 3∨4: 1/2}".into())
}

fn combination_table() -> Outcome {
    let st = |a, b| ToyState::pair(a, b).map_err(|e| e.to_string());
    let instances = [
        (st(1, 2)?, CombinationRule::Plus1, st(3, 4)?, st(1, 3)?),
        (st(1, 2)?, CombinationRule::Plus2, st(3, 4)?, st(2, 4)?),
        (st(2, 3)?, CombinationRule::Plus4, st(1, 4)?, st(2, 4)?),
        (st(1, 4)?, CombinationRule::Plus4, st(2, 3)?, st(1, 3)?),
    ];
    for (a, rule, b, expected) in instances {
        ensure(combine(a, b, rule).map_err(|e| e.to_string())? == expected, format!("({a}) {rule} ({b})"))?;
    }
    let mismatches = analogy_failure_check().entries.iter().filter(|e| !e.matches).count();
    ensure(mismatches == 2, format!("{mismatches} analogy mismatches"))?;
    Ok("4 instances reproduced, 2 analogy mismatches flagged".into())
}

fn no_signaling() -> Outcome {
    let state = make_correlated(ToyPermutation::identity());
    for rule in [DisturbanceRule::UniformResample, DisturbanceRule::CollapseToMin] {
        let report = no_signaling_check(state, &ToyMeasurement::standard(), rule);
        ensure(report.max_variation.is_zero(), format!("{rule:?}: variation {}", report.max_variation))?;
    }
    Ok("Bob's statistics identical across Alice's 3 choices".into())
}

fn chsh() -> Outcome {
    for a in [TSIRELSON_ANGLES[0], TSIRELSON_ANGLES[1]] {
        for b in [TSIRELSON_ANGLES[2], TSIRELSON_ANGLES[3]] {
            let oracle = -(a - b).cos();
            ensure((singlet_correlation(a, b) - oracle).abs() < 1e-12, "singlet correlation")?;
        }
    }
    let s = chsh_quantum(TSIRELSON_ANGLES).abs();
    ensure((s - 2.0 * 2f64.sqrt()).abs() < 1e-9, format!("quantum value {s}"))?;
    let mut best = 0;
    for bits in 0..16u32 {
        let v = |k: u32| if bits >> k & 1 == 1 { 1i64 } else { -1 };
        let (a0, a1, b0, b1) = (v(0), v(1), v(2), v(3));
        best = best.max((a0 * b0 + a0 * b1 + a1 * b0 - a1 * b1).abs());
    }
    ensure(best == 2 && chsh_local_bound() == 2, "local bound")?;
    let demo = chsh_gap_demo();
    ensure(demo.toy_max == ratio(2, 1), format!("toy maximum {}", demo.toy_max))?;
    Ok(format!("quantum {s:.12}, local 2, toy {}", demo.toy_max))
}

/// E[q_B | q_A = a] by quadrature of the joint position density.
fn conditional_mean_oracle(r: f64, hbar: f64, a: f64) -> f64 {
    let (c, s) = ((2.0 * r).cosh() * hbar / 2.0, (2.0 * r).sinh() * hbar / 2.0);
    let det = c * c - s * s;
    let density = |x: f64, y: f64| (-(c * x * x - 2.0 * s * x * y + c * y * y) / (2.0 * det)).exp();
    let centre = s / c * a;
    let width = 12.0 * (det / c).sqrt();
    let cells = 4000;
    let h = 2.0 * width / cells as f64;
    let (mut mass, mut moment) = (0.0, 0.0);
    for i in 0..cells {
        let y = centre - width + (i as f64 + 0.5) * h;
        let w = density(a, y);
        mass += w;
        moment += w * y;
    }
    moment / mass
}

fn gaussian() -> Outcome {
    let boundary = GaussianEpistemicState::thermal(1, 1.0, 1.0).map_err(|e| e.to_string())?;
    let min = boundary.validity_check().min_eigenvalue;
    ensure(min.abs() < 1e-12, format!("boundary min eigenvalue {min}"))?;
    let epr = epr_correlated(3.0, 1.0).map_err(|e| e.to_string())?;
    ensure(epr.validity_check().valid, "r = 3 invalid")?;
    let var = linear_variance(&epr, &[(0, 1.0), (1, -1.0)]);
    ensure((var - (-6f64).exp()).abs() < 1e-9, format!("Var(qA - qB) = {var}"))?;
    let bob = epr_inference(&epr, Quadrature::Position, 1.0).map_err(|e| e.to_string())?;
    let oracle = conditional_mean_oracle(3.0, 1.0, 1.0);
    ensure((bob.mean()[0] - oracle).abs() < 1e-6, format!("posterior mean {} vs {oracle}", bob.mean()[0]))?;
    let closed = boundary.entropy().map_err(|e| e.to_string())?;
    let direct = 0.5 * ((2.0 * std::f64::consts::PI * std::f64::consts::E).powi(2) * 0.25).ln();
    let numeric = grid_entropy(&boundary, 400, 10.0).map_err(|e| e.to_string())?;
    ensure((closed - direct).abs() < 1e-12, "closed form")?;
    ensure((closed - numeric).abs() < 1e-6, format!("entropy {closed} vs quadrature {numeric}"))?;
    Ok(format!("min eigenvalue {min:.1e}, Var {var:.3e}, posterior mean {:.9}, entropy gap {:.1e}", bob.mean()[0], (closed - numeric).abs()))
}

const PROPERTY_SUITES: [(&str, &str); 7] = [
    ("epistemic-core", "quantum_props"),
    ("epistemic-core", "om_props"),
    ("epistemic-core", "toy_props"),
    ("epistemic-core", "pbr_props"),
    ("epistemic-core", "hardy_props"),
    ("epistemic-core", "gaussian_props"),
    ("epistemic-cli", "cli"),
];

/// Newest executable named `{stem}-{hash}` next to this binary.
fn sibling_binary(stem: &str) -> Option<PathBuf> {
    let exe = std::env::current_exe().ok()?;
    let dir = exe.parent()?;
    std::fs::read_dir(dir)
        .ok()?
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| {
            p.extension().is_none()
                && p.file_name()
                    .and_then(|n| n.to_str())
                    .and_then(|n| n.strip_prefix(stem))
                    .and_then(|rest| rest.strip_prefix('-'))
                    .is_some_and(|hash| hash.chars().all(|c| c.is_ascii_hexdigit()))
        })
        .max_by_key(|p| p.metadata().and_then(|m| m.modified()).ok())
}

/// Builds the suites into a private target directory when they are not
/// already next to this binary.
fn build_suites(target: &Path) -> Result<(), String> {
    let cargo = std::env::var("CARGO").unwrap_or_else(|_| "cargo".into());
    let mut cmd = Command::new(cargo);
    cmd.args(["test", "--no-run", "--quiet"]).env("CARGO_TARGET_DIR", target);
    for (package, test) in PROPERTY_SUITES {
        cmd.args(["-p", package, "--test", test]);
    }
    let status = cmd.status().map_err(|e| e.to_string())?;
    ensure(status.success(), "building property suites failed")
}

fn find_in(dir: &Path, stem: &str) -> Option<PathBuf> {
    std::fs::read_dir(dir)
        .ok()?
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| {
            p.extension().is_none()
                && p.file_name()
                    .and_then(|n| n.to_str())
                    .is_some_and(|n| n.starts_with(&format!("{stem}-")))
        })
        .max_by_key(|p| p.metadata().and_then(|m| m.modified()).ok())
}

fn passed_count(stdout: &str) -> usize {
    stdout
        .lines()
        .filter_map(|l| l.strip_prefix("test result: ok. "))
        .filter_map(|rest| rest.split_whitespace().next()?.parse::<usize>().ok())
        .sum()
}

fn property_suites() -> Outcome {
    let mut binaries = Vec::new();
    let mut missing = false;
    for (_, stem) in PROPERTY_SUITES {
        match sibling_binary(stem) {
            Some(p) => binaries.push(p),
            None => missing = true,
        }
    }
    if missing {
        let target = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../target/acceptance-suites");
        build_suites(&target)?;
        let deps = target.join("debug/deps");
        binaries = PROPERTY_SUITES
            .iter()
            .map(|(_, stem)| find_in(&deps, stem).ok_or(format!("{stem} not built")))
            .collect::<Result<_, _>>()?;
    }
    let mut total = 0;
    for bin in &binaries {
        let out = Command::new(bin).arg("--quiet").output().map_err(|e| e.to_string())?;
        let stdout = String::from_utf8_lossy(&out.stdout);
        let name = bin.file_name().and_then(|n| n.to_str()).unwrap_or("suite");
        ensure(out.status.success(), format!("{name} failed"))?;
        total += passed_count(&stdout);
    }
    Ok(format!("{} suites, {total} tests, zero failures", binaries.len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("toy-model Born reproduction", Duration::from_secs(1), toy_born),
        ("Mach-Zehnder quantum and toy branches", Duration::from_secs(1), mach_zehnder),
        ("Hardy instance and possibilistic search", Duration::from_secs(10), hardy),
        ("PBR orthogonality, certificates and witnesses", Duration::from_secs(60), pbr),
        ("toy non-commutativity transcript", Duration::from_secs(1), noncommutativity),
        ("combination-rule table", Duration::from_secs(1), combination_table),
        ("toy no-signaling", Duration::from_secs(1), no_signaling),
        ("CHSH gap", Duration::from_secs(5), chsh),
        ("Gaussian suite", Duration::from_secs(10), gaussian),
        ("property suites", Duration::from_secs(1800), property_suites),
    ];
    let mut failures = 0;
    for (i, (name, budget, check)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let verdict = match &result {
            Ok(_) if elapsed <= budget => "PASS",
            _ => "FAIL",
        };
        let note = match result {
            Ok(msg) if elapsed <= budget => msg,
            Ok(msg) => format!("{msg}; over budget {budget:?}"),
            Err(msg) => msg,
        };
        if verdict == "FAIL" {
            failures += 1;
        }
        println!("[{verdict}] {:>2}. {name} ({:.3} s): {note}", i + 1, elapsed.as_secs_f64());
    }
    println!("acceptance: {}/10 criteria passed", 10 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}

//! Command execution. Every command yields a deterministic JSON report, a
//! flat table for CSV output, and an exit status.

use jsrlab_core::exec::map_indexed;
use jsrlab_core::inequalities::{
    c1_ensemble, check_theorem_b, other_inequality_ensemble, power_inequality_ensemble, procesi_ensemble,
    theorem_b_ensemble, trace_identity_ensemble, weaker_lemma_ensemble, weaker_lemma_general_ensemble, Bound,
    EnsembleConfig, IneqReport,
};
use jsrlab_core::norms::NormSpec;
use jsrlab_core::random::{gaussian_set, trial_rng};
use jsrlab_core::semigroup::{jsr_bounds, spectral_radii_by_depth, BoundsConfig, BoundsReport, DepthStatus};
use jsrlab_core::MatrixSet;
use serde_json::{json, Value};

use crate::config::{Check, Command, ExampleName, RunConfig};
use crate::error::{Result, Status};
use crate::input::{load_matrix_set, matrix_set_json};

/// Number of powers listed by the Gripenberg example.
pub const GRIPENBERG_POWERS: usize = 12;

#[derive(Clone, Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Emission {
    pub report: Value,
    pub table: Table,
    pub status: Status,
}

/// Shortest decimal that parses back to `x`.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn execute(cfg: &RunConfig) -> Result<Emission> {
    match &cfg.command {
        Command::Bounds { input } => {
            let set = match input {
                Some(path) => load_matrix_set(path)?,
                None => gaussian_set(&mut trial_rng(cfg.seed()?, 0), cfg.dim, cfg.set_size, true),
            };
            run_bounds(cfg, &set)
        }
        Command::Verify { check } => run_verify(cfg, *check),
        Command::Example {
            name: ExampleName::Gripenberg,
        } => run_example_gripenberg(cfg),
        Command::Sweep => run_sweep(cfg),
    }
}

fn bounds_config(cfg: &RunConfig) -> BoundsConfig {
    BoundsConfig {
        max_depth: cfg.depth,
        node_budget: cfg.budget,
        parallel: cfg.parallel(),
        ..BoundsConfig::default()
    }
}

/// `min_{m≤n} upper_m − lower_n` for each depth record.
fn running_gaps(report: &BoundsReport) -> Vec<f64> {
    let mut best = f64::INFINITY;
    report
        .records
        .iter()
        .map(|r| {
            if let Some(u) = r.upper {
                best = best.min(u);
            }
            best - r.lower
        })
        .collect()
}

fn status_name(s: DepthStatus) -> &'static str {
    match s {
        DepthStatus::Exact => "exact",
        DepthStatus::Pruned => "pruned",
        DepthStatus::Incomplete => "incomplete",
    }
}

pub fn run_bounds(cfg: &RunConfig, set: &MatrixSet) -> Result<Emission> {
    let norm = cfg.norm.clone().unwrap_or(NormSpec::Euclidean);
    let report = jsr_bounds(set, &norm, &bounds_config(cfg))?;
    let gaps = running_gaps(&report);
    let mut table = Table::new(&[
        "depth",
        "status",
        "upper",
        "norm_root",
        "lower",
        "rho_root",
        "running_gap",
        "nodes_visited",
        "nodes_pruned",
    ]);
    for (r, g) in report.records.iter().zip(&gaps) {
        table.rows.push(vec![
            r.depth.to_string(),
            status_name(r.status).into(),
            opt(r.upper),
            num(r.norm_root),
            num(r.lower),
            num(r.rho_root),
            num(*g),
            r.nodes_visited.to_string(),
            r.nodes_pruned.to_string(),
        ]);
    }
    let status = if report.complete { Status::Success } else { Status::Incomplete };
    Ok(Emission {
        report: json!({ "set": matrix_set_json(set), "bounds": report, "running_gap": gaps }),
        table,
        status,
    })
}

fn ensemble_config(cfg: &RunConfig) -> Result<EnsembleConfig> {
    Ok(EnsembleConfig {
        dim: cfg.dim,
        set_size: cfg.set_size,
        trials: cfg.trials,
        seed: cfg.seed()?,
        depth: cfg.depth,
        tol: cfg.tol,
        parallel: cfg.parallel(),
    })
}

fn reports_for(cfg: &RunConfig, check: Check) -> Result<Vec<IneqReport>> {
    let ens = ensemble_config(cfg)?;
    let reports = match check {
        Check::PowerIneq => {
            let specs = match &cfg.norm {
                Some(n) => vec![n.clone()],
                None => vec![NormSpec::Euclidean, NormSpec::VectorSup],
            };
            vec![power_inequality_ensemble(&ens, &specs)?]
        }
        Check::WeakerLemma => vec![weaker_lemma_ensemble(&ens)?, weaker_lemma_general_ensemble(&ens)?],
        Check::TraceIdentity => vec![trace_identity_ensemble(&ens)?],
        Check::Procesi => vec![procesi_ensemble(&EnsembleConfig {
            set_size: cfg.tuple_len,
            ..ens
        })?],
        Check::TheoremA => vec![c1_ensemble(&ens)?],
        Check::TheoremB => vec![theorem_b_ensemble(&ens, None)?],
        Check::OtherIneq => {
            let spec = cfg.norm.clone().unwrap_or(NormSpec::Euclidean);
            vec![other_inequality_ensemble(&ens, &spec)?]
        }
        Check::All => {
            let mut all = Vec::new();
            for c in Check::EACH {
                all.extend(reports_for(cfg, c)?);
            }
            all
        }
    };
    Ok(reports)
}

pub fn run_verify(cfg: &RunConfig, check: Check) -> Result<Emission> {
    let reports = reports_for(cfg, check)?;
    let mut table = Table::new(&["report", "statistic", "value"]);
    for r in &reports {
        let bound = match r.bound {
            Bound::Explicit(b) => num(b),
            Bound::Empirical => "empirical".into(),
        };
        let mut rows = vec![
            ("trials", r.trials.to_string()),
            ("evaluated", r.evaluated.to_string()),
            ("max_ratio", num(r.max_ratio)),
            ("max_ratio_witness", r.max_ratio_witness.clone().unwrap_or_default()),
            ("median_ratio", opt(r.median_ratio)),
            ("bound", bound),
            ("tol", num(r.tol)),
            ("violations", r.violations.to_string()),
            ("degenerate", r.degenerate.to_string()),
            ("skipped", r.skipped.to_string()),
        ];
        rows.extend(r.extra.iter().map(|(k, v)| (k.as_str(), num(*v))));
        for (k, v) in rows {
            table.rows.push(vec![r.name.clone(), k.to_string(), v]);
        }
    }
    let status = if reports.iter().all(IneqReport::passed) {
        Status::Success
    } else {
        Status::Violation
    };
    Ok(Emission {
        report: json!({ "check": check.name(), "passed": status == Status::Success, "reports": reports }),
        table,
        status,
    })
}

pub fn run_example_gripenberg(cfg: &RunConfig) -> Result<Emission> {
    let set = MatrixSet::gripenberg();
    let radii = spectral_radii_by_depth(&set, GRIPENBERG_POWERS, cfg.budget)?;
    let norm = cfg.norm.clone().unwrap_or(NormSpec::Euclidean);
    let bounds = jsr_bounds(&set, &norm, &bounds_config(cfg))?;
    let theorem_b = check_theorem_b(&set, cfg.depth, None, cfg.tol)?;
    let mut table = Table::new(&["n", "rho_power"]);
    for (i, r) in radii.iter().enumerate() {
        table.rows.push(vec![(i + 1).to_string(), num(*r)]);
    }
    let powers: Vec<Value> = radii
        .iter()
        .enumerate()
        .map(|(i, r)| json!({ "n": i + 1, "rho_power": r }))
        .collect();
    let status = if bounds.complete { Status::Success } else { Status::Incomplete };
    Ok(Emission {
        report: json!({
            "set": matrix_set_json(&set),
            "spectral_radii": powers,
            "bounds": bounds,
            "theorem_b": theorem_b,
        }),
        table,
        status,
    })
}

struct SweepTrial {
    gaps: Vec<f64>,
    running: Vec<f64>,
    complete: bool,
}

fn median(mut xs: Vec<f64>) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    Some(if n % 2 == 1 { xs[n / 2] } else { 0.5 * (xs[n / 2 - 1] + xs[n / 2]) })
}

/// Exhaustive bounds for `--trials` random sets; per depth, the median and
/// largest gap `‖Σⁿ‖^{1/n} − max_{j≤n} ρ(Σʲ)^{1/j}` and its running minimum.
pub fn run_sweep(cfg: &RunConfig) -> Result<Emission> {
    let seed = cfg.seed()?;
    let norm = cfg.norm.clone().unwrap_or(NormSpec::Euclidean);
    let config = BoundsConfig {
        node_budget: cfg.budget,
        ..BoundsConfig::exhaustive(cfg.depth)
    };
    let trials = map_indexed(cfg.trials, cfg.parallel(), |t| -> Result<SweepTrial> {
        let set = gaussian_set(&mut trial_rng(seed, t as u64), cfg.dim, cfg.set_size, true);
        let report = jsr_bounds(&set, &norm, &config)?;
        let gaps = report
            .records
            .iter()
            .map(|r| r.upper.map(|u| u - r.lower).unwrap_or(f64::INFINITY))
            .collect();
        Ok(SweepTrial {
            gaps,
            running: running_gaps(&report),
            complete: report.complete,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let mut table = Table::new(&[
        "depth",
        "trials",
        "median_gap",
        "max_gap",
        "median_running_gap",
        "max_running_gap",
    ]);
    let mut per_depth = Vec::with_capacity(cfg.depth);
    for n in 0..cfg.depth {
        let gaps: Vec<f64> = trials.iter().map(|t| t.gaps[n]).filter(|g| g.is_finite()).collect();
        let running: Vec<f64> = trials.iter().map(|t| t.running[n]).collect();
        let covered = gaps.len();
        let max_gap = gaps.iter().copied().fold(None, |m: Option<f64>, g| Some(m.map_or(g, |m| m.max(g))));
        let max_running = running.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let median_gap = median(gaps);
        let median_running = median(running);
        table.rows.push(vec![
            (n + 1).to_string(),
            covered.to_string(),
            opt(median_gap),
            opt(max_gap),
            opt(median_running),
            num(max_running),
        ]);
        per_depth.push(json!({
            "depth": n + 1,
            "trials": covered,
            "median_gap": median_gap,
            "max_gap": max_gap,
            "median_running_gap": median_running,
            "max_running_gap": max_running,
        }));
    }
    let incomplete = trials.iter().filter(|t| !t.complete).count();
    let status = if incomplete == 0 { Status::Success } else { Status::Incomplete };
    Ok(Emission {
        report: json!({
            "norm": norm.label(),
            "incomplete_trials": incomplete,
            "depths": per_depth,
        }),
        table,
        status,
    })
}

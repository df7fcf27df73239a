//! The experiment catalog: parameter tables, cross-parameter preconditions and the suites.

mod counterexamples;
mod heat;
mod inequalities;
mod lp;

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;
use serde_json::Value as Json;

use crate::config::{resolve, Diagnostic, Entry, Interval, Kind, Origin, Param, Params};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Experiment {
    HeatVerify,
    RieszVerify,
    LpVerify,
    HardySweep,
    EquivalenceSweep,
    Schur,
    Counterexample71,
    Counterexample72,
}

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Experiment::HeatVerify,
        Experiment::RieszVerify,
        Experiment::LpVerify,
        Experiment::HardySweep,
        Experiment::EquivalenceSweep,
        Experiment::Schur,
        Experiment::Counterexample71,
        Experiment::Counterexample72,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::HeatVerify => "heat-verify",
            Experiment::RieszVerify => "riesz-verify",
            Experiment::LpVerify => "lp-verify",
            Experiment::HardySweep => "hardy-sweep",
            Experiment::EquivalenceSweep => "equivalence-sweep",
            Experiment::Schur => "schur",
            Experiment::Counterexample71 => "counterexample-71",
            Experiment::Counterexample72 => "counterexample-72",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.name() == name)
    }

    /// The statement each suite checks; printed in every report header.
    pub fn statement(self) -> &'static str {
        match self {
            Experiment::HeatVerify => {
                "two-sided Gaussian bound for the exterior-ball Dirichlet heat kernel with boundary factors, and the ordering 0 ≤ half-space ≤ exterior ≤ free kernel"
            }
            Experiment::RieszVerify => "Dirichlet Riesz potential kernel bound on the exterior of the ball",
            Experiment::LpVerify => {
                "Littlewood–Paley square function equivalence for the Dirichlet Laplacian and Gaussian decay of the heat-projector kernel difference"
            }
            Experiment::HardySweep => "Hardy inequalities with boundary-distance weights for the whole-space and Dirichlet fractional Laplacians",
            Experiment::EquivalenceSweep => {
                "equivalence of Dirichlet and whole-space fractional Sobolev norms for 1 < p < ∞, 0 ≤ s < min(1 + 1/p, d/p)"
            }
            Experiment::Schur => "weighted Schur test bounds on the region kernels of the Hardy argument",
            Experiment::Counterexample71 => "failure of norm equivalence for 1 + 1/p ≤ s < d/p via the boundary-weighted Hardy norm",
            Experiment::Counterexample72 => "failure of gradient-norm equivalence for p > d via truncated low-frequency eigenmodes",
        }
    }

    pub fn params(self) -> Vec<Param> {
        let mut table = match self {
            Experiment::HeatVerify => heat::heat_params(),
            Experiment::RieszVerify => heat::riesz_params(),
            Experiment::LpVerify => lp::params(),
            Experiment::HardySweep => inequalities::hardy_params(),
            Experiment::EquivalenceSweep => inequalities::equivalence_params(),
            Experiment::Schur => inequalities::schur_params(),
            Experiment::Counterexample71 => counterexamples::endpoint_params(),
            Experiment::Counterexample72 => counterexamples::gradient_params(),
        };
        table.push(Param { key: "seed", kind: Kind::Int { min: 0, max: i64::MAX }, default: Some("0"), help: "random seed" });
        table
    }

    fn preconditions(self, p: &Params) -> Vec<Diagnostic> {
        match self {
            Experiment::HeatVerify => heat::heat_check(p),
            Experiment::RieszVerify => heat::riesz_check(p),
            Experiment::LpVerify => lp::check(p),
            Experiment::HardySweep => inequalities::hardy_check(p),
            Experiment::EquivalenceSweep => inequalities::equivalence_check(p),
            Experiment::Schur => inequalities::schur_check(p),
            Experiment::Counterexample71 => counterexamples::endpoint_check(p),
            Experiment::Counterexample72 => counterexamples::gradient_check(p),
        }
    }

    fn run(self, cfg: &ExperimentConfig, run: &mut Run) -> extlap::Result<()> {
        match self {
            Experiment::HeatVerify => heat::heat_verify(cfg, run),
            Experiment::RieszVerify => heat::riesz_verify(cfg, run),
            Experiment::LpVerify => lp::lp_verify(cfg, run),
            Experiment::HardySweep => inequalities::hardy_sweep(cfg, run),
            Experiment::EquivalenceSweep => inequalities::equivalence_sweep(cfg, run),
            Experiment::Schur => inequalities::schur(cfg, run),
            Experiment::Counterexample71 => counterexamples::endpoint(cfg, run),
            Experiment::Counterexample72 => counterexamples::gradient(cfg, run),
        }
    }
}

/// A fully validated run request. The seed is part of the parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub params: Params,
}

impl ExperimentConfig {
    /// Validates settings (file first, then arguments, then flags) for one experiment.
    pub fn build(experiment: Experiment, entries: &[Entry]) -> Result<Self, Vec<Diagnostic>> {
        let mut diags = Vec::new();
        let mut kept = Vec::new();
        for e in entries {
            if e.key == "experiment" {
                if e.value != experiment.name() {
                    diags.push(Diagnostic::new(
                        e.origin.clone(),
                        format!("this file configures `{}`, not `{}`", e.value, experiment.name()),
                    ));
                }
            } else {
                kept.push(e.clone());
            }
        }
        match resolve(&experiment.params(), &kept) {
            Ok(params) if diags.is_empty() => {
                let pre = experiment.preconditions(&params);
                if pre.is_empty() {
                    Ok(Self { experiment, params })
                } else {
                    Err(pre)
                }
            }
            Ok(_) => Err(diags),
            Err(more) => {
                diags.extend(more);
                Err(diags)
            }
        }
    }

    pub fn seed(&self) -> u64 {
        self.params.int("seed") as u64
    }

    /// Text hashed into the config hash: the experiment and every resolved parameter.
    pub fn canonical(&self) -> String {
        format!("experiment={}\n{}", self.experiment.name(), self.params.canonical())
    }
}

/// A seed given with `--seed`, applied after the file and arguments.
pub fn seed_entry(seed: u64) -> Entry {
    Entry { key: "seed".into(), value: seed.to_string(), origin: Origin::Flag("--seed") }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Provenance of one stage: the library operations it called, with which tolerances, and how
/// long it took.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stage {
    pub name: String,
    pub operations: Vec<String>,
    pub tolerances: BTreeMap<String, f64>,
    pub results: Vec<String>,
    pub seconds: f64,
}

/// Everything a suite produces.
#[derive(Debug, Default)]
pub struct Run {
    pub results: serde_json::Map<String, Json>,
    pub checks: Vec<Check>,
    pub tables: Vec<(String, String)>,
    pub plots: Vec<(String, String)>,
    pub stages: Vec<Stage>,
    current: Option<(Stage, Instant)>,
}

impl Run {
    /// Opens a stage; results, tables and plots recorded until the next `stage` call belong to it.
    pub fn stage(&mut self, name: &str, operations: &[&str], tolerances: &[(&str, f64)]) {
        self.close_stage();
        let stage = Stage {
            name: name.into(),
            operations: operations.iter().map(|s| s.to_string()).collect(),
            tolerances: tolerances.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            results: Vec::new(),
            seconds: 0.0,
        };
        self.current = Some((stage, Instant::now()));
    }

    fn close_stage(&mut self) {
        if let Some((mut s, t0)) = self.current.take() {
            s.seconds = t0.elapsed().as_secs_f64();
            self.stages.push(s);
        }
    }

    fn note(&mut self, what: String) {
        if let Some((s, _)) = &mut self.current {
            s.results.push(what);
        }
    }

    pub fn result(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("report values serialize");
        self.results.insert(key.into(), v);
        self.note(format!("results.{key}"));
    }

    pub fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), passed, detail: detail.into() });
        self.note(format!("check: {name}"));
    }

    pub fn table(&mut self, name: &str, csv: String) {
        self.note(format!("tables/{name}.csv"));
        self.tables.push((name.into(), csv));
    }

    pub fn plot(&mut self, name: &str, dat: String) {
        self.note(format!("plotdata/{name}.dat"));
        self.plots.push((name.into(), dat));
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Runs a suite. Library errors abort the run; failed assertions are recorded as checks.
pub fn execute(cfg: &ExperimentConfig) -> extlap::Result<Run> {
    let mut run = Run::default();
    cfg.experiment.run(cfg, &mut run)?;
    run.close_stage();
    Ok(run)
}

// ---- helpers shared by the suites ----

const POSITIVE: Interval = Interval::left_open(0.0, f64::INFINITY);
const FRACTION: Interval = Interval::open(0.0, 1.0);
const EXPONENT: Interval = Interval::open(1.0, f64::INFINITY);

fn param(key: &'static str, kind: Kind, default: &'static str, help: &'static str) -> Param {
    Param { key, kind, default: Some(default), help }
}

fn dim(default: &'static str, max: i64) -> Param {
    param("d", Kind::Int { min: 3, max }, default, "space dimension")
}

fn only_d3(p: &Params, diags: &mut Vec<Diagnostic>) {
    if p.int("d") != 3 {
        diags.push(p.diag("d", "this experiment is implemented for d = 3 only"));
    }
}

/// The window 0 ≤ s < min(1 + 1/p, d/p) of the norm equivalence.
fn in_equivalence_window(d: u32, p: f64, s: f64) -> bool {
    s >= 0.0 && s < (1.0 + 1.0 / p).min(d as f64 / p)
}

fn spread(v: &[f64]) -> f64 {
    let mx = v.iter().copied().fold(0.0, f64::max);
    let mn = v.iter().copied().fold(f64::INFINITY, f64::min);
    mx / mn
}

fn csv(header: &str, rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = format!("{header}\n");
    for r in rows {
        out.push_str(&r.join(","));
        out.push('\n');
    }
    out
}

fn dat(header: &str, rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut out = format!("# {header}\n");
    for r in rows {
        out.push_str(&r.iter().map(|v| format!("{v:e}")).collect::<Vec<_>>().join(" "));
        out.push('\n');
    }
    out
}

fn num(x: f64) -> String {
    format!("{x:e}")
}

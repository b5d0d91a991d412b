//! End-to-end runs: configuration, the verification pipeline and the
//! versioned report.

use std::collections::BTreeMap;
use std::fmt::Write;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cegar::{cegar_loop, CegarError, IterationRecord, Mode};
use crate::checkers::{check, CheckError, CheckOptions, Engine, Limits, Outcome, Stats, Verdict};
use crate::diagnostic::Diagnostic;
use crate::model::{Environment, ErrorSpec, Path, Statechart, Value};
use crate::parser::{parse_error_spec, parse_statechart};
use crate::smt::{SmtError, SolverConfig};

pub const REPORT_SCHEMA: &str = "hsc-report/1";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Abstraction {
    #[default]
    None,
    Stt,
    Gen,
}

impl Abstraction {
    pub const ALL: [Abstraction; 3] = [Abstraction::None, Abstraction::Stt, Abstraction::Gen];

    pub fn mode(self) -> Option<Mode> {
        match self {
            Abstraction::None => None,
            Abstraction::Stt => Some(Mode::Stt),
            Abstraction::Gen => Some(Mode::Gen),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Abstraction::None => "none",
            Abstraction::Stt => "stt",
            Abstraction::Gen => "gen",
        }
    }
}

impl std::fmt::Display for Abstraction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Abstraction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Abstraction::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown abstraction `{s}` (expected none, stt or gen)"))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub model: PathBuf,
    pub spec: PathBuf,
    pub engine: Engine,
    pub abstraction: Abstraction,
    pub limits: Limits,
    pub solver: SolverConfig,
    pub env: Environment,
    pub format: OutputFormat,
}

impl RunConfig {
    pub fn new(model: impl Into<PathBuf>, spec: impl Into<PathBuf>) -> Self {
        RunConfig {
            model: model.into(),
            spec: spec.into(),
            engine: Engine::Oao,
            abstraction: Abstraction::Gen,
            limits: Limits::default(),
            solver: SolverConfig::default(),
            env: Environment::Closed,
            format: OutputFormat::Text,
        }
    }

    pub fn check_options(&self) -> CheckOptions {
        CheckOptions {
            env: self.env,
            limits: self.limits,
            solver: self.solver.clone(),
        }
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{rendered}")]
    Parse {
        path: PathBuf,
        rendered: String,
        diagnostics: Vec<Diagnostic>,
    },
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error(transparent)]
    Cegar(#[from] CegarError),
}

impl RunError {
    /// Short machine-readable kind.
    pub fn kind(&self) -> &'static str {
        match self {
            RunError::Read { .. } => "read",
            RunError::Parse { .. } => "parse",
            RunError::Check(CheckError::Smt(SmtError::Spawn { .. }))
            | RunError::Cegar(CegarError::Check(CheckError::Smt(SmtError::Spawn { .. }))) => "spawn",
            RunError::Check(CheckError::Smt(_)) | RunError::Cegar(CegarError::Check(CheckError::Smt(_))) => "solver",
            RunError::Check(_) => "check",
            RunError::Cegar(CegarError::RefinementStuck { .. }) => "refinement-stuck",
            RunError::Cegar(_) => "cegar",
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::json!({ "schema": REPORT_SCHEMA, "error": self.kind(), "message": self.to_string() });
        if let RunError::Parse { path, diagnostics, .. } = self {
            v["file"] = serde_json::json!(path);
            v["diagnostics"] = serde_json::json!(diagnostics);
        }
        v
    }
}

/// Result of the verification pipeline on an in-memory model.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub verdict: Verdict,
    pub records: Vec<IterationRecord>,
}

/// Checks `spec` with `engine`, directly or inside the refinement loop.
pub fn verify(
    sc: &Statechart,
    spec: &ErrorSpec,
    engine: Engine,
    abstraction: Abstraction,
    opts: &CheckOptions,
    on_iteration: &mut dyn FnMut(&IterationRecord),
) -> Result<RunOutcome, RunError> {
    match abstraction.mode() {
        None => Ok(RunOutcome {
            verdict: check(sc, spec, engine, opts)?,
            records: Vec::new(),
        }),
        Some(mode) => {
            let r = cegar_loop(sc, spec, mode, engine, opts, on_iteration)?;
            Ok(RunOutcome {
                verdict: r.verdict,
                records: r.records,
            })
        }
    }
}

pub fn load(config: &RunConfig) -> Result<(Statechart, ErrorSpec), RunError> {
    let read = |p: &PathBuf| {
        std::fs::read_to_string(p).map_err(|source| RunError::Read {
            path: p.clone(),
            source,
        })
    };
    let model_text = read(&config.model)?;
    let parse_err = |path: &PathBuf, d: Vec<Diagnostic>| RunError::Parse {
        path: path.clone(),
        rendered: d
            .iter()
            .map(|x| x.located(&path.display().to_string()))
            .collect::<Vec<_>>()
            .join("\n"),
        diagnostics: d,
    };
    let sc = parse_statechart(&model_text).map_err(|d| parse_err(&config.model, d))?;
    let spec_text = read(&config.spec)?;
    let spec = parse_error_spec(&spec_text, &sc).map_err(|d| parse_err(&config.spec, d))?;
    Ok((sc, spec))
}

/// Reads, checks and reports. Timing covers only the verification call.
pub fn run(config: &RunConfig) -> Result<Report, RunError> {
    run_with(config, &mut |_| {})
}

pub fn run_with(
    config: &RunConfig,
    on_iteration: &mut dyn FnMut(&IterationRecord),
) -> Result<Report, RunError> {
    let (sc, spec) = load(config)?;
    let start = Instant::now();
    let out = verify(&sc, &spec, config.engine, config.abstraction, &config.check_options(), on_iteration)?;
    let wall = start.elapsed();
    Ok(Report::new(&sc, config, out, wall))
}

/// Process exit code for a finished run.
pub fn exit_code(outcome: &Outcome) -> i32 {
    match outcome {
        Outcome::Safe => 0,
        Outcome::Unsafe(_) => 1,
        Outcome::BoundExhausted(_) | Outcome::ResourceExhausted(_) => 2,
    }
}

pub const EXIT_ERROR: i32 = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportStats {
    pub time_ms: f64,
    pub iterations: usize,
    pub confs_max: Option<usize>,
    pub confs_eve: Option<usize>,
    pub solver_queries: usize,
}

impl ReportStats {
    pub fn from_stats(s: &Stats, wall: Duration) -> Self {
        ReportStats {
            time_ms: wall.as_secs_f64() * 1e3,
            iterations: s.iterations,
            confs_max: s.confs_max,
            confs_eve: s.confs_eve,
            solver_queries: s.solver_queries,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    /// Transition that led here, `None` for the initial configuration.
    pub transition: Option<String>,
    pub transition_index: Option<usize>,
    pub active: Vec<String>,
    pub events: Vec<String>,
    pub variables: BTreeMap<String, serde_json::Value>,
}

/// Stable, versioned run report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub model: String,
    pub engine: Engine,
    pub abstraction: Abstraction,
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub stats: ReportStats,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<TraceStep>>,
    pub iterations: Vec<IterationRecord>,
    pub exit_code: i32,
}

impl Report {
    pub fn new(sc: &Statechart, config: &RunConfig, out: RunOutcome, wall: Duration) -> Self {
        let o = &out.verdict.outcome;
        Report {
            schema: REPORT_SCHEMA.into(),
            model: sc.name().into(),
            engine: config.engine,
            abstraction: config.abstraction,
            verdict: o.label().into(),
            bound: match o {
                Outcome::BoundExhausted(k) => Some(*k),
                _ => None,
            },
            reason: match o {
                Outcome::ResourceExhausted(r) => Some(r.clone()),
                _ => None,
            },
            stats: ReportStats::from_stats(&out.verdict.stats, wall),
            trace: o.path().map(|p| trace(sc, p)),
            iterations: out.records,
            exit_code: exit_code(o),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = write!(out, "{}: {}", self.model, self.verdict);
        if let Some(k) = self.bound {
            let _ = write!(out, " (no error path up to length {k})");
        }
        if let Some(r) = &self.reason {
            let _ = write!(out, " ({r})");
        }
        out.push('\n');
        let s = &self.stats;
        let _ = write!(
            out,
            "engine {} abstraction {}: time {:.1} ms, iterations {}",
            self.engine, self.abstraction, s.time_ms, s.iterations
        );
        if let (Some(m), Some(e)) = (s.confs_max, s.confs_eve) {
            let _ = write!(out, ", confs max {m} eve {e}");
        }
        let _ = writeln!(out, ", solver queries {}", s.solver_queries);
        if let Some(trace) = &self.trace {
            let _ = writeln!(out, "counterexample of length {}:", trace.len() - 1);
            for (i, st) in trace.iter().enumerate() {
                if let Some(t) = &st.transition {
                    let _ = writeln!(out, "  --[{t}]-->");
                }
                let vars: Vec<String> = st.variables.iter().map(|(k, v)| format!("{k}={v}")).collect();
                let _ = writeln!(
                    out,
                    "  {i}: {{{}}} events {{{}}} {}",
                    st.active.join(", "),
                    st.events.join(", "),
                    vars.join(" ")
                );
            }
        }
        out
    }

    /// Rebuilds the trace as a path of `sc`, for replay.
    pub fn path(&self, sc: &Statechart) -> Option<Path> {
        let trace = self.trace.as_ref()?;
        let config = |st: &TraceStep| -> Option<crate::model::Configuration> {
            Some(crate::model::Configuration {
                active: st.active.iter().map(|n| sc.state_id(n)).collect::<Option<_>>()?,
                events: st.events.iter().map(|n| sc.event_id(n)).collect::<Option<_>>()?,
                values: sc
                    .variables()
                    .iter()
                    .map(|v| match st.variables.get(&v.name)? {
                        serde_json::Value::Bool(b) => Some(Value::Bool(*b)),
                        n => n.as_i64().map(Value::Int),
                    })
                    .collect::<Option<_>>()?,
            })
        };
        let mut path = Path::new(config(&trace[0])?);
        for st in &trace[1..] {
            let t = crate::model::TransitionId(st.transition_index?);
            if t.0 >= sc.transitions().len() {
                return None;
            }
            path.push(t, config(st)?);
        }
        Some(path)
    }
}

pub fn trace(sc: &Statechart, p: &Path) -> Vec<TraceStep> {
    p.configurations
        .iter()
        .enumerate()
        .map(|(i, c)| TraceStep {
            transition: (i > 0).then(|| sc.transition_label(p.transitions[i - 1])),
            transition_index: (i > 0).then(|| p.transitions[i - 1].0),
            active: c.active.iter().map(|s| sc.state(*s).name.clone()).collect(),
            events: c.events.iter().map(|e| sc.event(*e).name.clone()).collect(),
            variables: sc
                .variables()
                .iter()
                .zip(&c.values)
                .map(|(d, v)| {
                    let j = match v {
                        Value::Bool(b) => serde_json::Value::Bool(*b),
                        Value::Int(i) => serde_json::Value::from(*i),
                    };
                    (d.name.clone(), j)
                })
                .collect(),
        })
        .collect()
}

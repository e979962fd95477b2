//! Command implementations behind the `dilemma` binary.
//!
//! Exit codes are stable: 0 success, 2 usage, 3 I/O, 4 validation,
//! 5 inconsistent constraints, 6 numeric domain.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use dilemma_core::index_model::EvaluationMode;
use dilemma_core::mc_oracle::{simulate_selection, SimulationConfig, SimulationResult};
use dilemma_core::scenario::{Scenario, ScenarioFile};
use dilemma_core::solver::{report_document, sweep, BoundKind, GridAxis, SweepRow};
use dilemma_core::survey::{score_csv, Instrument, SurveyBatch};
use serde::Serialize;
use thiserror::Error;

pub const DEFAULT_TRIALS: u64 = 1_000_000;
pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] dilemma_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use dilemma_core::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Core(E::InconsistentOrder { .. }) => 5,
            CliError::Core(
                E::InvalidParameter { .. } | E::DegeneratePrior(_) | E::ZeroEvidence | E::SamplingExhausted { .. },
            ) => 6,
            CliError::Core(_) => 4,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_owned(), source })
}

fn write_out(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|source| CliError::Io { path: path.to_owned(), source })
}

pub fn load_scenario(path: &Path, mode: Option<EvaluationMode>) -> CliResult<Scenario> {
    let scenario = Scenario::from_json(&read(path)?)?;
    Ok(match mode {
        Some(m) => scenario.with_mode(m),
        None => scenario,
    })
}

/// Formats `x` with six significant digits, no exponent, period separator.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

/// Structured output goes to `out` when given (with a text summary on
/// stdout), otherwise to stdout.
fn emit(structured: &str, summary: &str, out: Option<&Path>) -> CliResult<String> {
    match out {
        Some(path) => {
            write_out(path, structured)?;
            Ok(summary.to_owned())
        }
        None => Ok(structured.to_owned()),
    }
}

pub fn cmd_solve(scenario_path: &Path, mode: Option<EvaluationMode>, out: Option<&Path>) -> CliResult<String> {
    let scenario = load_scenario(scenario_path, mode)?;
    let doc = report_document(&scenario)?;
    let r = &doc.report;
    let mut summary = String::new();
    let _ = writeln!(summary, "scenario      {}", r.scenario);
    let _ = writeln!(summary, "mode, case    {}, {}", r.mode, r.case);
    for (name, v) in [
        ("p_em12", r.p_em12),
        ("p_pf21", r.p_pf21),
        ("p_cell_11", r.p_cell_11),
        ("p_cell_22", r.p_cell_22),
        ("indeterminate", r.indeterminate),
    ] {
        let _ = writeln!(summary, "{name:<13} {}", sig6(v));
    }
    for b in &r.bounds {
        let kind = match b.kind {
            BoundKind::Supremum => "sup",
            BoundKind::Infimum => "inf",
        };
        let _ = writeln!(summary, "{kind} {:<9} {}", b.name, sig6(b.value));
    }
    for n in &r.notes {
        let _ = writeln!(summary, "note: {n}");
    }
    emit(&to_json(&doc), &summary, out)
}

pub fn parse_grid(specs: &[String]) -> CliResult<Vec<GridAxis>> {
    if specs.is_empty() {
        return Err(CliError::Usage("sweep needs at least one --grid name=start:stop:step".into()));
    }
    specs.iter().map(|s| GridAxis::parse(s).map_err(|e| CliError::Usage(e.to_string()))).collect()
}

pub fn sweep_csv(axes: &[GridAxis], rows: &[SweepRow]) -> String {
    let mut out = String::new();
    let header: Vec<&str> = axes
        .iter()
        .map(|a| a.parameter.name())
        .chain(["p_em12", "p_pf21", "p_cell_11", "p_cell_22", "indeterminate"])
        .collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        let fields: Vec<String> = row
            .point
            .iter()
            .map(|(_, v)| *v)
            .chain([row.p_em12, row.p_pf21, row.p_cell_11, row.p_cell_22, row.indeterminate])
            .map(|v| format!("{v}"))
            .collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn cmd_sweep(
    scenario_path: &Path,
    mode: Option<EvaluationMode>,
    grid: &[String],
    out: Option<&Path>,
) -> CliResult<String> {
    let axes = parse_grid(grid)?;
    let scenario = load_scenario(scenario_path, mode)?;
    let rows = sweep(&scenario, &axes)?;
    let csv = sweep_csv(&axes, &rows);
    emit(&csv, &format!("{} rows written\n", rows.len()), out)
}

pub fn cmd_score(survey_path: &Path, instrument: Option<&Path>, lenient: bool, out: Option<&Path>) -> CliResult<String> {
    let instrument = match instrument {
        Some(p) => Instrument::from_json(&read(p)?)?,
        None => Instrument::canonical(),
    };
    let text = read(survey_path)?;
    let batch: SurveyBatch = score_csv(text.as_bytes(), &instrument, lenient)?;
    let mut summary = String::new();
    for r in &batch.respondents {
        let _ = writeln!(summary, "{:<16} raw {:>2}  p-index {}", r.respondent_id, r.raw_sum, sig6(r.p_index));
    }
    for s in &batch.skipped {
        let _ = writeln!(summary, "skipped line {}: {}", s.line, s.reason);
    }
    let _ = writeln!(summary, "aggregate p-index {}", sig6(batch.aggregate_p_index));
    emit(&to_json(&batch), &summary, out)
}

#[derive(Debug, Clone, Serialize)]
pub struct ClosedForm {
    pub p_em12: f64,
    pub p_pf21: f64,
    pub p_cell_11: f64,
    pub p_cell_22: f64,
    pub indeterminate: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulationDocument {
    pub inputs: ScenarioFile,
    pub closed_form: ClosedForm,
    pub simulation: SimulationResult,
}

pub fn cmd_simulate(
    scenario_path: &Path,
    mode: Option<EvaluationMode>,
    trials: Option<u64>,
    seed: Option<u64>,
    out: Option<&Path>,
) -> CliResult<String> {
    let scenario = load_scenario(scenario_path, mode)?;
    let doc = report_document(&scenario)?;
    let r = doc.report;
    let config = SimulationConfig {
        trials: trials.or(scenario.mc.map(|m| m.trials)).unwrap_or(DEFAULT_TRIALS),
        seed: seed.or(scenario.mc.map(|m| m.seed)).unwrap_or(DEFAULT_SEED),
        p_em12: r.p_em12,
        p_pf21: r.p_pf21,
    };
    if config.trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let simulation = simulate_selection(&config)?;
    let closed_form = ClosedForm {
        p_em12: r.p_em12,
        p_pf21: r.p_pf21,
        p_cell_11: r.p_cell_11,
        p_cell_22: r.p_cell_22,
        indeterminate: r.indeterminate,
    };
    let mut summary = String::new();
    let _ = writeln!(summary, "trials {}  seed {}  generator {}", simulation.trials, simulation.seed, simulation.generator);
    let _ = writeln!(summary, "{:<13} {:>12} {:>12}", "", "closed form", "empirical");
    for (name, a, b) in [
        ("p_cell_11", closed_form.p_cell_11, simulation.freq_cell_11),
        ("p_cell_22", closed_form.p_cell_22, simulation.freq_cell_22),
        ("indeterminate", closed_form.indeterminate, simulation.freq_indeterminate),
    ] {
        let _ = writeln!(summary, "{name:<13} {:>12} {:>12}", sig6(a), sig6(b));
    }
    let _ = writeln!(summary, "standard error {}", sig6(simulation.standard_error));
    let doc = SimulationDocument { inputs: scenario.source.clone(), closed_form, simulation };
    emit(&to_json(&doc), &summary, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(0.691), "0.691000");
        assert_eq!(sig6(0.0001234567), "0.000123457");
        assert_eq!(sig6(123.456789), "123.457");
        assert_eq!(sig6(0.0), "0");
        assert_eq!(sig6(10.0), "10.0000");
    }

    #[test]
    fn exit_codes_are_distinct() {
        let io = CliError::Io { path: "x".into(), source: std::io::Error::other("x") };
        let cycle = CliError::Core(dilemma_core::Error::InconsistentOrder { cycle: vec![] });
        let numeric = CliError::Core(dilemma_core::Error::ZeroEvidence);
        let schema = CliError::Core(dilemma_core::Error::Scenario("x".into()));
        let codes = [CliError::Usage("x".into()).exit_code(), io.exit_code(), schema.exit_code(), cycle.exit_code(), numeric.exit_code()];
        assert_eq!(codes, [2, 3, 4, 5, 6]);
    }
}

//! Equilibrium-selection analysis of a scenario.
//!
//! The two comparison events `em12` and `pf21` are treated as independent
//! Bernoulli draws. Cell (1,1) is selected when `em12` fires alone, cell
//! (2,2) when `pf21` fires alone; the remaining mass (both or neither) is
//! reported as indeterminate.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::constraints::ConstraintSet;
use crate::error::{Error, Result};
use crate::game::CellCoord;
use crate::index_model::{
    coefficient_cap, selection_factor, EvaluationMode, SelectionEvent, PUBLISHED_CORRUPTION_SCORE,
    PUBLISHED_EM12_COEFFICIENT, PUBLISHED_PF21_COEFFICIENT, PUBLISHED_PROFESSIONALISM_SCORE,
};
use crate::scenario::{EvidenceCase, Scenario, ScenarioFile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// Least upper bound over the open weight interval; never attained.
    Supremum,
    /// Greatest lower bound over the open weight interval; never attained.
    Infimum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedBound {
    pub name: String,
    pub kind: BoundKind,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionReport {
    pub scenario: String,
    pub mode: EvaluationMode,
    pub case: EvidenceCase,
    pub r: f64,
    pub s: f64,
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "Q")]
    pub q: f64,
    pub p_em12: f64,
    pub p_pf21: f64,
    pub p_cell_11: f64,
    pub p_cell_22: f64,
    pub indeterminate: f64,
    /// Equilibria under the declared constraints and underlining assumptions.
    pub nash_cells: BTreeSet<CellCoord>,
    pub undecided_cells: BTreeSet<CellCoord>,
    /// Equilibria once the evidence case's own constraint is applied.
    pub case_nash_cells: BTreeSet<CellCoord>,
    pub case_undecided_cells: BTreeSet<CellCoord>,
    pub bounds: Vec<NamedBound>,
    /// `p(e* | em12)` from the independence fixed point, if the prior allows it.
    pub independence_posterior: Option<f64>,
    pub notes: Vec<String>,
}

impl DecisionReport {
    pub fn bound(&self, name: &str) -> Option<f64> {
        self.bounds.iter().find(|b| b.name == name).map(|b| b.value)
    }
}

/// Self-describing report document: inputs echo, results, notes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub inputs: ScenarioFile,
    pub report: DecisionReport,
}

/// Constraint set for the scenario's evidence case. Underlining assumptions
/// that contradict the strong-evidence constraint are dropped and noted.
pub fn case_constraints(scenario: &Scenario, notes: &mut Vec<String>) -> Result<ConstraintSet> {
    let mut set = ConstraintSet::new(scenario.constraints.symbols().iter().cloned())?;
    for c in &scenario.base_constraints {
        set = set.add_constraint(c.clone())?;
    }
    match scenario.case {
        EvidenceCase::StrongEvidence => {
            set = set.add_constraint(scenario.strong.constraint.clone())?;
            for a in &scenario.underlining_assumptions {
                match set.add_constraint(a.clone()) {
                    Ok(next) => set = next,
                    Err(Error::InconsistentOrder { .. }) => notes.push(format!(
                        "underlining assumption {} > {} contradicts strong evidence {} > {} and is dropped",
                        a.left, a.right, scenario.strong.constraint.left, scenario.strong.constraint.right
                    )),
                    Err(e) => return Err(e),
                }
            }
        }
        EvidenceCase::WeakEvidence => {
            for a in &scenario.underlining_assumptions {
                set = set.add_constraint(a.clone())?;
            }
            set = set.add_constraint(scenario.weak.clone())?;
        }
    }
    Ok(set)
}

pub fn solve(scenario: &Scenario) -> Result<DecisionReport> {
    scenario.em_params.validate()?;
    scenario.pf_params.validate()?;
    let mode = scenario.mode;
    let mut notes = Vec::new();

    let em_cap = coefficient_cap(mode, SelectionEvent::Em12, scenario.em_params.score, scenario.em_params.variance)?;
    let pf_cap = coefficient_cap(mode, SelectionEvent::Pf21, scenario.pf_params.score, scenario.pf_params.variance)?;
    discrepancy_notes(scenario, &mut notes)?;

    let p_em12 = scenario.em_params.weight * em_cap;
    let case_set = case_constraints(scenario, &mut notes)?;
    let p_pf21 = match scenario.case {
        EvidenceCase::StrongEvidence => case_set.independent_chain_probability(&scenario.strong.chain)?,
        EvidenceCase::WeakEvidence => scenario.pf_params.weight * pf_cap,
    };

    let p_cell_11 = p_em12 * (1.0 - p_pf21);
    let p_cell_22 = p_pf21 * (1.0 - p_em12);
    let indeterminate = 1.0 - p_cell_11 - p_cell_22;

    let declared = scenario.game.pure_nash(&scenario.constraints)?;
    let by_case = scenario.game.pure_nash(&case_set)?;
    if declared.equilibria != by_case.equilibria {
        notes.push(format!(
            "{} changes the equilibrium set from {} to {}",
            scenario.case,
            fmt_cells(&declared.equilibria),
            fmt_cells(&by_case.equilibria)
        ));
    }

    let mut bounds = vec![NamedBound { name: "p_em12".into(), kind: BoundKind::Supremum, value: em_cap }];
    match scenario.case {
        EvidenceCase::StrongEvidence => {
            bounds.push(NamedBound {
                name: "p_cell_22".into(),
                kind: BoundKind::Infimum,
                value: p_pf21 * (1.0 - em_cap),
            });
        }
        EvidenceCase::WeakEvidence => {
            bounds.push(NamedBound { name: "p_pf21".into(), kind: BoundKind::Supremum, value: pf_cap });
            bounds.push(NamedBound { name: "p_cell_22".into(), kind: BoundKind::Supremum, value: pf_cap });
            bounds.push(NamedBound { name: "p_cell_11".into(), kind: BoundKind::Supremum, value: em_cap });
        }
    }

    let independent: Vec<usize> =
        (0..scenario.event_space.len()).filter(|&k| k != scenario.distinguished_event).collect();
    let independence_posterior = match scenario.event_space.independence_fixed_point(&independent) {
        Ok(a) => Some(a),
        Err(e) => {
            notes.push(format!("independence fixed point unavailable: {e}"));
            None
        }
    };

    Ok(DecisionReport {
        scenario: scenario.name.clone(),
        mode,
        case: scenario.case,
        r: scenario.em_params.weight,
        s: scenario.pf_params.weight,
        c: scenario.em_params.score,
        q: scenario.pf_params.score,
        p_em12,
        p_pf21,
        p_cell_11,
        p_cell_22,
        indeterminate,
        nash_cells: declared.equilibria,
        undecided_cells: declared.undecided_cells,
        case_nash_cells: by_case.equilibria,
        case_undecided_cells: by_case.undecided_cells,
        bounds,
        independence_posterior,
        notes,
    })
}

pub fn report_document(scenario: &Scenario) -> Result<ReportDocument> {
    Ok(ReportDocument { inputs: scenario.source.clone(), report: solve(scenario)? })
}

fn discrepancy_notes(scenario: &Scenario, notes: &mut Vec<String>) -> Result<()> {
    let variance = scenario.em_params.variance;
    let k_c = selection_factor(PUBLISHED_CORRUPTION_SCORE, variance)?;
    let k_q = selection_factor(PUBLISHED_PROFESSIONALISM_SCORE, variance)?;
    match scenario.mode {
        EvaluationMode::Published => notes.push(format!(
            "published coefficients {PUBLISHED_EM12_COEFFICIENT:.4} (C = 3.4) and {PUBLISHED_PF21_COEFFICIENT:.4} (Q = 6.5) \
             are used verbatim; the tail integral gives k(3.4) = {k_c:.4} and k(6.5) = {k_q:.4}"
        )),
        EvaluationMode::Computed => {
            notes.push(format!(
                "computed k(3.4) = {k_c:.4} differs from the published {PUBLISHED_EM12_COEFFICIENT:.4}; \
                 computed k(6.5) = {k_q:.4} differs from the published {PUBLISHED_PF21_COEFFICIENT:.4}"
            ));
            if PUBLISHED_EM12_COEFFICIENT > PUBLISHED_PF21_COEFFICIENT {
                notes.push(
                    "the published pair decreases with the score while k(score) is strictly increasing".into(),
                );
            }
        }
    }
    Ok(())
}

fn fmt_cells(cells: &BTreeSet<CellCoord>) -> String {
    let inner: Vec<String> = cells.iter().map(|c| format!("({},{})", c.row, c.col)).collect();
    format!("{{{}}}", inner.join(", "))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SweepParameter {
    #[serde(rename = "r")]
    R,
    #[serde(rename = "s")]
    S,
    #[serde(rename = "C")]
    C,
    #[serde(rename = "Q")]
    Q,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::R => "r",
            SweepParameter::S => "s",
            SweepParameter::C => "C",
            SweepParameter::Q => "Q",
        }
    }
}

impl std::str::FromStr for SweepParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "r" => Ok(SweepParameter::R),
            "s" => Ok(SweepParameter::S),
            "C" | "c" => Ok(SweepParameter::C),
            "Q" | "q" => Ok(SweepParameter::Q),
            other => Err(Error::Scenario(format!("unknown sweep parameter `{other}` (expected r, s, C or Q)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridAxis {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
}

impl GridAxis {
    /// Parses `name=start:stop:step`, stop inclusive.
    pub fn parse(spec: &str) -> Result<Self> {
        let bad = |why: &str| Error::Scenario(format!("grid `{spec}`: {why} (expected name=start:stop:step)"));
        let (name, range) = spec.split_once('=').ok_or_else(|| bad("missing `=`"))?;
        let parameter: SweepParameter = name.trim().parse()?;
        let parts: Vec<f64> = range
            .split(':')
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad("non-numeric bound")))
            .collect::<Result<_>>()?;
        let [start, stop, step] = parts[..] else { return Err(bad("need three fields")) };
        if step.is_nan() || step <= 0.0 || !start.is_finite() || !stop.is_finite() {
            return Err(bad("step must be positive and bounds finite"));
        }
        if stop < start {
            return Err(bad("stop below start"));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        let values = (0..count).map(|i| start + i as f64 * step).collect();
        Ok(Self { parameter, values })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub point: Vec<(SweepParameter, f64)>,
    pub p_em12: f64,
    pub p_pf21: f64,
    pub p_cell_11: f64,
    pub p_cell_22: f64,
    pub indeterminate: f64,
}

/// Cartesian product of the axes, first axis outermost.
pub fn grid_points(axes: &[GridAxis]) -> Result<Vec<Vec<(SweepParameter, f64)>>> {
    if axes.is_empty() || axes.iter().any(|a| a.values.is_empty()) {
        return Err(Error::EmptyGrid);
    }
    let mut points = vec![Vec::new()];
    for axis in axes {
        points = points
            .into_iter()
            .flat_map(|prefix| {
                axis.values.iter().map(move |&v| {
                    let mut p = prefix.clone();
                    p.push((axis.parameter, v));
                    p
                })
            })
            .collect();
    }
    Ok(points)
}

fn solve_point(scenario: &Scenario, point: &[(SweepParameter, f64)]) -> Result<SweepRow> {
    let get = |which| point.iter().rev().find(|(p, _)| *p == which).map(|&(_, v)| v);
    let at = scenario.with_parameters(
        get(SweepParameter::R),
        get(SweepParameter::S),
        get(SweepParameter::C),
        get(SweepParameter::Q),
    )?;
    let r = solve(&at)?;
    Ok(SweepRow {
        point: point.to_vec(),
        p_em12: r.p_em12,
        p_pf21: r.p_pf21,
        p_cell_11: r.p_cell_11,
        p_cell_22: r.p_cell_22,
        indeterminate: r.indeterminate,
    })
}

/// One row per grid point in lexicographic grid order.
pub fn sweep(scenario: &Scenario, axes: &[GridAxis]) -> Result<Vec<SweepRow>> {
    let points = grid_points(axes)?;
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        points.par_iter().map(|p| solve_point(scenario, p)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        points.iter().map(|p| solve_point(scenario, p)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cells(list: &[(usize, usize)]) -> BTreeSet<CellCoord> {
        list.iter().map(|&(r, c)| CellCoord::new(r, c)).collect()
    }

    #[test]
    fn strong_evidence_published_mode() {
        let rep = solve(&Scenario::ipd()).unwrap();
        assert_eq!(rep.p_pf21, 1.0);
        assert_eq!(rep.p_cell_11, 0.0);
        assert!((rep.p_em12 - 0.3090 * 0.5).abs() < 1e-15);
        assert!((rep.bound("p_cell_22").unwrap() - 0.6910).abs() < 1e-12);
        assert_eq!(rep.nash_cells, cells(&[(0, 0), (1, 1)]));
        assert_eq!(rep.case_nash_cells, cells(&[(1, 1)]));
        assert!(rep.notes.iter().any(|n| n.contains("dropped")));
        assert_eq!(rep.independence_posterior, Some(1.0 / 3.0));
    }

    #[test]
    fn weak_evidence_published_mode() {
        let base = Scenario::ipd().with_case(EvidenceCase::WeakEvidence);
        for (r, s) in [(0.01, 0.99), (0.5, 0.5), (0.99, 0.01), (0.999, 0.999)] {
            let rep = solve(&base.with_parameters(Some(r), Some(s), None, None).unwrap()).unwrap();
            assert!(rep.p_cell_22 < 0.2999);
            assert!(rep.p_cell_11 < 0.3090);
            assert!(rep.p_pf21 < 0.30);
            assert_eq!(rep.case_nash_cells, cells(&[(0, 0), (1, 1)]));
        }
    }

    #[test]
    fn computed_mode_half_weight() {
        let s = Scenario::ipd().with_mode(EvaluationMode::Computed);
        let rep = solve(&s).unwrap();
        assert!((rep.p_em12 - 0.1200).abs() < 5e-4);
        assert!((rep.p_cell_22 - 0.8800).abs() < 5e-4);
        assert!(rep.notes.iter().any(|n| n.contains("differs from the published")));
    }

    #[test]
    fn published_mode_rejects_other_scores() {
        let s = Scenario::ipd().with_parameters(None, None, Some(5.0), None).unwrap();
        assert!(matches!(solve(&s), Err(Error::InvalidParameter { .. })));
    }

    #[test]
    fn selection_masses_sum_to_one() {
        let base = Scenario::ipd();
        for case in [EvidenceCase::StrongEvidence, EvidenceCase::WeakEvidence] {
            for mode in [EvaluationMode::Computed, EvaluationMode::Published] {
                let rep = solve(&base.with_case(case).with_mode(mode)).unwrap();
                assert!((rep.p_cell_11 + rep.p_cell_22 + rep.indeterminate - 1.0).abs() < 1e-12);
                assert!((0.0..=1.0).contains(&rep.indeterminate));
            }
        }
    }

    #[test]
    fn grid_parsing() {
        let a = GridAxis::parse("r=0.1:0.9:0.1").unwrap();
        assert_eq!(a.values.len(), 9);
        assert_eq!(a.parameter, SweepParameter::R);
        assert!(GridAxis::parse("r=0.1:0.9").is_err());
        assert!(GridAxis::parse("x=0:1:0.5").is_err());
        assert!(GridAxis::parse("r=0:1:0").is_err());
        assert!(GridAxis::parse("r0:1:0.5").is_err());
        assert_eq!(GridAxis::parse("C=2:2:1").unwrap().values, vec![2.0]);
    }

    #[test]
    fn sweep_r_is_decreasing_in_cell_22() {
        let rows = sweep(&Scenario::ipd(), &[GridAxis::parse("r=0.1:0.9:0.1").unwrap()]).unwrap();
        assert_eq!(rows.len(), 9);
        assert!(rows.windows(2).all(|w| w[1].p_cell_22 < w[0].p_cell_22));
    }

    #[test]
    fn sweep_single_point_matches_solve() {
        let s = Scenario::ipd();
        let rows = sweep(&s, &[GridAxis::parse("r=0.5:0.5:1").unwrap()]).unwrap();
        let rep = solve(&s).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!((rows[0].p_em12, rows[0].p_cell_22), (rep.p_em12, rep.p_cell_22));
    }

    #[test]
    fn sweep_c_in_computed_mode_is_increasing() {
        let s = Scenario::ipd().with_mode(EvaluationMode::Computed);
        let rows = sweep(&s, &[GridAxis::parse("C=1.5:9.5:0.5").unwrap()]).unwrap();
        assert!(rows.windows(2).all(|w| w[1].p_em12 > w[0].p_em12));
    }

    #[test]
    fn sweep_two_axes_lexicographic() {
        let s = Scenario::ipd().with_case(EvidenceCase::WeakEvidence);
        let rows = sweep(
            &s,
            &[GridAxis::parse("r=0.2:0.6:0.2").unwrap(), GridAxis::parse("s=0.1:0.3:0.1").unwrap()],
        )
        .unwrap();
        assert_eq!(rows.len(), 9);
        let keys: Vec<(f64, f64)> = rows.iter().map(|r| (r.point[0].1, r.point[1].1)).collect();
        let mut sorted = keys.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(keys, sorted);
        assert!(sweep(&s, &[]).is_err());
    }
}

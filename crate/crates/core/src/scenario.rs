//! Scenario documents: the JSON form of a split-player dilemma and its
//! validation into a [`Scenario`].

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::bayes::{ComparisonEvent, EventSpace};
use crate::constraints::{ConstraintProbability, ConstraintSet, DominanceConstraint};
use crate::error::{Error, Result};
use crate::game::OrdinalGame;
use crate::index_model::{EvaluationMode, IndexParameters, SCALE_VARIANCE};

/// The bundled split-player police dilemma.
pub const IPD_SCENARIO_JSON: &str = include_str!("../../../scenarios/ipd.json");

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvidenceCase {
    /// The column player's comparison is certain; the chain product settles `pf21`.
    StrongEvidence,
    /// Only a lower bound is known; `pf21` comes from the index model.
    WeakEvidence,
}

impl std::fmt::Display for EvidenceCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EvidenceCase::StrongEvidence => "strong_evidence",
            EvidenceCase::WeakEvidence => "weak_evidence",
        })
    }
}

// ---------------------------------------------------------------------------
// File schema
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub schema_version: u32,
    pub name: String,
    pub game: GameSpec,
    pub constraints: Vec<ConstraintSpec>,
    #[serde(default)]
    pub underlining_assumptions: Vec<ConstraintSpec>,
    pub event_space: EventSpaceSpec,
    pub comparison_events: ComparisonEventsSpec,
    pub evidence: EvidenceSpec,
    pub parameters: ParameterSpec,
    pub case: EvidenceCase,
    pub mode: EvaluationMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mc: Option<McSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub row_player: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub col_player: Option<String>,
    pub row_strategies: Vec<String>,
    pub col_strategies: Vec<String>,
    /// `payoffs[i][j] = [row symbol, column symbol]`.
    pub payoffs: Vec<Vec<(String, String)>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintSpec {
    pub left: String,
    pub right: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probability: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower_bound: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PriorSpec {
    Named(String),
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventSpaceSpec {
    pub events: Vec<String>,
    pub prior: PriorSpec,
    /// Index of the event left free in the independence fixed point.
    #[serde(default)]
    pub distinguished: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairSpec {
    pub left: String,
    pub right: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComparisonEventsSpec {
    pub em12: PairSpec,
    pub pf21: PairSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrongEvidenceSpec {
    pub constraint: PairSpec,
    pub chain: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeakEvidenceSpec {
    pub left: String,
    pub right: String,
    pub lower_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvidenceSpec {
    pub strong: StrongEvidenceSpec,
    pub weak: WeakEvidenceSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParameterSpec {
    pub r: f64,
    pub s: f64,
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "Q")]
    pub q: f64,
    #[serde(default = "default_variance")]
    pub variance: f64,
}

fn default_variance() -> f64 {
    SCALE_VARIANCE
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSpec {
    pub trials: u64,
    pub seed: u64,
}

impl ConstraintSpec {
    fn to_constraint(&self, field: &str) -> Result<DominanceConstraint> {
        let probability = match (self.probability, self.lower_bound) {
            (Some(p), None) => ConstraintProbability::Point(p),
            (None, Some(b)) => ConstraintProbability::LowerBound(b),
            _ => {
                return Err(Error::Scenario(format!(
                    "{field}: constraint {} > {} needs exactly one of `probability` or `lower_bound`",
                    self.left, self.right
                )))
            }
        };
        Ok(DominanceConstraint {
            left: self.left.clone(),
            right: self.right.clone(),
            probability,
            label: self.label.clone(),
        })
    }
}

// ---------------------------------------------------------------------------
// Validated scenario
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct StrongEvidence {
    pub constraint: DominanceConstraint,
    pub chain: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub game: OrdinalGame,
    /// Declared constraints plus underlining assumptions.
    pub constraints: ConstraintSet,
    pub base_constraints: Vec<DominanceConstraint>,
    pub underlining_assumptions: Vec<DominanceConstraint>,
    pub event_space: EventSpace,
    pub distinguished_event: usize,
    pub em12: ComparisonEvent,
    pub pf21: ComparisonEvent,
    pub strong: StrongEvidence,
    pub weak: DominanceConstraint,
    pub em_params: IndexParameters,
    pub pf_params: IndexParameters,
    pub case: EvidenceCase,
    pub mode: EvaluationMode,
    pub mc: Option<McSpec>,
    /// The file this scenario was built from, echoed into reports.
    pub source: ScenarioFile,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: ScenarioFile = serde_json::from_str(text).map_err(|e| Error::Scenario(e.to_string()))?;
        Self::from_file(file)
    }

    pub fn ipd() -> Self {
        Self::from_json(IPD_SCENARIO_JSON).expect("bundled scenario is valid")
    }

    pub fn from_file(file: ScenarioFile) -> Result<Self> {
        if file.schema_version != SCHEMA_VERSION {
            return Err(Error::Scenario(format!(
                "schema_version: expected {SCHEMA_VERSION}, found {}",
                file.schema_version
            )));
        }
        let g = &file.game;
        let game = OrdinalGame::new(g.row_strategies.clone(), g.col_strategies.clone(), g.payoffs.clone())
            .map_err(|e| Error::Scenario(format!("game: {e}")))?;
        let symbols = game.symbol_ids();
        let known: BTreeSet<&str> = symbols.iter().map(String::as_str).collect();
        let check_symbol = |field: &str, id: &str| {
            if known.contains(id) {
                Ok(())
            } else {
                Err(Error::Scenario(format!("{field}: unknown payoff symbol `{id}`")))
            }
        };

        let base_constraints = file
            .constraints
            .iter()
            .enumerate()
            .map(|(i, c)| c.to_constraint(&format!("constraints[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        let underlining_assumptions = file
            .underlining_assumptions
            .iter()
            .enumerate()
            .map(|(i, c)| c.to_constraint(&format!("underlining_assumptions[{i}]")))
            .collect::<Result<Vec<_>>>()?;

        let mut constraints = ConstraintSet::new(symbols.iter().cloned())?;
        for c in base_constraints.iter().chain(&underlining_assumptions) {
            constraints = constraints.add_constraint(c.clone())?;
        }

        let es = &file.event_space;
        let prior = match &es.prior {
            PriorSpec::Named(n) if n == "uniform" => vec![1.0 / es.events.len().max(1) as f64; es.events.len()],
            PriorSpec::Named(n) => return Err(Error::Scenario(format!("event_space.prior: unknown prior `{n}`"))),
            PriorSpec::Explicit(v) => v.clone(),
        };
        let event_space = EventSpace::new(es.events.clone(), prior)
            .map_err(|e| Error::Scenario(format!("event_space: {e}")))?;
        if es.distinguished >= event_space.len() {
            return Err(Error::Scenario(format!("event_space.distinguished: index {} out of range", es.distinguished)));
        }

        let ce = &file.comparison_events;
        for (field, pair) in [("comparison_events.em12", &ce.em12), ("comparison_events.pf21", &ce.pf21)] {
            check_symbol(field, &pair.left)?;
            check_symbol(field, &pair.right)?;
        }
        let em12 = ComparisonEvent::new("em12", &ce.em12.left, &ce.em12.right)?;
        let pf21 = ComparisonEvent::new("pf21", &ce.pf21.left, &ce.pf21.right)?;

        let ev = &file.evidence;
        check_symbol("evidence.strong.constraint", &ev.strong.constraint.left)?;
        check_symbol("evidence.strong.constraint", &ev.strong.constraint.right)?;
        for (l, r) in &ev.strong.chain {
            check_symbol("evidence.strong.chain", l)?;
            check_symbol("evidence.strong.chain", r)?;
        }
        check_symbol("evidence.weak", &ev.weak.left)?;
        check_symbol("evidence.weak", &ev.weak.right)?;
        let strong = StrongEvidence {
            constraint: DominanceConstraint::certain(&ev.strong.constraint.left, &ev.strong.constraint.right)
                .labeled("strong evidence"),
            chain: ev.strong.chain.clone(),
        };
        let weak = DominanceConstraint::lower_bound(&ev.weak.left, &ev.weak.right, ev.weak.lower_bound).labeled("weak evidence");
        // Validate the bound by adding it to a throwaway set.
        constraints.add_constraint(weak.clone())?;

        let p = file.parameters;
        let em_params = IndexParameters::with_variance(p.c, p.variance, p.r).map_err(param_field("r/C"))?;
        let pf_params = IndexParameters::with_variance(p.q, p.variance, p.s).map_err(param_field("s/Q"))?;

        if let Some(mc) = file.mc {
            if mc.trials == 0 {
                return Err(Error::Scenario("mc.trials: must be at least 1".into()));
            }
        }

        Ok(Self {
            name: file.name.clone(),
            game,
            constraints,
            base_constraints,
            underlining_assumptions,
            event_space,
            distinguished_event: es.distinguished,
            em12,
            pf21,
            strong,
            weak,
            em_params,
            pf_params,
            case: file.case,
            mode: file.mode,
            mc: file.mc,
            source: file,
        })
    }

    /// Copy with the index parameters replaced; `None` keeps the current value.
    pub fn with_parameters(&self, r: Option<f64>, s: Option<f64>, c: Option<f64>, q: Option<f64>) -> Result<Self> {
        let mut next = self.clone();
        next.em_params = IndexParameters::with_variance(
            c.unwrap_or(self.em_params.score),
            self.em_params.variance,
            r.unwrap_or(self.em_params.weight),
        )?;
        next.pf_params = IndexParameters::with_variance(
            q.unwrap_or(self.pf_params.score),
            self.pf_params.variance,
            s.unwrap_or(self.pf_params.weight),
        )?;
        next.source.parameters = ParameterSpec {
            r: next.em_params.weight,
            s: next.pf_params.weight,
            c: next.em_params.score,
            q: next.pf_params.score,
            variance: next.em_params.variance,
        };
        Ok(next)
    }

    pub fn with_mode(&self, mode: EvaluationMode) -> Self {
        let mut next = self.clone();
        next.mode = mode;
        next.source.mode = mode;
        next
    }

    pub fn with_case(&self, case: EvidenceCase) -> Self {
        let mut next = self.clone();
        next.case = case;
        next.source.case = case;
        next
    }
}

fn param_field(field: &'static str) -> impl Fn(Error) -> Error {
    move |e| Error::Scenario(format!("parameters ({field}): {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_scenario_loads() {
        let s = Scenario::ipd();
        assert_eq!(s.game.row_strategies(), ["Fatherhood", "Promotion"]);
        assert_eq!(s.base_constraints.len(), 6);
        assert_eq!(s.underlining_assumptions.len(), 2);
        assert_eq!(s.em_params.score, 3.4);
        assert_eq!(s.pf_params.score, 6.5);
        assert_eq!(s.event_space.prior(), [1.0 / 3.0; 3]);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let mut v: serde_json::Value = serde_json::from_str(IPD_SCENARIO_JSON).unwrap();
        v["surprise"] = serde_json::json!(1);
        let err = Scenario::from_json(&v.to_string()).unwrap_err();
        assert!(err.to_string().contains("surprise"), "{err}");
    }

    #[test]
    fn cycle_is_reported() {
        let mut v: serde_json::Value = serde_json::from_str(IPD_SCENARIO_JSON).unwrap();
        v["constraints"].as_array_mut().unwrap().push(serde_json::json!({"left": "EM21", "right": "EM11", "probability": 1.0}));
        match Scenario::from_json(&v.to_string()) {
            Err(Error::InconsistentOrder { cycle }) => assert_eq!(cycle.first(), cycle.last()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn constraint_needs_one_probability_kind() {
        let mut v: serde_json::Value = serde_json::from_str(IPD_SCENARIO_JSON).unwrap();
        v["constraints"][0]["lower_bound"] = serde_json::json!(0.5);
        let err = Scenario::from_json(&v.to_string()).unwrap_err();
        assert!(err.to_string().contains("constraints[0]"), "{err}");
    }

    #[test]
    fn unknown_symbol_names_the_field() {
        let mut v: serde_json::Value = serde_json::from_str(IPD_SCENARIO_JSON).unwrap();
        v["comparison_events"]["em12"]["left"] = serde_json::json!("EM99");
        let err = Scenario::from_json(&v.to_string()).unwrap_err();
        assert!(err.to_string().contains("comparison_events.em12"), "{err}");
    }

    #[test]
    fn parameter_bounds() {
        let s = Scenario::ipd();
        assert!(s.with_parameters(Some(1.0), None, None, None).is_err());
        assert!(s.with_parameters(Some(0.9), Some(0.1), Some(5.0), Some(9.0)).is_ok());
    }
}

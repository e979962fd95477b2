//! Professionalism questionnaire scoring.
//!
//! Each item is answered on a six-point agreement scale `a`..`f`. Positive
//! items score 1..6, negative items are reverse-coded 6..1. The raw sum is
//! mapped affinely onto [0, 10]: the least professional pattern scores 0,
//! the most professional 10.

use std::collections::BTreeMap;
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const CANONICAL_INSTRUMENT: &str = include_str!("../resources/instrument.json");

pub const SCALE_POINTS: u32 = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    Positive,
    Negative,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveyItem {
    pub index: u8,
    pub polarity: Polarity,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Instrument {
    pub name: String,
    pub version: u32,
    pub scale: Vec<String>,
    pub items: Vec<SurveyItem>,
}

/// One answer on the agreement scale, stored as 1 (strongly disagree) to 6.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Choice(u8);

impl Choice {
    pub fn new(level: u8) -> Result<Self> {
        if (1..=SCALE_POINTS as u8).contains(&level) {
            Ok(Self(level))
        } else {
            Err(Error::Survey(format!("choice level {level} outside 1..=6")))
        }
    }

    pub fn level(self) -> u8 {
        self.0
    }

    pub fn letter(self) -> char {
        (b'a' + self.0 - 1) as char
    }
}

impl std::str::FromStr for Choice {
    type Err = Error;

    /// Accepts `a`..`f` (any case) or `1`..`6`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let mut chars = t.chars();
        match (chars.next(), chars.next()) {
            (Some(c @ 'a'..='f'), None) | (Some(c @ 'A'..='F'), None) => {
                Choice::new(c.to_ascii_lowercase() as u8 - b'a' + 1)
            }
            (Some(c @ '1'..='6'), None) => Choice::new(c as u8 - b'0'),
            _ => Err(Error::Survey(format!("invalid choice `{t}` (expected a-f or 1-6)"))),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveyResponse {
    pub respondent_id: Option<String>,
    pub answers: BTreeMap<u8, Choice>,
}

impl SurveyResponse {
    /// Response from `(item index, choice)` pairs.
    pub fn from_answers(answers: impl IntoIterator<Item = (u8, Choice)>) -> Self {
        Self { respondent_id: None, answers: answers.into_iter().collect() }
    }

    /// Response from one letter per item, in item order.
    pub fn from_letters(letters: &str) -> Result<Self> {
        let answers = letters
            .chars()
            .enumerate()
            .map(|(i, c)| Ok(((i + 1) as u8, c.to_string().parse()?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        Ok(Self { respondent_id: None, answers })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PIndexScore {
    pub raw_sum: u32,
    pub p_index: f64,
}

impl Instrument {
    pub fn canonical() -> Self {
        Self::from_json(CANONICAL_INSTRUMENT).expect("bundled instrument is valid")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let inst: Instrument =
            serde_json::from_str(text).map_err(|e| Error::Survey(format!("instrument definition: {e}")))?;
        inst.validate()?;
        Ok(inst)
    }

    fn validate(&self) -> Result<()> {
        if self.items.is_empty() {
            return Err(Error::Survey("instrument has no items".into()));
        }
        if self.scale.len() != SCALE_POINTS as usize {
            return Err(Error::Survey(format!("scale has {} labels, expected 6", self.scale.len())));
        }
        for (pos, item) in self.items.iter().enumerate() {
            if item.index as usize != pos + 1 {
                return Err(Error::Survey(format!("item at position {} has index {}", pos + 1, item.index)));
            }
        }
        Ok(())
    }

    fn item(&self, index: u8) -> Result<&SurveyItem> {
        self.items
            .get((index as usize).wrapping_sub(1))
            .ok_or_else(|| Error::Survey(format!("no item {index} in instrument")))
    }

    pub fn score_item(&self, index: u8, choice: Choice) -> Result<u32> {
        let level = choice.level() as u32;
        Ok(match self.item(index)?.polarity {
            Polarity::Positive => level,
            Polarity::Negative => SCALE_POINTS + 1 - level,
        })
    }

    pub fn score_response(&self, response: &SurveyResponse) -> Result<PIndexScore> {
        if let Some(extra) = response.answers.keys().find(|&&k| k == 0 || k as usize > self.items.len()) {
            return Err(Error::Survey(format!("answer for unknown item {extra}")));
        }
        let mut raw_sum = 0;
        for item in &self.items {
            let choice = response
                .answers
                .get(&item.index)
                .ok_or_else(|| Error::Survey(format!("missing answer for item {}", item.index)))?;
            raw_sum += self.score_item(item.index, *choice)?;
        }
        let n = self.items.len() as u32;
        let p_index = 10.0 * f64::from(raw_sum - n) / f64::from((SCALE_POINTS - 1) * n);
        Ok(PIndexScore { raw_sum, p_index })
    }

    /// The response that maximises (`professional = true`) or minimises the score.
    pub fn extreme_response(&self, professional: bool) -> SurveyResponse {
        SurveyResponse::from_answers(self.items.iter().map(|item| {
            let top = matches!(item.polarity, Polarity::Positive) == professional;
            (item.index, Choice(if top { SCALE_POINTS as u8 } else { 1 }))
        }))
    }
}

/// Sample p-index: the mean of individual p-indices.
pub fn aggregate(scores: &[PIndexScore]) -> Result<f64> {
    if scores.is_empty() {
        return Err(Error::Survey("cannot aggregate an empty cohort".into()));
    }
    Ok(scores.iter().map(|s| s.p_index).sum::<f64>() / scores.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoredRespondent {
    pub respondent_id: String,
    pub line: u64,
    pub raw_sum: u32,
    pub p_index: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedRow {
    pub line: u64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurveyBatch {
    pub respondents: Vec<ScoredRespondent>,
    pub skipped: Vec<SkippedRow>,
    pub aggregate_p_index: f64,
}

/// Reads `respondent_id,item1,...,itemN` rows. Malformed rows are fatal
/// unless `lenient`, in which case they are skipped and reported.
pub fn score_csv<R: Read>(reader: R, instrument: &Instrument, lenient: bool) -> Result<SurveyBatch> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| Error::Survey(format!("header: {e}")))?.clone();
    let expected: Vec<String> = std::iter::once("respondent_id".to_string())
        .chain((1..=instrument.items.len()).map(|i| format!("item{i}")))
        .collect();
    let got: Vec<String> = headers.iter().map(|h| h.to_ascii_lowercase()).collect();
    if got != expected {
        return Err(Error::Survey(format!("header must be `{}`, found `{}`", expected.join(","), got.join(","))));
    }

    let mut respondents = Vec::new();
    let mut skipped = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| Error::Survey(format!("unreadable row: {e}")))?;
        let line = record.position().map_or(0, |p| p.line());
        match parse_row(&record, instrument) {
            Ok((id, score)) => respondents.push(ScoredRespondent {
                respondent_id: id,
                line,
                raw_sum: score.raw_sum,
                p_index: score.p_index,
            }),
            Err(e) if lenient => {
                log::warn!("line {line}: skipped: {e}");
                skipped.push(SkippedRow { line, reason: e.to_string() });
            }
            Err(e) => return Err(Error::Survey(format!("line {line}: {e}"))),
        }
    }
    let scores: Vec<PIndexScore> =
        respondents.iter().map(|r| PIndexScore { raw_sum: r.raw_sum, p_index: r.p_index }).collect();
    let aggregate_p_index = aggregate(&scores).map_err(|_| Error::Survey("no scorable responses".into()))?;
    Ok(SurveyBatch { respondents, skipped, aggregate_p_index })
}

fn parse_row(record: &csv::StringRecord, instrument: &Instrument) -> Result<(String, PIndexScore)> {
    let n = instrument.items.len();
    if record.len() != n + 1 {
        return Err(Error::Survey(format!("expected {} fields, found {}", n + 1, record.len())));
    }
    let id = record[0].to_string();
    let mut answers = BTreeMap::new();
    for i in 1..=n {
        let choice: Choice = record[i].parse().map_err(|e: Error| match e {
            Error::Survey(msg) => Error::Survey(format!("item{i}: {msg}")),
            other => other,
        })?;
        answers.insert(i as u8, choice);
    }
    let score = instrument.score_response(&SurveyResponse { respondent_id: Some(id.clone()), answers })?;
    Ok((id, score))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(s: &str) -> Choice {
        s.parse().unwrap()
    }

    #[test]
    fn canonical_polarities() {
        let inst = Instrument::canonical();
        assert_eq!(inst.items.len(), 7);
        let positive: Vec<u8> =
            inst.items.iter().filter(|i| i.polarity == Polarity::Positive).map(|i| i.index).collect();
        assert_eq!(positive, [1, 3, 7]);
    }

    #[test]
    fn item_scores() {
        let inst = Instrument::canonical();
        assert_eq!(inst.score_item(1, c("f")).unwrap(), 6);
        assert_eq!(inst.score_item(5, c("a")).unwrap(), 6);
        assert_eq!(inst.score_item(4, c("c")).unwrap(), 4);
        assert!(inst.score_item(8, c("a")).is_err());
    }

    #[test]
    fn choice_parsing() {
        assert_eq!(c("D"), c("4"));
        assert_eq!(c(" b "), Choice::new(2).unwrap());
        assert!("g".parse::<Choice>().is_err());
        assert!("0".parse::<Choice>().is_err());
        assert!("ab".parse::<Choice>().is_err());
        assert!("".parse::<Choice>().is_err());
        assert_eq!(c("e").letter(), 'e');
    }

    #[test]
    fn extremes_and_mixed() {
        let inst = Instrument::canonical();
        let best = inst.score_response(&inst.extreme_response(true)).unwrap();
        assert_eq!((best.raw_sum, best.p_index), (42, 10.0));
        let worst = inst.score_response(&inst.extreme_response(false)).unwrap();
        assert_eq!((worst.raw_sum, worst.p_index), (7, 0.0));
        let mixed = inst.score_response(&SurveyResponse::from_letters("ebdcaff").unwrap()).unwrap();
        assert_eq!(mixed.raw_sum, 31);
        assert!((mixed.p_index - 6.857).abs() < 1e-3);
    }

    #[test]
    fn incomplete_or_overfull_responses_are_rejected() {
        let inst = Instrument::canonical();
        assert!(inst.score_response(&SurveyResponse::from_letters("ebdcaf").unwrap()).is_err());
        assert!(inst.score_response(&SurveyResponse::from_letters("ebdcaffa").unwrap()).is_err());
    }

    #[test]
    fn aggregates() {
        let inst = Instrument::canonical();
        let best = inst.score_response(&inst.extreme_response(true)).unwrap();
        let worst = inst.score_response(&inst.extreme_response(false)).unwrap();
        let mixed = inst.score_response(&SurveyResponse::from_letters("ebdcaff").unwrap()).unwrap();
        assert_eq!(aggregate(&[mixed]).unwrap(), mixed.p_index);
        assert_eq!(aggregate(&[best, worst]).unwrap(), 5.0);
        assert!((aggregate(&[best, mixed, worst]).unwrap() - 5.619).abs() < 1e-3);
        assert!(aggregate(&[]).is_err());
    }

    #[test]
    fn csv_strict_and_lenient() {
        let inst = Instrument::canonical();
        let text = "respondent_id,item1,item2,item3,item4,item5,item6,item7\nr1,f,a,f,a,a,a,f\nr2,e,b,d,c,a,f,g\nr3,1,6,1,6,6,6,1\n";
        let err = score_csv(text.as_bytes(), &inst, false).unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
        let batch = score_csv(text.as_bytes(), &inst, true).unwrap();
        assert_eq!(batch.respondents.len(), 2);
        assert_eq!(batch.skipped[0].line, 3);
        assert_eq!(batch.aggregate_p_index, 5.0);
    }

    #[test]
    fn csv_header_and_empty() {
        let inst = Instrument::canonical();
        assert!(score_csv("id,a,b\n".as_bytes(), &inst, false).is_err());
        assert!(score_csv("respondent_id,item1,item2,item3,item4,item5,item6,item7\n".as_bytes(), &inst, false).is_err());
        assert!(score_csv("".as_bytes(), &inst, false).is_err());
    }

    fn toward_professional(inst: &Instrument, item: u8, level: u8) -> Option<u8> {
        match inst.items[item as usize - 1].polarity {
            Polarity::Positive if level < 6 => Some(level + 1),
            Polarity::Negative if level > 1 => Some(level - 1),
            _ => None,
        }
    }

    proptest! {
        #[test]
        fn p_index_bounded_and_monotone(levels in proptest::collection::vec(1u8..=6, 7), item in 1u8..=7) {
            let inst = Instrument::canonical();
            let resp = SurveyResponse::from_answers(levels.iter().enumerate().map(|(i, &l)| ((i + 1) as u8, Choice(l))));
            let base = inst.score_response(&resp).unwrap();
            prop_assert!((0.0..=10.0).contains(&base.p_index));
            if let Some(up) = toward_professional(&inst, item, levels[item as usize - 1]) {
                let mut better = resp.clone();
                better.answers.insert(item, Choice(up));
                prop_assert!(inst.score_response(&better).unwrap().p_index >= base.p_index);
            }
        }

        #[test]
        fn aggregate_permutation_invariant_and_bounded(ps in proptest::collection::vec(0.0f64..=10.0, 1..20)) {
            let scores: Vec<PIndexScore> = ps.iter().map(|&p| PIndexScore { raw_sum: 7, p_index: p }).collect();
            let mut rev = scores.clone();
            rev.reverse();
            let a = aggregate(&scores).unwrap();
            prop_assert!((a - aggregate(&rev).unwrap()).abs() < 1e-12);
            let lo = ps.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = ps.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(a >= lo - 1e-12 && a <= hi + 1e-12);
        }
    }
}

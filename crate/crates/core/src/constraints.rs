//! Probabilistic dominance assertions `p(X > Y) = v` over payoff symbols.
//!
//! Only probability-1 assertions enter the certain order, a strict partial
//! order kept transitively closed. Everything else is stored for the
//! solver's explicit product rules and never answers dominance queries.

use std::collections::{BTreeMap, VecDeque};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{Comparison, DominanceOracle};

pub const SAMPLING_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintProbability {
    Point(f64),
    /// `p(left > right) > bound`, bound exclusive.
    LowerBound(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominanceConstraint {
    pub left: String,
    pub right: String,
    pub probability: ConstraintProbability,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl DominanceConstraint {
    pub fn certain(left: impl Into<String>, right: impl Into<String>) -> Self {
        Self::point(left, right, 1.0)
    }

    pub fn point(left: impl Into<String>, right: impl Into<String>, probability: f64) -> Self {
        Self { left: left.into(), right: right.into(), probability: ConstraintProbability::Point(probability), label: None }
    }

    pub fn lower_bound(left: impl Into<String>, right: impl Into<String>, bound: f64) -> Self {
        Self { left: left.into(), right: right.into(), probability: ConstraintProbability::LowerBound(bound), label: None }
    }

    pub fn labeled(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn is_certain(&self) -> bool {
        self.probability == ConstraintProbability::Point(1.0)
    }

    fn validate(&self) -> Result<()> {
        let bad = |reason: &str| Error::InvalidConstraint {
            left: self.left.clone(),
            right: self.right.clone(),
            reason: reason.to_owned(),
        };
        if self.left == self.right {
            return Err(bad("a symbol cannot dominate itself"));
        }
        let p = match self.probability {
            ConstraintProbability::Point(p) | ConstraintProbability::LowerBound(p) => p,
        };
        if !(0.0..=1.0).contains(&p) {
            return Err(bad("probability outside [0, 1]"));
        }
        if let ConstraintProbability::LowerBound(b) = self.probability {
            if b >= 1.0 {
                return Err(bad("exclusive lower bound must be below 1"));
            }
        }
        Ok(())
    }
}

/// Answer to "does left > right follow from the certain constraints?"
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Implication {
    Yes,
    No,
    Unknown,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintSet {
    symbols: Vec<String>,
    index: BTreeMap<String, usize>,
    constraints: Vec<DominanceConstraint>,
    /// `reach[a][b]`: a > b follows from the certain constraints.
    reach: Vec<Vec<bool>>,
}

impl ConstraintSet {
    pub fn new<I, S>(symbols: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        let mut index = BTreeMap::new();
        for (i, s) in symbols.iter().enumerate() {
            if index.insert(s.clone(), i).is_some() {
                return Err(Error::InvalidConstraint {
                    left: s.clone(),
                    right: s.clone(),
                    reason: "duplicate symbol".into(),
                });
            }
        }
        let n = symbols.len();
        Ok(Self { symbols, index, constraints: Vec::new(), reach: vec![vec![false; n]; n] })
    }

    /// Builds a set by adding each constraint in turn.
    pub fn from_constraints<I, S>(symbols: I, constraints: impl IntoIterator<Item = DominanceConstraint>) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        constraints.into_iter().try_fold(Self::new(symbols)?, |set, c| set.add_constraint(c))
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn constraints(&self) -> &[DominanceConstraint] {
        &self.constraints
    }

    fn idx(&self, id: &str) -> Result<usize> {
        self.index.get(id).copied().ok_or_else(|| Error::UnknownSymbol(id.to_owned()))
    }

    pub fn add_constraint(&self, c: DominanceConstraint) -> Result<Self> {
        c.validate()?;
        let l = self.idx(&c.left)?;
        let r = self.idx(&c.right)?;
        let mut next = self.clone();
        if c.is_certain() {
            if next.reach[r][l] {
                let mut cycle = next.certain_path(r, l);
                cycle.push(next.symbols[r].clone());
                return Err(Error::InconsistentOrder { cycle });
            }
            next.close_over(l, r);
        }
        next.constraints.push(c);
        Ok(next)
    }

    fn close_over(&mut self, l: usize, r: usize) {
        let n = self.symbols.len();
        let above: Vec<usize> = (0..n).filter(|&a| a == l || self.reach[a][l]).collect();
        let below: Vec<usize> = (0..n).filter(|&b| b == r || self.reach[r][b]).collect();
        for &a in &above {
            for &b in &below {
                self.reach[a][b] = true;
            }
        }
    }

    /// Path of direct certain edges from `from` down to `to`, as symbol ids.
    fn certain_path(&self, from: usize, to: usize) -> Vec<String> {
        let n = self.symbols.len();
        let mut adj = vec![Vec::new(); n];
        for c in self.constraints.iter().filter(|c| c.is_certain()) {
            adj[self.index[&c.left]].push(self.index[&c.right]);
        }
        let mut prev = vec![usize::MAX; n];
        let mut queue = VecDeque::from([from]);
        prev[from] = from;
        while let Some(u) = queue.pop_front() {
            if u == to {
                break;
            }
            for &v in &adj[u] {
                if prev[v] == usize::MAX {
                    prev[v] = u;
                    queue.push_back(v);
                }
            }
        }
        let mut path = vec![to];
        let mut cur = to;
        while cur != from && prev[cur] != usize::MAX {
            cur = prev[cur];
            path.push(cur);
        }
        path.reverse();
        path.into_iter().map(|i| self.symbols[i].clone()).collect()
    }

    pub fn implies(&self, left: &str, right: &str) -> Result<Implication> {
        let l = self.idx(left)?;
        let r = self.idx(right)?;
        Ok(if self.reach[l][r] {
            Implication::Yes
        } else if self.reach[r][l] {
            Implication::No
        } else {
            Implication::Unknown
        })
    }

    /// Point probability of `left > right`: a stored point constraint, else
    /// 1 or 0 when the certain order settles it.
    pub fn pair_probability(&self, left: &str, right: &str) -> Result<f64> {
        let stored = self.constraints.iter().rev().find_map(|c| match c.probability {
            ConstraintProbability::Point(p) if c.left == left && c.right == right => Some(p),
            _ => None,
        });
        if let Some(p) = stored {
            return Ok(p);
        }
        match self.implies(left, right)? {
            Implication::Yes => Ok(1.0),
            Implication::No => Ok(0.0),
            Implication::Unknown => {
                Err(Error::MissingProbability { left: left.to_owned(), right: right.to_owned() })
            }
        }
    }

    /// Joint probability of a chain of comparisons taken as mutually
    /// independent: the product of the pair probabilities.
    pub fn independent_chain_probability<S: AsRef<str>>(&self, chain: &[(S, S)]) -> Result<f64> {
        chain
            .iter()
            .map(|(l, r)| self.pair_probability(l.as_ref(), r.as_ref()))
            .product()
    }

    /// Direct certain edges as `(left, right)` pairs.
    pub fn certain_edges(&self) -> impl Iterator<Item = (&str, &str)> {
        self.constraints.iter().filter(|c| c.is_certain()).map(|c| (c.left.as_str(), c.right.as_str()))
    }

    /// Uniform values in [0, 1) for every symbol, rejection-sampled until
    /// every certain constraint holds strictly. Deterministic in `seed`.
    pub fn sample_realization(&self, seed: u64) -> Result<BTreeMap<String, f64>> {
        let edges: Vec<(usize, usize)> = self.certain_edges().map(|(l, r)| (self.index[l], self.index[r])).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut values = vec![0.0; self.symbols.len()];
        for _ in 0..SAMPLING_CAP {
            values.iter_mut().for_each(|v| *v = rng.random::<f64>());
            if edges.iter().all(|&(l, r)| values[l] > values[r]) {
                return Ok(self.symbols.iter().cloned().zip(values).collect());
            }
        }
        Err(Error::SamplingExhausted { attempts: SAMPLING_CAP })
    }

    /// Recomputes the closure from the direct certain edges (Warshall).
    pub fn recomputed_closure(&self) -> Vec<Vec<bool>> {
        let n = self.symbols.len();
        let mut reach = vec![vec![false; n]; n];
        for (l, r) in self.certain_edges() {
            reach[self.index[l]][self.index[r]] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if reach[i][k] {
                    #[allow(clippy::needless_range_loop)]
                    for j in 0..n {
                        if reach[k][j] {
                            reach[i][j] = true;
                        }
                    }
                }
            }
        }
        reach
    }

    pub fn closure(&self) -> &[Vec<bool>] {
        &self.reach
    }
}

impl DominanceOracle for ConstraintSet {
    fn compare(&self, left: &str, right: &str) -> Result<Comparison> {
        Ok(match self.implies(left, right)? {
            Implication::Yes => Comparison::Greater,
            Implication::No => Comparison::Less,
            Implication::Unknown => Comparison::Unknown,
        })
    }
}

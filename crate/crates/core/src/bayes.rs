//! Finite event partitions: posteriors, marginals, and the fixed point that
//! makes a comparison event independent of the one event left free.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const PRIOR_SUM_TOLERANCE: f64 = 1e-12;

/// A partition of the environment into disjoint events with a prior.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventSpace {
    events: Vec<String>,
    prior: Vec<f64>,
}

/// An event of the form `{left > right}` over two payoff symbols.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparisonEvent {
    pub label: String,
    pub left: String,
    pub right: String,
}

impl ComparisonEvent {
    pub fn new(label: impl Into<String>, left: impl Into<String>, right: impl Into<String>) -> Result<Self> {
        let (label, left, right) = (label.into(), left.into(), right.into());
        if left == right {
            return Err(Error::InvalidEventSpace(format!("comparison event `{label}` compares {left} with itself")));
        }
        Ok(Self { label, left, right })
    }
}

impl EventSpace {
    pub fn new(events: Vec<String>, prior: Vec<f64>) -> Result<Self> {
        if events.is_empty() {
            return Err(Error::InvalidEventSpace("no events".into()));
        }
        if events.len() != prior.len() {
            return Err(Error::InvalidEventSpace(format!("{} events but {} prior entries", events.len(), prior.len())));
        }
        if let Some(p) = prior.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidEventSpace(format!("prior entry {p} is not a probability")));
        }
        let sum: f64 = prior.iter().sum();
        if (sum - 1.0).abs() > PRIOR_SUM_TOLERANCE {
            return Err(Error::InvalidEventSpace(format!("prior sums to {sum}, not 1")));
        }
        Ok(Self { events, prior })
    }

    pub fn uniform(events: Vec<String>) -> Result<Self> {
        let n = events.len();
        Self::new(events, vec![1.0 / n as f64; n])
    }

    pub fn events(&self) -> &[String] {
        &self.events
    }

    pub fn prior(&self) -> &[f64] {
        &self.prior
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    fn check_vector(&self, v: &[f64], what: &str) -> Result<()> {
        if v.len() != self.len() {
            return Err(Error::InvalidEventSpace(format!("{} {what} for {} events", v.len(), self.len())));
        }
        if let Some(x) = v.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(Error::InvalidEventSpace(format!("{what} entry {x} outside [0, 1]")));
        }
        Ok(())
    }

    /// Bayes' rule over the partition: `p(e_k | target)` from `p(target | e_k)`.
    pub fn posterior(&self, likelihoods: &[f64]) -> Result<Vec<f64>> {
        self.check_vector(likelihoods, "likelihoods")?;
        let joint: Vec<f64> = self.prior.iter().zip(likelihoods).map(|(p, l)| p * l).collect();
        let evidence: f64 = joint.iter().sum();
        if evidence <= 0.0 {
            return Err(Error::ZeroEvidence);
        }
        Ok(joint.into_iter().map(|j| j / evidence).collect())
    }

    /// Law of total probability: `p(target) = Σ_k p(e_k) p(target | e_k)`.
    pub fn total_probability(&self, conditionals: &[f64]) -> Result<f64> {
        self.check_vector(conditionals, "conditionals")?;
        Ok(self.prior.iter().zip(conditionals).map(|(p, c)| p * c).sum())
    }

    /// Posterior `α = p(e* | target)` of the one event not listed in
    /// `independent`, given that every listed event satisfies
    /// `p(e_k | target) = p(e_k)`.
    ///
    /// The derivation runs in exact rational arithmetic on the prior:
    ///
    /// 1. For each listed event, Bayes' rule turns the assumption into
    ///    `p(target | e_k) = p(target)`.
    /// 2. Writing `x = p(target | e*) / p(target)` and `c` for the listed
    ///    events' prior mass, Bayes' rule for `e*` gives
    ///    `α = π* x / (π* x + c)`, so `x = c α / (π* (1 - α))`.
    /// 3. Feeding `x` back, `p(e* | target) = π* x = c α / (1 - α)`, which must
    ///    equal `α`. Since `α ≠ 0`, `1 - α = c`.
    pub fn independence_fixed_point(&self, independent: &[usize]) -> Result<f64> {
        let n = self.len();
        let mut listed = vec![false; n];
        for &k in independent {
            if k >= n {
                return Err(Error::InvalidEventSpace(format!("event index {k} out of range")));
            }
            if std::mem::replace(&mut listed[k], true) {
                return Err(Error::InvalidEventSpace(format!("event index {k} listed twice")));
            }
        }
        let free: Vec<usize> = (0..n).filter(|&k| !listed[k]).collect();
        let [star] = free[..] else {
            return Err(Error::InvalidEventSpace(format!(
                "exactly one event must be left out of the independent set, found {}",
                free.len()
            )));
        };
        let pi_star_f = self.prior[star];
        if pi_star_f <= 0.0 || pi_star_f >= 1.0 {
            return Err(Error::DegeneratePrior(pi_star_f));
        }

        let exact: Vec<BigRational> = self.prior.iter().map(|&p| rational(p)).collect();
        let total: BigRational = exact.iter().sum();
        let weights: Vec<BigRational> = exact.iter().map(|p| p / &total).collect();
        let pi_star = &weights[star];
        let c: BigRational = independent.iter().map(|&k| &weights[k]).sum();

        // Step 3 resolved for α; α ≠ 0 because π* > 0.
        let alpha = BigRational::one() - &c;
        if alpha.is_zero() || alpha.is_one() {
            return Err(Error::DegeneratePrior(pi_star_f));
        }

        // Substitute back through steps 2 and 1.
        let x = &c * &alpha / (pi_star * (BigRational::one() - &alpha));
        let reproduced = pi_star * &x / (pi_star * &x + &c);
        debug_assert_eq!(reproduced, alpha);

        Ok(alpha.to_f64().unwrap_or(f64::NAN))
    }
}

fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap_or_else(|| BigRational::from_integer(BigInt::zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn labels(n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("e{i}")).collect()
    }

    fn uniform3() -> EventSpace {
        EventSpace::uniform(labels(3)).unwrap()
    }

    #[test]
    fn prior_validation() {
        assert!(EventSpace::new(labels(2), vec![0.5, 0.6]).is_err());
        assert!(EventSpace::new(labels(2), vec![1.5, -0.5]).is_err());
        assert!(EventSpace::new(labels(2), vec![1.0]).is_err());
        assert!(EventSpace::new(vec![], vec![]).is_err());
        assert!(EventSpace::new(labels(2), vec![0.3, 0.7]).is_ok());
    }

    #[test]
    fn posterior_examples() {
        let s = uniform3();
        let p = s.posterior(&[0.4, 0.4, 0.4]).unwrap();
        for (a, b) in p.iter().zip(s.prior()) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(s.posterior(&[1.0, 0.0, 0.0]).unwrap(), vec![1.0, 0.0, 0.0]);
        let p = s.posterior(&[0.6, 0.3, 0.3]).unwrap();
        for (a, b) in p.iter().zip([0.5, 0.25, 0.25]) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(s.posterior(&[0.0, 0.0, 0.0]), Err(Error::ZeroEvidence));
        let skewed = EventSpace::new(labels(3), vec![0.0, 0.5, 0.5]).unwrap();
        assert_eq!(skewed.posterior(&[1.0, 0.0, 0.0]), Err(Error::ZeroEvidence));
    }

    #[test]
    fn fixed_point_examples() {
        assert_eq!(uniform3().independence_fixed_point(&[1, 2]).unwrap(), 1.0 / 3.0);
        let s = EventSpace::new(labels(3), vec![0.5, 0.25, 0.25]).unwrap();
        assert_eq!(s.independence_fixed_point(&[1, 2]).unwrap(), 0.5);
        let s = EventSpace::new(labels(2), vec![0.2, 0.8]).unwrap();
        assert!((s.independence_fixed_point(&[1]).unwrap() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn fixed_point_rejects_degenerate_and_malformed() {
        let s = EventSpace::new(labels(3), vec![0.0, 0.5, 0.5]).unwrap();
        assert_eq!(s.independence_fixed_point(&[1, 2]), Err(Error::DegeneratePrior(0.0)));
        let s = EventSpace::new(labels(3), vec![1.0, 0.0, 0.0]).unwrap();
        assert_eq!(s.independence_fixed_point(&[1, 2]), Err(Error::DegeneratePrior(1.0)));
        assert!(uniform3().independence_fixed_point(&[1]).is_err());
        assert!(uniform3().independence_fixed_point(&[1, 1]).is_err());
        assert!(uniform3().independence_fixed_point(&[1, 7]).is_err());
    }

    #[test]
    fn total_probability_examples() {
        let s = uniform3();
        assert!((s.total_probability(&[0.3, 0.3, 0.3]).unwrap() - 0.3).abs() < 1e-15);
        assert!((s.total_probability(&[0.6, 0.3, 0.0]).unwrap() - 0.3).abs() < 1e-15);
        let point = EventSpace::new(labels(3), vec![1.0, 0.0, 0.0]).unwrap();
        assert_eq!(point.total_probability(&[0.7, 0.1, 0.9]).unwrap(), 0.7);
        assert!(s.total_probability(&[0.3, 0.3]).is_err());
    }

    fn random_prior() -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(0.01f64..1.0, 2..6).prop_map(|raw| {
            let sum: f64 = raw.iter().sum();
            raw.into_iter().map(|x| x / sum).collect()
        })
    }

    proptest! {
        #[test]
        fn posterior_normalised_and_scale_invariant(
            prior in random_prior(),
            lik in proptest::collection::vec(0.01f64..=1.0, 6),
            scale in 0.05f64..1.0,
        ) {
            let n = prior.len();
            let Ok(s) = EventSpace::new(labels(n), prior) else { return Ok(()) };
            let l = &lik[..n];
            let a = s.posterior(l).unwrap();
            prop_assert!((a.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            let scaled: Vec<f64> = l.iter().map(|x| x * scale).collect();
            let b = s.posterior(&scaled).unwrap();
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }

        #[test]
        fn total_probability_is_linear(
            c1 in proptest::collection::vec(0.0f64..=0.5, 3),
            c2 in proptest::collection::vec(0.0f64..=0.5, 3),
        ) {
            let s = uniform3();
            let sum: Vec<f64> = c1.iter().zip(&c2).map(|(a, b)| a + b).collect();
            let lhs = s.total_probability(&sum).unwrap();
            let rhs = s.total_probability(&c1).unwrap() + s.total_probability(&c2).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-15);
        }
    }
}

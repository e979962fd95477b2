//! Monte Carlo cross-checks for the closed-form selection products and for
//! symbolic equilibrium enumeration.
//!
//! Trials are split into fixed-size shards. Shard `i` draws from
//! `ChaCha8Rng::seed_from_u64(seed)` on stream `i`, so serial and parallel
//! runs produce identical counts.

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::constraints::ConstraintSet;
use crate::error::{Error, Result};
use crate::game::{brute_force_nash, CellCoord, NashOutcome, OrdinalGame};

pub const GENERATOR: &str = "chacha8/seed_from_u64/stream-per-shard";
pub const SHARD_TRIALS: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub trials: u64,
    pub seed: u64,
    pub p_em12: f64,
    pub p_pf21: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationResult {
    pub trials: u64,
    pub seed: u64,
    pub generator: String,
    pub freq_cell_11: f64,
    pub freq_cell_22: f64,
    pub freq_indeterminate: f64,
    /// Largest empirical binomial standard error of the three frequencies.
    pub standard_error: f64,
}

#[derive(Default, Clone, Copy)]
struct Counts {
    cell_11: u64,
    cell_22: u64,
}

fn run_shard(config: &SimulationConfig, shard: u64) -> Counts {
    let start = shard * SHARD_TRIALS;
    let len = SHARD_TRIALS.min(config.trials - start);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(shard);
    let mut counts = Counts::default();
    for _ in 0..len {
        let em = rng.random::<f64>() < config.p_em12;
        let pf = rng.random::<f64>() < config.p_pf21;
        match (em, pf) {
            (true, false) => counts.cell_11 += 1,
            (false, true) => counts.cell_22 += 1,
            _ => {}
        }
    }
    counts
}

pub fn simulate_selection(config: &SimulationConfig) -> Result<SimulationResult> {
    if config.trials == 0 {
        return Err(Error::InvalidParameter { name: "trials", value: 0.0, reason: "must be at least 1" });
    }
    for (name, p) in [("p_em12", config.p_em12), ("p_pf21", config.p_pf21)] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter { name, value: p, reason: "must lie in [0, 1]" });
        }
    }
    let shards = config.trials.div_ceil(SHARD_TRIALS);

    #[cfg(feature = "parallel")]
    let per_shard: Vec<Counts> = {
        use rayon::prelude::*;
        (0..shards).into_par_iter().map(|s| run_shard(config, s)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let per_shard: Vec<Counts> = (0..shards).map(|s| run_shard(config, s)).collect();

    let total = per_shard.iter().fold(Counts::default(), |acc, c| Counts {
        cell_11: acc.cell_11 + c.cell_11,
        cell_22: acc.cell_22 + c.cell_22,
    });
    let n = config.trials as f64;
    let indeterminate = config.trials - total.cell_11 - total.cell_22;
    let freqs = [total.cell_11 as f64 / n, total.cell_22 as f64 / n, indeterminate as f64 / n];
    let standard_error = freqs.iter().map(|f| (f * (1.0 - f) / n).sqrt()).fold(0.0, f64::max);
    Ok(SimulationResult {
        trials: config.trials,
        seed: config.seed,
        generator: GENERATOR.to_owned(),
        freq_cell_11: freqs[0],
        freq_cell_22: freqs[1],
        freq_indeterminate: freqs[2],
        standard_error,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Disagreement {
    pub sample_seed: u64,
    pub cell: CellCoord,
    pub symbolic_equilibrium: bool,
    pub numeric_equilibrium: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NashVerification {
    pub samples: u64,
    pub symbolic: NashOutcome,
    /// Decided cells whose numeric verdict matched, summed over samples.
    pub agreements: u64,
    pub disagreements: Vec<Disagreement>,
    /// How often each cell was a numeric equilibrium.
    pub numeric_equilibrium_counts: BTreeMap<CellCoord, u64>,
}

/// Samples numeric realizations consistent with `set` (seeds `seed`,
/// `seed + 1`, ...) and checks every symbolically decided cell against
/// exhaustive deviation checking.
pub fn verify_nash_numeric(game: &OrdinalGame, set: &ConstraintSet, trials: u64, seed: u64) -> Result<NashVerification> {
    let symbolic = game.pure_nash(set)?;
    let check = |i: u64| -> Result<(u64, Vec<Disagreement>, Vec<CellCoord>)> {
        let sample_seed = seed.wrapping_add(i);
        let values: HashMap<String, f64> = set.sample_realization(sample_seed)?.into_iter().collect();
        let numeric = brute_force_nash(game, &values)?;
        let mut agree = 0;
        let mut bad = Vec::new();
        for cell in game.cell_coords().filter(|c| !symbolic.undecided_cells.contains(c)) {
            let sym = symbolic.equilibria.contains(&cell);
            let num = numeric.contains(&cell);
            if sym == num {
                agree += 1;
            } else {
                bad.push(Disagreement { sample_seed, cell, symbolic_equilibrium: sym, numeric_equilibrium: num });
            }
        }
        Ok((agree, bad, numeric.into_iter().collect()))
    };

    #[cfg(feature = "parallel")]
    let results: Vec<_> = {
        use rayon::prelude::*;
        (0..trials).into_par_iter().map(check).collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<_> = (0..trials).map(check).collect::<Result<_>>()?;

    let mut out = NashVerification {
        samples: trials,
        symbolic,
        agreements: 0,
        disagreements: Vec::new(),
        numeric_equilibrium_counts: BTreeMap::new(),
    };
    for (agree, bad, cells) in results {
        out.agreements += agree;
        out.disagreements.extend(bad);
        for c in cells {
            *out.numeric_equilibrium_counts.entry(c).or_default() += 1;
        }
    }
    Ok(out)
}

//! Two-player normal-form games with opaque, ordinal payoffs.
//!
//! Payoffs are symbols such as `EM11` or `PF22`; their values are never
//! known. Best responses are computed through a [`DominanceOracle`] that
//! answers "is X greater than Y?" with a possibly unknown verdict.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const ROW: usize = 0;
pub const COL: usize = 1;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PayoffSymbol {
    pub id: String,
    pub owner: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellCoord {
    pub row: usize,
    pub col: usize,
}

impl CellCoord {
    pub const fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }
}

/// Outcome of comparing two payoff symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparison {
    Greater,
    Less,
    Equal,
    Unknown,
}

impl Comparison {
    pub fn reverse(self) -> Self {
        match self {
            Comparison::Greater => Comparison::Less,
            Comparison::Less => Comparison::Greater,
            other => other,
        }
    }
}

/// Source of ordinal information about payoff symbols.
pub trait DominanceOracle {
    fn compare(&self, left: &str, right: &str) -> Result<Comparison>;
}

/// Total order from numeric payoff realizations.
#[derive(Debug, Clone, Default)]
pub struct NumericOrder {
    pub values: HashMap<String, f64>,
}

impl NumericOrder {
    pub fn new(values: HashMap<String, f64>) -> Self {
        Self { values }
    }
}

impl DominanceOracle for NumericOrder {
    fn compare(&self, left: &str, right: &str) -> Result<Comparison> {
        let a = self.values.get(left).ok_or_else(|| Error::UnknownSymbol(left.to_owned()))?;
        let b = self.values.get(right).ok_or_else(|| Error::UnknownSymbol(right.to_owned()))?;
        Ok(match a.partial_cmp(b) {
            Some(std::cmp::Ordering::Greater) => Comparison::Greater,
            Some(std::cmp::Ordering::Less) => Comparison::Less,
            Some(std::cmp::Ordering::Equal) => Comparison::Equal,
            None => Comparison::Unknown,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BestResponse {
    Decided(BTreeSet<usize>),
    Undecided,
}

/// Three-valued membership of one strategy in a best-response set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Membership {
    In,
    Out,
    Unknown,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NashOutcome {
    pub equilibria: BTreeSet<CellCoord>,
    pub undecided_cells: BTreeSet<CellCoord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrdinalGame {
    row_strategies: Vec<String>,
    col_strategies: Vec<String>,
    /// Row-major grid of `(row player's symbol, column player's symbol)`.
    cells: Vec<Vec<(String, String)>>,
}

impl OrdinalGame {
    pub fn new(
        row_strategies: Vec<String>,
        col_strategies: Vec<String>,
        cells: Vec<Vec<(String, String)>>,
    ) -> Result<Self> {
        if row_strategies.is_empty() || col_strategies.is_empty() {
            return Err(Error::MalformedGame("each player needs at least one strategy".into()));
        }
        if cells.len() != row_strategies.len() {
            return Err(Error::MalformedGame(format!(
                "{} payoff rows for {} row strategies",
                cells.len(),
                row_strategies.len()
            )));
        }
        let mut seen = HashSet::new();
        for (i, row) in cells.iter().enumerate() {
            if row.len() != col_strategies.len() {
                return Err(Error::MalformedGame(format!(
                    "payoff row {i} has {} cells, expected {}",
                    row.len(),
                    col_strategies.len()
                )));
            }
            for (a, b) in row {
                for id in [a, b] {
                    if !seen.insert(id.as_str()) {
                        return Err(Error::MalformedGame(format!("symbol `{id}` appears twice")));
                    }
                }
            }
        }
        Ok(Self { row_strategies, col_strategies, cells })
    }

    /// Builds a game whose symbols are `{row_prefix}{i}{j}` / `{col_prefix}{i}{j}` (1-based).
    pub fn with_indexed_symbols(
        row_strategies: Vec<String>,
        col_strategies: Vec<String>,
        row_prefix: &str,
        col_prefix: &str,
    ) -> Result<Self> {
        let cells = (1..=row_strategies.len())
            .map(|i| {
                (1..=col_strategies.len())
                    .map(|j| (format!("{row_prefix}{i}{j}"), format!("{col_prefix}{i}{j}")))
                    .collect()
            })
            .collect();
        Self::new(row_strategies, col_strategies, cells)
    }

    pub fn row_strategies(&self) -> &[String] {
        &self.row_strategies
    }

    pub fn col_strategies(&self) -> &[String] {
        &self.col_strategies
    }

    pub fn cells(&self) -> &[Vec<(String, String)>] {
        &self.cells
    }

    pub fn num_strategies(&self, player: usize) -> Result<usize> {
        match player {
            ROW => Ok(self.row_strategies.len()),
            COL => Ok(self.col_strategies.len()),
            p => Err(Error::PlayerOutOfRange(p)),
        }
    }

    pub fn cell_coords(&self) -> impl Iterator<Item = CellCoord> + '_ {
        let cols = self.col_strategies.len();
        (0..self.row_strategies.len()).flat_map(move |r| (0..cols).map(move |c| CellCoord::new(r, c)))
    }

    /// The symbol `player` receives at `cell`.
    pub fn payoff(&self, player: usize, cell: CellCoord) -> Result<&str> {
        self.check_cell(cell)?;
        let (a, b) = &self.cells[cell.row][cell.col];
        match player {
            ROW => Ok(a),
            COL => Ok(b),
            p => Err(Error::PlayerOutOfRange(p)),
        }
    }

    pub fn symbols(&self) -> Vec<PayoffSymbol> {
        let mut out = Vec::with_capacity(2 * self.row_strategies.len() * self.col_strategies.len());
        for row in &self.cells {
            for (a, b) in row {
                out.push(PayoffSymbol { id: a.clone(), owner: ROW });
                out.push(PayoffSymbol { id: b.clone(), owner: COL });
            }
        }
        out
    }

    pub fn symbol_ids(&self) -> Vec<String> {
        self.symbols().into_iter().map(|s| s.id).collect()
    }

    fn check_cell(&self, cell: CellCoord) -> Result<()> {
        if cell.row >= self.row_strategies.len() {
            return Err(Error::StrategyOutOfRange { index: cell.row, count: self.row_strategies.len() });
        }
        if cell.col >= self.col_strategies.len() {
            return Err(Error::StrategyOutOfRange { index: cell.col, count: self.col_strategies.len() });
        }
        Ok(())
    }

    /// Cell reached when `player` plays `own` against `opponent`.
    fn cell_for(player: usize, own: usize, opponent: usize) -> CellCoord {
        if player == ROW {
            CellCoord::new(own, opponent)
        } else {
            CellCoord::new(opponent, own)
        }
    }

    fn membership<O: DominanceOracle + ?Sized>(
        &self,
        player: usize,
        own: usize,
        opponent: usize,
        order: &O,
    ) -> Result<Membership> {
        let n = self.num_strategies(player)?;
        let mine = self.payoff(player, Self::cell_for(player, own, opponent))?;
        let mut pending = false;
        for alt in (0..n).filter(|&alt| alt != own) {
            let theirs = self.payoff(player, Self::cell_for(player, alt, opponent))?;
            match order.compare(mine, theirs)? {
                Comparison::Less => return Ok(Membership::Out),
                Comparison::Unknown => pending = true,
                Comparison::Greater | Comparison::Equal => {}
            }
        }
        Ok(if pending { Membership::Unknown } else { Membership::In })
    }

    /// Strategies of `player` that are not beaten by any alternative while the
    /// opponent holds `opponent_strategy` fixed.
    pub fn best_responses<O: DominanceOracle + ?Sized>(
        &self,
        player: usize,
        opponent_strategy: usize,
        order: &O,
    ) -> Result<BestResponse> {
        let n = self.num_strategies(player)?;
        let m = self.num_strategies(1 - player)?;
        if opponent_strategy >= m {
            return Err(Error::StrategyOutOfRange { index: opponent_strategy, count: m });
        }
        let mut set = BTreeSet::new();
        for own in 0..n {
            match self.membership(player, own, opponent_strategy, order)? {
                Membership::In => {
                    set.insert(own);
                }
                Membership::Out => {}
                Membership::Unknown => return Ok(BestResponse::Undecided),
            }
        }
        Ok(BestResponse::Decided(set))
    }

    /// Pure equilibria by "underlining": a cell is an equilibrium when each
    /// player's strategy there is a best response to the other's.
    pub fn pure_nash<O: DominanceOracle + ?Sized>(&self, order: &O) -> Result<NashOutcome> {
        let mut out = NashOutcome::default();
        for cell in self.cell_coords() {
            let row = self.membership(ROW, cell.row, cell.col, order)?;
            let col = self.membership(COL, cell.col, cell.row, order)?;
            match (row, col) {
                (Membership::In, Membership::In) => {
                    out.equilibria.insert(cell);
                }
                (Membership::Out, _) | (_, Membership::Out) => {}
                _ => {
                    out.undecided_cells.insert(cell);
                }
            }
        }
        Ok(out)
    }
}

/// Exhaustive deviation check against numeric payoffs: a cell is an
/// equilibrium iff no player can strictly improve by deviating alone.
pub fn brute_force_nash(game: &OrdinalGame, values: &HashMap<String, f64>) -> Result<BTreeSet<CellCoord>> {
    let lookup = |id: &str| values.get(id).copied().ok_or_else(|| Error::UnknownSymbol(id.to_owned()));
    let mut out = BTreeSet::new();
    let rows = game.row_strategies().len();
    let cols = game.col_strategies().len();
    for cell in game.cell_coords() {
        let row_here = lookup(game.payoff(ROW, cell)?)?;
        let col_here = lookup(game.payoff(COL, cell)?)?;
        let mut stable = true;
        for r in 0..rows {
            if lookup(game.payoff(ROW, CellCoord::new(r, cell.col))?)? > row_here {
                stable = false;
            }
        }
        for c in 0..cols {
            if lookup(game.payoff(COL, CellCoord::new(cell.row, c))?)? > col_here {
                stable = false;
            }
        }
        if stable {
            out.insert(cell);
        }
    }
    Ok(out)
}

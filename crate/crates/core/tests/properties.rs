use std::collections::{BTreeSet, HashMap};

use dilemma_core::constraints::{ConstraintSet, DominanceConstraint};
use dilemma_core::game::{CellCoord, NumericOrder, OrdinalGame};
use dilemma_core::index_model::{selection_factor, EvaluationMode, SCALE_VARIANCE};
use dilemma_core::scenario::{EvidenceCase, Scenario};
use dilemma_core::solver::solve;
use proptest::prelude::*;

fn game(rows: usize, cols: usize) -> OrdinalGame {
    OrdinalGame::with_indexed_symbols(
        (0..rows).map(|i| format!("r{i}")).collect(),
        (0..cols).map(|j| format!("c{j}")).collect(),
        "A",
        "B",
    )
    .unwrap()
}

/// Distinct payoff ranks for an `rows x cols` game, keyed by symbol.
fn ranks(rows: usize, cols: usize) -> impl Strategy<Value = HashMap<String, f64>> {
    Just((0..2 * rows * cols).collect::<Vec<usize>>()).prop_shuffle().prop_map(move |perm| {
        let mut values = HashMap::new();
        let mut it = perm.into_iter();
        for i in 1..=rows {
            for j in 1..=cols {
                values.insert(format!("A{i}{j}"), it.next().unwrap() as f64);
                values.insert(format!("B{i}{j}"), it.next().unwrap() as f64);
            }
        }
        values
    })
}

/// All pairwise comparisons implied by `values`, as certain constraints.
fn full_order(values: &HashMap<String, f64>) -> Vec<DominanceConstraint> {
    let mut out = Vec::new();
    for (a, va) in values {
        for (b, vb) in values {
            if va > vb {
                out.push(DominanceConstraint::certain(a.clone(), b.clone()));
            }
        }
    }
    out.sort_by(|x, y| (&x.left, &x.right).cmp(&(&y.left, &y.right)));
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// Revealing more of a total order never turns a decided equilibrium
    /// into an undecided one, and never flips a decided verdict.
    #[test]
    fn more_information_is_monotone(values in ranks(3, 3), keep in proptest::collection::vec(any::<bool>(), 153), extra in proptest::collection::vec(any::<bool>(), 153)) {
        let g = game(3, 3);
        let all = full_order(&values);
        let small: Vec<_> = all.iter().zip(&keep).filter(|(_, k)| **k).map(|(c, _)| c.clone()).collect();
        let large: Vec<_> = all.iter().zip(keep.iter().zip(&extra)).filter(|(_, (k, e))| **k || **e).map(|(c, _)| c.clone()).collect();
        let s_small = ConstraintSet::from_constraints(g.symbol_ids(), small).unwrap();
        let s_large = ConstraintSet::from_constraints(g.symbol_ids(), large).unwrap();
        let before = g.pure_nash(&s_small).unwrap();
        let after = g.pure_nash(&s_large).unwrap();
        prop_assert!(before.equilibria.is_subset(&after.equilibria));
        prop_assert!(after.undecided_cells.is_subset(&before.undecided_cells));
        for cell in g.cell_coords() {
            let decided_non_eq = !before.equilibria.contains(&cell) && !before.undecided_cells.contains(&cell);
            if decided_non_eq {
                prop_assert!(!after.equilibria.contains(&cell));
            }
        }
        // The complete order agrees with the numeric one.
        let s_full = ConstraintSet::from_constraints(g.symbol_ids(), all).unwrap();
        prop_assert_eq!(g.pure_nash(&s_full).unwrap(), g.pure_nash(&NumericOrder::new(values)).unwrap());
    }

    /// Permuting rows and columns permutes the equilibrium set.
    #[test]
    fn relabeling_permutes_equilibria(
        values in ranks(3, 2),
        row_perm in Just(vec![0usize, 1, 2]).prop_shuffle(),
        col_perm in Just(vec![0usize, 1]).prop_shuffle(),
    ) {
        let g = game(3, 2);
        let base = g.pure_nash(&NumericOrder::new(values.clone())).unwrap();

        // New cell (i, j) holds the payoffs of old cell (row_perm[i], col_perm[j]).
        let cells: Vec<Vec<(String, String)>> = (0..3)
            .map(|i| (0..2).map(|j| {
                let (a, b) = &g.cells()[row_perm[i]][col_perm[j]];
                (a.clone(), b.clone())
            }).collect())
            .collect();
        let permuted = OrdinalGame::new(
            row_perm.iter().map(|&i| g.row_strategies()[i].clone()).collect(),
            col_perm.iter().map(|&j| g.col_strategies()[j].clone()).collect(),
            cells,
        ).unwrap();
        let after = permuted.pure_nash(&NumericOrder::new(values)).unwrap();
        let mapped: BTreeSet<CellCoord> = after
            .equilibria
            .iter()
            .map(|c| CellCoord::new(row_perm[c.row], col_perm[c.col]))
            .collect();
        prop_assert_eq!(mapped, base.equilibria);
    }

    #[test]
    fn selection_masses_partition_unity(r in 0.001f64..0.999, s in 0.001f64..0.999, c in 0.5f64..10.0, q in 0.5f64..10.0, weak in any::<bool>()) {
        let case = if weak { EvidenceCase::WeakEvidence } else { EvidenceCase::StrongEvidence };
        let scenario = Scenario::ipd()
            .with_mode(EvaluationMode::Computed)
            .with_case(case)
            .with_parameters(Some(r), Some(s), Some(c), Some(q))
            .unwrap();
        let rep = solve(&scenario).unwrap();
        prop_assert!((rep.p_cell_11 + rep.p_cell_22 + rep.indeterminate - 1.0).abs() <= 1e-12);
        prop_assert!((0.0..=1.0).contains(&rep.indeterminate));
        prop_assert!((rep.p_cell_11 - rep.p_em12 * (1.0 - rep.p_pf21)).abs() <= 1e-15);
        prop_assert!((rep.p_cell_22 - rep.p_pf21 * (1.0 - rep.p_em12)).abs() <= 1e-15);
        prop_assert!(rep.p_em12 < selection_factor(c, SCALE_VARIANCE).unwrap());
        if weak {
            prop_assert!(rep.p_pf21 < selection_factor(q, SCALE_VARIANCE).unwrap());
        } else {
            prop_assert_eq!(rep.p_pf21, 1.0);
            prop_assert_eq!(rep.p_cell_11, 0.0);
        }
    }
}

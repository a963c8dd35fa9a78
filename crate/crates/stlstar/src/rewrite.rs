//! Semantics-preserving formula transformations.
//!
//! The freeze operator distributes over Boolean connectives, merges into an
//! immediately following predicate, and consecutive freezes collapse onto a
//! single fresh index. A final renaming pass compacts the frozen indices so
//! that a formula uses only as many as are ever simultaneously free. Fewer
//! indices shrink the space of frozen state vectors the monitor has to
//! precompute over, which is the exponential factor of its running time.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use thiserror::Error;

use crate::formula::{Formula, FormulaKind, FrozenIndex, LinearPredicate};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RewriteError {
    /// Applying the renaming would move an occurrence of `index` under a
    /// different binder, changing the formula's meaning.
    #[error("renaming captures index {index}: a free occurrence would become bound")]
    UnsafeRenaming { index: FrozenIndex },
}

/// A total renaming of frozen indices; indices without an explicit pair map
/// to themselves. Two indices may map to the same destination.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Renaming {
    pairs: BTreeMap<FrozenIndex, FrozenIndex>,
}

impl Renaming {
    pub fn new(pairs: impl IntoIterator<Item = (FrozenIndex, FrozenIndex)>) -> Self {
        Renaming {
            pairs: pairs.into_iter().collect(),
        }
    }

    /// The single pair `[from/to]`.
    pub fn single(from: FrozenIndex, to: FrozenIndex) -> Self {
        Self::new([(from, to)])
    }

    pub fn apply(&self, index: FrozenIndex) -> FrozenIndex {
        self.pairs.get(&index).copied().unwrap_or(index)
    }
}

/// Applies an index renaming to every freeze operator and predicate
/// coefficient block, summing coefficient blocks that collide.
///
/// Fails if any occurrence would end up bound by a different freeze than
/// before (or bound at all, if it was free).
pub fn rename(phi: &Formula, pi: &Renaming) -> Result<Formula, RewriteError> {
    check_safety(phi, pi, &mut Vec::new())?;
    Ok(apply_renaming(phi, pi))
}

/// Walks the formula keeping the stack of enclosing freezes as
/// (original index, renamed index) frames; at each predicate occurrence the
/// innermost frame matching the original index must coincide with the
/// innermost frame matching the renamed index.
fn check_safety(
    phi: &Formula,
    pi: &Renaming,
    stack: &mut Vec<(FrozenIndex, FrozenIndex)>,
) -> Result<(), RewriteError> {
    match phi.kind() {
        FormulaKind::True => Ok(()),
        FormulaKind::Pred(p) => {
            for index in p.frozen_indices() {
                let renamed = pi.apply(index);
                let binder = stack.iter().rposition(|&(orig, _)| orig == index);
                let target = stack.iter().rposition(|&(_, new)| new == renamed);
                if binder != target {
                    return Err(RewriteError::UnsafeRenaming { index });
                }
            }
            Ok(())
        }
        FormulaKind::Not(p) | FormulaKind::Eventually(_, p) | FormulaKind::Globally(_, p) => {
            check_safety(p, pi, stack)
        }
        FormulaKind::Or(l, r) | FormulaKind::And(l, r) | FormulaKind::Until(_, l, r) => {
            check_safety(l, pi, stack)?;
            check_safety(r, pi, stack)
        }
        FormulaKind::Freeze(i, p) => {
            stack.push((*i, pi.apply(*i)));
            let result = check_safety(p, pi, stack);
            stack.pop();
            result
        }
    }
}

fn apply_renaming(phi: &Formula, pi: &Renaming) -> Formula {
    match phi.kind() {
        FormulaKind::True => phi.clone(),
        FormulaKind::Pred(p) => renamed_pred(p, |i| pi.apply(i)),
        FormulaKind::Not(p) => Formula::not(apply_renaming(p, pi)),
        FormulaKind::Or(l, r) => Formula::or(apply_renaming(l, pi), apply_renaming(r, pi)),
        FormulaKind::And(l, r) => Formula::and(apply_renaming(l, pi), apply_renaming(r, pi)),
        FormulaKind::Until(i, l, r) => {
            Formula::until(*i, apply_renaming(l, pi), apply_renaming(r, pi))
        }
        FormulaKind::Eventually(i, p) => Formula::eventually(*i, apply_renaming(p, pi)),
        FormulaKind::Globally(i, p) => Formula::globally(*i, apply_renaming(p, pi)),
        FormulaKind::Freeze(i, p) => Formula::freeze(pi.apply(*i), apply_renaming(p, pi)),
    }
}

/// A renamed predicate, or the constant it collapses to when colliding
/// blocks cancel every coefficient (the sign of the offset then decides the
/// truth value, exactly as the original does at the collided times).
fn renamed_pred(pred: &LinearPredicate, map: impl Fn(FrozenIndex) -> FrozenIndex) -> Formula {
    match pred.rename_blocks(map) {
        Some(renamed) => Formula::pred(renamed),
        None if pred.offset() >= 0.0 => Formula::truth(),
        None => Formula::not(Formula::truth()),
    }
}

/// Pushes freeze operators down through Boolean connectives until each one
/// sits directly on a temporal operator, a predicate or another freeze.
/// Freezing an index that is not free in the operand is a no-op and is
/// dropped.
pub fn distribute_freeze(phi: &Formula) -> Formula {
    match phi.kind() {
        FormulaKind::True | FormulaKind::Pred(_) => phi.clone(),
        FormulaKind::Not(p) => Formula::not(distribute_freeze(p)),
        FormulaKind::Or(l, r) => Formula::or(distribute_freeze(l), distribute_freeze(r)),
        FormulaKind::And(l, r) => Formula::and(distribute_freeze(l), distribute_freeze(r)),
        FormulaKind::Until(i, l, r) => {
            Formula::until(*i, distribute_freeze(l), distribute_freeze(r))
        }
        FormulaKind::Eventually(i, p) => Formula::eventually(*i, distribute_freeze(p)),
        FormulaKind::Globally(i, p) => Formula::globally(*i, distribute_freeze(p)),
        FormulaKind::Freeze(i, p) => push_freeze(*i, distribute_freeze(p)),
    }
}

fn push_freeze(index: FrozenIndex, phi: Formula) -> Formula {
    if !phi.free_indices().contains(&index) {
        return phi;
    }
    match phi.kind() {
        FormulaKind::Not(p) => Formula::not(push_freeze(index, p.clone())),
        FormulaKind::Or(l, r) => Formula::or(
            push_freeze(index, l.clone()),
            push_freeze(index, r.clone()),
        ),
        FormulaKind::And(l, r) => Formula::and(
            push_freeze(index, l.clone()),
            push_freeze(index, r.clone()),
        ),
        _ => Formula::freeze(index, phi),
    }
}

/// Merges each freeze standing directly on a predicate into the predicate:
/// the frozen time equals the current time there, so the frozen coefficient
/// block folds into the current-time block. The denominator can only
/// shrink, so the robustness of the merged predicate is at least that of
/// the original.
pub fn merge_freeze_into_predicate(phi: &Formula) -> Formula {
    match phi.kind() {
        FormulaKind::True | FormulaKind::Pred(_) => phi.clone(),
        FormulaKind::Not(p) => Formula::not(merge_freeze_into_predicate(p)),
        FormulaKind::Or(l, r) => Formula::or(
            merge_freeze_into_predicate(l),
            merge_freeze_into_predicate(r),
        ),
        FormulaKind::And(l, r) => Formula::and(
            merge_freeze_into_predicate(l),
            merge_freeze_into_predicate(r),
        ),
        FormulaKind::Until(i, l, r) => Formula::until(
            *i,
            merge_freeze_into_predicate(l),
            merge_freeze_into_predicate(r),
        ),
        FormulaKind::Eventually(i, p) => {
            Formula::eventually(*i, merge_freeze_into_predicate(p))
        }
        FormulaKind::Globally(i, p) => Formula::globally(*i, merge_freeze_into_predicate(p)),
        FormulaKind::Freeze(i, p) => {
            let inner = merge_freeze_into_predicate(p);
            match inner.kind() {
                FormulaKind::Pred(mu) => {
                    if mu.frozen_indices().contains(i) {
                        match mu.merge_frozen_into_current(*i) {
                            Some(merged) => Formula::pred(merged),
                            // every coefficient cancelled; the offset decides
                            None if mu.offset() >= 0.0 => Formula::truth(),
                            None => Formula::not(Formula::truth()),
                        }
                    } else {
                        inner
                    }
                }
                _ => Formula::freeze(*i, inner),
            }
        }
    }
}

/// Collapses towers of consecutive freezes: `*i *j phi` freezes both
/// indices at the same time, so both collapse onto one completely fresh
/// index. Shadowing binders of either index inside the operand are
/// alpha-renamed to fresh indices first so that no occurrence is captured.
pub fn merge_consecutive_freezes(phi: &Formula) -> Formula {
    let mut next_fresh = phi
        .used_indices()
        .iter()
        .last()
        .map_or(1, |i| i.get() + 1);
    merge_consecutive(phi, &mut next_fresh)
}

fn merge_consecutive(phi: &Formula, fresh: &mut u32) -> Formula {
    match phi.kind() {
        FormulaKind::True | FormulaKind::Pred(_) => phi.clone(),
        FormulaKind::Not(p) => Formula::not(merge_consecutive(p, fresh)),
        FormulaKind::Or(l, r) => Formula::or(
            merge_consecutive(l, fresh),
            merge_consecutive(r, fresh),
        ),
        FormulaKind::And(l, r) => Formula::and(
            merge_consecutive(l, fresh),
            merge_consecutive(r, fresh),
        ),
        FormulaKind::Until(i, l, r) => Formula::until(
            *i,
            merge_consecutive(l, fresh),
            merge_consecutive(r, fresh),
        ),
        FormulaKind::Eventually(i, p) => Formula::eventually(*i, merge_consecutive(p, fresh)),
        FormulaKind::Globally(i, p) => Formula::globally(*i, merge_consecutive(p, fresh)),
        FormulaKind::Freeze(outer, p) => match p.kind() {
            // an inner freeze of the same index overwrites the same slot
            // with the same time; the outer operator is redundant
            FormulaKind::Freeze(inner, _) if inner == outer => merge_consecutive(p, fresh),
            FormulaKind::Freeze(inner, body) => {
                let merged = FrozenIndex::new(*fresh).expect("fresh index is positive");
                *fresh += 1;
                let body = freshen_binders(body, &[*outer, *inner], fresh);
                let pi = Renaming::new([(*outer, merged), (*inner, merged)]);
                let renamed = rename(&body, &pi)
                    .expect("renaming to a fresh index after freshening cannot capture");
                merge_consecutive(&Formula::freeze(merged, renamed), fresh)
            }
            _ => Formula::freeze(*outer, merge_consecutive(p, fresh)),
        },
    }
}

/// Alpha-renames every binder of the given indices inside `phi` to a fresh
/// index (occurrences bound by it follow), leaving free occurrences alone.
fn freshen_binders(phi: &Formula, targets: &[FrozenIndex], fresh: &mut u32) -> Formula {
    match phi.kind() {
        FormulaKind::True | FormulaKind::Pred(_) => phi.clone(),
        FormulaKind::Not(p) => Formula::not(freshen_binders(p, targets, fresh)),
        FormulaKind::Or(l, r) => Formula::or(
            freshen_binders(l, targets, fresh),
            freshen_binders(r, targets, fresh),
        ),
        FormulaKind::And(l, r) => Formula::and(
            freshen_binders(l, targets, fresh),
            freshen_binders(r, targets, fresh),
        ),
        FormulaKind::Until(i, l, r) => Formula::until(
            *i,
            freshen_binders(l, targets, fresh),
            freshen_binders(r, targets, fresh),
        ),
        FormulaKind::Eventually(i, p) => {
            Formula::eventually(*i, freshen_binders(p, targets, fresh))
        }
        FormulaKind::Globally(i, p) => {
            Formula::globally(*i, freshen_binders(p, targets, fresh))
        }
        FormulaKind::Freeze(i, p) => {
            let body = freshen_binders(p, targets, fresh);
            if targets.contains(i) {
                let replacement = FrozenIndex::new(*fresh).expect("fresh index is positive");
                *fresh += 1;
                // deeper binders of *i were already freshened away, so this
                // renames exactly the occurrences bound here
                let renamed = rename(&body, &Renaming::single(*i, replacement))
                    .expect("renaming a binder to a globally fresh index cannot capture");
                Formula::freeze(replacement, renamed)
            } else {
                Formula::freeze(*i, body)
            }
        }
    }
}

/// Renames frozen indices so the formula uses exactly as many as the
/// maximum number simultaneously free in any subformula, reusing released
/// destinations depth-first. Freezes binding an index with no free
/// occurrence underneath bind nothing and are dropped.
pub fn minimize_indices(phi: &Formula) -> Formula {
    // Free indices of the whole formula all denote time zero; assign them
    // the smallest destinations in ascending order.
    let active: BTreeMap<FrozenIndex, FrozenIndex> = phi
        .free_indices()
        .into_iter()
        .enumerate()
        .map(|(k, index)| {
            (
                index,
                FrozenIndex::new(k as u32 + 1).expect("positive destination"),
            )
        })
        .collect();
    minimize(phi, &active)
}

fn restrict(
    active: &BTreeMap<FrozenIndex, FrozenIndex>,
    live: &BTreeSet<FrozenIndex>,
) -> BTreeMap<FrozenIndex, FrozenIndex> {
    active
        .iter()
        .filter(|(index, _)| live.contains(index))
        .map(|(&k, &v)| (k, v))
        .collect()
}

/// Smallest positive index not in the image of the active pairs.
fn smallest_unused(active: &BTreeMap<FrozenIndex, FrozenIndex>) -> FrozenIndex {
    let used: BTreeSet<FrozenIndex> = active.values().copied().collect();
    let mut candidate = 1;
    for index in &used {
        if index.get() == candidate {
            candidate += 1;
        } else {
            break;
        }
    }
    FrozenIndex::new(candidate).expect("positive destination")
}

fn minimize(phi: &Formula, active: &BTreeMap<FrozenIndex, FrozenIndex>) -> Formula {
    match phi.kind() {
        FormulaKind::True => phi.clone(),
        FormulaKind::Pred(p) => {
            renamed_pred(p, |i| active.get(&i).copied().unwrap_or(i))
        }
        FormulaKind::Not(p) => Formula::not(minimize(p, active)),
        FormulaKind::Or(l, r) => Formula::or(
            minimize(l, &restrict(active, &l.free_indices())),
            minimize(r, &restrict(active, &r.free_indices())),
        ),
        FormulaKind::And(l, r) => Formula::and(
            minimize(l, &restrict(active, &l.free_indices())),
            minimize(r, &restrict(active, &r.free_indices())),
        ),
        FormulaKind::Until(i, l, r) => Formula::until(
            *i,
            minimize(l, &restrict(active, &l.free_indices())),
            minimize(r, &restrict(active, &r.free_indices())),
        ),
        FormulaKind::Eventually(i, p) => Formula::eventually(*i, minimize(p, active)),
        FormulaKind::Globally(i, p) => Formula::globally(*i, minimize(p, active)),
        FormulaKind::Freeze(index, p) => {
            let live = p.free_indices();
            if !live.contains(index) {
                // binds nothing; keeping it would waste a destination
                return minimize(p, &restrict(active, &live));
            }
            let mut inner = restrict(active, &live);
            inner.remove(index);
            let destination = smallest_unused(&inner);
            inner.insert(*index, destination);
            Formula::freeze(destination, minimize(p, &inner))
        }
    }
}

/// Names of the optimization passes, in application order.
pub const PASS_NAMES: [&str; 4] = [
    "distribute-freeze",
    "merge-freeze-into-predicate",
    "merge-consecutive-freezes",
    "minimize-indices",
];

/// Result of the full optimization pipeline, with the intermediate formula
/// after every pass that changed something.
#[derive(Debug, Clone)]
pub struct OptimizeReport {
    pub input: Formula,
    pub output: Formula,
    /// `(pass name, formula after the pass)` for each effective application.
    pub steps: Vec<(&'static str, Formula)>,
    pub indices_before: usize,
    pub indices_after: usize,
}

/// Iteration cap for the pass pipeline. Every pass strictly reduces a
/// well-founded measure, so this is a defensive bound only.
const MAX_PIPELINE_ROUNDS: usize = 100;

/// Runs distribute, merge-into-predicate, merge-consecutive and
/// minimize-indices to a fixed point.
pub fn optimize(phi: &Formula) -> OptimizeReport {
    type Pass = (&'static str, fn(&Formula) -> Formula);
    let passes: [Pass; 4] = [
        (PASS_NAMES[0], distribute_freeze),
        (PASS_NAMES[1], merge_freeze_into_predicate),
        (PASS_NAMES[2], merge_consecutive_freezes),
        (PASS_NAMES[3], minimize_indices),
    ];
    let mut current = phi.clone();
    let mut steps = Vec::new();
    for _ in 0..MAX_PIPELINE_ROUNDS {
        let mut changed = false;
        for (name, pass) in passes {
            let next = pass(&current);
            if next != current {
                steps.push((name, next.clone()));
                current = next;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    OptimizeReport {
        input: phi.clone(),
        indices_before: phi.index_count(),
        indices_after: current.index_count(),
        output: current,
        steps,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    fn idx(i: u32) -> FrozenIndex {
        FrozenIndex::new(i).unwrap()
    }

    fn p(text: &str) -> Formula {
        parse(text).unwrap()
    }

    #[test]
    fn rename_relabels_free_indices() {
        let phi = rename(&p("x*1 >= 0"), &Renaming::single(idx(1), idx(2))).unwrap();
        assert_eq!(phi, p("x*2 >= 0"));
    }

    #[test]
    fn rename_follows_binders() {
        let phi = rename(&p("*1 (x*1 >= 0)"), &Renaming::single(idx(1), idx(3))).unwrap();
        assert_eq!(phi, p("*3 (x*3 >= 0)"));
    }

    #[test]
    fn rename_sums_colliding_blocks() {
        let phi = rename(&p("x*1 + x*2 >= 0"), &Renaming::single(idx(2), idx(1))).unwrap();
        assert_eq!(phi, p("2*x*1 >= 0"));
    }

    #[test]
    fn rename_collapse_to_constant() {
        // blocks cancel exactly; the offset decides the constant
        let phi = rename(&p("x*1 - x*2 >= -1"), &Renaming::single(idx(2), idx(1))).unwrap();
        assert_eq!(phi, Formula::truth());
        let phi = rename(&p("x*1 - x*2 >= 1"), &Renaming::single(idx(2), idx(1))).unwrap();
        assert_eq!(phi, Formula::not(Formula::truth()));
    }

    #[test]
    fn rename_detects_capture() {
        // a free occurrence of 1 would become bound by the enclosing *2
        let err = rename(&p("*2 (x*1 + y*2 >= 0)"), &Renaming::single(idx(1), idx(2)));
        assert_eq!(
            err,
            Err(RewriteError::UnsafeRenaming { index: idx(1) })
        );
        // rebinding under an inner freeze is also unsafe
        let err = rename(
            &p("*1 *2 (x*1 + x*2 >= 0)"),
            &Renaming::single(idx(1), idx(2)),
        );
        assert!(err.is_err());
    }

    #[test]
    fn distribute_pushes_through_not() {
        let phi = distribute_freeze(&p("*1 !F[0,1](x*1 >= 0)"));
        assert_eq!(phi, p("!*1 F[0,1](x*1 >= 0)"));
    }

    #[test]
    fn distribute_drops_unused_branch() {
        // index 1 appears only in the left disjunct
        let phi = distribute_freeze(&p("*1 (x*1 >= 0 || y >= 0)"));
        assert_eq!(phi, p("*1 (x*1 >= 0) || y >= 0"));
    }

    #[test]
    fn distribute_drops_freeze_of_true() {
        let phi = distribute_freeze(&Formula::freeze(idx(1), Formula::truth()));
        assert_eq!(phi, Formula::truth());
    }

    #[test]
    fn merge_pred_folds_frozen_block() {
        assert_eq!(merge_freeze_into_predicate(&p("*1 (x*1 >= 5)")), p("x >= 5"));
        assert_eq!(
            merge_freeze_into_predicate(&p("*1 (x + x*1 >= 0)")),
            p("2*x >= 0")
        );
        // index unused in the predicate: freeze is a no-op
        assert_eq!(merge_freeze_into_predicate(&p("*1 (x*2 >= 0)")), p("x*2 >= 0"));
    }

    #[test]
    fn merge_pred_degenerate_collapses_to_constant() {
        assert_eq!(
            merge_freeze_into_predicate(&p("*1 (x - x*1 >= 0)")),
            Formula::truth()
        );
        assert_eq!(
            merge_freeze_into_predicate(&p("*1 (x - x*1 >= 3)")),
            Formula::not(Formula::truth())
        );
    }

    #[test]
    fn merge_consecutive_uses_fresh_index() {
        let phi = merge_consecutive_freezes(&p("*1 *2 F[0,1](x*1 + x*2 >= x)"));
        assert_eq!(phi, p("*3 F[0,1](2*x*3 >= x)"));
    }

    #[test]
    fn merge_consecutive_leaves_single_freeze() {
        let phi = p("*1 F[0,1](x*1 >= 0)");
        assert_eq!(merge_consecutive_freezes(&phi), phi);
    }

    #[test]
    fn merge_consecutive_same_index_drops_outer() {
        let phi = merge_consecutive_freezes(&p("*1 *1 F[0,1](x*1 >= 0)"));
        assert_eq!(phi, p("*1 F[0,1](x*1 >= 0)"));
    }

    #[test]
    fn merge_consecutive_collapses_whole_towers() {
        // three freezes in a row all store the same time
        let phi = merge_consecutive_freezes(&p("*1 *2 (*1 F[0,1](x*1 + x*2 >= 0))"));
        match phi.kind() {
            FormulaKind::Freeze(_, body) => {
                assert!(matches!(body.kind(), FormulaKind::Eventually(_, _)));
                assert_eq!(phi.index_count(), 1);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn merge_consecutive_freshens_shadowing_binder() {
        // the occurrence of x*2 sits inside an inner *1 scope; when the
        // outer *1 *2 pair merges, the inner binder must be alpha-renamed
        // or the occurrence would be captured
        let phi = merge_consecutive_freezes(&p("*1 *2 F[0,1](*1 G[0,1](x*1 + x*2 >= 0))"));
        assert!(phi.free_indices().is_empty());
        // shape: *k F(*m G(x*m + x*k >= 0)) with k != m
        match phi.kind() {
            FormulaKind::Freeze(k, body) => match body.kind() {
                FormulaKind::Eventually(_, inner) => match inner.kind() {
                    FormulaKind::Freeze(m, glob) => {
                        assert_ne!(k, m);
                        match glob.kind() {
                            FormulaKind::Globally(_, pred) => match pred.kind() {
                                FormulaKind::Pred(mu) => {
                                    let indices = mu.frozen_indices();
                                    assert!(indices.contains(k), "{phi}");
                                    assert!(indices.contains(m), "{phi}");
                                }
                                other => panic!("unexpected {other:?}"),
                            },
                            other => panic!("unexpected {other:?}"),
                        }
                    }
                    other => panic!("unexpected {other:?}"),
                },
                other => panic!("unexpected {other:?}"),
            },
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn minimize_single_index_renames_to_one() {
        assert_eq!(
            minimize_indices(&p("*2 F[0,1](x*2 >= 0)")),
            p("*1 F[0,1](x*1 >= 0)")
        );
    }

    #[test]
    fn minimize_reuses_released_destination() {
        // the two freezes are never simultaneously free
        let phi = minimize_indices(&p("*1 F[0,1](x*1 >= 0) && *2 F[0,1](x*2 >= 0)"));
        assert_eq!(phi, p("*1 F[0,1](x*1 >= 0) && *1 F[0,1](x*1 >= 0)"));
    }

    #[test]
    fn minimize_leaves_freeze_free_formula_alone() {
        let phi = p("F[0,1](x >= 0) && G[0,2](y >= 1)");
        assert_eq!(minimize_indices(&phi), phi);
    }

    #[test]
    fn minimize_drops_dead_freeze() {
        let phi = minimize_indices(&p("*1 (x*2 >= 0)"));
        assert_eq!(phi, p("x*1 >= 0"));
    }

    #[test]
    fn minimize_achieves_max_free_count() {
        // free 7 in one branch, a bound chain in the other; max
        // simultaneously free is 2
        let phi = p("x*7 >= 0 || *1 F[0,1](x*1 + x*2 >= 0)");
        let minimized = minimize_indices(&phi);
        assert_eq!(minimized.index_count(), 2);
    }

    #[test]
    fn optimize_reduces_badly_written_formula_to_one_index() {
        // two indices always storing the same time collapse to one
        let psi = p("G[0,10](*1 !*2 F[0,1](x*1 + x*2 >= x))");
        let report = optimize(&psi);
        assert_eq!(report.indices_before, 2);
        assert_eq!(report.indices_after, 1);
        assert_eq!(report.output, p("G[0,10](!*1 F[0,1](2*x*1 >= x))"));
        assert!(!report.steps.is_empty());
    }

    #[test]
    fn optimize_is_idempotent_on_optimal_formulas() {
        // already uses a single index
        let phi2 = p("F[1,5](I >= 50 && * G[0.25,5](I* >= I))");
        let report = optimize(&phi2);
        assert_eq!(report.indices_before, 1);
        assert_eq!(report.indices_after, 1);
        let again = optimize(&report.output);
        assert_eq!(again.output, report.output);
    }

    #[test]
    fn optimize_leaves_predicates_alone() {
        let phi = p("x >= 0");
        let report = optimize(&phi);
        assert_eq!(report.output, phi);
        assert_eq!(report.indices_before, 0);
        assert_eq!(report.indices_after, 0);
        assert!(report.steps.is_empty());
    }

    #[test]
    fn optimize_never_increases_subformula_free_counts() {
        fn max_free(phi: &Formula) -> usize {
            let own = phi.free_indices().len();
            let children = match phi.kind() {
                FormulaKind::True | FormulaKind::Pred(_) => 0,
                FormulaKind::Not(p)
                | FormulaKind::Eventually(_, p)
                | FormulaKind::Globally(_, p)
                | FormulaKind::Freeze(_, p) => max_free(p),
                FormulaKind::Or(l, r)
                | FormulaKind::And(l, r)
                | FormulaKind::Until(_, l, r) => max_free(l).max(max_free(r)),
            };
            own.max(children)
        }
        for text in [
            "*1 *2 F[0,1](x*1 + x*2 >= x)",
            "G[0,10](*1 !*2 F[0,1](x*1 + x*2 >= 0))",
            "*1 (x*1 >= 0 || F[0,2](y*1 >= x))",
        ] {
            let phi = p(text);
            let report = optimize(&phi);
            assert!(
                max_free(&report.output) <= max_free(&phi),
                "{text}: {} -> {}",
                max_free(&phi),
                max_free(&report.output)
            );
        }
    }
}

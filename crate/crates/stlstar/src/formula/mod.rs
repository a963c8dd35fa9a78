//! Formula syntax: abstract syntax tree, concrete text grammar, and the
//! static analyses (necessary input length, free frozen-time indices,
//! desugaring into the basic operator set).

mod parse;
mod print;

pub use parse::{parse, ParseError};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};

use thiserror::Error;

/// Error produced when constructing formula components from invalid parts.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FormulaError {
    /// Intervals must be closed, non-singular and bounded: `0 <= lo < hi < inf`.
    #[error("invalid time interval [{lo}, {hi}]: require 0 <= lo < hi < inf")]
    InvalidInterval { lo: f64, hi: f64 },
    /// A predicate with every coefficient zero is trivially true or false
    /// and carries no robustness information.
    #[error("predicate has no nonzero coefficient")]
    AllZeroPredicate,
    /// Frozen-time indices are positive integers.
    #[error("frozen index must be a positive integer")]
    BadFrozenIndex,
}

/// Index into the frozen-time vector; always >= 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FrozenIndex(u32);

impl FrozenIndex {
    pub fn new(index: u32) -> Result<Self, FormulaError> {
        if index == 0 {
            Err(FormulaError::BadFrozenIndex)
        } else {
            Ok(FrozenIndex(index))
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

impl fmt::Display for FrozenIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Closed, non-singular, bounded time window attached to a temporal operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeInterval {
    lo: f64,
    hi: f64,
}

impl TimeInterval {
    pub fn new(lo: f64, hi: f64) -> Result<Self, FormulaError> {
        if lo.is_finite() && hi.is_finite() && lo >= 0.0 && lo < hi {
            Ok(TimeInterval { lo, hi })
        } else {
            Err(FormulaError::InvalidInterval { lo, hi })
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }
}

/// Linear inequality over signal values at the current time and at frozen
/// times, kept in the canonical form
///
/// ```text
/// sum_j a[0][j]*x_j  +  sum_i sum_j a[i][j]*x_j*i  +  b  >=  0
/// ```
///
/// Coefficient blocks are keyed by frozen index (block 0 is the current
/// time) and variable name. Zero coefficients are dropped on construction
/// and at least one coefficient must remain.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearPredicate {
    // key: (frozen block; 0 = current time, variable name) -> coefficient
    coeffs: BTreeMap<(u32, String), f64>,
    offset: f64,
}

impl LinearPredicate {
    /// Builds a predicate from `(block, variable, coefficient)` terms plus a
    /// constant offset. `block = None` refers to the current time.
    /// Like terms are summed; terms that cancel to zero are dropped.
    pub fn new<S: Into<String>>(
        terms: impl IntoIterator<Item = (Option<FrozenIndex>, S, f64)>,
        offset: f64,
    ) -> Result<Self, FormulaError> {
        let mut coeffs: BTreeMap<(u32, String), f64> = BTreeMap::new();
        for (block, name, coeff) in terms {
            let key = (block.map_or(0, FrozenIndex::get), name.into());
            *coeffs.entry(key).or_insert(0.0) += coeff;
        }
        coeffs.retain(|_, c| *c != 0.0);
        if coeffs.is_empty() {
            return Err(FormulaError::AllZeroPredicate);
        }
        Ok(LinearPredicate { coeffs, offset })
    }

    /// Shorthand for a predicate over current-time values only.
    pub fn current<S: Into<String>>(
        terms: impl IntoIterator<Item = (S, f64)>,
        offset: f64,
    ) -> Result<Self, FormulaError> {
        Self::new(terms.into_iter().map(|(n, c)| (None, n, c)), offset)
    }

    /// Terms in canonical order: block 0 first, then frozen blocks by
    /// ascending index, variables sorted by name within a block.
    pub fn terms(&self) -> impl Iterator<Item = (Option<FrozenIndex>, &str, f64)> {
        self.coeffs.iter().map(|((block, name), coeff)| {
            let idx = if *block == 0 {
                None
            } else {
                Some(FrozenIndex(*block))
            };
            (idx, name.as_str(), *coeff)
        })
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Frozen indices with a nonzero coefficient in this predicate.
    pub fn frozen_indices(&self) -> BTreeSet<FrozenIndex> {
        self.coeffs
            .keys()
            .filter(|(block, _)| *block != 0)
            .map(|(block, _)| FrozenIndex(*block))
            .collect()
    }

    /// Variable names referenced by this predicate.
    pub fn variables(&self) -> BTreeSet<&str> {
        self.coeffs.keys().map(|(_, name)| name.as_str()).collect()
    }

    /// Denominator of the robustness closed form: the coefficient blocks'
    /// Euclidean norms summed over the current time and every frozen index.
    /// Strictly positive by the all-zero invariant.
    pub fn denominator(&self) -> f64 {
        let mut total = 0.0_f64;
        let mut block = None;
        let mut acc = 0.0_f64;
        for ((b, _), c) in &self.coeffs {
            if block != Some(*b) {
                total += acc.sqrt();
                acc = 0.0;
                block = Some(*b);
            }
            acc += c * c;
        }
        total + acc.sqrt()
    }

    /// Folds the coefficient block of `index` into the current-time block.
    /// Returns `None` if every coefficient cancels.
    pub(crate) fn merge_frozen_into_current(&self, index: FrozenIndex) -> Option<Self> {
        let mut coeffs: BTreeMap<(u32, String), f64> = BTreeMap::new();
        for ((block, name), coeff) in &self.coeffs {
            let new_block = if *block == index.get() { 0 } else { *block };
            *coeffs.entry((new_block, name.clone())).or_insert(0.0) += coeff;
        }
        coeffs.retain(|_, c| *c != 0.0);
        if coeffs.is_empty() {
            None
        } else {
            Some(LinearPredicate {
                coeffs,
                offset: self.offset,
            })
        }
    }

    /// Applies an index renaming to the coefficient blocks, summing blocks
    /// that collide. Returns `None` if every coefficient cancels.
    pub(crate) fn rename_blocks(&self, map: impl Fn(FrozenIndex) -> FrozenIndex) -> Option<Self> {
        let mut coeffs: BTreeMap<(u32, String), f64> = BTreeMap::new();
        for ((block, name), coeff) in &self.coeffs {
            let new_block = if *block == 0 {
                0
            } else {
                map(FrozenIndex(*block)).get()
            };
            *coeffs.entry((new_block, name.clone())).or_insert(0.0) += coeff;
        }
        coeffs.retain(|_, c| *c != 0.0);
        if coeffs.is_empty() {
            None
        } else {
            Some(LinearPredicate {
                coeffs,
                offset: self.offset,
            })
        }
    }
}

/// Monotone counter giving every constructed node a distinct identity.
static NEXT_NODE_ID: AtomicU64 = AtomicU64::new(1);

/// Stable identity of a formula node, usable as a memoization key.
/// Cloning a formula keeps the ids of the cloned nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NodeId(u64);

impl NodeId {
    fn fresh() -> Self {
        NodeId(NEXT_NODE_ID.fetch_add(1, Ordering::Relaxed))
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

/// One node of the syntax tree.
#[derive(Debug, Clone, PartialEq)]
pub enum FormulaKind {
    /// The constant true.
    True,
    /// Linear predicate over current and frozen signal values.
    Pred(LinearPredicate),
    Not(Formula),
    Or(Formula, Formula),
    And(Formula, Formula),
    /// `left U[lo, hi] right`
    Until(TimeInterval, Formula, Formula),
    /// `F[lo, hi] phi`
    Eventually(TimeInterval, Formula),
    /// `G[lo, hi] phi`
    Globally(TimeInterval, Formula),
    /// `*i phi`: stores the current time as the i-th frozen time.
    Freeze(FrozenIndex, Formula),
}

/// A formula of the logic: an immutable syntax tree. Equality is structural
/// and ignores node identity.
#[derive(Debug, Clone)]
pub struct Formula {
    id: NodeId,
    kind: Box<FormulaKind>,
}

impl PartialEq for Formula {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Formula {
    fn node(kind: FormulaKind) -> Self {
        Formula {
            id: NodeId::fresh(),
            kind: Box::new(kind),
        }
    }

    pub fn truth() -> Self {
        Self::node(FormulaKind::True)
    }

    pub fn pred(pred: LinearPredicate) -> Self {
        Self::node(FormulaKind::Pred(pred))
    }

    #[allow(clippy::should_implement_trait)] // constructor set mirrors the connectives
    pub fn not(phi: Formula) -> Self {
        Self::node(FormulaKind::Not(phi))
    }

    pub fn or(lhs: Formula, rhs: Formula) -> Self {
        Self::node(FormulaKind::Or(lhs, rhs))
    }

    pub fn and(lhs: Formula, rhs: Formula) -> Self {
        Self::node(FormulaKind::And(lhs, rhs))
    }

    pub fn until(interval: TimeInterval, lhs: Formula, rhs: Formula) -> Self {
        Self::node(FormulaKind::Until(interval, lhs, rhs))
    }

    pub fn eventually(interval: TimeInterval, phi: Formula) -> Self {
        Self::node(FormulaKind::Eventually(interval, phi))
    }

    pub fn globally(interval: TimeInterval, phi: Formula) -> Self {
        Self::node(FormulaKind::Globally(interval, phi))
    }

    pub fn freeze(index: FrozenIndex, phi: Formula) -> Self {
        Self::node(FormulaKind::Freeze(index, phi))
    }

    pub fn id(&self) -> NodeId {
        self.id
    }

    pub fn kind(&self) -> &FormulaKind {
        &self.kind
    }

    /// Number of syntax tree nodes.
    pub fn size(&self) -> usize {
        let children = match self.kind() {
            FormulaKind::True | FormulaKind::Pred(_) => 0,
            FormulaKind::Not(p)
            | FormulaKind::Eventually(_, p)
            | FormulaKind::Globally(_, p)
            | FormulaKind::Freeze(_, p) => p.size(),
            FormulaKind::Or(l, r) | FormulaKind::And(l, r) | FormulaKind::Until(_, l, r) => {
                l.size() + r.size()
            }
        };
        children + 1
    }

    /// Necessary input length: the shortest signal duration on which the
    /// formula's satisfaction is determined.
    pub fn necessary_length(&self) -> f64 {
        match self.kind() {
            FormulaKind::True | FormulaKind::Pred(_) => 0.0,
            FormulaKind::Not(p) | FormulaKind::Freeze(_, p) => p.necessary_length(),
            FormulaKind::Or(l, r) | FormulaKind::And(l, r) => {
                l.necessary_length().max(r.necessary_length())
            }
            FormulaKind::Until(i, l, r) => {
                l.necessary_length().max(r.necessary_length()) + i.hi()
            }
            FormulaKind::Eventually(i, p) | FormulaKind::Globally(i, p) => {
                p.necessary_length() + i.hi()
            }
        }
    }

    /// Frozen indices used in a predicate and not bound by an enclosing
    /// freeze operator.
    pub fn free_indices(&self) -> BTreeSet<FrozenIndex> {
        match self.kind() {
            FormulaKind::True => BTreeSet::new(),
            FormulaKind::Pred(p) => p.frozen_indices(),
            FormulaKind::Not(p) | FormulaKind::Eventually(_, p) | FormulaKind::Globally(_, p) => {
                p.free_indices()
            }
            FormulaKind::Or(l, r) | FormulaKind::And(l, r) | FormulaKind::Until(_, l, r) => {
                let mut set = l.free_indices();
                set.extend(r.free_indices());
                set
            }
            FormulaKind::Freeze(i, p) => {
                let mut set = p.free_indices();
                set.remove(i);
                set
            }
        }
    }

    /// All frozen indices appearing anywhere in the formula, whether in
    /// predicates or on freeze operators.
    pub fn used_indices(&self) -> BTreeSet<FrozenIndex> {
        let mut set = BTreeSet::new();
        self.collect_used(&mut set);
        set
    }

    fn collect_used(&self, set: &mut BTreeSet<FrozenIndex>) {
        match self.kind() {
            FormulaKind::True => {}
            FormulaKind::Pred(p) => set.extend(p.frozen_indices()),
            FormulaKind::Not(p) | FormulaKind::Eventually(_, p) | FormulaKind::Globally(_, p) => {
                p.collect_used(set)
            }
            FormulaKind::Or(l, r) | FormulaKind::And(l, r) | FormulaKind::Until(_, l, r) => {
                l.collect_used(set);
                r.collect_used(set);
            }
            FormulaKind::Freeze(i, p) => {
                set.insert(*i);
                p.collect_used(set);
            }
        }
    }

    /// Number of distinct frozen indices used in the formula.
    pub fn index_count(&self) -> usize {
        self.used_indices().len()
    }

    /// Variable names referenced by the formula's predicates.
    pub fn variables(&self) -> BTreeSet<String> {
        let mut set = BTreeSet::new();
        self.collect_variables(&mut set);
        set
    }

    fn collect_variables(&self, set: &mut BTreeSet<String>) {
        match self.kind() {
            FormulaKind::True => {}
            FormulaKind::Pred(p) => {
                set.extend(p.variables().into_iter().map(String::from));
            }
            FormulaKind::Not(p)
            | FormulaKind::Eventually(_, p)
            | FormulaKind::Globally(_, p)
            | FormulaKind::Freeze(_, p) => p.collect_variables(set),
            FormulaKind::Or(l, r) | FormulaKind::And(l, r) | FormulaKind::Until(_, l, r) => {
                l.collect_variables(set);
                r.collect_variables(set);
            }
        }
    }

    /// Rewrites the formula into the basic operator set: true, predicates,
    /// negation, disjunction, until and freeze.
    ///
    /// `F[a,b] p` becomes `true U[a,b] p`, `G[a,b] p` becomes
    /// `!(true U[a,b] !p)` and `p && q` becomes `!(!p || !q)`.
    pub fn desugar(&self) -> Formula {
        match self.kind() {
            FormulaKind::True | FormulaKind::Pred(_) => self.clone(),
            FormulaKind::Not(p) => Formula::not(p.desugar()),
            FormulaKind::Or(l, r) => Formula::or(l.desugar(), r.desugar()),
            FormulaKind::And(l, r) => Formula::not(Formula::or(
                Formula::not(l.desugar()),
                Formula::not(r.desugar()),
            )),
            FormulaKind::Until(i, l, r) => Formula::until(*i, l.desugar(), r.desugar()),
            FormulaKind::Eventually(i, p) => {
                Formula::until(*i, Formula::truth(), p.desugar())
            }
            FormulaKind::Globally(i, p) => Formula::not(Formula::until(
                *i,
                Formula::truth(),
                Formula::not(p.desugar()),
            )),
            FormulaKind::Freeze(idx, p) => Formula::freeze(*idx, p.desugar()),
        }
    }
}

impl FromStr for Formula {
    type Err = ParseError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        parse(text)
    }
}

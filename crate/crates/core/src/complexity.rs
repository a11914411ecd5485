//! Tree-size complexity, minimal trees, tautology expansions and irreducible reduction.

use std::collections::{HashMap, HashSet};

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact_dist::SequenceTables;
use crate::formula::{semantic, truth_table, AndOrTree, Connective, Literal, TruthTable};

/// Largest tree size searched when no budget is given.
pub const DEFAULT_BUDGET: usize = 11;

/// Exhaustive search is limited to this many variables.
pub const MAX_EXHAUSTIVE_VARS: u32 = 3;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexityRecord {
    pub f: TruthTable,
    /// Tree-size complexity `L(f)`.
    pub l: usize,
    /// Number of minimal trees; `None` for constants and literals.
    pub m_f: Option<BigUint>,
    pub witnesses: Option<Vec<AndOrTree>>,
}

/// Shared tables for every complexity query at a fixed `n` and size budget.
pub struct ComplexityLab {
    pub n: u32,
    pub budget: usize,
    tabs: SequenceTables,
    full: usize,
    and_memo: HashMap<(usize, usize), Vec<AndOrTree>>,
    seq_memo: HashMap<(usize, usize, bool), Vec<Vec<AndOrTree>>>,
}

impl ComplexityLab {
    pub fn new(n: u32, budget: usize) -> Result<Self> {
        if n > MAX_EXHAUSTIVE_VARS {
            return Err(Error::Precondition(format!("exhaustive complexity search needs n <= {MAX_EXHAUSTIVE_VARS}")));
        }
        let tabs = SequenceTables::new(n, budget.max(1))?;
        let full = TruthTable::full_mask(n) as usize;
        Ok(ComplexityLab { n, budget, tabs, full, and_memo: HashMap::new(), seq_memo: HashMap::new() })
    }

    fn check_f(&self, f: TruthTable) -> Result<usize> {
        if f.n() != self.n {
            return Err(Error::InvalidParameter(format!("truth table has {} variables, expected {}", f.n(), self.n)));
        }
        Ok(f.bits() as usize)
    }

    /// Trees of size exactly `s` computing `f`, any root.
    pub fn count(&self, f: TruthTable, s: usize) -> Result<BigUint> {
        let g = self.check_f(f)?;
        if s == 0 || s > self.budget {
            return Ok(BigUint::zero());
        }
        Ok(if s == 1 { self.tabs.hat[1][g].clone() } else { &self.tabs.hat[s][g] + self.tabs.check(s, g) })
    }

    pub fn complexity(&self, f: TruthTable) -> Result<ComplexityRecord> {
        self.check_f(f)?;
        if f.is_constant() {
            return Ok(ComplexityRecord { f, l: 0, m_f: None, witnesses: None });
        }
        if f.as_literal().is_some() {
            return Ok(ComplexityRecord { f, l: 2, m_f: None, witnesses: None });
        }
        for s in 3..=self.budget {
            let c = self.count(f, s)?;
            if !c.is_zero() {
                return Ok(ComplexityRecord { f, l: s, m_f: Some(c), witnesses: None });
            }
        }
        Err(Error::ComplexityUnknown(self.budget))
    }

    /// The record together with every minimal tree.
    pub fn complexity_with_witnesses(&mut self, f: TruthTable) -> Result<ComplexityRecord> {
        let mut rec = self.complexity(f)?;
        if rec.l >= 3 {
            rec.witnesses = Some(self.trees_computing(f, rec.l)?);
        }
        Ok(rec)
    }

    /// The complete list of size-`L(f)` trees computing `f`.
    pub fn minimal_trees(&mut self, f: TruthTable) -> Result<Vec<AndOrTree>> {
        let rec = self.complexity(f)?;
        if rec.l < 3 {
            return Err(Error::Precondition(format!("minimal trees are defined for L(f) >= 3, got L = {}", rec.l)));
        }
        self.trees_computing(f, rec.l)
    }

    /// All trees of size `s` computing `f`, AND-rooted first.
    pub fn trees_computing(&mut self, f: TruthTable, s: usize) -> Result<Vec<AndOrTree>> {
        let g = self.check_f(f)?;
        if s > self.budget {
            return Err(Error::Budget(format!("size {s} exceeds the search budget {}", self.budget)));
        }
        if s == 1 {
            return Ok(self.leaves(g));
        }
        let mut out = self.and_rooted(s, g);
        out.extend(self.or_rooted(s, g));
        Ok(out)
    }

    fn leaves(&self, g: usize) -> Vec<AndOrTree> {
        Literal::all(self.n).filter(|l| TruthTable::literal(self.n, *l).bits() as usize == g).map(AndOrTree::Leaf).collect()
    }

    fn and_rooted(&mut self, s: usize, g: usize) -> Vec<AndOrTree> {
        if s < 3 || self.tabs.hat[s][g].is_zero() {
            return Vec::new();
        }
        if let Some(v) = self.and_memo.get(&(s, g)) {
            return v.clone();
        }
        let out: Vec<AndOrTree> = self.sequences(s - 1, g, true).into_iter().map(|kids| AndOrTree::Node(Connective::And, kids)).collect();
        self.and_memo.insert((s, g), out.clone());
        out
    }

    fn or_rooted(&mut self, s: usize, g: usize) -> Vec<AndOrTree> {
        let neg = self.full ^ g;
        self.and_rooted(s, neg).iter().map(AndOrTree::dual).collect()
    }

    /// Children of an AND node: leaves or OR-rooted trees.
    fn child(&mut self, s: usize, g: usize) -> Vec<AndOrTree> {
        if s == 1 {
            self.leaves(g)
        } else {
            self.or_rooted(s, g)
        }
    }

    /// Child sequences of total size `t` whose conjunction is `g`.
    fn sequences(&mut self, t: usize, g: usize, need_two: bool) -> Vec<Vec<AndOrTree>> {
        if let Some(v) = self.seq_memo.get(&(t, g, need_two)) {
            return v.clone();
        }
        let nf = self.full + 1;
        let mut out = Vec::new();
        if !need_two && !self.tabs.check(t, g).is_zero() {
            out.extend(self.child(t, g).into_iter().map(|c| vec![c]));
        }
        for i in 1..t {
            let rest = t - i;
            for h in 0..nf {
                if self.tabs.check(i, h).is_zero() || h & g != g {
                    continue;
                }
                for r in 0..nf {
                    if h & r != g || (self.tabs.check(rest, r).is_zero() && self.tabs.many[rest][r].is_zero()) {
                        continue;
                    }
                    let heads = self.child(i, h);
                    let tails = self.sequences(rest, r, false);
                    for c in &heads {
                        for tail in &tails {
                            let mut v = Vec::with_capacity(tail.len() + 1);
                            v.push(c.clone());
                            v.extend(tail.iter().cloned());
                            out.push(v);
                        }
                    }
                }
            }
        }
        self.seq_memo.insert((t, g, need_two), out.clone());
        out
    }
}

/// `L(f)` and `m_f` for `f` over `n <= 3` variables, searching sizes up to `budget`.
pub fn complexity(f: TruthTable, n: u32, budget: usize) -> Result<ComplexityRecord> {
    ComplexityLab::new(n, budget)?.complexity(f)
}

pub fn minimal_trees(f: TruthTable, n: u32) -> Result<Vec<AndOrTree>> {
    ComplexityLab::new(n, DEFAULT_BUDGET)?.minimal_trees(f)
}

/// Records for every function of `n` variables, in truth-table order.
pub fn complexity_table(n: u32, budget: usize) -> Result<Vec<Result<ComplexityRecord>>> {
    let lab = ComplexityLab::new(n, budget)?;
    Ok(TruthTable::all(n).map(|f| lab.complexity(f)).collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlotBounds {
    pub p_t: usize,
    pub l: usize,
    /// `L <= P_t <= floor(3L/2)`.
    pub check: bool,
}

/// Grafting slots of a minimal tree against the bounds `L <= P_t <= floor(3L/2)`.
pub fn slots_and_bounds(t: &AndOrTree, n: u32) -> Result<SlotBounds> {
    t.validate(n)?;
    let f = truth_table(t, n);
    let rec = complexity(f, n, t.size().max(3))?;
    if rec.l < 3 || t.size() != rec.l {
        return Err(Error::Precondition(format!("tree of size {} is not minimal (L = {})", t.size(), rec.l)));
    }
    let p_t = t.expansion_slots();
    Ok(SlotBounds { p_t, l: rec.l, check: rec.l <= p_t && p_t <= 3 * rec.l / 2 })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExpansionKind {
    /// A tautology under an AND node.
    Tautology,
    /// A contradiction under an OR node.
    Contradiction,
    /// Any non-leaf subtree.
    BExpansion,
    /// Unrestricted insertion.
    Plain,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExpansionStep {
    pub host_path: Vec<usize>,
    /// Index among the host's children at which the subtree is inserted.
    pub position: usize,
    pub subtree: AndOrTree,
    pub kind: ExpansionKind,
}

/// Inserts `step.subtree` under the host node; structural requirements are checked, semantics are not.
pub fn expand(t: &AndOrTree, step: &ExpansionStep) -> Result<AndOrTree> {
    let host = t.subtree(&step.host_path).ok_or_else(|| Error::InvalidPath(step.host_path.clone()))?;
    let conn = host.connective().ok_or_else(|| Error::InvalidPath(step.host_path.clone()))?;
    if step.position > host.children().len() {
        return Err(Error::InvalidPath(step.host_path.clone()));
    }
    step.subtree.check_structure()?;
    if step.subtree.connective() == Some(conn) {
        return Err(Error::Stratification(format!("cannot graft a {} subtree under a {} node", conn.keyword(), conn.keyword())));
    }
    match step.kind {
        ExpansionKind::Tautology if conn != Connective::And => {
            return Err(Error::Precondition("a tautology expansion needs an AND host".into()))
        }
        ExpansionKind::Contradiction if conn != Connective::Or => {
            return Err(Error::Precondition("a contradiction expansion needs an OR host".into()))
        }
        ExpansionKind::BExpansion if step.subtree.is_leaf() => {
            return Err(Error::Precondition("a B-expansion grafts a non-leaf subtree".into()))
        }
        _ => {}
    }
    let mut out = t.clone();
    if let Some(AndOrTree::Node(_, ch)) = out.subtree_mut(&step.host_path) {
        ch.insert(step.position, step.subtree.clone());
    }
    Ok(out)
}

/// Whether the expansion is structurally legal and preserves the computed function.
pub fn is_valid_expansion(t: &AndOrTree, step: &ExpansionStep) -> Result<bool> {
    let e = expand(t, step)?;
    Ok(semantic::equivalent(t, &e))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    pub tree: AndOrTree,
    /// Removed subtrees in removal order.
    pub trace: Vec<AndOrTree>,
}

fn absorbing(host: Connective, child: &AndOrTree) -> bool {
    !child.is_leaf()
        && match host {
            Connective::And => semantic::is_tautology(child),
            Connective::Or => semantic::is_contradiction(child),
        }
}

/// First removable child in post-order: `(host path, child index)`.
fn find_removable(t: &AndOrTree, path: &mut Vec<usize>) -> Option<(Vec<usize>, usize)> {
    if let AndOrTree::Node(c, ch) = t {
        for (i, k) in ch.iter().enumerate() {
            path.push(i);
            let hit = find_removable(k, path);
            path.pop();
            if hit.is_some() {
                return hit;
            }
        }
        if let Some(i) = ch.iter().position(|k| absorbing(*c, k)) {
            return Some((path.clone(), i));
        }
    }
    None
}

fn remove_child(tree: &mut AndOrTree, host_path: &[usize], i: usize) -> AndOrTree {
    let host = tree.subtree_mut(host_path).expect("host path");
    let AndOrTree::Node(_, ch) = host else { unreachable!("host is internal") };
    let removed = ch.remove(i);
    if ch.len() == 1 {
        let only = ch.pop().expect("one child");
        match host_path.split_last() {
            None => *tree = only,
            Some((&idx, parent_path)) => {
                let Some(AndOrTree::Node(_, siblings)) = tree.subtree_mut(parent_path) else { unreachable!("parent is internal") };
                match only {
                    AndOrTree::Leaf(_) => siblings[idx] = only,
                    AndOrTree::Node(_, kids) => {
                        siblings.splice(idx..=idx, kids);
                    }
                }
            }
        }
    }
    removed
}

/// Undoes tautology and contradiction expansions, leftmost-innermost first, until none remain.
pub fn reduce_irreducible(t: &AndOrTree) -> Reduction {
    let mut tree = t.clone();
    let mut trace = Vec::new();
    while let Some((host, i)) = find_removable(&tree, &mut Vec::new()) {
        trace.push(remove_child(&mut tree, &host, i));
    }
    Reduction { tree, trace }
}

/// Default cap on candidate expansions examined by [`expansion_count`].
pub const EXPANSION_BUDGET: u64 = 2_000_000;

/// Distinct size-`m` trees reachable by one tautology or contradiction expansion of a minimal tree of `f`.
pub fn expansion_count(f: TruthTable, n: u32, m: usize) -> Result<BigUint> {
    expansion_count_with_budget(f, n, m, EXPANSION_BUDGET)
}

pub fn expansion_count_with_budget(f: TruthTable, n: u32, m: usize, budget: u64) -> Result<BigUint> {
    let mut lab = ComplexityLab::new(n, m.max(DEFAULT_BUDGET))?;
    let minimal = lab.minimal_trees(f)?;
    let l = minimal[0].size();
    if m < l + 3 {
        return Ok(BigUint::zero());
    }
    let s = m - l;
    let full = TruthTable::full_mask(n) as usize;
    let tautologies = lab.or_rooted(s, full);
    let contradictions = lab.and_rooted(s, 0);
    let per_tree = (3 * l / 2) as u64 * tautologies.len().max(contradictions.len()) as u64;
    if per_tree.saturating_mul(minimal.len() as u64) > budget {
        return Err(Error::Budget(format!("expansion enumeration exceeds {budget} candidates")));
    }
    let mut seen = HashSet::new();
    for t in &minimal {
        for path in t.internal_paths() {
            let host = t.subtree(&path).expect("internal path");
            let (subs, kind) = match host.connective() {
                Some(Connective::And) => (&tautologies, ExpansionKind::Tautology),
                _ => (&contradictions, ExpansionKind::Contradiction),
            };
            for position in 0..=host.children().len() {
                for sub in subs {
                    let step = ExpansionStep { host_path: path.clone(), position, subtree: sub.clone(), kind };
                    seen.insert(expand(t, &step)?);
                }
            }
        }
    }
    Ok(BigUint::from(seen.len()))
}

/// Upper estimate `m_f * floor(3L/2) * T_count(m - L)` from the slot bound.
pub fn expansion_upper_bound(f: TruthTable, n: u32, m: usize) -> Result<BigUint> {
    let lab = ComplexityLab::new(n, m.max(DEFAULT_BUDGET))?;
    let rec = lab.complexity(f)?;
    let m_f = rec.m_f.ok_or_else(|| Error::Precondition("needs L(f) >= 3".into()))?;
    if m < rec.l {
        return Ok(BigUint::zero());
    }
    let t_count = lab.count(TruthTable::constant(n, true), m - rec.l)?;
    Ok(m_f * BigUint::from(3 * rec.l / 2) * t_count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;

    fn tt(n: u32, s: &str) -> TruthTable {
        truth_table(&parse_formula(s, n).unwrap(), n)
    }

    #[test]
    fn constants_and_literals() {
        let r = complexity(TruthTable::constant(2, true), 2, 5).unwrap();
        assert_eq!((r.l, r.m_f), (0, None));
        let r = complexity(TruthTable::literal(2, Literal::pos(1)), 2, 5).unwrap();
        assert_eq!((r.l, r.m_f), (2, None));
    }

    #[test]
    fn xor_needs_seven() {
        let f = tt(2, "(or (and x1 ~x2) (and ~x1 x2))");
        assert_eq!(complexity(f, 2, 9).unwrap().l, 7);
        assert_eq!(complexity(f, 2, 6), Err(Error::ComplexityUnknown(6)));
    }

    #[test]
    fn minimal_and() {
        let f = tt(2, "(and x1 x2)");
        let mut v: Vec<String> = minimal_trees(f, 2).unwrap().iter().map(|t| t.serialize()).collect();
        v.sort();
        assert_eq!(v, vec!["(and x1 x2)", "(and x2 x1)"]);
        assert_eq!(minimal_trees(tt(2, "(or x1 x2)"), 2).unwrap().len(), 2);
    }

    #[test]
    fn slots() {
        let t = parse_formula("(and x1 x2)", 2).unwrap();
        assert_eq!(slots_and_bounds(&t, 2).unwrap(), SlotBounds { p_t: 3, l: 3, check: true });
        let big = parse_formula("(and x1 x2 (or x1 ~x1))", 2).unwrap();
        assert!(matches!(slots_and_bounds(&big, 2), Err(Error::Precondition(_))));
    }

    #[test]
    fn expansions() {
        let t = parse_formula("(and x1 x3)", 3).unwrap();
        let taut = parse_formula("(or x2 ~x2)", 3).unwrap();
        let step = ExpansionStep { host_path: vec![], position: 1, subtree: taut, kind: ExpansionKind::Tautology };
        assert!(is_valid_expansion(&t, &step).unwrap());
        assert_eq!(expand(&t, &step).unwrap().serialize(), "(and x1 (or x2 ~x2) x3)");
        let bad = ExpansionStep { subtree: AndOrTree::Node(Connective::Or, vec![AndOrTree::Leaf(Literal::pos(2))]), ..step.clone() };
        assert!(matches!(expand(&t, &bad), Err(Error::Arity { .. })));
        let leaf = ExpansionStep { subtree: AndOrTree::Leaf(Literal::pos(2)), kind: ExpansionKind::Plain, ..step.clone() };
        assert!(!is_valid_expansion(&t, &leaf).unwrap());
        let same = ExpansionStep { subtree: parse_formula("(and x2 ~x2)", 3).unwrap(), kind: ExpansionKind::Plain, ..step.clone() };
        assert!(matches!(expand(&t, &same), Err(Error::Stratification(_))));
        let nowhere = ExpansionStep { host_path: vec![0], ..step };
        assert!(matches!(expand(&t, &nowhere), Err(Error::InvalidPath(_))));
    }

    #[test]
    fn reduction() {
        let t = parse_formula("(and x1 x2 (or x3 ~x3))", 3).unwrap();
        let r = reduce_irreducible(&t);
        assert_eq!(r.tree.serialize(), "(and x1 x2)");
        assert_eq!(r.trace.len(), 1);
        let m = parse_formula("(and x1 x2)", 2).unwrap();
        assert_eq!(reduce_irreducible(&m), Reduction { tree: m.clone(), trace: vec![] });
        let collapse = parse_formula("(or x3 (and x1 (or x2 ~x2)))", 3).unwrap();
        assert_eq!(reduce_irreducible(&collapse).tree.serialize(), "(or x3 x1)");
        let splice = parse_formula("(or x3 (and (or x1 x2) (or x2 ~x2)))", 3).unwrap();
        assert_eq!(reduce_irreducible(&splice).tree.serialize(), "(or x3 x1 x2)");
    }

    #[test]
    fn expansion_count_small() {
        let f = tt(2, "(and x1 x2)");
        assert_eq!(expansion_count(f, 2, 3).unwrap(), BigUint::zero());
        assert_eq!(expansion_count(f, 2, 6).unwrap(), BigUint::from(24u32));
        assert!(expansion_count(f, 2, 8).unwrap() <= expansion_upper_bound(f, 2, 8).unwrap());
    }
}

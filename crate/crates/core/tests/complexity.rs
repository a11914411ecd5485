use std::collections::{BTreeMap, HashSet};

use andor::complexity::*;
use andor::counting::brute_enumerate;
use andor::exact_dist::FunctionCounts;
use andor::formula::{truth_table, AndOrTree, TruthTable};
use num_bigint::BigUint;

/// Smallest size and number of trees at that size, per function, by exhaustive enumeration.
fn brute_minimal(n: u32, max_size: usize) -> BTreeMap<TruthTable, (usize, Vec<AndOrTree>)> {
    let mut out: BTreeMap<TruthTable, (usize, Vec<AndOrTree>)> = BTreeMap::new();
    for s in (1..=max_size).filter(|&s| s != 2) {
        for t in brute_enumerate(s, n).unwrap() {
            let f = truth_table(&t, n);
            let e = out.entry(f).or_insert((s, Vec::new()));
            if e.0 == s {
                e.1.push(t);
            }
        }
    }
    out
}

#[test]
fn golden_table_n2() {
    let golden = [
        ("0", 0, None),
        ("1", 3, Some(2)),
        ("2", 3, Some(2)),
        ("3", 2, None),
        ("4", 3, Some(2)),
        ("5", 2, None),
        ("6", 7, Some(16)),
        ("7", 3, Some(2)),
        ("8", 3, Some(2)),
        ("9", 7, Some(16)),
        ("a", 2, None),
        ("b", 3, Some(2)),
        ("c", 2, None),
        ("d", 3, Some(2)),
        ("e", 3, Some(2)),
        ("f", 0, None),
    ];
    let table = complexity_table(2, 9).unwrap();
    for ((hex, l, m_f), rec) in golden.iter().zip(&table) {
        let rec = rec.as_ref().unwrap();
        assert_eq!(rec.f.to_hex(), *hex);
        assert_eq!(rec.l, *l);
        assert_eq!(rec.m_f, m_f.map(|v: u32| BigUint::from(v)));
    }
}

#[test]
fn search_agrees_with_enumeration() {
    for n in 1..=2u32 {
        let brute = brute_minimal(n, 7);
        let mut lab = ComplexityLab::new(n, 9).unwrap();
        for f in TruthTable::all(n) {
            let rec = lab.complexity(f).unwrap();
            if f.is_constant() || f.as_literal().is_some() {
                continue;
            }
            let (size, trees) = &brute[&f];
            assert_eq!(rec.l, *size, "f = {f}");
            assert_eq!(rec.m_f, Some(BigUint::from(trees.len())));
            let mut got: Vec<AndOrTree> = lab.minimal_trees(f).unwrap();
            let mut want = trees.clone();
            got.sort();
            want.sort();
            assert_eq!(got, want);
        }
    }
}

#[test]
fn minimal_trees_satisfy_slot_bounds() {
    let mut lab = ComplexityLab::new(2, 9).unwrap();
    for f in TruthTable::all(2) {
        let rec = lab.complexity(f).unwrap();
        if rec.l < 3 {
            continue;
        }
        for t in lab.minimal_trees(f).unwrap() {
            assert_eq!(truth_table(&t, 2), f);
            assert_eq!(t.size(), rec.l);
            let b = slots_and_bounds(&t, 2).unwrap();
            assert!(b.check, "{t}: {b:?}");
        }
    }
}

#[test]
fn complexity_is_invariant_under_negation() {
    let lab = ComplexityLab::new(2, 9).unwrap();
    for f in TruthTable::all(2) {
        let a = lab.complexity(f).unwrap();
        let b = lab.complexity(f.not()).unwrap();
        assert_eq!((a.l, a.m_f), (b.l, b.m_f), "f = {f}");
    }
}

#[test]
fn three_variables() {
    let lab = ComplexityLab::new(3, 9).unwrap();
    let f = truth_table(&andor::formula::parse_formula("(and x1 x2 x3)", 3).unwrap(), 3);
    let rec = lab.complexity(f).unwrap();
    assert_eq!(rec.l, 4);
    assert_eq!(rec.m_f, Some(BigUint::from(6u32)));
    assert!(complexity(f, 4, 9).is_err());
}

#[test]
fn expansion_count_matches_reduction() {
    let f = truth_table(&andor::formula::parse_formula("(and x1 x2)", 2).unwrap(), 2);
    let minimal: HashSet<AndOrTree> = minimal_trees(f, 2).unwrap().into_iter().collect();
    let hits = brute_enumerate(6, 2)
        .unwrap()
        .filter(|t| truth_table(t, 2) == f && minimal.contains(&reduce_irreducible(t).tree))
        .count();
    assert_eq!(expansion_count(f, 2, 6).unwrap(), BigUint::from(hits));
    assert_eq!(hits, 24);
}

#[test]
fn expansion_count_sandwich() {
    let counts = FunctionCounts::new(2, 9).unwrap();
    let lab = ComplexityLab::new(2, 9).unwrap();
    for f in TruthTable::all(2) {
        let l = lab.complexity(f).unwrap().l;
        if !(3..=5).contains(&l) {
            continue;
        }
        for m in l..=9 {
            let e = expansion_count(f, 2, m).unwrap();
            assert!(counts.trees_computing(m, f) >= e, "f = {f}, m = {m}");
            assert!(e <= expansion_upper_bound(f, 2, m).unwrap());
        }
    }
}

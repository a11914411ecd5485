//! Semantic checks that work for any number of variables.
//!
//! Trees over at most six distinct variables are decided by a one-word truth table.
//! Larger trees go through cheap filters (simple tautology, random 64-lane evaluation)
//! before a Tseitin encoding is handed to a SAT solver.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use varisat::{ExtendFormula, Lit, Solver};

use super::{AndOrTree, Connective, Literal};

const RANDOM_ROUNDS: usize = 4;

fn compact_vars(trees: &[&AndOrTree]) -> BTreeMap<u32, usize> {
    fn collect(t: &AndOrTree, out: &mut BTreeMap<u32, usize>) {
        match t {
            AndOrTree::Leaf(l) => {
                let next = out.len();
                out.entry(l.var).or_insert(next);
            }
            AndOrTree::Node(_, ch) => ch.iter().for_each(|c| collect(c, out)),
        }
    }
    let mut map = BTreeMap::new();
    for t in trees {
        collect(t, &mut map);
    }
    map
}

fn small_table(t: &AndOrTree, vars: &BTreeMap<u32, usize>) -> u64 {
    const MASKS: [u64; 6] = [
        0xAAAA_AAAA_AAAA_AAAA,
        0xCCCC_CCCC_CCCC_CCCC,
        0xF0F0_F0F0_F0F0_F0F0,
        0xFF00_FF00_FF00_FF00,
        0xFFFF_0000_FFFF_0000,
        0xFFFF_FFFF_0000_0000,
    ];
    let full = if vars.len() >= 6 { u64::MAX } else { (1u64 << (1 << vars.len())) - 1 };
    let w = t.eval_words(&|l: Literal| {
        let m = MASKS[vars[&l.var]];
        if l.negated {
            !m
        } else {
            m
        }
    });
    w & full
}

/// Evaluates `t` on 64 random assignments per round and reports whether some lane was false.
fn random_counterexample(t: &AndOrTree, vars: &BTreeMap<u32, usize>) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(0x005e_ed0f_7a07);
    for _ in 0..RANDOM_ROUNDS {
        let words: Vec<u64> = (0..vars.len()).map(|_| rng.gen()).collect();
        let w = t.eval_words(&|l: Literal| {
            let m = words[vars[&l.var]];
            if l.negated {
                !m
            } else {
                m
            }
        });
        if w != u64::MAX {
            return true;
        }
    }
    false
}

fn tseitin(t: &AndOrTree, solver: &mut Solver, vars: &BTreeMap<u32, usize>, var_lits: &[Lit]) -> Lit {
    match t {
        AndOrTree::Leaf(l) => {
            let v = var_lits[vars[&l.var]];
            if l.negated {
                !v
            } else {
                v
            }
        }
        AndOrTree::Node(conn, ch) => {
            let kids: Vec<Lit> = ch.iter().map(|c| tseitin(c, solver, vars, var_lits)).collect();
            let g = solver.new_lit();
            match conn {
                Connective::And => {
                    for &k in &kids {
                        solver.add_clause(&[!g, k]);
                    }
                    let mut big: Vec<Lit> = kids.iter().map(|&k| !k).collect();
                    big.push(g);
                    solver.add_clause(&big);
                }
                Connective::Or => {
                    for &k in &kids {
                        solver.add_clause(&[g, !k]);
                    }
                    let mut big = kids.clone();
                    big.push(!g);
                    solver.add_clause(&big);
                }
            }
            g
        }
    }
}

fn sat_is_valid(t: &AndOrTree, vars: &BTreeMap<u32, usize>) -> bool {
    let mut solver = Solver::new();
    let var_lits: Vec<Lit> = (0..vars.len()).map(|_| solver.new_lit()).collect();
    let root = tseitin(t, &mut solver, vars, &var_lits);
    solver.add_clause(&[!root]);
    !solver.solve().expect("SAT solver failed")
}

/// Whether `t` computes the constant True.
pub fn is_tautology(t: &AndOrTree) -> bool {
    if t.is_simple_tautology() {
        return true;
    }
    let vars = compact_vars(&[t]);
    if vars.len() <= 6 {
        let full = if vars.len() >= 6 { u64::MAX } else { (1u64 << (1 << vars.len())) - 1 };
        return small_table(t, &vars) == full;
    }
    if random_counterexample(t, &vars) {
        return false;
    }
    sat_is_valid(t, &vars)
}

/// Whether `t` computes the constant False.
pub fn is_contradiction(t: &AndOrTree) -> bool {
    is_tautology(&t.dual())
}

/// Whether two trees compute the same function.
pub fn equivalent(a: &AndOrTree, b: &AndOrTree) -> bool {
    let vars = compact_vars(&[a, b]);
    if vars.len() <= 6 {
        return small_table(a, &vars) == small_table(b, &vars);
    }
    // Evaluation and encoding ignore stratification, so the implications can be built directly.
    let implies = |x: &AndOrTree, y: &AndOrTree| AndOrTree::Node(Connective::Or, vec![x.dual(), y.clone()]);
    is_tautology_unchecked(&implies(a, b), &vars) && is_tautology_unchecked(&implies(b, a), &vars)
}

fn is_tautology_unchecked(t: &AndOrTree, vars: &BTreeMap<u32, usize>) -> bool {
    !random_counterexample(t, vars) && sat_is_valid(t, vars)
}

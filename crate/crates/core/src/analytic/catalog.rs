//! Generating functions of the tree families used by the limiting-ratio engine.

use std::collections::BTreeMap;
use std::f64::consts::SQRT_2;

use super::expr::{a, b, binom, factorial, int, product, ratio, sum, t, two_n, z, Bindings, Expr, IntExpr};
use crate::error::{Error, Result};

/// A family's generating function together with its parameters and their admissible ranges.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilyExpr {
    pub name: String,
    pub expr: Expr,
    pub params: BTreeMap<String, i64>,
    /// Each pair `(lhs, rhs)` demands `lhs <= rhs` once `n` is bound.
    pub requires: Vec<(IntExpr, IntExpr)>,
}

fn n() -> IntExpr {
    IntExpr::var("n")
}

fn p(name: &str) -> IntExpr {
    IntExpr::var(name)
}

/// `⌊√n⌋`.
fn s() -> IntExpr {
    n().floor_sqrt()
}

impl FamilyExpr {
    fn new(name: &str, expr: Expr) -> Self {
        FamilyExpr { name: name.to_string(), expr, params: BTreeMap::new(), requires: Vec::new() }
    }

    fn param(mut self, name: &str, v: i64) -> Self {
        self.params.insert(name.to_string(), v);
        self
    }

    fn require(mut self, lhs: impl Into<IntExpr>, rhs: impl Into<IntExpr>) -> Self {
        self.requires.push((lhs.into(), rhs.into()));
        self
    }

    pub fn uses_t(&self) -> bool {
        self.expr.mentions_t()
    }

    /// `n` and every parameter, ready for evaluation.
    pub fn bindings(&self, n: u32) -> Result<Bindings> {
        if n == 0 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        let mut bind = Bindings::new().with("n", n as i64);
        for (k, v) in &self.params {
            bind.push(k, *v);
        }
        for (lhs, rhs) in &self.requires {
            if lhs.eval(&bind)? > rhs.eval(&bind)? {
                return Err(Error::InvalidParameter(format!("{}: need {lhs} <= {rhs} (n = {n}, params {:?})", self.name, self.params)));
            }
        }
        Ok(bind)
    }

    /// Known large-`n` behaviour of the limiting ratio, when one exists.
    pub fn asymptotic_reference(&self, n: u32) -> Option<f64> {
        let nf = n as f64;
        let get = |k: &str| self.params.get(k).copied().unwrap_or(0) as f64;
        match self.name.as_str() {
            "no_first_level_leaf" => Some(1.0 / (nf * (2.0 * nf).sqrt())),
            "labels_from" => Some(get("gamma") * (2.0 / nf).sqrt()),
            "nonleaf_subtrees" => Some(get("l") / 2f64.powf(get("l") + 1.0)),
            "nonleaf_total" => Some(1.0),
            "r_family" => Some((-SQRT_2).exp() / 8.0),
            "first_level_leaves" => Some(2.0 * (2.0 * nf).sqrt()),
            "e_family" => Some(0.36618),
            "e1_family" => Some(0.24457),
            "e2_family" => Some(0.0),
            _ => None,
        }
    }
}

/// Trees whose root has no leaf child.
pub fn no_first_level_leaf() -> FamilyExpr {
    FamilyExpr::new("no_first_level_leaf", int(2) * z() * b().pow(2) / (int(1) - b()))
}

/// Trees with a first-level leaf labelled from a fixed set of `gamma` literals.
pub fn labels_from(gamma: i64) -> FamilyExpr {
    let g = || int(p("gamma"));
    let expr = int(2) * g() * z().pow(2) / ((int(1) - (a() - g() * z())) * (int(1) - a())) - int(2) * g() * z().pow(2);
    FamilyExpr::new("labels_from", expr).param("gamma", gamma).require(1, p("gamma")).require(p("gamma"), n() * 2)
}

/// Trees with exactly `k` distinct, pairwise non-complementary first-level labels.
pub fn exact_k_labels(k: i64) -> FamilyExpr {
    let body = z() / (int(1) - int(p("m")) * z() - b());
    let expr = binom(n(), p("k")) * int(2).pow(p("k")) * factorial(p("k")) * z() * product("m", 0, p("k"), body);
    FamilyExpr::new("exact_k_labels", expr).param("k", k).require(1, p("k")).require(p("k"), n())
}

/// Trees whose root has exactly `l` non-leaf children.
pub fn nonleaf_subtrees(l: i64) -> FamilyExpr {
    let c = || int(1) - two_n() * z();
    let mut expr = int(2) * z() * b().pow(p("l")) / c().pow(p("l") + 1);
    match l {
        0 => expr = expr - int(2) * z() - int(4) * int(n()) * z().pow(2),
        1 => expr = expr - int(2) * z() * b(),
        _ => {}
    }
    FamilyExpr::new("nonleaf_subtrees", expr).param("l", l).require(0, p("l"))
}

/// Sum of `nonleaf_subtrees(l)` over all `l`, in closed form.
pub fn nonleaf_total() -> FamilyExpr {
    let expr = int(2) * z() / (int(1) - two_n() * z() - b()) - int(2) * z() - int(4) * int(n()) * z().pow(2) - int(2) * z() * b();
    FamilyExpr::new("nonleaf_total", expr)
}

/// Trees whose `⌊√n⌋` leftmost root children are leaves, followed by at least one non-leaf child.
pub fn r_family() -> FamilyExpr {
    let c = || int(1) - two_n() * z();
    let expr = z() * (two_n() * z()).pow(s()) / c() * b() / c();
    FamilyExpr::new("r_family", expr)
}

/// Simple x-trees: a literal next to a simple tautology or contradiction.
pub fn simple_x() -> FamilyExpr {
    FamilyExpr::new("simple_x", int(4) * z().pow(2) * t())
}

/// OR-rooted trees with `k` first-level leaves whose other subtrees are all contradictions.
pub fn check_family(k: i64) -> FamilyExpr {
    let expr = binom(n(), p("k")) * int(2).pow(p("k")) * factorial(p("k")) * z().pow(p("k") + 1) / (int(1) - t()).pow(p("k") + 1);
    FamilyExpr::new("check_family", expr).param("k", k).require(1, p("k")).require(p("k"), n())
}

/// Marking first-level leaves: the derivative in the marking variable at 1.
pub fn first_level_leaves() -> FamilyExpr {
    let one_minus_a = || int(1) - a();
    let expr = int(n() * 8) * z().pow(2) * a() / one_minus_a() + int(n() * 4) * z().pow(2) * a().pow(2) / one_minus_a().pow(2);
    FamilyExpr::new("first_level_leaves", expr)
}

/// Trees with exactly `j` first-level leaves.
pub fn first_level_leaf_count(j: i64) -> FamilyExpr {
    let c = || two_n() * z();
    let one_minus_b = || int(1) - b();
    let expr = match j {
        0 => int(2) * z() / one_minus_b() - int(2) * z() - int(2) * z() * b(),
        1 => int(2) * z() * c() / one_minus_b().pow(2) - int(2) * z() * c(),
        _ => int(2) * z() * c().pow(p("j")) / one_minus_b().pow(p("j") + 1),
    };
    FamilyExpr::new("first_level_leaf_count", expr).param("j", j).require(0, p("j"))
}

/// Default number of non-leaf subtrees and width of the first-level-leaf window for the tautology bounds.
pub const E_J_MAX: i64 = 5;
pub const E_K_HI_FACTOR: i64 = 15;

fn j_sum(shift: i64) -> Expr {
    sum("j", 1, p("j_max"), (int(p("k") + shift) * b()).pow(p("j")) / factorial(p("j")))
}

fn e_requirements(f: FamilyExpr, j_max: i64, k_hi_factor: i64) -> FamilyExpr {
    f.param("j_max", j_max).param("k_hi_factor", k_hi_factor).require(4, n()).require(1, p("j_max")).require(1, p("k_hi_factor"))
}

/// Lower estimate for OR-rooted trees with `k` first-level leaves and at most `j_max` non-leaf subtrees.
pub fn e_family(j_max: i64, k_hi_factor: i64) -> FamilyExpr {
    let expr = sum("k", s(), s() * p("k_hi_factor"), z() * (two_n() * z()).pow(p("k")) * j_sum(1));
    e_requirements(FamilyExpr::new("e_family", expr), j_max, k_hi_factor)
}

/// Over-count of the members whose leftmost first-level labels are spread out.
pub fn e1_family(j_max: i64, k_hi_factor: i64) -> FamilyExpr {
    let rest = (two_n() - int(s()) * ratio(1, 2)) * z();
    let expr = sum("k", s(), s() * p("k_hi_factor"), z() * (two_n() * z()).pow(s()) * rest.pow(p("k") - s()) * j_sum(5));
    e_requirements(FamilyExpr::new("e1_family", expr), j_max, k_hi_factor)
}

/// Over-count of the members whose leftmost first-level labels are concentrated.
pub fn e2_family(j_max: i64, k_hi_factor: i64) -> FamilyExpr {
    let h = || s().floor_div(2);
    let expr = sum(
        "k",
        s(),
        s() * p("k_hi_factor"),
        binom(n(), h()) * int(2).pow(h()) * z() * (int(h()) * z()).pow(s()) * (two_n() * z()).pow(p("k") - s()) * j_sum(5),
    );
    e_requirements(FamilyExpr::new("e2_family", expr), j_max, k_hi_factor)
}

/// Names accepted by [`by_name`].
pub const FAMILY_NAMES: &[&str] = &[
    "no_first_level_leaf",
    "labels_from",
    "exact_k_labels",
    "nonleaf_subtrees",
    "nonleaf_total",
    "r_family",
    "simple_x",
    "check_family",
    "first_level_leaves",
    "first_level_leaf_count",
    "e_family",
    "e1_family",
    "e2_family",
];

/// Looks a family up by name; missing parameters take their defaults where one exists.
pub fn by_name(name: &str, params: &BTreeMap<String, i64>) -> Result<FamilyExpr> {
    let need = |k: &str| params.get(k).copied().ok_or_else(|| Error::InvalidParameter(format!("family {name} needs parameter `{k}`")));
    let j_max = params.get("j_max").copied().unwrap_or(E_J_MAX);
    let k_hi = params.get("k_hi_factor").copied().unwrap_or(E_K_HI_FACTOR);
    Ok(match name {
        "no_first_level_leaf" => no_first_level_leaf(),
        "labels_from" => labels_from(need("gamma")?),
        "exact_k_labels" => exact_k_labels(need("k")?),
        "nonleaf_subtrees" => nonleaf_subtrees(need("l")?),
        "nonleaf_total" => nonleaf_total(),
        "r_family" => r_family(),
        "simple_x" => simple_x(),
        "check_family" => check_family(need("k")?),
        "first_level_leaves" => first_level_leaves(),
        "first_level_leaf_count" => first_level_leaf_count(need("j")?),
        "e_family" => e_family(j_max, k_hi),
        "e1_family" => e1_family(j_max, k_hi),
        "e2_family" => e2_family(j_max, k_hi),
        _ => return Err(Error::InvalidParameter(format!("unknown family `{name}`; known: {}", FAMILY_NAMES.join(", ")))),
    })
}

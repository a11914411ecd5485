//! Associative and/or trees: representation, validation and structural measurements.

mod parse;
pub mod semantic;
mod table;

use std::fmt;

use crate::error::{Error, Result};

pub use parse::parse_formula;
pub use table::{truth_table, Assignment, TruthTable, MAX_TABLE_VARS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Connective {
    And,
    Or,
}

impl Connective {
    pub fn dual(self) -> Self {
        match self {
            Connective::And => Connective::Or,
            Connective::Or => Connective::And,
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            Connective::And => "and",
            Connective::Or => "or",
        }
    }
}

/// A variable index (starting at 1) with a polarity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub var: u32,
    pub negated: bool,
}

impl Literal {
    pub fn new(var: u32, negated: bool) -> Self {
        assert!(var >= 1, "variable indices start at 1");
        Literal { var, negated }
    }

    pub fn pos(var: u32) -> Self {
        Self::new(var, false)
    }

    pub fn neg(var: u32) -> Self {
        Self::new(var, true)
    }

    pub fn negate(self) -> Self {
        Literal { var: self.var, negated: !self.negated }
    }

    /// All 2n literals in the order x1, ~x1, x2, ~x2, ...
    pub fn all(n: u32) -> impl Iterator<Item = Literal> {
        (1..=n).flat_map(|v| [Literal::pos(v), Literal::neg(v)])
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "~x{}", self.var)
        } else {
            write!(f, "x{}", self.var)
        }
    }
}

/// A rooted plane tree with literal leaves and stratified AND/OR internal nodes.
///
/// Use [`AndOrTree::node`] to build internal nodes; it enforces arity and stratification.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AndOrTree {
    Leaf(Literal),
    Node(Connective, Vec<AndOrTree>),
}

impl AndOrTree {
    pub fn leaf(lit: Literal) -> Self {
        AndOrTree::Leaf(lit)
    }

    pub fn node(conn: Connective, children: Vec<AndOrTree>) -> Result<Self> {
        if children.len() < 2 {
            return Err(Error::Arity { pos: 0, arity: children.len() });
        }
        if children.iter().any(|c| c.connective() == Some(conn)) {
            return Err(Error::Stratification(conn.keyword().into()));
        }
        Ok(AndOrTree::Node(conn, children))
    }

    pub fn and(children: Vec<AndOrTree>) -> Result<Self> {
        Self::node(Connective::And, children)
    }

    pub fn or(children: Vec<AndOrTree>) -> Result<Self> {
        Self::node(Connective::Or, children)
    }

    pub fn connective(&self) -> Option<Connective> {
        match self {
            AndOrTree::Leaf(_) => None,
            AndOrTree::Node(c, _) => Some(*c),
        }
    }

    pub fn children(&self) -> &[AndOrTree] {
        match self {
            AndOrTree::Leaf(_) => &[],
            AndOrTree::Node(_, ch) => ch,
        }
    }

    pub fn as_literal(&self) -> Option<Literal> {
        match self {
            AndOrTree::Leaf(l) => Some(*l),
            AndOrTree::Node(..) => None,
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, AndOrTree::Leaf(_))
    }

    /// Checks arity and stratification everywhere in the tree.
    pub fn check_structure(&self) -> Result<()> {
        if let AndOrTree::Node(conn, ch) = self {
            if ch.len() < 2 {
                return Err(Error::Arity { pos: 0, arity: ch.len() });
            }
            for c in ch {
                if c.connective() == Some(*conn) {
                    return Err(Error::Stratification(conn.keyword().into()));
                }
                c.check_structure()?;
            }
        }
        Ok(())
    }

    /// Checks every structural invariant plus the variable range 1..=n.
    pub fn validate(&self, n: u32) -> Result<()> {
        self.check_structure()?;
        match self.max_var() {
            Some(v) if v > n => Err(Error::VariableOutOfRange { var: v, n }),
            _ => Ok(()),
        }
    }

    /// Total number of nodes.
    pub fn size(&self) -> usize {
        match self {
            AndOrTree::Leaf(_) => 1,
            AndOrTree::Node(_, ch) => 1 + ch.iter().map(|c| c.size()).sum::<usize>(),
        }
    }

    pub fn internal_count(&self) -> usize {
        match self {
            AndOrTree::Leaf(_) => 0,
            AndOrTree::Node(_, ch) => 1 + ch.iter().map(|c| c.internal_count()).sum::<usize>(),
        }
    }

    /// Number of grafting positions `i_t + |t| - 1`; a single leaf has none.
    pub fn expansion_slots(&self) -> usize {
        match self {
            AndOrTree::Leaf(_) => 0,
            AndOrTree::Node(..) => self.internal_count() + self.size() - 1,
        }
    }

    pub fn max_var(&self) -> Option<u32> {
        match self {
            AndOrTree::Leaf(l) => Some(l.var),
            AndOrTree::Node(_, ch) => ch.iter().filter_map(|c| c.max_var()).max(),
        }
    }

    pub fn first_level_leaves(&self) -> impl Iterator<Item = Literal> + '_ {
        self.children().iter().filter_map(|c| c.as_literal())
    }

    pub fn first_level_leaf_count(&self) -> usize {
        self.first_level_leaves().count()
    }

    fn has_complementary_first_level_pair(&self) -> bool {
        let mut lits: Vec<Literal> = self.first_level_leaves().collect();
        lits.sort();
        lits.windows(2).any(|w| w[0].var == w[1].var && w[0].negated != w[1].negated)
    }

    /// OR-rooted with some variable appearing both plain and negated among depth-1 leaves.
    pub fn is_simple_tautology(&self) -> bool {
        self.connective() == Some(Connective::Or) && self.has_complementary_first_level_pair()
    }

    pub fn is_simple_contradiction(&self) -> bool {
        self.connective() == Some(Connective::And) && self.has_complementary_first_level_pair()
    }

    /// Returns `x` when the root is OR with exactly two children, the leaf `x` and a
    /// contradiction (dually AND with the leaf and a tautology), so that the tree computes `x`.
    pub fn is_simple_x_tree(&self) -> Option<Literal> {
        let conn = self.connective()?;
        let ch = self.children();
        if ch.len() != 2 {
            return None;
        }
        let (lit, other) = match (ch[0].as_literal(), ch[1].as_literal()) {
            (Some(l), None) => (l, &ch[1]),
            (None, Some(l)) => (l, &ch[0]),
            _ => return None,
        };
        let absorbing = match conn {
            Connective::Or => semantic::is_contradiction(other),
            Connective::And => semantic::is_tautology(other),
        };
        absorbing.then_some(lit)
    }

    /// Swaps connectives and negates every literal; the result computes the negated function.
    pub fn dual(&self) -> AndOrTree {
        match self {
            AndOrTree::Leaf(l) => AndOrTree::Leaf(l.negate()),
            AndOrTree::Node(c, ch) => AndOrTree::Node(c.dual(), ch.iter().map(|t| t.dual()).collect()),
        }
    }

    /// Renames variables through `map` (indexed by old variable, starting at 1).
    pub fn relabel(&self, map: &dyn Fn(Literal) -> Literal) -> AndOrTree {
        match self {
            AndOrTree::Leaf(l) => AndOrTree::Leaf(map(*l)),
            AndOrTree::Node(c, ch) => AndOrTree::Node(*c, ch.iter().map(|t| t.relabel(map)).collect()),
        }
    }

    pub fn subtree(&self, path: &[usize]) -> Option<&AndOrTree> {
        let mut cur = self;
        for &i in path {
            cur = cur.children().get(i)?;
        }
        Some(cur)
    }

    pub(crate) fn subtree_mut(&mut self, path: &[usize]) -> Option<&mut AndOrTree> {
        let mut cur = self;
        for &i in path {
            cur = match cur {
                AndOrTree::Node(_, ch) => ch.get_mut(i)?,
                AndOrTree::Leaf(_) => return None,
            };
        }
        Some(cur)
    }

    /// Paths of internal nodes in pre-order.
    pub fn internal_paths(&self) -> Vec<Vec<usize>> {
        fn walk(t: &AndOrTree, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if let AndOrTree::Node(_, ch) = t {
                out.push(path.clone());
                for (i, c) in ch.iter().enumerate() {
                    path.push(i);
                    walk(c, path, out);
                    path.pop();
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn serialize(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for AndOrTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AndOrTree::Leaf(l) => write!(f, "{l}"),
            AndOrTree::Node(c, ch) => {
                write!(f, "({}", c.keyword())?;
                for child in ch {
                    write!(f, " {child}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> AndOrTree {
        parse_formula(s, 4).unwrap()
    }

    #[test]
    fn measurements() {
        let leaf = p("x1");
        assert_eq!((leaf.size(), leaf.internal_count(), leaf.expansion_slots()), (1, 0, 0));
        let t = p("(or x1 x2)");
        assert_eq!((t.size(), t.internal_count(), t.expansion_slots()), (3, 1, 3));
        let t = p("(and (or x1 ~x2) x3 (or x2 (and x1 x4)))");
        assert_eq!(t.size(), 10);
        assert_eq!(t.internal_count(), 4);
        assert_eq!(t.expansion_slots(), 13);
    }

    #[test]
    fn simple_tautologies() {
        assert!(p("(or x1 ~x1 x2)").is_simple_tautology());
        assert!(!p("(or x1 (and ~x1 x2))").is_simple_tautology());
        let t = p("(and x1 ~x1)");
        assert!(t.is_simple_contradiction());
        assert!(!t.is_simple_tautology());
    }

    #[test]
    fn simple_x_trees() {
        assert_eq!(p("(or x1 (and x2 ~x2))").is_simple_x_tree(), Some(Literal::pos(1)));
        assert_eq!(p("(or x1 x2 (and x3 ~x3))").is_simple_x_tree(), None);
        assert_eq!(p("(and ~x2 (or x1 ~x1))").is_simple_x_tree(), Some(Literal::neg(2)));
        assert_eq!(p("(or x1 (and x2 (or x3 ~x3)))").is_simple_x_tree(), None);
        assert_eq!(p("(or x3 (and (or x2 ~x2) (or x1 x4) ~x1 (or x4 ~x4)))").is_simple_x_tree(), None);
        assert_eq!(p("(or x3 (and (or x2 ~x2) x1 ~x1))").is_simple_x_tree(), Some(Literal::pos(3)));
        assert_eq!(p("(and ~x2 (or x1 ~x1))").dual().is_simple_x_tree(), Some(Literal::pos(2)));
    }

    #[test]
    fn dual_flips_function() {
        let t = p("(or x1 (and x2 ~x1) x3)");
        let f = truth_table(&t, 3);
        assert_eq!(truth_table(&t.dual(), 3), f.not());
    }

    #[test]
    fn node_constructor_enforces_invariants() {
        let x1 = AndOrTree::leaf(Literal::pos(1));
        assert!(matches!(AndOrTree::and(vec![x1.clone()]), Err(Error::Arity { .. })));
        let inner = AndOrTree::or(vec![x1.clone(), x1.clone()]).unwrap();
        assert!(matches!(AndOrTree::or(vec![x1, inner]), Err(Error::Stratification(_))));
    }
}

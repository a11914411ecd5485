use std::fmt;

use super::{AndOrTree, Literal};
use crate::error::{Error, Result};

/// Largest variable count a [`TruthTable`] can hold (2^6 bits in one word).
pub const MAX_TABLE_VARS: u32 = 6;

const VAR_MASKS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

/// A Boolean function of `n` variables; bit `k` is the value at the assignment whose
/// variable `j` equals bit `j - 1` of `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TruthTable {
    n: u32,
    bits: u64,
}

impl TruthTable {
    pub fn new(n: u32, bits: u64) -> Result<Self> {
        if n > MAX_TABLE_VARS {
            return Err(Error::Budget(format!("truth tables hold at most {MAX_TABLE_VARS} variables")));
        }
        if bits & !Self::full_mask(n) != 0 {
            return Err(Error::InvalidParameter(format!("bits {bits:#x} exceed 2^{n} positions")));
        }
        Ok(TruthTable { n, bits })
    }

    pub(crate) fn from_bits(n: u32, bits: u64) -> Self {
        debug_assert!(n <= MAX_TABLE_VARS && bits & !Self::full_mask(n) == 0);
        TruthTable { n, bits }
    }

    pub fn full_mask(n: u32) -> u64 {
        if n >= 6 {
            u64::MAX
        } else {
            (1u64 << (1u32 << n)) - 1
        }
    }

    pub fn constant(n: u32, value: bool) -> Self {
        Self::from_bits(n, if value { Self::full_mask(n) } else { 0 })
    }

    pub fn literal(n: u32, lit: Literal) -> Self {
        assert!(lit.var >= 1 && lit.var <= n, "literal {lit} outside 1..={n}");
        let m = VAR_MASKS[(lit.var - 1) as usize] & Self::full_mask(n);
        Self::from_bits(n, if lit.negated { !m & Self::full_mask(n) } else { m })
    }

    /// Every function of `n` variables, in increasing bit order.
    pub fn all(n: u32) -> impl Iterator<Item = TruthTable> {
        assert!(n <= 4, "enumerating all functions is limited to n <= 4");
        (0..=Self::full_mask(n)).map(move |b| Self::from_bits(n, b))
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn num_assignments(&self) -> usize {
        1 << self.n
    }

    pub fn get(&self, k: usize) -> bool {
        (self.bits >> k) & 1 == 1
    }

    pub fn is_true(&self) -> bool {
        self.bits == Self::full_mask(self.n)
    }

    pub fn is_false(&self) -> bool {
        self.bits == 0
    }

    pub fn is_constant(&self) -> bool {
        self.is_true() || self.is_false()
    }

    pub fn as_literal(&self) -> Option<Literal> {
        Literal::all(self.n).find(|&l| Self::literal(self.n, l) == *self)
    }

    pub fn not(&self) -> Self {
        Self::from_bits(self.n, !self.bits & Self::full_mask(self.n))
    }

    pub fn and(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Self::from_bits(self.n, self.bits & other.bits)
    }

    pub fn or(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Self::from_bits(self.n, self.bits | other.bits)
    }

    /// Pointwise `self >= other`.
    pub fn dominates(&self, other: &Self) -> bool {
        other.bits & !self.bits == 0
    }

    /// The function `x -> self(perm(x))` where variable `j` is renamed to `perm[j - 1]`.
    pub fn permute_vars(&self, perm: &[u32]) -> Self {
        assert_eq!(perm.len(), self.n as usize);
        let mut out = 0u64;
        for k in 0..self.num_assignments() {
            let mut src = 0usize;
            for (j, &p) in perm.iter().enumerate() {
                if (k >> (p - 1)) & 1 == 1 {
                    src |= 1 << j;
                }
            }
            if self.get(src) {
                out |= 1 << k;
            }
        }
        Self::from_bits(self.n, out)
    }

    /// Lowercase hex, most significant digit first; `2^n / 4` digits (at least one).
    pub fn to_hex(&self) -> String {
        let width = ((1usize << self.n) / 4).max(1);
        format!("{:0width$x}", self.bits, width = width)
    }

    pub fn from_hex(n: u32, s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches("0x");
        let bits = u64::from_str_radix(s, 16)
            .map_err(|_| Error::InvalidParameter(format!("`{s}` is not a hex truth table")))?;
        Self::new(n, bits)
    }
}

impl fmt::Display for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

/// One value per variable; `values[j - 1]` is the value of `x_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment {
    pub values: Vec<bool>,
}

impl Assignment {
    pub fn from_index(n: u32, k: usize) -> Self {
        Assignment { values: (0..n).map(|j| (k >> j) & 1 == 1).collect() }
    }

    pub fn index(&self) -> usize {
        self.values.iter().enumerate().map(|(j, &v)| (v as usize) << j).sum()
    }

    pub fn literal(&self, lit: Literal) -> bool {
        self.values[(lit.var - 1) as usize] != lit.negated
    }
}

impl AndOrTree {
    pub fn eval(&self, a: &Assignment) -> bool {
        match self {
            AndOrTree::Leaf(l) => a.literal(*l),
            AndOrTree::Node(super::Connective::And, ch) => ch.iter().all(|c| c.eval(a)),
            AndOrTree::Node(super::Connective::Or, ch) => ch.iter().any(|c| c.eval(a)),
        }
    }

    /// Bit-parallel evaluation with caller-provided literal words.
    pub(crate) fn eval_words(&self, lit_word: &dyn Fn(Literal) -> u64) -> u64 {
        match self {
            AndOrTree::Leaf(l) => lit_word(*l),
            AndOrTree::Node(super::Connective::And, ch) => ch.iter().fold(!0, |acc, c| acc & c.eval_words(lit_word)),
            AndOrTree::Node(super::Connective::Or, ch) => ch.iter().fold(0, |acc, c| acc | c.eval_words(lit_word)),
        }
    }
}

/// Truth table of `tree` over variables `1..=n`.
///
/// Panics if the tree mentions a variable above `n` or `n` exceeds [`MAX_TABLE_VARS`].
pub fn truth_table(tree: &AndOrTree, n: u32) -> TruthTable {
    assert!(n <= MAX_TABLE_VARS, "truth tables hold at most {MAX_TABLE_VARS} variables");
    let full = TruthTable::full_mask(n);
    let bits = tree.eval_words(&|l| {
        assert!(l.var <= n, "variable x{} outside 1..={n}", l.var);
        let m = VAR_MASKS[(l.var - 1) as usize];
        if l.negated {
            !m
        } else {
            m
        }
    });
    TruthTable::from_bits(n, bits & full)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;

    #[test]
    fn constants_and_literals() {
        let t = parse_formula("(or x1 ~x1)", 1).unwrap();
        assert!(truth_table(&t, 1).is_true());
        let t = parse_formula("(and x1 ~x1)", 1).unwrap();
        assert!(truth_table(&t, 1).is_false());
        assert_eq!(TruthTable::literal(2, Literal::pos(1)).bits(), 0b1010);
        assert_eq!(TruthTable::literal(2, Literal::neg(2)).bits(), 0b0011);
    }

    #[test]
    fn eleven_node_tautology() {
        let t = parse_formula("(or (and x1 x2) (and ~x1 x2) ~x2 (and x1 ~x3))", 3).unwrap();
        assert_eq!(t.size(), 11);
        assert!(truth_table(&t, 3).is_true());
    }

    #[test]
    fn hex_encoding() {
        assert_eq!(TruthTable::literal(1, Literal::pos(1)).to_hex(), "2");
        assert_eq!(TruthTable::constant(2, true).to_hex(), "f");
        let x1x2 = TruthTable::literal(3, Literal::pos(1)).and(&TruthTable::literal(3, Literal::pos(2)));
        assert_eq!(x1x2.to_hex(), "88");
        assert_eq!(TruthTable::from_hex(3, "88").unwrap(), x1x2);
        assert_eq!(TruthTable::constant(4, true).to_hex(), "ffff");
        assert!(TruthTable::from_hex(2, "1f").is_err());
    }

    #[test]
    fn assignment_round_trip_and_eval() {
        let t = parse_formula("(or (and x1 ~x2) (and ~x1 x2))", 2).unwrap();
        let tt = truth_table(&t, 2);
        for k in 0..4 {
            let a = Assignment::from_index(2, k);
            assert_eq!(a.index(), k);
            assert_eq!(t.eval(&a), tt.get(k));
        }
        assert_eq!(tt.bits(), 0b0110);
    }

    #[test]
    fn permutation_and_dominance() {
        let x1 = TruthTable::literal(3, Literal::pos(1));
        let x3 = TruthTable::literal(3, Literal::pos(3));
        assert_eq!(x1.permute_vars(&[3, 2, 1]), x3);
        assert!(TruthTable::constant(3, true).dominates(&x1));
        assert!(x1.dominates(&x1.and(&x3)));
        assert!(!x1.dominates(&x3));
        assert_eq!(x1.not().as_literal(), Some(Literal::neg(1)));
    }
}

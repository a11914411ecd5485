use super::{AndOrTree, Connective, Literal};
use crate::error::{Error, Result};

/// Parses the prefix text form `(and ...)`, `(or ...)`, `xK`, `~xK` and validates it over `n` variables.
pub fn parse_formula(text: &str, n: u32) -> Result<AndOrTree> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, n };
    let tree = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("trailing input"));
    }
    Ok(tree)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    n: u32,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Syntax { pos: self.pos, msg: msg.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn word(&mut self) -> &[u8] {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == b'~' {
                self.pos += 1;
            } else {
                break;
            }
        }
        &self.src[start..self.pos]
    }

    fn expr(&mut self) -> Result<AndOrTree> {
        self.skip_ws();
        match self.peek() {
            None => Err(self.err("unexpected end of input")),
            Some(b'(') => self.node(),
            Some(_) => self.literal().map(AndOrTree::Leaf),
        }
    }

    fn literal(&mut self) -> Result<Literal> {
        let start = self.pos;
        let w = self.word();
        let (negated, rest) = match w.strip_prefix(b"~") {
            Some(r) => (true, r),
            None => (false, w),
        };
        let digits = rest.strip_prefix(b"x").filter(|d| !d.is_empty() && d.iter().all(u8::is_ascii_digit));
        let Some(digits) = digits else {
            return Err(Error::Syntax { pos: start, msg: "expected a literal like x3 or ~x3".into() });
        };
        let var: u32 = std::str::from_utf8(digits)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Syntax { pos: start, msg: "variable index too large".into() })?;
        if var == 0 || var > self.n {
            return Err(Error::VariableOutOfRange { var, n: self.n });
        }
        Ok(Literal { var, negated })
    }

    fn node(&mut self) -> Result<AndOrTree> {
        let open = self.pos;
        self.pos += 1;
        self.skip_ws();
        let kw_pos = self.pos;
        let conn = match self.word() {
            b"and" => Connective::And,
            b"or" => Connective::Or,
            _ => return Err(Error::Syntax { pos: kw_pos, msg: "expected `and` or `or`".into() }),
        };
        let mut children = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b')') => {
                    self.pos += 1;
                    break;
                }
                None => return Err(self.err("unclosed parenthesis")),
                _ => children.push(self.expr()?),
            }
        }
        if children.len() < 2 {
            return Err(Error::Arity { pos: open, arity: children.len() });
        }
        if children.iter().any(|c| c.connective() == Some(conn)) {
            return Err(Error::Stratification(conn.keyword().into()));
        }
        Ok(AndOrTree::Node(conn, children))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_leaf_tree() {
        let t = parse_formula("(or x1 ~x1)", 1).unwrap();
        assert_eq!(
            t,
            AndOrTree::Node(Connective::Or, vec![AndOrTree::Leaf(Literal::pos(1)), AndOrTree::Leaf(Literal::neg(1))])
        );
    }

    #[test]
    fn rejects_invalid_trees() {
        assert!(matches!(parse_formula("(and x1)", 1), Err(Error::Arity { arity: 1, .. })));
        assert!(matches!(parse_formula("(or x1 (or x2 x3))", 3), Err(Error::Stratification(_))));
        assert!(matches!(parse_formula("(or x1 x4)", 3), Err(Error::VariableOutOfRange { var: 4, n: 3 })));
        assert!(matches!(parse_formula("(or x1 x0)", 3), Err(Error::VariableOutOfRange { var: 0, .. })));
        assert!(matches!(parse_formula("(xor x1 x2)", 2), Err(Error::Syntax { pos: 1, .. })));
        assert!(matches!(parse_formula("(or x1 x2", 2), Err(Error::Syntax { .. })));
        assert!(matches!(parse_formula("(or x1 x2) x1", 2), Err(Error::Syntax { pos: 11, .. })));
        assert!(matches!(parse_formula("(or y1 x2)", 2), Err(Error::Syntax { pos: 4, .. })));
    }

    #[test]
    fn whitespace_insensitive() {
        let a = parse_formula("(or x1 (and x2 ~x1))", 2).unwrap();
        let b = parse_formula("  ( or\n x1\t(and x2   ~x1 ) )  ", 2).unwrap();
        assert_eq!(a, b);
        assert_eq!(b.serialize(), "(or x1 (and x2 ~x1))");
    }

    #[test]
    fn leaf_serialization() {
        assert_eq!(AndOrTree::Leaf(Literal::pos(1)).serialize(), "x1");
        assert_eq!(parse_formula("~x12", 12).unwrap().serialize(), "~x12");
    }
}

//! Monotone boolean policy formulas and their text grammar.
//!
//! ```text
//! expr   := term | expr "OR" term
//! term   := factor | term "AND" factor
//! factor := ATTR | "(" expr ")"
//! ```
//!
//! Keywords are case-insensitive, AND binds tighter than OR, and chains are
//! folded to the left, so `A AND B AND C` is `AND(AND(A, B), C)`.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PolicyNode {
    And(Box<PolicyNode>, Box<PolicyNode>),
    Or(Box<PolicyNode>, Box<PolicyNode>),
    Leaf(String),
}

impl PolicyNode {
    pub fn and(left: PolicyNode, right: PolicyNode) -> Self {
        PolicyNode::And(Box::new(left), Box::new(right))
    }

    pub fn or(left: PolicyNode, right: PolicyNode) -> Self {
        PolicyNode::Or(Box::new(left), Box::new(right))
    }

    pub fn leaf(attribute: impl Into<String>) -> Self {
        PolicyNode::Leaf(attribute.into())
    }

    pub fn evaluate(&self, holds: &dyn Fn(&str) -> bool) -> bool {
        match self {
            PolicyNode::And(l, r) => l.evaluate(holds) && r.evaluate(holds),
            PolicyNode::Or(l, r) => l.evaluate(holds) || r.evaluate(holds),
            PolicyNode::Leaf(a) => holds(a),
        }
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            PolicyNode::And(l, r) | PolicyNode::Or(l, r) => {
                l.collect_leaves(out);
                r.collect_leaves(out);
            }
            PolicyNode::Leaf(a) => out.push(a),
        }
    }

    /// Operands of the top-level AND chain (the node itself if it is not an
    /// AND).
    pub fn conjuncts(&self) -> Vec<&PolicyNode> {
        match self {
            PolicyNode::And(l, r) => {
                let mut out = l.conjuncts();
                out.extend(r.conjuncts());
                out
            }
            other => vec![other],
        }
    }
}

impl fmt::Display for PolicyNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolicyNode::And(l, r) => write!(f, "({l} AND {r})"),
            PolicyNode::Or(l, r) => write!(f, "({l} OR {r})"),
            PolicyNode::Leaf(a) => f.write_str(a),
        }
    }
}

/// A parsed policy: a binary, monotone, non-empty access tree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PolicyFormula {
    pub root: PolicyNode,
}

impl PolicyFormula {
    pub fn new(root: PolicyNode) -> Self {
        PolicyFormula { root }
    }

    /// Leaf attributes in left-to-right order, duplicates included.
    pub fn leaves(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.root.collect_leaves(&mut out);
        out
    }

    pub fn evaluate(&self, holds: &dyn Fn(&str) -> bool) -> bool {
        self.root.evaluate(holds)
    }

    pub fn is_satisfied_by(&self, owned: &HashSet<String>) -> bool {
        self.evaluate(&|a| owned.contains(a))
    }
}

impl fmt::Display for PolicyFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.root, f)
    }
}

impl std::str::FromStr for PolicyFormula {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_policy(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token<'a> {
    Open,
    Close,
    And,
    Or,
    Attr(&'a str),
}

fn is_attr_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '-' | ':' | '@' | '/')
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token<'_>)>> {
    let mut tokens = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(offset, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c == '(' {
            chars.next();
            tokens.push((offset, Token::Open));
        } else if c == ')' {
            chars.next();
            tokens.push((offset, Token::Close));
        } else if is_attr_char(c) {
            let mut end = offset;
            while let Some(&(i, c)) = chars.peek() {
                if !is_attr_char(c) {
                    break;
                }
                end = i + c.len_utf8();
                chars.next();
            }
            let word = &text[offset..end];
            let token = if word.eq_ignore_ascii_case("and") {
                Token::And
            } else if word.eq_ignore_ascii_case("or") {
                Token::Or
            } else {
                Token::Attr(word)
            };
            tokens.push((offset, token));
        } else {
            return Err(Error::PolicySyntax {
                offset,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(tokens)
}

struct Parser<'a> {
    tokens: Vec<(usize, Token<'a>)>,
    pos: usize,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token<'a>> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::PolicySyntax {
            offset: self.offset(),
            message: message.into(),
        })
    }

    fn expr(&mut self) -> Result<PolicyNode> {
        let mut node = self.term()?;
        while self.peek() == Some(&Token::Or) {
            self.pos += 1;
            node = PolicyNode::or(node, self.term()?);
        }
        Ok(node)
    }

    fn term(&mut self) -> Result<PolicyNode> {
        let mut node = self.factor()?;
        while self.peek() == Some(&Token::And) {
            self.pos += 1;
            node = PolicyNode::and(node, self.factor()?);
        }
        Ok(node)
    }

    fn factor(&mut self) -> Result<PolicyNode> {
        match self.peek().cloned() {
            Some(Token::Attr(a)) => {
                self.pos += 1;
                Ok(PolicyNode::leaf(a))
            }
            Some(Token::Open) => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(&Token::Close) {
                    return self.error("expected `)`");
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(Token::Close) => self.error("unexpected `)`"),
            Some(Token::And) | Some(Token::Or) => self.error("expected attribute or `(`, found operator"),
            None => self.error("unexpected end of input"),
        }
    }
}

/// Parses policy text into a binary access tree. Attribute labels are kept
/// verbatim.
pub fn parse_policy(text: &str) -> Result<PolicyFormula> {
    let tokens = tokenize(text)?;
    if tokens.is_empty() {
        return Err(Error::EmptyPolicy);
    }
    let mut parser = Parser {
        tokens,
        pos: 0,
        end: text.len(),
    };
    let root = parser.expr()?;
    if parser.pos != parser.tokens.len() {
        return parser.error("unexpected trailing input");
    }
    Ok(PolicyFormula::new(root))
}

#[cfg(test)]
mod tests {
    use super::*;
    use PolicyNode as N;

    #[test]
    fn parses_worked_example() {
        let f = parse_policy("W AND (X OR (Y AND Z))").unwrap();
        assert_eq!(
            f.root,
            N::and(
                N::leaf("W"),
                N::or(N::leaf("X"), N::and(N::leaf("Y"), N::leaf("Z")))
            )
        );
        assert_eq!(f.leaves(), vec!["W", "X", "Y", "Z"]);
    }

    #[test]
    fn single_attribute() {
        assert_eq!(parse_policy("W").unwrap().root, N::leaf("W"));
    }

    #[test]
    fn chains_fold_left() {
        assert_eq!(
            parse_policy("A AND B AND C").unwrap().root,
            N::and(N::and(N::leaf("A"), N::leaf("B")), N::leaf("C"))
        );
        assert_eq!(
            parse_policy("A or B OR C").unwrap().root,
            N::or(N::or(N::leaf("A"), N::leaf("B")), N::leaf("C"))
        );
    }

    #[test]
    fn and_binds_tighter_than_or() {
        assert_eq!(
            parse_policy("A OR B and C").unwrap().root,
            N::or(N::leaf("A"), N::and(N::leaf("B"), N::leaf("C")))
        );
    }

    #[test]
    fn dotted_labels_kept_verbatim() {
        let f = parse_policy("vendorA.s AND (dno1.region-north OR vendorA.plan9)").unwrap();
        assert_eq!(f.leaves(), vec!["vendorA.s", "dno1.region-north", "vendorA.plan9"]);
    }

    #[test]
    fn errors_carry_offsets() {
        assert_eq!(parse_policy("   "), Err(Error::EmptyPolicy));
        assert_eq!(parse_policy(""), Err(Error::EmptyPolicy));
        let offset = |text| match parse_policy(text) {
            Err(Error::PolicySyntax { offset, .. }) => offset,
            other => panic!("expected syntax error for {text:?}, got {other:?}"),
        };
        assert_eq!(offset("A AND"), 5);
        assert_eq!(offset("A AND (B OR C"), 13);
        assert_eq!(offset("A B"), 2);
        assert_eq!(offset("(A))"), 3);
        assert_eq!(offset("A & B"), 2);
        assert_eq!(offset("AND A"), 0);
    }

    #[test]
    fn display_reparses_to_same_tree() {
        let f = parse_policy("a AND (b OR c AND d) OR e").unwrap();
        assert_eq!(parse_policy(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn conjuncts_flatten_top_level_and() {
        let f = parse_policy("s AND A AND (B OR C)").unwrap();
        let c: Vec<String> = f.root.conjuncts().iter().map(|n| n.to_string()).collect();
        assert_eq!(c, vec!["s", "A", "(B OR C)"]);
    }
}

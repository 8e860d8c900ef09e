//! Lexer and recursive-descent parser for the formula and rule grammar.
//!
//! ```text
//! formula := impl
//! impl    := or ("->" impl)?
//! or      := and ("|" and)*
//! and     := since ("&" since)*
//! since   := unary ("S" unary)*            (left-associative)
//! unary   := "~" unary | "N" unary | "[]" unary | "<>" unary
//!          | "K1" unary | "K2" unary | "K[" formula "]" unary
//!          | atom | "true" | "false" | "(" formula ")"
//! atom    := [a-z][a-z0-9_]*
//! rule    := formula ("," formula)* "/" formula
//! ```

use super::{Formula, Rule};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Atom(String),
    True,
    False,
    Tilde,
    Amp,
    Pipe,
    Arrow,
    NextOp,
    SinceOp,
    BoxOp,
    DiamondOp,
    K1Op,
    K2Op,
    KParOpen,
    RBracket,
    LParen,
    RParen,
    Comma,
    Slash,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Atom(a) => format!("atom `{a}`"),
            Tok::True => "`true`".into(),
            Tok::False => "`false`".into(),
            Tok::Tilde => "`~`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::NextOp => "`N`".into(),
            Tok::SinceOp => "`S`".into(),
            Tok::BoxOp => "`[]`".into(),
            Tok::DiamondOp => "`<>`".into(),
            Tok::K1Op => "`K1`".into(),
            Tok::K2Op => "`K2`".into(),
            Tok::KParOpen => "`K[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Slash => "`/`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Lexer<'a> {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn bump(&mut self) -> u8 {
        let c = self.src[self.pos];
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        c
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn tokens(mut self) -> Result<Vec<Spanned>> {
        let mut out = Vec::new();
        loop {
            while matches!(self.peek(), Some(c) if c.is_ascii_whitespace()) {
                self.bump();
            }
            let (line, col) = (self.line, self.col);
            let Some(c) = self.peek() else {
                out.push(Spanned {
                    tok: Tok::End,
                    line,
                    col,
                });
                return Ok(out);
            };
            let tok = match c {
                b'~' => {
                    self.bump();
                    Tok::Tilde
                }
                b'&' => {
                    self.bump();
                    Tok::Amp
                }
                b'|' => {
                    self.bump();
                    Tok::Pipe
                }
                b'(' => {
                    self.bump();
                    Tok::LParen
                }
                b')' => {
                    self.bump();
                    Tok::RParen
                }
                b',' => {
                    self.bump();
                    Tok::Comma
                }
                b'/' => {
                    self.bump();
                    Tok::Slash
                }
                b']' => {
                    self.bump();
                    Tok::RBracket
                }
                b'-' => {
                    self.bump();
                    if self.peek() == Some(b'>') {
                        self.bump();
                        Tok::Arrow
                    } else {
                        return Err(Error::Syntax {
                            line,
                            col,
                            expected: vec!["`->`".into()],
                            found: "`-`".into(),
                        });
                    }
                }
                b'[' => {
                    self.bump();
                    if self.peek() == Some(b']') {
                        self.bump();
                        Tok::BoxOp
                    } else {
                        return Err(Error::Syntax {
                            line,
                            col,
                            expected: vec!["`[]`".into()],
                            found: "`[`".into(),
                        });
                    }
                }
                b'<' => {
                    self.bump();
                    if self.peek() == Some(b'>') {
                        self.bump();
                        Tok::DiamondOp
                    } else {
                        return Err(Error::Syntax {
                            line,
                            col,
                            expected: vec!["`<>`".into()],
                            found: "`<`".into(),
                        });
                    }
                }
                c if c.is_ascii_lowercase() => {
                    let start = self.pos;
                    while matches!(self.peek(),
                        Some(c) if c.is_ascii_lowercase() || c.is_ascii_digit() || c == b'_')
                    {
                        self.bump();
                    }
                    let word = std::str::from_utf8(&self.src[start..self.pos])
                        .expect("lexer only consumes ascii")
                        .to_string();
                    match word.as_str() {
                        "true" => Tok::True,
                        "false" => Tok::False,
                        _ => Tok::Atom(word),
                    }
                }
                c if c.is_ascii_uppercase() => {
                    let start = self.pos;
                    self.bump();
                    if c == b'K' && self.peek() == Some(b'[') {
                        self.bump();
                        Tok::KParOpen
                    } else {
                        while matches!(self.peek(),
                            Some(c) if c.is_ascii_uppercase() || c.is_ascii_digit())
                        {
                            self.bump();
                        }
                        let word = std::str::from_utf8(&self.src[start..self.pos])
                            .expect("lexer only consumes ascii")
                            .to_string();
                        match word.as_str() {
                            "N" => Tok::NextOp,
                            "S" => Tok::SinceOp,
                            "K1" => Tok::K1Op,
                            "K2" => Tok::K2Op,
                            _ => {
                                return Err(Error::UnknownOperator {
                                    line,
                                    col,
                                    text: word,
                                })
                            }
                        }
                    }
                }
                other => {
                    return Err(Error::Syntax {
                        line,
                        col,
                        expected: vec!["a formula token".into()],
                        found: format!("`{}`", other as char),
                    })
                }
            };
            out.push(Spanned { tok, line, col });
        }
    }
}

struct Parser {
    toks: Vec<Spanned>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].tok
    }

    fn advance(&mut self) -> Tok {
        let t = self.toks[self.at].tok.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> Error {
        let s = &self.toks[self.at];
        Error::Syntax {
            line: s.line,
            col: s.col,
            expected: expected.iter().map(|e| e.to_string()).collect(),
            found: s.tok.describe(),
        }
    }

    fn expect(&mut self, want: Tok, name: &str) -> Result<()> {
        if *self.peek() == want {
            self.advance();
            Ok(())
        } else {
            Err(self.error(&[name]))
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        self.impl_()
    }

    fn impl_(&mut self) -> Result<Formula> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Arrow {
            self.advance();
            let rhs = self.impl_()?;
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn or(&mut self) -> Result<Formula> {
        let mut acc = self.and()?;
        while *self.peek() == Tok::Pipe {
            self.advance();
            acc = Formula::or(acc, self.and()?);
        }
        Ok(acc)
    }

    fn and(&mut self) -> Result<Formula> {
        let mut acc = self.since()?;
        while *self.peek() == Tok::Amp {
            self.advance();
            acc = Formula::and(acc, self.since()?);
        }
        Ok(acc)
    }

    fn since(&mut self) -> Result<Formula> {
        let mut acc = self.unary()?;
        while *self.peek() == Tok::SinceOp {
            self.advance();
            acc = Formula::since(acc, self.unary()?);
        }
        Ok(acc)
    }

    const UNARY_EXPECTED: &'static [&'static str] = &[
        "an atom",
        "`true`",
        "`false`",
        "`(`",
        "a prefix operator (`~`, `N`, `[]`, `<>`, `K1`, `K2`, `K[`)",
    ];

    fn unary(&mut self) -> Result<Formula> {
        match self.peek().clone() {
            Tok::Tilde => {
                self.advance();
                Ok(Formula::not(self.unary()?))
            }
            Tok::NextOp => {
                self.advance();
                Ok(Formula::next(self.unary()?))
            }
            Tok::BoxOp => {
                self.advance();
                Ok(Formula::box_(self.unary()?))
            }
            Tok::DiamondOp => {
                self.advance();
                Ok(Formula::diamond(self.unary()?))
            }
            Tok::K1Op => {
                self.advance();
                Ok(Formula::K1(Box::new(self.unary()?)))
            }
            Tok::K2Op => {
                self.advance();
                Ok(Formula::K2(Box::new(self.unary()?)))
            }
            Tok::KParOpen => {
                self.advance();
                let trigger = self.formula()?;
                self.expect(Tok::RBracket, "`]`")?;
                let body = self.unary()?;
                Ok(Formula::KPar {
                    trigger: Box::new(trigger),
                    body: Box::new(body),
                })
            }
            Tok::Atom(name) => {
                self.advance();
                Ok(Formula::Atom(name))
            }
            Tok::True => {
                self.advance();
                Ok(Formula::Top)
            }
            Tok::False => {
                self.advance();
                Ok(Formula::Bottom)
            }
            Tok::LParen => {
                self.advance();
                let inner = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            _ => Err(self.error(Self::UNARY_EXPECTED)),
        }
    }
}

/// Parses a single formula; trailing input is an error.
pub fn parse_formula(text: &str) -> Result<Formula> {
    let mut p = Parser {
        toks: Lexer::new(text).tokens()?,
        at: 0,
    };
    let f = p.formula()?;
    if *p.peek() != Tok::End {
        return Err(p.error(&["end of input"]));
    }
    Ok(f)
}

/// Parses `premise, ..., premise / conclusion`.
pub fn parse_rule(text: &str) -> Result<Rule> {
    let mut p = Parser {
        toks: Lexer::new(text).tokens()?,
        at: 0,
    };
    if *p.peek() == Tok::Slash {
        return Err(Error::EmptyPremises);
    }
    let mut premises = vec![p.formula()?];
    loop {
        match p.advance() {
            Tok::Comma => premises.push(p.formula()?),
            Tok::Slash => break,
            _ => {
                p.at = p.at.saturating_sub(1);
                return Err(p.error(&["`,`", "`/`"]));
            }
        }
    }
    let conclusion = p.formula()?;
    if *p.peek() != Tok::End {
        return Err(p.error(&["end of input"]));
    }
    Ok(Rule::new(premises, conclusion))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn f(text: &str) -> Formula {
        parse_formula(text).unwrap()
    }

    #[test]
    fn single_atom() {
        assert_eq!(f("p"), Formula::atom("p"));
    }

    #[test]
    fn since_of_atoms() {
        assert_eq!(f("q S p"), Formula::since(Formula::atom("q"), Formula::atom("p")));
    }

    #[test]
    fn next_implication() {
        assert_eq!(
            f("N x1 -> N x2"),
            Formula::implies(
                Formula::next(Formula::atom("x1")),
                Formula::next(Formula::atom("x2"))
            )
        );
    }

    #[test]
    fn precedence_layers() {
        // -> weakest, then |, then &, then S, prefix strongest.
        assert_eq!(f("a & b | c -> d"), f("((a & b) | c) -> d"));
        assert_eq!(f("~a & N b S c"), f("(~a) & ((N b) S c)"));
        assert_eq!(f("a S b S c"), f("(a S b) S c"));
        assert_eq!(f("a -> b -> c"), f("a -> (b -> c)"));
    }

    #[test]
    fn derived_operators_parse() {
        assert_eq!(f("[]x"), Formula::box_(Formula::atom("x")));
        assert_eq!(f("<>x"), Formula::diamond(Formula::atom("x")));
        assert_eq!(f("K1 p"), Formula::K1(Box::new(Formula::atom("p"))));
        assert_eq!(
            f("K[q] p"),
            Formula::KPar {
                trigger: Box::new(Formula::atom("q")),
                body: Box::new(Formula::atom("p")),
            }
        );
    }

    #[test]
    fn rule_forms() {
        let r = parse_rule("N x / x").unwrap();
        assert_eq!(r.premises(), &[f("N x")]);
        assert_eq!(*r.conclusion(), f("x"));

        let r = parse_rule("x / x").unwrap();
        assert_eq!(r.premises(), &[f("x")]);

        let r = parse_rule("x -> x / ~p").unwrap();
        assert_eq!(r.premises(), &[f("x -> x")]);
        assert_eq!(*r.conclusion(), f("~p"));

        let r = parse_rule("a, b & c / d").unwrap();
        assert_eq!(r.premises().len(), 2);
    }

    #[test]
    fn empty_premises_is_reported() {
        assert_eq!(parse_rule("/ x"), Err(Error::EmptyPremises));
    }

    #[test]
    fn unknown_operator_is_reported() {
        match parse_formula("x U y") {
            Err(Error::UnknownOperator { text, col, .. }) => {
                assert_eq!(text, "U");
                assert_eq!(col, 3);
            }
            other => panic!("expected UnknownOperator, got {other:?}"),
        }
        assert!(matches!(
            parse_formula("K3 p"),
            Err(Error::UnknownOperator { .. })
        ));
    }

    #[test]
    fn syntax_errors_carry_position_and_expectations() {
        match parse_formula("p &") {
            Err(Error::Syntax {
                line,
                col,
                expected,
                ..
            }) => {
                assert_eq!((line, col), (1, 4));
                assert!(!expected.is_empty());
            }
            other => panic!("expected Syntax, got {other:?}"),
        }
        assert!(parse_formula("p q").is_err());
        assert!(parse_formula("(p").is_err());
    }

    #[test]
    fn render_reparses_to_the_same_tree() {
        for text in [
            "p",
            "q S p",
            "N x / x",
            "a -> b -> c",
            "(a -> b) -> c",
            "a S (b S c)",
            "~(true S ~x)",
            "[]x -> [][]x",
            "K[q3] (p & ~p)",
            "x | y & z, N N x / <>y",
        ] {
            if text.contains('/') {
                let r = parse_rule(text).unwrap();
                assert_eq!(parse_rule(&r.to_string()).unwrap(), r, "rule `{text}`");
            } else {
                let f0 = parse_formula(text).unwrap();
                assert_eq!(parse_formula(&f0.to_string()).unwrap(), f0, "formula `{text}`");
            }
        }
    }

    #[test]
    fn render_examples() {
        assert_eq!(Formula::atom("p").to_string(), "p");
        assert_eq!(
            Formula::since(Formula::atom("q"), Formula::atom("p")).to_string(),
            "q S p"
        );
        let r = Rule::new(vec![f("N x")], f("x"));
        assert_eq!(r.to_string(), "N x / x");
    }
}

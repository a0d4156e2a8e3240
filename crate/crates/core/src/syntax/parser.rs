//! Recursive-descent parser for the ASCII formula and rule grammar.
//!
//! ```text
//! implies := or ("->" implies)?
//! or      := and ("|" and)*
//! and     := until ("&" until)*
//! until   := unary ("U" unary)*
//! unary   := ("!" | "X" | "X^k" | "G" | "F") unary | atom
//! atom    := letter | "true" | "false" | "(" implies ")"
//! ```
//!
//! `G`, `F` and `X^k` are expanded while parsing, so the result only contains
//! primitive constructors. Uppercase words made solely of `X`, `G` and `F`
//! (such as `GF` or `XX`) read as a sequence of prefix operators.

use thiserror::Error;

use super::derived::{expand_derived, DerivedOp};
use super::formula::{Formula, Rule};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at column {column}: {message}")]
    Syntax { column: usize, message: String },
    #[error("unknown operator `{token}` at column {column}")]
    UnknownOperator { column: usize, token: String },
    #[error("unbalanced parenthesis at column {column}")]
    UnbalancedParens { column: usize },
}

impl ParseError {
    /// 1-based column of the offending input.
    pub fn column(&self) -> usize {
        match self {
            ParseError::Syntax { column, .. }
            | ParseError::UnknownOperator { column, .. }
            | ParseError::UnbalancedParens { column } => *column,
        }
    }

    fn shifted(self, by: usize) -> Self {
        match self {
            ParseError::Syntax { column, message } => ParseError::Syntax {
                column: column + by,
                message,
            },
            ParseError::UnknownOperator { column, token } => ParseError::UnknownOperator {
                column: column + by,
                token,
            },
            ParseError::UnbalancedParens { column } => ParseError::UnbalancedParens {
                column: column + by,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Letter(String),
    True,
    False,
    Not,
    Next(usize),
    Globally,
    Finally,
    Until,
    And,
    Or,
    Implies,
    LParen,
    RParen,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    column: usize,
}

fn syntax(column: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        column,
        message: message.into(),
    }
}

fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let word_end = |start: usize| {
            let mut j = start;
            while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            j
        };
        match c {
            '(' => out.push(Token { tok: Tok::LParen, column }),
            ')' => out.push(Token { tok: Tok::RParen, column }),
            '!' => out.push(Token { tok: Tok::Not, column }),
            '&' => out.push(Token { tok: Tok::And, column }),
            '|' => out.push(Token { tok: Tok::Or, column }),
            '-' => {
                if chars.get(i + 1) == Some(&'>') {
                    out.push(Token {
                        tok: Tok::Implies,
                        column,
                    });
                    i += 1;
                } else {
                    return Err(ParseError::UnknownOperator {
                        column,
                        token: "-".into(),
                    });
                }
            }
            'a'..='z' => {
                let end = word_end(i);
                let word: String = chars[i..end].iter().collect();
                let tok = match word.as_str() {
                    "true" => Tok::True,
                    "false" => Tok::False,
                    _ => Tok::Letter(word),
                };
                out.push(Token { tok, column });
                i = end;
                continue;
            }
            'A'..='Z' => {
                let end = word_end(i);
                let word: String = chars[i..end].iter().collect();
                if word == "U" {
                    out.push(Token { tok: Tok::Until, column });
                } else if word == "X" && chars.get(end) == Some(&'^') {
                    let digits_start = end + 1;
                    let mut j = digits_start;
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                    if j == digits_start {
                        return Err(syntax(end + 1, "expected a count after `X^`"));
                    }
                    let count: String = chars[digits_start..j].iter().collect();
                    let count = count
                        .parse()
                        .map_err(|_| syntax(digits_start + 1, "count after `X^` is too large"))?;
                    out.push(Token {
                        tok: Tok::Next(count),
                        column,
                    });
                    i = j;
                    continue;
                } else if word.chars().all(|c| matches!(c, 'X' | 'G' | 'F')) {
                    for (k, op) in word.chars().enumerate() {
                        let tok = match op {
                            'X' => Tok::Next(1),
                            'G' => Tok::Globally,
                            _ => Tok::Finally,
                        };
                        out.push(Token {
                            tok,
                            column: column + k,
                        });
                    }
                } else {
                    return Err(ParseError::UnknownOperator { column, token: word });
                }
                i = end;
                continue;
            }
            other => {
                return Err(ParseError::UnknownOperator {
                    column,
                    token: other.to_string(),
                })
            }
        }
        i += 1;
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end_column: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn column(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map(|t| t.column)
            .unwrap_or(self.end_column)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn implies(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or()?;
        if self.peek() == Some(&Tok::Implies) {
            self.bump();
            let rhs = self.implies()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.and()?;
        while self.peek() == Some(&Tok::Or) {
            self.bump();
            lhs = Formula::or(lhs, self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.until()?;
        while self.peek() == Some(&Tok::And) {
            self.bump();
            lhs = Formula::and(lhs, self.until()?);
        }
        Ok(lhs)
    }

    fn until(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(&Tok::Until) {
            self.bump();
            lhs = Formula::until(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let column = self.column();
        let Some(token) = self.bump() else {
            return Err(syntax(column, "unexpected end of input"));
        };
        let derived = |op: DerivedOp, f: Formula| {
            expand_derived(&op, &[f], None).expect("unary derived operator with one argument")
        };
        match token.tok {
            Tok::Not => Ok(Formula::not(self.unary()?)),
            Tok::Next(k) => Ok(derived(DerivedOp::NextIter(k), self.unary()?)),
            Tok::Globally => Ok(derived(DerivedOp::Box, self.unary()?)),
            Tok::Finally => Ok(derived(DerivedOp::Diamond, self.unary()?)),
            Tok::Letter(name) => Ok(Formula::Letter(name)),
            Tok::True => Ok(Formula::True),
            Tok::False => Ok(Formula::False),
            Tok::LParen => {
                let inner = self.implies()?;
                match self.peek() {
                    Some(Tok::RParen) => {
                        self.bump();
                        Ok(inner)
                    }
                    None => Err(ParseError::UnbalancedParens { column }),
                    Some(_) => Err(syntax(self.column(), "expected `)`")),
                }
            }
            Tok::RParen => Err(ParseError::UnbalancedParens { column }),
            other => Err(syntax(column, format!("expected a formula, found {}", describe(&other)))),
        }
    }
}

fn describe(tok: &Tok) -> &'static str {
    match tok {
        Tok::Until => "`U`",
        Tok::And => "`&`",
        Tok::Or => "`|`",
        Tok::Implies => "`->`",
        Tok::RParen => "`)`",
        _ => "a token",
    }
}

/// Parses a formula, expanding `G`, `F` and `X^k`.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        end_column: text.chars().count() + 1,
    };
    let f = parser.implies()?;
    match parser.peek() {
        None => Ok(f),
        Some(Tok::RParen) => Err(ParseError::UnbalancedParens {
            column: parser.column(),
        }),
        Some(_) => Err(syntax(parser.column(), "unexpected trailing input")),
    }
}

/// Parses a rule written `f1, f2, ... / g`.
pub fn parse_rule(text: &str) -> Result<Rule, ParseError> {
    let Some(slash) = text.find('/') else {
        return Err(syntax(text.chars().count() + 1, "expected `/` separating premises from the conclusion"));
    };
    let (lhs, rhs) = (&text[..slash], &text[slash + 1..]);
    if let Some(extra) = rhs.find('/') {
        let column = text[..slash + 1 + extra].chars().count() + 1;
        return Err(syntax(column, "a rule has exactly one `/`"));
    }
    let mut premises = Vec::new();
    let mut offset = 0;
    for part in lhs.split(',') {
        let f = parse_formula(part).map_err(|e| e.shifted(offset))?;
        premises.push(f);
        offset += part.chars().count() + 1;
    }
    let conclusion_offset = lhs.chars().count() + 1;
    let conclusion = parse_formula(rhs).map_err(|e| e.shifted(conclusion_offset))?;
    Ok(Rule::new(premises, conclusion).expect("split always yields at least one premise"))
}

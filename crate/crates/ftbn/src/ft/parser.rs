//! Parser for the fault-tree DSL.
//!
//! Statements are `;`-terminated, `#` starts a line comment:
//!
//! ```text
//! primary IDENT rate=FLOAT;   # or prob=FLOAT
//! event IDENT = and(a, b);    # or(...), K of N(...)
//! top IDENT;
//! ```
//!
//! Exactly one `top` statement is required. Definitions may appear in any
//! order; references are resolved after the whole document is read.

use std::fmt;

use crate::ft::{Diagnostic, EventId, FaultTree, Gate, GateKind, PrimaryEvent};
use crate::reliability::FailureModel;

/// Parse failure with its source position (1-based line and column).
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{line}:{column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("duplicate definition of `{0}`")]
    DuplicateDefinition(String),
    #[error("reference to undefined event `{0}`")]
    UndefinedReference(String),
    #[error("cycle through event `{0}`")]
    Cycle(String),
    #[error("{k}-of-{n} gate has {actual} inputs")]
    KofNArity { k: usize, n: usize, actual: usize },
    #[error("{0}")]
    Invalid(Diagnostic),
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Pos {
    line: usize,
    column: usize,
}

impl Pos {
    fn err(self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            line: self.line,
            column: self.column,
            kind,
        }
    }

    fn syntax(self, msg: impl Into<String>) -> ParseError {
        self.err(ParseErrorKind::Syntax(msg.into()))
    }
}

#[derive(Debug, Clone, PartialEq)]
enum TokenKind {
    Word(String),
    Number(String),
    Punct(char),
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Word(w) => write!(f, "`{w}`"),
            TokenKind::Number(n) => write!(f, "number `{n}`"),
            TokenKind::Punct(c) => write!(f, "`{c}`"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    pos: Pos,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut tokens = Vec::new();
    let mut line = 1;
    let mut column = 1;
    let mut chars = text.chars().peekable();

    while let Some(&c) = chars.peek() {
        let pos = Pos { line, column };
        match c {
            '\n' => {
                chars.next();
                line += 1;
                column = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                column += 1;
            }
            '#' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                    column += 1;
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut word = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        word.push(c);
                        chars.next();
                        column += 1;
                    } else {
                        break;
                    }
                }
                tokens.push(Token {
                    kind: TokenKind::Word(word),
                    pos,
                });
            }
            c if c.is_ascii_digit() || c == '.' => {
                let mut number = String::new();
                let mut seen_exp = false;
                while let Some(&c) = chars.peek() {
                    let take = c.is_ascii_digit()
                        || c == '.'
                        || c == 'e'
                        || c == 'E'
                        || ((c == '+' || c == '-')
                            && matches!(number.chars().last(), Some('e') | Some('E')));
                    if !take {
                        break;
                    }
                    if c == 'e' || c == 'E' {
                        if seen_exp {
                            break;
                        }
                        seen_exp = true;
                    }
                    number.push(c);
                    chars.next();
                    column += 1;
                }
                tokens.push(Token {
                    kind: TokenKind::Number(number),
                    pos,
                });
            }
            '=' | ';' | ',' | '(' | ')' | '-' | '+' => {
                chars.next();
                column += 1;
                tokens.push(Token {
                    kind: TokenKind::Punct(c),
                    pos,
                });
            }
            other => return Err(pos.syntax(format!("unexpected character `{other}`"))),
        }
    }
    Ok(tokens)
}

enum RawStmt {
    Primary {
        id: String,
        pos: Pos,
        failure: FailureModel,
    },
    Event {
        id: String,
        pos: Pos,
        kind: GateKind,
        inputs: Vec<(String, Pos)>,
    },
    Top {
        id: String,
        pos: Pos,
    },
}

struct Cursor {
    tokens: Vec<Token>,
    at: usize,
    end: Pos,
}

impl Cursor {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.at)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.at).cloned();
        if t.is_some() {
            self.at += 1;
        }
        t
    }

    fn expect_word(&mut self, what: &str) -> Result<(String, Pos), ParseError> {
        match self.next() {
            Some(Token {
                kind: TokenKind::Word(w),
                pos,
            }) => Ok((w, pos)),
            Some(t) => Err(t.pos.syntax(format!("expected {what}, found {}", t.kind))),
            None => Err(self
                .end
                .syntax(format!("expected {what}, found end of input"))),
        }
    }

    fn expect_punct(&mut self, c: char) -> Result<Pos, ParseError> {
        match self.next() {
            Some(Token {
                kind: TokenKind::Punct(p),
                pos,
            }) if p == c => Ok(pos),
            Some(t) => Err(t.pos.syntax(format!("expected `{c}`, found {}", t.kind))),
            None => Err(self
                .end
                .syntax(format!("expected `{c}`, found end of input"))),
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<Pos, ParseError> {
        let (word, pos) = self.expect_word(&format!("`{kw}`"))?;
        if word == kw {
            Ok(pos)
        } else {
            Err(pos.syntax(format!("expected `{kw}`, found `{word}`")))
        }
    }

    /// Parses a float literal, allowing a leading sign.
    fn expect_float(&mut self) -> Result<(f64, Pos), ParseError> {
        let mut sign = 1.0;
        let mut sign_pos = None;
        if let Some(Token {
            kind: TokenKind::Punct(c @ ('-' | '+')),
            pos,
        }) = self.peek().cloned()
        {
            sign = if c == '-' { -1.0 } else { 1.0 };
            sign_pos = Some(pos);
            self.next();
        }
        match self.next() {
            Some(Token {
                kind: TokenKind::Number(n),
                pos,
            }) => {
                let value: f64 = n
                    .parse()
                    .map_err(|_| pos.syntax(format!("invalid number `{n}`")))?;
                Ok((sign * value, sign_pos.unwrap_or(pos)))
            }
            Some(t) => Err(t.pos.syntax(format!("expected a number, found {}", t.kind))),
            None => Err(self.end.syntax("expected a number, found end of input")),
        }
    }

    fn expect_int(&mut self) -> Result<(usize, Pos), ParseError> {
        match self.next() {
            Some(Token {
                kind: TokenKind::Number(n),
                pos,
            }) => {
                let value: usize = n
                    .parse()
                    .map_err(|_| pos.syntax(format!("expected an integer, found `{n}`")))?;
                Ok((value, pos))
            }
            Some(t) => Err(t
                .pos
                .syntax(format!("expected an integer, found {}", t.kind))),
            None => Err(self.end.syntax("expected an integer, found end of input")),
        }
    }
}

fn parse_input_list(cur: &mut Cursor) -> Result<Vec<(String, Pos)>, ParseError> {
    cur.expect_punct('(')?;
    let mut inputs = vec![cur.expect_word("an event name")?];
    loop {
        match cur.next() {
            Some(Token {
                kind: TokenKind::Punct(','),
                ..
            }) => inputs.push(cur.expect_word("an event name")?),
            Some(Token {
                kind: TokenKind::Punct(')'),
                ..
            }) => break,
            Some(t) => {
                return Err(t
                    .pos
                    .syntax(format!("expected `,` or `)`, found {}", t.kind)))
            }
            None => return Err(cur.end.syntax("expected `,` or `)`, found end of input")),
        }
    }
    Ok(inputs)
}

fn parse_stmts(text: &str) -> Result<Vec<RawStmt>, ParseError> {
    let tokens = lex(text)?;
    let mut cur = Cursor {
        tokens,
        at: 0,
        end: end_pos(text),
    };
    let mut stmts = Vec::new();

    while cur.peek().is_some() {
        let (head, head_pos) = cur.expect_word("`primary`, `event` or `top`")?;
        match head.as_str() {
            "primary" => {
                let (id, pos) = cur.expect_word("an event name")?;
                let (field, field_pos) = cur.expect_word("`rate` or `prob`")?;
                cur.expect_punct('=')?;
                let (value, value_pos) = cur.expect_float()?;
                let failure = match field.as_str() {
                    "rate" => {
                        if !(value.is_finite() && value >= 0.0) {
                            return Err(value_pos.syntax("failure rate must be nonnegative"));
                        }
                        FailureModel::Exponential { rate: value }
                    }
                    "prob" => {
                        if !(value.is_finite() && (0.0..=1.0).contains(&value)) {
                            return Err(value_pos.syntax("probability must be in [0, 1]"));
                        }
                        FailureModel::Fixed { p: value }
                    }
                    other => {
                        return Err(
                            field_pos.syntax(format!("expected `rate` or `prob`, found `{other}`"))
                        )
                    }
                };
                stmts.push(RawStmt::Primary { id, pos, failure });
            }
            "event" => {
                let (id, pos) = cur.expect_word("an event name")?;
                cur.expect_punct('=')?;
                let (kind, inputs) = match cur.peek() {
                    Some(Token {
                        kind: TokenKind::Number(_),
                        ..
                    }) => {
                        let (k, kpos) = cur.expect_int()?;
                        cur.expect_keyword("of")?;
                        let (n, _) = cur.expect_int()?;
                        if k < 1 || k > n {
                            return Err(kpos.syntax(format!("invalid voting threshold {k} of {n}")));
                        }
                        (GateKind::KofN { k, n }, parse_input_list(&mut cur)?)
                    }
                    _ => {
                        let (word, wpos) = cur.expect_word("`and`, `or` or `K of N`")?;
                        let kind = match word.as_str() {
                            "and" => GateKind::And,
                            "or" => GateKind::Or,
                            other => {
                                return Err(wpos.syntax(format!(
                                    "expected `and`, `or` or `K of N`, found `{other}`"
                                )))
                            }
                        };
                        (kind, parse_input_list(&mut cur)?)
                    }
                };
                stmts.push(RawStmt::Event {
                    id,
                    pos,
                    kind,
                    inputs,
                });
            }
            "top" => {
                let (id, pos) = cur.expect_word("an event name")?;
                stmts.push(RawStmt::Top { id, pos });
            }
            other => {
                return Err(head_pos.syntax(format!(
                    "expected `primary`, `event` or `top`, found `{other}`"
                )))
            }
        }
        cur.expect_punct(';')?;
    }
    Ok(stmts)
}

fn assemble(stmts: &[RawStmt], end: Pos) -> Result<FaultTree, ParseError> {
    let mut primaries = Vec::new();
    let mut gates = Vec::new();
    let mut top: Option<(String, Pos)> = None;

    for stmt in stmts {
        match stmt {
            RawStmt::Primary { id, failure, .. } => {
                primaries.push(PrimaryEvent::new(id.as_str(), id.as_str(), *failure));
            }
            RawStmt::Event {
                id, kind, inputs, ..
            } => {
                gates.push(Gate::new(
                    *kind,
                    id.as_str(),
                    inputs
                        .iter()
                        .map(|(name, _)| EventId::from(name.as_str()))
                        .collect(),
                ));
            }
            RawStmt::Top { id, pos } => {
                if top.is_some() {
                    return Err(pos.syntax("more than one `top` statement"));
                }
                top = Some((id.clone(), *pos));
            }
        }
    }

    let (top, _) = top.ok_or_else(|| end.syntax("missing `top` statement"))?;
    Ok(FaultTree {
        primaries,
        gates,
        top: EventId::from(top.as_str()),
    })
}

fn end_pos(text: &str) -> Pos {
    Pos {
        line: text.lines().count().max(1),
        column: text.lines().last().map_or(1, |l| l.chars().count() + 1),
    }
}

/// Parses DSL source without semantic checks.
///
/// Only the grammar is enforced; the returned tree may violate structural
/// invariants (duplicates, undefined references, cycles), which
/// [`FaultTree::validate`] will report. This is what `ftbn validate` runs
/// so that a malformed model produces diagnostics rather than a parse
/// error.
pub fn parse_fault_tree_unchecked(text: &str) -> Result<FaultTree, ParseError> {
    let stmts = parse_stmts(text)?;
    assemble(&stmts, end_pos(text))
}

/// Parses DSL source into a fault tree satisfying every invariant.
///
/// Errors carry the offending source position and cover syntax errors,
/// duplicate definitions, undefined references, cycles, and k-of-n arity
/// mismatches.
pub fn parse_fault_tree(text: &str) -> Result<FaultTree, ParseError> {
    let stmts = parse_stmts(text)?;
    let ft = assemble(&stmts, end_pos(text))?;

    // Semantic checks, in source order, with precise positions.
    let mut defined: std::collections::HashMap<&str, Pos> = std::collections::HashMap::new();
    for stmt in &stmts {
        let (id, pos) = match stmt {
            RawStmt::Primary { id, pos, .. } | RawStmt::Event { id, pos, .. } => (id, *pos),
            RawStmt::Top { .. } => continue,
        };
        if defined.insert(id, pos).is_some() {
            return Err(pos.err(ParseErrorKind::DuplicateDefinition(id.clone())));
        }
    }
    for stmt in &stmts {
        if let RawStmt::Event {
            pos, kind, inputs, ..
        } = stmt
        {
            for (input, ipos) in inputs {
                if !defined.contains_key(input.as_str()) {
                    return Err(ipos.err(ParseErrorKind::UndefinedReference(input.clone())));
                }
            }
            if let GateKind::KofN { k, n } = kind {
                if inputs.len() != *n {
                    return Err(pos.err(ParseErrorKind::KofNArity {
                        k: *k,
                        n: *n,
                        actual: inputs.len(),
                    }));
                }
            }
        }
    }

    let diag_pos = |id: &EventId| {
        defined
            .get(id.as_str())
            .copied()
            .unwrap_or(Pos { line: 1, column: 1 })
    };
    if let Some(diag) = ft.validate().into_iter().next() {
        return Err(match diag {
            Diagnostic::Cycle(id) => {
                let pos = diag_pos(&id);
                pos.err(ParseErrorKind::Cycle(id.as_str().to_owned()))
            }
            other => {
                let pos = match &other {
                    Diagnostic::TopUndefined(id)
                    | Diagnostic::UnreachableGate(id)
                    | Diagnostic::UnreferencedPrimary(id)
                    | Diagnostic::GateOutputIsPrimary(id) => diag_pos(id),
                    _ => Pos { line: 1, column: 1 },
                };
                pos.err(ParseErrorKind::Invalid(other))
            }
        });
    }
    Ok(ft)
}

//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := primary ('^' unary)?
//! primary := number | '(' expr ')' | 'exp' '(' expr ')' | 'ln' '(' expr ')'
//!          | name ("'"* | '[' n (',' n)* ']') '(' expr (',' expr)* ')'
//!          | 'u' | 'v' | 't' | 'x' | jet | parameter
//! jet     := ('u' | 'v') '_' 't'* 'x'*
//! ```

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use super::{Atom, Expr, FuncApp, Indep, JetCoordinate, Rational, Var, DEFAULT_MAX_JET_ORDER};

/// Parameter names accepted by [`parse`] unless a caller declares its own set.
pub const DEFAULT_PARAMETERS: &[&str] = &[
    "a", "b", "alpha", "beta", "gamma", "delta", "kappa", "lambda", "mu", "k",
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    Undeclared(String),
    JetOrder { jet: String, max: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    /// Byte offset into the input.
    pub position: usize,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ParseErrorKind::Syntax(msg) => write!(f, "syntax error at {}: {}", self.position, msg),
            ParseErrorKind::Undeclared(name) => {
                write!(f, "undeclared symbol `{}` at {}", name, self.position)
            }
            ParseErrorKind::JetOrder { jet, max } => write!(
                f,
                "jet coordinate `{}` at {} exceeds the maximum order {}",
                jet, self.position, max
            ),
        }
    }
}

impl std::error::Error for ParseError {}

/// Parse `text` with the given declared parameter names.
pub fn parse(text: &str, params: &[&str]) -> Result<Expr, ParseError> {
    Parser::new(params).parse(text)
}

#[derive(Clone, Debug)]
pub struct Parser {
    params: BTreeSet<String>,
    locals: Vec<String>,
    max_jet_order: u32,
}

impl Parser {
    pub fn new(params: &[&str]) -> Self {
        Parser {
            params: params.iter().map(|s| s.to_string()).collect(),
            locals: Vec::new(),
            max_jet_order: DEFAULT_MAX_JET_ORDER,
        }
    }

    pub fn with_params<I, S>(params: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Parser {
            params: params.into_iter().map(Into::into).collect(),
            locals: Vec::new(),
            max_jet_order: DEFAULT_MAX_JET_ORDER,
        }
    }

    /// Names bound to argument slots, used for function definitions such as
    /// `B(z) = z^2` where `z` becomes slot 0.
    pub fn with_locals(mut self, locals: &[&str]) -> Self {
        self.locals = locals.iter().map(|s| s.to_string()).collect();
        self
    }

    pub fn with_max_jet_order(mut self, max: u32) -> Self {
        self.max_jet_order = max;
        self
    }

    pub fn declare(&mut self, name: &str) {
        self.params.insert(name.to_string());
    }

    pub fn parse(&self, text: &str) -> Result<Expr, ParseError> {
        let tokens = tokenize(text)?;
        let mut st = State {
            tokens,
            pos: 0,
            end: text.len(),
            cfg: self,
        };
        let e = st.expr()?;
        if let Some(tok) = st.peek() {
            return Err(st.error_at(tok.pos, format!("unexpected `{}`", tok.kind)));
        }
        Ok(e)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum TokKind {
    Num(Rational),
    Ident(String),
    Sym(char),
}

impl fmt::Display for TokKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokKind::Num(n) => write!(f, "{}", n),
            TokKind::Ident(s) => f.write_str(s),
            TokKind::Sym(c) => write!(f, "{}", c),
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    kind: TokKind,
    pos: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let mut digits = text[start..i].to_string();
            let mut scale = 0usize;
            if i < bytes.len() && bytes[i] == b'.' {
                i += 1;
                let frac_start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                digits.push_str(&text[frac_start..i]);
                scale = i - frac_start;
            }
            let numer: BigInt = digits.parse().map_err(|_| ParseError {
                kind: ParseErrorKind::Syntax("malformed number".into()),
                position: start,
            })?;
            let denom = num_traits::pow(BigInt::from(10), scale);
            out.push(Token {
                kind: TokKind::Num(Rational::new(numer, denom)),
                pos: start,
            });
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Token {
                kind: TokKind::Ident(text[start..i].to_string()),
                pos: start,
            });
        } else if "+-*/^(),'[]".contains(c) {
            out.push(Token {
                kind: TokKind::Sym(c),
                pos: i,
            });
            i += 1;
        } else {
            return Err(ParseError {
                kind: ParseErrorKind::Syntax(format!("unexpected character `{}`", c)),
                position: i,
            });
        }
    }
    Ok(out)
}

struct State<'a> {
    tokens: Vec<Token>,
    pos: usize,
    end: usize,
    cfg: &'a Parser,
}

impl State<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_sym(&self, c: char) -> bool {
        matches!(self.peek(), Some(Token { kind: TokKind::Sym(s), .. }) if *s == c)
    }

    fn here(&self) -> usize {
        self.peek().map(|t| t.pos).unwrap_or(self.end)
    }

    fn error_at(&self, position: usize, msg: String) -> ParseError {
        ParseError {
            kind: ParseErrorKind::Syntax(msg),
            position,
        }
    }

    fn expect_sym(&mut self, c: char) -> Result<(), ParseError> {
        if self.peek_sym(c) {
            self.pos += 1;
            Ok(())
        } else {
            let found = self
                .peek()
                .map(|t| format!("`{}`", t.kind))
                .unwrap_or_else(|| "end of input".into());
            Err(self.error_at(self.here(), format!("expected `{}`, found {}", c, found)))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = vec![self.term()?];
        loop {
            if self.peek_sym('+') {
                self.pos += 1;
                terms.push(self.term()?);
            } else if self.peek_sym('-') {
                self.pos += 1;
                terms.push(-self.term()?);
            } else {
                break;
            }
        }
        Ok(if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            Expr::Sum(terms)
        })
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut factors = vec![self.unary()?];
        loop {
            if self.peek_sym('*') {
                self.pos += 1;
                factors.push(self.unary()?);
            } else if self.peek_sym('/') {
                self.pos += 1;
                let d = self.unary()?;
                factors.push(match d {
                    Expr::Const(c) if !c.is_zero() => Expr::Const(c.recip()),
                    d => d.pow(-1),
                });
            } else {
                break;
            }
        }
        Ok(if factors.len() == 1 {
            factors.pop().unwrap()
        } else {
            Expr::Product(factors)
        })
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek_sym('-') {
            self.pos += 1;
            return Ok(-self.unary()?);
        }
        if self.peek_sym('+') {
            self.pos += 1;
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.peek_sym('^') {
            self.pos += 1;
            let at = self.here();
            let exponent = self.unary()?;
            let n = exponent
                .constant_value()
                .filter(|c| c.is_integer())
                .and_then(|c| i64::try_from(c.to_integer()).ok())
                .ok_or_else(|| self.error_at(at, "exponent must be an integer constant".into()))?;
            return Ok(base.pow(n));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let tok = match self.peek() {
            Some(t) => t.clone(),
            None => return Err(self.error_at(self.end, "unexpected end of input".into())),
        };
        self.pos += 1;
        match tok.kind {
            TokKind::Num(n) => Ok(Expr::Const(n)),
            TokKind::Sym('(') => {
                let e = self.expr()?;
                self.expect_sym(')')?;
                Ok(e)
            }
            TokKind::Sym(c) => Err(self.error_at(tok.pos, format!("unexpected `{}`", c))),
            TokKind::Ident(name) => self.identifier(name, tok.pos),
        }
    }

    fn identifier(&mut self, name: String, at: usize) -> Result<Expr, ParseError> {
        match name.as_str() {
            "exp" | "ln" if self.peek_sym('(') => {
                self.pos += 1;
                let arg = self.expr()?;
                self.expect_sym(')')?;
                return Ok(if name == "exp" { arg.exp() } else { arg.ln() });
            }
            "t" => return Ok(Expr::Atom(Atom::Indep(Indep::T))),
            "x" => return Ok(Expr::Atom(Atom::Indep(Indep::X))),
            "u" => return Ok(Expr::u()),
            "v" => return Ok(Expr::v()),
            _ => {}
        }
        if let Some(jet) = parse_jet(&name) {
            let jet = jet.map_err(|msg| self.error_at(at, msg))?;
            if jet.order() > self.cfg.max_jet_order {
                return Err(ParseError {
                    kind: ParseErrorKind::JetOrder {
                        jet: name,
                        max: self.cfg.max_jet_order,
                    },
                    position: at,
                });
            }
            return Ok(Expr::Atom(Atom::Jet(jet)));
        }
        if self.peek_sym('\'') || self.peek_sym('[') || self.peek_sym('(') {
            return self.function(name, at);
        }
        if let Some(i) = self.cfg.locals.iter().position(|l| *l == name) {
            return Ok(Expr::slot(i as u32));
        }
        if self.cfg.params.contains(&name) {
            return Ok(Expr::param(name));
        }
        Err(ParseError {
            kind: ParseErrorKind::Undeclared(name),
            position: at,
        })
    }

    fn function(&mut self, name: String, at: usize) -> Result<Expr, ParseError> {
        if name.contains('_') {
            return Err(self.error_at(at, format!("invalid function name `{}`", name)));
        }
        let mut primes = 0u32;
        let mut index: Option<Vec<u32>> = None;
        while self.peek_sym('\'') {
            self.pos += 1;
            primes += 1;
        }
        if primes == 0 && self.peek_sym('[') {
            self.pos += 1;
            let mut idx = Vec::new();
            loop {
                match self.peek().cloned() {
                    Some(Token {
                        kind: TokKind::Num(n),
                        pos,
                    }) => {
                        self.pos += 1;
                        if !n.is_integer() {
                            return Err(self.error_at(pos, "derivative index must be an integer".into()));
                        }
                        let k = u32::try_from(n.to_integer())
                            .map_err(|_| self.error_at(pos, "derivative index out of range".into()))?;
                        idx.push(k);
                    }
                    _ => return Err(self.error_at(self.here(), "expected derivative index".into())),
                }
                if self.peek_sym(',') {
                    self.pos += 1;
                } else {
                    break;
                }
            }
            self.expect_sym(']')?;
            index = Some(idx);
        }
        self.expect_sym('(')?;
        let mut args = vec![self.expr()?];
        while self.peek_sym(',') {
            self.pos += 1;
            args.push(self.expr()?);
        }
        self.expect_sym(')')?;
        let derivs = match index {
            Some(idx) => {
                if idx.len() != args.len() {
                    return Err(self.error_at(at, "derivative index does not match the argument count".into()));
                }
                idx
            }
            None if primes > 0 => {
                if args.len() != 1 {
                    return Err(self.error_at(at, "primes are only allowed on one-argument functions".into()));
                }
                vec![primes]
            }
            None => vec![0; args.len()],
        };
        Ok(Expr::Atom(Atom::Func(FuncApp { name, derivs, args })))
    }
}

/// `Some(Ok)` for a well-formed jet name, `Some(Err)` for a malformed one,
/// `None` if the identifier is not jet-shaped at all.
fn parse_jet(name: &str) -> Option<Result<JetCoordinate, String>> {
    let (dep, suffix) = match name.split_once('_') {
        Some(("u", s)) => (Var::U, s),
        Some(("v", s)) => (Var::V, s),
        _ => return None,
    };
    if suffix.is_empty() {
        return Some(Err(format!("empty derivative suffix in `{}`", name)));
    }
    let t_order = suffix.chars().take_while(|&c| c == 't').count();
    let rest = &suffix[t_order..];
    if !rest.chars().all(|c| c == 'x') {
        return Some(Err(format!(
            "malformed jet coordinate `{}` (t's must precede x's)",
            name
        )));
    }
    Some(Ok(JetCoordinate::new(dep, t_order as u32, rest.len() as u32)))
}

impl std::str::FromStr for Expr {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s, DEFAULT_PARAMETERS)
    }
}

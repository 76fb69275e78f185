//! Text parsers for polynomial expressions and germ definition files.
//!
//! Expression syntax: `+`, `-`, `*`, `^`, integer and rational literals
//! (`3/4`), and named variables. Real expressions use the variables declared
//! in the `vars:` header; mixed expressions use `cvars:` names and `conj(zj)`.
//! Malformed input is rejected with a byte position and message.

use num::{BigInt, BigRational};

use crate::mixed::{ComplexRational, MixedFunction};
use crate::poly::Polynomial;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub pos: usize,
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "parse error at {}:{}: {}", self.line, self.col, self.msg)
    }
}

impl std::error::Error for ParseError {}

fn err_at(input: &str, pos: usize, msg: impl Into<String>) -> ParseError {
    let mut line = 1;
    let mut col = 1;
    for (i, c) in input.char_indices() {
        if i >= pos {
            break;
        }
        if c == '\n' {
            line += 1;
            col = 1;
        } else {
            col += 1;
        }
    }
    ParseError {
        pos,
        line,
        col,
        msg: msg.into(),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    Number(BigRational),
    Ident(String),
}

struct Lexer<'a> {
    input: &'a str,
    full: &'a str,
    offset: usize,
    pos: usize,
    toks: Vec<(usize, Tok)>,
}

fn lex(full: &str, offset: usize, s: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let mut lx = Lexer {
        input: s,
        full,
        offset,
        pos: 0,
        toks: Vec::new(),
    };
    let bytes = lx.input.as_bytes();
    while lx.pos < bytes.len() {
        let c = bytes[lx.pos] as char;
        let start = lx.offset + lx.pos;
        match c {
            ' ' | '\t' => {
                lx.pos += 1;
            }
            '+' => {
                lx.toks.push((start, Tok::Plus));
                lx.pos += 1;
            }
            '-' => {
                lx.toks.push((start, Tok::Minus));
                lx.pos += 1;
            }
            '*' => {
                lx.toks.push((start, Tok::Star));
                lx.pos += 1;
            }
            '^' => {
                lx.toks.push((start, Tok::Caret));
                lx.pos += 1;
            }
            '(' => {
                lx.toks.push((start, Tok::LParen));
                lx.pos += 1;
            }
            ')' => {
                lx.toks.push((start, Tok::RParen));
                lx.pos += 1;
            }
            '0'..='9' => {
                let d0 = lx.pos;
                while lx.pos < bytes.len() && bytes[lx.pos].is_ascii_digit() {
                    lx.pos += 1;
                }
                let numer: BigInt = lx.input[d0..lx.pos].parse().unwrap();
                // A '/' directly after an integer literal is a rational literal.
                let mut denom = BigInt::from(1);
                if lx.pos < bytes.len() && bytes[lx.pos] == b'/' {
                    let slash = lx.pos;
                    lx.pos += 1;
                    let e0 = lx.pos;
                    while lx.pos < bytes.len() && bytes[lx.pos].is_ascii_digit() {
                        lx.pos += 1;
                    }
                    if e0 == lx.pos {
                        return Err(err_at(
                            lx.full,
                            lx.offset + slash,
                            "expected denominator after '/'",
                        ));
                    }
                    denom = lx.input[e0..lx.pos].parse().unwrap();
                    if denom == BigInt::from(0) {
                        return Err(err_at(lx.full, lx.offset + e0, "zero denominator"));
                    }
                }
                lx.toks
                    .push((start, Tok::Number(BigRational::new(numer, denom))));
            }
            _ if c.is_ascii_alphabetic() || c == '_' => {
                let d0 = lx.pos;
                while lx.pos < bytes.len()
                    && ((bytes[lx.pos] as char).is_ascii_alphanumeric() || bytes[lx.pos] == b'_')
                {
                    lx.pos += 1;
                }
                lx.toks
                    .push((start, Tok::Ident(lx.input[d0..lx.pos].to_string())));
            }
            _ => {
                return Err(err_at(lx.full, start, format!("unexpected character '{}'", c)));
            }
        }
    }
    Ok(lx.toks)
}

/// Expression AST, shared by the real and mixed lowerings.
#[derive(Debug, Clone)]
enum Expr {
    Num(BigRational),
    Var(String, usize),
    Conj(String, usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

struct Parser<'a> {
    full: &'a str,
    toks: &'a [(usize, Tok)],
    i: usize,
    end_pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.i).map(|(p, _)| *p).unwrap_or(self.end_pos)
    }

    fn bump(&mut self) -> Option<&Tok> {
        let t = self.toks.get(self.i).map(|(_, t)| t);
        self.i += 1;
        t
    }

    fn expect(&mut self, want: &Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(want) {
            self.i += 1;
            Ok(())
        } else {
            Err(err_at(self.full, self.pos(), format!("expected {}", what)))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.i += 1;
                    let rhs = self.term()?;
                    lhs = Expr::Add(Box::new(lhs), Box::new(rhs));
                }
                Some(Tok::Minus) => {
                    self.i += 1;
                    let rhs = self.term()?;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(&Tok::Star) {
            self.i += 1;
            let rhs = self.unary()?;
            lhs = Expr::Mul(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek() == Some(&Tok::Minus) {
            self.i += 1;
            let inner = self.unary()?;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        self.factor()
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.i += 1;
            let p = self.pos();
            match self.bump() {
                Some(Tok::Number(n)) if n.is_integer() && *n.numer() >= BigInt::from(0) => {
                    let e: u32 = n.numer().try_into().map_err(|_| {
                        err_at(self.full, p, "exponent too large")
                    })?;
                    Ok(Expr::Pow(Box::new(base), e))
                }
                _ => Err(err_at(self.full, p, "expected nonnegative integer exponent")),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let p = self.pos();
        match self.bump().cloned() {
            Some(Tok::Number(n)) => Ok(Expr::Num(n)),
            Some(Tok::Ident(name)) if name == "conj" => {
                self.expect(&Tok::LParen, "'(' after conj")?;
                let vp = self.pos();
                let var = match self.bump().cloned() {
                    Some(Tok::Ident(v)) => v,
                    _ => return Err(err_at(self.full, vp, "expected variable inside conj(..)")),
                };
                self.expect(&Tok::RParen, "')'")?;
                Ok(Expr::Conj(var, vp))
            }
            Some(Tok::Ident(name)) => Ok(Expr::Var(name, p)),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                self.expect(&Tok::RParen, "')'")?;
                Ok(e)
            }
            _ => Err(err_at(self.full, p, "expected number, variable, or '('")),
        }
    }
}

fn parse_expr(full: &str, offset: usize, src: &str) -> Result<Expr, ParseError> {
    let toks = lex(full, offset, src)?;
    let mut p = Parser {
        full,
        toks: &toks,
        i: 0,
        end_pos: offset + src.len(),
    };
    let e = p.expr()?;
    if p.i != toks.len() {
        return Err(err_at(full, p.pos(), "unexpected trailing input"));
    }
    Ok(e)
}

fn lower_real(
    full: &str,
    e: &Expr,
    vars: &[String],
) -> Result<Polynomial, ParseError> {
    let nv = vars.len();
    match e {
        Expr::Num(n) => Ok(Polynomial::constant(nv, n.clone())),
        Expr::Var(name, p) => match vars.iter().position(|v| v == name) {
            Some(i) => Ok(Polynomial::variable(nv, i)),
            None => Err(err_at(
                full,
                *p,
                format!("unknown variable '{}'", name),
            )),
        },
        Expr::Conj(_, p) => Err(err_at(
            full,
            *p,
            "conj(..) is only valid in mixed expressions",
        )),
        Expr::Neg(a) => Ok(lower_real(full, a, vars)?.neg()),
        Expr::Add(a, b) => Ok(lower_real(full, a, vars)?.add(&lower_real(full, b, vars)?)),
        Expr::Sub(a, b) => Ok(lower_real(full, a, vars)?.sub(&lower_real(full, b, vars)?)),
        Expr::Mul(a, b) => Ok(lower_real(full, a, vars)?.mul(&lower_real(full, b, vars)?)),
        Expr::Pow(a, k) => Ok(lower_real(full, a, vars)?.pow(*k)),
    }
}

fn lower_mixed(
    full: &str,
    e: &Expr,
    vars: &[String],
) -> Result<MixedFunction, ParseError> {
    let n = vars.len();
    match e {
        Expr::Num(c) => Ok(MixedFunction::constant(
            n,
            ComplexRational::from_rational(c.clone()),
        )),
        Expr::Var(name, p) => match vars.iter().position(|v| v == name) {
            Some(j) => Ok(MixedFunction::variable(n, j)),
            None => Err(err_at(
                full,
                *p,
                format!("unknown complex variable '{}'", name),
            )),
        },
        Expr::Conj(name, p) => match vars.iter().position(|v| v == name) {
            Some(j) => Ok(MixedFunction::conj_variable(n, j)),
            None => Err(err_at(
                full,
                *p,
                format!("unknown complex variable '{}'", name),
            )),
        },
        Expr::Neg(a) => Ok(lower_mixed(full, a, vars)?.neg()),
        Expr::Add(a, b) => {
            Ok(lower_mixed(full, a, vars)?.add(&lower_mixed(full, b, vars)?))
        }
        Expr::Sub(a, b) => {
            Ok(lower_mixed(full, a, vars)?.sub(&lower_mixed(full, b, vars)?))
        }
        Expr::Mul(a, b) => {
            Ok(lower_mixed(full, a, vars)?.mul(&lower_mixed(full, b, vars)?))
        }
        Expr::Pow(a, k) => Ok(lower_mixed(full, a, vars)?.pow(*k)),
    }
}

/// Parse a real polynomial expression over the named variables.
pub fn parse_polynomial(src: &str, vars: &[String]) -> Result<Polynomial, ParseError> {
    let e = parse_expr(src, 0, src)?;
    lower_real(src, &e, vars)
}

/// Parse a mixed expression over the named complex variables.
pub fn parse_mixed(src: &str, vars: &[String]) -> Result<MixedFunction, ParseError> {
    let e = parse_expr(src, 0, src)?;
    lower_mixed(src, &e, vars)
}

/// Parsed contents of a germ definition file.
#[derive(Debug, Clone)]
pub enum GermFile {
    Real {
        vars: Vec<String>,
        components: Vec<Polynomial>,
        flags: Vec<String>,
    },
    Mixed {
        cvars: Vec<String>,
        function: MixedFunction,
        flags: Vec<String>,
    },
}

/// Parse a germ definition file.
///
/// Real form:
/// ```text
/// vars: x y z
/// G1 = x*y
/// G2 = z^2
/// flags: thom_regular
/// ```
/// Mixed form uses `cvars: z1 z2` and a single `F = ...` line.
pub fn parse_germ_file(input: &str) -> Result<GermFile, ParseError> {
    let mut vars: Option<Vec<String>> = None;
    let mut cvars: Option<Vec<String>> = None;
    let mut components: Vec<(usize, Polynomial)> = Vec::new();
    let mut function: Option<MixedFunction> = None;
    let mut flags: Vec<String> = Vec::new();

    let mut offset = 0usize;
    for raw in input.split_inclusive('\n') {
        let line_start = offset;
        offset += raw.len();
        let line = raw.trim_end_matches(['\n', '\r']);
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let body_off = line_start + (line.len() - line.trim_start().len());
        if let Some(rest) = trimmed.strip_prefix("vars:") {
            if vars.is_some() || cvars.is_some() {
                return Err(err_at(input, body_off, "duplicate variable declaration"));
            }
            let names: Vec<String> = rest.split_whitespace().map(String::from).collect();
            if names.is_empty() {
                return Err(err_at(input, body_off, "vars: needs at least one name"));
            }
            vars = Some(names);
        } else if let Some(rest) = trimmed.strip_prefix("cvars:") {
            if vars.is_some() || cvars.is_some() {
                return Err(err_at(input, body_off, "duplicate variable declaration"));
            }
            let names: Vec<String> = rest.split_whitespace().map(String::from).collect();
            if names.is_empty() {
                return Err(err_at(input, body_off, "cvars: needs at least one name"));
            }
            cvars = Some(names);
        } else if let Some(rest) = trimmed.strip_prefix("flags:") {
            flags.extend(rest.split_whitespace().map(String::from));
        } else if let Some(eq) = trimmed.find('=') {
            let lhs = trimmed[..eq].trim();
            let rhs = &trimmed[eq + 1..];
            let rhs_off = body_off + (trimmed.len() - trimmed.trim_start().len()) + eq + 1
                + (rhs.len() - rhs.trim_start().len());
            let rhs = rhs.trim();
            if lhs == "F" {
                let cv = cvars.as_ref().ok_or_else(|| {
                    err_at(input, body_off, "F = .. requires a cvars: header first")
                })?;
                let e = parse_expr(input, rhs_off, rhs)?;
                function = Some(lower_mixed(input, &e, cv)?);
            } else if let Some(idx) = lhs.strip_prefix('G').and_then(|s| s.parse::<usize>().ok()) {
                let rv = vars.as_ref().ok_or_else(|| {
                    err_at(input, body_off, "G<i> = .. requires a vars: header first")
                })?;
                if idx == 0 {
                    return Err(err_at(input, body_off, "component indices start at G1"));
                }
                let e = parse_expr(input, rhs_off, rhs)?;
                components.push((idx, lower_real(input, &e, rv)?));
            } else {
                return Err(err_at(
                    input,
                    body_off,
                    format!("unknown definition '{}'", lhs),
                ));
            }
        } else {
            return Err(err_at(input, body_off, "expected 'key: ...' or 'name = expr'"));
        }
    }

    match (vars, cvars) {
        (Some(vars), None) => {
            if components.is_empty() {
                return Err(err_at(input, input.len(), "no components G1, G2, ... defined"));
            }
            components.sort_by_key(|(i, _)| *i);
            for (want, (got, _)) in components.iter().enumerate() {
                if *got != want + 1 {
                    return Err(err_at(
                        input,
                        input.len(),
                        format!("components must be G1..G{} without gaps", components.len()),
                    ));
                }
            }
            Ok(GermFile::Real {
                vars,
                components: components.into_iter().map(|(_, p)| p).collect(),
                flags,
            })
        }
        (None, Some(cvars)) => match function {
            Some(function) => Ok(GermFile::Mixed {
                cvars,
                function,
                flags,
            }),
            None => Err(err_at(input, input.len(), "mixed germ needs an F = .. line")),
        },
        _ => Err(err_at(input, 0, "missing vars: or cvars: header")),
    }
}

//! Tokenizer, recursive-descent parser and printer for `F` expressions.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := ('-' | '+') factor | power
//! power  := atom ('^' INT)?
//! atom   := NUMBER | 'i' | 'x' | 'y' | 'delta' '(' 'y' ',' INT ')'
//!         | IDENT | '(' expr ')'
//! ```
//!
//! Subtrees without variables fold into a single Gaussian-rational constant,
//! and division is only allowed by such constants.

use std::fmt;

use num::{BigRational, Complex, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::{parse_rational, GaussianRational};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(GaussianRational),
    X,
    /// `delta(y, j)`; `y` itself is `Delta(0)`.
    Delta(usize),
    /// A declared holomorphic coefficient function of `x`.
    Coeff(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

impl Expr {
    pub fn constant(&self) -> Option<&GaussianRational> {
        match self {
            Expr::Const(c) => Some(c),
            _ => None,
        }
    }

    /// Largest `j` in `delta(y, j)`, or `None` when `y` does not occur.
    pub fn max_delta(&self) -> Option<usize> {
        match self {
            Expr::Delta(j) => Some(*j),
            Expr::Const(_) | Expr::X | Expr::Coeff(_) => None,
            Expr::Neg(a) | Expr::Pow(a, _) => a.max_delta(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.max_delta().max(b.max_delta())
            }
        }
    }

    /// Total polynomial degree in the jet variables.
    pub fn y_degree(&self) -> u32 {
        match self {
            Expr::Delta(_) => 1,
            Expr::Const(_) | Expr::X | Expr::Coeff(_) => 0,
            Expr::Neg(a) | Expr::Div(a, _) => a.y_degree(),
            Expr::Pow(a, e) => a.y_degree() * e,
            Expr::Add(a, b) | Expr::Sub(a, b) => a.y_degree().max(b.y_degree()),
            Expr::Mul(a, b) => a.y_degree() + b.y_degree(),
        }
    }

    /// Names of coefficient functions referenced by the expression.
    pub fn coeff_names(&self, out: &mut Vec<String>) {
        match self {
            Expr::Coeff(n) => {
                if !out.contains(n) {
                    out.push(n.clone());
                }
            }
            Expr::Const(_) | Expr::X | Expr::Delta(_) => {}
            Expr::Neg(a) | Expr::Pow(a, _) => a.coeff_names(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.coeff_names(out);
                b.coeff_names(out);
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            _ => 5,
        }
    }
}

fn is_plain_natural(c: &GaussianRational) -> bool {
    c.im.is_zero() && c.re.is_integer() && !c.re.is_negative()
}

fn mk_neg(a: Expr) -> Expr {
    match a {
        Expr::Const(c) => Expr::Const(-c),
        a => Expr::Neg(Box::new(a)),
    }
}

fn mk_bin(op: char, a: Expr, b: Expr) -> Expr {
    if let (Expr::Const(x), Expr::Const(y)) = (&a, &b) {
        match op {
            '+' => return Expr::Const(x + y),
            '-' => return Expr::Const(x - y),
            '*' => return Expr::Const(x * y),
            '/' => return Expr::Const(x / y),
            _ => unreachable!(),
        }
    }
    let (a, b) = (Box::new(a), Box::new(b));
    match op {
        '+' => Expr::Add(a, b),
        '-' => Expr::Sub(a, b),
        '*' => Expr::Mul(a, b),
        '/' => Expr::Div(a, b),
        _ => unreachable!(),
    }
}

fn mk_pow(a: Expr, e: u32) -> Expr {
    match a {
        Expr::Const(c) => {
            let mut acc = Complex::new(BigRational::one(), BigRational::zero());
            for _ in 0..e {
                acc = &acc * &c;
            }
            Expr::Const(acc)
        }
        a => Expr::Pow(Box::new(a), e),
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Sym(char),
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    offset: usize,
}

/// Position-aware syntax error; line and column are 1-based.
pub fn syntax_error(text: &str, offset: usize, message: impl Into<String>) -> Error {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    Error::Syntax {
        offset,
        line,
        column,
        message: message.into(),
    }
}

fn tokenize(text: &str, start: usize) -> Result<Vec<Token>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut p = start;
    while p < bytes.len() {
        let c = bytes[p] as char;
        if c.is_ascii_whitespace() {
            p += 1;
        } else if c == '#' {
            while p < bytes.len() && bytes[p] != b'\n' {
                p += 1;
            }
        } else if c.is_ascii_digit() || c == '.' {
            let s = p;
            while p < bytes.len() && (bytes[p].is_ascii_digit() || bytes[p] == b'.') {
                p += 1;
            }
            out.push(Token {
                tok: Tok::Num(text[s..p].to_string()),
                offset: s,
            });
        } else if c.is_ascii_alphabetic() || c == '_' {
            let s = p;
            while p < bytes.len() && (bytes[p].is_ascii_alphanumeric() || bytes[p] == b'_') {
                p += 1;
            }
            out.push(Token {
                tok: Tok::Ident(text[s..p].to_string()),
                offset: s,
            });
        } else if "+-*/^(),".contains(c) {
            out.push(Token {
                tok: Tok::Sym(c),
                offset: p,
            });
            p += 1;
        } else {
            let ch = text[p..].chars().next().unwrap_or(c);
            return Err(syntax_error(text, p, format!("unexpected character {ch:?}")));
        }
    }
    out.push(Token {
        tok: Tok::End,
        offset: bytes.len(),
    });
    Ok(out)
}

struct Parser<'a> {
    text: &'a str,
    toks: Vec<Token>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, tok: &Token, message: impl Into<String>) -> Error {
        syntax_error(self.text, tok.offset, message)
    }

    fn describe(tok: &Tok) -> String {
        match tok {
            Tok::Num(n) => format!("number {n}"),
            Tok::Ident(s) => format!("identifier {s}"),
            Tok::Sym(c) => format!("'{c}'"),
            Tok::End => "end of input".to_string(),
        }
    }

    fn expect_sym(&mut self, c: char) -> Result<()> {
        let t = self.next();
        if t.tok == Tok::Sym(c) {
            Ok(())
        } else {
            Err(self.err(&t, format!("expected '{c}', found {}", Self::describe(&t.tok))))
        }
    }

    fn expect_int(&mut self) -> Result<u32> {
        let t = self.next();
        match &t.tok {
            Tok::Num(n) if n.bytes().all(|b| b.is_ascii_digit()) => n
                .parse()
                .map_err(|_| self.err(&t, format!("integer {n} out of range"))),
            other => Err(self.err(&t, format!("expected an integer, found {}", Self::describe(other)))),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut acc = self.term()?;
        loop {
            match self.peek().tok {
                Tok::Sym(c @ ('+' | '-')) => {
                    self.next();
                    let rhs = self.term()?;
                    acc = mk_bin(c, acc, rhs);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.factor()?;
        loop {
            match self.peek().tok {
                Tok::Sym(c @ ('*' | '/')) => {
                    let op = self.next();
                    let rhs = self.factor()?;
                    if c == '/' {
                        match rhs.constant() {
                            None => {
                                return Err(self.err(&op, "division is only allowed by constants"))
                            }
                            Some(d) if d.is_zero() => {
                                return Err(self.err(&op, "division by zero"))
                            }
                            _ => {}
                        }
                    }
                    acc = mk_bin(c, acc, rhs);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        match self.peek().tok {
            Tok::Sym('-') => {
                self.next();
                Ok(mk_neg(self.factor()?))
            }
            Tok::Sym('+') => {
                self.next();
                self.factor()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek().tok == Tok::Sym('^') {
            self.next();
            let e = self.expect_int()?;
            return Ok(mk_pow(base, e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let t = self.next();
        match &t.tok {
            Tok::Num(n) => {
                let q = parse_rational(n).map_err(|_| self.err(&t, format!("malformed number {n}")))?;
                Ok(Expr::Const(Complex::new(q, BigRational::zero())))
            }
            Tok::Ident(id) => match id.as_str() {
                "i" => Ok(Expr::Const(Complex::new(BigRational::zero(), BigRational::one()))),
                "x" => Ok(Expr::X),
                "y" => Ok(Expr::Delta(0)),
                "delta" => {
                    self.expect_sym('(')?;
                    let y = self.next();
                    if y.tok != Tok::Ident("y".into()) {
                        return Err(self.err(&y, format!("expected y, found {}", Self::describe(&y.tok))));
                    }
                    self.expect_sym(',')?;
                    let j = self.expect_int()?;
                    self.expect_sym(')')?;
                    Ok(Expr::Delta(j as usize))
                }
                _ => Ok(Expr::Coeff(id.clone())),
            },
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect_sym(')')?;
                Ok(e)
            }
            other => Err(self.err(&t, format!("expected an operand, found {}", Self::describe(other)))),
        }
    }
}

/// Parses an expression occupying `text[start..]`. Error positions are
/// reported relative to the whole of `text`.
pub fn parse_expr_at(text: &str, start: usize) -> Result<Expr> {
    let toks = tokenize(text, start)?;
    let mut p = Parser { text, toks, pos: 0 };
    let e = p.expr()?;
    let t = p.peek().clone();
    if t.tok != Tok::End {
        return Err(p.err(&t, format!("unexpected {}", Parser::describe(&t.tok))));
    }
    Ok(e)
}

pub fn parse_expr(text: &str) -> Result<Expr> {
    parse_expr_at(text, 0)
}

fn fmt_rational(q: &BigRational) -> String {
    q.to_string()
}

fn fmt_const(c: &GaussianRational) -> String {
    if is_plain_natural(c) {
        return c.re.to_string();
    }
    let re = fmt_rational(&c.re);
    let im_abs = fmt_rational(&c.im.abs());
    if c.im.is_zero() {
        format!("({re})")
    } else if c.re.is_zero() {
        let sign = if c.im.is_negative() { "-" } else { "" };
        format!("({sign}{im_abs}*i)")
    } else {
        let sign = if c.im.is_negative() { '-' } else { '+' };
        format!("({re}{sign}{im_abs}*i)")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn wrap(e: &Expr, parens: bool, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            if parens {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        }
        let p = self.precedence();
        match self {
            Expr::Const(c) => write!(f, "{}", fmt_const(c)),
            Expr::X => write!(f, "x"),
            Expr::Delta(0) => write!(f, "y"),
            Expr::Delta(j) => write!(f, "delta(y,{j})"),
            Expr::Coeff(n) => write!(f, "{n}"),
            Expr::Neg(a) => {
                write!(f, "-")?;
                wrap(a, a.precedence() < p, f)
            }
            Expr::Pow(a, e) => {
                wrap(a, a.precedence() < 5, f)?;
                write!(f, "^{e}")
            }
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                let op = match self {
                    Expr::Add(..) => " + ",
                    Expr::Sub(..) => " - ",
                    Expr::Mul(..) => "*",
                    _ => "/",
                };
                wrap(a, a.precedence() < p, f)?;
                write!(f, "{op}")?;
                wrap(b, b.precedence() <= p, f)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: i64, im: i64) -> Expr {
        Expr::Const(Complex::new(BigRational::from_integer(re.into()), BigRational::from_integer(im.into())))
    }

    #[test]
    fn riccati_tree() {
        let e = parse_expr("delta(y,1) - (1-i)*(y^2 - y)").unwrap();
        let expected = Expr::Sub(
            Box::new(Expr::Delta(1)),
            Box::new(Expr::Mul(
                Box::new(c(1, -1)),
                Box::new(Expr::Sub(
                    Box::new(Expr::Pow(Box::new(Expr::Delta(0)), 2)),
                    Box::new(Expr::Delta(0)),
                )),
            )),
        );
        assert_eq!(e, expected);
        assert_eq!(e.max_delta(), Some(1));
        assert_eq!(e.y_degree(), 2);
    }

    #[test]
    fn truncated_delta_reports_offset() {
        match parse_expr("delta(y,") {
            Err(Error::Syntax { offset, line, column, .. }) => {
                assert_eq!((offset, line, column), (8, 1, 9));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn errors_carry_line_and_column() {
        match parse_expr("y +\n  * 2") {
            Err(Error::Syntax { offset, line, column, .. }) => {
                assert_eq!((offset, line, column), (6, 2, 3));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_expr("y / y").is_err());
        assert!(parse_expr("y / (1 - 1)").is_err());
        assert!(parse_expr("y ^ -1").is_err());
        assert!(parse_expr("y $ 2").is_err());
        assert!(parse_expr("(y").is_err());
    }

    #[test]
    fn constants_fold() {
        assert_eq!(parse_expr("(1 - i)*(1 + i)").unwrap(), c(2, 0));
        assert_eq!(parse_expr("-3/6").unwrap().constant().unwrap().re.to_string(), "-1/2");
        assert_eq!(parse_expr("0.25*4").unwrap(), c(1, 0));
    }

    #[test]
    fn printing_round_trips() {
        for src in [
            "delta(y,1) - (1-i)*(y^2 - y)",
            "delta(y,1) - i*y",
            "y*delta(y,2) - delta(y,1)^2 - x*(y^3 - y) - x^2*y^4 + x^2",
            "-y^2 - -(x - y)*(-x)",
            "a*y - (y - (x - y)) / (3/2 - 2*i)",
            "(-y)^3 + (x*y)^2 - x - (-1/2)*y",
        ] {
            let e = parse_expr(src).unwrap();
            let printed = e.to_string();
            let again = parse_expr(&printed).unwrap();
            assert_eq!(again, e, "{src} -> {printed}");
        }
    }
}

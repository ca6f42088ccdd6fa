//! Closed-form expressions over `x1..x9`, `eps` and `pi`.
//!
//! Grammar (whitespace is ignored):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' '-'? integer)?
//! atom   := number | 'x'digit | 'eps' | 'pi' | func '(' expr ')' | '(' expr ')'
//! func   := 'sin' | 'cos' | 'exp' | 'log' | 'bump'
//! ```
//!
//! `bump(t) = exp(−1/(1 − t²))` for `|t| < 1` and `0` otherwise; `log` is the
//! natural logarithm. Expressions evaluate exactly on jets and differentiate
//! symbolically, so the two derivative paths can be compared.

use crate::error::{Error, Result};
use crate::jet::{bump_series, Jet, MAX_VARS};
use crate::net::{EpsilonGrid, NetFunction};
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

/// Derivative order available on nets compiled from expressions.
pub const EXPR_MAX_ORDER: usize = 4;

/// Unary functions of the vocabulary. `Profile(k)` is the `k`-th derivative of
/// `g(s) = exp(−1/(1 − s))` (zero for `s ≥ 1`); `bump(t)` is `g(t²)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Profile(u32),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    /// 0-based coordinate index.
    Var(usize),
    Eps,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(Func, Box<Expr>),
}

fn num(v: f64) -> Expr {
    Expr::Num(v)
}

fn add(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Num(x), Expr::Num(y)) => num(x + y),
        (Expr::Num(z), e) | (e, Expr::Num(z)) if z == 0.0 => e,
        (a, b) => Expr::Add(Box::new(a), Box::new(b)),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Num(x), Expr::Num(y)) => num(x - y),
        (e, Expr::Num(z)) if z == 0.0 => e,
        (Expr::Num(z), e) if z == 0.0 => neg(e),
        (a, b) => Expr::Sub(Box::new(a), Box::new(b)),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Num(x), Expr::Num(y)) => num(x * y),
        (Expr::Num(z), _) | (_, Expr::Num(z)) if z == 0.0 => num(0.0),
        (Expr::Num(o), e) | (e, Expr::Num(o)) if o == 1.0 => e,
        (a, b) => Expr::Mul(Box::new(a), Box::new(b)),
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Num(z), _) if z == 0.0 => num(0.0),
        (e, Expr::Num(o)) if o == 1.0 => e,
        (a, b) => Expr::Div(Box::new(a), Box::new(b)),
    }
}

fn neg(a: Expr) -> Expr {
    match a {
        Expr::Num(x) => num(-x),
        Expr::Neg(e) => *e,
        e => Expr::Neg(Box::new(e)),
    }
}

fn pow(a: Expr, p: i32) -> Expr {
    match (a, p) {
        (_, 0) => num(1.0),
        (e, 1) => e,
        (Expr::Num(x), p) => num(x.powi(p)),
        (e, p) => Expr::Pow(Box::new(e), p),
    }
}

fn call(f: Func, a: Expr) -> Expr {
    Expr::Call(f, Box::new(a))
}

/// `k`-th derivative of `g(s) = exp(−1/(1 − s))` at `s`.
fn profile_derivative(s: f64, k: usize) -> f64 {
    let c = bump_series(s, k + 1)[k];
    (1..=k).fold(c, |acc, j| acc * j as f64)
}

impl Expr {
    /// Number of coordinates the expression needs (highest index used + 1).
    pub fn arity(&self) -> usize {
        match self {
            Expr::Num(_) | Expr::Eps => 0,
            Expr::Var(i) => i + 1,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.arity(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => a.arity().max(b.arity()),
        }
    }

    /// `true` if the expression depends on `eps`.
    pub fn uses_eps(&self) -> bool {
        match self {
            Expr::Eps => true,
            Expr::Num(_) | Expr::Var(_) => false,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.uses_eps(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => a.uses_eps() || b.uses_eps(),
        }
    }

    /// Plain floating-point evaluation.
    pub fn eval(&self, eps: f64, x: &[f64]) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Var(i) => x[*i],
            Expr::Eps => eps,
            Expr::Neg(a) => -a.eval(eps, x),
            Expr::Add(a, b) => a.eval(eps, x) + b.eval(eps, x),
            Expr::Sub(a, b) => a.eval(eps, x) - b.eval(eps, x),
            Expr::Mul(a, b) => a.eval(eps, x) * b.eval(eps, x),
            Expr::Div(a, b) => a.eval(eps, x) / b.eval(eps, x),
            Expr::Pow(a, p) => a.eval(eps, x).powi(*p),
            Expr::Call(f, a) => {
                let v = a.eval(eps, x);
                match f {
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Exp => v.exp(),
                    Func::Log => v.ln(),
                    Func::Profile(k) => profile_derivative(v, *k as usize),
                }
            }
        }
    }

    /// Exact Taylor evaluation on jets (all of the same shape).
    pub fn eval_jet(&self, eps: f64, x: &[Jet]) -> Jet {
        match self {
            Expr::Num(v) => x[0].lift(*v),
            Expr::Var(i) => x[*i].clone(),
            Expr::Eps => x[0].lift(eps),
            Expr::Neg(a) => -a.eval_jet(eps, x),
            Expr::Add(a, b) => &a.eval_jet(eps, x) + &b.eval_jet(eps, x),
            Expr::Sub(a, b) => &a.eval_jet(eps, x) - &b.eval_jet(eps, x),
            Expr::Mul(a, b) => match (a.as_ref(), b.as_ref()) {
                (Expr::Num(c), e) | (e, Expr::Num(c)) => e.eval_jet(eps, x).scale_by(*c),
                _ => &a.eval_jet(eps, x) * &b.eval_jet(eps, x),
            },
            Expr::Div(a, b) => a.eval_jet(eps, x).div(&b.eval_jet(eps, x)),
            Expr::Pow(a, p) => {
                let base = a.eval_jet(eps, x);
                let m = base.powi(p.unsigned_abs());
                if *p < 0 {
                    m.recip()
                } else {
                    m
                }
            }
            Expr::Call(f, a) => {
                let v = a.eval_jet(eps, x);
                match f {
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Exp => v.exp(),
                    Func::Log => v.ln(),
                    Func::Profile(0) => v.bump(),
                    Func::Profile(k) => {
                        let k = *k as usize;
                        let n = v.order() + 2;
                        let base = bump_series(v.value(), k + n);
                        // Taylor coefficients of g^(k) at v₀: b_j = g^(k+j)(v₀)/j!
                        let series: Vec<f64> = (0..n)
                            .map(|j| (j + 1..=j + k).fold(base[k + j], |acc, m| acc * m as f64))
                            .collect();
                        v.apply_series(&series)
                    }
                }
            }
        }
    }

    /// Symbolic derivative with respect to coordinate `var` (0-based).
    pub fn diff(&self, var: usize) -> Expr {
        match self {
            Expr::Num(_) | Expr::Eps => num(0.0),
            Expr::Var(i) => num(if *i == var { 1.0 } else { 0.0 }),
            Expr::Neg(a) => neg(a.diff(var)),
            Expr::Add(a, b) => add(a.diff(var), b.diff(var)),
            Expr::Sub(a, b) => sub(a.diff(var), b.diff(var)),
            Expr::Mul(a, b) => add(
                mul(a.diff(var), (**b).clone()),
                mul((**a).clone(), b.diff(var)),
            ),
            Expr::Div(a, b) => div(
                sub(
                    mul(a.diff(var), (**b).clone()),
                    mul((**a).clone(), b.diff(var)),
                ),
                pow((**b).clone(), 2),
            ),
            Expr::Pow(a, p) => mul(
                mul(num(*p as f64), pow((**a).clone(), p - 1)),
                a.diff(var),
            ),
            Expr::Call(f, a) => {
                let inner = (**a).clone();
                let outer = match f {
                    Func::Sin => call(Func::Cos, inner),
                    Func::Cos => neg(call(Func::Sin, inner)),
                    Func::Exp => call(Func::Exp, inner),
                    Func::Log => div(num(1.0), inner),
                    Func::Profile(k) => call(Func::Profile(k + 1), inner),
                };
                mul(outer, a.diff(var))
            }
        }
    }

    /// Symbolic mixed partial `∂^alpha`.
    pub fn partial(&self, alpha: &[usize]) -> Expr {
        let mut e = self.clone();
        for (var, &k) in alpha.iter().enumerate() {
            for _ in 0..k {
                e = e.diff(var);
            }
        }
        e
    }
}

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => 1,
        Expr::Mul(..) | Expr::Div(..) => 2,
        Expr::Neg(_) => 3,
        Expr::Pow(..) => 4,
        _ => 5,
    }
}

struct Wrapped<'a>(&'a Expr, u8);

impl fmt::Display for Wrapped<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if precedence(self.0) < self.1 {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) if *v == PI => write!(f, "pi"),
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var(i) => write!(f, "x{}", i + 1),
            Expr::Eps => write!(f, "eps"),
            Expr::Neg(a) => write!(f, "-{}", Wrapped(a, 4)),
            Expr::Add(a, b) => write!(f, "{} + {}", Wrapped(a, 1), Wrapped(b, 2)),
            Expr::Sub(a, b) => write!(f, "{} - {}", Wrapped(a, 1), Wrapped(b, 2)),
            Expr::Mul(a, b) => write!(f, "{} * {}", Wrapped(a, 2), Wrapped(b, 3)),
            Expr::Div(a, b) => write!(f, "{} / {}", Wrapped(a, 2), Wrapped(b, 3)),
            Expr::Pow(a, p) => write!(f, "{}^{p}", Wrapped(a, 5)),
            Expr::Call(Func::Profile(0), a) => match a.as_ref() {
                Expr::Pow(t, 2) => write!(f, "bump({t})"),
                a => write!(f, "bump_profile({a})"),
            },
            Expr::Call(func, a) => {
                let name = match func {
                    Func::Sin => "sin".to_string(),
                    Func::Cos => "cos".to_string(),
                    Func::Exp => "exp".to_string(),
                    Func::Log => "log".to_string(),
                    Func::Profile(k) => format!("bump_profile_d{k}"),
                };
                write!(f, "{name}({a})")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Op(char),
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let s: String = chars[start..i].iter().collect();
            let v = s.parse::<f64>().map_err(|_| Error::Parse {
                position: start,
                message: format!("malformed number `{s}`"),
            })?;
            out.push((start, Token::Num(v)));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((start, Token::Ident(chars[start..i].iter().collect())));
        } else if "+-*/^()".contains(c) {
            out.push((i, Token::Op(c)));
            i += 1;
        } else {
            return Err(Error::Parse {
                position: i,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|t| &t.1)
    }

    fn position(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |t| t.0)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            position: self.position(),
            message: message.into(),
        })
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Token::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, op: char) -> Result<()> {
        if self.eat(op) {
            Ok(())
        } else {
            self.error(format!("expected `{op}`"))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            Ok(Expr::Neg(Box::new(self.unary()?)))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let negative = self.eat('-');
        match self.peek() {
            Some(&Token::Num(v)) if v.fract() == 0.0 && v <= i32::MAX as f64 => {
                self.pos += 1;
                let p = v as i32;
                Ok(Expr::Pow(Box::new(base), if negative { -p } else { p }))
            }
            _ => self.error("exponent must be an integer literal"),
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        let start = self.position();
        match self.peek().cloned() {
            Some(Token::Num(v)) => {
                self.pos += 1;
                Ok(Expr::Num(v))
            }
            Some(Token::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                if self.eat('(') {
                    let func = match name.as_str() {
                        "sin" => Func::Sin,
                        "cos" => Func::Cos,
                        "exp" => Func::Exp,
                        "log" => Func::Log,
                        "bump" => Func::Profile(0),
                        _ => return Err(Error::UnknownSymbol(format!("{name} (at position {start})"))),
                    };
                    let arg = self.expr()?;
                    self.expect(')')?;
                    return Ok(match func {
                        Func::Profile(_) => call(func, Expr::Pow(Box::new(arg), 2)),
                        f => call(f, arg),
                    });
                }
                match name.as_str() {
                    "eps" => Ok(Expr::Eps),
                    "pi" => Ok(Expr::Num(PI)),
                    _ => match name.strip_prefix('x').and_then(|d| d.parse::<usize>().ok()) {
                        Some(k) if (1..=9).contains(&k) && name.len() == 2 => Ok(Expr::Var(k - 1)),
                        _ => Err(Error::UnknownSymbol(format!("{name} (at position {start})"))),
                    },
                }
            }
            Some(Token::Op(c)) => self.error(format!("unexpected `{c}`")),
            None => self.error("unexpected end of expression"),
        }
    }
}

/// Parse an expression; positions in errors are 0-based character offsets.
pub fn parse_expr(text: &str) -> Result<Expr> {
    let tokens = tokenize(text)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        end: text.chars().count(),
    };
    let e = p.expr()?;
    if p.pos != p.tokens.len() {
        return p.error("unexpected trailing input");
    }
    Ok(e)
}

/// Net `ε ↦ (x ↦ expr(ε, x))` on `R^dim`.
pub fn compile(expr: &Expr, grid: &EpsilonGrid, dim: usize) -> Result<NetFunction> {
    if dim == 0 || dim > MAX_VARS {
        return Err(Error::Capability(format!("expressions support dimensions 1..={MAX_VARS}")));
    }
    if expr.arity() > dim {
        return Err(Error::Config(format!(
            "expression uses x{} but the net lives on R^{dim}",
            expr.arity()
        )));
    }
    let e = Arc::new(expr.clone());
    Ok(NetFunction::closed_form(grid, dim, EXPR_MAX_ORDER, move |eps, x| e.eval_jet(eps, x)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs()))
    }

    #[test]
    fn precedence_and_associativity() {
        let e = parse_expr("1 - 2 - 3 * 4 ^ 2 / 8").unwrap();
        assert_eq!(e.eval(0.1, &[]), 1.0 - 2.0 - 3.0 * 16.0 / 8.0);
        assert_eq!(parse_expr("-x1^2").unwrap().eval(0.0, &[3.0]), -9.0);
        assert_eq!(parse_expr("x1^-2").unwrap().eval(0.0, &[2.0]), 0.25);
        assert_eq!(parse_expr("2*eps + pi").unwrap().eval(0.25, &[]), 0.5 + PI);
        assert_eq!(parse_expr("1.5e-1*x2").unwrap().eval(0.0, &[0.0, 2.0]), 0.3);
    }

    #[test]
    fn norm_square_partial() {
        let e = parse_expr("x1^2 + x2^2").unwrap();
        let d = e.diff(0);
        for x in [[0.3, -1.2], [2.0, 5.0]] {
            assert_eq!(d.eval(0.1, &x), 2.0 * x[0]);
        }
    }

    #[test]
    fn errors_are_typed() {
        assert!(matches!(parse_expr("gamma(x1)"), Err(Error::UnknownSymbol(s)) if s.starts_with("gamma")));
        assert!(matches!(parse_expr("y + 1"), Err(Error::UnknownSymbol(_))));
        assert!(matches!(parse_expr("x1 + "), Err(Error::Parse { position: 5, .. })));
        assert!(matches!(parse_expr("x1 $ 2"), Err(Error::Parse { position: 3, .. })));
        assert!(matches!(parse_expr("x1^0.5"), Err(Error::Parse { .. })));
        assert!(matches!(parse_expr("(x1"), Err(Error::Parse { .. })));
        assert!(matches!(parse_expr("x1 x2"), Err(Error::Parse { position: 3, .. })));
    }

    #[test]
    fn jets_agree_with_symbolic_partials() {
        let sources = [
            "x1^2 + x2^2",
            "sin(x1) * exp(-x2) / (2 + cos(x1*x2))",
            "log(1 + x1^2) - x2^-1",
            "eps^-2 * bump((x1 - 0.2)/eps) * bump(x2/eps)",
            "bump(x1) * x2^3",
        ];
        let eps = 0.5;
        for src in sources {
            let e = parse_expr(src).unwrap();
            for x in [[0.13, 0.41], [-0.3, 0.7]] {
                let jet = e.eval_jet(eps, &Jet::seed(&x, 2));
                for alpha in [[0, 0], [1, 0], [0, 1], [2, 0], [1, 1], [0, 2]] {
                    let sym = e.partial(&alpha).eval(eps, &x);
                    let ad = jet.partial(&alpha).unwrap();
                    assert!(close(sym, ad), "{src} {alpha:?} at {x:?}: {sym} vs {ad}");
                }
            }
        }
    }

    #[test]
    fn display_round_trips() {
        for src in ["x1^2 + x2^2", "-(x1 - x2) * sin(eps * x1)", "bump(x1 / eps) / eps", "x1 - (x2 - 1)"] {
            let e = parse_expr(src).unwrap();
            let again = parse_expr(&e.to_string()).unwrap();
            for x in [[0.01, 0.2], [0.4, -0.3]] {
                assert_eq!(e.eval(0.5, &x), again.eval(0.5, &x), "{src} -> {e}");
            }
        }
    }

    #[test]
    fn compile_checks_dimension() {
        let g = EpsilonGrid::default();
        let e = parse_expr("x3 + eps").unwrap();
        assert!(matches!(compile(&e, &g, 2), Err(Error::Config(_))));
        let u = compile(&e, &g, 3).unwrap();
        assert_eq!(u.eval(0.0625, &[0.0, 0.0, 1.0]).unwrap(), 1.0625);
    }
}

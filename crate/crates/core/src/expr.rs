//! Parser and canonical printer for the expression language used by scenario files.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := wedge (('*' | '/') wedge)*
//! wedge  := unary ('^' unary)*
//! unary  := '-' unary | factor
//! factor := number | trig | 'd'<i> | 'dt'<i> | 't' | 'I' | '(' expr ')'
//! trig   := ('sin' | 'cos') '(' intLin ')'
//! intLin := ['-'] lin (('+' | '-') lin)*      lin := [int '*'] 't'<i>
//! ```
//!
//! Coordinates are `t1..tn`, coordinate vector fields `d1..dn`, coordinate 1-forms
//! `dt1..dtn`, and the bare symbol `t` is the deformation parameter of paths.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::multivector::{Blade, Ext, ExtKind, FormKind, VectorKind};
use crate::trigring::{Gauss, Q, TorusFunction, TrigPoly};

/// Kind of value an expression is elaborated to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExprKind {
    Function,
    Multivector,
    Form,
    Path,
}

/// Elaborated value of an expression.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Function(TorusFunction),
    Multivector(crate::multivector::Multivector),
    Form(crate::multivector::DifferentialForm),
    /// Coefficients of `t^0, t^1, ...`.
    Path(Vec<crate::multivector::Multivector>),
}

/// Abstract syntax tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Num(Q),
    Imag,
    Trig { sine: bool, freq: Vec<(usize, i64)>, pos: (usize, usize) },
    Vector(usize, (usize, usize)),
    Covector(usize, (usize, usize)),
    Param,
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>, (usize, usize)),
}

/// Binary operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Wedge,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Num(Q),
    Ident(String),
    Sym(char),
    End,
}

struct Lexer {
    toks: Vec<(Tok, usize, usize)>,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::SyntaxError { line, column, message: message.into() }
}

impl Lexer {
    fn new(src: &str) -> Result<Self> {
        let chars: Vec<char> = src.chars().collect();
        let mut toks = vec![];
        let (mut line, mut col) = (1, 1);
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if c == '\n' {
                line += 1;
                col = 1;
                i += 1;
                continue;
            }
            if c.is_whitespace() {
                i += 1;
                col += 1;
                continue;
            }
            let start = (line, col);
            if c.is_ascii_digit() {
                let mut s = String::new();
                while i < chars.len() && chars[i].is_ascii_digit() {
                    s.push(chars[i]);
                    i += 1;
                    col += 1;
                }
                let mut val = Q::from_integer(s.parse::<BigInt>().unwrap());
                if i < chars.len() && chars[i] == '.' {
                    i += 1;
                    col += 1;
                    let mut frac = String::new();
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        frac.push(chars[i]);
                        i += 1;
                        col += 1;
                    }
                    if frac.is_empty() {
                        return Err(syntax(line, col, "expected digits after decimal point"));
                    }
                    let den = BigInt::from(10).pow(frac.len() as u32);
                    val += Q::new(frac.parse::<BigInt>().unwrap(), den);
                }
                toks.push((Tok::Num(val), start.0, start.1));
            } else if c.is_ascii_alphabetic() {
                let mut s = String::new();
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    s.push(chars[i]);
                    i += 1;
                    col += 1;
                }
                toks.push((Tok::Ident(s), start.0, start.1));
            } else if "+-*/^(),".contains(c) {
                toks.push((Tok::Sym(c), start.0, start.1));
                i += 1;
                col += 1;
            } else {
                return Err(syntax(line, col, format!("unexpected character '{c}'")));
            }
        }
        toks.push((Tok::End, line, col));
        Ok(Lexer { toks })
    }
}

const MAX_DEPTH: usize = 200;

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    dim: usize,
    depth: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }
    fn here(&self) -> (usize, usize) {
        (self.toks[self.pos].1, self.toks[self.pos].2)
    }
    fn err(&self, msg: impl Into<String>) -> Error {
        let (l, c) = self.here();
        syntax(l, c, msg)
    }
    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }
    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }
    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected '{c}'")))
        }
    }
    fn enter(&mut self) -> Result<()> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(self.err("expression nested too deeply"));
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Expr> {
        self.enter()?;
        let mut lhs = self.term()?;
        loop {
            let at = self.here();
            let op = if self.eat('+') {
                BinOp::Add
            } else if self.eat('-') {
                BinOp::Sub
            } else {
                break;
            };
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs), at);
        }
        self.depth -= 1;
        Ok(lhs)
    }
    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.wedge()?;
        loop {
            let at = self.here();
            let op = if self.eat('*') {
                BinOp::Mul
            } else if self.eat('/') {
                BinOp::Div
            } else {
                break;
            };
            let rhs = self.wedge()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs), at);
        }
        Ok(lhs)
    }
    fn wedge(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let at = self.here();
            if !self.eat('^') {
                break;
            }
            let rhs = self.unary()?;
            lhs = Expr::Bin(BinOp::Wedge, Box::new(lhs), Box::new(rhs), at);
        }
        Ok(lhs)
    }
    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            self.enter()?;
            let inner = self.unary()?;
            self.depth -= 1;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        self.factor()
    }
    fn index(&self, s: &str, at: (usize, usize)) -> Result<usize> {
        let i: usize = s
            .parse()
            .map_err(|_| syntax(at.0, at.1, format!("invalid index '{s}'")))?;
        if i == 0 || i > self.dim {
            return Err(Error::IndexOutOfRange { index: i, dim: self.dim });
        }
        Ok(i - 1)
    }
    fn factor(&mut self) -> Result<Expr> {
        let at = self.here();
        match self.bump() {
            Tok::Num(v) => Ok(Expr::Num(v)),
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if name == "sin" || name == "cos" {
                    self.expect('(')?;
                    let freq = self.int_lin()?;
                    self.expect(')')?;
                    return Ok(Expr::Trig { sine: name == "sin", freq, pos: at });
                }
                if name == "t" {
                    return Ok(Expr::Param);
                }
                if name == "I" {
                    return Ok(Expr::Imag);
                }
                let digits = |p: &str| name.strip_prefix(p).filter(|r| !r.is_empty() && r.chars().all(|c| c.is_ascii_digit()));
                if let Some(r) = digits("dt") {
                    return Ok(Expr::Covector(self.index(r, at)?, at));
                }
                if let Some(r) = digits("d") {
                    return Ok(Expr::Vector(self.index(r, at)?, at));
                }
                if digits("t").is_some() {
                    return Err(syntax(at.0, at.1, format!("coordinate '{name}' may only appear inside sin or cos")));
                }
                Err(syntax(at.0, at.1, format!("unknown identifier '{name}'")))
            }
            Tok::End => Err(syntax(at.0, at.1, "unexpected end of input")),
            Tok::Sym(c) => Err(syntax(at.0, at.1, format!("unexpected '{c}'"))),
        }
    }
    fn int_lin(&mut self) -> Result<Vec<(usize, i64)>> {
        let mut out = vec![];
        let mut sign = 1i64;
        if self.eat('-') {
            sign = -1;
        } else {
            self.eat('+');
        }
        loop {
            let at = self.here();
            let mut coef = 1i64;
            if let Tok::Num(v) = self.peek().clone() {
                if !v.is_integer() {
                    return Err(syntax(at.0, at.1, "frequency coefficients must be integers"));
                }
                coef = i64::try_from(v.to_integer())
                    .ok()
                    .filter(|c| c.abs() <= 1 << 20)
                    .ok_or_else(|| syntax(at.0, at.1, "frequency coefficient too large"))?;
                self.bump();
                if *self.peek() == Tok::Sym('/') {
                    return Err(syntax(at.0, at.1, "frequency coefficients must be integers"));
                }
                self.expect('*')?;
            }
            let at = self.here();
            match self.bump() {
                Tok::Ident(name) if name.len() > 1 && name.starts_with('t') && name[1..].chars().all(|c| c.is_ascii_digit()) => {
                    let i = self.index(&name[1..], at)?;
                    out.push((i, sign * coef));
                }
                _ => return Err(syntax(at.0, at.1, "expected a coordinate t<i>")),
            }
            if self.eat('+') {
                sign = 1;
            } else if self.eat('-') {
                sign = -1;
            } else {
                break;
            }
        }
        Ok(out)
    }
}

/// Parses source text into an expression tree over `T^dim`.
pub fn parse_expr(src: &str, dim: usize) -> Result<Expr> {
    let lx = Lexer::new(src)?;
    let mut p = Parser { toks: lx.toks, pos: 0, dim, depth: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

/// Polynomial in the path parameter `t` with exterior-algebra coefficients.
type TPoly<K> = BTreeMap<u32, Ext<K>>;

struct Elab {
    dim: usize,
    kind: ExprKind,
}

fn tp_add<K: ExtKind>(a: &TPoly<K>, b: &TPoly<K>, dim: usize, sign: i64) -> TPoly<K> {
    let mut out = a.clone();
    for (k, v) in b {
        let e = out.entry(*k).or_insert_with(|| Ext::zero(dim));
        *e = &*e + &v.scale(&Gauss::from_int(sign));
    }
    out.retain(|_, v| !v.is_zero());
    out
}

fn tp_mul<K: ExtKind>(a: &TPoly<K>, b: &TPoly<K>, dim: usize) -> TPoly<K> {
    let mut out: TPoly<K> = BTreeMap::new();
    for (i, x) in a {
        for (j, y) in b {
            let e = out.entry(i + j).or_insert_with(|| Ext::zero(dim));
            *e = &*e + &x.wedge(y);
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

fn scalar_tpoly<K: ExtKind>(f: TorusFunction) -> TPoly<K> {
    let mut m = BTreeMap::new();
    if !f.is_zero() {
        m.insert(0, Ext::scalar(f));
    }
    m
}

impl Elab {
    fn run<K: ExtKind>(&self, e: &Expr, allow_gen: bool) -> Result<TPoly<K>> {
        let n = self.dim;
        Ok(match e {
            Expr::Num(v) => scalar_tpoly(TorusFunction::rational(n, v.clone())),
            Expr::Imag => scalar_tpoly(TorusFunction::constant(n, Gauss::i())),
            Expr::Trig { sine, freq, .. } => {
                let mut k = vec![0i32; n];
                for (i, c) in freq {
                    k[*i] += *c as i32;
                }
                let p = if *sine { TrigPoly::sin(k) } else { TrigPoly::cos(k) };
                scalar_tpoly(TorusFunction::from_poly(p))
            }
            Expr::Vector(i, pos) | Expr::Covector(i, pos) => {
                let is_vec = matches!(e, Expr::Vector(..));
                let want = if is_vec { ExprKind::Multivector } else { ExprKind::Form };
                let ok = allow_gen
                    && (self.kind == want || (self.kind == ExprKind::Path && is_vec));
                if !ok {
                    let what = if is_vec { "vector field" } else { "1-form" };
                    return Err(syntax(pos.0, pos.1, format!("{what} symbol not allowed in a {:?} expression", self.kind)));
                }
                let mut m = BTreeMap::new();
                m.insert(0, Ext::generator(n, *i));
                m
            }
            Expr::Param => {
                if self.kind != ExprKind::Path {
                    return Err(Error::KindError("the path parameter t is only allowed in path expressions".into()));
                }
                let mut m = BTreeMap::new();
                m.insert(1, Ext::scalar(TorusFunction::one(n)));
                m
            }
            Expr::Neg(inner) => tp_add(&BTreeMap::new(), &self.run::<K>(inner, allow_gen)?, n, -1),
            Expr::Bin(op, a, b, pos) => {
                let x = self.run::<K>(a, allow_gen)?;
                match op {
                    BinOp::Add => tp_add(&x, &self.run::<K>(b, allow_gen)?, n, 1),
                    BinOp::Sub => tp_add(&x, &self.run::<K>(b, allow_gen)?, n, -1),
                    BinOp::Mul | BinOp::Wedge => tp_mul(&x, &self.run::<K>(b, allow_gen)?, n),
                    BinOp::Div => {
                        // A product divisor is inverted factor by factor, so each factor
                        // is certified separately.
                        let mut x = x;
                        for factor in product_factors(b) {
                            let y = self.run::<K>(factor, false).map_err(|err| match err {
                                Error::SyntaxError { .. } => syntax(pos.0, pos.1, "divisor must be a function"),
                                other => other,
                            })?;
                            let d = match y.len() {
                                0 => return Err(Error::DivisionUncertified("0".into())),
                                1 if y.contains_key(&0) => y[&0].coeff(Blade::empty()),
                                _ => return Err(syntax(pos.0, pos.1, "divisor must not depend on t")),
                            };
                            let inv = d.recip()?;
                            x = x.into_iter().map(|(k, v)| (k, v.mul_fn(&inv))).collect();
                        }
                        x
                    }
                }
            }
        })
    }
}

/// The operands of a chain of `*` nodes, left to right.
fn product_factors(e: &Expr) -> Vec<&Expr> {
    match e {
        Expr::Bin(BinOp::Mul, l, r, _) => {
            let mut out = product_factors(l);
            out.extend(product_factors(r));
            out
        }
        other => vec![other],
    }
}

/// Parses and elaborates `src` as a value of the requested kind on `T^dim`.
pub fn parse(kind: ExprKind, src: &str, dim: usize) -> Result<Value> {
    let e = parse_expr(src, dim)?;
    elaborate(kind, &e, dim)
}

/// Elaborates a parsed tree.
pub fn elaborate(kind: ExprKind, e: &Expr, dim: usize) -> Result<Value> {
    let el = Elab { dim, kind };
    match kind {
        ExprKind::Form => {
            let p = el.run::<FormKind>(e, true)?;
            Ok(Value::Form(p.get(&0).cloned().unwrap_or_else(|| Ext::zero(dim))))
        }
        ExprKind::Function => {
            let p = el.run::<VectorKind>(e, false)?;
            Ok(Value::Function(p.get(&0).map(|v| v.coeff(Blade::empty())).unwrap_or_else(|| TorusFunction::zero(dim))))
        }
        ExprKind::Multivector => {
            let p = el.run::<VectorKind>(e, true)?;
            Ok(Value::Multivector(p.get(&0).cloned().unwrap_or_else(|| Ext::zero(dim))))
        }
        ExprKind::Path => {
            let p = el.run::<VectorKind>(e, true)?;
            let top = p.keys().next_back().copied().unwrap_or(0);
            Ok(Value::Path((0..=top).map(|k| p.get(&k).cloned().unwrap_or_else(|| Ext::zero(dim))).collect()))
        }
    }
}

/// Parses a function expression.
pub fn parse_function(src: &str, dim: usize) -> Result<TorusFunction> {
    match parse(ExprKind::Function, src, dim)? {
        Value::Function(f) => Ok(f),
        _ => unreachable!(),
    }
}

/// Parses a multivector expression.
pub fn parse_multivector(src: &str, dim: usize) -> Result<crate::multivector::Multivector> {
    match parse(ExprKind::Multivector, src, dim)? {
        Value::Multivector(m) => Ok(m),
        _ => unreachable!(),
    }
}

/// Parses a differential form expression.
pub fn parse_form(src: &str, dim: usize) -> Result<crate::multivector::DifferentialForm> {
    match parse(ExprKind::Form, src, dim)? {
        Value::Form(m) => Ok(m),
        _ => unreachable!(),
    }
}

/// Parses a path expression into its coefficients in `t`.
pub fn parse_path(src: &str, dim: usize) -> Result<Vec<crate::multivector::Multivector>> {
    match parse(ExprKind::Path, src, dim)? {
        Value::Path(m) => Ok(m),
        _ => unreachable!(),
    }
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

fn fmt_q(v: &Q) -> String {
    if v.is_integer() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

fn fmt_freq(k: &[i32]) -> String {
    let mut s = String::new();
    for (i, &c) in k.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let mag = c.unsigned_abs();
        let body = if mag == 1 { format!("t{}", i + 1) } else { format!("{mag}*t{}", i + 1) };
        if s.is_empty() {
            if c < 0 {
                s.push('-');
            }
        } else {
            s.push_str(if c < 0 { " - " } else { " + " });
        }
        s.push_str(&body);
    }
    s
}

/// A signed printed summand: `negative` and the unsigned text.
struct Summand {
    negative: bool,
    body: String,
}

fn join(parts: &[Summand]) -> String {
    if parts.is_empty() {
        return "0".into();
    }
    let mut s = String::new();
    for (i, p) in parts.iter().enumerate() {
        if i == 0 {
            if p.negative {
                s.push('-');
            }
        } else {
            s.push_str(if p.negative { " - " } else { " + " });
        }
        s.push_str(&p.body);
    }
    s
}

/// Summands of a real-valued trigonometric polynomial in the cos/sin basis.
fn real_summands(p: &TrigPoly) -> Vec<Summand> {
    let mut out = vec![];
    let c0 = p.constant_term().re;
    if !c0.is_zero() {
        out.push(Summand { negative: c0.is_negative(), body: fmt_q(&c0.abs()) });
    }
    for (k, c) in p.terms() {
        let first = k.iter().find(|&&x| x != 0);
        if !matches!(first, Some(x) if *x > 0) {
            continue;
        }
        let arg = fmt_freq(k);
        let two = Q::from_integer(BigInt::from(2));
        let cos_c = &c.re * &two;
        let sin_c = -(&c.im * &two);
        for (coef, name) in [(cos_c, "cos"), (sin_c, "sin")] {
            if coef.is_zero() {
                continue;
            }
            let mag = coef.abs();
            let body = if mag.is_one() { format!("{name}({arg})") } else { format!("{}*{name}({arg})", fmt_q(&mag)) };
            out.push(Summand { negative: coef.is_negative(), body });
        }
    }
    out
}

fn poly_summands(p: &TrigPoly) -> Vec<Summand> {
    let conj = p.conj();
    let half = Gauss::real(Q::new(BigInt::one(), BigInt::from(2)));
    let re = (p + &conj).scale(&half);
    let im = (p - &conj).scale(&Gauss::new(Q::zero(), Q::new(BigInt::from(-1), BigInt::from(2))));
    let mut parts = real_summands(&re);
    if !im.is_zero() {
        let ip = real_summands(&im);
        if ip.len() == 1 {
            let s = &ip[0];
            parts.push(Summand { negative: s.negative, body: format!("I*{}", s.body) });
        } else {
            parts.push(Summand { negative: false, body: format!("I*({})", join(&ip)) });
        }
    }
    parts
}

/// Canonical text of a trigonometric polynomial.
pub fn print_trig(p: &TrigPoly) -> String {
    join(&poly_summands(p))
}

/// Scales a normalized factor to integer coefficients with positive constant term.
fn primitive_factor(f: &TrigPoly) -> (TrigPoly, Q) {
    // Work with the coefficients as printed in the cos/sin basis.
    let two = Q::from_integer(BigInt::from(2));
    let shown: Vec<Q> = f
        .terms()
        .iter()
        .flat_map(|(k, c)| {
            if k.iter().all(|&x| x == 0) {
                vec![c.re.clone(), c.im.clone()]
            } else {
                vec![&c.re * &two, &c.im * &two]
            }
        })
        .filter(|v| !v.is_zero())
        .collect();
    let mut l = BigInt::one();
    for v in &shown {
        l = l.lcm(v.denom());
    }
    let mut g = BigInt::zero();
    for v in &shown {
        g = g.gcd(&(v.numer() * (&l / v.denom())));
    }
    let s = Q::new(l, g);
    (f.scale(&Gauss::real(s.clone())), s)
}

/// Printed pieces of a function: `(negative, body, compound)` where `compound`
/// means the body is a sum and must be parenthesized inside a product.
fn function_pieces(f: &TorusFunction) -> (bool, String, bool) {
    if f.is_polynomial() {
        let parts = poly_summands(f.numerator());
        if parts.len() == 1 {
            return (parts[0].negative, parts[0].body.clone(), false);
        }
        return (false, join(&parts), parts.len() > 1);
    }
    // Each factor is printed on its own so that re-parsing keeps the factorization,
    // and with it the nowhere-vanishing certificate of every factor.
    let mut scale = Q::one();
    let mut factors = vec![];
    for (fac, e) in f.denominator_factors() {
        let (g, s) = primitive_factor(fac);
        for _ in 0..*e {
            scale *= &s;
            factors.push(format!("({})", print_trig(&g)));
        }
    }
    let num = f.numerator().scale(&Gauss::real(scale));
    let den = if factors.len() == 1 { factors.remove(0) } else { format!("({})", factors.join("*")) };
    let parts = poly_summands(&num);
    if parts.len() == 1 {
        (parts[0].negative, format!("{}/{}", parts[0].body, den), false)
    } else {
        (false, format!("({})/{}", join(&parts), den), false)
    }
}

/// Canonical text of a torus function.
pub fn print_function(f: &TorusFunction) -> String {
    let (neg, body, _) = function_pieces(f);
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

fn blade_text<K: ExtKind>(b: Blade) -> String {
    b.indices().iter().map(|i| format!("{}{}", K::PREFIX, i + 1)).collect::<Vec<_>>().join("^")
}

fn ext_summands<K: ExtKind>(v: &Ext<K>) -> Vec<Summand> {
    let single = v.terms().len() == 1;
    let mut out = vec![];
    for (b, f) in v.terms() {
        let (neg, body, compound) = function_pieces(f);
        if b.degree() == 0 {
            let body = if compound && !single { format!("({body})") } else { body };
            out.push(Summand { negative: neg, body });
            continue;
        }
        let bt = blade_text::<K>(*b);
        let text = if body == "1" {
            bt
        } else if compound {
            format!("({body})*{bt}")
        } else {
            format!("{body}*{bt}")
        };
        out.push(Summand { negative: neg, body: text });
    }
    out
}

/// Canonical text of a multivector or form: blades in graded-lex order.
pub fn print_ext<K: ExtKind>(v: &Ext<K>) -> String {
    join(&ext_summands(v))
}

/// Canonical text of a normal-bundle-valued leaf form: `alpha (x) d<a>` summands.
pub fn print_foliated(v: &crate::foliation::FoliatedFormNF) -> String {
    let mut parts = vec![];
    for ((b, a), f) in v.terms() {
        let (neg, body, compound) = function_pieces(f);
        let head = if b.degree() == 0 {
            if compound {
                format!("({body})")
            } else {
                body
            }
        } else {
            let bt = blade_text::<crate::multivector::FormKind>(*b);
            if body == "1" {
                bt
            } else if compound {
                format!("({body})*{bt}")
            } else {
                format!("{body}*{bt}")
            }
        };
        parts.push(Summand { negative: neg, body: format!("{head} (x) d{}", a + 1) });
    }
    join(&parts)
}

fn compound_scalar(c: &crate::multivector::Multivector) -> bool {
    c.terms().iter().any(|(b, f)| b.degree() == 0 && function_pieces(f).2)
}

/// Canonical text of a path given by its coefficients in `t`.
pub fn print_path(coeffs: &[crate::multivector::Multivector]) -> String {
    let mut parts = vec![];
    for (k, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let tp = vec!["t"; k].join("*");
        let sub = ext_summands(c);
        if k == 0 {
            parts.extend(sub);
        } else if sub.len() == 1 && !compound_scalar(c) {
            parts.push(Summand { negative: sub[0].negative, body: format!("{tp}*{}", sub[0].body) });
        } else {
            parts.push(Summand { negative: false, body: format!("{tp}*({})", join(&sub)) });
        }
    }
    join(&parts)
}

/// Canonical text of any elaborated value.
pub fn print_canonical(v: &Value) -> String {
    match v {
        Value::Function(f) => print_function(f),
        Value::Multivector(m) => print_ext(m),
        Value::Form(m) => print_ext(m),
        Value::Path(c) => print_path(c),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prints_spec_example() {
        let m = parse_multivector("(sin(t4)+2)*d1^d2", 4).unwrap();
        assert_eq!(print_ext(&m), "(2 + sin(t4))*d1^d2");
    }

    #[test]
    fn repeated_generator_vanishes() {
        assert!(parse_multivector("d1^d1", 4).unwrap().is_zero());
        assert_eq!(print_ext(&parse_multivector("d1^d1", 4).unwrap()), "0");
    }

    #[test]
    fn wedge_binds_tighter_than_product() {
        let a = parse_multivector("2*d1^d2 + d3", 3).unwrap();
        let b = parse_multivector("(2*(d1^d2)) + d3", 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn path_coefficients() {
        let p = parse_path("d1^d2 + t*(d1^d3 + d2^d4) + t*t*d3^d4", 4).unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(print_ext(&p[1]), "d1^d3 + d2^d4");
        assert_eq!(print_path(&p), "d1^d2 + t*(d1^d3 + d2^d4) + t*t*d3^d4");
    }

    #[test]
    fn quotient_printing_uses_primitive_denominators() {
        let f = parse_function("-4*cos(t4)/(sin(t4)+2)", 4).unwrap();
        assert_eq!(print_function(&f), "-4*cos(t4)/(2 + sin(t4))");
        assert_eq!(parse_function(&print_function(&f), 4).unwrap(), f);
    }

    #[test]
    fn errors_are_positioned() {
        match parse_multivector("d1 + * d2", 2) {
            Err(Error::SyntaxError { line: 1, column: 6, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_multivector("d3", 2), Err(Error::IndexOutOfRange { index: 3, dim: 2 })));
        assert!(matches!(parse_function("1/(1+sin(t1))", 1), Err(Error::DivisionUncertified(_))));
        assert!(matches!(parse_function("t1", 1), Err(Error::SyntaxError { .. })));
    }

    #[test]
    fn mixed_frequencies() {
        let f = parse_function("sin(t1 - 2*t3) + 3*cos(-t2)", 3).unwrap();
        assert_eq!(print_function(&f), "3*cos(t2) + sin(t1 - 2*t3)");
    }
}

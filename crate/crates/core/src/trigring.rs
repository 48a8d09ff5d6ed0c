//! Exact trigonometric coefficient ring on the torus `T^n`.
//!
//! Functions are finite Fourier sums `sum_k c_k e^{i k.theta}` with Gaussian
//! rational coefficients ([`TrigPoly`]), optionally divided by a product of
//! certified nowhere-vanishing factors ([`TorusFunction`]).

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational number.
pub type Q = BigRational;

/// Builds the rational `n / d`.
pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Builds the integer rational `n`.
pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Gaussian rational `re + i im`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gauss {
    pub re: Q,
    pub im: Q,
}

impl Gauss {
    pub fn new(re: Q, im: Q) -> Self {
        Gauss { re, im }
    }
    pub fn real(re: Q) -> Self {
        Gauss { re, im: Q::zero() }
    }
    pub fn from_int(n: i64) -> Self {
        Gauss::real(qi(n))
    }
    pub fn i() -> Self {
        Gauss::new(Q::zero(), Q::one())
    }
    pub fn zero() -> Self {
        Gauss::from_int(0)
    }
    pub fn one() -> Self {
        Gauss::from_int(1)
    }
    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }
    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }
    pub fn conj(&self) -> Self {
        Gauss::new(self.re.clone(), -self.im.clone())
    }
    /// `|re| + |im|`, an upper bound for the modulus.
    pub fn l1_norm(&self) -> Q {
        self.re.abs() + self.im.abs()
    }
    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = &self.re * &self.re + &self.im * &self.im;
        Some(Gauss::new(&self.re / &n, -&self.im / &n))
    }
    pub fn scale(&self, r: &Q) -> Self {
        Gauss::new(&self.re * r, &self.im * r)
    }
}

impl Add for &Gauss {
    type Output = Gauss;
    fn add(self, o: &Gauss) -> Gauss {
        Gauss::new(&self.re + &o.re, &self.im + &o.im)
    }
}
impl Sub for &Gauss {
    type Output = Gauss;
    fn sub(self, o: &Gauss) -> Gauss {
        Gauss::new(&self.re - &o.re, &self.im - &o.im)
    }
}
impl Mul for &Gauss {
    type Output = Gauss;
    fn mul(self, o: &Gauss) -> Gauss {
        Gauss::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
}
impl Neg for &Gauss {
    type Output = Gauss;
    fn neg(self) -> Gauss {
        Gauss::new(-self.re.clone(), -self.im.clone())
    }
}

/// Integer frequency vector `k` of a Fourier mode `e^{i k.theta}`.
pub type Frequency = Vec<i32>;

fn freq_add(a: &[i32], b: &[i32]) -> Frequency {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn freq_sub(a: &[i32], b: &[i32]) -> Frequency {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Finite Fourier sum with Gaussian rational coefficients on `T^dim`.
///
/// Zero coefficients are never stored, so structural equality is equality of functions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TrigPoly {
    dim: usize,
    terms: BTreeMap<Frequency, Gauss>,
}

impl TrigPoly {
    pub fn zero(dim: usize) -> Self {
        TrigPoly { dim, terms: BTreeMap::new() }
    }
    pub fn constant(dim: usize, c: Gauss) -> Self {
        let mut p = TrigPoly::zero(dim);
        p.add_term(vec![0; dim], c);
        p
    }
    pub fn one(dim: usize) -> Self {
        TrigPoly::constant(dim, Gauss::one())
    }
    /// The single mode `c e^{i k.theta}`.
    pub fn monomial(k: Frequency, c: Gauss) -> Self {
        let mut p = TrigPoly::zero(k.len());
        p.add_term(k, c);
        p
    }
    /// `cos(k.theta)` as `(e^{ik} + e^{-ik}) / 2`.
    pub fn cos(k: Frequency) -> Self {
        let half = Gauss::real(q(1, 2));
        let neg: Frequency = k.iter().map(|x| -x).collect();
        let mut p = TrigPoly::monomial(k, half.clone());
        p.add_term(neg, half);
        p
    }
    /// `sin(k.theta)` as `(e^{ik} - e^{-ik}) / 2i`.
    pub fn sin(k: Frequency) -> Self {
        let neg: Frequency = k.iter().map(|x| -x).collect();
        let mut p = TrigPoly::monomial(k, Gauss::new(Q::zero(), q(-1, 2)));
        p.add_term(neg, Gauss::new(Q::zero(), q(1, 2)));
        p
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn terms(&self) -> &BTreeMap<Frequency, Gauss> {
        &self.terms
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn coeff(&self, k: &[i32]) -> Gauss {
        self.terms.get(k).cloned().unwrap_or_else(Gauss::zero)
    }
    pub fn constant_term(&self) -> Gauss {
        self.coeff(&vec![0; self.dim])
    }
    /// Returns `Some(c)` if the function is the constant `c`.
    pub fn as_constant(&self) -> Option<Gauss> {
        match self.terms.len() {
            0 => Some(Gauss::zero()),
            1 => {
                let (k, c) = self.terms.iter().next().unwrap();
                k.iter().all(|&x| x == 0).then(|| c.clone())
            }
            _ => None,
        }
    }
    /// Adds `c e^{i k.theta}` in place.
    pub fn add_term(&mut self, k: Frequency, c: Gauss) {
        assert_eq!(k.len(), self.dim, "frequency length must match dimension");
        if c.is_zero() {
            return;
        }
        match self.terms.entry(k) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get() + &c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }
    pub fn scale(&self, c: &Gauss) -> Self {
        if c.is_zero() {
            return TrigPoly::zero(self.dim);
        }
        TrigPoly {
            dim: self.dim,
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
        }
    }
    /// Multiplies by the pure mode `e^{i k.theta}`.
    pub fn shift(&self, k: &[i32]) -> Self {
        TrigPoly {
            dim: self.dim,
            terms: self.terms.iter().map(|(m, v)| (freq_add(m, k), v.clone())).collect(),
        }
    }
    /// Complex conjugate function.
    pub fn conj(&self) -> Self {
        TrigPoly {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k.iter().map(|x| -x).collect(), v.conj()))
                .collect(),
        }
    }
    /// True when the function is real-valued, i.e. `c_{-k} = conj(c_k)`.
    pub fn is_real(&self) -> bool {
        *self == self.conj()
    }
    /// Partial derivative in coordinate `i` (0-based).
    pub fn partial(&self, i: usize) -> Self {
        assert!(i < self.dim, "coordinate index out of range");
        let mut out = TrigPoly::zero(self.dim);
        for (k, c) in &self.terms {
            if k[i] != 0 {
                out.add_term(k.clone(), &Gauss::new(Q::zero(), qi(k[i] as i64)) * c);
            }
        }
        out
    }
    /// True when some mode has a nonzero entry at coordinate `i`.
    pub fn depends_on(&self, i: usize) -> bool {
        self.terms.keys().any(|k| k[i] != 0)
    }
    /// Projection onto modes with `k_i = 0` for every `i` in `coords`.
    pub fn zero_mode(&self, coords: &[usize]) -> Self {
        TrigPoly {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| coords.iter().all(|&i| k[i] == 0))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }
    /// Largest `|k|_inf` over the support (0 for the zero function).
    pub fn radius(&self) -> i32 {
        self.terms
            .keys()
            .map(|k| k.iter().map(|x| x.abs()).max().unwrap_or(0))
            .max()
            .unwrap_or(0)
    }
    /// Sum of `|re| + |im|` over non-constant modes.
    pub fn nonconstant_l1(&self) -> Q {
        let mut s = Q::zero();
        for (k, c) in &self.terms {
            if k.iter().any(|&x| x != 0) {
                s += c.l1_norm();
            }
        }
        s
    }
    /// Exact quotient `self / f` as Laurent polynomials, if it exists.
    pub fn div_exact(&self, f: &TrigPoly) -> Option<TrigPoly> {
        assert_eq!(self.dim, f.dim, "dimension mismatch in exact division");
        if f.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(TrigPoly::zero(self.dim));
        }
        let (lo_r, hi_r) = self.bounding_box();
        let (lo_f, hi_f) = f.bounding_box();
        let lo: Vec<i32> = (0..self.dim).map(|i| lo_r[i] - lo_f[i]).collect();
        let hi: Vec<i32> = (0..self.dim).map(|i| hi_r[i] - hi_f[i]).collect();
        if lo.iter().zip(&hi).any(|(a, b)| a > b) {
            return None;
        }
        let (kf, cf) = f.terms.iter().next_back().unwrap();
        let cf_inv = cf.inv().unwrap();
        let mut r = self.clone();
        let mut quot = TrigPoly::zero(self.dim);
        while let Some((kr, cr)) = r.terms.iter().next_back() {
            let kq = freq_sub(kr, kf);
            if kq.iter().enumerate().any(|(i, &x)| x < lo[i] || x > hi[i]) {
                return None;
            }
            let cq = cr * &cf_inv;
            r = &r - &f.shift(&kq).scale(&cq);
            quot.add_term(kq, cq);
        }
        Some(quot)
    }
    fn bounding_box(&self) -> (Vec<i32>, Vec<i32>) {
        let mut lo = vec![i32::MAX; self.dim];
        let mut hi = vec![i32::MIN; self.dim];
        for k in self.terms.keys() {
            for i in 0..self.dim {
                lo[i] = lo[i].min(k[i]);
                hi[i] = hi[i].max(k[i]);
            }
        }
        (lo, hi)
    }
    /// Integer power.
    pub fn pow(&self, e: u32) -> TrigPoly {
        let mut out = TrigPoly::one(self.dim);
        for _ in 0..e {
            out = &out * self;
        }
        out
    }
}

impl Add for &TrigPoly {
    type Output = TrigPoly;
    fn add(self, o: &TrigPoly) -> TrigPoly {
        assert_eq!(self.dim, o.dim, "dimension mismatch");
        let mut out = self.clone();
        for (k, c) in &o.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }
}
impl Sub for &TrigPoly {
    type Output = TrigPoly;
    fn sub(self, o: &TrigPoly) -> TrigPoly {
        assert_eq!(self.dim, o.dim, "dimension mismatch");
        let mut out = self.clone();
        for (k, c) in &o.terms {
            out.add_term(k.clone(), -c);
        }
        out
    }
}
impl Mul for &TrigPoly {
    type Output = TrigPoly;
    fn mul(self, o: &TrigPoly) -> TrigPoly {
        assert_eq!(self.dim, o.dim, "dimension mismatch");
        let mut out = TrigPoly::zero(self.dim);
        for (k1, c1) in &self.terms {
            for (k2, c2) in &o.terms {
                out.add_term(freq_add(k1, k2), c1 * c2);
            }
        }
        out
    }
}
impl Neg for &TrigPoly {
    type Output = TrigPoly;
    fn neg(self) -> TrigPoly {
        self.scale(&Gauss::from_int(-1))
    }
}

/// Arithmetic selector for [`tp_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

/// Checked ring operation on trigonometric polynomials.
pub fn tp_arith(op: ArithOp, a: &TrigPoly, b: &TrigPoly) -> Result<TrigPoly> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch(a.dim, b.dim));
    }
    Ok(match op {
        ArithOp::Add => a + b,
        ArithOp::Sub => a - b,
        ArithOp::Mul => a * b,
    })
}

/// Proof that a trigonometric polynomial has no zero on the torus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NonvanishingCertificate {
    /// The real constant term strictly exceeds the sum of the moduli of all other
    /// coefficients, so the function takes values in a disc avoiding zero.
    ConstantDomination,
    /// The function is `r` times a function certified by `inner`, with `r` a nonzero rational.
    RationalScale(Q, Box<NonvanishingCertificate>),
    /// The function is a product of factors, each certified.
    Product(Vec<(TrigPoly, NonvanishingCertificate)>),
}

/// Attempts to certify that `f` never vanishes on the torus.
pub fn certify_nonvanishing(f: &TrigPoly) -> Option<NonvanishingCertificate> {
    let c0 = f.constant_term();
    if !c0.is_real() || c0.re.is_zero() {
        return None;
    }
    if c0.re.is_positive() {
        (c0.re > f.nonconstant_l1()).then_some(NonvanishingCertificate::ConstantDomination)
    } else {
        (-c0.re.clone() > f.nonconstant_l1()).then(|| {
            NonvanishingCertificate::RationalScale(qi(-1), Box::new(NonvanishingCertificate::ConstantDomination))
        })
    }
}

/// Re-checks a certificate against the function it claims to certify.
pub fn validate_certificate(cert: &NonvanishingCertificate, f: &TrigPoly) -> bool {
    match cert {
        NonvanishingCertificate::ConstantDomination => {
            let c0 = f.constant_term();
            c0.is_real() && c0.re.is_positive() && c0.re > f.nonconstant_l1()
        }
        NonvanishingCertificate::RationalScale(r, inner) => {
            if r.is_zero() {
                return false;
            }
            let g = f.scale(&Gauss::real(r.recip()));
            validate_certificate(inner, &g)
        }
        NonvanishingCertificate::Product(parts) => {
            let mut prod = TrigPoly::one(f.dim());
            for (p, c) in parts {
                if p.dim() != f.dim() || !validate_certificate(c, p) {
                    return false;
                }
                prod = &prod * p;
            }
            prod == *f
        }
    }
}

/// Quotient `num / prod_j den_j^{e_j}` with each `den_j` certified nowhere-vanishing.
///
/// Denominator factors are normalized to constant term 1 and kept sorted; the
/// numerator is kept reduced against them, so the representation of a function
/// is canonical for the operations used here.
#[derive(Clone, Debug)]
pub struct TorusFunction {
    num: TrigPoly,
    den: Vec<(TrigPoly, u32)>,
}

impl PartialEq for TorusFunction {
    fn eq(&self, other: &Self) -> bool {
        if self.den == other.den {
            return self.num == other.num;
        }
        let l = lcm_factors(&self.den, &other.den);
        let a = &self.num * &expand_quotient(&l, &self.den, self.dim());
        let b = &other.num * &expand_quotient(&l, &other.den, self.dim());
        a == b
    }
}
impl Eq for TorusFunction {}

fn factor_key(f: &TrigPoly) -> Vec<(Frequency, Gauss)> {
    f.terms.iter().map(|(k, v)| (k.clone(), v.clone())).collect()
}

fn lcm_factors(a: &[(TrigPoly, u32)], b: &[(TrigPoly, u32)]) -> Vec<(TrigPoly, u32)> {
    let mut out: Vec<(TrigPoly, u32)> = a.to_vec();
    for (f, e) in b {
        match out.iter_mut().find(|(g, _)| g == f) {
            Some(slot) => slot.1 = slot.1.max(*e),
            None => out.push((f.clone(), *e)),
        }
    }
    out.sort_by_key(|(f, _)| factor_key(f));
    out
}

/// `prod l_j^{e_j - d_j}` where `d` divides `l` factorwise.
fn expand_quotient(l: &[(TrigPoly, u32)], d: &[(TrigPoly, u32)], dim: usize) -> TrigPoly {
    let mut out = TrigPoly::one(dim);
    for (f, e) in l {
        let have = d.iter().find(|(g, _)| g == f).map(|x| x.1).unwrap_or(0);
        out = &out * &f.pow(e - have);
    }
    out
}

impl TorusFunction {
    pub fn zero(dim: usize) -> Self {
        TorusFunction { num: TrigPoly::zero(dim), den: vec![] }
    }
    pub fn one(dim: usize) -> Self {
        TorusFunction::from_poly(TrigPoly::one(dim))
    }
    pub fn constant(dim: usize, c: Gauss) -> Self {
        TorusFunction::from_poly(TrigPoly::constant(dim, c))
    }
    pub fn rational(dim: usize, r: Q) -> Self {
        TorusFunction::constant(dim, Gauss::real(r))
    }
    pub fn from_poly(p: TrigPoly) -> Self {
        TorusFunction { num: p, den: vec![] }
    }
    pub fn dim(&self) -> usize {
        self.num.dim()
    }
    pub fn numerator(&self) -> &TrigPoly {
        &self.num
    }
    /// Denominator factors with multiplicities.
    pub fn denominator_factors(&self) -> &[(TrigPoly, u32)] {
        &self.den
    }
    /// The expanded denominator polynomial.
    pub fn denominator(&self) -> TrigPoly {
        expand_quotient(&self.den, &[], self.dim())
    }
    /// Certificate for the expanded denominator.
    pub fn denominator_certificate(&self) -> NonvanishingCertificate {
        let mut parts = vec![];
        for (f, e) in &self.den {
            for _ in 0..*e {
                parts.push((f.clone(), NonvanishingCertificate::ConstantDomination));
            }
        }
        NonvanishingCertificate::Product(parts)
    }
    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    pub fn is_one(&self) -> bool {
        self.den.is_empty() && self.num == TrigPoly::one(self.dim())
    }
    /// True when the function has no denominator.
    pub fn is_polynomial(&self) -> bool {
        self.den.is_empty()
    }
    pub fn as_poly(&self) -> Option<&TrigPoly> {
        self.den.is_empty().then_some(&self.num)
    }
    pub fn as_constant(&self) -> Option<Gauss> {
        if self.den.is_empty() {
            self.num.as_constant()
        } else {
            None
        }
    }
    pub fn is_real(&self) -> bool {
        // Denominator factors are certified with real positive constant term but may
        // still be complex-valued; compare with the conjugate function.
        *self == self.conj()
    }
    pub fn conj(&self) -> Self {
        TorusFunction {
            num: self.num.conj(),
            den: self.den.iter().map(|(f, e)| (f.conj(), *e)).collect(),
        }
        .normalized()
    }
    fn normalized(mut self) -> Self {
        self.den.sort_by_key(|(f, _)| factor_key(f));
        self.reduce()
    }
    /// Cancels denominator factors that divide the numerator.
    fn reduce(mut self) -> Self {
        if self.num.is_zero() {
            self.den.clear();
            return self;
        }
        for (f, e) in self.den.iter_mut() {
            while *e > 0 {
                match self.num.div_exact(f) {
                    Some(qt) => {
                        self.num = qt;
                        *e -= 1;
                    }
                    None => break,
                }
            }
        }
        self.den.retain(|(_, e)| *e > 0);
        self
    }
    pub fn scale(&self, c: &Gauss) -> Self {
        TorusFunction { num: self.num.scale(c), den: self.den.clone() }.reduce()
    }
    pub fn scale_q(&self, r: &Q) -> Self {
        self.scale(&Gauss::real(r.clone()))
    }
    /// Multiplicative inverse, certifying the numerator.
    pub fn recip(&self) -> Result<Self> {
        TorusFunction::one(self.dim()).div(self)
    }
    /// Division by `d`, certifying the part of `d`'s numerator not already known to be nonzero.
    pub fn div(&self, d: &TorusFunction) -> Result<Self> {
        if self.dim() != d.dim() {
            return Err(Error::DimensionMismatch(self.dim(), d.dim()));
        }
        if d.is_zero() {
            return Err(Error::DivisionUncertified("0".into()));
        }
        // Strip factors already known to be nowhere vanishing from the divisor's numerator.
        let mut rest = d.num.clone();
        let mut extracted: Vec<(TrigPoly, u32)> = vec![];
        let known: Vec<TrigPoly> = self.den.iter().chain(d.den.iter()).map(|(f, _)| f.clone()).collect();
        for f in known {
            let mut e = 0;
            while let Some(qt) = rest.div_exact(&f) {
                if qt.is_zero() {
                    break;
                }
                rest = qt;
                e += 1;
            }
            if e > 0 {
                extracted.push((f, e));
            }
        }
        let mut new_den = extracted;
        let num_factor: TorusFunction;
        if let Some(c) = rest.as_constant() {
            let inv = c.inv().expect("nonzero constant");
            num_factor = TorusFunction::constant(self.dim(), inv);
        } else {
            let c0 = rest.constant_term();
            if certify_nonvanishing(&rest).is_none() {
                return Err(Error::DivisionUncertified(crate::expr::print_trig(&rest)));
            }
            let normalized = rest.scale(&c0.inv().unwrap());
            new_den.push((normalized, 1));
            num_factor = TorusFunction::constant(self.dim(), c0.inv().unwrap());
        }
        // self / d = self * d.den / (extracted * rest)
        let mut merged = self.den.clone();
        for (f, e) in new_den {
            match merged.iter_mut().find(|(g, _)| *g == f) {
                Some(slot) => slot.1 += e,
                None => merged.push((f, e)),
            }
        }
        let num = &(&self.num * &d.denominator()) * &num_factor.num;
        Ok(TorusFunction { num, den: merged }.normalized())
    }
    /// Partial derivative in coordinate `i` (0-based).
    pub fn partial(&self, i: usize) -> Self {
        let dn = self.num.partial(i);
        let moving: Vec<usize> = (0..self.den.len()).filter(|&j| self.den[j].0.depends_on(i)).collect();
        if moving.is_empty() {
            return TorusFunction { num: dn, den: self.den.clone() }.reduce();
        }
        // d(n / D) = (n' F - n sum_j e_j f_j' F / f_j) / (D F), with F = prod_{moving} f_j.
        let dim = self.dim();
        let mut f_all = TrigPoly::one(dim);
        for &j in &moving {
            f_all = &f_all * &self.den[j].0;
        }
        let mut num = &dn * &f_all;
        for &j in &moving {
            let (fj, ej) = &self.den[j];
            let mut others = TrigPoly::one(dim);
            for &l in &moving {
                if l != j {
                    others = &others * &self.den[l].0;
                }
            }
            let term = &(&self.num * &fj.partial(i)) * &others;
            num = &num - &term.scale(&Gauss::from_int(*ej as i64));
        }
        let mut den = self.den.clone();
        for &j in &moving {
            den[j].1 += 1;
        }
        TorusFunction { num, den }.reduce()
    }
    pub fn depends_on(&self, i: usize) -> bool {
        self.num.depends_on(i) || self.den.iter().any(|(f, _)| f.depends_on(i))
    }
    /// Projection onto Fourier modes constant along `coords`; requires a denominator independent of them.
    pub fn zero_mode(&self, coords: &[usize]) -> Result<Self> {
        for &i in coords {
            if self.den.iter().any(|(f, _)| f.depends_on(i)) {
                return Err(Error::ProjectionUnavailable(i + 1));
            }
        }
        Ok(TorusFunction { num: self.num.zero_mode(coords), den: self.den.clone() }.reduce())
    }
    /// Largest mode radius of numerator and denominator factors.
    pub fn radius(&self) -> i32 {
        self.den.iter().map(|(f, _)| f.radius()).fold(self.num.radius(), i32::max)
    }
    /// Writes the function over an explicit common denominator: returns the numerator.
    pub fn numerator_over(&self, common: &[(TrigPoly, u32)]) -> TrigPoly {
        &self.num * &expand_quotient(common, &self.den, self.dim())
    }
    /// Least common multiple of the denominator factor lists of `fs`.
    pub fn common_denominator<'a>(fs: impl IntoIterator<Item = &'a TorusFunction>) -> Vec<(TrigPoly, u32)> {
        let mut l: Vec<(TrigPoly, u32)> = vec![];
        for f in fs {
            l = lcm_factors(&l, &f.den);
        }
        l
    }
    /// Rebuilds a function from a numerator over a certified factor list.
    pub fn from_parts(num: TrigPoly, den: Vec<(TrigPoly, u32)>) -> Self {
        TorusFunction { num, den }.normalized()
    }
    pub fn pow(&self, e: u32) -> Self {
        let mut out = TorusFunction::one(self.dim());
        for _ in 0..e {
            out = &out * self;
        }
        out
    }
}

impl Add for &TorusFunction {
    type Output = TorusFunction;
    fn add(self, o: &TorusFunction) -> TorusFunction {
        assert_eq!(self.dim(), o.dim(), "dimension mismatch");
        if o.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return o.clone();
        }
        if self.den == o.den {
            return TorusFunction { num: &self.num + &o.num, den: self.den.clone() }.reduce();
        }
        let l = lcm_factors(&self.den, &o.den);
        let num = &self.numerator_over(&l) + &o.numerator_over(&l);
        TorusFunction { num, den: l }.reduce()
    }
}
impl Sub for &TorusFunction {
    type Output = TorusFunction;
    fn sub(self, o: &TorusFunction) -> TorusFunction {
        self + &(-o)
    }
}
impl Mul for &TorusFunction {
    type Output = TorusFunction;
    fn mul(self, o: &TorusFunction) -> TorusFunction {
        assert_eq!(self.dim(), o.dim(), "dimension mismatch");
        if self.is_zero() || o.is_zero() {
            return TorusFunction::zero(self.dim());
        }
        let mut den = self.den.clone();
        for (f, e) in &o.den {
            match den.iter_mut().find(|(g, _)| g == f) {
                Some(slot) => slot.1 += e,
                None => den.push((f.clone(), *e)),
            }
        }
        TorusFunction { num: &self.num * &o.num, den }.normalized()
    }
}
impl Neg for &TorusFunction {
    type Output = TorusFunction;
    fn neg(self) -> TorusFunction {
        TorusFunction { num: -&self.num, den: self.den.clone() }
    }
}
impl AddAssign<&TorusFunction> for TorusFunction {
    fn add_assign(&mut self, o: &TorusFunction) {
        *self = &*self + o;
    }
}

impl fmt::Display for TorusFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::expr::print_function(self))
    }
}

impl fmt::Display for TrigPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::expr::print_trig(self))
    }
}

/// Arithmetic on torus functions with division; division certifies the divisor.
pub fn tf_arith(op: TfOp, a: &TorusFunction, b: &TorusFunction) -> Result<TorusFunction> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    Ok(match op {
        TfOp::Add => a + b,
        TfOp::Sub => a - b,
        TfOp::Mul => a * b,
        TfOp::Div => a.div(b)?,
    })
}

/// Arithmetic selector for [`tf_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TfOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sin1(dim: usize, i: usize) -> TrigPoly {
        let mut k = vec![0; dim];
        k[i] = 1;
        TrigPoly::sin(k)
    }
    fn cos1(dim: usize, i: usize) -> TrigPoly {
        let mut k = vec![0; dim];
        k[i] = 1;
        TrigPoly::cos(k)
    }

    #[test]
    fn pythagorean_identity() {
        let s = sin1(2, 0);
        let c = cos1(2, 0);
        assert_eq!(&(&s * &s) + &(&c * &c), TrigPoly::one(2));
    }

    #[test]
    fn derivative_of_sin_is_cos() {
        assert_eq!(sin1(3, 1).partial(1), cos1(3, 1));
        assert_eq!(cos1(3, 1).partial(1), -&sin1(3, 1));
        assert!(sin1(3, 1).partial(0).is_zero());
    }

    #[test]
    fn certificates() {
        let two_plus_sin = &TrigPoly::constant(1, Gauss::from_int(2)) + &sin1(1, 0);
        let cert = certify_nonvanishing(&two_plus_sin).unwrap();
        assert!(validate_certificate(&cert, &two_plus_sin));
        let one_plus_sin = &TrigPoly::one(1) + &sin1(1, 0);
        assert!(certify_nonvanishing(&one_plus_sin).is_none());
        let neg = -&two_plus_sin;
        let cert = certify_nonvanishing(&neg).unwrap();
        assert!(validate_certificate(&cert, &neg));
        assert!(!validate_certificate(&NonvanishingCertificate::ConstantDomination, &neg));
    }

    #[test]
    fn exact_division_roundtrip() {
        let a = &TrigPoly::constant(2, Gauss::from_int(3)) + &cos1(2, 1);
        let b = &sin1(2, 0) + &cos1(2, 1);
        let p = &a * &b;
        assert_eq!(p.div_exact(&a).unwrap(), b);
        assert!(b.div_exact(&a).is_none());
    }

    #[test]
    fn quotient_rule_and_cancellation() {
        let h = TorusFunction::from_poly(&TrigPoly::constant(1, Gauss::from_int(2)) + &sin1(1, 0));
        let inv = h.recip().unwrap();
        assert_eq!(&inv * &h, TorusFunction::one(1));
        assert!((&inv * &h).is_polynomial());
        // d(1/h) = -h'/h^2
        let lhs = inv.partial(0);
        let rhs = (&TorusFunction::from_poly(cos1(1, 0)) * &inv.pow(2)).scale(&Gauss::from_int(-1));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn uncertified_division_fails() {
        let f = TorusFunction::from_poly(&TrigPoly::one(1) + &sin1(1, 0));
        assert!(matches!(TorusFunction::one(1).div(&f), Err(Error::DivisionUncertified(_))));
    }

    #[test]
    fn zero_mode_requires_independent_denominator() {
        let h = TorusFunction::from_poly(&TrigPoly::constant(2, Gauss::from_int(2)) + &sin1(2, 1));
        let f = TorusFunction::from_poly(&sin1(2, 0) + &TrigPoly::one(2)).div(&h).unwrap();
        assert_eq!(f.zero_mode(&[0]).unwrap(), h.recip().unwrap());
        assert!(f.zero_mode(&[1]).is_err());
    }
}

//! Multivector fields and differential forms on `T^n` with exact coefficients.
//!
//! Both are elements of an exterior algebra on odd generators: `xi_i` stands for
//! `d/dtheta_i` in [`Multivector`] and for `dtheta_i` in [`DifferentialForm`].
//! Indices are 0-based in code and 1-based in printed expressions.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::marker::PhantomData;
use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};
use crate::trigring::{Gauss, Q, TorusFunction};

/// Sorted index set encoded as a bitmask (bit `i` is generator `i`).
///
/// Ordered by degree, then lexicographically on the sorted index tuple.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Blade(pub u32);

impl Blade {
    pub fn empty() -> Self {
        Blade(0)
    }
    pub fn single(i: usize) -> Self {
        Blade(1 << i)
    }
    /// Builds a blade from indices, returning the sign of sorting them (0 if repeated).
    pub fn from_indices(idx: &[usize]) -> (i32, Blade) {
        let mut sign = 1;
        let mut mask = 0u32;
        for &i in idx {
            if mask & (1 << i) != 0 {
                return (0, Blade(0));
            }
            // Moving xi_i past the already-placed generators with larger index.
            if (mask >> i).count_ones() % 2 == 1 {
                sign = -sign;
            }
            mask |= 1 << i;
        }
        (sign, Blade(mask))
    }
    pub fn degree(self) -> usize {
        self.0.count_ones() as usize
    }
    pub fn contains(self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }
    pub fn indices(self) -> Vec<usize> {
        (0..32).filter(|&i| self.contains(i)).collect()
    }
    pub fn without(self, i: usize) -> Blade {
        Blade(self.0 & !(1 << i))
    }
    pub fn with(self, i: usize) -> Blade {
        Blade(self.0 | (1 << i))
    }
    /// Sign and blade of `e_self ^ e_other`; sign 0 when they overlap.
    pub fn wedge(self, other: Blade) -> (i32, Blade) {
        if self.0 & other.0 != 0 {
            return (0, Blade(0));
        }
        let mut swaps = 0;
        for j in other.indices() {
            swaps += (self.0 >> j).count_ones();
        }
        (if swaps % 2 == 0 { 1 } else { -1 }, Blade(self.0 | other.0))
    }
    /// Sign of removing generator `i` from the front (left derivative).
    pub fn left_sign(self, i: usize) -> i32 {
        if (self.0 & ((1u32 << i) - 1)).count_ones().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }
    /// Sign of removing generator `i` from the back (right derivative).
    pub fn right_sign(self, i: usize) -> i32 {
        if (self.0 >> (i + 1)).count_ones().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }
}

impl Ord for Blade {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            o => return o,
        }
        let diff = self.0 ^ other.0;
        if diff == 0 {
            return Ordering::Equal;
        }
        // The lowest differing generator decides: the blade containing it sorts first.
        let low = diff.trailing_zeros();
        if self.0 & (1 << low) != 0 {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }
}
impl PartialOrd for Blade {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Marker distinguishing vector-type from form-type exterior algebras.
pub trait ExtKind: Clone + std::fmt::Debug + PartialEq + Eq + Send + Sync + 'static {
    /// Printed generator prefix (`d` for vectors, `dt` for forms).
    const PREFIX: &'static str;
}

/// Generators are coordinate vector fields.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorKind;
impl ExtKind for VectorKind {
    const PREFIX: &'static str = "d";
}

/// Generators are coordinate 1-forms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormKind;
impl ExtKind for FormKind {
    const PREFIX: &'static str = "dt";
}

/// Element of the exterior algebra over torus functions with generators of kind `K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ext<K: ExtKind> {
    dim: usize,
    terms: BTreeMap<Blade, TorusFunction>,
    _kind: PhantomData<K>,
}

/// Multivector field: sum of `f_I d_I`.
pub type Multivector = Ext<VectorKind>;
/// Differential form: sum of `f_I dtheta_I`.
pub type DifferentialForm = Ext<FormKind>;

impl<K: ExtKind> Ext<K> {
    pub fn zero(dim: usize) -> Self {
        assert!(dim <= 31, "dimension too large");
        Ext { dim, terms: BTreeMap::new(), _kind: PhantomData }
    }
    /// Degree-0 element `f`.
    pub fn scalar(f: TorusFunction) -> Self {
        let mut out = Ext::zero(f.dim());
        out.add_term(Blade::empty(), f);
        out
    }
    /// `f e_I` for a sorted or unsorted index list (sign applied).
    pub fn term(dim: usize, idx: &[usize], f: TorusFunction) -> Self {
        let (s, b) = Blade::from_indices(idx);
        let mut out = Ext::zero(dim);
        if s != 0 {
            out.add_term(b, f.scale(&Gauss::from_int(s as i64)));
        }
        out
    }
    /// Generator `e_i` with coefficient 1.
    pub fn generator(dim: usize, i: usize) -> Self {
        Ext::term(dim, &[i], TorusFunction::one(dim))
    }
    /// Constant-coefficient blade `e_I`.
    pub fn basis(dim: usize, idx: &[usize]) -> Self {
        Ext::term(dim, idx, TorusFunction::one(dim))
    }
    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (Blade, TorusFunction)>) -> Self {
        let mut out = Ext::zero(dim);
        for (b, f) in terms {
            out.add_term(b, f);
        }
        out
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn terms(&self) -> &BTreeMap<Blade, TorusFunction> {
        &self.terms
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn coeff(&self, b: Blade) -> TorusFunction {
        self.terms.get(&b).cloned().unwrap_or_else(|| TorusFunction::zero(self.dim))
    }
    /// Coefficient of `e_I` for an index list, with sign.
    pub fn coeff_of(&self, idx: &[usize]) -> TorusFunction {
        let (s, b) = Blade::from_indices(idx);
        if s == 0 {
            return TorusFunction::zero(self.dim);
        }
        self.coeff(b).scale(&Gauss::from_int(s as i64))
    }
    pub fn add_term(&mut self, b: Blade, f: TorusFunction) {
        assert_eq!(f.dim(), self.dim, "coefficient dimension mismatch");
        assert!(b.0 >> self.dim == 0, "blade index out of range");
        if f.is_zero() {
            return;
        }
        match self.terms.get_mut(&b) {
            Some(c) => {
                let s = &*c + &f;
                if s.is_zero() {
                    self.terms.remove(&b);
                } else {
                    *c = s;
                }
            }
            None => {
                self.terms.insert(b, f);
            }
        }
    }
    /// Degrees present (sorted, deduplicated).
    pub fn degrees(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.terms.keys().map(|b| b.degree()).collect();
        d.sort();
        d.dedup();
        d
    }
    /// Homogeneous degree, if homogeneous and nonzero.
    pub fn homogeneous_degree(&self) -> Option<usize> {
        let d = self.degrees();
        (d.len() == 1).then(|| d[0])
    }
    /// Degree-`p` component.
    pub fn component(&self, p: usize) -> Self {
        Ext::from_terms(
            self.dim,
            self.terms.iter().filter(|(b, _)| b.degree() == p).map(|(b, f)| (*b, f.clone())),
        )
    }
    pub fn scale(&self, c: &Gauss) -> Self {
        Ext::from_terms(self.dim, self.terms.iter().map(|(b, f)| (*b, f.scale(c))))
    }
    pub fn scale_q(&self, r: &Q) -> Self {
        self.scale(&Gauss::real(r.clone()))
    }
    pub fn mul_fn(&self, g: &TorusFunction) -> Self {
        Ext::from_terms(self.dim, self.terms.iter().map(|(b, f)| (*b, f * g)))
    }
    /// Applies `op` to every coefficient.
    pub fn map_coeffs(&self, op: impl Fn(&TorusFunction) -> TorusFunction) -> Self {
        Ext::from_terms(self.dim, self.terms.iter().map(|(b, f)| (*b, op(f))))
    }
    /// Fallible coefficient map.
    pub fn try_map_coeffs(&self, op: impl Fn(&TorusFunction) -> Result<TorusFunction>) -> Result<Self> {
        let mut out = Ext::zero(self.dim);
        for (b, f) in &self.terms {
            out.add_term(*b, op(f)?);
        }
        Ok(out)
    }
    /// Exterior product.
    pub fn wedge(&self, o: &Self) -> Self {
        assert_eq!(self.dim, o.dim, "dimension mismatch");
        let mut out = Ext::zero(self.dim);
        for (b1, f1) in &self.terms {
            for (b2, f2) in &o.terms {
                let (s, b) = b1.wedge(*b2);
                if s != 0 {
                    out.add_term(b, (f1 * f2).scale(&Gauss::from_int(s as i64)));
                }
            }
        }
        out
    }
    /// Checked exterior product.
    pub fn try_wedge(&self, o: &Self) -> Result<Self> {
        if self.dim != o.dim {
            return Err(Error::DimensionMismatch(self.dim, o.dim));
        }
        Ok(self.wedge(o))
    }
    /// Left odd derivative with respect to generator `i`.
    pub fn left_deriv(&self, i: usize) -> Self {
        Ext::from_terms(
            self.dim,
            self.terms.iter().filter(|(b, _)| b.contains(i)).map(|(b, f)| {
                (b.without(i), f.scale(&Gauss::from_int(b.left_sign(i) as i64)))
            }),
        )
    }
    /// Right odd derivative with respect to generator `i`.
    pub fn right_deriv(&self, i: usize) -> Self {
        Ext::from_terms(
            self.dim,
            self.terms.iter().filter(|(b, _)| b.contains(i)).map(|(b, f)| {
                (b.without(i), f.scale(&Gauss::from_int(b.right_sign(i) as i64)))
            }),
        )
    }
    /// Partial derivative of all coefficients in coordinate `m`.
    pub fn partial(&self, m: usize) -> Self {
        self.map_coeffs(|f| f.partial(m))
    }
    /// Applies the vector field `v` (degree 1 multivector) to the coefficients.
    pub fn apply_field(&self, v: &Multivector) -> Self {
        let mut out = Ext::zero(self.dim);
        for (bv, fv) in v.terms() {
            debug_assert_eq!(bv.degree(), 1, "anchor must be a vector field");
            let m = bv.0.trailing_zeros() as usize;
            out = &out + &self.partial(m).mul_fn(fv);
        }
        out
    }
    /// Substitutes each generator `e_i` by `images[i]` (an algebra homomorphism).
    pub fn substitute(&self, images: &[Self]) -> Self {
        assert_eq!(images.len(), self.dim, "one image per generator");
        let mut out = Ext::zero(self.dim);
        for (b, f) in &self.terms {
            let mut prod = Ext::scalar(f.clone());
            for i in b.indices() {
                prod = prod.wedge(&images[i]);
            }
            out = &out + &prod;
        }
        out
    }
    /// Largest Fourier radius over all coefficients.
    pub fn radius(&self) -> i32 {
        self.terms.values().map(|f| f.radius()).max().unwrap_or(0)
    }
    /// Zero-mode projection of every coefficient along `coords`.
    pub fn zero_mode(&self, coords: &[usize]) -> Result<Self> {
        self.try_map_coeffs(|f| f.zero_mode(coords))
    }
    /// Complex conjugate of every coefficient.
    pub fn conj(&self) -> Self {
        self.map_coeffs(|f| f.conj())
    }
}

impl<K: ExtKind> Add for &Ext<K> {
    type Output = Ext<K>;
    fn add(self, o: &Ext<K>) -> Ext<K> {
        assert_eq!(self.dim, o.dim, "dimension mismatch");
        let mut out = self.clone();
        for (b, f) in &o.terms {
            out.add_term(*b, f.clone());
        }
        out
    }
}
impl<K: ExtKind> Sub for &Ext<K> {
    type Output = Ext<K>;
    fn sub(self, o: &Ext<K>) -> Ext<K> {
        self + &(-o)
    }
}
impl<K: ExtKind> Neg for &Ext<K> {
    type Output = Ext<K>;
    fn neg(self) -> Ext<K> {
        self.scale(&Gauss::from_int(-1))
    }
}

impl<K: ExtKind> std::fmt::Display for Ext<K> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&crate::expr::print_ext(self))
    }
}

/// Contraction of a multivector by a 1-form, acting on the first slot.
pub fn contract_mv(alpha: &DifferentialForm, p: &Multivector) -> Multivector {
    let mut out = Multivector::zero(p.dim());
    for (b, a) in alpha.terms() {
        assert_eq!(b.degree(), 1, "contraction needs a 1-form");
        let i = b.0.trailing_zeros() as usize;
        out = &out + &p.left_deriv(i).mul_fn(a);
    }
    out
}

/// Contraction of a form by a vector field, acting on the first slot.
pub fn contract_form(x: &Multivector, w: &DifferentialForm) -> DifferentialForm {
    let mut out = DifferentialForm::zero(w.dim());
    for (b, a) in x.terms() {
        assert_eq!(b.degree(), 1, "contraction needs a vector field");
        let i = b.0.trailing_zeros() as usize;
        out = &out + &w.left_deriv(i).mul_fn(a);
    }
    out
}

/// Evaluates a degree-`l` multivector on `l` covectors: `P(a_1, ..., a_l)`.
pub fn evaluate_mv(p: &Multivector, alphas: &[DifferentialForm]) -> TorusFunction {
    let mut cur = p.component(alphas.len());
    for a in alphas {
        cur = contract_mv(a, &cur);
    }
    cur.coeff(Blade::empty())
}

/// Evaluates a degree-`l` form on `l` vector fields: `w(X_1, ..., X_l)`.
pub fn evaluate_form(w: &DifferentialForm, xs: &[Multivector]) -> TorusFunction {
    let mut cur = w.component(xs.len());
    for x in xs {
        cur = contract_form(x, &cur);
    }
    cur.coeff(Blade::empty())
}

/// Exterior derivative.
pub fn de_rham(w: &DifferentialForm) -> DifferentialForm {
    let n = w.dim();
    let mut out = DifferentialForm::zero(n);
    for m in 0..n {
        let dm = w.partial(m);
        if !dm.is_zero() {
            out = &out + &DifferentialForm::generator(n, m).wedge(&dm);
        }
    }
    out
}

/// Exterior derivative of a function.
pub fn differential(f: &TorusFunction) -> DifferentialForm {
    de_rham(&DifferentialForm::scalar(f.clone()))
}

/// Lie derivative of a form along a vector field, by Cartan's formula.
pub fn lie_derivative_form(x: &Multivector, w: &DifferentialForm) -> DifferentialForm {
    &contract_form(x, &de_rham(w)) + &de_rham(&contract_form(x, w))
}

/// Bracket data of a Lie algebroid structure on the coordinate frame.
///
/// The bracket of `e_i` and `e_j` is `structure[i][j]` and `e_i` acts on functions by `anchors[i]`.
#[derive(Clone, Debug)]
pub struct FrameBracket {
    pub anchors: Vec<Multivector>,
    pub structure: Option<Vec<Vec<Multivector>>>,
}

/// Graded bracket on multivectors determined by a frame bracket.
///
/// With odd generators `xi_i` it reads
/// `[P, Q] = sum_i (P dl/dxi_i) rho_i(Q) - rho_i(P) (dr/dxi_i Q) + sum_{i,j} (P dl/dxi_i) c_ij (dr/dxi_j Q)`
/// where `dl` is the right derivative, `dr` the left derivative, and `c_ij = [e_i, e_j]`.
pub fn frame_bracket(p: &Multivector, qv: &Multivector, fb: &FrameBracket) -> Multivector {
    let n = p.dim();
    assert_eq!(n, qv.dim(), "dimension mismatch");
    let mut out = Multivector::zero(n);
    let pr: Vec<Multivector> = (0..n).map(|i| p.right_deriv(i)).collect();
    let ql: Vec<Multivector> = (0..n).map(|i| qv.left_deriv(i)).collect();
    for i in 0..n {
        if !pr[i].is_zero() {
            out = &out + &pr[i].wedge(&qv.apply_field(&fb.anchors[i]));
        }
        if !ql[i].is_zero() {
            out = &out - &p.apply_field(&fb.anchors[i]).wedge(&ql[i]);
        }
    }
    if let Some(c) = &fb.structure {
        for i in 0..n {
            if pr[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if ql[j].is_zero() || c[i][j].is_zero() {
                    continue;
                }
                out = &out + &pr[i].wedge(&c[i][j]).wedge(&ql[j]);
            }
        }
    }
    out
}

/// Coordinate frame bracket of the tangent bundle.
pub fn tangent_frame(n: usize) -> FrameBracket {
    FrameBracket { anchors: (0..n).map(|i| Multivector::generator(n, i)).collect(), structure: None }
}

/// Schouten-Nijenhuis bracket.
pub fn schouten(p: &Multivector, qv: &Multivector) -> Multivector {
    frame_bracket(p, qv, &tangent_frame(p.dim()))
}

/// Checked Schouten-Nijenhuis bracket.
pub fn try_schouten(p: &Multivector, qv: &Multivector) -> Result<Multivector> {
    if p.dim() != qv.dim() {
        return Err(Error::DimensionMismatch(p.dim(), qv.dim()));
    }
    Ok(schouten(p, qv))
}

/// True when `[P, P] = 0`.
pub fn is_poisson(p: &Multivector) -> bool {
    schouten(p, p).is_zero()
}

/// Lie bracket of vector fields from the coordinate formula `[X,Y]^m = X(Y^m) - Y(X^m)`.
pub fn lie_bracket_vf(x: &Multivector, y: &Multivector) -> Multivector {
    let n = x.dim();
    let mut out = Multivector::zero(n);
    for m in 0..n {
        let ym = y.coeff(Blade::single(m));
        let xm = x.coeff(Blade::single(m));
        let mut c = TorusFunction::zero(n);
        for (b, xi) in x.terms() {
            c = &c + &(xi * &ym.partial(b.0.trailing_zeros() as usize));
        }
        for (b, yi) in y.terms() {
            c = &c - &(yi * &xm.partial(b.0.trailing_zeros() as usize));
        }
        out.add_term(Blade::single(m), c);
    }
    out
}

/// `Pi^sharp(alpha) = iota_alpha Pi` for a bivector.
pub fn sharp(pi: &Multivector, alpha: &DifferentialForm) -> Multivector {
    contract_mv(alpha, pi)
}

/// `gamma^flat(X) = iota_X gamma` for a 2-form.
pub fn flat(gamma: &DifferentialForm, x: &Multivector) -> DifferentialForm {
    contract_form(x, gamma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trigring::TrigPoly;

    fn f_sin(n: usize, i: usize) -> TorusFunction {
        let mut k = vec![0; n];
        k[i] = 1;
        TorusFunction::from_poly(TrigPoly::sin(k))
    }
    fn f_cos(n: usize, i: usize) -> TorusFunction {
        let mut k = vec![0; n];
        k[i] = 1;
        TorusFunction::from_poly(TrigPoly::cos(k))
    }

    #[test]
    fn blade_order_is_graded_lex() {
        let b = |v: &[usize]| Blade::from_indices(v).1;
        let mut v = vec![b(&[1, 2]), b(&[0, 3]), b(&[2]), b(&[0, 1]), b(&[])];
        v.sort();
        assert_eq!(v, vec![b(&[]), b(&[2]), b(&[0, 1]), b(&[0, 3]), b(&[1, 2])]);
    }

    #[test]
    fn wedge_signs() {
        let n = 3;
        let e = |i| Multivector::generator(n, i);
        assert_eq!(e(1).wedge(&e(0)), -&Multivector::basis(n, &[0, 1]));
        assert!(e(1).wedge(&e(1)).is_zero());
        assert_eq!(Multivector::basis(n, &[2, 0, 1]), Multivector::basis(n, &[0, 1, 2]));
    }

    #[test]
    fn contraction_hits_first_slot() {
        let n = 2;
        let dt2 = DifferentialForm::generator(n, 1);
        let p = Multivector::basis(n, &[0, 1]);
        assert_eq!(contract_mv(&dt2, &p), -&Multivector::generator(n, 0));
        let dt1 = DifferentialForm::generator(n, 0);
        assert_eq!(evaluate_mv(&p, &[dt1, dt2]), TorusFunction::one(n));
    }

    #[test]
    fn schouten_of_vector_fields_is_lie_bracket() {
        let n = 2;
        let x = Multivector::term(n, &[0], f_sin(n, 1));
        let y = Multivector::term(n, &[1], f_cos(n, 0));
        assert_eq!(schouten(&x, &y), lie_bracket_vf(&x, &y));
    }

    #[test]
    fn schouten_of_vector_and_function() {
        let n = 2;
        let x = Multivector::term(n, &[0], TorusFunction::one(n));
        let f = Multivector::scalar(f_sin(n, 0));
        assert_eq!(schouten(&x, &f), Multivector::scalar(f_cos(n, 0)));
        assert_eq!(schouten(&f, &x), -&Multivector::scalar(f_cos(n, 0)));
    }

    #[test]
    fn cartan_identity_d_squared_zero() {
        let n = 3;
        let w = DifferentialForm::term(n, &[0], &f_sin(n, 1) * &f_cos(n, 2));
        assert!(de_rham(&de_rham(&w)).is_zero());
    }
}

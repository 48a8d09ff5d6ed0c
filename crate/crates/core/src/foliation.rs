//! Foliation-side brackets on leafwise forms with values in the normal bundle,
//! represented in the frame `Y_a` of `G`, together with the strict morphism from
//! good multivector fields and graph involutivity of deformed foliations.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linfty::RegularPoissonStructure;
use crate::multivector::{
    contract_form, contract_mv, de_rham, evaluate_mv, lie_bracket_vf, lie_derivative_form, Blade,
    DifferentialForm, Multivector,
};
use crate::splitting::{is_good, Splitting};
use crate::trigring::{q, Gauss, TorusFunction};

/// `sum f_{I,a} dtheta_I (x) Y_a` with `I` a set of leaf indices and `a` transverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoliatedFormNF {
    dim: usize,
    terms: BTreeMap<(Blade, usize), TorusFunction>,
}

impl FoliatedFormNF {
    pub fn zero(dim: usize) -> Self {
        FoliatedFormNF { dim, terms: BTreeMap::new() }
    }
    /// `alpha (x) Y_a` for a leaf form `alpha`.
    pub fn decomposable(alpha: &DifferentialForm, a: usize) -> Self {
        let mut out = FoliatedFormNF::zero(alpha.dim());
        for (b, f) in alpha.terms() {
            out.add_term(*b, a, f.clone());
        }
        out
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn terms(&self) -> &BTreeMap<(Blade, usize), TorusFunction> {
        &self.terms
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn add_term(&mut self, b: Blade, a: usize, f: TorusFunction) {
        if f.is_zero() {
            return;
        }
        let key = (b, a);
        let v = match self.terms.remove(&key) {
            Some(c) => &c + &f,
            None => f,
        };
        if !v.is_zero() {
            self.terms.insert(key, v);
        }
    }
    pub fn coeff(&self, idx: &[usize], a: usize) -> TorusFunction {
        let (s, b) = Blade::from_indices(idx);
        self.terms
            .get(&(b, a))
            .map(|f| f.scale(&Gauss::from_int(s as i64)))
            .unwrap_or_else(|| TorusFunction::zero(self.dim))
    }
    /// Components grouped by normal direction: `a -> alpha_a` with `self = sum alpha_a (x) Y_a`.
    pub fn by_direction(&self) -> BTreeMap<usize, DifferentialForm> {
        let mut out: BTreeMap<usize, DifferentialForm> = BTreeMap::new();
        for ((b, a), f) in &self.terms {
            out.entry(*a).or_insert_with(|| DifferentialForm::zero(self.dim)).add_term(*b, f.clone());
        }
        out
    }
    /// Form degrees present.
    pub fn degrees(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.terms.keys().map(|(b, _)| b.degree()).collect();
        d.sort();
        d.dedup();
        d
    }
    pub fn scale(&self, c: &Gauss) -> Self {
        let mut out = FoliatedFormNF::zero(self.dim);
        for ((b, a), f) in &self.terms {
            out.add_term(*b, *a, f.scale(c));
        }
        out
    }
    /// Multiplies every coefficient by a function.
    pub fn mul_fn(&self, g: &TorusFunction) -> Self {
        let mut out = FoliatedFormNF::zero(self.dim);
        for ((b, a), f) in &self.terms {
            out.add_term(*b, *a, f * g);
        }
        out
    }
    pub fn radius(&self) -> i32 {
        self.terms.values().map(|f| f.radius()).max().unwrap_or(0)
    }
}

impl std::ops::Add for &FoliatedFormNF {
    type Output = FoliatedFormNF;
    fn add(self, o: &FoliatedFormNF) -> FoliatedFormNF {
        let mut out = self.clone();
        for ((b, a), f) in &o.terms {
            out.add_term(*b, *a, f.clone());
        }
        out
    }
}
impl std::ops::Sub for &FoliatedFormNF {
    type Output = FoliatedFormNF;
    fn sub(self, o: &FoliatedFormNF) -> FoliatedFormNF {
        self + &o.scale(&Gauss::from_int(-1))
    }
}

impl std::fmt::Display for FoliatedFormNF {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&crate::expr::print_foliated(self))
    }
}

/// Leafwise exterior derivative `d_F`.
pub fn leaf_differential(s: &Splitting, alpha: &DifferentialForm) -> DifferentialForm {
    s.restrict_to_leaf(&de_rham(alpha))
}

/// `pr_{T*F} L_X beta` for a leaf form `beta` extended by zero on `G`.
pub fn leaf_lie_derivative(s: &Splitting, x: &Multivector, beta: &DifferentialForm) -> DifferentialForm {
    let ext = beta.substitute(&s.leaf_coframe_images());
    s.restrict_to_leaf(&lie_derivative_form(x, &ext))
}

/// Normal component `a -> coefficient` of a vector field: its class in `TM / TF` in the frame `Y_a`.
fn normal_components(s: &Splitting, v: &Multivector) -> Vec<(usize, TorusFunction)> {
    s.transverse()
        .iter()
        .map(|&a| (a, v.coeff(Blade::single(a))))
        .filter(|(_, f)| !f.is_zero())
        .collect()
}

fn sign(e: usize) -> Gauss {
    Gauss::from_int(if e.is_multiple_of(2) { 1 } else { -1 })
}

/// `v1 = d_nabla`: the Bott connection is flat in the frame `Y_a`, so `v1` acts as `d_F` on components.
pub fn bott_differential(s: &Splitting, eta: &FoliatedFormNF) -> FoliatedFormNF {
    let mut out = FoliatedFormNF::zero(eta.dim());
    for (a, alpha) in eta.by_direction() {
        let d = leaf_differential(s, &alpha);
        let mut dd = FoliatedFormNF::decomposable(&d, a);
        // Bott term: sum_i dtheta_i ^ alpha (x) pr_N [d_i, Y_a], zero for triangular frames but kept general.
        for &i in s.leaf() {
            let br = lie_bracket_vf(&Multivector::generator(s.dim(), i), &s.frame_field(a));
            for (c, f) in normal_components(s, &br) {
                let w = DifferentialForm::generator(s.dim(), i).wedge(&alpha).mul_fn(&f);
                dd = &dd + &FoliatedFormNF::decomposable(&w, c);
            }
        }
        out = &out + &dd;
    }
    out
}

/// Binary bracket, from its formula on decomposables:
/// `v2(a (x) X, b (x) Y) = -(-1)^{|a|} (a ^ pr L_X b (x) Y - pr L_Y a ^ b (x) X + a ^ b (x) [X,Y])`.
pub fn v2(s: &Splitting, eta: &FoliatedFormNF, zeta: &FoliatedFormNF) -> FoliatedFormNF {
    let mut out = FoliatedFormNF::zero(s.dim());
    let ed = eta.by_direction();
    let zd = zeta.by_direction();
    for (&x, alpha_all) in &ed {
        let fx = s.frame_field(x);
        for d in alpha_all.degrees() {
            let alpha = alpha_all.component(d);
            for (&y, beta) in &zd {
                let fy = s.frame_field(y);
                let t1 = FoliatedFormNF::decomposable(&alpha.wedge(&leaf_lie_derivative(s, &fx, beta)), y);
                let t2 = FoliatedFormNF::decomposable(&leaf_lie_derivative(s, &fy, &alpha).wedge(beta), x);
                let ab = alpha.wedge(beta);
                let mut t3 = FoliatedFormNF::zero(s.dim());
                for (c, f) in normal_components(s, &lie_bracket_vf(&fx, &fy)) {
                    t3 = &t3 + &FoliatedFormNF::decomposable(&ab.mul_fn(&f), c);
                }
                let sum = &(&t1 - &t2) + &t3;
                out = &out - &sum.scale(&sign(d));
            }
        }
    }
    out
}

/// Ternary bracket, from its formula on decomposables; vanishes for involutive frames.
pub fn v3(s: &Splitting, eta: &FoliatedFormNF, zeta: &FoliatedFormNF, kappa: &FoliatedFormNF) -> FoliatedFormNF {
    let n = s.dim();
    let mut out = FoliatedFormNF::zero(n);
    let br = |a: usize, b: usize| s.pr_tf(&lie_bracket_vf(&s.frame_field(a), &s.frame_field(b)));
    let split = |e: &FoliatedFormNF| -> Vec<(usize, usize, DifferentialForm)> {
        let mut v = vec![];
        for (a, f) in e.by_direction() {
            for d in f.degrees() {
                v.push((a, d, f.component(d)));
            }
        }
        v
    };
    let (ea, eb, ec) = (split(eta), split(zeta), split(kappa));
    for (x, da, alpha) in &ea {
        for (y, db, beta) in &eb {
            for (z, dc, gam) in &ec {
                let t1 = contract_form(&br(*y, *z), alpha).wedge(beta).wedge(gam);
                let t2 = contract_form(&br(*x, *z), beta).wedge(alpha).wedge(gam).scale(&sign(da * db));
                let t3 = contract_form(&br(*x, *y), gam).wedge(alpha).wedge(beta).scale(&sign(db * dc + da * dc));
                let mut sum = FoliatedFormNF::decomposable(&t1, *x);
                sum = &sum - &FoliatedFormNF::decomposable(&t2, *y);
                sum = &sum + &FoliatedFormNF::decomposable(&t3, *z);
                out = &out + &sum.scale(&sign(*db));
            }
        }
    }
    out
}

/// The strict morphism `phi` from good multivector fields:
/// component `(I, a)` is `(-1)^{l-1} P(gamma^flat d_{i_1}, ..., gamma^flat d_{i_{l-1}}, dtheta_a)`.
pub fn phi(rp: &RegularPoissonStructure, p: &Multivector) -> Result<FoliatedFormNF> {
    let s = &rp.splitting;
    if !is_good(p, s) {
        return Err(Error::NotGood);
    }
    let n = s.dim();
    let gflat: Vec<DifferentialForm> =
        (0..n).map(|i| contract_form(&Multivector::generator(n, i), &rp.gamma)).collect();
    let mut out = FoliatedFormNF::zero(n);
    for l in p.degrees() {
        if l == 0 {
            continue;
        }
        let pl = p.component(l);
        for idx in subsets(s.leaf(), l - 1) {
            for &a in s.transverse() {
                let mut args: Vec<DifferentialForm> = idx.iter().map(|&i| gflat[i].clone()).collect();
                args.push(DifferentialForm::generator(n, a));
                let v = evaluate_mv(&pl, &args).scale(&sign(l - 1));
                out.add_term(Blade::from_indices(&idx).1, a, v);
            }
        }
    }
    Ok(out)
}

/// The algebra isomorphism on leafwise multivectors:
/// component `I` is `(-1)^l P(gamma^flat d_{i_1}, ..., gamma^flat d_{i_l})`.
pub fn underline_phi(rp: &RegularPoissonStructure, p: &Multivector) -> Result<DifferentialForm> {
    let s = &rp.splitting;
    let m = s.leaf_mask();
    if p.terms().keys().any(|b| b.0 & !m != 0) {
        return Err(Error::NotLeafwise);
    }
    let n = s.dim();
    let gflat: Vec<DifferentialForm> =
        (0..n).map(|i| contract_form(&Multivector::generator(n, i), &rp.gamma)).collect();
    let mut out = DifferentialForm::zero(n);
    for l in p.degrees() {
        let pl = p.component(l);
        for idx in subsets(s.leaf(), l) {
            let args: Vec<DifferentialForm> = idx.iter().map(|&i| gflat[i].clone()).collect();
            let v = evaluate_mv(&pl, &args).scale(&sign(l));
            out.add_term(Blade::from_indices(&idx).1, v);
        }
    }
    Ok(out)
}

/// All `k`-element subsets of `items`, in lexicographic order.
pub fn subsets(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if items.len() < k {
        return vec![];
    }
    let mut out = vec![];
    for (i, &x) in items.iter().enumerate() {
        for mut rest in subsets(&items[i + 1..], k - 1) {
            rest.insert(0, x);
            out.push(rest);
        }
    }
    out
}

/// Maurer-Cartan residual on the foliation side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoliationMcReport {
    pub residual: FoliatedFormNF,
    pub is_mc: bool,
    /// `[v1(eta), v2(eta,eta)/2, v3(eta,eta,eta)/6]`.
    pub parts: [FoliatedFormNF; 3],
}

pub fn foliation_mc_residual(s: &Splitting, eta: &FoliatedFormNF) -> FoliationMcReport {
    let a = bott_differential(s, eta);
    let b = v2(s, eta, eta).scale(&Gauss::real(q(1, 2)));
    let c = v3(s, eta, eta, eta).scale(&Gauss::real(q(1, 6)));
    let residual = &(&a + &b) + &c;
    FoliationMcReport { is_mc: residual.is_zero(), residual, parts: [a, b, c] }
}

/// Checks that the graph of a 1-form `eta` is an involutive distribution.
///
/// The graph is spanned by `Z_i = d_i + sum_a eta_{i,a} Y_a`; a vector field lies in
/// the span iff it equals the combination of `Z_i` given by its adapted leaf components.
pub fn graph_involutive(s: &Splitting, eta: &FoliatedFormNF) -> bool {
    let n = s.dim();
    let zf = |i: usize| -> Multivector {
        let mut z = Multivector::generator(n, i);
        for &a in s.transverse() {
            let c = eta.coeff(&[i], a);
            if !c.is_zero() {
                z = &z + &s.frame_field(a).mul_fn(&c);
            }
        }
        z
    };
    let leaf = s.leaf();
    let zs: Vec<Multivector> = leaf.iter().map(|&i| zf(i)).collect();
    for x in 0..leaf.len() {
        for y in x + 1..leaf.len() {
            let v = lie_bracket_vf(&zs[x], &zs[y]);
            let tf = s.pr_tf(&v);
            let mut rebuilt = Multivector::zero(n);
            for (r, &j) in leaf.iter().enumerate() {
                let c = tf.coeff(Blade::single(j));
                if !c.is_zero() {
                    rebuilt = &rebuilt + &zs[r].mul_fn(&c);
                }
            }
            if rebuilt != v {
                return false;
            }
        }
    }
    true
}

/// Anchor maps on leaf forms `x`:
/// `n1(x) = d_F x`, `n2(f (x) Y | x) = -f pr L_Y x`, `n3(f (x) Y, g (x) Z | x) = f g iota_{[Y,Z]} x`.
///
/// Arguments of positive form degree act through left multiplication by their form part.
pub fn n_anchor(s: &Splitting, k: usize, args: &[FoliatedFormNF], x: &DifferentialForm) -> Result<DifferentialForm> {
    if k == 0 || k > 3 || args.len() + 1 != k {
        return Err(Error::DegreeMismatch { expected: k.saturating_sub(1), found: args.len() });
    }
    let n = s.dim();
    Ok(match k {
        1 => leaf_differential(s, x),
        2 => {
            let mut out = DifferentialForm::zero(n);
            for (a, alpha) in args[0].by_direction() {
                let l = leaf_lie_derivative(s, &s.frame_field(a), x);
                out = &out - &alpha.wedge(&l);
            }
            out
        }
        _ => {
            let mut out = DifferentialForm::zero(n);
            for (a, alpha) in args[0].by_direction() {
                for (b, beta) in args[1].by_direction() {
                    let br = s.pr_tf(&lie_bracket_vf(&s.frame_field(a), &s.frame_field(b)));
                    let c = contract_form(&br, x);
                    out = &out + &alpha.wedge(&beta).wedge(&c);
                }
            }
            out
        }
    })
}

/// Contracts a good multivector's `(., 1)` part with `dtheta_a`; exposed for diagnostics.
pub fn normal_slot(p: &Multivector, a: usize) -> Multivector {
    contract_mv(&DifferentialForm::generator(p.dim(), a), p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse_form, parse_function, parse_multivector};
    use crate::linfty::l2;

    fn mv(s: &str, n: usize) -> Multivector {
        parse_multivector(s, n).unwrap()
    }

    fn form(s: &str, n: usize) -> DifferentialForm {
        parse_form(s, n).unwrap()
    }

    #[test]
    fn two_parameter_family_phi_and_v2() {
        let n = 4;
        let (f, g, h) = ("sin(t3 + t4)", "cos(t4) + 2*sin(t3)", "3 + cos(t3) + sin(t4)");
        let pi = mv(&format!("({h})*d1^d2"), n);
        let rp = RegularPoissonStructure::new(pi, Splitting::coordinate(n, &[0, 1]).unwrap()).unwrap();
        let xi = mv(&format!("({f})*d1^d3 + ({g})*d2^d4"), n);
        let p = phi(&rp, &xi).unwrap();
        let mut expected = FoliatedFormNF::decomposable(&form(&format!("-({g})/({h})*dt1"), n), 3);
        expected = &expected + &FoliatedFormNF::decomposable(&form(&format!("({f})/({h})*dt2"), n), 2);
        assert_eq!(p, expected);

        // v2(phi xi, phi xi) = -2 dt1^dt2 (x) ((g/h) d4(f/h) Y3 - (f/h) d3(g/h) Y4)
        let fh = parse_function(&format!("({f})/({h})"), n).unwrap();
        let gh = parse_function(&format!("({g})/({h})"), n).unwrap();
        let mut want = FoliatedFormNF::zero(n);
        let b12 = Blade::from_indices(&[0, 1]).1;
        want.add_term(b12, 2, (&gh * &fh.partial(3)).scale(&Gauss::from_int(-2)));
        want.add_term(b12, 3, (&fh * &gh.partial(2)).scale(&Gauss::from_int(2)));
        assert_eq!(v2(&rp.splitting, &p, &p), want);
        // strictness at arity two
        assert_eq!(phi(&rp, &l2(&rp, &xi, &xi)).unwrap(), want);
    }

    #[test]
    fn projection_example_phi_and_graph() {
        let n = 5;
        let pi = mv("d1^d2 + d3^d4", n);
        let rp = RegularPoissonStructure::new(pi, Splitting::coordinate(n, &[0, 1, 2, 3]).unwrap()).unwrap();
        let xi = mv("sin(t5)*d1^d2 + d3^d5", n);
        let p = phi(&rp, &xi).unwrap();
        assert_eq!(p, FoliatedFormNF::decomposable(&form("dt4", n), 4));
        let s = &rp.splitting;
        assert!(bott_differential(s, &p).is_zero());
        let eta = p.scale(&Gauss::real(q(7, 3)));
        assert!(foliation_mc_residual(s, &eta).is_mc);
        assert!(graph_involutive(s, &eta));
    }

    #[test]
    fn underline_phi_of_vector_field_is_omega_flat() {
        let n = 3;
        let rp = RegularPoissonStructure::new(mv("d1^d2", n), Splitting::coordinate(n, &[0, 1]).unwrap()).unwrap();
        assert_eq!(underline_phi(&rp, &mv("d1", n)).unwrap(), form("dt2", n));
        assert_eq!(underline_phi(&rp, &mv("sin(t3)", n)).unwrap(), form("sin(t3)", n));
        assert!(phi(&rp, &mv("d1^d2", n)).unwrap().is_zero());
    }

    #[test]
    fn anchor_n2_on_function() {
        let n = 3;
        let s = Splitting::coordinate(n, &[0, 1]).unwrap();
        let y = FoliatedFormNF::decomposable(&form("1", n), 2);
        let f = form("sin(t3)*cos(t1)", n);
        assert_eq!(n_anchor(&s, 2, &[y], &f).unwrap(), form("-cos(t3)*cos(t1)", n));
    }
}

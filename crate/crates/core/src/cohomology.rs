//! Exactness of cocycles for the Lichnerowicz differential and for the Bott
//! differential on normal-bundle-valued leaf forms.
//!
//! Non-exactness is certified by leaf averages: every coefficient of an exact
//! element is, in the applicable cases, a sum of leaf derivatives and so has zero
//! mean over the leaf coordinates. Exactness is certified by an explicit primitive
//! found by a truncated Fourier-mode linear solve and re-verified symbolically.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::foliation::{bott_differential, subsets, v2, FoliatedFormNF};
use crate::linfty::{l1, RegularPoissonStructure};
use crate::multivector::{Blade, DifferentialForm, Multivector};
use crate::splitting::{is_good, Splitting};
use crate::trigring::{Frequency, Gauss, TorusFunction, TrigPoly};

/// Which complex the primitive is sought in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Complex {
    /// Good multivector fields: at most one transverse slot.
    Good,
    /// All multivector fields.
    Full,
}

/// Applicability case of a leaf-average witness.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessCase {
    /// `Pi` has constant coefficients.
    ConstantPi,
    /// `Pi = h d_i ^ d_j` on a rank-two coordinate leaf with `h` constant along the leaf.
    RankTwoLeafConstantFactor,
}

impl WitnessCase {
    pub fn tag(self) -> &'static str {
        match self {
            WitnessCase::ConstantPi => "ConstantPi",
            WitnessCase::RankTwoLeafConstantFactor => "RankTwoLeafConstantFactor",
        }
    }
}

/// A component whose leaf average is nonzero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessRecord {
    pub case: WitnessCase,
    pub component: Blade,
    pub average: TorusFunction,
}

/// Result of the averaging test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AverageOutcome {
    Witness(WitnessRecord),
    /// All inspected averages vanish: no conclusion.
    Vanishes(WitnessCase),
    NotApplicable(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExactnessVerdict {
    Exact(Multivector),
    NotExact(WitnessRecord),
    /// No primitive with modes inside the box.
    Inconclusive(i32),
}

#[derive(Clone, Debug)]
pub struct SolverOptions {
    /// Truncation box; `None` uses [`default_box`].
    pub box_bound: Option<i32>,
    pub complex: Complex,
    pub parallel: bool,
    /// Largest connected block of unknowns attempted before giving up.
    pub max_block: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { box_bound: None, complex: Complex::Good, parallel: false, max_block: 20_000 }
    }
}

impl SolverOptions {
    pub fn full() -> Self {
        SolverOptions { complex: Complex::Full, ..Default::default() }
    }
}

fn pi_radius(rp: &RegularPoissonStructure) -> i32 {
    rp.pi.radius()
}

/// `radius(W) + radius(Pi) + 2`.
pub fn default_box(rp: &RegularPoissonStructure, w: &Multivector) -> i32 {
    w.radius() + pi_radius(rp) + 2
}

fn check_closed(rp: &RegularPoissonStructure, w: &Multivector) -> Result<()> {
    if l1(rp, w).is_zero() {
        Ok(())
    } else {
        Err(Error::NotClosed)
    }
}

/// Determines which averaging case applies, if any.
fn witness_case(rp: &RegularPoissonStructure, w: &Multivector, complex: Complex) -> std::result::Result<WitnessCase, String> {
    if rp.pi.terms().values().all(|f| f.as_constant().is_some()) {
        return Ok(WitnessCase::ConstantPi);
    }
    let s = &rp.splitting;
    if !s.is_coordinate() {
        return Err("non-constant Pi with a non-coordinate splitting".into());
    }
    if s.leaf().len() != 2 || rp.pi.terms().len() != 1 {
        return Err("non-constant Pi of rank other than two".into());
    }
    let h = rp.pi.terms().values().next().unwrap();
    if s.leaf().iter().any(|&i| h.depends_on(i)) {
        return Err("the factor of Pi depends on leaf coordinates".into());
    }
    if complex != Complex::Good {
        return Err("rank-two averaging applies to the good complex only".into());
    }
    // For primitives of degree one the term (dh-contraction) ^ Pi_0 is not a leaf derivative.
    if w.degrees().iter().any(|&d| d < 3) {
        return Err("rank-two averaging needs degree at least three".into());
    }
    Ok(WitnessCase::RankTwoLeafConstantFactor)
}

/// Leaf-average witness for non-exactness of `w` under `d_Pi`.
pub fn leaf_average_witness(rp: &RegularPoissonStructure, w: &Multivector, complex: Complex) -> AverageOutcome {
    let case = match witness_case(rp, w, complex) {
        Ok(c) => c,
        Err(m) => return AverageOutcome::NotApplicable(m),
    };
    let leaf = rp.splitting.leaf();
    let lm = rp.splitting.leaf_mask();
    for (b, f) in w.terms() {
        if case == WitnessCase::RankTwoLeafConstantFactor && b.0 & lm != lm {
            continue;
        }
        match f.zero_mode(leaf) {
            Err(e) => return AverageOutcome::NotApplicable(e.to_string()),
            Ok(avg) if !avg.is_zero() => {
                return AverageOutcome::Witness(WitnessRecord { case, component: *b, average: avg });
            }
            Ok(_) => {}
        }
    }
    AverageOutcome::Vanishes(case)
}

/// Orchestrates the averaging test and the truncated solver.
pub fn decide_exactness(rp: &RegularPoissonStructure, w: &Multivector, opts: &SolverOptions) -> Result<ExactnessVerdict> {
    check_closed(rp, w)?;
    if let AverageOutcome::Witness(r) = leaf_average_witness(rp, w, opts.complex) {
        return Ok(ExactnessVerdict::NotExact(r));
    }
    solve_exactness(rp, w, opts)
}

/// One term of the image of `e^{ik.theta} E_B` under `d_Pi` (after clearing denominators):
/// contributes `(p + i sum_j k_j q_j)` at mode `k + offset` of component `target`.
#[derive(Clone, Debug)]
struct Stencil {
    target: Blade,
    offset: Frequency,
    p: Gauss,
    q: Vec<Gauss>,
}

impl Stencil {
    fn coeff(&self, k: &[i32]) -> Gauss {
        let mut s = Gauss::zero();
        for (kj, qj) in k.iter().zip(&self.q) {
            if *kj != 0 && !qj.is_zero() {
                s = &s + &qj.scale(&crate::trigring::qi(*kj as i64));
            }
        }
        &self.p + &(&Gauss::i() * &s)
    }
}

fn unit_mode(n: usize, i: usize, sign: i32) -> TorusFunction {
    let mut k = vec![0; n];
    k[i] = sign;
    TorusFunction::from_poly(TrigPoly::monomial(k, Gauss::one()))
}

/// Basis fields of the unknown primitive, indexed by blades.
fn unknown_basis(s: &Splitting, degree: usize, complex: Complex) -> Vec<(Blade, Multivector)> {
    let n = s.dim();
    let all: Vec<usize> = (0..n).collect();
    let tm = s.transverse_mask();
    let mut out = vec![];
    for idx in subsets(&all, degree) {
        let b = Blade::from_indices(&idx).1;
        match complex {
            Complex::Full => out.push((b, Multivector::basis(n, &idx))),
            Complex::Good => {
                if (b.0 & tm).count_ones() > 1 {
                    continue;
                }
                let mut e = Multivector::scalar(TorusFunction::one(n));
                for &i in &idx {
                    let f = if tm & (1 << i) != 0 { s.frame_field(i) } else { Multivector::generator(n, i) };
                    e = e.wedge(&f);
                }
                out.push((b, e));
            }
        }
    }
    out
}

type Key = (Blade, Frequency);
/// Unknown of the truncated solve: a primitive basis slot and a Fourier mode.
type Unknown = (usize, Frequency);
/// A connected block of equations and the unknowns they involve.
type Block = (Vec<Key>, Vec<Unknown>);

fn freq_sub(a: &[i32], b: &[i32]) -> Frequency {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn freq_add(a: &[i32], b: &[i32]) -> Frequency {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Searches for a primitive `V` with `d_Pi V = W` whose Fourier modes lie in the box.
pub fn solve_exactness(rp: &RegularPoissonStructure, w: &Multivector, opts: &SolverOptions) -> Result<ExactnessVerdict> {
    check_closed(rp, w)?;
    let bx = opts.box_bound.unwrap_or_else(|| default_box(rp, w));
    if w.is_zero() {
        return Ok(ExactnessVerdict::Exact(Multivector::zero(w.dim())));
    }
    let degree = match w.homogeneous_degree() {
        Some(d) if d >= 1 => d,
        _ => return Ok(ExactnessVerdict::Inconclusive(bx)),
    };
    let n = w.dim();
    let s = &rp.splitting;
    let kb = bx + pi_radius(rp);
    let basis = unknown_basis(s, degree - 1, opts.complex);

    // Operator data: d_Pi(f E) = f A + sum_j d_j f M_j.
    let mut images: Vec<(Multivector, Vec<Multivector>)> = vec![];
    for (_, e) in &basis {
        let a = l1(rp, e);
        let ms: Vec<Multivector> = (0..n)
            .map(|j| {
                let shifted = l1(rp, &e.mul_fn(&unit_mode(n, j, 1))).mul_fn(&unit_mode(n, j, -1));
                (&shifted - &a).scale(&Gauss::new(crate::trigring::qi(0), crate::trigring::qi(-1)))
            })
            .collect();
        images.push((a, ms));
    }
    let mut all_fns: Vec<&TorusFunction> = w.terms().values().collect();
    for (a, ms) in &images {
        all_fns.extend(a.terms().values());
        for m in ms {
            all_fns.extend(m.terms().values());
        }
    }
    let common = TorusFunction::common_denominator(all_fns);

    let mut stencils: Vec<Vec<Stencil>> = vec![];
    for (a, ms) in &images {
        let mut targets: BTreeSet<Blade> = a.terms().keys().copied().collect();
        for m in ms {
            targets.extend(m.terms().keys().copied());
        }
        let mut st = vec![];
        for c in targets {
            let p = a.coeff(c).numerator_over(&common);
            let qs: Vec<TrigPoly> = ms.iter().map(|m| m.coeff(c).numerator_over(&common)).collect();
            let mut offsets: BTreeSet<Frequency> = p.terms().keys().cloned().collect();
            for qp in &qs {
                offsets.extend(qp.terms().keys().cloned());
            }
            for d in offsets {
                st.push(Stencil { target: c, p: p.coeff(&d), q: qs.iter().map(|qp| qp.coeff(&d)).collect(), offset: d });
            }
        }
        stencils.push(st);
    }
    let mut reverse: BTreeMap<Blade, Vec<(usize, usize)>> = BTreeMap::new();
    for (bi, st) in stencils.iter().enumerate() {
        for (si, t) in st.iter().enumerate() {
            reverse.entry(t.target).or_default().push((bi, si));
        }
    }
    let mut rhs: BTreeMap<Key, Gauss> = BTreeMap::new();
    for (c, f) in w.terms() {
        for (k, v) in f.numerator_over(&common).terms() {
            rhs.insert((*c, k.clone()), v.clone());
        }
    }
    let in_box = |k: &[i32]| k.iter().all(|x| x.abs() <= kb);

    // Connected blocks of the sparse system reachable from the right-hand side.
    let mut seen_eq: BTreeSet<Key> = BTreeSet::new();
    let mut seen_unk: BTreeSet<Unknown> = BTreeSet::new();
    let mut blocks: Vec<Block> = vec![];
    for seed in rhs.keys() {
        if seen_eq.contains(seed) {
            continue;
        }
        let mut eqs = vec![];
        let mut unks = vec![];
        let mut queue: VecDeque<Key> = VecDeque::new();
        seen_eq.insert(seed.clone());
        queue.push_back(seed.clone());
        while let Some((c, m)) = queue.pop_front() {
            eqs.push((c, m.clone()));
            for &(bi, si) in reverse.get(&c).map(|v| v.as_slice()).unwrap_or(&[]) {
                let t = &stencils[bi][si];
                let k = freq_sub(&m, &t.offset);
                if !in_box(&k) || t.coeff(&k).is_zero() || seen_unk.contains(&(bi, k.clone())) {
                    continue;
                }
                seen_unk.insert((bi, k.clone()));
                unks.push((bi, k.clone()));
                if unks.len() > opts.max_block {
                    return Ok(ExactnessVerdict::Inconclusive(bx));
                }
                for t2 in &stencils[bi] {
                    if t2.coeff(&k).is_zero() {
                        continue;
                    }
                    let key = (t2.target, freq_add(&k, &t2.offset));
                    if seen_eq.insert(key.clone()) {
                        queue.push_back(key);
                    }
                }
            }
        }
        blocks.push((eqs, unks));
    }

    let solve_block = |(eqs, unks): &Block| -> Option<Vec<(Unknown, Gauss)>> {
        let col: BTreeMap<&Unknown, usize> = unks.iter().enumerate().map(|(i, u)| (u, i)).collect();
        let rows: Vec<BTreeMap<usize, Gauss>> = eqs
            .iter()
            .map(|(c, m)| {
                let mut row: BTreeMap<usize, Gauss> = BTreeMap::new();
                for &(bi, si) in reverse.get(c).map(|v| v.as_slice()).unwrap_or(&[]) {
                    let t = &stencils[bi][si];
                    let k = freq_sub(m, &t.offset);
                    if let Some(&j) = col.get(&(bi, k.clone())) {
                        let v = t.coeff(&k);
                        let e = row.entry(j).or_insert_with(Gauss::zero);
                        *e = &*e + &v;
                    }
                }
                if let Some(r) = rhs.get(&(*c, m.clone())) {
                    row.insert(RHS, r.clone());
                }
                row.retain(|_, v| !v.is_zero());
                row
            })
            .collect();
        let x = solve_sparse(rows, unks.len())?;
        Some(unks.iter().cloned().zip(x).filter(|(_, v)| !v.is_zero()).collect())
    };
    let solved: Vec<Option<Vec<(Unknown, Gauss)>>> = if opts.parallel {
        blocks.par_iter().map(solve_block).collect()
    } else {
        blocks.iter().map(solve_block).collect()
    };

    let mut v = Multivector::zero(n);
    for part in solved {
        let Some(part) = part else {
            return Ok(ExactnessVerdict::Inconclusive(bx));
        };
        for ((bi, k), c) in part {
            let f = TorusFunction::from_poly(TrigPoly::monomial(k, c));
            v = &v + &basis[bi].1.mul_fn(&f);
        }
    }
    if rp.pi.terms().values().all(|f| f.is_real()) && w.terms().values().all(|f| f.is_real()) {
        v = (&v + &v.conj()).scale(&Gauss::real(crate::trigring::q(1, 2)));
    }
    let good_ok = opts.complex == Complex::Full || is_good(&v, s);
    if l1(rp, &v) == *w && good_ok {
        Ok(ExactnessVerdict::Exact(v))
    } else {
        Ok(ExactnessVerdict::Inconclusive(bx))
    }
}

/// Column index reserved for the right-hand side; sorts after every unknown.
const RHS: usize = usize::MAX;

/// Solves a sparse system whose rows carry the right-hand side at column [`RHS`].
/// Free variables are set to zero; returns `None` when inconsistent.
fn solve_sparse(rows: Vec<BTreeMap<usize, Gauss>>, ncols: usize) -> Option<Vec<Gauss>> {
    let mut pivots: BTreeMap<usize, BTreeMap<usize, Gauss>> = BTreeMap::new();
    for mut row in rows {
        while let Some((&c, lead)) = row.iter().next() {
            if c == RHS {
                return None;
            }
            if let Some(p) = pivots.get(&c) {
                let f = lead.clone();
                for (j, pv) in p {
                    let e = row.entry(*j).or_insert_with(Gauss::zero);
                    *e = &*e - &(&f * pv);
                    if e.is_zero() {
                        row.remove(j);
                    }
                }
            } else {
                let inv = lead.inv().expect("pivot is nonzero");
                for v in row.values_mut() {
                    *v = &*v * &inv;
                }
                pivots.insert(c, row);
                break;
            }
        }
    }
    let mut x = vec![Gauss::zero(); ncols];
    for (&c, row) in pivots.iter().rev() {
        let mut val = row.get(&RHS).cloned().unwrap_or_else(Gauss::zero);
        for (&j, v) in row.range(c + 1..) {
            if j == RHS {
                break;
            }
            val = &val - &(v * &x[j]);
        }
        x[c] = val;
    }
    Some(x)
}

/// Non-exactness witness for the Bott differential: a component with nonzero leaf average.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoliationWitness {
    pub component: Blade,
    pub direction: usize,
    pub average: TorusFunction,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FoliationVerdict {
    Exact(FoliatedFormNF),
    NotExact(FoliationWitness),
    Inconclusive(String),
}

/// Decides `v1`-exactness of a normal-bundle-valued leaf form.
///
/// In the frame `Y_a` the Bott differential acts as `d_F` on each component, a
/// constant-coefficient operator. A leaf mode `m != 0` is contractible through
/// `iota_{d_i} / (i m_i)` for the first leaf index with `m_i != 0`; the zero leaf mode
/// must vanish.
pub fn foliation_exactness(s: &Splitting, target: &FoliatedFormNF) -> FoliationVerdict {
    let n = s.dim();
    let leaf = s.leaf();
    for ((b, a), f) in target.terms() {
        match f.zero_mode(leaf) {
            Err(e) => return FoliationVerdict::Inconclusive(e.to_string()),
            Ok(avg) if !avg.is_zero() => {
                return FoliationVerdict::NotExact(FoliationWitness { component: *b, direction: *a, average: avg })
            }
            Ok(_) => {}
        }
    }
    let mut prim = FoliatedFormNF::zero(n);
    for ((b, a), f) in target.terms() {
        for (k, c) in f.numerator().terms() {
            let Some(&i) = leaf.iter().find(|&&i| k[i] != 0) else { continue };
            if !b.contains(i) {
                continue;
            }
            let mode = TorusFunction::from_parts(TrigPoly::monomial(k.clone(), c.clone()), f.denominator_factors().to_vec());
            let scale = Gauss::new(crate::trigring::qi(0), crate::trigring::q(-1, k[i] as i64));
            let form = DifferentialForm::from_terms(n, [(*b, mode.scale(&scale))]);
            let contracted = crate::multivector::contract_form(&Multivector::generator(n, i), &form);
            prim = &prim + &FoliatedFormNF::decomposable(&contracted, *a);
        }
    }
    if bott_differential(s, &prim) == *target {
        FoliationVerdict::Exact(prim)
    } else {
        FoliationVerdict::Inconclusive("target is not closed".into())
    }
}

/// Kuranishi class `[v2(eta, eta)]` of a `v1`-cocycle.
pub fn foliation_kuranishi_decide(s: &Splitting, eta: &FoliatedFormNF) -> Result<(FoliatedFormNF, FoliationVerdict)> {
    if !bott_differential(s, eta).is_zero() {
        return Err(Error::NotClosed);
    }
    let k = v2(s, eta, eta);
    let verdict = foliation_exactness(s, &k);
    Ok((k, verdict))
}

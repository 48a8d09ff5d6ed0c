//! The L-infinity[1] brackets controlling deformations of a regular Poisson
//! structure with a chosen complement `G`, together with gauge transforms, the
//! Dirac exponential map and polynomial deformation paths.

use crate::error::{Error, Result};
use crate::matrix::FnMatrix;
use crate::multivector::{
    contract_form, evaluate_form, frame_bracket, is_poisson, lie_bracket_vf, lie_derivative_form,
    schouten, sharp, Blade, DifferentialForm, FrameBracket, Multivector,
};
use crate::splitting::{bigrade_decompose, gamma_from_omega, leafwise_symplectic, Splitting, SymplecticData};
use crate::trigring::{certify_nonvanishing, q, Gauss, TorusFunction, Q};

/// A regular Poisson bivector with coordinate leaves and a chosen complement.
#[derive(Clone, Debug)]
pub struct RegularPoissonStructure {
    pub pi: Multivector,
    pub splitting: Splitting,
    pub symp: SymplecticData,
    pub gamma: DifferentialForm,
    /// Anchors `pr_G d_i` and structure fields `[d_i, d_j]_gamma` of the twisted bracket.
    pub frame: FrameBracket,
    /// The Courant tensor of `G` twisted by `gamma`.
    pub upsilon: DifferentialForm,
}

impl RegularPoissonStructure {
    /// Validates `pi` against the splitting and precomputes the bracket data.
    pub fn new(pi: Multivector, splitting: Splitting) -> Result<Self> {
        if pi.dim() != splitting.dim() {
            return Err(Error::DimensionMismatch(pi.dim(), splitting.dim()));
        }
        let jac = schouten(&pi, &pi);
        if !jac.is_zero() {
            return Err(Error::NotPoisson(jac.to_string()));
        }
        let symp = leafwise_symplectic(&pi, &splitting)?;
        let gamma = gamma_from_omega(&symp.omega, &splitting);
        let n = pi.dim();
        let anchors: Vec<Multivector> =
            (0..n).map(|i| splitting.pr_g(&Multivector::generator(n, i))).collect();
        let mut rp = RegularPoissonStructure {
            pi,
            splitting,
            symp,
            gamma,
            frame: FrameBracket { anchors, structure: None },
            upsilon: DifferentialForm::zero(n),
        };
        let mut c = vec![vec![Multivector::zero(n); n]; n];
        #[allow(clippy::needless_range_loop)]
        for i in 0..n {
            for j in i + 1..n {
                let b = bracket_gamma_vec(&rp, &Multivector::generator(n, i), &Multivector::generator(n, j));
                c[j][i] = -&b;
                c[i][j] = b;
            }
        }
        rp.frame.structure = Some(c);
        rp.upsilon = courant_tensor_direct(&rp);
        Ok(rp)
    }
    pub fn dim(&self) -> usize {
        self.pi.dim()
    }
    /// Half the rank of the leaves.
    pub fn half_rank(&self) -> usize {
        self.splitting.leaf().len() / 2
    }
}

/// `l1(P) = [Pi, P]`, the Lichnerowicz differential.
pub fn l1(rp: &RegularPoissonStructure, p: &Multivector) -> Multivector {
    schouten(&rp.pi, p)
}

/// The Lichnerowicz differential of an arbitrary bivector.
pub fn lichnerowicz(pi: &Multivector, p: &Multivector) -> Result<Multivector> {
    if let Some(d) = pi.homogeneous_degree() {
        if d != 2 {
            return Err(Error::DegreeMismatch { expected: 2, found: d });
        }
    }
    if pi.dim() != p.dim() {
        return Err(Error::DimensionMismatch(pi.dim(), p.dim()));
    }
    Ok(schouten(pi, p))
}

/// Twisted bracket of vector fields from its defining formula:
/// `[X,Y]_gamma = [pr_G X, pr_G Y] - Pi^sharp(L_{pr_G X} iota_Y gamma - L_{pr_G Y} iota_X gamma)`.
pub fn bracket_gamma_vec(rp: &RegularPoissonStructure, x: &Multivector, y: &Multivector) -> Multivector {
    let s = &rp.splitting;
    let xg = s.pr_g(x);
    let yg = s.pr_g(y);
    let form = &lie_derivative_form(&xg, &contract_form(y, &rp.gamma))
        - &lie_derivative_form(&yg, &contract_form(x, &rp.gamma));
    &lie_bracket_vf(&xg, &yg) - &sharp(&rp.pi, &form)
}

/// Extension of the twisted bracket to multivectors as a graded biderivation.
pub fn bracket_gamma(rp: &RegularPoissonStructure, p: &Multivector, qv: &Multivector) -> Multivector {
    frame_bracket(p, qv, &rp.frame)
}

fn parity_sign(d: usize) -> Gauss {
    Gauss::from_int(if d.is_multiple_of(2) { 1 } else { -1 })
}

/// `l2(P, Q) = (-1)^{|P|} [P, Q]_gamma` with `|P| = deg P - 2`, on each homogeneous part of `P`.
pub fn l2(rp: &RegularPoissonStructure, p: &Multivector, qv: &Multivector) -> Multivector {
    let mut out = Multivector::zero(rp.dim());
    for d in p.degrees() {
        let b = bracket_gamma(rp, &p.component(d), qv);
        out = &out + &b.scale(&parity_sign(d));
    }
    out
}

/// Courant tensor evaluated on coordinate fields:
/// `Upsilon(X,Y,Z) = gamma(X,[pr_G Y, pr_G Z]) + cyclic`.
fn courant_tensor_direct(rp: &RegularPoissonStructure) -> DifferentialForm {
    let n = rp.dim();
    let s = &rp.splitting;
    let e = |i: usize| Multivector::generator(n, i);
    let g = |i: usize| s.pr_g(&e(i));
    let term = |x: usize, y: usize, z: usize| evaluate_form(&rp.gamma, &[e(x), lie_bracket_vf(&g(y), &g(z))]);
    let mut out = DifferentialForm::zero(n);
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let v = &(&term(i, j, k) + &term(j, k, i)) + &term(k, i, j);
                out.add_term(Blade::from_indices(&[i, j, k]).1, v);
            }
        }
    }
    out
}

/// The Courant tensor of `G` twisted by `gamma`, as a 3-form.
pub fn courant_tensor(rp: &RegularPoissonStructure) -> DifferentialForm {
    rp.upsilon.clone()
}

/// `(P^sharp ^ Q^sharp ^ R^sharp) Upsilon`: sum over ordered coordinate triples of
/// `Upsilon_{ijk} iota_{dtheta_i} P ^ iota_{dtheta_j} Q ^ iota_{dtheta_k} R`.
///
/// On vector fields this is `Upsilon(X, Y, Z)`.
pub fn sharp_wedge(args: &[Multivector], upsilon: &DifferentialForm) -> Result<Multivector> {
    if args.len() != 3 {
        return Err(Error::DegreeMismatch { expected: 3, found: args.len() });
    }
    if let Some(d) = upsilon.homogeneous_degree() {
        if d != 3 {
            return Err(Error::DegreeMismatch { expected: 3, found: d });
        }
    }
    let n = args[0].dim();
    let ip: Vec<Vec<Multivector>> = args
        .iter()
        .map(|a| (0..n).map(|i| a.left_deriv(i)).collect())
        .collect();
    let mut out = Multivector::zero(n);
    for (b, u) in upsilon.terms() {
        let idx = b.indices();
        let perms = [
            ([0, 1, 2], 1),
            ([1, 2, 0], 1),
            ([2, 0, 1], 1),
            ([1, 0, 2], -1),
            ([0, 2, 1], -1),
            ([2, 1, 0], -1),
        ];
        for (p, sgn) in perms {
            let (i, j, k) = (idx[p[0]], idx[p[1]], idx[p[2]]);
            if ip[0][i].is_zero() || ip[1][j].is_zero() || ip[2][k].is_zero() {
                continue;
            }
            let w = ip[0][i].wedge(&ip[1][j]).wedge(&ip[2][k]);
            out = &out + &w.mul_fn(u).scale(&Gauss::from_int(sgn));
        }
    }
    Ok(out)
}

/// `l3(P, Q, R) = (-1)^{|Q|+1} (P^sharp ^ Q^sharp ^ R^sharp) Upsilon`, on homogeneous parts of `Q`.
///
/// With first-slot contractions and `l1 = [Pi, .]`, this overall sign is the one for which
/// the generalized Jacobi identities hold when the complement is not involutive.
pub fn l3(rp: &RegularPoissonStructure, p: &Multivector, qv: &Multivector, r: &Multivector) -> Multivector {
    if rp.upsilon.is_zero() {
        return Multivector::zero(rp.dim());
    }
    let mut out = Multivector::zero(rp.dim());
    for d in qv.degrees() {
        let v = sharp_wedge(&[p.clone(), qv.component(d), r.clone()], &rp.upsilon).expect("arity 3");
        out = &out - &v.scale(&parity_sign(d));
    }
    out
}

/// Maurer-Cartan residual `l1(Z) + l2(Z,Z)/2 + l3(Z,Z,Z)/6` with its parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct McReport {
    pub residual: Multivector,
    pub is_mc: bool,
    /// `[l1(Z), l2(Z,Z)/2, l3(Z,Z,Z)/6]`.
    pub parts: [Multivector; 3],
}

pub fn mc_residual(rp: &RegularPoissonStructure, z: &Multivector) -> McReport {
    let a = l1(rp, z);
    let b = l2(rp, z, z).scale_q(&q(1, 2));
    let c = l3(rp, z, z, z).scale_q(&q(1, 6));
    let residual = &(&a + &b) + &c;
    McReport { is_mc: residual.is_zero(), residual, parts: [a, b, c] }
}

/// Kuranishi cochain `l2(Z, Z)` of an infinitesimal deformation.
pub fn kuranishi_cochain(rp: &RegularPoissonStructure, z: &Multivector) -> Result<Multivector> {
    let d = l1(rp, z);
    if !d.is_zero() {
        return Err(Error::NotACocycle(d.to_string()));
    }
    Ok(l2(rp, z, z))
}

/// Matrix of `Z^sharp`: column `i` holds the components of `iota_{dtheta_i} Z`.
pub fn sharp_matrix(z: &Multivector) -> FnMatrix {
    let n = z.dim();
    let mut m = FnMatrix::zero(n, n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                m.set(j, i, z.coeff_of(&[i, j]));
            }
        }
    }
    m
}

/// Matrix of `gamma^flat`: column `i` holds the components of `iota_{d_i} gamma`.
pub fn flat_matrix(g: &DifferentialForm) -> FnMatrix {
    let n = g.dim();
    let mut m = FnMatrix::zero(n, n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                m.set(j, i, g.coeff_of(&[i, j]));
            }
        }
    }
    m
}

fn bivector_from_sharp(m: &FnMatrix) -> Multivector {
    let n = m.n;
    let mut out = Multivector::zero(m.dim);
    for i in 0..n {
        for j in i + 1..n {
            debug_assert_eq!(m.get(j, i), &-m.get(i, j), "sharp matrix must be skew");
            out.add_term(Blade::from_indices(&[i, j]).1, m.get(j, i).clone());
        }
    }
    out
}

fn form_from_flat(m: &FnMatrix) -> DifferentialForm {
    let n = m.n;
    let mut out = DifferentialForm::zero(m.dim);
    for i in 0..n {
        for j in i + 1..n {
            out.add_term(Blade::from_indices(&[i, j]).1, m.get(j, i).clone());
        }
    }
    out
}

/// Gauge transform `Z^gamma` with `(Z^gamma)^sharp = Z^sharp (id + gamma^flat Z^sharp)^{-1}`.
pub fn gauge_transform_bivector(z: &Multivector, g: &DifferentialForm) -> Result<Multivector> {
    if z.dim() != g.dim() {
        return Err(Error::DimensionMismatch(z.dim(), g.dim()));
    }
    let n = z.dim();
    if z.is_zero() {
        return Ok(Multivector::zero(n));
    }
    let zs = sharp_matrix(z);
    let m = FnMatrix::identity(n, n).add(&flat_matrix(g).mul(&zs));
    let det = m.det();
    let inv_det = match det.recip() {
        Ok(inv) => inv,
        Err(_) => skew_product_inverse_det(&flat_matrix(g), &zs).ok_or_else(|| Error::OutsideGaugeDomain(det.to_string()))?,
    };
    let r = zs.mul(&m.adjugate());
    let mut out = bivector_from_sharp(&r);
    out = out.mul_fn(&inv_det);
    Ok(out)
}

/// Inverse of `det(id + A B)` for skew `A`, `B`, certified through the Pfaffian of
/// the skew block matrix `[[A, id], [-id, B]]`, whose square is that determinant.
fn skew_product_inverse_det(a: &FnMatrix, b: &FnMatrix) -> Option<TorusFunction> {
    let n = a.n;
    let mut k = FnMatrix::zero(2 * n, a.dim);
    for i in 0..n {
        for j in 0..n {
            k.set(i, j, a.get(i, j).clone());
            k.set(n + i, n + j, b.get(i, j).clone());
        }
        k.set(i, n + i, TorusFunction::one(a.dim));
        k.set(n + i, i, -&TorusFunction::one(a.dim));
    }
    let inv_pf = k.pfaffian().recip().ok()?;
    Some(&inv_pf * &inv_pf)
}

/// Dirac exponential map `exp_G(Z) = Pi + Z^gamma`.
pub fn exp_g(rp: &RegularPoissonStructure, z: &Multivector) -> Result<Multivector> {
    Ok(&rp.pi + &gauge_transform_bivector(z, &rp.gamma)?)
}

/// Gauge transform of `Pi` by the 2-form `t beta`.
pub fn gauge_transform_poisson(rp: &RegularPoissonStructure, beta: &DifferentialForm, t: &Q) -> Result<Multivector> {
    gauge_transform_bivector(&rp.pi, &beta.scale_q(t))
}

/// First-order term `-Pi^sharp beta^flat Pi^sharp` of `t -> gauge_transform_poisson(beta, t)`.
pub fn gauge_first_order(rp: &RegularPoissonStructure, beta: &DifferentialForm) -> Multivector {
    let ps = sharp_matrix(&rp.pi);
    let m = ps.mul(&flat_matrix(beta)).mul(&ps).scale(&Gauss::from_int(-1));
    bivector_from_sharp(&m)
}

/// `Lambda^2 Pi^sharp (beta)`: the bivector `(a, b) -> beta(Pi^sharp a, Pi^sharp b)`.
pub fn wedge2_sharp(rp: &RegularPoissonStructure, beta: &DifferentialForm) -> Multivector {
    let n = rp.dim();
    let images: Vec<Multivector> = (0..n).map(|i| sharp(&rp.pi, &DifferentialForm::generator(n, i))).collect();
    let mut out = Multivector::zero(n);
    for i in 0..n {
        for j in i + 1..n {
            out.add_term(Blade::from_indices(&[i, j]).1, evaluate_form(beta, &[images[i].clone(), images[j].clone()]));
        }
    }
    out
}

/// The 2-form `beta_Z` with `beta_Z^flat = -gamma^flat Z^sharp gamma^flat`.
pub fn leafwise_gauge_form(rp: &RegularPoissonStructure, z: &Multivector) -> DifferentialForm {
    let gb = flat_matrix(&rp.gamma);
    let m = gb.mul(&sharp_matrix(z)).mul(&gb).scale(&Gauss::from_int(-1));
    form_from_flat(&m)
}

/// Polynomial path `sum_m t^m Z_m` of multivectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeformationPath {
    coeffs: Vec<Multivector>,
}

impl DeformationPath {
    pub fn new(mut coeffs: Vec<Multivector>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        DeformationPath { coeffs }
    }
    pub fn coeffs(&self) -> &[Multivector] {
        &self.coeffs
    }
    pub fn dim(&self) -> usize {
        self.coeffs[0].dim()
    }
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
    /// Coefficient of `t^m`.
    pub fn coeff(&self, m: usize) -> Multivector {
        self.coeffs.get(m).cloned().unwrap_or_else(|| Multivector::zero(self.dim()))
    }
    fn convolve(&self, o: &Self, op: impl Fn(&Multivector, &Multivector) -> Multivector) -> Self {
        let n = self.dim();
        let mut out = vec![Multivector::zero(n); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                if a.is_zero() || b.is_zero() {
                    continue;
                }
                out[i + j] = &out[i + j] + &op(a, b);
            }
        }
        DeformationPath::new(out)
    }
    pub fn wedge(&self, o: &Self) -> Self {
        self.convolve(o, |a, b| a.wedge(b))
    }
    pub fn schouten(&self, o: &Self) -> Self {
        self.convolve(o, schouten)
    }
    /// `Pi_t^{wedge m}`.
    pub fn wedge_power(&self, m: usize) -> Self {
        let n = self.dim();
        let mut out = DeformationPath::new(vec![Multivector::scalar(TorusFunction::one(n))]);
        for _ in 0..m {
            out = out.wedge(self);
        }
        out
    }
    /// Value at a rational parameter.
    pub fn at(&self, t: &Q) -> Multivector {
        let mut out = Multivector::zero(self.dim());
        let mut tk = Q::from_integer(1.into());
        for c in &self.coeffs {
            out = &out + &c.scale_q(&tk);
            tk *= t;
        }
        out
    }
}

/// A claim checked by [`verify_path`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PathClaim {
    /// `[Pi_t, Pi_t] = 0` as a polynomial identity in `t`.
    PoissonIdentically,
    /// `Pi_t^{wedge m} = 0` identically.
    WedgePowerVanishes(usize),
    /// `Pi_t^{wedge m}` equals the given path identically.
    WedgePowerEquals(usize, DeformationPath),
    /// The coefficient of `t` equals `Z`.
    TangentEquals(Multivector),
    /// At each rational `t`, the rank is certified to be the given constant.
    RankCertAt(Vec<Q>, usize),
}

/// Outcome of one path claim.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClaimOutcome {
    pub claim: PathClaim,
    pub holds: bool,
    /// The computed quantity the claim was compared against, as canonical text.
    pub computed: String,
}

/// Checks claims about a polynomial path starting at `rp.pi`.
pub fn verify_path(rp: &RegularPoissonStructure, path: &DeformationPath, claims: &[PathClaim]) -> Result<Vec<ClaimOutcome>> {
    if path.coeff(0) != rp.pi {
        return Err(Error::PathBase);
    }
    let mut out = vec![];
    for c in claims {
        let (holds, computed) = match c {
            PathClaim::PoissonIdentically => {
                let s = path.schouten(path);
                (s.is_zero(), crate::expr::print_path(s.coeffs()))
            }
            PathClaim::WedgePowerVanishes(m) => {
                let w = path.wedge_power(*m);
                (w.is_zero(), crate::expr::print_path(w.coeffs()))
            }
            PathClaim::WedgePowerEquals(m, expected) => {
                let w = path.wedge_power(*m);
                (w == *expected || (w.is_zero() && expected.is_zero()), crate::expr::print_path(w.coeffs()))
            }
            PathClaim::TangentEquals(z) => {
                let t = path.coeff(1);
                (t == *z, t.to_string())
            }
            PathClaim::RankCertAt(ts, rank) => {
                let mut ok = true;
                let mut found = vec![];
                for t in ts {
                    let r = certified_rank(&path.at(t));
                    ok &= r == Some(*rank);
                    found.push(r.map(|x| x.to_string()).unwrap_or_else(|| "uncertified".into()));
                }
                (ok, found.join(","))
            }
        };
        out.push(ClaimOutcome { claim: c.clone(), holds, computed });
    }
    Ok(out)
}

/// Rank of a bivector certified by wedge powers: `2m` when `Pi^m` has a certified
/// nowhere-vanishing coefficient and `Pi^{m+1} = 0`.
pub fn certified_rank(pi: &Multivector) -> Option<usize> {
    let n = pi.dim();
    let mut power = Multivector::scalar(TorusFunction::one(n));
    let mut m = 0;
    loop {
        let next = power.wedge(pi);
        if next.is_zero() {
            break;
        }
        power = next;
        m += 1;
    }
    if m == 0 {
        return Some(0);
    }
    let certified = power.terms().values().any(|f| {
        f.is_polynomial() && certify_nonvanishing(f.numerator()).is_some()
            || !f.is_polynomial() && f.recip().is_ok()
    });
    certified.then_some(2 * m)
}

/// Anchor maps `rho_k(args | x) = l_k(args, x)` for leafwise `x`.
pub fn anchor_rho(rp: &RegularPoissonStructure, k: usize, args: &[Multivector], x: &Multivector) -> Result<Multivector> {
    if k == 0 || k > 3 || args.len() + 1 != k {
        return Err(Error::DegreeMismatch { expected: k.saturating_sub(1), found: args.len() });
    }
    let m = rp.splitting.leaf_mask();
    if x.terms().keys().any(|b| b.0 & !m != 0) {
        return Err(Error::NotLeafwise);
    }
    let out = match k {
        1 => l1(rp, x),
        2 => l2(rp, &args[0], x),
        _ => l3(rp, &args[0], &args[1], x),
    };
    if bigrade_decompose(&out, &rp.splitting).keys().any(|g| g.q != 0) {
        return Err(Error::NotLeafwise);
    }
    Ok(out)
}

/// True when `pi` is Poisson.
pub fn check_poisson(pi: &Multivector) -> bool {
    is_poisson(pi)
}

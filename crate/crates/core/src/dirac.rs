//! Pointwise linear algebra of `V (+) V*` over the rationals: Lagrangian
//! subspaces, graphs, gauge actions and the fiberwise exponential map.
//!
//! Conventions: a bivector `Z` is the skew matrix `Z[i][j] = Z^{ij}` and acts on a
//! row covector by `Z^sharp(alpha) = alpha Z`; a two-form `g` acts on a row vector by
//! `g^flat(X) = X g`. Then the gauge transform is `Z^g = (I + Z g)^{-1} Z`.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::trigring::Q;

/// Dense rational matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Vec<Q>>,
}

impl QMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, data: vec![vec![Q::zero(); cols]; rows] }
    }
    pub fn identity(n: usize) -> Self {
        let mut m = QMatrix::zero(n, n);
        for i in 0..n {
            m.data[i][i] = Q::one();
        }
        m
    }
    pub fn from_rows(data: Vec<Vec<Q>>) -> Self {
        let rows = data.len();
        let cols = data.first().map(|r| r.len()).unwrap_or(0);
        QMatrix { rows, cols, data }
    }
    pub fn from_ints(data: &[&[i64]]) -> Self {
        QMatrix::from_rows(data.iter().map(|r| r.iter().map(|&x| Q::from_integer(x.into())).collect()).collect())
    }
    pub fn get(&self, i: usize, j: usize) -> &Q {
        &self.data[i][j]
    }
    pub fn transpose(&self) -> Self {
        let mut out = QMatrix::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j][i] = self.data[i][j].clone();
            }
        }
        out
    }
    pub fn mul(&self, o: &QMatrix) -> Self {
        let mut out = QMatrix::zero(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self.data[i][k].is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    out.data[i][j] += &self.data[i][k] * &o.data[k][j];
                }
            }
        }
        out
    }
    pub fn add(&self, o: &QMatrix) -> Self {
        let mut out = self.clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[i][j] += &o.data[i][j];
            }
        }
        out
    }
    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for r in out.data.iter_mut() {
            for v in r.iter_mut() {
                *v = -v.clone();
            }
        }
        out
    }
    pub fn sub(&self, o: &QMatrix) -> Self {
        self.add(&o.neg())
    }
    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| r.iter().all(|v| v.is_zero()))
    }
    pub fn is_skew(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..self.cols).all(|j| self.data[i][j] == -self.data[j][i].clone()))
    }
    pub fn rank(&self) -> usize {
        rref(&self.data, self.cols).len()
    }
    /// Inverse of a square matrix, `None` when singular.
    pub fn inverse(&self) -> Option<QMatrix> {
        let n = self.rows;
        let aug: Vec<Vec<Q>> = (0..n)
            .map(|i| {
                let mut r = self.data[i].clone();
                r.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
                r
            })
            .collect();
        let red = rref(&aug, 2 * n);
        if red.len() < n || (0..n).any(|i| red[i][i] != Q::one()) {
            return None;
        }
        Some(QMatrix::from_rows(red.into_iter().map(|r| r[n..].to_vec()).collect()))
    }
}

/// Reduced row echelon form, keeping only nonzero rows; pivots are searched in the first `cols` columns.
pub fn rref(rows: &[Vec<Q>], cols: usize) -> Vec<Vec<Q>> {
    let mut m: Vec<Vec<Q>> = rows.to_vec();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = Q::one() / &m[r][c];
        for v in m[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let pivot = m[r].clone();
                for (v, pv) in m[i].iter_mut().zip(pivot.iter()) {
                    *v -= &f * pv;
                }
            }
        }
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    m.retain(|row| row.iter().any(|v| !v.is_zero()));
    m
}

fn row_mul(v: &[Q], m: &QMatrix) -> Vec<Q> {
    (0..m.cols).map(|j| v.iter().enumerate().fold(Q::zero(), |acc, (i, x)| acc + x * &m.data[i][j])).collect()
}

fn unit(m: usize, i: usize) -> Vec<Q> {
    (0..m).map(|j| if i == j { Q::one() } else { Q::zero() }).collect()
}

/// An element `x + a` of `V (+) V*`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralizedVector {
    pub x: Vec<Q>,
    pub a: Vec<Q>,
}

impl GeneralizedVector {
    pub fn new(x: Vec<Q>, a: Vec<Q>) -> Self {
        GeneralizedVector { x, a }
    }
    pub fn vector(x: Vec<Q>) -> Self {
        let m = x.len();
        GeneralizedVector { x, a: vec![Q::zero(); m] }
    }
    pub fn covector(a: Vec<Q>) -> Self {
        let m = a.len();
        GeneralizedVector { x: vec![Q::zero(); m], a }
    }
    pub fn dim(&self) -> usize {
        self.x.len()
    }
    fn flat(&self) -> Vec<Q> {
        self.x.iter().chain(self.a.iter()).cloned().collect()
    }
    fn unflat(v: &[Q], m: usize) -> Self {
        GeneralizedVector { x: v[..m].to_vec(), a: v[m..].to_vec() }
    }
}

/// The symmetric pairing `<<X + alpha, Y + beta>> = alpha(Y) + beta(X)`.
pub fn pairing(u: &GeneralizedVector, v: &GeneralizedVector) -> Result<Q> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch(u.dim(), v.dim()));
    }
    let mut s = Q::zero();
    for i in 0..u.dim() {
        s += &u.a[i] * &v.x[i] + &v.a[i] * &u.x[i];
    }
    Ok(s)
}

/// A subspace of `V (+) V*` stored in canonical reduced row echelon form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSubspace {
    m: usize,
    rows: Vec<Vec<Q>>,
}

impl LinearSubspace {
    pub fn span(m: usize, gens: &[GeneralizedVector]) -> Self {
        let flat: Vec<Vec<Q>> = gens.iter().map(|g| g.flat()).collect();
        LinearSubspace { m, rows: rref(&flat, 2 * m) }
    }
    /// `V` itself.
    pub fn tangent(m: usize) -> Self {
        LinearSubspace::span(m, &(0..m).map(|i| GeneralizedVector::vector(unit(m, i))).collect::<Vec<_>>())
    }
    /// `V*` itself.
    pub fn cotangent(m: usize) -> Self {
        LinearSubspace::span(m, &(0..m).map(|i| GeneralizedVector::covector(unit(m, i))).collect::<Vec<_>>())
    }
    pub fn ambient(&self) -> usize {
        self.m
    }
    pub fn dim(&self) -> usize {
        self.rows.len()
    }
    pub fn basis(&self) -> Vec<GeneralizedVector> {
        self.rows.iter().map(|r| GeneralizedVector::unflat(r, self.m)).collect()
    }
    pub fn sum(&self, o: &LinearSubspace) -> LinearSubspace {
        let mut all = self.basis();
        all.extend(o.basis());
        LinearSubspace::span(self.m, &all)
    }
    /// `dim(self + o) = 2m`; for Lagrangians this is trivial intersection.
    pub fn transverse(&self, o: &LinearSubspace) -> bool {
        self.sum(o).dim() == 2 * self.m
    }
    pub fn intersection_dim(&self, o: &LinearSubspace) -> usize {
        self.dim() + o.dim() - self.sum(o).dim()
    }
    /// Vector parts of the elements, as a subspace of `V`.
    pub fn vector_parts(&self) -> Vec<Vec<Q>> {
        rref(&self.rows.iter().map(|r| r[..self.m].to_vec()).collect::<Vec<_>>(), self.m)
    }
}

/// `dim L = m` and the pairing vanishes on `L x L`.
pub fn is_lagrangian(l: &LinearSubspace) -> bool {
    let b = l.basis();
    l.dim() == l.ambient() && b.iter().all(|u| b.iter().all(|v| pairing(u, v).map(|p| p.is_zero()).unwrap_or(false)))
}

/// Data whose graph is a Lagrangian subspace.
#[derive(Clone, Debug)]
pub enum GraphData {
    /// `{ Z^sharp(alpha) + alpha }`.
    Bivector(QMatrix),
    /// `{ X + g^flat(X) }`.
    TwoForm(QMatrix),
    /// `D (+) D^0` for `D` spanned by the given vectors.
    Distribution(usize, Vec<Vec<Q>>),
}

fn skew(m: &QMatrix) -> Result<()> {
    if m.is_skew() {
        Ok(())
    } else {
        Err(Error::NotSkew)
    }
}

/// Annihilator of the span of `vs` in `V*`.
pub fn annihilator(m: usize, vs: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let red = rref(vs, m);
    let pivots: Vec<usize> = red.iter().map(|r| r.iter().position(|v| !v.is_zero()).unwrap()).collect();
    let mut out = vec![];
    for f in (0..m).filter(|c| !pivots.contains(c)) {
        let mut a = unit(m, f);
        for (r, &p) in red.iter().zip(&pivots) {
            a[p] = -r[f].clone();
        }
        out.push(a);
    }
    out
}

pub fn graph_of(data: &GraphData) -> Result<LinearSubspace> {
    let l = match data {
        GraphData::Bivector(z) => {
            skew(z)?;
            let m = z.rows;
            let gens: Vec<GeneralizedVector> =
                (0..m).map(|i| GeneralizedVector::new(z.data[i].clone(), unit(m, i))).collect();
            LinearSubspace::span(m, &gens)
        }
        GraphData::TwoForm(g) => {
            skew(g)?;
            let m = g.rows;
            let gens: Vec<GeneralizedVector> =
                (0..m).map(|i| GeneralizedVector::new(unit(m, i), g.data[i].clone())).collect();
            LinearSubspace::span(m, &gens)
        }
        GraphData::Distribution(m, d) => {
            let mut gens: Vec<GeneralizedVector> = d.iter().map(|v| GeneralizedVector::vector(v.clone())).collect();
            gens.extend(annihilator(*m, d).into_iter().map(GeneralizedVector::covector));
            LinearSubspace::span(*m, &gens)
        }
    };
    debug_assert!(is_lagrangian(&l));
    Ok(l)
}

/// Orthogonal transformations of `V (+) V*`.
#[derive(Clone, Debug)]
pub enum Gauge {
    /// `X + alpha -> X + alpha + g^flat(X)`.
    ByTwoForm(QMatrix),
    /// `X + alpha -> X + Pi^sharp(alpha) + alpha`.
    ByBivector(QMatrix),
}

pub fn gauge_action(g: &Gauge, l: &LinearSubspace) -> Result<LinearSubspace> {
    let m = l.ambient();
    let image: Vec<GeneralizedVector> = match g {
        Gauge::ByTwoForm(t) => {
            skew(t)?;
            l.basis()
                .into_iter()
                .map(|u| {
                    let gx = row_mul(&u.x, t);
                    GeneralizedVector::new(u.x.clone(), u.a.iter().zip(gx).map(|(a, b)| a + b).collect())
                })
                .collect()
        }
        Gauge::ByBivector(p) => {
            skew(p)?;
            l.basis()
                .into_iter()
                .map(|u| {
                    let pa = row_mul(&u.a, p);
                    GeneralizedVector::new(u.x.iter().zip(pa).map(|(a, b)| a + b).collect(), u.a.clone())
                })
                .collect()
        }
    };
    Ok(LinearSubspace::span(m, &image))
}

/// `Z^g = (I + Z g)^{-1} Z`, or `None` outside the domain `det(I + Z g) != 0`.
pub fn pointwise_gauge_bivector(z: &QMatrix, g: &QMatrix) -> Result<Option<QMatrix>> {
    skew(z)?;
    skew(g)?;
    let m = QMatrix::identity(z.rows).add(&z.mul(g));
    Ok(m.inverse().map(|inv| inv.mul(z)))
}

/// A pointwise splitting `V = F (+) G`.
#[derive(Clone, Debug)]
pub struct PointSplitting {
    pub leaf: Vec<Vec<Q>>,
    pub complement: Vec<Vec<Q>>,
}

impl PointSplitting {
    pub fn dim(&self) -> usize {
        self.leaf.first().or(self.complement.first()).map(|v| v.len()).unwrap_or(0)
    }
    /// Basis matrix with leaf vectors first; `None` unless the two parts form a basis.
    fn basis_matrix(&self) -> Option<QMatrix> {
        let mut rows = self.leaf.clone();
        rows.extend(self.complement.iter().cloned());
        let b = QMatrix::from_rows(rows);
        (b.rows == b.cols && b.rank() == b.rows).then_some(b)
    }
    /// `G (+) G^0`, equivalently `G (+) T*F`.
    pub fn complement_lagrangian(&self) -> LinearSubspace {
        graph_of(&GraphData::Distribution(self.dim(), self.complement.clone())).expect("distribution graphs are valid")
    }
    /// Whether `Z^sharp` maps the annihilator of `F` into `F`.
    pub fn is_good(&self, z: &QMatrix) -> bool {
        let ann = annihilator(self.dim(), &self.leaf);
        ann.iter().all(|a| {
            let za = row_mul(a, z);
            ann.iter().all(|b| b.iter().zip(&za).fold(Q::zero(), |s, (x, y)| s + x * y).is_zero())
        })
    }
}

/// The two-form with `g^flat = omega^flat` on `F` and zero on `G`, for `Pi` with image `F`.
pub fn pointwise_gamma(pi: &QMatrix, s: &PointSplitting) -> Result<QMatrix> {
    skew(pi)?;
    let b = s.basis_matrix().ok_or_else(|| Error::InvalidSplitting("leaf and complement do not form a basis".into()))?;
    let binv = b.inverse().expect("basis matrix is invertible");
    // Pi in the adapted basis must be supported on the leaf block.
    let pa = binv.transpose().mul(pi).mul(&binv);
    let k = s.leaf.len();
    let m = pi.rows;
    for i in 0..m {
        for j in 0..m {
            if (i >= k || j >= k) && !pa.data[i][j].is_zero() {
                return Err(Error::InvalidSplitting("image of Pi is not the leaf subspace".into()));
            }
        }
    }
    let block = QMatrix::from_rows((0..k).map(|i| pa.data[i][..k].to_vec()).collect());
    let omega = block.inverse().ok_or(Error::SingularLeafBlock)?.neg();
    let mut ga = QMatrix::zero(m, m);
    for i in 0..k {
        for j in 0..k {
            ga.data[i][j] = omega.data[i][j].clone();
        }
    }
    Ok(binv.mul(&ga).mul(&binv.transpose()))
}

/// Fiberwise exponential map and the associated equivalences.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpReport {
    /// `Z` lies in the domain `det(I + Z gamma) != 0`.
    pub in_domain: bool,
    pub exp: Option<QMatrix>,
    pub rank: Option<usize>,
    pub leaf_rank: usize,
    pub good: bool,
    /// The image of `exp(Z)^sharp` is transverse to `G`.
    pub transverse: Option<bool>,
    /// good iff rank equals the leaf rank.
    pub regularity_equivalence: bool,
}

pub fn pointwise_exp_and_rank(pi: &QMatrix, s: &PointSplitting, z: &QMatrix) -> Result<ExpReport> {
    skew(z)?;
    let gamma = pointwise_gamma(pi, s)?;
    let good = s.is_good(z);
    let leaf_rank = s.leaf.len();
    let Some(zg) = pointwise_gauge_bivector(z, &gamma)? else {
        return Ok(ExpReport {
            in_domain: false,
            exp: None,
            rank: None,
            leaf_rank,
            good,
            transverse: None,
            regularity_equivalence: true,
        });
    };
    let w = pi.add(&zg);
    let rank = w.rank();
    let transverse = image_transverse(&w, &s.complement);
    Ok(ExpReport {
        in_domain: true,
        exp: Some(w),
        rank: Some(rank),
        leaf_rank,
        good,
        transverse: Some(transverse),
        regularity_equivalence: good == (rank == leaf_rank),
    })
}

/// `im W^sharp + G = V`.
pub fn image_transverse(w: &QMatrix, g: &[Vec<Q>]) -> bool {
    let mut rows = w.data.clone();
    rows.extend(g.iter().cloned());
    rref(&rows, w.cols).len() == w.cols
}

/// The three conditions characterizing regular bivectors of leaf rank near `Pi`:
/// `W - Pi` in the domain of the inverse gauge, `graph(W)` transverse to `G (+) T*F`,
/// and `im W^sharp` transverse to `G`.
pub fn nearby_regular_conditions(pi: &QMatrix, s: &PointSplitting, w: &QMatrix) -> Result<[bool; 3]> {
    skew(w)?;
    let gamma = pointwise_gamma(pi, s)?;
    let c1 = pointwise_gauge_bivector(&w.sub(pi), &gamma.neg())?.is_some();
    let c2 = graph_of(&GraphData::Bivector(w.clone()))?.transverse(&s.complement_lagrangian());
    let c3 = image_transverse(w, &s.complement);
    Ok([c1, c2, c3])
}

/// The three equivalent conditions for the gauge transform of `Z` by `g` to exist:
/// `det(I + Z g) != 0`, `graph(Z)` transverse to `graph(-g)`, `R_g graph(Z)` transverse to `V`.
pub fn gauge_existence_conditions(z: &QMatrix, g: &QMatrix) -> Result<[bool; 3]> {
    let m = z.rows;
    let c1 = pointwise_gauge_bivector(z, g)?.is_some();
    let gz = graph_of(&GraphData::Bivector(z.clone()))?;
    let c2 = gz.transverse(&graph_of(&GraphData::TwoForm(g.neg()))?);
    let c3 = gauge_action(&Gauge::ByTwoForm(g.clone()), &gz)?.transverse(&LinearSubspace::tangent(m));
    Ok([c1, c2, c3])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trigring::{q, qi};

    fn e(m: usize, i: usize) -> Vec<Q> {
        unit(m, i)
    }

    #[test]
    fn pairing_basics() {
        let u = GeneralizedVector::vector(e(2, 0));
        let v = GeneralizedVector::covector(e(2, 0));
        assert_eq!(pairing(&u, &v).unwrap(), qi(1));
        assert_eq!(pairing(&u, &GeneralizedVector::vector(e(2, 1))).unwrap(), qi(0));
    }

    #[test]
    fn graphs_are_lagrangian() {
        let z = QMatrix::from_ints(&[&[0, 1, 0], &[-1, 0, 2], &[0, -2, 0]]);
        let g = graph_of(&GraphData::Bivector(z)).unwrap();
        assert_eq!(g.dim(), 3);
        assert!(is_lagrangian(&g));
        let sym = QMatrix::from_ints(&[&[1, 0], &[0, 0]]);
        let l = LinearSubspace::span(2, &[GeneralizedVector::new(e(2, 0), sym.data[0].clone()), GeneralizedVector::new(e(2, 1), sym.data[1].clone())]);
        assert!(!is_lagrangian(&l));
        assert!(is_lagrangian(&LinearSubspace::tangent(3)));
        let d = graph_of(&GraphData::Distribution(4, vec![e(4, 0), e(4, 1)])).unwrap();
        assert_eq!(d.dim(), 4);
        assert_eq!(graph_of(&GraphData::Bivector(QMatrix::zero(3, 3))).unwrap(), LinearSubspace::cotangent(3));
        assert_eq!(graph_of(&GraphData::Bivector(sym)), Err(Error::NotSkew));
    }

    #[test]
    fn gauge_actions_on_standard_spaces() {
        let g = QMatrix::from_ints(&[&[0, 2, 0], &[-2, 0, 1], &[0, -1, 0]]);
        let t = LinearSubspace::tangent(3);
        assert_eq!(gauge_action(&Gauge::ByTwoForm(g.clone()), &t).unwrap(), graph_of(&GraphData::TwoForm(g)).unwrap());
        let p = QMatrix::from_ints(&[&[0, 1, 0], &[-1, 0, 0], &[0, 0, 0]]);
        assert_eq!(gauge_action(&Gauge::ByBivector(p), &t).unwrap(), t);
    }

    #[test]
    fn bivector_gauge_of_graph_gamma_is_complement() {
        // Pi = d1^d2 + d3^d4 on a 5-dimensional fiber, tilted complement.
        let pi = QMatrix::from_ints(&[&[0, 1, 0, 0, 0], &[-1, 0, 0, 0, 0], &[0, 0, 0, 1, 0], &[0, 0, -1, 0, 0], &[0; 5]]);
        let s = PointSplitting {
            leaf: (0..4).map(|i| e(5, i)).collect(),
            complement: vec![vec![qi(1), qi(-2), q(1, 3), qi(0), qi(1)]],
        };
        let gamma = pointwise_gamma(&pi, &s).unwrap();
        let gg = graph_of(&GraphData::TwoForm(gamma)).unwrap();
        assert_eq!(gauge_action(&Gauge::ByBivector(pi), &gg).unwrap(), s.complement_lagrangian());
    }

    #[test]
    fn gauge_bivector_examples() {
        let z = QMatrix::from_ints(&[&[0, 1], &[-1, 0]]);
        let zero = QMatrix::zero(2, 2);
        assert_eq!(pointwise_gauge_bivector(&zero, &z).unwrap(), Some(zero.clone()));
        assert_eq!(pointwise_gauge_bivector(&z, &zero).unwrap(), Some(z.clone()));
        // Z = d1^d2 and gamma = dt1^dt2 give I + Z gamma = 0.
        assert_eq!(pointwise_gauge_bivector(&z, &z).unwrap(), None);
        assert_eq!(gauge_existence_conditions(&z, &z).unwrap(), [false; 3]);
    }

    #[test]
    fn exp_of_zero_is_regular() {
        let pi = QMatrix::from_ints(&[&[0, 1, 0], &[-1, 0, 0], &[0, 0, 0]]);
        let s = PointSplitting { leaf: vec![e(3, 0), e(3, 1)], complement: vec![e(3, 2)] };
        let r = pointwise_exp_and_rank(&pi, &s, &QMatrix::zero(3, 3)).unwrap();
        assert_eq!(r.rank, Some(2));
        assert_eq!(r.transverse, Some(true));
        assert!(r.good && r.regularity_equivalence);
    }
}

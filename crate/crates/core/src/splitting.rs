//! Splittings `TM = TF + G` with coordinate leaves and a triangular transverse frame,
//! the induced bigrading, good multivector fields, the leafwise symplectic form and
//! its extension `gamma`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::matrix::FnMatrix;
use crate::multivector::{
    contract_form, contract_mv, lie_bracket_vf, Blade, DifferentialForm, Multivector,
};
use crate::trigring::{Gauss, TorusFunction};

/// Splitting data on `T^n`.
///
/// Leaves are spanned by the coordinate fields `d_i` for `i` in `leaf`; the complement
/// `G` is spanned by `Y_a = d_a + sum_{j in leaf} A[a][j] d_j` for the transverse `a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Splitting {
    dim: usize,
    leaf: Vec<usize>,
    transverse: Vec<usize>,
    /// `frame[a][r]` is the coefficient of `d_{leaf[r]}` in `Y_a`.
    frame: BTreeMap<usize, Vec<TorusFunction>>,
}

/// Bidegree `(p, q)`: `p` leaf slots and `q` transverse slots.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bigrade {
    pub p: usize,
    pub q: usize,
}

impl Splitting {
    /// Splitting with `G` spanned by the transverse coordinate fields.
    pub fn coordinate(dim: usize, leaf: &[usize]) -> Result<Self> {
        Splitting::new(dim, leaf, BTreeMap::new())
    }

    /// Splitting with tilted frame; missing entries of `frame` are zero.
    pub fn new(dim: usize, leaf: &[usize], frame: BTreeMap<usize, Vec<TorusFunction>>) -> Result<Self> {
        let mut lf = leaf.to_vec();
        lf.sort();
        lf.dedup();
        if lf.len() != leaf.len() {
            return Err(Error::InvalidSplitting("repeated leaf index".into()));
        }
        if let Some(&i) = lf.iter().find(|&&i| i >= dim) {
            return Err(Error::IndexOutOfRange { index: i + 1, dim });
        }
        let transverse: Vec<usize> = (0..dim).filter(|i| !lf.contains(i)).collect();
        let mut full = BTreeMap::new();
        for &a in &transverse {
            let row = frame.get(&a).cloned().unwrap_or_else(|| vec![TorusFunction::zero(dim); lf.len()]);
            if row.len() != lf.len() {
                return Err(Error::InvalidSplitting(format!(
                    "frame row for index {} has {} entries, expected {}",
                    a + 1,
                    row.len(),
                    lf.len()
                )));
            }
            if row.iter().any(|f| f.dim() != dim) {
                return Err(Error::DimensionMismatch(dim, row[0].dim()));
            }
            full.insert(a, row);
        }
        if let Some(a) = frame.keys().find(|a| !transverse.contains(a)) {
            return Err(Error::InvalidSplitting(format!("frame given for leaf index {}", a + 1)));
        }
        Ok(Splitting { dim, leaf: lf, transverse, frame: full })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn leaf(&self) -> &[usize] {
        &self.leaf
    }
    pub fn transverse(&self) -> &[usize] {
        &self.transverse
    }
    pub fn leaf_mask(&self) -> u32 {
        self.leaf.iter().fold(0, |m, &i| m | (1 << i))
    }
    pub fn transverse_mask(&self) -> u32 {
        self.transverse.iter().fold(0, |m, &i| m | (1 << i))
    }
    /// Coefficient of `d_j` (`j` a leaf index) in `Y_a`.
    pub fn frame_coeff(&self, a: usize, j: usize) -> TorusFunction {
        let r = self.leaf.iter().position(|&x| x == j).expect("leaf index");
        self.frame[&a][r].clone()
    }
    /// True when every `Y_a` is a coordinate field.
    pub fn is_coordinate(&self) -> bool {
        self.frame.values().all(|row| row.iter().all(|f| f.is_zero()))
    }
    /// The frame field `Y_a`.
    pub fn frame_field(&self, a: usize) -> Multivector {
        let mut y = Multivector::generator(self.dim, a);
        for (r, &j) in self.leaf.iter().enumerate() {
            y.add_term(Blade::single(j), self.frame[&a][r].clone());
        }
        y
    }
    /// Images of the adapted generators: `d_i` for leaf `i` and `Y_a` for transverse `a`.
    pub fn frame_images(&self) -> Vec<Multivector> {
        (0..self.dim)
            .map(|i| if self.leaf.contains(&i) { Multivector::generator(self.dim, i) } else { self.frame_field(i) })
            .collect()
    }
    /// Coordinate fields written in the adapted frame: `d_a = Y_a - sum A[a][j] d_j`.
    pub fn adapted_images(&self) -> Vec<Multivector> {
        (0..self.dim)
            .map(|i| {
                let mut v = Multivector::generator(self.dim, i);
                if let Some(row) = self.frame.get(&i) {
                    for (r, &j) in self.leaf.iter().enumerate() {
                        v.add_term(Blade::single(j), -&row[r]);
                    }
                }
                v
            })
            .collect()
    }
    /// Projection of a vector field onto `G` along `TF`.
    pub fn pr_g(&self, v: &Multivector) -> Multivector {
        let mut out = Multivector::zero(self.dim);
        for &a in &self.transverse {
            let c = v.coeff(Blade::single(a));
            if !c.is_zero() {
                out = &out + &self.frame_field(a).mul_fn(&c);
            }
        }
        out
    }
    /// Projection of a vector field onto `TF` along `G`.
    pub fn pr_tf(&self, v: &Multivector) -> Multivector {
        v - &self.pr_g(v)
    }
    /// Pullback of 1-forms under the projection onto `TF`:
    /// `dtheta_j` for leaf `j` maps to `dtheta_j - sum_a A[a][j] dtheta_a`, transverse ones to 0.
    pub fn leaf_coframe_images(&self) -> Vec<DifferentialForm> {
        (0..self.dim)
            .map(|j| {
                if !self.leaf.contains(&j) {
                    return DifferentialForm::zero(self.dim);
                }
                let mut w = DifferentialForm::generator(self.dim, j);
                for &a in &self.transverse {
                    w.add_term(Blade::single(a), -&self.frame_coeff(a, j));
                }
                w
            })
            .collect()
    }
    /// True when `[Y_a, Y_b]` lies in `G` for all transverse pairs.
    pub fn is_involutive(&self) -> bool {
        for (x, &a) in self.transverse.iter().enumerate() {
            for &b in &self.transverse[x + 1..] {
                let br = lie_bracket_vf(&self.frame_field(a), &self.frame_field(b));
                if !self.pr_tf(&br).is_zero() {
                    return false;
                }
            }
        }
        true
    }
    /// Restriction of a form to leaf vectors: keeps blades made of leaf indices only.
    pub fn restrict_to_leaf(&self, w: &DifferentialForm) -> DifferentialForm {
        let m = self.leaf_mask();
        DifferentialForm::from_terms(
            self.dim,
            w.terms().iter().filter(|(b, _)| b.0 & !m == 0).map(|(b, f)| (*b, f.clone())),
        )
    }
}

/// Decomposes `W` into bigraded components with respect to the adapted frame.
pub fn bigrade_decompose(w: &Multivector, s: &Splitting) -> BTreeMap<Bigrade, Multivector> {
    let adapted = w.substitute(&s.adapted_images());
    let tm = s.transverse_mask();
    let mut groups: BTreeMap<Bigrade, Multivector> = BTreeMap::new();
    for (b, f) in adapted.terms() {
        let q = (b.0 & tm).count_ones() as usize;
        let g = Bigrade { p: b.degree() - q, q };
        groups.entry(g).or_insert_with(|| Multivector::zero(s.dim())).add_term(*b, f.clone());
    }
    let images = s.frame_images();
    groups.into_iter().map(|(g, v)| (g, v.substitute(&images))).filter(|(_, v)| !v.is_zero()).collect()
}

/// True when every bigraded component has at most one transverse slot.
pub fn is_good(w: &Multivector, s: &Splitting) -> bool {
    bigrade_decompose(w, s).keys().all(|g| g.q <= 1)
}

/// Good-ness via double contraction with the annihilator `TF^0 = span{dtheta_a}`.
pub fn is_good_by_contraction(w: &Multivector, s: &Splitting) -> bool {
    let n = s.dim();
    for (x, &a) in s.transverse().iter().enumerate() {
        let ia = contract_mv(&DifferentialForm::generator(n, a), w);
        for &b in &s.transverse()[x + 1..] {
            if !contract_mv(&DifferentialForm::generator(n, b), &ia).is_zero() {
                return false;
            }
        }
    }
    true
}

/// Leafwise symplectic form `omega` with `omega^flat = -(Pi^sharp)^{-1}` on the leaves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymplecticData {
    pub omega: DifferentialForm,
    /// Pfaffian of the leaf block of `Pi`, certified nowhere-vanishing.
    pub leaf_pfaffian: TorusFunction,
    /// Determinant of the leaf block (the square of the Pfaffian).
    pub leaf_det: TorusFunction,
    /// Adjugate of the leaf block; `omega = -adj / det` as a matrix.
    pub leaf_adjugate: FnMatrix,
}

/// Computes the leafwise symplectic form of a leafwise nondegenerate bivector.
pub fn leafwise_symplectic(pi: &Multivector, s: &Splitting) -> Result<SymplecticData> {
    if pi.dim() != s.dim() {
        return Err(Error::DimensionMismatch(pi.dim(), s.dim()));
    }
    if pi.homogeneous_degree().is_some_and(|d| d != 2) {
        return Err(Error::DegreeMismatch { expected: 2, found: pi.homogeneous_degree().unwrap() });
    }
    let m = s.leaf_mask();
    if pi.terms().keys().any(|b| b.degree() != 2 || b.0 & !m != 0) {
        return Err(Error::NotLeafwise);
    }
    let leaf = s.leaf();
    let k = leaf.len();
    let n = s.dim();
    let mut p = FnMatrix::zero(k, n);
    for r in 0..k {
        for c in 0..k {
            if r != c {
                p.set(r, c, pi.coeff_of(&[leaf[r], leaf[c]]));
            }
        }
    }
    // det = Pf^2, so certifying the Pfaffian certifies the determinant.
    let pf = p.pfaffian();
    let inv_pf = pf.recip().map_err(|_| Error::SingularLeafBlock)?;
    let inv_det = &inv_pf * &inv_pf;
    let det = &pf * &pf;
    let adj = p.adjugate();
    let mut omega = DifferentialForm::zero(n);
    for r in 0..k {
        for c in r + 1..k {
            let w = -&(adj.get(r, c) * &inv_det);
            omega.add_term(Blade::from_indices(&[leaf[r], leaf[c]]).1, w);
        }
    }
    let data = SymplecticData { omega, leaf_pfaffian: pf, leaf_det: det, leaf_adjugate: adj };
    for &i in leaf {
        let lhs = contract_form(&contract_mv(&DifferentialForm::generator(n, i), pi), &data.omega);
        debug_assert_eq!(lhs, -&DifferentialForm::generator(n, i), "omega inverts Pi on the leaves");
    }
    Ok(data)
}

/// Extension `gamma` of `omega`: agrees with `omega` on `TF` and vanishes on `G`.
pub fn gamma_of(pi: &Multivector, s: &Splitting) -> Result<DifferentialForm> {
    let sd = leafwise_symplectic(pi, s)?;
    Ok(gamma_from_omega(&sd.omega, s))
}

/// Pulls `omega` back along the projection onto `TF`.
pub fn gamma_from_omega(omega: &DifferentialForm, s: &Splitting) -> DifferentialForm {
    omega.substitute(&s.leaf_coframe_images())
}

/// Scales every frame coefficient; used to build families of tilted splittings.
pub fn scaled_frame(s: &Splitting, c: &Gauss) -> Splitting {
    let frame = s.frame.iter().map(|(a, row)| (*a, row.iter().map(|f| f.scale(c)).collect())).collect();
    Splitting::new(s.dim, &s.leaf, frame).expect("scaling preserves validity")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse_form, parse_function, parse_multivector};
    use crate::multivector::{evaluate_form, flat, sharp};

    fn mv(s: &str, n: usize) -> Multivector {
        parse_multivector(s, n).unwrap()
    }

    fn tilted(n: usize, leaf: &[usize], a: usize, row: &[&str]) -> Splitting {
        let mut fr = BTreeMap::new();
        fr.insert(a, row.iter().map(|e| parse_function(e, n).unwrap()).collect());
        Splitting::new(n, leaf, fr).unwrap()
    }

    #[test]
    fn decomposition_examples() {
        let s = Splitting::coordinate(3, &[0, 1]).unwrap();
        let d = bigrade_decompose(&mv("d1^d2", 3), &s);
        assert_eq!(d.len(), 1);
        assert_eq!(d[&Bigrade { p: 2, q: 0 }], mv("d1^d2", 3));

        // Y3 = d3 + c d2 with c = 3
        let s = tilted(3, &[0, 1], 2, &["0", "3"]);
        let d = bigrade_decompose(&mv("d1^d3", 3), &s);
        assert_eq!(d[&Bigrade { p: 1, q: 1 }], mv("d1^(d3 + 3*d2)", 3));
        assert_eq!(d[&Bigrade { p: 2, q: 0 }], mv("-3*d1^d2", 3));
    }

    #[test]
    fn goodness_criteria_agree() {
        let s = Splitting::coordinate(4, &[0, 1]).unwrap();
        assert!(!is_good(&mv("d3^d4", 4), &s));
        assert!(!is_good_by_contraction(&mv("d3^d4", 4), &s));
        let s3 = Splitting::coordinate(3, &[0, 1]).unwrap();
        let w = mv("sin(t3)*d1^d2 + cos(t1)*d1^d3", 3);
        assert!(is_good(&w, &s3) && is_good_by_contraction(&w, &s3));
    }

    #[test]
    fn omega_examples() {
        let s = Splitting::coordinate(4, &[0, 1]).unwrap();
        let sd = leafwise_symplectic(&mv("(sin(t4)+2)*d1^d2", 4), &s).unwrap();
        assert_eq!(sd.omega, parse_form("1/(sin(t4)+2)*dt1^dt2", 4).unwrap());

        let s5 = Splitting::coordinate(5, &[0, 1, 2, 3]).unwrap();
        let sd = leafwise_symplectic(&mv("d1^d2 + d3^d4", 5), &s5).unwrap();
        assert_eq!(sd.omega, parse_form("dt1^dt2 + dt3^dt4", 5).unwrap());

        assert!(matches!(leafwise_symplectic(&mv("d1^d3", 4), &s), Err(Error::NotLeafwise)));
        assert!(matches!(
            leafwise_symplectic(&mv("sin(t3)*d1^d2", 4), &s),
            Err(Error::SingularLeafBlock)
        ));
    }

    #[test]
    fn gamma_vanishes_on_tilted_complement() {
        let s = tilted(3, &[0, 1], 2, &["5", "0"]);
        let pi = mv("d1^d2", 3);
        let g = gamma_of(&pi, &s).unwrap();
        assert!(flat(&g, &s.frame_field(2)).is_zero());
        assert_eq!(evaluate_form(&g, &[mv("d1", 3), mv("d2", 3)]), TorusFunction::one(3));
        // gamma^flat o Pi^sharp = -(pullback of the leaf coframe)
        let im = s.leaf_coframe_images();
        for (i, img) in im.iter().enumerate().take(2) {
            let lhs = flat(&g, &sharp(&pi, &DifferentialForm::generator(3, i)));
            assert_eq!(lhs, -img);
        }
    }
}

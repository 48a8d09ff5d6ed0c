//! Small dense matrices over torus functions: products, determinants, adjugates.
//!
//! Sizes are at most the torus dimension, so cofactor expansion is adequate.

use crate::trigring::{Gauss, TorusFunction};

/// Row-major square matrix of torus functions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FnMatrix {
    pub n: usize,
    pub dim: usize,
    pub rows: Vec<Vec<TorusFunction>>,
}

impl FnMatrix {
    pub fn zero(n: usize, dim: usize) -> Self {
        FnMatrix { n, dim, rows: vec![vec![TorusFunction::zero(dim); n]; n] }
    }
    pub fn identity(n: usize, dim: usize) -> Self {
        let mut m = FnMatrix::zero(n, dim);
        for i in 0..n {
            m.rows[i][i] = TorusFunction::one(dim);
        }
        m
    }
    pub fn get(&self, i: usize, j: usize) -> &TorusFunction {
        &self.rows[i][j]
    }
    pub fn set(&mut self, i: usize, j: usize, v: TorusFunction) {
        self.rows[i][j] = v;
    }
    pub fn mul(&self, o: &FnMatrix) -> FnMatrix {
        let mut out = FnMatrix::zero(self.n, self.dim);
        for i in 0..self.n {
            for j in 0..self.n {
                let mut s = TorusFunction::zero(self.dim);
                for k in 0..self.n {
                    if self.rows[i][k].is_zero() || o.rows[k][j].is_zero() {
                        continue;
                    }
                    s = &s + &(&self.rows[i][k] * &o.rows[k][j]);
                }
                out.rows[i][j] = s;
            }
        }
        out
    }
    pub fn add(&self, o: &FnMatrix) -> FnMatrix {
        let mut out = self.clone();
        for i in 0..self.n {
            for j in 0..self.n {
                out.rows[i][j] = &self.rows[i][j] + &o.rows[i][j];
            }
        }
        out
    }
    pub fn scale(&self, c: &Gauss) -> FnMatrix {
        let mut out = self.clone();
        for row in out.rows.iter_mut() {
            for v in row.iter_mut() {
                *v = v.scale(c);
            }
        }
        out
    }
    pub fn transpose(&self) -> FnMatrix {
        let mut out = FnMatrix::zero(self.n, self.dim);
        for i in 0..self.n {
            for j in 0..self.n {
                out.rows[j][i] = self.rows[i][j].clone();
            }
        }
        out
    }
    /// Determinant of the submatrix on the given rows and columns.
    fn minor(&self, rows: &[usize], cols: &[usize]) -> TorusFunction {
        if rows.is_empty() {
            return TorusFunction::one(self.dim);
        }
        if rows.len() == 1 {
            return self.rows[rows[0]][cols[0]].clone();
        }
        let r0 = rows[0];
        let rest: Vec<usize> = rows[1..].to_vec();
        let mut s = TorusFunction::zero(self.dim);
        for (pos, &c) in cols.iter().enumerate() {
            let a = &self.rows[r0][c];
            if a.is_zero() {
                continue;
            }
            let sub: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
            let m = &self.minor(&rest, &sub) * a;
            s = if pos % 2 == 0 { &s + &m } else { &s - &m };
        }
        s
    }
    pub fn det(&self) -> TorusFunction {
        let all: Vec<usize> = (0..self.n).collect();
        self.minor(&all, &all)
    }
    /// Pfaffian of a skew-symmetric matrix of even size (expansion along the first row).
    pub fn pfaffian(&self) -> TorusFunction {
        let all: Vec<usize> = (0..self.n).collect();
        self.pf_on(&all)
    }
    fn pf_on(&self, idx: &[usize]) -> TorusFunction {
        if idx.is_empty() {
            return TorusFunction::one(self.dim);
        }
        if idx.len() % 2 == 1 {
            return TorusFunction::zero(self.dim);
        }
        let i = idx[0];
        let mut s = TorusFunction::zero(self.dim);
        for (pos, &j) in idx.iter().enumerate().skip(1) {
            let a = &self.rows[i][j];
            if a.is_zero() {
                continue;
            }
            let rest: Vec<usize> = idx.iter().copied().filter(|&x| x != i && x != j).collect();
            let m = &self.pf_on(&rest) * a;
            s = if pos % 2 == 1 { &s + &m } else { &s - &m };
        }
        s
    }
    /// Classical adjugate: `adj(M) M = det(M) I`.
    pub fn adjugate(&self) -> FnMatrix {
        let mut out = FnMatrix::zero(self.n, self.dim);
        for i in 0..self.n {
            for j in 0..self.n {
                let rows: Vec<usize> = (0..self.n).filter(|&r| r != j).collect();
                let cols: Vec<usize> = (0..self.n).filter(|&c| c != i).collect();
                let m = self.minor(&rows, &cols);
                out.rows[i][j] = if (i + j) % 2 == 0 { m } else { -&m };
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trigring::qi;

    #[test]
    fn adjugate_identity() {
        let d = 1;
        let mut m = FnMatrix::zero(3, d);
        let vals = [[2, 1, 0], [0, 3, 1], [1, 0, 4]];
        for (i, row) in vals.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, TorusFunction::rational(d, qi(v)));
            }
        }
        let det = m.det();
        assert_eq!(det, TorusFunction::rational(d, qi(25)));
        let prod = m.adjugate().mul(&m);
        let mut k = FnMatrix::zero(4, d);
        let vals = [[0, 1, 2, 3], [-1, 0, 4, 5], [-2, -4, 0, 6], [-3, -5, -6, 0]];
        for (i, row) in vals.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                k.set(i, j, TorusFunction::rational(d, qi(v)));
            }
        }
        // 1*6 - 2*5 + 3*4
        assert_eq!(k.pfaffian(), TorusFunction::rational(d, qi(8)));
        assert_eq!(k.det(), k.pfaffian().pow(2));
        assert_eq!(prod, FnMatrix::identity(3, d).scale(&Gauss::from_int(25)));
    }
}

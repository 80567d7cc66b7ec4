use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::ratfunc::RatFunc;
use crate::scalar::Scalar;
use num_traits::{One, Zero};
use std::ops::{Div, Neg, Sub};

/// Dense matrix over an exact coefficient ring.
#[derive(Clone, PartialEq, Eq)]
pub struct Mat<T> {
    pub rows: usize,
    pub cols: usize,
    a: Vec<T>,
}

impl<T> Mat<T> {
    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        assert!(r > 0, "empty matrix");
        let c = rows[0].len();
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Mat { rows: r, cols: c, a: rows.into_iter().flatten().collect() }
    }

    pub fn at(&self, i: usize, j: usize) -> &T {
        &self.a[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut T {
        &mut self.a[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.a[i * self.cols + j] = v;
    }
}

impl<T: Clone> Mat<T> {
    pub fn row(&self, i: usize) -> Vec<T> {
        (0..self.cols).map(|j| self.at(i, j).clone()).collect()
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.at(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Mat<T> {
        Mat {
            rows: self.cols,
            cols: self.rows,
            a: (0..self.cols)
                .flat_map(|j| (0..self.rows).map(move |i| (i, j)))
                .map(|(i, j)| self.at(i, j).clone())
                .collect(),
        }
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> Mat<U> {
        Mat { rows: self.rows, cols: self.cols, a: self.a.iter().map(f).collect() }
    }
}

impl<T> Mat<T>
where
    T: Clone + Zero,
{
    pub fn zero(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, a: vec![T::zero(); rows * cols] }
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().all(|x| x.is_zero())
    }

    pub fn add(&self, other: &Mat<T>) -> Mat<T> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            a: self.a.iter().zip(&other.a).map(|(x, y)| x.clone() + y.clone()).collect(),
        }
    }
}

impl<T> Mat<T>
where
    T: Clone + Zero + Sub<Output = T>,
{
    pub fn sub(&self, other: &Mat<T>) -> Mat<T> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            a: self.a.iter().zip(&other.a).map(|(x, y)| x.clone() - y.clone()).collect(),
        }
    }
}

impl<T> Mat<T>
where
    T: Clone + Zero + Neg<Output = T>,
{
    pub fn neg(&self) -> Mat<T> {
        self.map(|x| -x.clone())
    }
}

impl<T> Mat<T>
where
    T: Clone + Zero + One,
{
    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zero(n, n);
        for i in 0..n {
            m.set(i, i, T::one());
        }
        m
    }

    pub fn diagonal(d: Vec<T>) -> Self {
        let n = d.len();
        let mut m = Mat::zero(n, n);
        for (i, v) in d.into_iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    pub fn mul(&self, other: &Mat<T>) -> Mat<T> {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matrix product");
        let mut out = Mat::<T>::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let lik = self.at(i, k);
                if lik.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let add = lik.clone() * other.at(k, j).clone();
                    let cur = out.at(i, j).clone();
                    out.set(i, j, cur + add);
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = T::zero();
                for (j, vj) in v.iter().enumerate() {
                    acc = acc + self.at(i, j).clone() * vj.clone();
                }
                acc
            })
            .collect()
    }

    pub fn scale(&self, s: &T) -> Mat<T> {
        self.map(|x| x.clone() * s.clone())
    }

    pub fn trace(&self) -> T {
        assert_eq!(self.rows, self.cols);
        let mut acc = T::zero();
        for i in 0..self.rows {
            acc = acc + self.at(i, i).clone();
        }
        acc
    }

    pub fn pow(&self, e: u32) -> Mat<T> {
        assert_eq!(self.rows, self.cols);
        let mut acc = Mat::identity(self.rows);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }
}

impl<T> Mat<T>
where
    T: Clone + Zero + One + Neg<Output = T> + Sub<Output = T>,
{
    /// Determinant by cofactor expansion (intended for n ≤ 4).
    pub fn det(&self) -> T {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        match n {
            0 => T::one(),
            1 => self.at(0, 0).clone(),
            2 => {
                self.at(0, 0).clone() * self.at(1, 1).clone()
                    - self.at(0, 1).clone() * self.at(1, 0).clone()
            }
            _ => {
                let mut acc = T::zero();
                for j in 0..n {
                    let c = self.at(0, j);
                    if c.is_zero() {
                        continue;
                    }
                    let minor = self.minor(0, j).det();
                    let term = c.clone() * minor;
                    if j % 2 == 0 {
                        acc = acc + term;
                    } else {
                        acc = acc - term;
                    }
                }
                acc
            }
        }
    }

    fn minor(&self, skip_i: usize, skip_j: usize) -> Mat<T> {
        let rows: Vec<Vec<T>> = (0..self.rows)
            .filter(|&i| i != skip_i)
            .map(|i| {
                (0..self.cols)
                    .filter(|&j| j != skip_j)
                    .map(|j| self.at(i, j).clone())
                    .collect()
            })
            .collect();
        Mat::from_rows(rows)
    }
}

impl<T> Mat<T>
where
    T: Clone + PartialEq + Zero + One + Neg<Output = T> + Sub<Output = T> + Div<Output = T>,
{
    /// Reduced row echelon form together with pivot column indices.
    pub fn rref(&self) -> (Mat<T>, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.at(i, c).is_zero()) else {
                continue;
            };
            for j in 0..m.cols {
                let tmp = m.at(r, j).clone();
                let pv = m.at(p, j).clone();
                m.set(r, j, pv);
                m.set(p, j, tmp);
            }
            let pivot = m.at(r, c).clone();
            for j in 0..m.cols {
                let v = m.at(r, j).clone() / pivot.clone();
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || m.at(i, c).is_zero() {
                    continue;
                }
                let f = m.at(i, c).clone();
                for j in 0..m.cols {
                    let v = m.at(i, j).clone() - f.clone() * m.at(r, j).clone();
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel {v : Mv = 0}.
    pub fn kernel_basis(&self) -> Vec<Vec<T>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![T::zero(); self.cols];
                v[fc] = T::one();
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = T::zero() - r.at(row, fc).clone();
                }
                v
            })
            .collect()
    }

    /// Inverse via Gauss–Jordan; None when singular.
    pub fn inverse(&self) -> Option<Mat<T>> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = Mat::zero(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.at(i, j).clone());
            }
            aug.set(i, n + i, T::one());
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots.iter().take(n).enumerate().any(|(k, &c)| c != k) {
            return None;
        }
        let mut out = Mat::zero(n, n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, r.at(i, n + j).clone());
            }
        }
        Some(out)
    }

    /// Solve Mx = b for square M; None when singular.
    pub fn solve(&self, b: &[T]) -> Option<Vec<T>> {
        let inv = self.inverse()?;
        Some(inv.matvec(b))
    }
}

impl Mat<RatFunc> {
    pub fn from_scalars(m: &Mat<Scalar>) -> Mat<RatFunc> {
        m.map(|s| RatFunc::constant(s.clone()))
    }

    pub fn from_int_rows(rows: &[&[i64]]) -> Mat<RatFunc> {
        Mat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&n| RatFunc::int(n)).collect())
                .collect(),
        )
    }

    pub fn derivative(&self) -> Mat<RatFunc> {
        self.map(RatFunc::derivative)
    }

    pub fn eval(&self, p: &Scalar) -> Result<Mat<Scalar>> {
        let mut out = Mat::zero(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.at(i, j).eval(p)?);
            }
        }
        Ok(out)
    }

    pub fn is_holomorphic_at(&self, p: &Scalar) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| self.at(i, j).is_holomorphic_at(p)))
    }

    /// Entrywise residue at `p`.
    pub fn residue(&self, p: &Scalar) -> Mat<Scalar> {
        self.map(|f| f.residue_at(p))
    }

    /// All entries polynomial?
    pub fn is_polynomial(&self) -> bool {
        self.a.iter().all(RatFunc::is_polynomial)
    }
}

impl Mat<Scalar> {
    pub fn from_i64(rows: &[&[i64]]) -> Mat<Scalar> {
        Mat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&n| Scalar::int(n)).collect())
                .collect(),
        )
    }

    /// Embed into polynomial matrices (for characteristic polynomial work).
    pub fn to_poly(&self) -> Mat<Poly> {
        self.map(|s| Poly::constant(s.clone()))
    }

    pub fn inverse_or_err(&self, what: &str) -> Result<Mat<Scalar>> {
        self.inverse()
            .ok_or_else(|| Error::DivisionByZero(format!("{what}: singular matrix")))
    }
}

/// Convenience constructor for 3×3 matrices.
pub fn mat3<T: Clone>(rows: [[T; 3]; 3]) -> Mat<T> {
    Mat::from_rows(rows.into_iter().map(|r| r.into_iter().collect()).collect())
}

impl<T: std::fmt::Display> std::fmt::Debug for Mat<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "[")?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| format!("{}", self.at(i, j))).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m2(a: i64, b: i64, c: i64, d: i64) -> Mat<Scalar> {
        Mat::from_i64(&[&[a, b], &[c, d]])
    }

    #[test]
    fn det_small_sizes() {
        assert_eq!(m2(1, 2, 3, 4).det(), Scalar::int(-2));
        let m = Mat::from_i64(&[&[2, 0, 1], &[1, 1, 0], &[0, 3, 1]]);
        // 2(1·1 − 0·3) − 0 + 1(1·3 − 1·0) = 2 + 3 = 5
        assert_eq!(m.det(), Scalar::int(5));
        let id4: Mat<Scalar> = Mat::identity(4);
        assert_eq!(id4.det(), Scalar::int(1));
    }

    #[test]
    fn inverse_round_trip() {
        let m = Mat::from_i64(&[&[1, 2, 0], &[0, 1, 3], &[1, 0, 1]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Mat::identity(3));
        assert_eq!(inv.mul(&m), Mat::identity(3));
        let sing = Mat::from_i64(&[&[1, 2], &[2, 4]]);
        assert!(sing.inverse().is_none());
    }

    #[test]
    fn kernel_of_rank_deficient() {
        let m = Mat::from_i64(&[&[1, 2, 3], &[2, 4, 6], &[0, 0, 0]]);
        let k = m.kernel_basis();
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(m.matvec(v).iter().all(Scalar::is_zero));
        }
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn solve_linear_system() {
        let m = Mat::from_i64(&[&[2, 1], &[1, 3]]);
        let b = [Scalar::int(5), Scalar::int(10)];
        let x = m.solve(&b).unwrap();
        assert_eq!(m.matvec(&x), b.to_vec());
        assert_eq!(x, vec![Scalar::int(1), Scalar::int(3)]);
    }

    #[test]
    fn transpose_and_trace() {
        let m = Mat::from_i64(&[&[1, 2], &[3, 4]]);
        assert_eq!(m.transpose(), m2(1, 3, 2, 4));
        assert_eq!(m.trace(), Scalar::int(5));
    }

    #[test]
    fn rational_function_matrix_ops() {
        // G = [[1, z], [0, 1]]; G' = [[0,1],[0,0]]; −G'G⁻¹ = [[0,−1],[0,0]]
        let z = RatFunc::x();
        let g = Mat::from_rows(vec![
            vec![RatFunc::int(1), z],
            vec![RatFunc::int(0), RatFunc::int(1)],
        ]);
        let a = g.derivative().mul(&g.inverse().unwrap()).neg();
        assert_eq!(*a.at(0, 1), RatFunc::int(-1));
        assert!(a.at(0, 0).is_zero());
        let at2 = g.eval(&Scalar::int(2)).unwrap();
        assert_eq!(*at2.at(0, 1), Scalar::int(2));
    }

    #[test]
    fn matrix_residue() {
        // [[1/z, 1], [2/z², 3/(z−1)]] residues at 0: [[1,0],[0,0]]
        let e = |n: &[i64], d: &[i64]| {
            RatFunc::new(Poly::from_ints(n), Poly::from_ints(d))
        };
        let m = Mat::from_rows(vec![
            vec![e(&[1], &[0, 1]), e(&[1], &[1])],
            vec![e(&[2], &[0, 0, 1]), e(&[3], &[-1, 1])],
        ]);
        let r0 = m.residue(&Scalar::int(0));
        assert_eq!(r0, Mat::from_i64(&[&[1, 0], &[0, 0]]));
        let r1 = m.residue(&Scalar::int(1));
        assert_eq!(r1, Mat::from_i64(&[&[0, 0], &[0, 3]]));
    }
}

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::poly::RatPoly;
use super::rational::{denominator_lcm, primitive_integer_vector, Canonical, Rational};

/// Dense row-major matrix of exact rationals.
///
/// Shape mismatches in arithmetic are programming errors and panic, in the
/// same way slice indexing does.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        RatMatrix { rows, cols, data }
    }

    /// Builds a matrix from rows, or `None` if the rows are ragged. An empty
    /// row list yields a `0 × 0` matrix.
    pub fn try_from_rows(rows: Vec<Vec<Rational>>) -> Option<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return None;
        }
        let n = rows.len();
        Some(RatMatrix {
            rows: n,
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Panics on ragged input.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        Self::try_from_rows(rows).expect("ragged rows")
    }

    /// `from_rows` that also accepts an empty row list with a known width.
    pub fn from_rows_with_cols(rows: Vec<Vec<Rational>>, cols: usize) -> Self {
        if rows.is_empty() {
            Self::zeros(0, cols)
        } else {
            Self::from_rows(rows)
        }
    }

    /// Builds a `rows × columns.len()` matrix from column vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<Rational>]) -> Self {
        assert!(columns.iter().all(|c| c.len() == rows), "ragged columns");
        Self::from_fn(rows, columns.len(), |i, j| columns[j][i].clone())
    }

    pub fn column_vector(v: &[Rational]) -> Self {
        Self::from_columns(v.len(), &[v.to_vec()])
    }

    pub fn row_vector(v: &[Rational]) -> Self {
        RatMatrix {
            rows: 1,
            cols: v.len(),
            data: v.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = &Rational> {
        self.data.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * factor).collect(),
        }
    }

    /// Accumulates each entry over a common denominator, so only one
    /// reduction happens per output entry.
    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        let dv = denominator_lcm(v);
        let nv: Vec<BigInt> = v.iter().map(|x| x.numer() * (&dv / x.denom())).collect();
        (0..self.rows)
            .map(|i| {
                let row = self.row(i);
                let dr = denominator_lcm(row);
                let mut acc = BigInt::zero();
                for (a, x) in row.iter().zip(&nv) {
                    if !a.is_zero() && !x.is_zero() {
                        acc += a.numer() * (&dr / a.denom()) * x;
                    }
                }
                Rational::new(acc, &dr * &dv)
            })
            .collect()
    }

    /// `[self other]`.
    pub fn hstack(&self, other: &RatMatrix) -> Self {
        assert_eq!(self.rows, other.rows, "hstack row mismatch");
        Self::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                other[(i, j - self.cols)].clone()
            }
        })
    }

    /// `[self; other]`.
    pub fn vstack(&self, other: &RatMatrix) -> Self {
        assert_eq!(self.cols, other.cols, "vstack column mismatch");
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        RatMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn select_columns(&self, indices: &[usize]) -> Self {
        Self::from_fn(self.rows, indices.len(), |i, j| self[(i, indices[j])].clone())
    }

    pub fn row_range(&self, start: usize, end: usize) -> Self {
        assert!(start <= end && end <= self.rows);
        RatMatrix {
            rows: end - start,
            cols: self.cols,
            data: self.data[start * self.cols..end * self.cols].to_vec(),
        }
    }

    pub fn trace(&self) -> Rational {
        assert!(self.is_square());
        (0..self.rows).fold(Rational::zero(), |acc, i| acc + &self[(i, i)])
    }

    /// `self^n` by binary exponentiation; `self^0` is the identity.
    pub fn pow(&self, mut n: u64) -> Self {
        assert!(self.is_square(), "power of a non-square matrix");
        let mut result = Self::identity(self.rows);
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                result = &result * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Maximum absolute row sum.
    pub fn induced_inf_norm(&self) -> Rational {
        (0..self.rows)
            .map(|i| self.row(i).iter().fold(Rational::zero(), |acc, x| acc + x.abs()))
            .max()
            .unwrap_or_else(Rational::zero)
    }

    /// Sum of squared entries.
    pub fn frobenius_sq(&self) -> Rational {
        self.data.iter().fold(Rational::zero(), |acc, x| acc + x * x)
    }

    /// Rows scaled to integers, one denominator lcm per row. Row scaling keeps
    /// rank, pivot columns and kernel.
    fn integer_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows)
            .map(|i| {
                let row = self.row(i);
                let lcm = denominator_lcm(row);
                row.iter().map(|q| q.numer() * (&lcm / q.denom())).collect()
            })
            .collect()
    }

    /// Fraction-free (Bareiss) row echelon form on the integer-scaled rows.
    /// Returns the pivot columns, leftmost first.
    fn bareiss_pivots(&self) -> Vec<usize> {
        let mut a = self.integer_rows();
        let mut pivots = Vec::new();
        let mut prev = BigInt::one();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !a[i][c].is_zero()) else {
                continue;
            };
            a.swap(r, p);
            for i in r + 1..self.rows {
                for j in c + 1..self.cols {
                    let val = &a[r][c] * &a[i][j] - &a[i][c] * &a[r][j];
                    debug_assert!((&val % &prev).is_zero(), "Bareiss division not exact");
                    a[i][j] = val / &prev;
                }
                a[i][c] = BigInt::zero();
            }
            prev = a[r][c].clone();
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.bareiss_pivots().len()
    }

    /// Determinant via Bareiss elimination.
    pub fn det(&self) -> Rational {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return Rational::one();
        }
        let mut scale = BigInt::one();
        let mut a: Vec<Vec<BigInt>> = (0..n)
            .map(|i| {
                let row = self.row(i);
                let lcm = denominator_lcm(row);
                let ints = row.iter().map(|q| q.numer() * (&lcm / q.denom())).collect();
                scale *= lcm;
                ints
            })
            .collect();
        let mut negate = false;
        let mut prev = BigInt::one();
        for k in 0..n {
            let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
                return Rational::zero();
            };
            if p != k {
                a.swap(p, k);
                negate = !negate;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i][j] = (&a[k][k] * &a[i][j] - &a[i][k] * &a[k][j]) / &prev;
                }
                a[i][k] = BigInt::zero();
            }
            prev = a[k][k].clone();
        }
        let det = Rational::new(a[n - 1][n - 1].clone(), scale);
        if negate {
            -det
        } else {
            det
        }
    }

    /// Reduced row echelon form by Gauss–Jordan elimination, with pivot columns.
    pub fn rref(&self) -> (RatMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m[(r, c)].recip();
            for j in c..m.cols {
                let x = &m[(r, j)] * &inv;
                m[(r, j)] = x;
            }
            for i in 0..m.rows {
                if i == r || m[(i, c)].is_zero() {
                    continue;
                }
                let f = m[(i, c)].clone();
                for j in c..m.cols {
                    if !m[(r, j)].is_zero() {
                        let x = &m[(i, j)] - &f * &m[(r, j)];
                        m[(i, j)] = x;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Basis of `{x : self·x = 0}` as columns, each scaled to coprime integers.
    /// Free variables are taken left to right.
    pub fn kernel_basis(&self) -> RatMatrix {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let columns: Vec<Vec<Rational>> = free
            .iter()
            .map(|&f| {
                let mut x = vec![Rational::zero(); self.cols];
                x[f] = Rational::one();
                for (row, &p) in pivots.iter().enumerate() {
                    x[p] = -r[(row, f)].clone();
                }
                primitive_integer_vector(&x)
            })
            .collect();
        RatMatrix::from_columns(self.cols, &columns)
    }

    /// Leftmost maximal linearly independent set of columns and their indices.
    pub fn column_space_basis(&self) -> (RatMatrix, Vec<usize>) {
        let pivots = self.bareiss_pivots();
        (self.select_columns(&pivots), pivots)
    }

    /// Some solution of `self·x = b`, with free variables set to zero, or `None`
    /// when the system is inconsistent.
    pub fn solve(&self, b: &[Rational]) -> Option<Vec<Rational>> {
        assert_eq!(self.rows, b.len(), "right-hand side length mismatch");
        let augmented = self.hstack(&RatMatrix::column_vector(b));
        let (r, pivots) = augmented.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![Rational::zero(); self.cols];
        for (row, &p) in pivots.iter().enumerate() {
            x[p] = r[(row, self.cols)].clone();
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<RatMatrix> {
        assert!(self.is_square(), "inverse of a non-square matrix");
        let n = self.rows;
        let (r, pivots) = self.hstack(&RatMatrix::identity(n)).rref();
        if (0..n).any(|i| pivots.get(i) != Some(&i)) {
            return None;
        }
        Some(Self::from_fn(n, n, |i, j| r[(i, n + j)].clone()))
    }

    /// Monic characteristic polynomial `det(xI − self)` by the
    /// Faddeev–LeVerrier recurrence.
    pub fn charpoly(&self) -> RatPoly {
        assert!(self.is_square(), "characteristic polynomial of a non-square matrix");
        let n = self.rows;
        let mut coeffs = vec![Rational::zero(); n + 1];
        coeffs[n] = Rational::one();
        let mut aux = RatMatrix::zeros(n, n);
        for k in 1..=n {
            aux = &(self * &aux) + &RatMatrix::identity(n).scale(&coeffs[n - k + 1]);
            let t = (self * &aux).trace();
            coeffs[n - k] = -t / Rational::from_integer(BigInt::from(k));
        }
        RatPoly::new(coeffs)
    }
}

impl Index<(usize, usize)> for RatMatrix {
    type Output = Rational;

    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        assert!(i < self.rows && j < self.cols, "matrix index out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        assert!(i < self.rows && j < self.cols, "matrix index out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &RatMatrix {
    type Output = RatMatrix;

    fn mul(self, rhs: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = RatMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out.data[i * rhs.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }
}

impl Add for &RatMatrix {
    type Output = RatMatrix;

    fn add(self, rhs: &RatMatrix) -> RatMatrix {
        assert!(self.rows == rhs.rows && self.cols == rhs.cols, "sum shape mismatch");
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &RatMatrix {
    type Output = RatMatrix;

    fn sub(self, rhs: &RatMatrix) -> RatMatrix {
        assert!(
            self.rows == rhs.rows && self.cols == rhs.cols,
            "difference shape mismatch"
        );
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &RatMatrix {
    type Output = RatMatrix;

    fn neg(self) -> RatMatrix {
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| -a).collect(),
        }
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for (j, x) in self.row(i).iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", Canonical(x))?;
            }
        }
        write!(f, "] ({}x{})", self.rows, self.cols)
    }
}

/// Exact vector helpers over `[Rational]`.
pub mod vector {
    use super::*;

    pub fn add(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        assert_eq!(a.len(), b.len());
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    pub fn sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        assert_eq!(a.len(), b.len());
        a.iter().zip(b).map(|(x, y)| x - y).collect()
    }

    pub fn scale(a: &[Rational], f: &Rational) -> Vec<Rational> {
        a.iter().map(|x| x * f).collect()
    }

    pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
        assert_eq!(a.len(), b.len());
        a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
    }

    pub fn inf_norm(a: &[Rational]) -> Rational {
        a.iter().map(Signed::abs).max().unwrap_or_else(Rational::zero)
    }

    pub fn norm_sq(a: &[Rational]) -> Rational {
        dot(a, a)
    }

    pub fn is_zero(a: &[Rational]) -> bool {
        a.iter().all(Zero::is_zero)
    }

    pub fn zeros(n: usize) -> Vec<Rational> {
        vec![Rational::zero(); n]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratlin::{int, rat};

    fn m(rows: &[&[(i64, i64)]]) -> RatMatrix {
        RatMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&(n, d)| rat(n, d)).collect())
                .collect(),
        )
    }

    fn ints(rows: &[&[i64]]) -> RatMatrix {
        RatMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect())
    }

    fn md() -> RatMatrix {
        m(&[
            &[(0, 1), (1, 2), (1, 2)],
            &[(1, 2), (1, 4), (1, 4)],
            &[(1, 2), (1, 4), (1, 4)],
        ])
    }

    #[test]
    fn rank_examples() {
        assert_eq!(RatMatrix::identity(2).rank(), 2);
        assert_eq!(ints(&[&[1, 2], &[2, 4]]).rank(), 1);
        assert_eq!(m(&[&[(1, 2), (1, 2)], &[(1, 2), (1, 2)]]).rank(), 1);
        assert_eq!(RatMatrix::zeros(3, 2).rank(), 0);
        assert_eq!(RatMatrix::zeros(0, 0).rank(), 0);
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(RatMatrix::identity(3).kernel_basis().cols(), 0);
        let k = ints(&[&[1, -1]]).kernel_basis();
        assert_eq!(k, ints(&[&[1], &[1]]));
        // M_d kernel is spanned by (0, 1, -1) up to sign.
        let k = md().kernel_basis();
        assert_eq!(k.cols(), 1);
        let col = k.column(0);
        assert!(col == [int(0), int(1), int(-1)] || col == [int(0), int(-1), int(1)]);
        assert!(md().mul_vec(&col).iter().all(Zero::is_zero));
    }

    #[test]
    fn solve_examples() {
        let b = [rat(3, 7), int(-2)];
        assert_eq!(RatMatrix::identity(2).solve(&b).unwrap(), b);
        let a = ints(&[&[1, 1], &[1, -1]]);
        assert_eq!(a.solve(&[int(1), int(0)]).unwrap(), [rat(1, 2), rat(1, 2)]);
        assert_eq!(ints(&[&[1, 1]]).solve(&[int(2)]).unwrap(), [int(2), int(0)]);
        assert!(ints(&[&[1, 1], &[1, 1]]).solve(&[int(1), int(2)]).is_none());
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(RatMatrix::identity(3).inverse().unwrap(), RatMatrix::identity(3));
        let a = m(&[&[(1, 2), (1, 1)], &[(1, 2), (-1, 1)]]);
        let expected = m(&[&[(1, 1), (1, 1)], &[(1, 2), (-1, 2)]]);
        assert_eq!(a.inverse().unwrap(), expected);
        assert!(ints(&[&[1, 1], &[1, 1]]).inverse().is_none());
        assert_eq!(RatMatrix::zeros(0, 0).inverse().unwrap(), RatMatrix::zeros(0, 0));
    }

    #[test]
    fn pow_examples() {
        let a = md();
        assert_eq!(a.pow(0), RatMatrix::identity(3));
        let swap = ints(&[&[0, 1], &[1, 0]]);
        assert_eq!(swap.pow(2), RatMatrix::identity(2));
        assert_eq!(m(&[&[(1, 2)]]).pow(4), m(&[&[(1, 16)]]));
    }

    #[test]
    fn charpoly_examples() {
        let one = RatPoly::new(vec![int(-1), int(1)]);
        let mut cube = RatPoly::one();
        for _ in 0..3 {
            cube = &cube * &one;
        }
        assert_eq!(RatMatrix::identity(3).charpoly(), cube);
        assert_eq!(
            ints(&[&[0, 1], &[1, 0]]).charpoly(),
            RatPoly::new(vec![int(-1), int(0), int(1)])
        );
        let mc = m(&[&[(3, 4), (1, 4)], &[(1, 4), (3, 4)]]);
        assert_eq!(mc.charpoly(), RatPoly::new(vec![rat(1, 2), rat(-3, 2), int(1)]));
        assert_eq!(RatMatrix::zeros(0, 0).charpoly(), RatPoly::one());
    }

    #[test]
    fn column_space_examples() {
        let (b, idx) = RatMatrix::identity(3).column_space_basis();
        assert_eq!(idx, [0, 1, 2]);
        assert_eq!(b, RatMatrix::identity(3));
        let (b, idx) = ints(&[&[1, 2], &[2, 4]]).column_space_basis();
        assert_eq!(idx, [0]);
        assert_eq!(b, ints(&[&[1], &[2]]));
        let mc_minus_i = m(&[&[(-1, 4), (1, 4)], &[(1, 4), (-1, 4)]]);
        let (b, idx) = mc_minus_i.column_space_basis();
        assert_eq!(idx, [0]);
        assert_eq!(b, m(&[&[(-1, 4)], &[(1, 4)]]));
    }

    #[test]
    fn inf_norm_examples() {
        assert_eq!(RatMatrix::identity(2).induced_inf_norm(), int(1));
        assert_eq!(m(&[&[(1, 2), (-1, 2)], &[(0, 1), (1, 4)]]).induced_inf_norm(), int(1));
        assert_eq!(m(&[&[(1, 2)]]).induced_inf_norm(), rat(1, 2));
    }

    #[test]
    fn det_matches_known_values() {
        assert_eq!(ints(&[&[2, 1], &[1, 3]]).det(), int(5));
        assert_eq!(ints(&[&[0, 1], &[1, 0]]).det(), int(-1));
        assert_eq!(md().det(), int(0));
        assert_eq!(m(&[&[(1, 2), (1, 1)], &[(1, 2), (-1, 1)]]).det(), int(-1));
    }

    #[test]
    fn stacking() {
        let a = ints(&[&[1, 2]]);
        let b = ints(&[&[3, 4]]);
        assert_eq!(a.vstack(&b), ints(&[&[1, 2], &[3, 4]]));
        assert_eq!(a.hstack(&b), ints(&[&[1, 2, 3, 4]]));
        assert_eq!(ints(&[&[1, 2], &[3, 4]]).row_range(1, 2), b);
    }
}

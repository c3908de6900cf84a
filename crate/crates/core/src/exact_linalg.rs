//! Exact integer and rational matrix kernel.
//!
//! Everything here is arbitrary precision: determinants by fraction-free
//! (Bareiss) elimination, row-style Hermite normal form with transform,
//! saturated integer kernels, exact LDL^T factorisation and LLL reduction
//! of Gram matrices with rational delta = 3/4.
//!
//! Conventions: lattice elements are coordinate *rows*, a basis is a matrix
//! of rows, and a sublattice with row basis `B` inside a parent with Gram
//! `G` has Gram `B * G * B^T`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::LinalgError;

/// Dense row-major matrix over the integers.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntegerMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<BigInt>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count must be rows * cols");
        Self { rows, cols, data }
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        Self::new(rows, cols, vec![BigInt::zero(); rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        for row in &rows {
            assert_eq!(row.len(), c, "ragged rows");
        }
        Self::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
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

    pub fn at(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self.at(i, j) == self.at(j, i)))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.at(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matrix product");
        let mut out = Self::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.at(i, j) + a * other.at(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::new(
            self.rows,
            self.cols,
            self.data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::new(
            self.rows,
            self.cols,
            self.data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self::new(self.rows, self.cols, self.data.iter().map(|a| a * k).collect())
    }

    /// `self ^ exp` by repeated multiplication; `exp = 0` gives the identity.
    pub fn pow(&self, exp: u64) -> Self {
        assert!(self.is_square());
        let mut acc = Self::identity(self.rows);
        for _ in 0..exp {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == Self::identity(self.rows)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// Block-diagonal stack of two square matrices.
    pub fn block_diag(a: &Self, b: &Self) -> Self {
        assert!(a.is_square() && b.is_square());
        let n = a.rows + b.rows;
        let mut m = Self::zero(n, n);
        for i in 0..a.rows {
            for j in 0..a.rows {
                m.set(i, j, a.at(i, j).clone());
            }
        }
        for i in 0..b.rows {
            for j in 0..b.rows {
                m.set(a.rows + i, a.rows + j, b.at(i, j).clone());
            }
        }
        m
    }

    /// Vertical concatenation; both operands must have the same column count.
    pub fn stack(a: &Self, b: &Self) -> Self {
        assert_eq!(a.cols, b.cols);
        let mut data = a.data.clone();
        data.extend_from_slice(&b.data);
        Self::new(a.rows + b.rows, a.cols, data)
    }

    pub fn to_rational(&self) -> RationalMatrix {
        RationalMatrix::new(
            self.rows,
            self.cols,
            self.data
                .iter()
                .map(|x| BigRational::from_integer(x.clone()))
                .collect(),
        )
    }

    /// `x * self` for a coordinate row `x`.
    pub fn apply_row(&self, x: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(x.len(), self.rows);
        let mut out = vec![BigInt::zero(); self.cols];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for j in 0..self.cols {
                out[j] += xi * self.at(i, j);
            }
        }
        out
    }
}

impl std::fmt::Debug for IntegerMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "[")?;
        for i in 0..self.rows {
            writeln!(
                f,
                "  [{}]",
                self.row(i)
                    .iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            )?;
        }
        write!(f, "]")
    }
}

/// Dense row-major matrix over the rationals; entries are kept reduced by
/// `BigRational` itself.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl RationalMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<BigRational>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        Self::new(rows, cols, vec![BigRational::zero(); rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.set(i, i, BigRational::one());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| self.at(i, j) == self.at(j, i)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.at(i, j) + a * other.at(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        Self::new(self.rows, self.cols, self.data.iter().map(|a| a * k).collect())
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|x| x.is_integer())
    }

    /// Converts to an integer matrix; panics unless every entry is integral.
    pub fn to_integer(&self) -> IntegerMatrix {
        IntegerMatrix::new(
            self.rows,
            self.cols,
            self.data
                .iter()
                .map(|x| {
                    assert!(x.is_integer(), "entry {} is not integral", x);
                    x.to_integer()
                })
                .collect(),
        )
    }

    /// Exact inverse by Gauss-Jordan elimination; `None` when singular.
    pub fn inverse(&self) -> Option<Self> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a.at(r, col).is_zero())?;
            if pivot != col {
                for j in 0..n {
                    let (x, y) = (a.at(col, j).clone(), a.at(pivot, j).clone());
                    a.set(col, j, y);
                    a.set(pivot, j, x);
                    let (x, y) = (inv.at(col, j).clone(), inv.at(pivot, j).clone());
                    inv.set(col, j, y);
                    inv.set(pivot, j, x);
                }
            }
            let p = a.at(col, col).clone();
            for j in 0..n {
                let v = a.at(col, j) / &p;
                a.set(col, j, v);
                let v = inv.at(col, j) / &p;
                inv.set(col, j, v);
            }
            for r in 0..n {
                if r == col || a.at(r, col).is_zero() {
                    continue;
                }
                let f = a.at(r, col).clone();
                for j in 0..n {
                    let v = a.at(r, j) - &f * a.at(col, j);
                    a.set(r, j, v);
                    let v = inv.at(r, j) - &f * inv.at(col, j);
                    inv.set(r, j, v);
                }
            }
        }
        Some(inv)
    }
}

impl std::fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "[")?;
        for i in 0..self.rows {
            writeln!(
                f,
                "  [{}]",
                (0..self.cols)
                    .map(|j| self.at(i, j).to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            )?;
        }
        write!(f, "]")
    }
}

/// Exact determinant by fraction-free (Bareiss) elimination.
pub fn det_bareiss(m: &IntegerMatrix) -> Result<BigInt, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NonSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    if n == 0 {
        return Ok(BigInt::one());
    }
    let mut a = m.clone();
    let mut sign = 1i32;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a.at(k, k).is_zero() {
            match (k + 1..n).find(|&r| !a.at(r, k).is_zero()) {
                Some(r) => {
                    for j in 0..n {
                        let (x, y) = (a.at(k, j).clone(), a.at(r, j).clone());
                        a.set(k, j, y);
                        a.set(r, j, x);
                    }
                    sign = -sign;
                }
                None => return Ok(BigInt::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = a.at(i, j) * a.at(k, k) - a.at(i, k) * a.at(k, j);
                let (q, r) = num.div_rem(&prev);
                debug_assert!(r.is_zero(), "Bareiss division must be exact");
                a.set(i, j, q);
            }
            a.set(i, k, BigInt::zero());
        }
        prev = a.at(k, k).clone();
    }
    let d = a.at(n - 1, n - 1).clone();
    Ok(if sign < 0 { -d } else { d })
}

/// Row-style Hermite normal form `u * m = h` with unimodular `u`.
pub struct HnfResult {
    /// Upper-echelon form: positive pivots, entries above each pivot reduced
    /// into `[0, pivot)`, zero rows at the bottom.
    pub h: IntegerMatrix,
    /// Unimodular transform with `u * m = h`.
    pub u: IntegerMatrix,
    /// Number of nonzero rows of `h`.
    pub rank: usize,
}

pub fn hnf(m: &IntegerMatrix) -> HnfResult {
    let (rows, cols) = (m.rows(), m.cols());
    let mut h = m.clone();
    let mut u = IntegerMatrix::identity(rows);
    let mut pivot_row = 0usize;

    let row_op_sub = |h: &mut IntegerMatrix, u: &mut IntegerMatrix, dst: usize, src: usize, q: &BigInt| {
        if q.is_zero() {
            return;
        }
        for j in 0..cols {
            let v = h.at(dst, j) - q * h.at(src, j);
            h.set(dst, j, v);
        }
        for j in 0..rows {
            let v = u.at(dst, j) - q * u.at(src, j);
            u.set(dst, j, v);
        }
    };

    for col in 0..cols {
        if pivot_row == rows {
            break;
        }
        // Clear the column below pivot_row with unimodular 2x2 transforms.
        for r in pivot_row + 1..rows {
            if h.at(r, col).is_zero() {
                continue;
            }
            if h.at(pivot_row, col).is_zero() {
                for j in 0..cols {
                    let (x, y) = (h.at(pivot_row, j).clone(), h.at(r, j).clone());
                    h.set(pivot_row, j, y);
                    h.set(r, j, x);
                }
                for j in 0..rows {
                    let (x, y) = (u.at(pivot_row, j).clone(), u.at(r, j).clone());
                    u.set(pivot_row, j, y);
                    u.set(r, j, x);
                }
                continue;
            }
            let a = h.at(pivot_row, col).clone();
            let b = h.at(r, col).clone();
            let e = a.extended_gcd(&b);
            // [s t; -b/g a/g] is unimodular and sends (a, b) to (g, 0).
            let (s, t, g) = (e.x, e.y, e.gcd);
            let bg = &b / &g;
            let ag = &a / &g;
            for j in 0..cols {
                let (x, y) = (h.at(pivot_row, j).clone(), h.at(r, j).clone());
                h.set(pivot_row, j, &s * &x + &t * &y);
                h.set(r, j, &ag * &y - &bg * &x);
            }
            for j in 0..rows {
                let (x, y) = (u.at(pivot_row, j).clone(), u.at(r, j).clone());
                u.set(pivot_row, j, &s * &x + &t * &y);
                u.set(r, j, &ag * &y - &bg * &x);
            }
        }
        if h.at(pivot_row, col).is_zero() {
            continue;
        }
        if h.at(pivot_row, col).is_negative() {
            for j in 0..cols {
                let v = -h.at(pivot_row, j);
                h.set(pivot_row, j, v);
            }
            for j in 0..rows {
                let v = -u.at(pivot_row, j);
                u.set(pivot_row, j, v);
            }
        }
        let pivot = h.at(pivot_row, col).clone();
        for r in 0..pivot_row {
            let q = h.at(r, col).div_floor(&pivot);
            row_op_sub(&mut h, &mut u, r, pivot_row, &q);
        }
        pivot_row += 1;
    }
    HnfResult {
        h,
        u,
        rank: pivot_row,
    }
}

/// Basis of the saturated left kernel `{ x : x * m = 0 }`, one row per basis
/// vector, in Hermite normal form. The result has zero rows when the kernel
/// is trivial.
pub fn integer_kernel(m: &IntegerMatrix) -> IntegerMatrix {
    let res = hnf(m);
    let null_rows: Vec<Vec<BigInt>> = (res.rank..m.rows())
        .map(|i| res.u.row(i).to_vec())
        .collect();
    if null_rows.is_empty() {
        return IntegerMatrix::zero(0, m.rows());
    }
    let k = hnf(&IntegerMatrix::from_rows(null_rows));
    let basis: Vec<Vec<BigInt>> = (0..k.rank).map(|i| k.h.row(i).to_vec()).collect();
    IntegerMatrix::from_rows(basis)
}

/// Index of the sublattice spanned by `coords` inside `ZZ^cols`; the rows
/// must generate a full-rank sublattice.
pub fn index_of_sublattice(coords: &IntegerMatrix) -> Result<BigInt, LinalgError> {
    let res = hnf(coords);
    if res.rank < coords.cols() {
        return Err(LinalgError::NotFullRank);
    }
    let mut idx = BigInt::one();
    let mut col = 0;
    for r in 0..res.rank {
        while res.h.at(r, col).is_zero() {
            col += 1;
        }
        idx *= res.h.at(r, col);
    }
    Ok(idx)
}

/// Solves `x * m = rhs` over the integers; `None` when no integral solution
/// exists.
pub fn solve_left_integer(m: &IntegerMatrix, rhs: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(rhs.len(), m.cols());
    let res = hnf(m);
    let mut residual = rhs.to_vec();
    let mut y = vec![BigInt::zero(); m.rows()];
    let mut col = 0usize;
    for r in 0..res.rank {
        while res.h.at(r, col).is_zero() {
            col += 1;
        }
        let pivot = res.h.at(r, col);
        let (q, rem) = residual[col].div_rem(pivot);
        if !rem.is_zero() {
            return None;
        }
        if !q.is_zero() {
            for j in 0..m.cols() {
                residual[j] -= &q * res.h.at(r, j);
            }
        }
        y[r] = q;
    }
    if residual.iter().any(|x| !x.is_zero()) {
        return None;
    }
    Some(res.u.apply_row(&y))
}

/// Exact LDL^T factorisation of a symmetric matrix: `g = L * diag(d) * L^T`
/// with unit lower-triangular `L`. Succeeds precisely when `g` is positive
/// definite.
pub struct CholeskyData {
    pub diag: Vec<BigRational>,
    pub unit_lower: RationalMatrix,
}

pub fn rational_cholesky(g: &RationalMatrix) -> Result<CholeskyData, LinalgError> {
    if !g.is_symmetric() {
        return Err(LinalgError::NotSymmetric);
    }
    let n = g.rows();
    let mut l = RationalMatrix::identity(n);
    let mut d: Vec<BigRational> = Vec::with_capacity(n);
    for k in 0..n {
        let mut dk = g.at(k, k).clone();
        for j in 0..k {
            dk -= l.at(k, j) * l.at(k, j) * &d[j];
        }
        if dk <= BigRational::zero() {
            return Err(LinalgError::NotPositiveDefinite);
        }
        for i in k + 1..n {
            let mut v = g.at(i, k).clone();
            for j in 0..k {
                v -= l.at(i, j) * l.at(k, j) * &d[j];
            }
            l.set(i, k, v / &dk);
        }
        d.push(dk);
    }
    Ok(CholeskyData {
        diag: d,
        unit_lower: l,
    })
}

/// LLL reduction of a positive definite Gram matrix with exact rational
/// arithmetic and delta = 3/4. Returns `(g', u)` with `g' = u * g * u^T`.
pub fn lll_reduce(
    g: &IntegerMatrix,
) -> Result<(IntegerMatrix, IntegerMatrix), LinalgError> {
    if !g.is_symmetric() {
        return Err(LinalgError::NotSymmetric);
    }
    let n = g.rows();
    // Initial factorisation doubles as the positive-definiteness check.
    let chol = rational_cholesky(&g.to_rational())?;
    if n <= 1 {
        return Ok((g.clone(), IntegerMatrix::identity(n)));
    }
    let mut gram = g.clone();
    let mut u = IntegerMatrix::identity(n);
    // mu[i][j] for j < i, b[i] = squared Gram-Schmidt norms.
    let mut mu: Vec<Vec<BigRational>> = (0..n)
        .map(|i| (0..i).map(|j| chol.unit_lower.at(i, j).clone()).collect())
        .collect();
    let mut b: Vec<BigRational> = chol.diag.clone();

    let delta = BigRational::new(BigInt::from(3), BigInt::from(4));
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));

    // basis_k -= q * basis_j, applied congruently to the Gram matrix.
    let row_reduce = |gram: &mut IntegerMatrix,
                      u: &mut IntegerMatrix,
                      mu: &mut Vec<Vec<BigRational>>,
                      k: usize,
                      j: usize,
                      q: &BigInt| {
        if q.is_zero() {
            return;
        }
        // Congruent update G <- E G E^T for E = I - q * e_k e_j^T:
        // row k -= q * row j, then column k -= q * column j.
        for c in 0..n {
            let v = gram.at(k, c) - q * gram.at(j, c);
            gram.set(k, c, v);
        }
        for c in 0..n {
            let v = gram.at(c, k) - q * gram.at(c, j);
            gram.set(c, k, v);
        }
        for c in 0..n {
            let v = u.at(k, c) - q * u.at(j, c);
            u.set(k, c, v);
        }
        let qr = BigRational::from_integer(q.clone());
        for l in 0..j {
            let v = &mu[k][l] - &qr * &mu[j][l];
            mu[k][l] = v;
        }
        mu[k][j] -= qr;
    };

    let mut k = 1usize;
    while k < n {
        // Size-reduce row k against rows k-1 .. 0.
        for j in (0..k).rev() {
            if mu[k][j].abs() > half {
                let q = mu[k][j].round().to_integer();
                row_reduce(&mut gram, &mut u, &mut mu, k, j, &q);
            }
        }
        // Lovász condition.
        let lhs = b[k].clone();
        let rhs = (&delta - &mu[k][k - 1] * &mu[k][k - 1]) * &b[k - 1];
        if lhs < rhs {
            // Swap rows k-1 and k, then patch the GSO data.
            for c in 0..n {
                let (x, y) = (gram.at(k - 1, c).clone(), gram.at(k, c).clone());
                gram.set(k - 1, c, y);
                gram.set(k, c, x);
            }
            for c in 0..n {
                let (x, y) = (gram.at(c, k - 1).clone(), gram.at(c, k).clone());
                gram.set(c, k - 1, y);
                gram.set(c, k, x);
            }
            for c in 0..n {
                let (x, y) = (u.at(k - 1, c).clone(), u.at(k, c).clone());
                u.set(k - 1, c, y);
                u.set(k, c, x);
            }
            let mu_ = mu[k][k - 1].clone();
            let b_new = &b[k] + &mu_ * &mu_ * &b[k - 1];
            let mu_new = &mu_ * &b[k - 1] / &b_new;
            b[k] = &b[k - 1] * &b[k] / &b_new;
            b[k - 1] = b_new;
            for j in 0..k - 1 {
                let (x, y) = (mu[k - 1][j].clone(), mu[k][j].clone());
                mu[k - 1][j] = y;
                mu[k][j] = x;
            }
            mu[k][k - 1] = mu_new.clone();
            for i in k + 1..n {
                let t = mu[i][k].clone();
                mu[i][k] = &mu[i][k - 1] - &mu_ * &t;
                mu[i][k - 1] = &t + &mu_new * &mu[i][k];
            }
            k = k.max(2) - 1;
        } else {
            k += 1;
        }
    }
    debug_assert_eq!(gram, u.mul(g).mul(&u.transpose()));
    Ok((gram, u))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntegerMatrix {
        IntegerMatrix::from_i64_rows(rows)
    }

    #[test]
    fn det_of_binary_form() {
        assert_eq!(det_bareiss(&m(&[&[4, 1], &[1, 6]])).unwrap(), BigInt::from(23));
    }

    #[test]
    fn det_of_identity() {
        for n in 0..6 {
            assert_eq!(
                det_bareiss(&IntegerMatrix::identity(n)).unwrap(),
                BigInt::one()
            );
        }
    }

    #[test]
    fn det_two_by_two_cofactor() {
        // 2x2 cofactor oracle: ad - bc.
        assert_eq!(det_bareiss(&m(&[&[2, 1], &[1, 2]])).unwrap(), BigInt::from(3));
        assert_eq!(
            det_bareiss(&m(&[&[2, 3], &[3, 2]])).unwrap(),
            BigInt::from(-5)
        );
    }

    #[test]
    fn det_rejects_non_square() {
        assert!(matches!(
            det_bareiss(&m(&[&[1, 2, 3], &[4, 5, 6]])),
            Err(LinalgError::NonSquare { .. })
        ));
    }

    #[test]
    fn det_singular_with_zero_pivot() {
        assert_eq!(
            det_bareiss(&m(&[&[0, 1], &[0, 2]])).unwrap(),
            BigInt::zero()
        );
        assert_eq!(
            det_bareiss(&m(&[&[0, 1, 2], &[1, 0, 1], &[2, 1, 0]])).unwrap(),
            BigInt::from(4)
        );
    }

    #[test]
    fn hnf_hand_example() {
        let res = hnf(&m(&[&[2, 0], &[1, 1]]));
        assert_eq!(res.h, m(&[&[1, 1], &[0, 2]]));
        assert_eq!(res.u.mul(&m(&[&[2, 0], &[1, 1]])), res.h);
        assert_eq!(res.rank, 2);
        let du = det_bareiss(&res.u).unwrap();
        assert!(du == BigInt::one() || du == BigInt::from(-1));
    }

    #[test]
    fn hnf_identity_and_zero() {
        let res = hnf(&IntegerMatrix::identity(4));
        assert_eq!(res.h, IntegerMatrix::identity(4));
        let res = hnf(&IntegerMatrix::zero(2, 2));
        assert!(res.h.is_zero());
        assert_eq!(res.u, IntegerMatrix::identity(2));
        assert_eq!(res.rank, 0);
    }

    #[test]
    fn hnf_is_idempotent() {
        let a = m(&[&[6, 5, 9], &[4, 10, 11], &[7, 5, 2]]);
        let res = hnf(&a);
        let again = hnf(&res.h);
        assert_eq!(again.h, res.h);
    }

    #[test]
    fn kernel_of_symmetric_swap() {
        let k = integer_kernel(&m(&[&[-1, 1], &[1, -1]]));
        assert_eq!(k, m(&[&[1, 1]]));
    }

    #[test]
    fn kernel_of_identity_is_trivial() {
        let k = integer_kernel(&IntegerMatrix::identity(3));
        assert_eq!(k.rows(), 0);
        assert_eq!(k.cols(), 3);
    }

    #[test]
    fn kernel_is_saturated() {
        // 2a + 4b = 0 has saturated solution lattice spanned by (2, -1).
        let k = integer_kernel(&m(&[&[2], &[4]]));
        assert_eq!(k, m(&[&[2, -1]]));
    }

    #[test]
    fn sublattice_index() {
        assert_eq!(
            index_of_sublattice(&IntegerMatrix::identity(3)).unwrap(),
            BigInt::one()
        );
        assert_eq!(
            index_of_sublattice(&m(&[&[2, 0], &[0, 1]])).unwrap(),
            BigInt::from(2)
        );
        assert_eq!(
            index_of_sublattice(&m(&[&[1, 1], &[-1, 1]])).unwrap(),
            BigInt::from(2)
        );
        assert!(matches!(
            index_of_sublattice(&m(&[&[1, 1], &[2, 2]])),
            Err(LinalgError::NotFullRank)
        ));
    }

    #[test]
    fn solve_left_integer_examples() {
        let a = m(&[&[2, 0], &[1, 1]]);
        let x = solve_left_integer(&a, &[BigInt::from(3), BigInt::from(1)]).unwrap();
        assert_eq!(
            IntegerMatrix::from_rows(vec![x]).mul(&a).row(0),
            &[BigInt::from(3), BigInt::from(1)][..]
        );
        // (1, 0) is not in the row lattice of [[2,0],[0,2]].
        assert!(solve_left_integer(
            &m(&[&[2, 0], &[0, 2]]),
            &[BigInt::one(), BigInt::zero()]
        )
        .is_none());
    }

    #[test]
    fn cholesky_diagonal_form() {
        let c = rational_cholesky(&m(&[&[2, 0], &[0, 2]]).to_rational()).unwrap();
        assert_eq!(c.diag, vec![BigRational::from_integer(2.into()); 2]);
        assert_eq!(c.unit_lower, RationalMatrix::identity(2));
    }

    #[test]
    fn cholesky_hand_elimination() {
        let c = rational_cholesky(&m(&[&[2, -1], &[-1, 2]]).to_rational()).unwrap();
        assert_eq!(c.diag[0], BigRational::from_integer(2.into()));
        assert_eq!(
            c.diag[1],
            BigRational::new(BigInt::from(3), BigInt::from(2))
        );
        assert_eq!(
            *c.unit_lower.at(1, 0),
            BigRational::new(BigInt::from(-1), BigInt::from(2))
        );
    }

    #[test]
    fn cholesky_rejects_semidefinite() {
        assert!(matches!(
            rational_cholesky(&m(&[&[0, 0], &[0, 1]]).to_rational()),
            Err(LinalgError::NotPositiveDefinite)
        ));
    }

    #[test]
    fn cholesky_reconstructs_input() {
        let g = m(&[&[4, 1, 0], &[1, 6, 2], &[0, 2, 8]]);
        let c = rational_cholesky(&g.to_rational()).unwrap();
        let n = 3;
        let mut d = RationalMatrix::zero(n, n);
        for i in 0..n {
            d.set(i, i, c.diag[i].clone());
        }
        let lt = {
            let mut t = RationalMatrix::zero(n, n);
            for i in 0..n {
                for j in 0..n {
                    t.set(j, i, c.unit_lower.at(i, j).clone());
                }
            }
            t
        };
        assert_eq!(c.unit_lower.mul(&d).mul(&lt), g.to_rational());
    }

    #[test]
    fn lll_keeps_reduced_input() {
        let g = m(&[&[2, -1], &[-1, 2]]);
        let (g2, u) = lll_reduce(&g).unwrap();
        assert_eq!(g2, u.mul(&g).mul(&u.transpose()));
        assert_eq!(det_bareiss(&g2).unwrap(), BigInt::from(3));
        assert_eq!(g2.at(0, 0), &BigInt::from(2));
        assert_eq!(g2.at(1, 1), &BigInt::from(2));
    }

    #[test]
    fn lll_finds_unimodular_reduction() {
        // det 1 form; rank-2 reduction must reach max diagonal <= 2.
        let g = m(&[&[2, 3], &[3, 5]]);
        let (g2, u) = lll_reduce(&g).unwrap();
        assert_eq!(g2, u.mul(&g).mul(&u.transpose()));
        assert_eq!(det_bareiss(&g2).unwrap(), BigInt::one());
        assert!(g2.at(0, 0) <= &BigInt::from(2));
        assert!(g2.at(1, 1) <= &BigInt::from(2));
    }

    #[test]
    fn lll_preserves_determinant_and_evenness() {
        let g = m(&[&[4, 2, 1], &[2, 6, 3], &[1, 3, 8]]);
        let (g2, u) = lll_reduce(&g).unwrap();
        assert_eq!(det_bareiss(&g2).unwrap(), det_bareiss(&g).unwrap());
        assert_eq!(g2, u.mul(&g).mul(&u.transpose()));
        let du = det_bareiss(&u).unwrap();
        assert!(du == BigInt::one() || du == BigInt::from(-1));
    }

    #[test]
    fn lll_rejects_indefinite() {
        assert!(matches!(
            lll_reduce(&m(&[&[2, 3], &[3, 2]])),
            Err(LinalgError::NotPositiveDefinite)
        ));
    }
}

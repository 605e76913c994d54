use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type IntVector = Vec<BigInt>;

/// Square matrix with arbitrary-precision integer entries, stored row-major.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntMatrix {
    dim: usize,
    entries: Vec<BigInt>,
}

pub fn vector<I: Into<BigInt>>(v: impl IntoIterator<Item = I>) -> IntVector {
    v.into_iter().map(Into::into).collect()
}

pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn scale(v: &[BigInt], k: &BigInt) -> IntVector {
    v.iter().map(|x| x * k).collect()
}

pub fn add(a: &[BigInt], b: &[BigInt]) -> IntVector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn neg(a: &[BigInt]) -> IntVector {
    a.iter().map(|x| -x).collect()
}

pub fn is_zero(a: &[BigInt]) -> bool {
    a.iter().all(Zero::is_zero)
}

/// Flip the sign so that the first nonzero coordinate is positive.
pub fn normalize_sign(v: &[BigInt]) -> IntVector {
    match v.iter().find(|x| !x.is_zero()) {
        Some(x) if x.is_negative() => neg(v),
        _ => v.to_vec(),
    }
}

pub fn to_i64_vec(v: &[BigInt]) -> Result<Vec<i64>> {
    v.iter().map(|x| x.to_i64().ok_or(Error::Overflow)).collect()
}

/// Gauss-Jordan inverse of a square rational matrix.
pub fn rational_inverse(m: &[Vec<BigRational>]) -> Option<Vec<Vec<BigRational>>> {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut row = row.clone();
            row.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(c, p);
        let inv = a[c][c].recip();
        for x in a[c].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                for j in 0..2 * n {
                    let t = &f * &a[c][j];
                    a[r][j] -= t;
                }
            }
        }
    }
    Some(a.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Rank of a rational matrix given by rows.
pub fn rational_rank(rows: &[Vec<BigRational>]) -> usize {
    let mut a = rows.to_vec();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..a.len()).find(|&r| !a[r][c].is_zero()) else { continue };
        a.swap(rank, p);
        for r in rank + 1..a.len() {
            if !a[r][c].is_zero() {
                let f = &a[r][c] / &a[rank][c];
                for j in c..cols {
                    let t = &f * &a[rank][j];
                    a[r][j] -= t;
                }
            }
        }
        rank += 1;
    }
    rank
}

impl IntMatrix {
    pub fn zero(dim: usize) -> Self {
        IntMatrix { dim, entries: vec![BigInt::zero(); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zero(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = BigInt::one();
        }
        m
    }

    pub fn from_rows<I: Into<BigInt> + Clone>(rows: &[Vec<I>]) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::NotSquare { row: r, expected: dim, found: row.len() });
            }
            entries.extend(row.iter().cloned().map(Into::into));
        }
        Ok(IntMatrix { dim, entries })
    }

    pub fn diagonal<I: Into<BigInt> + Clone>(diag: &[I]) -> Self {
        let dim = diag.len();
        let mut m = Self::zero(dim);
        for (i, d) in diag.iter().enumerate() {
            m.entries[i * dim + i] = d.clone().into();
        }
        m
    }

    /// Outer-product update `I + b·βᵀ`.
    pub fn rank_one_update(b: &[BigInt], beta: &[BigInt]) -> Self {
        let dim = b.len();
        let mut m = Self::identity(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.entries[i * dim + j] += &b[i] * &beta[j];
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.entries[i * self.dim + j] = v;
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.entries[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> Vec<IntVector> {
        (0..self.dim).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> IntVector {
        (0..self.dim).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.dim, other.dim, "matrix dimensions differ");
        let n = self.dim;
        let mut entries = vec![BigInt::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = &self.entries[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    entries[i * n + j] += a * &other.entries[k * n + j];
                }
            }
        }
        IntMatrix { dim: n, entries }
    }

    /// `M·v` for a column vector `v`.
    pub fn apply(&self, v: &[BigInt]) -> IntVector {
        (0..self.dim).map(|i| dot(self.row(i), v)).collect()
    }

    /// `β∘M` for a row vector `β`.
    pub fn apply_covector(&self, beta: &[BigInt]) -> IntVector {
        (0..self.dim)
            .map(|j| (0..self.dim).map(|i| &beta[i] * self.get(i, j)).sum())
            .collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let n = self.dim;
        let mut m = Self::zero(n);
        for i in 0..n {
            for j in 0..n {
                m.entries[j * n + i] = self.entries[i * n + j].clone();
            }
        }
        m
    }

    pub fn neg(&self) -> IntMatrix {
        IntMatrix { dim: self.dim, entries: self.entries.iter().map(|x| -x).collect() }
    }

    pub fn sub(&self, other: &IntMatrix) -> IntMatrix {
        IntMatrix {
            dim: self.dim,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn add(&self, other: &IntMatrix) -> IntMatrix {
        IntMatrix {
            dim: self.dim,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn trace(&self) -> BigInt {
        (0..self.dim).map(|i| self.get(i, i).clone()).sum()
    }

    pub fn is_identity(&self) -> bool {
        (0..self.dim).all(|i| {
            (0..self.dim).all(|j| {
                let e = self.get(i, j);
                if i == j {
                    e.is_one()
                } else {
                    e.is_zero()
                }
            })
        })
    }

    pub fn is_identity_mod(&self, m: &BigInt) -> bool {
        (0..self.dim).all(|i| {
            (0..self.dim).all(|j| {
                let e = if i == j { self.get(i, j) - 1 } else { self.get(i, j).clone() };
                e.mod_floor(m).is_zero()
            })
        })
    }

    /// Fraction-free Bareiss elimination.
    pub fn determinant(&self) -> BigInt {
        let n = self.dim;
        if n == 0 {
            return BigInt::one();
        }
        let mut a: Vec<Vec<BigInt>> = self.rows();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                    Some(r) => {
                        a.swap(k, r);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                    a[i][j] = v;
                }
            }
            prev = a[k][k].clone();
        }
        sign * &a[n - 1][n - 1]
    }

    pub fn is_unimodular(&self) -> bool {
        self.determinant().abs().is_one()
    }

    /// Inverse over the rationals.
    pub fn rational_inverse(&self) -> Option<Vec<Vec<BigRational>>> {
        let rows: Vec<Vec<BigRational>> = (0..self.dim)
            .map(|i| self.row(i).iter().map(|x| BigRational::from_integer(x.clone())).collect())
            .collect();
        rational_inverse(&rows)
    }

    /// Inverse over the integers; fails unless the determinant is ±1.
    pub fn inverse(&self) -> Result<IntMatrix> {
        let det = self.determinant();
        if !det.abs().is_one() {
            return Err(Error::NotInvertible(det));
        }
        let inv = self.rational_inverse().expect("unimodular matrix is invertible");
        let rows: Vec<Vec<BigInt>> =
            inv.into_iter().map(|r| r.into_iter().map(|x| x.to_integer()).collect()).collect();
        IntMatrix::from_rows(&rows)
    }

    /// Conjugate `self · m · self⁻¹` given the inverse.
    pub fn conjugate_with(&self, m: &IntMatrix, self_inv: &IntMatrix) -> IntMatrix {
        self.mul(m).mul(self_inv)
    }

    pub fn to_i64_rows(&self) -> Result<Vec<Vec<i64>>> {
        self.rows().iter().map(|r| to_i64_vec(r)).collect()
    }

    /// Block-diagonal sum.
    pub fn block_sum(&self, other: &IntMatrix) -> IntMatrix {
        let n = self.dim + other.dim;
        let mut m = Self::zero(n);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m.set(i, j, self.get(i, j).clone());
            }
        }
        for i in 0..other.dim {
            for j in 0..other.dim {
                m.set(self.dim + i, self.dim + j, other.get(i, j).clone());
            }
        }
        m
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.dim {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for j in 0..self.dim {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinant_and_inverse() {
        let m = IntMatrix::from_rows(&[vec![2, 1], vec![1, 1]]).unwrap();
        assert_eq!(m.determinant(), BigInt::from(1));
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).is_identity());
        let s = IntMatrix::from_rows(&[vec![2, 0], vec![0, 1]]).unwrap();
        assert!(matches!(s.inverse(), Err(Error::NotInvertible(_))));
    }

    #[test]
    fn bareiss_matches_cofactor_expansion() {
        let m = IntMatrix::from_rows(&[vec![0, 2, 1], vec![3, -1, 4], vec![1, 5, 9]]).unwrap();
        let r = m.to_i64_rows().unwrap();
        let cofactor = r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1])
            - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
            + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0]);
        assert_eq!(m.determinant(), BigInt::from(cofactor));
    }

    #[test]
    fn non_square_rejected() {
        assert!(matches!(
            IntMatrix::from_rows(&[vec![1, 0], vec![0]]),
            Err(Error::NotSquare { row: 1, .. })
        ));
    }

    #[test]
    fn covector_action() {
        let m = IntMatrix::from_rows(&[vec![1, 2], vec![3, 4]]).unwrap();
        assert_eq!(m.apply(&vector([1, 1])), vector([3, 7]));
        assert_eq!(m.apply_covector(&vector([1, 1])), vector([4, 6]));
    }
}

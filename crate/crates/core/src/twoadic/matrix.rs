use std::fmt;

use crate::lattice::GroupElement;
use crate::{Error, Result};

/// Default working precision.
pub const DEFAULT_PRECISION: u32 = 16;

pub fn mask(k: u32) -> u64 {
    assert!((1..=62).contains(&k), "2-adic precision must lie in 1..=62");
    (1u64 << k) - 1
}

/// 2-adic valuation of a residue mod `2^k`; `k` for zero.
pub fn valuation(x: u64, k: u32) -> u32 {
    let x = x & mask(k);
    if x == 0 {
        k
    } else {
        x.trailing_zeros()
    }
}

/// Inverse of an odd residue mod `2^k`.
pub fn unit_inverse(u: u64, k: u32) -> u64 {
    debug_assert!(u & 1 == 1);
    let mut x = u;
    for _ in 0..6 {
        x = x.wrapping_mul(2u64.wrapping_sub(u.wrapping_mul(x)));
    }
    x & mask(k)
}

/// Residue of a signed integer.
pub fn from_i64(x: i64, k: u32) -> u64 {
    (x as u64) & mask(k)
}

/// Symmetric lift in `(-2^{k-1}, 2^{k-1}]`.
pub fn to_i64(x: u64, k: u32) -> i64 {
    let x = x & mask(k);
    if x > (1u64 << (k - 1)) {
        x as i64 - (1i64 << k)
    } else {
        x as i64
    }
}

/// Decide whether a valuation means zero: `≥ k` is zero, `≤ k/2` is nonzero, and anything
/// in between is too close to the precision limit to call.
pub fn is_nonzero_valuation(v: u32, k: u32) -> Result<bool> {
    if v >= k {
        Ok(false)
    } else if v <= k / 2 {
        Ok(true)
    } else {
        Err(Error::InsufficientPrecision(format!("valuation {v} at precision {k}")))
    }
}

/// Square matrix over `Z/2^k`, read as an approximation of a matrix over `Z₂`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TwoAdicMatrix {
    dim: usize,
    precision: u32,
    entries: Vec<u64>,
}

impl fmt::Debug for TwoAdicMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for TwoAdicMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows_i64()
            .iter()
            .map(|r| format!("[{}]", r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")))
            .collect();
        write!(f, "[{}] mod 2^{}", rows.join(","), self.precision)
    }
}

impl GroupElement for TwoAdicMatrix {
    fn compose(&self, other: &Self) -> Self {
        self.mul(other)
    }
}

impl TwoAdicMatrix {
    pub fn zero(dim: usize, k: u32) -> Self {
        mask(k);
        TwoAdicMatrix { dim, precision: k, entries: vec![0; dim * dim] }
    }

    pub fn identity(dim: usize, k: u32) -> Self {
        let mut m = Self::zero(dim, k);
        for i in 0..dim {
            m.entries[i * dim + i] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>], k: u32) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::NotSquare { row: r, expected: dim, found: row.len() });
            }
            entries.extend(row.iter().map(|&x| from_i64(x, k)));
        }
        Ok(TwoAdicMatrix { dim, precision: k, entries })
    }

    pub fn from_residues(dim: usize, k: u32, entries: Vec<u64>) -> Self {
        assert_eq!(entries.len(), dim * dim);
        let m = mask(k);
        TwoAdicMatrix { dim, precision: k, entries: entries.into_iter().map(|x| x & m).collect() }
    }

    pub fn from_int_matrix(m: &crate::lattice::IntMatrix, k: u32) -> Self {
        use num_integer::Integer;
        use num_traits::ToPrimitive;
        let modulus = num_bigint::BigInt::from(1u64 << k);
        let entries = m.entries().iter().map(|x| x.mod_floor(&modulus).to_u64().expect("residue")).collect();
        TwoAdicMatrix { dim: m.dim(), precision: k, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: u64) {
        self.entries[i * self.dim + j] = x & mask(self.precision);
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        self.entries.chunks(self.dim.max(1)).take(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn rows_i64(&self) -> Vec<Vec<i64>> {
        self.rows().into_iter().map(|r| r.into_iter().map(|x| to_i64(x, self.precision)).collect()).collect()
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let k = self.precision.min(other.precision);
        let m = mask(k);
        let mut out = vec![0u64; n * n];
        for i in 0..n {
            for l in 0..n {
                let a = self.entries[i * n + l];
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] = out[i * n + j].wrapping_add(a.wrapping_mul(other.entries[l * n + j]));
                }
            }
        }
        TwoAdicMatrix { dim: n, precision: k, entries: out.into_iter().map(|x| x & m).collect() }
    }

    pub fn apply(&self, v: &[u64]) -> Vec<u64> {
        let n = self.dim;
        let m = mask(self.precision);
        (0..n)
            .map(|i| (0..n).fold(0u64, |acc, j| acc.wrapping_add(self.entries[i * n + j].wrapping_mul(v[j]))) & m)
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        let k = self.precision.min(other.precision);
        Self::from_residues(self.dim, k, self.entries.iter().zip(&other.entries).map(|(a, b)| a.wrapping_add(*b)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let k = self.precision.min(other.precision);
        Self::from_residues(self.dim, k, self.entries.iter().zip(&other.entries).map(|(a, b)| a.wrapping_sub(*b)).collect())
    }

    pub fn neg(&self) -> Self {
        Self::from_residues(self.dim, self.precision, self.entries.iter().map(|a| 0u64.wrapping_sub(*a)).collect())
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        Self::from_residues(n, self.precision, (0..n * n).map(|k| self.entries[(k % n) * n + k / n]).collect())
    }

    pub fn trace(&self) -> u64 {
        (0..self.dim).fold(0u64, |a, i| a.wrapping_add(self.get(i, i))) & mask(self.precision)
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.dim, self.precision)
    }

    /// Reduce to a lower precision.
    pub fn reduce(&self, k: u32) -> Result<Self> {
        if k > self.precision {
            return Err(Error::InsufficientPrecision(format!("cannot raise precision {} to {k}", self.precision)));
        }
        Ok(Self::from_residues(self.dim, k, self.entries.clone()))
    }

    pub fn mod2(&self) -> Vec<u8> {
        self.entries.iter().map(|x| (x & 1) as u8).collect()
    }

    pub fn is_identity_mod2(&self) -> bool {
        let n = self.dim;
        (0..n * n).all(|k| (self.entries[k] & 1) == (k / n == k % n) as u64)
    }

    /// Inverse; fails if the reduction mod 2 is singular.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.dim;
        let k = self.precision;
        let mut a = self.rows();
        let mut inv = Self::identity(n, k).rows();
        let m = mask(k);
        for col in 0..n {
            let p = (col..n).find(|&r| a[r][col] & 1 == 1).ok_or(Error::NotInvertible(0.into()))?;
            a.swap(col, p);
            inv.swap(col, p);
            let u = unit_inverse(a[col][col], k);
            for j in 0..n {
                a[col][j] = a[col][j].wrapping_mul(u) & m;
                inv[col][j] = inv[col][j].wrapping_mul(u) & m;
            }
            for r in 0..n {
                if r != col && a[r][col] != 0 {
                    let f = a[r][col];
                    for j in 0..n {
                        a[r][j] = a[r][j].wrapping_sub(f.wrapping_mul(a[col][j])) & m;
                        inv[r][j] = inv[r][j].wrapping_sub(f.wrapping_mul(inv[col][j])) & m;
                    }
                }
            }
        }
        Ok(Self::from_residues(n, k, inv.into_iter().flatten().collect()))
    }

    pub fn block_sum(blocks: &[TwoAdicMatrix]) -> Self {
        let n: usize = blocks.iter().map(|b| b.dim).sum();
        let k = blocks.iter().map(|b| b.precision).min().unwrap_or(DEFAULT_PRECISION);
        let mut out = Self::zero(n, k);
        let mut off = 0;
        for b in blocks {
            for i in 0..b.dim {
                for j in 0..b.dim {
                    out.set(off + i, off + j, b.get(i, j));
                }
            }
            off += b.dim;
        }
        out
    }

    /// `P⁻¹·self·P` for a basis matrix `P` with odd determinant.
    pub fn conjugate_by(&self, p: &Self) -> Result<Self> {
        Ok(p.inverse()?.mul(self).mul(p))
    }
}

/// Smith form `left·a·right = diag(2^{v_i})` of a rectangular matrix over `Z/2^k`.
#[derive(Clone, Debug)]
pub struct SmithMod2k {
    pub rows: usize,
    pub cols: usize,
    pub precision: u32,
    /// Valuations of the diagonal; `precision` stands for zero.
    pub valuations: Vec<u32>,
    pub left: Vec<Vec<u64>>,
    pub left_inv: Vec<Vec<u64>>,
    pub right: Vec<Vec<u64>>,
}

fn ident(n: usize) -> Vec<Vec<u64>> {
    (0..n).map(|i| (0..n).map(|j| (i == j) as u64).collect()).collect()
}

pub fn smith_mod2k(a: &[Vec<u64>], cols: usize, k: u32) -> SmithMod2k {
    let m = mask(k);
    let rows = a.len();
    let mut a: Vec<Vec<u64>> = a.iter().map(|r| r.iter().map(|x| x & m).collect()).collect();
    let mut left = ident(rows);
    let mut left_inv = ident(rows);
    let mut right = ident(cols);
    let mut valuations = Vec::new();
    for t in 0..rows.min(cols) {
        let mut best: Option<(u32, usize, usize)> = None;
        for (i, row) in a.iter().enumerate().skip(t) {
            for (j, &x) in row.iter().enumerate().skip(t) {
                let v = valuation(x, k);
                if v < k && best.is_none_or(|(bv, _, _)| v < bv) {
                    best = Some((v, i, j));
                }
            }
        }
        let Some((v, pi, pj)) = best else {
            valuations.extend(std::iter::repeat_n(k, rows.min(cols) - t));
            break;
        };
        a.swap(t, pi);
        left.swap(t, pi);
        for row in left_inv.iter_mut() {
            row.swap(t, pi);
        }
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        for row in right.iter_mut() {
            row.swap(t, pj);
        }
        // Scale row t so that the pivot is exactly 2^v.
        let u = unit_inverse(a[t][t] >> v, k);
        let u_back = a[t][t] >> v;
        for x in a[t].iter_mut() {
            *x = x.wrapping_mul(u) & m;
        }
        for x in left[t].iter_mut() {
            *x = x.wrapping_mul(u) & m;
        }
        for row in left_inv.iter_mut() {
            row[t] = row[t].wrapping_mul(u_back) & m;
        }
        for i in 0..rows {
            if i == t || a[i][t] == 0 {
                continue;
            }
            let q = (a[i][t] >> v) & m;
            for j in 0..cols {
                a[i][j] = a[i][j].wrapping_sub(q.wrapping_mul(a[t][j])) & m;
            }
            for j in 0..rows {
                left[i][j] = left[i][j].wrapping_sub(q.wrapping_mul(left[t][j])) & m;
            }
            for row in left_inv.iter_mut() {
                row[t] = row[t].wrapping_add(q.wrapping_mul(row[i])) & m;
            }
        }
        for j in 0..cols {
            if j == t || a[t][j] == 0 {
                continue;
            }
            let q = (a[t][j] >> v) & m;
            for row in a.iter_mut() {
                row[j] = row[j].wrapping_sub(q.wrapping_mul(row[t])) & m;
            }
            for row in right.iter_mut() {
                row[j] = row[j].wrapping_sub(q.wrapping_mul(row[t])) & m;
            }
        }
        valuations.push(v);
    }
    SmithMod2k { rows, cols, precision: k, valuations, left, left_inv, right }
}

impl SmithMod2k {
    pub fn rank(&self) -> Result<usize> {
        let mut r = 0;
        for &v in &self.valuations {
            if is_nonzero_valuation(v, self.precision)? {
                r += 1;
            }
        }
        Ok(r)
    }

    /// Basis of the kernel, as column vectors.
    pub fn kernel(&self) -> Result<Vec<Vec<u64>>> {
        let r = self.rank()?;
        Ok((r..self.cols).map(|j| self.right.iter().map(|row| row[j]).collect()).collect())
    }

    /// Basis of the saturation of the column span.
    pub fn saturated_image(&self) -> Result<Vec<Vec<u64>>> {
        let r = self.rank()?;
        Ok((0..r).map(|j| self.left_inv.iter().map(|row| row[j]).collect()).collect())
    }
}

/// Rank mod 2 of a matrix given by rows.
pub fn rank_mod2(rows: &[Vec<u8>]) -> usize {
    let mut a: Vec<Vec<u8>> = rows.to_vec();
    let ncols = a.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..ncols {
        let Some(p) = (rank..a.len()).find(|&r| a[r][c] & 1 == 1) else { continue };
        a.swap(rank, p);
        for r in 0..a.len() {
            if r != rank && a[r][c] & 1 == 1 {
                let pivot = a[rank].clone();
                for (x, y) in a[r].iter_mut().zip(&pivot) {
                    *x ^= y & 1;
                }
            }
        }
        rank += 1;
    }
    rank
}

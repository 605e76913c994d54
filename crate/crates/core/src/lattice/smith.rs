//! Smith normal form over the integers with unimodular transforms.
//!
//! Every kernel, image and saturation computation in the crate goes through
//! [`smith`].

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type DenseMatrix = Vec<Vec<BigInt>>;

/// `left · a · right = diag`, with `left_inv`, `right_inv` the inverses of the transforms.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub rows: usize,
    pub cols: usize,
    pub rank: usize,
    /// Nonzero elementary divisors `d_0 | d_1 | …`, all positive.
    pub diag: Vec<BigInt>,
    pub left: DenseMatrix,
    pub left_inv: DenseMatrix,
    pub right: DenseMatrix,
    pub right_inv: DenseMatrix,
}

fn identity(n: usize) -> DenseMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

struct Work {
    a: DenseMatrix,
    u: DenseMatrix,
    u_inv: DenseMatrix,
    v: DenseMatrix,
    v_inv: DenseMatrix,
}

impl Work {
    /// row_i += k * row_j
    fn add_row(&mut self, i: usize, j: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for c in 0..self.a[0].len() {
            let t = &self.a[j][c] * k;
            self.a[i][c] += t;
        }
        for c in 0..self.u.len() {
            let t = &self.u[j][c] * k;
            self.u[i][c] += t;
        }
        for r in 0..self.u_inv.len() {
            let t = &self.u_inv[r][i] * k;
            self.u_inv[r][j] -= t;
        }
    }

    /// col_i += k * col_j
    fn add_col(&mut self, i: usize, j: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for r in 0..self.a.len() {
            let t = &self.a[r][j] * k;
            self.a[r][i] += t;
        }
        for r in 0..self.v.len() {
            let t = &self.v[r][j] * k;
            self.v[r][i] += t;
        }
        for c in 0..self.v_inv.len() {
            let t = &self.v_inv[i][c] * k;
            self.v_inv[j][c] -= t;
        }
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.a.swap(i, j);
        self.u.swap(i, j);
        for row in self.u_inv.iter_mut() {
            row.swap(i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for row in self.a.iter_mut() {
            row.swap(i, j);
        }
        for row in self.v.iter_mut() {
            row.swap(i, j);
        }
        self.v_inv.swap(i, j);
    }

    fn negate_row(&mut self, i: usize) {
        for x in self.a[i].iter_mut() {
            *x = -&*x;
        }
        for x in self.u[i].iter_mut() {
            *x = -&*x;
        }
        for row in self.u_inv.iter_mut() {
            row[i] = -&row[i];
        }
    }
}

/// Smith normal form of a rectangular integer matrix.
pub fn smith(a: &[Vec<BigInt>], cols: usize) -> SmithForm {
    let m = a.len();
    let n = cols;
    let mut w = Work {
        a: if m == 0 { Vec::new() } else { a.to_vec() },
        u: identity(m),
        u_inv: identity(m),
        v: identity(n),
        v_inv: identity(n),
    };
    let mut t = 0;
    while t < m.min(n) {
        let pivot = (t..m)
            .flat_map(|i| (t..n).map(move |j| (i, j)))
            .filter(|&(i, j)| !w.a[i][j].is_zero())
            .min_by(|&(i1, j1), &(i2, j2)| w.a[i1][j1].abs().cmp(&w.a[i2][j2].abs()));
        let Some((pi, pj)) = pivot else { break };
        w.swap_rows(t, pi);
        w.swap_cols(t, pj);
        loop {
            let mut clean = true;
            for i in t + 1..m {
                if !w.a[i][t].is_zero() {
                    let q = w.a[i][t].div_floor(&w.a[t][t]);
                    w.add_row(i, t, &-q);
                    if !w.a[i][t].is_zero() {
                        clean = false;
                    }
                }
            }
            for j in t + 1..n {
                if !w.a[t][j].is_zero() {
                    let q = w.a[t][j].div_floor(&w.a[t][t]);
                    w.add_col(j, t, &-q);
                    if !w.a[t][j].is_zero() {
                        clean = false;
                    }
                }
            }
            if !clean {
                let best_row = (t + 1..m)
                    .filter(|&i| !w.a[i][t].is_zero())
                    .min_by(|&x, &y| w.a[x][t].abs().cmp(&w.a[y][t].abs()));
                let best_col = (t + 1..n)
                    .filter(|&j| !w.a[t][j].is_zero())
                    .min_by(|&x, &y| w.a[t][x].abs().cmp(&w.a[t][y].abs()));
                let row_val = best_row.map(|i| w.a[i][t].abs());
                let col_val = best_col.map(|j| w.a[t][j].abs());
                match (row_val, col_val) {
                    (Some(r), Some(c)) if c < r => w.swap_cols(t, best_col.unwrap()),
                    (Some(_), _) => w.swap_rows(t, best_row.unwrap()),
                    (None, Some(_)) => w.swap_cols(t, best_col.unwrap()),
                    (None, None) => {}
                }
                continue;
            }
            let bad = (t + 1..m)
                .flat_map(|i| (t + 1..n).map(move |j| (i, j)))
                .find(|&(i, j)| !w.a[i][j].is_multiple_of(&w.a[t][t]));
            match bad {
                Some((i, _)) => w.add_row(t, i, &BigInt::one()),
                None => break,
            }
        }
        if w.a[t][t].is_negative() {
            w.negate_row(t);
        }
        t += 1;
    }
    let diag = (0..t).map(|i| w.a[i][i].clone()).collect();
    SmithForm {
        rows: m,
        cols: n,
        rank: t,
        diag,
        left: w.u,
        left_inv: w.u_inv,
        right: w.v,
        right_inv: w.v_inv,
    }
}

/// Saturated basis of the right kernel `{x : a·x = 0}`.
pub fn kernel_basis(a: &[Vec<BigInt>], cols: usize) -> Vec<Vec<BigInt>> {
    let s = smith(a, cols);
    (s.rank..cols).map(|j| (0..cols).map(|i| s.right[i][j].clone()).collect()).collect()
}

/// Basis of the saturation `(Q·span) ∩ Zⁿ` of the span of the given vectors.
pub fn saturate(vectors: &[Vec<BigInt>], dim: usize) -> Vec<Vec<BigInt>> {
    let s = smith(vectors, dim);
    (0..s.rank).map(|i| s.right_inv[i].clone()).collect()
}

pub fn rank(vectors: &[Vec<BigInt>], dim: usize) -> usize {
    smith(vectors, dim).rank
}

/// Index of the sublattice spanned by `vectors` inside its saturation (product of elementary divisors).
pub fn saturation_index(vectors: &[Vec<BigInt>], dim: usize) -> BigInt {
    smith(vectors, dim).diag.iter().product()
}

/// Coordinates of `v` in the basis `basis` (rows), if `v` lies in the integer span.
pub fn solve_in_span(basis: &[Vec<BigInt>], v: &[BigInt]) -> Option<Vec<BigInt>> {
    let dim = v.len();
    if basis.is_empty() {
        return if v.iter().all(Zero::is_zero) { Some(Vec::new()) } else { None };
    }
    // Solve c·B = v, i.e. Bᵀ c = v.
    let k = basis.len();
    let bt: DenseMatrix = (0..dim).map(|i| (0..k).map(|j| basis[j][i].clone()).collect()).collect();
    let s = smith(&bt, k);
    let uy: Vec<BigInt> = (0..dim).map(|i| (0..dim).map(|j| &s.left[i][j] * &v[j]).sum()).collect();
    let mut z = vec![BigInt::zero(); k];
    for i in 0..dim {
        if i < s.rank {
            if !uy[i].is_multiple_of(&s.diag[i]) {
                return None;
            }
            z[i] = &uy[i] / &s.diag[i];
        } else if !uy[i].is_zero() {
            return None;
        }
    }
    Some((0..k).map(|i| (0..k).map(|j| &s.right[i][j] * &z[j]).sum()).collect())
}

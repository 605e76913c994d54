//! Exact affine systems `A·x = y` over Z, Z/N and Q/Z.
//!
//! Rows are streamed into an incrementally maintained echelon form, so long
//! systems with few unknowns stay small; the compressed system is finished
//! with a Smith normal form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::lattice::smith::smith;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Ring {
    Integers,
    /// Unknowns and equations in Z/N.
    Modulo(BigInt),
    /// Unknowns in Q/Z; right-hand sides are numerators over a fixed denominator.
    RationalsModOne { denominator: BigInt },
}

pub struct AffineSolver {
    ncols: usize,
    ring: Ring,
    pivots: Vec<Option<(Vec<BigInt>, BigInt)>>,
    inconsistent: bool,
    rows_seen: usize,
}

fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    (e.gcd, e.x, e.y)
}

impl AffineSolver {
    pub fn new(ncols: usize, ring: Ring) -> Self {
        AffineSolver { ncols, ring, pivots: vec![None; ncols], inconsistent: false, rows_seen: 0 }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rows_seen(&self) -> usize {
        self.rows_seen
    }

    pub fn is_inconsistent(&self) -> bool {
        self.inconsistent
    }

    fn reduce(&self, row: &mut [BigInt], rhs: &mut BigInt) {
        match &self.ring {
            Ring::Integers => {}
            Ring::Modulo(n) => {
                for x in row.iter_mut() {
                    *x = x.mod_floor(n);
                }
                *rhs = rhs.mod_floor(n);
            }
            Ring::RationalsModOne { denominator } => *rhs = rhs.mod_floor(denominator),
        }
    }

    fn rhs_is_zero(&self, rhs: &BigInt) -> bool {
        match &self.ring {
            Ring::Integers => rhs.is_zero(),
            Ring::Modulo(n) => rhs.mod_floor(n).is_zero(),
            Ring::RationalsModOne { denominator } => rhs.mod_floor(denominator).is_zero(),
        }
    }

    pub fn push_i64(&mut self, row: &[i64], rhs: i64) {
        self.push(row.iter().map(|&x| BigInt::from(x)).collect(), BigInt::from(rhs));
    }

    pub fn push(&mut self, mut row: Vec<BigInt>, mut rhs: BigInt) {
        assert_eq!(row.len(), self.ncols, "row length differs from the number of unknowns");
        self.rows_seen += 1;
        if self.inconsistent {
            return;
        }
        self.reduce(&mut row, &mut rhs);
        for c in 0..self.ncols {
            if row[c].is_zero() {
                continue;
            }
            match self.pivots[c].take() {
                None => {
                    if row[c].is_negative() {
                        row.iter_mut().for_each(|x| *x = -&*x);
                        rhs = -rhs;
                    }
                    self.reduce(&mut row, &mut rhs);
                    self.pivots[c] = Some((row, rhs));
                    return;
                }
                Some((p, prhs)) => {
                    let (g, s, t) = ext_gcd(&p[c], &row[c]);
                    let pa = &p[c] / &g;
                    let ra = &row[c] / &g;
                    let mut new_p: Vec<BigInt> =
                        p.iter().zip(&row).map(|(x, y)| &s * x + &t * y).collect();
                    let mut new_prhs = &s * &prhs + &t * &rhs;
                    let mut new_row: Vec<BigInt> =
                        p.iter().zip(&row).map(|(x, y)| &ra * x - &pa * y).collect();
                    let mut new_rhs = &ra * &prhs - &pa * &rhs;
                    self.reduce(&mut new_p, &mut new_prhs);
                    self.reduce(&mut new_row, &mut new_rhs);
                    if new_p[c].is_negative() {
                        new_p.iter_mut().for_each(|x| *x = -&*x);
                        new_prhs = -new_prhs;
                        self.reduce(&mut new_p, &mut new_prhs);
                    }
                    debug_assert!(new_row[c].is_zero());
                    self.pivots[c] = Some((new_p, new_prhs));
                    row = new_row;
                    rhs = new_rhs;
                }
            }
        }
        if !self.rhs_is_zero(&rhs) {
            self.inconsistent = true;
        }
    }

    /// A particular solution, or `None` if the system is inconsistent.
    ///
    /// Integers give integral values, `Modulo(N)` values in `[0, N)`, and Q/Z values in `[0, 1)`.
    pub fn solve(&self) -> Option<Vec<BigRational>> {
        if self.inconsistent {
            return None;
        }
        let n = self.ncols;
        let (rows, rhs): (Vec<Vec<BigInt>>, Vec<BigInt>) = self.pivots.iter().flatten().cloned().unzip();
        let r = rows.len();
        if r == 0 {
            return Some(vec![BigRational::zero(); n]);
        }
        let s = smith(&rows, n);
        let uy: Vec<BigInt> =
            (0..r).map(|i| (0..r).map(|j| &s.left[i][j] * &rhs[j]).sum::<BigInt>()).collect();
        let mut z = vec![BigRational::zero(); n];
        for i in 0..r {
            if i >= s.rank {
                if !self.rhs_is_zero(&uy[i]) {
                    return None;
                }
                continue;
            }
            let d = &s.diag[i];
            z[i] = match &self.ring {
                Ring::Integers => {
                    if !uy[i].is_multiple_of(d) {
                        return None;
                    }
                    BigRational::from_integer(&uy[i] / d)
                }
                Ring::Modulo(modulus) => {
                    let g = d.gcd(modulus);
                    if !uy[i].is_multiple_of(&g) {
                        return None;
                    }
                    let m = modulus / &g;
                    let dd = (d / &g).mod_floor(&m);
                    let yy = (&uy[i] / &g).mod_floor(&m);
                    let inv = if m.is_one() { BigInt::zero() } else { mod_inverse(&dd, &m) };
                    BigRational::from_integer((yy * inv).mod_floor(&m))
                }
                Ring::RationalsModOne { denominator } => {
                    BigRational::new(uy[i].clone(), denominator * d)
                }
            };
        }
        let x: Vec<BigRational> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| BigRational::from_integer(s.right[i][j].clone()) * &z[j])
                    .fold(BigRational::zero(), |a, b| a + b)
            })
            .collect();
        Some(match &self.ring {
            Ring::Integers => x,
            Ring::Modulo(m) => x.into_iter().map(|v| BigRational::from_integer(v.to_integer().mod_floor(m))).collect(),
            Ring::RationalsModOne { .. } => x.into_iter().map(frac).collect(),
        })
    }
}

/// Fractional part in `[0, 1)`.
pub fn frac(x: BigRational) -> BigRational {
    let f = x.floor();
    x - f
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.extended_gcd(m);
    debug_assert!(e.gcd.is_one());
    e.x.mod_floor(m)
}

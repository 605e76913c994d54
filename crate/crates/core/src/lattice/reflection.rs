use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use super::matrix::{normalize_sign, IntMatrix, IntVector};
use super::smith::kernel_basis;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Reflection {
    pub matrix: IntMatrix,
    pub trivial_mod2: bool,
}

/// A pair `(b, β)` with `σ(x) = x + β(x)·b` and `β(b) = −2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct StrictMarking {
    #[serde(serialize_with = "crate::serde_big::vec")]
    pub b: IntVector,
    #[serde(serialize_with = "crate::serde_big::vec")]
    pub beta: IntVector,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

pub fn is_reflection(m: &IntMatrix) -> Result<bool> {
    let det = m.determinant();
    if det != BigInt::one() && det != -BigInt::one() {
        return Err(Error::NotInvertible(det));
    }
    let dim = m.dim() as i64;
    Ok(m.mul(m).is_identity() && m.trace() == BigInt::from(dim - 2))
}

pub fn is_trivial_mod2(m: &IntMatrix) -> bool {
    m.is_identity_mod(&BigInt::from(2))
}

impl Reflection {
    pub fn new(matrix: IntMatrix) -> Result<Self> {
        if !is_reflection(&matrix)? {
            return Err(Error::NotAReflection);
        }
        let trivial_mod2 = is_trivial_mod2(&matrix);
        Ok(Reflection { matrix, trivial_mod2 })
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Canonical generator `b₀` of `ker(1+σ)`, first nonzero coordinate positive.
    pub fn root_generator(&self) -> IntVector {
        let basis = eigenlattice(self, Sign::Minus);
        debug_assert_eq!(basis.len(), 1);
        normalize_sign(&basis[0])
    }

    /// The covector `β` with `σ = I + b·βᵀ` for a given `b ∈ ker(1+σ)`, if integral.
    pub fn coroot_for(&self, b: &[BigInt]) -> Option<IntVector> {
        let n = self.dim();
        let pivot = b.iter().position(|x| !x.is_zero())?;
        let mut beta = Vec::with_capacity(n);
        for j in 0..n {
            let delta = if j == pivot { BigInt::one() } else { BigInt::zero() };
            let num = self.matrix.get(pivot, j) - delta;
            if !(num.clone() % &b[pivot]).is_zero() {
                return None;
            }
            beta.push(num / &b[pivot]);
        }
        let rebuilt = IntMatrix::rank_one_update(b, &beta);
        (rebuilt == self.matrix).then_some(beta)
    }
}

/// Saturated basis of `ker(1∓σ)`: `Plus` gives the fixed lattice, `Minus` the negated lattice.
pub fn eigenlattice(sigma: &Reflection, sign: Sign) -> Vec<IntVector> {
    let id = IntMatrix::identity(sigma.dim());
    let m = match sign {
        Sign::Plus => id.sub(&sigma.matrix),
        Sign::Minus => id.add(&sigma.matrix),
    };
    kernel_basis(&m.rows(), sigma.dim())
}

impl StrictMarking {
    pub fn is_valid_for(&self, sigma: &IntMatrix) -> bool {
        let pairing: BigInt = self.b.iter().zip(&self.beta).map(|(x, y)| x * y).sum();
        pairing == BigInt::from(-2) && IntMatrix::rank_one_update(&self.b, &self.beta) == *sigma
    }

    pub fn reflection(&self) -> IntMatrix {
        IntMatrix::rank_one_update(&self.b, &self.beta)
    }

    /// Representative of `±(b, β)` whose `b` has positive first nonzero coordinate.
    pub fn canonical(&self) -> StrictMarking {
        let b = normalize_sign(&self.b);
        if b == self.b {
            self.clone()
        } else {
            StrictMarking { b, beta: self.beta.iter().map(|x| -x).collect() }
        }
    }

    pub fn negated(&self) -> StrictMarking {
        StrictMarking {
            b: self.b.iter().map(|x| -x).collect(),
            beta: self.beta.iter().map(|x| -x).collect(),
        }
    }

    pub fn same_class(&self, other: &StrictMarking) -> bool {
        self.canonical() == other.canonical()
    }

    pub fn dual(&self) -> StrictMarking {
        StrictMarking { b: self.beta.clone(), beta: self.b.clone() }
    }
}

/// All marking classes of a reflection, canonicalized: `b₀` always, `2b₀` when trivial mod 2.
pub fn markings_of(sigma: &Reflection) -> Vec<StrictMarking> {
    let b0 = sigma.root_generator();
    let mut out = Vec::new();
    for k in [1, 2] {
        let b: IntVector = b0.iter().map(|x| x * k).collect();
        if let Some(beta) = sigma.coroot_for(&b) {
            out.push(StrictMarking { b, beta });
        }
    }
    debug_assert_eq!(out.len(), if sigma.trivial_mod2 { 2 } else { 1 });
    out
}

/// `w·(b, β) = (w(b), β∘w⁻¹)`, the marking of `wσw⁻¹`.
pub fn conjugate_marking(w: &IntMatrix, m: &StrictMarking) -> Result<StrictMarking> {
    let w_inv = w.inverse()?;
    Ok(conjugate_marking_with(w, &w_inv, m))
}

pub fn conjugate_marking_with(w: &IntMatrix, w_inv: &IntMatrix, m: &StrictMarking) -> StrictMarking {
    StrictMarking { b: w.apply(&m.b), beta: w_inv.apply_covector(&m.beta) }
}

/// Indices `[ker(1+σ) : im(1−σ)]` and `[im(1−σ) : 2·ker(1+σ)]`.
pub fn image_indices(sigma: &Reflection) -> (BigInt, BigInt) {
    let n = sigma.dim();
    let b0 = sigma.root_generator();
    let one_minus = IntMatrix::identity(n).sub(&sigma.matrix);
    let image: Vec<IntVector> = (0..n).map(|j| one_minus.column(j)).collect();
    // The image is a sublattice of Z·b₀; its generator is gcd·b₀.
    let pivot = b0.iter().position(|x| !x.is_zero()).expect("nonzero root");
    let g = image
        .iter()
        .map(|v| &v[pivot] / &b0[pivot])
        .fold(BigInt::zero(), |acc, x| num_integer::Integer::gcd(&acc, &x));
    let inner = BigInt::from(2) / &g;
    (g, inner)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::matrix::vector;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn reflection_recognition() {
        assert!(is_reflection(&m(&[&[-1]])).unwrap());
        assert!(!is_reflection(&IntMatrix::identity(2)).unwrap());
        assert!(is_reflection(&m(&[&[0, 1], &[1, 0]])).unwrap());
        assert!(!is_reflection(&m(&[&[-1, 0], &[0, -1]])).unwrap());
        assert!(matches!(is_reflection(&m(&[&[2]])), Err(Error::NotInvertible(_))));
    }

    #[test]
    fn marking_examples() {
        let neg = Reflection::new(m(&[&[-1]])).unwrap();
        let ms = markings_of(&neg);
        assert_eq!(ms.iter().map(|x| x.b.clone()).collect::<Vec<_>>(), vec![vector([1]), vector([2])]);
        let swap = Reflection::new(m(&[&[0, 1], &[1, 0]])).unwrap();
        let ms = markings_of(&swap);
        assert_eq!(ms.len(), 1);
        assert_eq!(ms[0].b, vector([1, -1]));
        assert_eq!(ms[0].beta, vector([-1, 1]));
        let d = Reflection::new(m(&[&[-1, 0], &[0, 1]])).unwrap();
        assert_eq!(markings_of(&d).len(), 2);
        for mk in markings_of(&d) {
            assert!(mk.is_valid_for(&d.matrix));
        }
    }

    #[test]
    fn mod2_triviality() {
        assert!(is_trivial_mod2(&m(&[&[-1, 0], &[0, 1]])));
        assert!(!is_trivial_mod2(&m(&[&[0, 1], &[1, 0]])));
        assert!(is_trivial_mod2(&m(&[&[-1]])));
    }

    #[test]
    fn eigenlattices() {
        let neg = Reflection::new(m(&[&[-1]])).unwrap();
        assert_eq!(eigenlattice(&neg, Sign::Minus).len(), 1);
        assert!(eigenlattice(&neg, Sign::Plus).is_empty());
        let swap = Reflection::new(m(&[&[0, 1], &[1, 0]])).unwrap();
        let minus = normalize_sign(&eigenlattice(&swap, Sign::Minus)[0]);
        let plus = normalize_sign(&eigenlattice(&swap, Sign::Plus)[0]);
        assert_eq!(minus, vector([1, -1]));
        assert_eq!(plus, vector([1, 1]));
    }

    #[test]
    fn conjugation() {
        let swap = Reflection::new(m(&[&[0, 1], &[1, 0]])).unwrap();
        let mk = markings_of(&swap)[0].clone();
        assert_eq!(conjugate_marking(&IntMatrix::identity(2), &mk).unwrap(), mk);
        let by_self = conjugate_marking(&swap.matrix, &mk).unwrap();
        assert_eq!(by_self, mk.negated());
        assert!(by_self.same_class(&mk));
    }

    #[test]
    fn index_law() {
        let swap = Reflection::new(m(&[&[0, 1], &[1, 0]])).unwrap();
        assert_eq!(image_indices(&swap), (BigInt::from(1), BigInt::from(2)));
        let d = Reflection::new(m(&[&[-1, 0], &[0, 1]])).unwrap();
        assert_eq!(image_indices(&d), (BigInt::from(2), BigInt::from(1)));
    }
}

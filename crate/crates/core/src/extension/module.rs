use std::fmt;
use std::sync::Arc;

use serde::Serialize;

/// How coefficient vectors are read.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Coefficients {
    /// Free abelian group `Zʳ`.
    Integers,
    /// Torsion points of a torus `(Q/Z)ʳ`; entries are numerators over `denominator`.
    Torus { denominator: i64 },
    /// `(Z/m)ʳ`.
    Modular { modulus: i64 },
}

/// Action of group element `g` on coefficient vectors.
#[derive(Clone)]
pub enum Action {
    Trivial,
    /// `perm[g][i]` is the image of basis vector `i`.
    Permutation(Arc<Vec<Vec<u32>>>),
    /// Row-major `rank × rank` matrix per element.
    Matrix(Arc<Vec<Vec<i64>>>),
}

#[derive(Clone)]
pub struct Module {
    pub rank: usize,
    pub coefficients: Coefficients,
    pub action: Action,
    /// When set, matrix entries are only meaningful modulo this number (2-adic actions).
    pub matrix_modulus: Option<i64>,
    pub label: String,
}

impl fmt::Debug for Module {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Module")
            .field("label", &self.label)
            .field("rank", &self.rank)
            .field("coefficients", &self.coefficients)
            .finish()
    }
}

impl Module {
    pub fn trivial_integers() -> Self {
        Module { rank: 1, coefficients: Coefficients::Integers, action: Action::Trivial, matrix_modulus: None, label: "Z".into() }
    }

    pub fn permutation(rank: usize, perm: Arc<Vec<Vec<u32>>>, label: impl Into<String>) -> Self {
        Module { rank, coefficients: Coefficients::Integers, action: Action::Permutation(perm), matrix_modulus: None, label: label.into() }
    }

    pub fn torus(rank: usize, denominator: i64, matrices: Arc<Vec<Vec<i64>>>, label: impl Into<String>) -> Self {
        Module {
            rank,
            coefficients: Coefficients::Torus { denominator },
            action: Action::Matrix(matrices),
            matrix_modulus: None,
            label: label.into(),
        }
    }

    /// Same action, different coefficients.
    pub fn with_coefficients(&self, coefficients: Coefficients) -> Self {
        Module { coefficients, ..self.clone() }
    }

    /// Restrict the action along an embedding of a subgroup (indices of the subgroup into this group).
    pub fn restrict(&self, embedding: &[usize]) -> Self {
        let action = match &self.action {
            Action::Trivial => Action::Trivial,
            Action::Permutation(p) => Action::Permutation(Arc::new(embedding.iter().map(|&g| p[g].clone()).collect())),
            Action::Matrix(m) => Action::Matrix(Arc::new(embedding.iter().map(|&g| m[g].clone()).collect())),
        };
        Module { action, ..self.clone() }
    }

    pub fn denominator(&self) -> Option<i64> {
        match self.coefficients {
            Coefficients::Torus { denominator } => Some(denominator),
            _ => None,
        }
    }

    pub fn reduce(&self, v: &mut [i64]) {
        let m = match self.coefficients {
            Coefficients::Integers => return,
            Coefficients::Torus { denominator } => denominator,
            Coefficients::Modular { modulus } => modulus,
        };
        for x in v.iter_mut() {
            *x = x.rem_euclid(m);
        }
    }

    pub fn reduced(&self, mut v: Vec<i64>) -> Vec<i64> {
        self.reduce(&mut v);
        v
    }

    pub fn zero(&self) -> Vec<i64> {
        vec![0; self.rank]
    }

    pub fn is_zero(&self, v: &[i64]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|&x| x == 0)
    }

    pub fn add(&self, a: &[i64], b: &[i64]) -> Vec<i64> {
        self.reduced(a.iter().zip(b).map(|(x, y)| x + y).collect())
    }

    pub fn sub(&self, a: &[i64], b: &[i64]) -> Vec<i64> {
        self.reduced(a.iter().zip(b).map(|(x, y)| x - y).collect())
    }

    pub fn act(&self, g: usize, v: &[i64]) -> Vec<i64> {
        let out = match &self.action {
            Action::Trivial => v.to_vec(),
            Action::Permutation(p) => {
                let mut out = vec![0; self.rank];
                for (i, &x) in v.iter().enumerate() {
                    out[p[g][i] as usize] += x;
                }
                out
            }
            Action::Matrix(m) => {
                let mat = &m[g];
                let n = self.rank;
                (0..n)
                    .map(|i| {
                        let s: i128 = (0..n).map(|j| mat[i * n + j] as i128 * v[j] as i128).sum();
                        self.fold_i128(s)
                    })
                    .collect()
            }
        };
        self.reduced(out)
    }

    fn fold_i128(&self, s: i128) -> i64 {
        let m = match self.coefficients {
            Coefficients::Integers => return i64::try_from(s).expect("module value overflow"),
            Coefficients::Torus { denominator } => denominator,
            Coefficients::Modular { modulus } => modulus,
        };
        s.rem_euclid(m as i128) as i64
    }

    /// The matrix of `g` acting on `Zʳ` (a permutation matrix for permutation actions).
    pub fn matrix_of(&self, g: usize) -> Vec<i64> {
        let n = self.rank;
        match &self.action {
            Action::Trivial => (0..n * n).map(|k| (k / n == k % n) as i64).collect(),
            Action::Permutation(p) => {
                let mut m = vec![0; n * n];
                for i in 0..n {
                    m[p[g][i] as usize * n + i] = 1;
                }
                m
            }
            Action::Matrix(m) => m[g].clone(),
        }
    }
}

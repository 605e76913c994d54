//! Simple systems, Coxeter matrices and positive words.

use std::collections::VecDeque;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::matrix::{dot, IntMatrix, IntVector};
use crate::lattice::{reflections_in, FiniteMatrixGroup, GroupTable, Reflection};

/// Positive word in the simple generators, letters are indices into the simple system.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Default)]
pub struct Word(pub Vec<usize>);

impl Word {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn reversed(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, l) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", l + 1)?;
        }
        write!(f, "]")
    }
}

/// `prod(n; y, x) = ⋯yxyx`: alternating word of length `n` whose rightmost letter is `x`.
pub fn prod_word(n: usize, y: usize, x: usize) -> Word {
    Word((0..n).map(|k| if (n - 1 - k).is_multiple_of(2) { x } else { y }).collect())
}

pub struct SimpleSystem {
    pub group: Arc<FiniteMatrixGroup>,
    pub simples: Vec<Reflection>,
    /// Element indices of the simple reflections.
    pub simple_indices: Vec<usize>,
    pub coxeter_matrix: Vec<Vec<usize>>,
    /// The integer functional used to choose positive roots.
    pub functional: IntVector,
    lengths: OnceLock<Vec<u32>>,
    lexfirst: OnceLock<Vec<u8>>,
}

impl fmt::Debug for SimpleSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SimpleSystem")
            .field("simple_indices", &self.simple_indices)
            .field("coxeter_matrix", &self.coxeter_matrix)
            .finish()
    }
}

fn powers(base: u64, n: usize) -> IntVector {
    let mut out = Vec::with_capacity(n);
    let mut p = BigInt::from(1);
    for _ in 0..n {
        out.push(p.clone());
        p *= base;
    }
    out
}

/// Simple reflections for the positive system cut out by a generic functional
/// `(N⁰, N¹, …)`; `N` starts at `base` and increases if some root pairs to zero.
pub fn find_simple_system_with(group: &Arc<FiniteMatrixGroup>, base: u64) -> Result<SimpleSystem> {
    let refl = reflections_in(group);
    let dim = group.dim();
    let roots: Vec<IntVector> = refl.iter().map(|(_, r)| r.root_generator()).collect();
    let mut n = base;
    let functional = loop {
        let f = powers(n, dim);
        if roots.iter().all(|r| !dot(&f, r).is_zero()) {
            break f;
        }
        n += 1;
    };
    let positive: Vec<IntVector> = roots
        .iter()
        .map(|r| if dot(&functional, r).is_negative() { r.iter().map(|x| -x).collect() } else { r.clone() })
        .collect();
    let mut simple_indices = Vec::new();
    let mut simples = Vec::new();
    for (idx, sigma) in &refl {
        let negated = positive
            .iter()
            .filter(|p| dot(&functional, &sigma.matrix.apply(p)).is_negative())
            .count();
        if negated == 1 {
            simple_indices.push(*idx);
            simples.push(sigma.clone());
        }
    }
    let t = group.table();
    if t.generated(&simple_indices).len() != group.order() {
        return Err(Error::Assertion("simple reflections do not generate the group".into()));
    }
    let l = simple_indices.len();
    let coxeter_matrix = (0..l)
        .map(|i| (0..l).map(|j| t.element_order(t.mul(simple_indices[i], simple_indices[j]))).collect())
        .collect();
    Ok(SimpleSystem {
        group: group.clone(),
        simples,
        simple_indices,
        coxeter_matrix,
        functional,
        lengths: OnceLock::new(),
        lexfirst: OnceLock::new(),
    })
}

pub fn find_simple_system(group: &Arc<FiniteMatrixGroup>) -> Result<SimpleSystem> {
    find_simple_system_with(group, 1_000_000)
}

impl SimpleSystem {
    pub fn rank(&self) -> usize {
        self.simple_indices.len()
    }

    pub fn table(&self) -> &Arc<GroupTable> {
        self.group.table()
    }

    pub fn simple(&self, i: usize) -> usize {
        self.simple_indices[i]
    }

    /// Group element represented by a word.
    pub fn word_element(&self, w: &Word) -> usize {
        self.table().product(w.0.iter().map(|&i| self.simple_indices[i]))
    }

    pub fn word_image(&self, w: &Word) -> IntMatrix {
        w.0.iter()
            .fold(IntMatrix::identity(self.group.dim()), |acc, &i| acc.mul(&self.simples[i].matrix))
    }

    fn lengths(&self) -> &Vec<u32> {
        self.lengths.get_or_init(|| {
            let t = self.table();
            let mut len = vec![u32::MAX; t.order()];
            let mut queue = VecDeque::from([t.identity()]);
            len[t.identity()] = 0;
            while let Some(g) = queue.pop_front() {
                for &s in &self.simple_indices {
                    let h = t.mul(g, s);
                    if len[h] == u32::MAX {
                        len[h] = len[g] + 1;
                        queue.push_back(h);
                    }
                }
            }
            len
        })
    }

    pub fn length(&self, g: usize) -> usize {
        self.lengths()[g] as usize
    }

    pub fn length_of_matrix(&self, m: &IntMatrix) -> Result<usize> {
        let g = self.group.index_of(m).ok_or(Error::NotInGroup)?;
        Ok(self.length(g))
    }

    pub fn longest_element(&self) -> usize {
        let l = self.lengths();
        (0..l.len()).max_by_key(|&g| l[g]).expect("nonempty group")
    }

    /// Simple indices `i` with `l(s_i·g) < l(g)`.
    pub fn left_descents(&self, g: usize) -> Vec<usize> {
        let t = self.table();
        (0..self.rank()).filter(|&i| self.length(t.mul(self.simple_indices[i], g)) < self.length(g)).collect()
    }

    fn lexfirst_table(&self) -> &Vec<u8> {
        self.lexfirst.get_or_init(|| {
            let t = self.table();
            (0..t.order())
                .map(|g| self.left_descents(g).first().map_or(u8::MAX, |&i| i as u8))
                .collect()
        })
    }

    /// Lexicographically first minimal word for `g`.
    pub fn lexfirst_word(&self, g: usize) -> Word {
        let t = self.table();
        let first = self.lexfirst_table();
        let mut letters = Vec::with_capacity(self.length(g));
        let mut x = g;
        while x != t.identity() {
            let i = first[x] as usize;
            letters.push(i);
            x = t.mul(self.simple_indices[i], x);
        }
        Word(letters)
    }

    /// Every minimal word for `g`, in lexicographic order.
    pub fn minimal_words(&self, g: usize) -> Vec<Word> {
        let t = self.table();
        if g == t.identity() {
            return vec![Word::default()];
        }
        let mut out = Vec::new();
        for i in self.left_descents(g) {
            for rest in self.minimal_words(t.mul(self.simple_indices[i], g)) {
                let mut letters = vec![i];
                letters.extend(rest.0);
                out.push(Word(letters));
            }
        }
        out
    }

    pub fn is_minimal(&self, w: &Word) -> bool {
        self.length(self.word_element(w)) == w.len()
    }

    /// Element indices `σ_k = r(i₁⋯i_{k−1})·r_{i_k}·r(i₁⋯i_{k−1})⁻¹`.
    pub fn reflection_sequence_indices(&self, w: &Word) -> Vec<usize> {
        let t = self.table();
        let mut prefix = t.identity();
        let mut out = Vec::with_capacity(w.len());
        for &i in &w.0 {
            out.push(t.conj(prefix, self.simple_indices[i]));
            prefix = t.mul(prefix, self.simple_indices[i]);
        }
        out
    }

    pub fn reflection_sequence(&self, w: &Word) -> Vec<Reflection> {
        self.reflection_sequence_indices(w)
            .into_iter()
            .map(|g| Reflection::new(self.group.element(g).clone()).expect("conjugate of a reflection"))
            .collect()
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct WordLemmaReport {
    pub minimal_words_checked: usize,
    pub multiplicity_violations: usize,
    pub vanishing_cases: usize,
    pub vanishing_violations: usize,
    pub palindrome_cases: usize,
    pub palindrome_violations: usize,
}

impl WordLemmaReport {
    pub fn passed(&self) -> bool {
        self.multiplicity_violations == 0 && self.vanishing_violations == 0 && self.palindrome_violations == 0
    }
}

/// Exhaustively check, over all minimal words of all elements:
/// each reflection occurs at most once in the reflection sequence; a simple
/// reflection commuting with the reflection `r(i) ≠ σ` does not occur; and
/// every reflection of length `2n+1` is the palindrome of its minimal words.
pub fn check_word_lemmas(ss: &SimpleSystem) -> WordLemmaReport {
    let t = ss.table();
    let reflections: std::collections::HashSet<usize> = reflections_in(&ss.group).into_iter().map(|(i, _)| i).collect();
    let mut report = WordLemmaReport::default();
    for g in 0..t.order() {
        let words = ss.minimal_words(g);
        let is_refl = reflections.contains(&g);
        for w in &words {
            report.minimal_words_checked += 1;
            let seq = ss.reflection_sequence_indices(w);
            let mut sorted = seq.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|p| p[0] == p[1]) {
                report.multiplicity_violations += 1;
            }
            if is_refl {
                for &s in &ss.simple_indices {
                    if s != g && t.mul(s, g) == t.mul(g, s) {
                        report.vanishing_cases += 1;
                        if seq.contains(&s) {
                            report.vanishing_violations += 1;
                        }
                    }
                }
                let m = w.len();
                if m % 2 == 1 {
                    let n = m / 2;
                    let mut pal: Vec<usize> = w.0[..=n].to_vec();
                    pal.extend(w.0[..n].iter().rev());
                    report.palindrome_cases += 1;
                    if ss.word_element(&Word(pal)) != g {
                        report.palindrome_violations += 1;
                    }
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::build_entry;

    fn ss(name: &str) -> SimpleSystem {
        find_simple_system(&build_entry(name).unwrap().lattice.group).unwrap()
    }

    #[test]
    fn coxeter_matrices() {
        assert_eq!(ss("SU(2)").rank(), 1);
        assert_eq!(ss("SU(3)").coxeter_matrix, vec![vec![1, 3], vec![3, 1]]);
        assert_eq!(ss("G2").coxeter_matrix, vec![vec![1, 6], vec![6, 1]]);
        let b3 = ss("Spin(7)");
        let mut offdiag: Vec<usize> = (0..3).flat_map(|i| (0..3).filter(move |&j| j > i).map(move |j| (i, j))).map(|(i, j)| b3.coxeter_matrix[i][j]).collect();
        offdiag.sort();
        assert_eq!(offdiag, vec![2, 3, 4]);
    }

    #[test]
    fn prod_words() {
        assert_eq!(prod_word(0, 0, 1), Word(vec![]));
        assert_eq!(prod_word(1, 0, 1), Word(vec![1]));
        assert_eq!(prod_word(2, 0, 1), Word(vec![0, 1]));
        assert_eq!(prod_word(3, 0, 1), Word(vec![1, 0, 1]));
    }

    #[test]
    fn images_and_lengths() {
        let a2 = ss("SU(3)");
        assert!(a2.word_image(&Word(vec![])).is_identity());
        assert!(a2.word_image(&Word(vec![0, 0])).is_identity());
        let m = a2.word_image(&Word(vec![0, 1, 0]));
        assert!(crate::lattice::is_reflection(&m).unwrap());
        assert!(!a2.simples.iter().any(|s| s.matrix == m));
        let b2 = ss("Spin(5)");
        assert_eq!(b2.length(b2.group.identity()), 0);
        assert_eq!(b2.length(b2.simple(0)), 1);
        assert_eq!(b2.length(b2.longest_element()), 4);
        let w0 = b2.longest_element();
        assert_eq!(b2.group.element(w0), &IntMatrix::identity(2).neg());
    }

    #[test]
    fn reflection_sequences() {
        let a2 = ss("SU(3)");
        let t = a2.table();
        assert_eq!(a2.reflection_sequence_indices(&Word(vec![0])), vec![a2.simple(0)]);
        let seq = a2.reflection_sequence_indices(&Word(vec![0, 1]));
        assert_eq!(seq, vec![a2.simple(0), t.conj(a2.simple(0), a2.simple(1))]);
        let w0 = a2.lexfirst_word(a2.longest_element());
        let mut seq = a2.reflection_sequence_indices(&w0);
        seq.sort();
        seq.dedup();
        assert_eq!(seq.len(), 3);
    }

    #[test]
    fn lexfirst_is_minimal_and_first() {
        let a3 = ss("SU(4)");
        for g in 0..a3.group.order() {
            let w = a3.lexfirst_word(g);
            assert_eq!(a3.word_element(&w), g);
            assert_eq!(w.len(), a3.length(g));
            assert_eq!(a3.minimal_words(g).first(), Some(&w));
        }
        assert_eq!(a3.minimal_words(a3.longest_element()).len(), 16);
    }

    #[test]
    fn word_lemmas_small() {
        for name in ["SU(3)", "Spin(5)", "G2"] {
            let r = check_word_lemmas(&ss(name));
            assert!(r.passed(), "{name}: {r:?}");
            assert!(r.palindrome_cases > 0);
        }
        let b2 = check_word_lemmas(&ss("Spin(5)"));
        assert!(b2.vanishing_cases > 0);
    }

    #[test]
    fn length_multiset_independent_of_functional() {
        for name in ["SU(4)", "Spin(7)"] {
            let g = build_entry(name).unwrap().lattice.group;
            let a = find_simple_system_with(&g, 1_000_000).unwrap();
            let b = find_simple_system_with(&g, 7).unwrap();
            let mut la: Vec<usize> = (0..g.order()).map(|x| a.length(x)).collect();
            let mut lb: Vec<usize> = (0..g.order()).map(|x| b.length(x)).collect();
            la.sort();
            lb.sort();
            assert_eq!(la, lb);
        }
    }
}

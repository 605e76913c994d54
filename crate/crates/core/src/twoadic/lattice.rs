use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::Serialize;

use super::matrix::{mask, smith_mod2k, to_i64, valuation, TwoAdicMatrix};
use crate::extension::{
    centralizer_splitting_with, normalizer_cocycle, reflection_lift_check, ExtensionCocycle, ReflectionData,
    TorusAction,
};
use crate::lattice::MatrixGroup;
use crate::rootdata::MarkedReflectionLattice;
use crate::{Error, Result};

pub type TwoAdicGroup = MatrixGroup<TwoAdicMatrix>;

const GROUP_CAP: usize = 200_000;

/// A reflection of a `Z₂`-lattice with the generator `b₀` of `ker(1+σ)`, scaled so that its
/// first odd coordinate is 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoAdicReflection {
    pub matrix: TwoAdicMatrix,
    pub b0: Vec<u64>,
    pub pivot: usize,
    pub trivial_mod2: bool,
}

/// Decide whether `m` is a reflection: `m² = 1` and `1 − m` of rank one.
pub fn two_adic_reflection(m: &TwoAdicMatrix) -> Result<Option<TwoAdicReflection>> {
    let n = m.dim();
    let k = m.precision();
    let id = TwoAdicMatrix::identity(n, k);
    if m.is_identity() || !m.mul(m).is_identity() || m.trace() != ((n as u64).wrapping_sub(2) & mask(k)) {
        return Ok(None);
    }
    let a = m.sub(&id);
    if smith_mod2k(&a.rows(), n, k).rank()? != 1 {
        return Ok(None);
    }
    // im(σ − 1) = 2^e·Z₂b₀ with e ≤ 1, so a column of least valuation gives b₀; its top e bits
    // are unknown but only ever meet covectors divisible by 2^e.
    let (v, col) = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| (valuation(a.get(i, j), k), j))
        .min()
        .expect("nonzero matrix");
    if v > 1 {
        return Err(Error::Assertion("image of σ − 1 is not of index at most 2 in its saturation".into()));
    }
    let mut b0: Vec<u64> = (0..n).map(|i| a.get(i, col) >> v).collect();
    let pivot = b0.iter().position(|x| x & 1 == 1).ok_or_else(|| Error::Assertion("kernel vector is not primitive".into()))?;
    let u = super::matrix::unit_inverse(b0[pivot], k);
    for x in b0.iter_mut() {
        *x = x.wrapping_mul(u) & mask(k);
    }
    Ok(Some(TwoAdicReflection { matrix: m.clone(), b0, pivot, trivial_mod2: m.is_identity_mod2() }))
}

/// A strict 2-adic marking class: `b = b₀` or `b = 2b₀`, up to rescaling by units.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TwoAdicMarking {
    pub b: Vec<u64>,
    /// Known modulo `2^{k-1}` when `doubled`.
    pub beta: Vec<u64>,
    pub doubled: bool,
}

impl TwoAdicMarking {
    pub fn is_valid_for(&self, sigma: &TwoAdicMatrix) -> bool {
        let n = sigma.dim();
        let k = sigma.precision();
        let m = mask(k);
        let pairing = self.b.iter().zip(&self.beta).fold(0u64, |a, (x, y)| a.wrapping_add(x.wrapping_mul(*y))) & m;
        if pairing != 0u64.wrapping_sub(2) & m {
            return false;
        }
        (0..n).all(|i| {
            (0..n).all(|j| {
                let expect = sigma.get(i, j).wrapping_sub((i == j) as u64) & m;
                self.b[i].wrapping_mul(self.beta[j]) & m == expect
            })
        })
    }
}

/// Every marking class of a 2-adic reflection, found by testing `b₀` and `2b₀`.
pub fn two_adic_markings(sigma: &TwoAdicReflection) -> Vec<TwoAdicMarking> {
    let n = sigma.matrix.dim();
    let k = sigma.matrix.precision();
    let m = mask(k);
    let row: Vec<u64> =
        (0..n).map(|j| sigma.matrix.get(sigma.pivot, j).wrapping_sub((sigma.pivot == j) as u64) & m).collect();
    let mut out = Vec::new();
    for doubled in [false, true] {
        if doubled && row.iter().any(|x| x & 1 == 1) {
            continue;
        }
        let shift = doubled as u32;
        let b: Vec<u64> = sigma.b0.iter().map(|x| (x << shift) & m).collect();
        let beta: Vec<u64> = row.iter().map(|x| x >> shift).collect();
        let marking = TwoAdicMarking { b, beta, doubled };
        if marking.is_valid_for(&sigma.matrix) {
            out.push(marking);
        }
    }
    out
}

/// `(L̆, W, {(b_σ, β_σ)})` at precision `2^k`.
#[derive(Clone)]
pub struct CompleteMarkedLattice {
    pub group: Arc<TwoAdicGroup>,
    /// Element indices of the reflections, in element order.
    pub reflections: Vec<usize>,
    pub reflection_data: Vec<TwoAdicReflection>,
    pub markings: Vec<TwoAdicMarking>,
}

impl fmt::Debug for CompleteMarkedLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CompleteMarkedLattice")
            .field("rank", &self.rank())
            .field("precision", &self.precision())
            .field("order", &self.group.order())
            .field("reflections", &self.reflections.len())
            .finish()
    }
}

/// All reflections of a 2-adic matrix group, in element order.
pub fn two_adic_reflections(group: &TwoAdicGroup) -> Result<Vec<(usize, TwoAdicReflection)>> {
    let mut out = Vec::new();
    for (i, m) in group.elements().iter().enumerate() {
        if let Some(r) = two_adic_reflection(m)? {
            out.push((i, r));
        }
    }
    Ok(out)
}

impl CompleteMarkedLattice {
    /// Build from a group and a per-reflection choice of `2b₀`; the choice must be constant on
    /// conjugacy classes and `2b₀` is only allowed for reflections trivial mod 2.
    pub fn new<F>(group: Arc<TwoAdicGroup>, mut doubled: F) -> Result<Self>
    where
        F: FnMut(usize, &TwoAdicReflection) -> bool,
    {
        let found = two_adic_reflections(&group)?;
        let mats: Vec<TwoAdicMatrix> = found.iter().map(|(_, r)| r.matrix.clone()).collect();
        let id = group.element(group.identity()).clone();
        let by_refl = MatrixGroup::generate(id, &mats, group.order() + 1)?;
        if by_refl.order() != group.order() {
            return Err(Error::InvalidMarking("the group is not generated by its reflections".into()));
        }
        let mut reflections = Vec::new();
        let mut reflection_data = Vec::new();
        let mut markings = Vec::new();
        for (i, r) in found {
            let options = two_adic_markings(&r);
            if options.len() != 1 + r.trivial_mod2 as usize {
                return Err(Error::Assertion("2-adic marking count disagrees with the mod 2 test".into()));
            }
            let want = doubled(i, &r);
            let marking = options
                .into_iter()
                .find(|m| m.doubled == want)
                .ok_or_else(|| Error::InvalidMarking("2b0 marks only reflections trivial mod 2".into()))?;
            reflections.push(i);
            reflection_data.push(r);
            markings.push(marking);
        }
        let out = CompleteMarkedLattice { group, reflections, reflection_data, markings };
        out.check()?;
        Ok(out)
    }

    pub fn rank(&self) -> usize {
        self.group.element(0).dim()
    }

    pub fn precision(&self) -> u32 {
        self.group.element(0).precision()
    }

    pub fn position_of(&self, element: usize) -> Option<usize> {
        self.reflections.binary_search(&element).ok()
    }

    /// Equivariance on generators: `wσw⁻¹` carries the same kind of marking as `σ`.
    pub fn check(&self) -> Result<()> {
        for &g in self.group.generators() {
            let w = self.group.element(g);
            let wi = w.inverse()?;
            for (i, &r) in self.reflections.iter().enumerate() {
                let conj = w.mul(self.group.element(r)).mul(&wi);
                let j = self
                    .group
                    .index_of(&conj)
                    .and_then(|e| self.position_of(e))
                    .ok_or_else(|| Error::Assertion("conjugate of a reflection is not a reflection".into()))?;
                if self.markings[i].doubled != self.markings[j].doubled {
                    return Err(Error::InvalidMarking("2-adic markings are not equivariant".into()));
                }
            }
        }
        Ok(())
    }

    /// Block sum of complete lattices: the product group acting on the direct sum.
    pub fn block_sum(parts: &[&CompleteMarkedLattice]) -> Result<Self> {
        let k = parts.iter().map(|p| p.precision()).min().ok_or_else(|| Error::Assertion("empty block sum".into()))?;
        let blocks: Vec<TwoAdicMatrix> =
            parts.iter().map(|p| TwoAdicMatrix::identity(p.rank(), k)).collect::<Vec<_>>();
        let mut gens = Vec::new();
        let mut doubled: HashMap<TwoAdicMatrix, bool> = HashMap::new();
        for (pi, p) in parts.iter().enumerate() {
            let embed = |m: &TwoAdicMatrix| -> Result<TwoAdicMatrix> {
                let mut bs = blocks.clone();
                bs[pi] = m.reduce(k)?;
                Ok(TwoAdicMatrix::block_sum(&bs))
            };
            for &g in p.group.generators() {
                gens.push(embed(p.group.element(g))?);
            }
            for (i, &r) in p.reflections.iter().enumerate() {
                doubled.insert(embed(p.group.element(r))?, p.markings[i].doubled);
            }
        }
        let n: usize = parts.iter().map(|p| p.rank()).sum();
        let group = Arc::new(MatrixGroup::generate(TwoAdicMatrix::identity(n, k), &gens, GROUP_CAP)?);
        let g2 = group.clone();
        Self::new(group, |i, _| doubled.get(g2.element(i)).copied().unwrap_or(false))
    }

    /// Number of marking classes per reflection, parallel to `reflections`.
    pub fn marking_counts(&self) -> Vec<usize> {
        self.reflection_data.iter().map(|r| two_adic_markings(r).len()).collect()
    }
}

/// `Z₂ ⊗ M` at precision `2^k`.
pub fn promote(m: &MarkedReflectionLattice, k: u32) -> Result<CompleteMarkedLattice> {
    let n = m.rank();
    let gens: Vec<TwoAdicMatrix> =
        m.group.generators().iter().map(|&g| TwoAdicMatrix::from_int_matrix(m.group.element(g), k)).collect();
    let group = Arc::new(MatrixGroup::generate(TwoAdicMatrix::identity(n, k), &gens, GROUP_CAP)?);
    if group.order() != m.group.order() {
        return Err(Error::InsufficientPrecision(format!("reduction mod 2^{k} is not faithful")));
    }
    let mut doubled: HashMap<TwoAdicMatrix, bool> = HashMap::new();
    for (i, &r) in m.reflections.iter().enumerate() {
        let b = &m.markings[i].b;
        let g = b.iter().fold(num_bigint::BigInt::from(0), |acc, x| acc.gcd(x));
        doubled.insert(TwoAdicMatrix::from_int_matrix(m.group.element(r), k), g == num_bigint::BigInt::from(2));
    }
    let g2 = group.clone();
    let out = CompleteMarkedLattice::new(group, |i, _| doubled.get(g2.element(i)).copied().unwrap_or(false))?;
    if out.reflections.len() != m.reflections.len() {
        return Err(Error::Assertion("promotion changed the number of reflections".into()));
    }
    Ok(out)
}

/// A point of `Ť = (Z/2^∞)ʳ`: numerators over `2^log_den`, reduced.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct DiscreteTorusElement {
    pub log_den: u32,
    pub numerators: Vec<u64>,
}

impl DiscreteTorusElement {
    pub fn new(numerators: Vec<u64>, log_den: u32) -> Self {
        let mut out = DiscreteTorusElement { log_den, numerators };
        out.normalize();
        out
    }

    fn normalize(&mut self) {
        if self.log_den == 0 {
            self.numerators.iter_mut().for_each(|x| *x = 0);
            return;
        }
        let m = mask(self.log_den);
        self.numerators.iter_mut().for_each(|x| *x &= m);
        while self.log_den > 0 && self.numerators.iter().all(|x| x & 1 == 0) {
            self.numerators.iter_mut().for_each(|x| *x >>= 1);
            self.log_den -= 1;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.log_den == 0
    }

    pub fn add(&self, other: &Self) -> Self {
        let d = self.log_den.max(other.log_den);
        let a = self.numerators.iter().map(|x| x << (d - self.log_den));
        let b = other.numerators.iter().map(|x| x << (d - other.log_den));
        Self::new(a.zip(b).map(|(x, y)| x.wrapping_add(y)).collect(), d)
    }

    /// `w·t` for `w` acting on `L̆`; needs `log_den ≤ precision`.
    pub fn apply(&self, w: &TwoAdicMatrix) -> Result<Self> {
        if self.log_den > w.precision() {
            return Err(Error::InsufficientPrecision(format!("torus denominator 2^{} exceeds precision", self.log_den)));
        }
        Ok(Self::new(w.apply(&self.numerators), self.log_den))
    }

    /// `h_σ = b_σ / 2`.
    pub fn from_marking(m: &TwoAdicMarking) -> Self {
        Self::new(m.b.clone(), 1)
    }
}

impl fmt::Display for DiscreteTorusElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = 1u64 << self.log_den;
        let parts: Vec<String> = self
            .numerators
            .iter()
            .map(|&x| if self.log_den == 0 || x == 0 { "0".to_string() } else { format!("{x}/{d}") })
            .collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Reflection data for a 2-adic group: `a_i` is the normalized `b₀`.
pub fn two_adic_reflection_data(c: &CompleteMarkedLattice) -> Result<Arc<ReflectionData>> {
    let table = c.group.table().clone();
    let group = c.group.clone();
    let k = c.precision();
    let data = ReflectionData::from_splittings(table.clone(), c.group.generators().to_vec(), c.reflections.clone(), |rep| {
        let p = c.position_of(rep).expect("listed reflection");
        let a = c.reflection_data[p].b0.clone();
        let neg: Vec<u64> = a.iter().map(|x| 0u64.wrapping_sub(*x) & mask(k)).collect();
        let witness = a.iter().map(|&x| to_i64(x, k)).collect();
        let g = group.clone();
        centralizer_splitting_with(&table, rep, witness, move |e| {
            let v = g.element(e).apply(&a);
            if v == a {
                Some(false)
            } else if v == neg {
                Some(true)
            } else {
                None
            }
        })
    })?;
    Ok(Arc::new(data))
}

pub fn two_adic_action(c: &CompleteMarkedLattice) -> TorusAction {
    let k = c.precision();
    let matrices = c.group.elements().iter().map(|m| m.entries().iter().map(|&x| x as i64).collect()).collect();
    TorusAction { rank: c.rank(), matrices: Arc::new(matrices), matrix_modulus: Some(1i64 << k) }
}

/// Numerators over 2 of `h_σ = b_σ/2`, parallel to `c.reflections`.
pub fn discrete_marking_numerators(c: &CompleteMarkedLattice) -> Vec<Vec<i64>> {
    c.markings.iter().map(|m| m.b.iter().map(|x| (x & 1) as i64).collect()).collect()
}

/// `ν(Ť, W, {h_σ})`: the pushforward of the reflection extension along `σ ↦ h_σ`.
pub fn discrete_normalizer_extension(c: &CompleteMarkedLattice) -> Result<ExtensionCocycle> {
    let data = two_adic_reflection_data(c)?;
    normalizer_cocycle(&data, &two_adic_action(c), &discrete_marking_numerators(c))
}

/// Per reflection, whether some lift `q` of `σ` satisfies `q² = h_σ` and conjugates the
/// torsion generators as `σ` does.
pub fn discrete_lift_check(c: &CompleteMarkedLattice) -> Result<Vec<bool>> {
    let data = two_adic_reflection_data(c)?;
    let nu = normalizer_cocycle(&data, &two_adic_action(c), &discrete_marking_numerators(c))?;
    reflection_lift_check(&nu, &data, &discrete_marking_numerators(c))
}

/// Element bijection from an integral group to its promotion.
pub fn promotion_embedding(m: &MarkedReflectionLattice, c: &CompleteMarkedLattice) -> Result<Vec<usize>> {
    let k = c.precision();
    m.group
        .elements()
        .iter()
        .map(|g| c.group.index_of(&TwoAdicMatrix::from_int_matrix(g, k)).ok_or(Error::NotInGroup))
        .collect()
}

/// Reduce a big integer matrix entry to a residue; helper for callers holding integral data.
pub fn residue(x: &num_bigint::BigInt, k: u32) -> u64 {
    x.mod_floor(&num_bigint::BigInt::from(1u64 << k)).to_u64().expect("residue")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::build_entry;
    use crate::extension::{cohomologous, nt_model, split_check, CheckPlan};

    #[test]
    fn promoted_marking_counts_match() {
        for name in ["SU(2)", "SO(3)", "SU(3)", "Spin(5)", "SO(5)", "G2", "Sp(3)", "SO(4)"] {
            let e = build_entry(name).unwrap();
            let c = promote(&e.lattice, 12).unwrap();
            assert_eq!(c.group.order(), e.lattice.group.order());
            let integral: Vec<usize> = (0..e.lattice.reflections.len())
                .map(|i| 1 + e.lattice.reflection(i).trivial_mod2 as usize)
                .collect();
            let emb = promotion_embedding(&e.lattice, &c).unwrap();
            let promoted: Vec<usize> = e
                .lattice
                .reflections
                .iter()
                .map(|&r| c.marking_counts()[c.position_of(emb[r]).unwrap()])
                .collect();
            assert_eq!(integral, promoted, "{name}");
        }
    }

    #[test]
    fn torus_elements() {
        let t = DiscreteTorusElement::new(vec![2, 4], 3);
        assert_eq!(t, DiscreteTorusElement::new(vec![1, 2], 2));
        assert!(t.add(&t).add(&t).add(&t).is_zero());
        assert_eq!(t.to_string(), "(1/4, 2/4)");
    }

    #[test]
    fn rank_one_discrete_models() {
        let su2 = promote(&build_entry("SU(2)").unwrap().lattice, 8).unwrap();
        let so3 = promote(&build_entry("SO(3)").unwrap().lattice, 8).unwrap();
        assert!(!split_check(&discrete_normalizer_extension(&su2).unwrap()).unwrap().split);
        assert!(split_check(&discrete_normalizer_extension(&so3).unwrap()).unwrap().split);
    }

    #[test]
    fn discrete_matches_integral_restriction() {
        for name in ["SU(2)", "SO(3)", "Spin(5)", "SO(5)", "G2"] {
            let e = build_entry(name).unwrap();
            let c = promote(&e.lattice, 10).unwrap();
            let nu = nt_model(&e).unwrap().cocycle;
            let disc = discrete_normalizer_extension(&c).unwrap();
            assert!(disc.check_identity(CheckPlan::Exhaustive).passed());
            let emb = promotion_embedding(&e.lattice, &c).unwrap();
            let pulled = disc.restrict(nu.table().clone(), nu.generators().to_vec(), emb);
            assert!(cohomologous(&nu, &pulled).unwrap().is_some(), "{name}");
            assert!(discrete_lift_check(&c).unwrap().iter().all(|&b| b));
        }
    }
}

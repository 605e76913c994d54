//! Root systems, marked reflection lattices and marked reflection tori.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::matrix::{dot, is_zero, neg, normalize_sign, rational_inverse, rational_rank};
use crate::lattice::smith::{kernel_basis, rank, smith};
use crate::lattice::{
    generate_group, reflection_classes, reflections_in, FiniteMatrixGroup, IntMatrix, IntVector,
    Reflection, StrictMarking, DEFAULT_CAP,
};
use crate::lattice::reflection::conjugate_marking_with;
use crate::linsolve::frac;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Root {
    #[serde(serialize_with = "crate::serde_big::vec")]
    pub vector: IntVector,
    #[serde(serialize_with = "crate::serde_big::vec")]
    pub coroot: IntVector,
}

/// Integral root system `(L, R, {n_r})` with explicit coroot functionals.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RootSystem {
    pub rank: usize,
    pub roots: Vec<Root>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomCheck {
    pub axiom: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct RootSystemReport {
    pub checks: Vec<AxiomCheck>,
}

impl RootSystemReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed_axioms(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.axiom.as_str()).collect()
    }
}

impl RootSystem {
    pub fn new(rank: usize, mut roots: Vec<Root>) -> Result<Self> {
        for r in &roots {
            for v in [&r.vector, &r.coroot] {
                if v.len() != rank {
                    return Err(Error::DimensionMismatch { expected: rank, found: v.len() });
                }
            }
        }
        roots.sort();
        roots.dedup();
        Ok(RootSystem { rank, roots })
    }

    pub fn coroot_of(&self, v: &[BigInt]) -> Option<&IntVector> {
        self.roots.iter().find(|r| r.vector == v).map(|r| &r.coroot)
    }

    /// Check the axioms (R1)–(R4) and closure under negation.
    pub fn validate(&self) -> RootSystemReport {
        let n = self.rank;
        let mut checks = Vec::new();

        let coroots: Vec<IntVector> = self.roots.iter().map(|r| r.coroot.clone()).collect();
        let common_kernel = if coroots.is_empty() {
            (0..n).map(|i| (0..n).map(|j| BigInt::from((i == j) as i64)).collect()).collect()
        } else {
            kernel_basis(&coroots, n)
        };
        let mut spanning: Vec<IntVector> = self.roots.iter().map(|r| r.vector.clone()).collect();
        spanning.extend(common_kernel);
        let rk = rank(&spanning, n);
        checks.push(AxiomCheck {
            axiom: "R1".into(),
            passed: rk == n,
            detail: format!("roots and the common kernel of the coroots span rank {rk} of {n}"),
        });

        let bad_r2: Vec<String> = self
            .roots
            .iter()
            .filter(|r| dot(&r.coroot, &r.vector) != BigInt::from(-2))
            .map(|r| format!("{:?}", r.vector))
            .collect();
        checks.push(AxiomCheck {
            axiom: "R2".into(),
            passed: bad_r2.is_empty(),
            detail: if bad_r2.is_empty() {
                "n_r(r) = -2 for every root".into()
            } else {
                format!("n_r(r) != -2 for {}", bad_r2.join(", "))
            },
        });

        let mut bad_r3 = Vec::new();
        for (a, b) in self.roots.iter().tuple_combinations() {
            for (r, t) in [(a, b), (b, a)] {
                if let Some(k) = integer_multiple(&r.vector, &t.vector) {
                    if k != BigInt::one() && k != -BigInt::one() {
                        bad_r3.push(format!("{:?} = {} * {:?}", t.vector, k, r.vector));
                    }
                }
            }
        }
        checks.push(AxiomCheck {
            axiom: "R3".into(),
            passed: bad_r3.is_empty(),
            detail: if bad_r3.is_empty() {
                "no root is a multiple k*r with k != +-1".into()
            } else {
                format!("proportional roots: {}", bad_r3.join("; "))
            },
        });

        let vectors: std::collections::HashSet<&IntVector> = self.roots.iter().map(|r| &r.vector).collect();
        let mut bad_r4 = Vec::new();
        for r in &self.roots {
            for t in &self.roots {
                let k = dot(&r.coroot, &t.vector);
                let image: IntVector = t.vector.iter().zip(&r.vector).map(|(x, y)| x + &k * y).collect();
                if !vectors.contains(&image) {
                    bad_r4.push(format!("sigma_{:?}({:?})", r.vector, t.vector));
                }
            }
        }
        checks.push(AxiomCheck {
            axiom: "R4".into(),
            passed: bad_r4.is_empty(),
            detail: if bad_r4.is_empty() {
                "t + n_r(t) r lies in R for all r, t".into()
            } else {
                format!("{} images leave R, first {}", bad_r4.len(), bad_r4[0])
            },
        });

        let bad_neg = self
            .roots
            .iter()
            .filter(|r| self.coroot_of(&neg(&r.vector)) != Some(&neg(&r.coroot)))
            .count();
        checks.push(AxiomCheck {
            axiom: "negation".into(),
            passed: bad_neg == 0,
            detail: format!("{bad_neg} roots without a negated partner with negated coroot"),
        });
        RootSystemReport { checks }
    }

    /// Interchange roots and coroots on the dual lattice.
    pub fn dualize(&self) -> RootSystem {
        let roots = self
            .roots
            .iter()
            .map(|r| Root { vector: r.coroot.clone(), coroot: r.vector.clone() })
            .collect();
        RootSystem::new(self.rank, roots).expect("same rank")
    }

    pub fn reflection_of(&self, r: &Root) -> IntMatrix {
        IntMatrix::rank_one_update(&r.vector, &r.coroot)
    }
}

/// `k` with `t = k·r`, if it exists.
fn integer_multiple(r: &[BigInt], t: &[BigInt]) -> Option<BigInt> {
    let p = r.iter().position(|x| !x.is_zero())?;
    if !t[p].is_multiple_of(&r[p]) {
        return None;
    }
    let k = &t[p] / &r[p];
    r.iter().zip(t).all(|(x, y)| x * &k == *y).then_some(k)
}

/// A reflection group on `Zʳ` with an equivariant family of marking classes.
#[derive(Clone)]
pub struct MarkedReflectionLattice {
    pub group: Arc<FiniteMatrixGroup>,
    /// Element indices of the reflections, in element order.
    pub reflections: Vec<usize>,
    /// Canonical marking of each reflection, parallel to `reflections`.
    pub markings: Vec<StrictMarking>,
}

impl fmt::Debug for MarkedReflectionLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MarkedReflectionLattice")
            .field("rank", &self.rank())
            .field("order", &self.group.order())
            .field("markings", &self.markings)
            .finish()
    }
}

impl PartialEq for MarkedReflectionLattice {
    fn eq(&self, other: &Self) -> bool {
        self.group.elements() == other.group.elements() && self.markings == other.markings
    }
}

/// Reflections of the group, checking that they generate it.
fn reflections_generating(group: &FiniteMatrixGroup) -> Result<Vec<usize>> {
    let refl: Vec<usize> = reflections_in(group).into_iter().map(|(i, _)| i).collect();
    if group.table().generated(&refl).len() != group.order() {
        return Err(Error::InvalidMarking("the group is not generated by its reflections".into()));
    }
    Ok(refl)
}

impl MarkedReflectionLattice {
    pub fn rank(&self) -> usize {
        self.group.dim()
    }

    pub fn reflection(&self, i: usize) -> Reflection {
        Reflection::new(self.group.element(self.reflections[i]).clone()).expect("stored reflection")
    }

    pub fn position_of(&self, element: usize) -> Option<usize> {
        self.reflections.binary_search(&element).ok()
    }

    pub fn marking_of(&self, element: usize) -> Option<&StrictMarking> {
        self.position_of(element).map(|i| &self.markings[i])
    }

    /// Build from explicit markings for some reflections; the rest are filled by
    /// conjugation, and every reflection left unreached gets its `b₀` marking.
    pub fn from_markings(group: Arc<FiniteMatrixGroup>, given: &[StrictMarking]) -> Result<Self> {
        let reflections = reflections_generating(&group)?;
        let t = group.table().clone();
        let mut assigned: Vec<Option<StrictMarking>> = vec![None; reflections.len()];
        let pos: HashMap<usize, usize> = reflections.iter().enumerate().map(|(i, &r)| (r, i)).collect();
        let mut seeds = Vec::new();
        for m in given {
            let sigma = m.reflection();
            let idx = group.index_of(&sigma).ok_or(Error::NotInGroup)?;
            let p = *pos.get(&idx).ok_or(Error::NotAReflection)?;
            if !m.is_valid_for(&sigma) {
                return Err(Error::InvalidMarking(format!("{:?} does not mark {}", m.b, sigma)));
            }
            seeds.push((p, m.canonical()));
        }
        let propagate = |p: usize, m: &StrictMarking, assigned: &mut Vec<Option<StrictMarking>>| {
            for w in 0..group.order() {
                let target = pos[&t.conj(w, reflections[p])];
                if assigned[target].is_none() {
                    let wm = group.element(w);
                    let wi = group.element(t.inv(w));
                    assigned[target] = Some(conjugate_marking_with(wm, wi, m).canonical());
                }
            }
        };
        for (p, m) in &seeds {
            if assigned[*p].is_none() {
                propagate(*p, m, &mut assigned);
            }
        }
        for p in 0..reflections.len() {
            if assigned[p].is_none() {
                let refl = Reflection::new(group.element(reflections[p]).clone())?;
                let b0 = refl.root_generator();
                let beta = refl.coroot_for(&b0).expect("b0 always marks");
                propagate(p, &StrictMarking { b: b0, beta }, &mut assigned);
            }
        }
        if seeds.iter().any(|(p, m)| assigned[*p].as_ref() != Some(m)) {
            return Err(Error::InvalidMarking("given markings are not equivariant".into()));
        }
        let markings = assigned.into_iter().map(|m| m.expect("every reflection reached")).collect();
        let out = MarkedReflectionLattice { group, reflections, markings };
        out.check()?;
        Ok(out)
    }

    /// Markings chosen per reflection class: `true` selects `2b₀` (only allowed when trivial mod 2).
    pub fn from_class_choices(group: Arc<FiniteMatrixGroup>, doubled: &[bool]) -> Result<Self> {
        let reflections = reflections_generating(&group)?;
        let classes = reflection_classes(&group, &reflections)?;
        if classes.len() != doubled.len() {
            return Err(Error::DimensionMismatch { expected: classes.len(), found: doubled.len() });
        }
        let mut given = Vec::new();
        for (class, &d) in classes.iter().zip(doubled) {
            let refl = Reflection::new(group.element(class[0]).clone())?;
            let k = if d { 2 } else { 1 };
            let b: IntVector = refl.root_generator().iter().map(|x| x * k).collect();
            let beta = refl
                .coroot_for(&b)
                .ok_or_else(|| Error::InvalidMarking("2b0 marks only reflections trivial mod 2".into()))?;
            given.push(StrictMarking { b, beta });
        }
        Self::from_markings(group, &given)
    }

    /// Verify marking validity and equivariance by exhaustive conjugation.
    pub fn check(&self) -> Result<()> {
        let t = self.group.table();
        for (i, &r) in self.reflections.iter().enumerate() {
            if !self.markings[i].is_valid_for(self.group.element(r)) {
                return Err(Error::InvalidMarking(format!("marking {:?} is not a strict marking", self.markings[i].b)));
            }
        }
        for w in 0..self.group.order() {
            let wm = self.group.element(w);
            let wi = self.group.element(t.inv(w));
            for (i, &r) in self.reflections.iter().enumerate() {
                let conj = conjugate_marking_with(wm, wi, &self.markings[i]);
                let target = self.marking_of(t.conj(w, r)).expect("conjugate of a reflection is a reflection");
                if !conj.same_class(target) {
                    return Err(Error::InvalidMarking(format!(
                        "marking family is not equivariant at reflection {}",
                        self.group.element(r)
                    )));
                }
            }
        }
        Ok(())
    }

    /// The dual marked lattice `(L^#, W)` with markings `±(β, b)`.
    pub fn dual(&self) -> Result<MarkedReflectionLattice> {
        let gens: Vec<IntMatrix> = self.reflections.iter().map(|&r| self.group.element(r).transpose()).collect();
        let group = Arc::new(generate_group(self.rank(), &gens, DEFAULT_CAP)?);
        let given: Vec<StrictMarking> = self.markings.iter().map(StrictMarking::dual).collect();
        Self::from_markings(group, &given)
    }
}

pub fn lattice_to_rootsystem(m: &MarkedReflectionLattice) -> RootSystem {
    let mut roots = Vec::new();
    for mk in &m.markings {
        roots.push(Root { vector: mk.b.clone(), coroot: mk.beta.clone() });
        roots.push(Root { vector: neg(&mk.b), coroot: neg(&mk.beta) });
    }
    RootSystem::new(m.rank(), roots).expect("markings have the lattice rank")
}

pub fn rootsystem_to_lattice(rs: &RootSystem) -> Result<MarkedReflectionLattice> {
    let report = rs.validate();
    if !report.passed() {
        return Err(Error::InvalidRootSystem(format!("axioms fail: {}", report.failed_axioms().join(", "))));
    }
    let gens: Vec<IntMatrix> = rs.roots.iter().map(|r| rs.reflection_of(r)).collect();
    let group = Arc::new(generate_group(rs.rank, &gens, DEFAULT_CAP)?);
    let given: Vec<StrictMarking> =
        rs.roots.iter().map(|r| StrictMarking { b: r.vector.clone(), beta: r.coroot.clone() }).collect();
    let m = MarkedReflectionLattice::from_markings(group, &given)?;
    for g in &given {
        let idx = m.group.index_of(&g.reflection()).expect("generator in group");
        if !m.marking_of(idx).expect("reflection").same_class(g) {
            return Err(Error::InvalidRootSystem("two roots mark the same reflection".into()));
        }
    }
    if m.markings.len() * 2 != rs.roots.len() {
        return Err(Error::InvalidRootSystem("the group contains reflections not of the form sigma_r".into()));
    }
    Ok(m)
}

/// `2^k`, with `k` the number of reflection classes trivial mod 2.
pub fn count_root_systems(group: &FiniteMatrixGroup) -> Result<u64> {
    let refl = reflections_generating(group)?;
    let classes = reflection_classes(group, &refl)?;
    let k = classes
        .iter()
        .filter(|c| crate::lattice::is_trivial_mod2(group.element(c[0])))
        .count();
    Ok(1u64 << k)
}

/// Rational point of `T = (R⊗L)/L`, coordinates reduced into `[0, 1)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TorusElement {
    coords: Vec<BigRational>,
}

impl TorusElement {
    pub fn new(coords: Vec<BigRational>) -> Self {
        TorusElement { coords: coords.into_iter().map(frac).collect() }
    }

    pub fn zero(rank: usize) -> Self {
        TorusElement { coords: vec![BigRational::zero(); rank] }
    }

    pub fn from_fractions(pairs: &[(i64, i64)]) -> Self {
        Self::new(pairs.iter().map(|&(n, d)| BigRational::new(n.into(), d.into())).collect())
    }

    /// `v / d` reduced mod 1.
    pub fn from_numerators(v: &[BigInt], d: &BigInt) -> Self {
        Self::new(v.iter().map(|x| BigRational::new(x.clone(), d.clone())).collect())
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }

    pub fn rank(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn add(&self, other: &TorusElement) -> TorusElement {
        Self::new(self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect())
    }

    pub fn neg(&self) -> TorusElement {
        Self::new(self.coords.iter().map(|a| -a).collect())
    }

    pub fn sub(&self, other: &TorusElement) -> TorusElement {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: i64) -> TorusElement {
        let k = BigRational::from_integer(k.into());
        Self::new(self.coords.iter().map(|a| a * &k).collect())
    }

    pub fn apply(&self, w: &IntMatrix) -> TorusElement {
        let n = self.rank();
        Self::new(
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| BigRational::from_integer(w.get(i, j).clone()) * &self.coords[j])
                        .fold(BigRational::zero(), |a, b| a + b)
                })
                .collect(),
        )
    }

    /// Least common denominator of the coordinates.
    pub fn denominator(&self) -> BigInt {
        self.coords.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    /// Numerators over the given common denominator.
    pub fn numerators(&self, d: &BigInt) -> Option<IntVector> {
        self.coords
            .iter()
            .map(|c| {
                let x = c * BigRational::from_integer(d.clone());
                x.is_integer().then(|| x.to_integer())
            })
            .collect()
    }

    pub fn has_two_power_denominators(&self) -> bool {
        let d = self.denominator();
        (d.clone() & (d - BigInt::one())).is_zero()
    }
}

impl fmt::Display for TorusElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.coords.iter().map(|c| c.to_string()).join(", "))
    }
}

impl fmt::Debug for TorusElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for TorusElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.coords.iter().map(|c| c.to_string()))
    }
}

/// Whether `h` lies in `T(1)⊗L⁻(σ)`, the identity component of the `σ`-negated subgroup.
pub fn is_strongly_negative(sigma: &Reflection, h: &TorusElement) -> bool {
    let b0 = sigma.root_generator();
    let n = b0.len();
    let column: Vec<IntVector> = b0.iter().map(|x| vec![x.clone()]).collect();
    let s = smith(&column, 1);
    // left · b0 = ±e₁, so h ∈ Q·b0 + Zⁿ iff coordinates 2..n of left·h are integral.
    (1..n).all(|i| {
        let v = (0..n)
            .map(|j| BigRational::from_integer(s.left[i][j].clone()) * &h.coords[j])
            .fold(BigRational::zero(), |a, b| a + b);
        v.is_integer()
    })
}

/// Check the three conditions of a torus marking for `σ`.
pub fn is_torus_marking(sigma: &Reflection, h: &TorusElement) -> bool {
    is_strongly_negative(sigma, h) && h.scale(2).is_zero() && (sigma.trivial_mod2 || !h.is_zero())
}

#[derive(Clone)]
pub struct MarkedReflectionTorus {
    pub group: Arc<FiniteMatrixGroup>,
    pub reflections: Vec<usize>,
    /// `h_σ`, parallel to `reflections`.
    pub markings: Vec<TorusElement>,
}

impl fmt::Debug for MarkedReflectionTorus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MarkedReflectionTorus")
            .field("rank", &self.rank())
            .field("order", &self.group.order())
            .field("markings", &self.markings)
            .finish()
    }
}

impl PartialEq for MarkedReflectionTorus {
    fn eq(&self, other: &Self) -> bool {
        self.group.elements() == other.group.elements() && self.markings == other.markings
    }
}

impl MarkedReflectionTorus {
    pub fn new(group: Arc<FiniteMatrixGroup>, markings: Vec<TorusElement>) -> Result<Self> {
        let reflections = reflections_generating(&group)?;
        if markings.len() != reflections.len() {
            return Err(Error::DimensionMismatch { expected: reflections.len(), found: markings.len() });
        }
        let out = MarkedReflectionTorus { group, reflections, markings };
        out.check()?;
        Ok(out)
    }

    pub fn rank(&self) -> usize {
        self.group.dim()
    }

    pub fn marking_of(&self, element: usize) -> Option<&TorusElement> {
        self.reflections.binary_search(&element).ok().map(|i| &self.markings[i])
    }

    pub fn check(&self) -> Result<()> {
        let t = self.group.table();
        for (i, &r) in self.reflections.iter().enumerate() {
            let sigma = Reflection::new(self.group.element(r).clone())?;
            if !is_torus_marking(&sigma, &self.markings[i]) {
                return Err(Error::InvalidMarking(format!("{} is not a torus marking of {}", self.markings[i], sigma.matrix)));
            }
        }
        for w in 0..self.group.order() {
            for (i, &r) in self.reflections.iter().enumerate() {
                let moved = self.markings[i].apply(self.group.element(w));
                if Some(&moved) != self.marking_of(t.conj(w, r)) {
                    return Err(Error::InvalidMarking("torus markings are not equivariant".into()));
                }
            }
        }
        Ok(())
    }
}

/// `h_σ = b_σ/2 mod L`.
pub fn lattice_to_torus(m: &MarkedReflectionLattice) -> MarkedReflectionTorus {
    let two = BigInt::from(2);
    let markings = m.markings.iter().map(|mk| TorusElement::from_numerators(&mk.b, &two)).collect();
    MarkedReflectionTorus { group: m.group.clone(), reflections: m.reflections.clone(), markings }
}

/// Inverse of [`lattice_to_torus`]: `h = b₀/2` gives `b₀`, `h = 0` gives `2b₀`.
pub fn torus_to_lattice(t: &MarkedReflectionTorus) -> Result<MarkedReflectionLattice> {
    let two = BigInt::from(2);
    let mut given = Vec::new();
    for (i, &r) in t.reflections.iter().enumerate() {
        let sigma = Reflection::new(t.group.element(r).clone())?;
        let b0 = sigma.root_generator();
        let h = &t.markings[i];
        let b: IntVector = if *h == TorusElement::from_numerators(&b0, &two) {
            b0
        } else if h.is_zero() {
            b0.iter().map(|x| x * 2).collect()
        } else {
            return Err(Error::InvalidMarking(format!("{h} is not a torus marking")));
        };
        let beta = sigma
            .coroot_for(&b)
            .ok_or_else(|| Error::InvalidMarking("h = 0 for a reflection nontrivial mod 2".into()))?;
        given.push(StrictMarking { b, beta });
    }
    let out = MarkedReflectionLattice::from_markings(t.group.clone(), &given)?;
    debug_assert!(out.markings.iter().zip(&given).all(|(a, b)| a.same_class(b)));
    Ok(out)
}

/// Lift a geometric root system in `Qʳ` to the lattice with the given basis (columns).
///
/// The reflection `s_r` is found as the unique map `x ↦ x + H_r(x)·r` with
/// `H_r(r) = −2` permuting the roots.
pub fn integral_form(roots: &[Vec<BigRational>], basis: &[Vec<BigRational>]) -> Result<RootSystem> {
    let n = basis.len();
    if roots.iter().any(|r| r.len() != n) || basis.iter().any(|b| b.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: roots.first().map_or(n, Vec::len) });
    }
    let mut independent: Vec<Vec<BigRational>> = Vec::new();
    for r in roots {
        let mut trial = independent.clone();
        trial.push(r.clone());
        if rational_rank(&trial) == trial.len() {
            independent = trial;
        }
    }
    if independent.len() != n {
        return Err(Error::InvalidRootSystem("roots do not span the vector space".into()));
    }
    // Columns of `tmat` are the chosen independent roots.
    let tmat: Vec<Vec<BigRational>> = (0..n).map(|i| (0..n).map(|j| independent[j][i].clone()).collect()).collect();
    let t_inv = rational_inverse(&tmat).expect("independent roots");
    let root_set: std::collections::HashSet<&Vec<BigRational>> = roots.iter().collect();
    let lin = |coeffs: &[BigRational], x: &[BigRational]| -> BigRational {
        coeffs.iter().zip(x).map(|(a, b)| a * b).fold(BigRational::zero(), |a, b| a + b)
    };
    let mut functionals = Vec::new();
    for r in roots {
        let candidates: Vec<Vec<i64>> = independent
            .iter()
            .map(|t| {
                (-3..=3)
                    .filter(|&k| {
                        let kk = BigRational::from_integer(k.into());
                        let v: Vec<BigRational> = t.iter().zip(r).map(|(a, b)| a + &kk * b).collect();
                        root_set.contains(&v)
                    })
                    .collect()
            })
            .collect();
        let mut found: Option<Vec<BigRational>> = None;
        for choice in candidates.iter().map(|c| c.iter().copied()).multi_cartesian_product() {
            // H = k · T⁻¹ as a row vector.
            let h: Vec<BigRational> = (0..n)
                .map(|j| {
                    (0..n)
                        .map(|i| BigRational::from_integer(choice[i].into()) * &t_inv[i][j])
                        .fold(BigRational::zero(), |a, b| a + b)
                })
                .collect();
            if lin(&h, r) != BigRational::from_integer((-2).into()) {
                continue;
            }
            let permutes = roots.iter().all(|t| {
                let k = lin(&h, t);
                let v: Vec<BigRational> = t.iter().zip(r).map(|(a, b)| a + &k * b).collect();
                root_set.contains(&v)
            });
            if permutes {
                found = Some(h);
                break;
            }
        }
        let h = found.ok_or_else(|| Error::InvalidRootSystem("no reflection preserves the roots".into()))?;
        functionals.push(h);
    }
    let b_inv = rational_inverse(&(0..n).map(|i| (0..n).map(|j| basis[j][i].clone()).collect()).collect::<Vec<_>>())
        .ok_or_else(|| Error::LatticeOutOfRange("basis vectors are dependent".into()))?;
    let mut out = Vec::new();
    for (r, h) in roots.iter().zip(&functionals) {
        let coords: Vec<BigRational> = (0..n).map(|i| lin(&b_inv[i], r)).collect();
        if coords.iter().any(|c| !c.is_integer()) {
            return Err(Error::LatticeOutOfRange("a root is not in L (L_min is not contained in L)".into()));
        }
        let coroot: Vec<BigRational> = basis.iter().map(|b| lin(h, b)).collect();
        if coroot.iter().any(|c| !c.is_integer()) {
            return Err(Error::LatticeOutOfRange("H_r is not integral on L (L is not contained in L_max)".into()));
        }
        out.push(Root {
            vector: coords.iter().map(|c| c.to_integer()).collect(),
            coroot: coroot.iter().map(|c| c.to_integer()).collect(),
        });
    }
    RootSystem::new(n, out)
}

/// Every equivariant marking family of a reflection group, found by trying all
/// per-reflection choices of `b₀` or `2b₀`. Exponential; for small groups only.
pub fn enumerate_marking_families(group: &Arc<FiniteMatrixGroup>) -> Result<Vec<MarkedReflectionLattice>> {
    let reflections = reflections_generating(group)?;
    let options: Vec<Vec<StrictMarking>> = reflections
        .iter()
        .map(|&r| crate::lattice::markings_of(&Reflection::new(group.element(r).clone()).expect("reflection")))
        .collect();
    let mut out = Vec::new();
    for choice in options.iter().map(|o| o.iter().cloned()).multi_cartesian_product() {
        let candidate = MarkedReflectionLattice { group: group.clone(), reflections: reflections.clone(), markings: choice };
        if candidate.check().is_ok() {
            out.push(candidate);
        }
    }
    if reflections.is_empty() {
        out.push(MarkedReflectionLattice { group: group.clone(), reflections, markings: Vec::new() });
    }
    Ok(out)
}

/// Canonical sign for `b`, exposed for callers building keys.
pub fn canonical_root(b: &[BigInt]) -> IntVector {
    normalize_sign(b)
}

pub fn is_zero_vector(b: &[BigInt]) -> bool {
    is_zero(b)
}

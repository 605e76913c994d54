//! Shapiro induction and restriction, double cosets, and the centralizer-compatibility check.
//!
//! Every question is posed as "is this explicit cocycle a coboundary" and answered by the
//! linear solver; H² groups are only computed outright over F₂ for small groups.

use std::sync::Arc;

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::coxeter::find_simple_system;
use crate::extension::reflection::word_lengths;
use crate::extension::{
    cohomologous, normalizer_extension, split_check, CosetSpace, ExtensionCocycle, Module, ReflectionData,
};
use crate::lattice::{reflections_in, GroupTable};
use crate::rootdata::{MarkedReflectionTorus, TorusElement};
use crate::{Error, Result};

/// A subgroup of an ambient group table, with its own table and generators.
#[derive(Clone, Debug)]
pub struct Subgroup {
    /// Ambient indices, sorted.
    pub elements: Vec<usize>,
    pub table: Arc<GroupTable>,
    /// Generators as subgroup indices.
    pub generators: Vec<usize>,
    /// Word lengths in the subgroup generators.
    pub lengths: Vec<u32>,
    to_sub: Vec<u32>,
}

impl Subgroup {
    /// The subgroup consisting of the given ambient elements (must be closed).
    pub fn new(ambient: &GroupTable, elements: &[usize]) -> Result<Self> {
        let mut elements = elements.to_vec();
        elements.sort_unstable();
        elements.dedup();
        let n = elements.len();
        let mut to_sub = vec![u32::MAX; ambient.order()];
        for (i, &g) in elements.iter().enumerate() {
            to_sub[g] = i as u32;
        }
        let identity = to_sub[ambient.identity()];
        if identity == u32::MAX {
            return Err(Error::Assertion("subgroup misses the identity".into()));
        }
        let mut mul = Vec::with_capacity(n * n);
        for &a in &elements {
            for &b in &elements {
                let p = to_sub[ambient.mul(a, b)];
                if p == u32::MAX {
                    return Err(Error::Assertion("element list is not closed under multiplication".into()));
                }
                mul.push(p);
            }
        }
        let table = Arc::new(GroupTable::from_mul(n, identity as usize, mul));
        let generators = greedy_generators(&table);
        let lengths = word_lengths(&table, &generators);
        Ok(Subgroup { elements, table, generators, lengths, to_sub })
    }

    /// The subgroup generated by ambient elements, keeping those as generators.
    pub fn generated(ambient: &GroupTable, gens: &[usize]) -> Result<Self> {
        let mut s = Self::new(ambient, &ambient.generated(gens))?;
        let sub_gens: Vec<usize> = gens.iter().map(|&g| s.to_sub[g] as usize).collect();
        if !sub_gens.is_empty() {
            s.lengths = word_lengths(&s.table, &sub_gens);
            s.generators = sub_gens;
        }
        Ok(s)
    }

    /// The whole group, with the given generators.
    pub fn whole(table: &Arc<GroupTable>, generators: &[usize]) -> Self {
        let n = table.order();
        Subgroup {
            elements: (0..n).collect(),
            table: table.clone(),
            generators: generators.to_vec(),
            lengths: word_lengths(table, generators),
            to_sub: (0..n as u32).collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, g: usize) -> bool {
        self.to_sub[g] != u32::MAX
    }

    pub fn to_sub(&self, g: usize) -> Option<usize> {
        let s = self.to_sub[g];
        (s != u32::MAX).then_some(s as usize)
    }

    pub fn ambient(&self, s: usize) -> usize {
        self.elements[s]
    }

    /// A subgroup of this subgroup, given by ambient elements.
    pub fn inner(&self, ambient_elements: &[usize]) -> Result<Subgroup> {
        let local: Vec<usize> = ambient_elements
            .iter()
            .map(|&g| self.to_sub(g).ok_or_else(|| Error::Assertion("element outside the subgroup".into())))
            .collect::<Result<_>>()?;
        Subgroup::new(&self.table, &local)
    }
}

fn greedy_generators(table: &GroupTable) -> Vec<usize> {
    let mut gens = Vec::new();
    let mut have = vec![false; table.order()];
    have[table.identity()] = true;
    for g in 0..table.order() {
        if !have[g] {
            gens.push(g);
            for x in table.generated(&gens) {
                have[x] = true;
            }
        }
    }
    gens
}

/// `Z[G/H]` with its transitive permutation action.
#[derive(Clone, Debug)]
pub struct PermModule {
    pub cosets: Arc<CosetSpace>,
    pub module: Module,
}

impl PermModule {
    pub fn new(g: &Subgroup, h: &Subgroup) -> Result<Self> {
        let local: Vec<usize> = h.elements.iter().map(|&x| g.to_sub(x).ok_or(Error::NotInGroup)).collect::<Result<_>>()?;
        let cosets = Arc::new(CosetSpace::new(&g.table, &local, &g.lengths));
        let perm = cosets.permutation(&g.table);
        let base = cosets.base();
        let orbit: std::collections::BTreeSet<u32> = perm.iter().map(|p| p[base]).collect();
        if orbit.len() != cosets.index() {
            return Err(Error::Assertion("coset action is not transitive".into()));
        }
        let stab: Vec<usize> = (0..g.order()).filter(|&x| perm[x][base] as usize == base).collect();
        let mut sorted = local.clone();
        sorted.sort_unstable();
        if stab != sorted {
            return Err(Error::Assertion("stabilizer of eH differs from H".into()));
        }
        let module = Module::permutation(cosets.index(), Arc::new(perm), "Z[G/H]");
        Ok(PermModule { cosets, module })
    }
}

/// Induce an `H`-cocycle with integral coefficients (rank 1, trivial action) to `G`.
/// `g` and `h` are subgroups of a common ambient group, `h ⊆ g`, and `k` lives on `h.table`.
pub fn shapiro_forward(g: &Subgroup, h: &Subgroup, k: &ExtensionCocycle) -> Result<(ExtensionCocycle, PermModule)> {
    if k.module().rank != 1 || k.order() != h.order() {
        return Err(Error::DimensionMismatch { expected: h.order(), found: k.order() });
    }
    let pm = PermModule::new(g, h)?;
    // G-local index → H-local index.
    let local_to_h: Vec<u32> = (0..g.order()).map(|x| h.to_sub(g.ambient(x)).map_or(u32::MAX, |s| s as u32)).collect();
    let kk = k.clone();
    let c = crate::extension::induce(g.table.clone(), g.generators.clone(), pm.cosets.clone(), move |a, b| {
        kk.value(local_to_h[a] as usize, local_to_h[b] as usize)[0]
    });
    Ok((c, pm))
}

/// Pull a `Z[G/H]`-valued cocycle back to `H` and project onto the coordinate of `eH`.
pub fn shapiro_backward(c: &ExtensionCocycle, pm: &PermModule, g: &Subgroup, h: &Subgroup) -> Result<ExtensionCocycle> {
    let base = pm.cosets.base();
    let emb: Vec<usize> = h.elements.iter().map(|&x| g.to_sub(x).ok_or(Error::NotInGroup)).collect::<Result<_>>()?;
    let cc = c.clone();
    Ok(ExtensionCocycle::from_fn(h.table.clone(), h.generators.clone(), Module::trivial_integers(), move |a, b| {
        vec![cc.value(emb[a], emb[b])[base]]
    }))
}

/// `k(a,b) = 1` iff both `a` and `b` lie outside the index-2 subgroup `ker`: the pullback of the
/// nonzero class of `H²(Z/2; Z)`.
pub fn sign_cocycle(h: &Subgroup, negates: Vec<bool>) -> ExtensionCocycle {
    ExtensionCocycle::from_fn(h.table.clone(), h.generators.clone(), Module::trivial_integers(), move |a, b| {
        vec![(negates[a] && negates[b]) as i64]
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DoubleCosetDecomp {
    /// Least ambient index in each double coset, ascending.
    pub reps: Vec<usize>,
    /// `K_α = K ∩ x_α H x_α⁻¹`, ambient indices.
    pub intersections: Vec<Vec<usize>>,
    pub sizes: Vec<usize>,
}

impl DoubleCosetDecomp {
    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }
}

/// `G = ∐ K x_α H` inside the ambient table.
pub fn double_cosets(ambient: &GroupTable, g: &Subgroup, k: &Subgroup, h: &Subgroup) -> Result<DoubleCosetDecomp> {
    let mut label = vec![usize::MAX; ambient.order()];
    let mut reps = Vec::new();
    let mut sizes = Vec::new();
    for &x in &g.elements {
        if label[x] != usize::MAX {
            continue;
        }
        let id = reps.len();
        let mut size = 0;
        for &a in &k.elements {
            for &b in &h.elements {
                let y = ambient.mul(ambient.mul(a, x), b);
                if label[y] == usize::MAX {
                    label[y] = id;
                    size += 1;
                }
            }
        }
        reps.push(x);
        sizes.push(size);
    }
    if sizes.iter().sum::<usize>() != g.order() {
        return Err(Error::Assertion("double cosets do not partition G".into()));
    }
    let intersections: Vec<Vec<usize>> = reps
        .iter()
        .map(|&x| {
            let xi = ambient.inv(x);
            k.elements.iter().copied().filter(|&a| h.contains(ambient.mul(ambient.mul(xi, a), x))).collect()
        })
        .collect();
    let index_sum: usize = intersections.iter().map(|ka| k.order() / ka.len()).sum();
    if index_sum != g.order() / h.order() {
        return Err(Error::Assertion("Σ[K:K_α] differs from [G:H]".into()));
    }
    Ok(DoubleCosetDecomp { reps, intersections, sizes })
}

#[derive(Clone, Debug, Serialize)]
pub struct DoubleCosetReport {
    pub double_cosets: usize,
    pub index: usize,
    pub cohomologous: bool,
}

/// Compare `v*u_#(k)` with `⊕_α u^α_# v_α*(k)` as `Z[G/H]`-valued cocycles on `K`.
pub fn double_coset_formula_check(
    ambient: &GroupTable,
    g: &Subgroup,
    kk: &Subgroup,
    h: &Subgroup,
    k: &ExtensionCocycle,
) -> Result<DoubleCosetReport> {
    let (induced, pm) = shapiro_forward(g, h, k)?;
    let k_in_g: Vec<usize> = kk.elements.iter().map(|&x| g.to_sub(x).ok_or(Error::NotInGroup)).collect::<Result<_>>()?;
    let lhs = induced.restrict(kk.table.clone(), kk.generators.clone(), k_in_g.clone());
    let module = lhs.module().clone();
    let dc = double_cosets(ambient, g, kk, h)?;

    struct Piece {
        cocycle: ExtensionCocycle,
        /// K/K_α coset → G/H coset.
        embed: Vec<usize>,
    }
    let mut pieces = Vec::new();
    for (alpha, &x) in dc.reps.iter().enumerate() {
        let ka = kk.inner(&dc.intersections[alpha])?;
        let xi = ambient.inv(x);
        // v_α: K_α → H, κ ↦ x⁻¹κx.
        let to_h: Vec<usize> = ka
            .elements
            .iter()
            .map(|&s| h.to_sub(ambient.mul(ambient.mul(xi, kk.ambient(s)), x)).expect("conjugate lies in H"))
            .collect();
        let kc = k.clone();
        let pulled = ExtensionCocycle::from_fn(ka.table.clone(), ka.generators.clone(), Module::trivial_integers(), move |a, b| {
            kc.value(to_h[a], to_h[b])
        });
        let (ind, pm_a) = shapiro_forward(kk, &ka.lift_to(kk), &pulled)?;
        let embed: Vec<usize> = pm_a
            .cosets
            .reps
            .iter()
            .map(|&kappa| {
                let gx = g.to_sub(ambient.mul(kk.ambient(kappa), x)).expect("element of G");
                pm.cosets.coset_of[gx] as usize
            })
            .collect();
        pieces.push(Piece { cocycle: ind, embed });
    }
    let rank = module.rank;
    let rhs = ExtensionCocycle::from_fn(kk.table.clone(), kk.generators.clone(), module, move |a, b| {
        let mut out = vec![0i64; rank];
        for p in &pieces {
            for (y, v) in p.cocycle.value(a, b).into_iter().enumerate() {
                out[p.embed[y]] += v;
            }
        }
        out
    });
    let ok = cohomologous(&lhs, &rhs)?.is_some();
    Ok(DoubleCosetReport { double_cosets: dc.len(), index: pm.cosets.index(), cohomologous: ok })
}

impl Subgroup {
    /// Reinterpret a subgroup of `parent.table` as a subgroup of `parent`'s ambient group.
    fn lift_to(&self, parent: &Subgroup) -> Subgroup {
        let elements: Vec<usize> = self.elements.iter().map(|&s| parent.ambient(s)).collect();
        let mut to_sub = vec![u32::MAX; parent.to_sub.len()];
        for (i, &g) in elements.iter().enumerate() {
            to_sub[g] = i as u32;
        }
        Subgroup {
            elements,
            table: self.table.clone(),
            generators: self.generators.clone(),
            lengths: self.lengths.clone(),
            to_sub,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VanishingCase {
    pub alpha: usize,
    pub conjugates_outside: bool,
    pub restricted_trivial: bool,
}

/// For `H = C_i` and each double coset `K x_α C_i`: whether `x_α t_i x_α⁻¹ ∉ K`, and whether
/// `v_α*(k_i)` is trivial on `K_α`. `negates` is indexed by the local indices of `H`.
pub fn vanishing_check(
    ambient: &GroupTable,
    g: &Subgroup,
    kk: &Subgroup,
    h: &Subgroup,
    t_i: usize,
    negates: &[bool],
) -> Result<Vec<VanishingCase>> {
    let dc = double_cosets(ambient, g, kk, h)?;
    let mut out = Vec::new();
    for (alpha, &x) in dc.reps.iter().enumerate() {
        let outside = !kk.contains(ambient.conj(x, t_i));
        let ka = Subgroup::new(ambient, &dc.intersections[alpha])?;
        let xi = ambient.inv(x);
        let neg: Vec<bool> = ka.elements.iter().map(|&a| negates[h.to_sub(ambient.mul(ambient.mul(xi, a), x)).expect("in H")]).collect();
        let trivial = split_check(&sign_cocycle(&ka, neg))?.split;
        out.push(VanishingCase { alpha, conjugates_outside: outside, restricted_trivial: trivial });
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct CompatReport {
    pub applicable: bool,
    pub wa_order: usize,
    pub index: usize,
    pub reflections: usize,
    pub cohomologous: Option<bool>,
}

/// Elements of `W` fixing every element of `A` (given by generators).
pub fn pointwise_stabilizer(m: &MarkedReflectionTorus, a: &[TorusElement]) -> Vec<usize> {
    (0..m.group.order()).filter(|&w| a.iter().all(|x| x.apply(m.group.element(w)) == *x)).collect()
}

/// Compare `ν(W_A)` with the pullback of `ν(W)` along `W_A ⊆ W`.
pub fn centralizer_compat_check(m: &MarkedReflectionTorus, a: &[TorusElement]) -> Result<CompatReport> {
    let t = m.group.table();
    let wa = pointwise_stabilizer(m, a);
    let refl: Vec<usize> = wa.iter().copied().filter(|w| m.reflections.binary_search(w).is_ok()).collect();
    let generated = t.generated(&refl);
    let index = m.group.order() / wa.len();
    if generated.len() != wa.len() {
        return Ok(CompatReport { applicable: false, wa_order: wa.len(), index, reflections: refl.len(), cohomologous: None });
    }
    let ss = find_simple_system(&m.group)?;
    let data = Arc::new(ReflectionData::from_simple_system(&ss)?);
    let nu = normalizer_extension(m, &data)?;

    let (sub, embedding) = m.group.subgroup(&refl)?;
    let sub = Arc::new(sub);
    let sub_refl: Vec<usize> = reflections_in(&sub).into_iter().map(|(i, _)| i).collect();
    let markings = sub_refl
        .iter()
        .map(|&i| m.marking_of(embedding[i]).cloned().ok_or(Error::NotAReflection))
        .collect::<Result<Vec<_>>>()?;
    let sub_torus = MarkedReflectionTorus::new(sub.clone(), markings)?;
    let sub_ss = find_simple_system(&sub)?;
    let sub_data = Arc::new(ReflectionData::from_simple_system(&sub_ss)?);
    let nu_a = normalizer_extension(&sub_torus, &sub_data)?;
    let pulled = nu.restrict(sub.table().clone(), sub_data.generators.clone(), embedding);
    let ok = cohomologous(&nu_a, &pulled)?.is_some();
    Ok(CompatReport { applicable: true, wa_order: wa.len(), index, reflections: refl.len(), cohomologous: Some(ok) })
}

// ---- F₂ linear algebra for the brute-force H² computation ----

type Bits = Vec<u64>;

fn bits(n: usize) -> Bits {
    vec![0; n.div_ceil(64)]
}

fn get(v: &Bits, i: usize) -> bool {
    v[i / 64] >> (i % 64) & 1 == 1
}

fn flip(v: &mut Bits, i: usize) {
    v[i / 64] ^= 1 << (i % 64);
}

fn xor_into(a: &mut Bits, b: &Bits) {
    for (x, y) in a.iter_mut().zip(b) {
        *x ^= y;
    }
}

fn lowest(v: &Bits) -> Option<usize> {
    v.iter().enumerate().find(|(_, w)| **w != 0).map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
}

/// Echelon basis of an F₂-subspace, keyed by lowest set bit.
#[derive(Clone, Default)]
struct Span {
    rows: Vec<(usize, Bits)>,
}

impl Span {
    fn reduce(&self, mut v: Bits) -> Bits {
        for (p, r) in &self.rows {
            if get(&v, *p) {
                xor_into(&mut v, r);
            }
        }
        v
    }

    fn insert(&mut self, v: Bits) -> bool {
        let v = self.reduce(v);
        match lowest(&v) {
            None => false,
            Some(p) => {
                for (_, r) in self.rows.iter_mut() {
                    if get(r, p) {
                        xor_into(r, &v);
                    }
                }
                self.rows.push((p, v));
                true
            }
        }
    }

    fn dim(&self) -> usize {
        self.rows.len()
    }
}

/// Kernel of an F₂ matrix given by rows.
fn nullspace(rows: impl IntoIterator<Item = Bits>, ncols: usize) -> Vec<Bits> {
    let mut span = Span::default();
    for r in rows {
        span.insert(r);
    }
    let pivots: std::collections::HashSet<usize> = span.rows.iter().map(|(p, _)| *p).collect();
    (0..ncols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = bits(ncols);
            flip(&mut v, free);
            for (p, r) in &span.rows {
                if get(r, free) {
                    flip(&mut v, *p);
                }
            }
            v
        })
        .collect()
}

/// Normalized 2-cochains and cocycles of a group with coefficients in `F₂ʳ`.
struct F2Complex {
    nonid: Vec<usize>,
    slot: Vec<usize>,
    cocycles: Vec<Bits>,
    coboundaries: Span,
}

impl F2Complex {
    fn new(table: &GroupTable, action: &[Vec<u8>], r: usize) -> Self {
        let n = table.order();
        let e = table.identity();
        let nonid: Vec<usize> = (0..n).filter(|&g| g != e).collect();
        let mut slot = vec![usize::MAX; n];
        for (i, &g) in nonid.iter().enumerate() {
            slot[g] = i;
        }
        let m = nonid.len();
        let ncols = m * m * r;
        let var = |a: usize, b: usize, i: usize| -> Option<usize> {
            (a != e && b != e).then(|| (slot[a] * m + slot[b]) * r + i)
        };
        // x·c(y,z) − c(xy,z) + c(x,yz) − c(x,y) = 0, coordinate i.
        let mut eqs = Vec::new();
        for &x in &nonid {
            for &y in &nonid {
                for &z in &nonid {
                    for i in 0..r {
                        let mut row = bits(ncols);
                        for j in 0..r {
                            if action[x][i * r + j] & 1 == 1 {
                                if let Some(v) = var(y, z, j) {
                                    flip(&mut row, v);
                                }
                            }
                        }
                        for v in [var(table.mul(x, y), z, i), var(x, table.mul(y, z), i), var(x, y, i)].into_iter().flatten() {
                            flip(&mut row, v);
                        }
                        eqs.push(row);
                    }
                }
            }
        }
        let cocycles = nullspace(eqs, ncols);
        let mut coboundaries = Span::default();
        for &g in &nonid {
            for j in 0..r {
                // δ of the cochain b = e_j at g.
                let mut v = bits(ncols);
                for &a in &nonid {
                    for &b in &nonid {
                        for i in 0..r {
                            let mut bit = false;
                            if b == g {
                                bit ^= action[a][i * r + j] & 1 == 1;
                            }
                            if table.mul(a, b) == g && i == j {
                                bit ^= true;
                            }
                            if a == g && i == j {
                                bit ^= true;
                            }
                            if bit {
                                flip(&mut v, var(a, b, i).unwrap());
                            }
                        }
                    }
                }
                coboundaries.insert(v);
            }
        }
        F2Complex { nonid, slot, cocycles, coboundaries }
    }

    fn h2_dim(&self) -> usize {
        self.cocycles.len() - self.coboundaries.dim()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OddIndexReport {
    pub index: usize,
    pub h2_dim_group: usize,
    pub h2_dim_subgroup: usize,
    pub kernel_dim: usize,
    pub classes_checked: usize,
    pub injective: bool,
}

/// Restriction `H²(W; T[2]) → H²(H; T[2])` computed by brute force over F₂; `action[g]` is the
/// matrix of `g` mod 2 (row-major), `h` a subgroup of the same table.
pub fn odd_index_restriction_check(table: &GroupTable, action: &[Vec<u8>], r: usize, h: &Subgroup) -> Result<OddIndexReport> {
    let big = F2Complex::new(table, action, r);
    let sub_action: Vec<Vec<u8>> = h.elements.iter().map(|&g| action[g].clone()).collect();
    let small = F2Complex::new(&h.table, &sub_action, r);
    let m_big = big.nonid.len();
    let m_small = small.nonid.len();
    let restrict = |v: &Bits| -> Bits {
        let mut out = bits(m_small * m_small * r);
        for &a in &small.nonid {
            for &b in &small.nonid {
                let (ga, gb) = (h.ambient(a), h.ambient(b));
                for i in 0..r {
                    if get(v, (big.slot[ga] * m_big + big.slot[gb]) * r + i) {
                        flip(&mut out, (small.slot[a] * m_small + small.slot[b]) * r + i);
                    }
                }
            }
        }
        out
    };
    // Complement of B²(W) in Z²(W): representatives of a basis of H²(W).
    let mut span = big.coboundaries.clone();
    let mut reps = Vec::new();
    for z in &big.cocycles {
        if span.insert(z.clone()) {
            reps.push(z.clone());
        }
    }
    let images: Vec<Bits> = reps.iter().map(|z| small.coboundaries.reduce(restrict(z))).collect();
    let mut img_span = Span::default();
    let rank = images.iter().filter(|v| img_span.insert((*v).clone())).count();
    let kernel_dim = reps.len() - rank;
    let mut classes_checked = 0;
    let mut all_nonzero = true;
    if reps.len() <= 12 {
        for mask in 1u32..(1 << reps.len()) {
            let mut v = bits(m_small * m_small * r);
            for (k, img) in images.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    xor_into(&mut v, img);
                }
            }
            if lowest(&small.coboundaries.reduce(v)).is_none() {
                all_nonzero = false;
            }
            classes_checked += 1;
        }
    }
    Ok(OddIndexReport {
        index: table.order() / h.order(),
        h2_dim_group: big.h2_dim(),
        h2_dim_subgroup: small.h2_dim(),
        kernel_dim,
        classes_checked,
        injective: kernel_dim == 0 && all_nonzero,
    })
}

/// Matrices mod 2 of an integral group, row-major, for [`odd_index_restriction_check`].
pub fn mod2_action(group: &crate::lattice::FiniteMatrixGroup) -> Vec<Vec<u8>> {
    group
        .elements()
        .iter()
        .map(|m| m.entries().iter().map(|x| (x.to_i64().expect("small entry").rem_euclid(2)) as u8).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::build_entry;
    use crate::extension::{CheckPlan, ReflectionData};

    fn setup(name: &str) -> (Arc<crate::lattice::FiniteMatrixGroup>, Arc<ReflectionData>, Subgroup) {
        let g = build_entry(name).unwrap().lattice.group.clone();
        let ss = find_simple_system(&g).unwrap();
        let d = Arc::new(ReflectionData::from_simple_system(&ss).unwrap());
        let whole = Subgroup::whole(g.table(), &ss.simple_indices);
        (g, d, whole)
    }

    fn centralizer(d: &ReflectionData, class: usize) -> (Subgroup, ExtensionCocycle) {
        let c = &d.classes[class];
        let h = Subgroup::new(&d.table, &c.splitting.centralizer).unwrap();
        let neg: Vec<bool> = h.elements.iter().map(|&x| c.negates[x]).collect();
        let k = sign_cocycle(&h, neg);
        (h, k)
    }

    #[test]
    fn forward_matches_rho_on_a2() {
        let (_, d, whole) = setup("SU(3)");
        let (h, k) = centralizer(&d, 0);
        let (ind, pm) = shapiro_forward(&whole, &h, &k).unwrap();
        assert_eq!(pm.cosets.index(), 3);
        assert!(ind.check_identity(CheckPlan::Exhaustive).passed());
        let rho = crate::extension::reflection_extension(&d);
        // Same class after matching coset order to reflection order.
        let perm: Vec<usize> = pm.cosets.reps.iter().map(|&x| d.position[d.table.conj(x, d.classes[0].splitting.class_rep)] as usize).collect();
        let moved = ind.pushforward(rho.module().clone(), move |v| {
            let mut out = vec![0; v.len()];
            for (i, &x) in v.iter().enumerate() {
                out[perm[i]] += x;
            }
            out
        });
        assert!(cohomologous(&moved, &rho).unwrap().is_some());
    }

    #[test]
    fn round_trip_and_trivial() {
        let (_, d, whole) = setup("Spin(5)");
        for class in 0..d.classes.len() {
            let (h, k) = centralizer(&d, class);
            let (ind, pm) = shapiro_forward(&whole, &h, &k).unwrap();
            let back = shapiro_backward(&ind, &pm, &whole, &h).unwrap();
            assert!(cohomologous(&back, &k).unwrap().is_some());
            assert!(!split_check(&back).unwrap().split);
            let zero = k.scale(0);
            let (z, _) = shapiro_forward(&whole, &h, &zero).unwrap();
            assert!(split_check(&z).unwrap().split);
        }
        // H = G.
        let (g, _, whole) = setup("SU(3)");
        let all = Subgroup::new(g.table(), &(0..g.order()).collect::<Vec<_>>()).unwrap();
        let k = crate::extension::ExtensionCocycle::zero(all.table.clone(), all.generators.clone(), Module::trivial_integers());
        let (_, pm) = shapiro_forward(&whole, &all, &k).unwrap();
        assert_eq!(pm.cosets.index(), 1);
    }

    #[test]
    fn double_coset_counts() {
        let (g, d, whole) = setup("SU(3)");
        let (h, _) = centralizer(&d, 0);
        let dc = double_cosets(g.table(), &whole, &h, &h).unwrap();
        assert_eq!(dc.len(), 2);
        let dc = double_cosets(g.table(), &whole, &whole, &h).unwrap();
        assert_eq!(dc.len(), 1);
    }

    #[test]
    fn double_coset_formula_b2() {
        let (g, d, whole) = setup("Spin(5)");
        for class in 0..2 {
            let (h, k) = centralizer(&d, class);
            for kclass in 0..2 {
                let (kk, _) = centralizer(&d, kclass);
                let rep = double_coset_formula_check(g.table(), &whole, &kk, &h, &k).unwrap();
                assert!(rep.cohomologous, "{rep:?}");
            }
            let rep = double_coset_formula_check(g.table(), &whole, &whole, &h, &k).unwrap();
            assert!(rep.cohomologous && rep.double_cosets == 1);
        }
    }

    #[test]
    fn odd_index_b2_and_a2() {
        let (g, d, _) = setup("SU(3)");
        let (h, _) = centralizer(&d, 0);
        let rep = odd_index_restriction_check(g.table(), &mod2_action(&g), 2, &h).unwrap();
        assert_eq!(rep.index, 3);
        assert!(rep.injective, "{rep:?}");
        let (g, _, _) = setup("Spin(5)");
        let all = Subgroup::new(g.table(), &(0..8).collect::<Vec<_>>()).unwrap();
        let rep = odd_index_restriction_check(g.table(), &mod2_action(&g), 2, &all).unwrap();
        assert!(rep.injective && rep.h2_dim_group > 0, "{rep:?}");
    }

    #[test]
    fn compat_trivial_a() {
        let e = build_entry("Spin(7)").unwrap();
        let m = e.torus();
        let rep = centralizer_compat_check(&m, &[]).unwrap();
        assert!(rep.applicable && rep.cohomologous == Some(true) && rep.index == 1);
        let a = TorusElement::from_fractions(&[(1, 2), (0, 1), (0, 1)]);
        let rep = centralizer_compat_check(&m, &[a]).unwrap();
        if rep.applicable {
            assert_eq!(rep.cohomologous, Some(true));
        }
    }
}

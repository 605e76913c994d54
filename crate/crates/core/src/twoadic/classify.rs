use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::di4::{mod2_image, mod2_irreducible};
use super::lattice::{CompleteMarkedLattice, TwoAdicGroup};
use super::matrix::{mask, rank_mod2, smith_mod2k, to_i64, TwoAdicMatrix};
use crate::catalog::{cartan_matrix, lattice_basis_with, lattice_from_cartan};
use crate::lattice::{markings_of, IntMatrix, MatrixGroup, Reflection, StrictMarking};
use crate::rootdata::MarkedReflectionLattice;
use crate::{Error, Result};

/// One irreducible piece `L_i` of a split complete lattice.
#[derive(Clone, Debug)]
pub struct Factor {
    /// Basis of `L_i` inside `L̆`, as columns.
    pub basis: Vec<Vec<u64>>,
    /// `W_i` acting on `L_i`, with the inherited markings.
    pub lattice: CompleteMarkedLattice,
    /// Element indices in the ambient group of the reflections of this factor.
    pub ambient_reflections: Vec<usize>,
}

impl Factor {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }
}

#[derive(Clone, Debug)]
pub struct Partition {
    pub factors: Vec<Factor>,
    /// Basis of the part fixed by the whole group.
    pub fixed_basis: Vec<Vec<u64>>,
    /// Precision at which the factor actions are known.
    pub precision: u32,
}

impl Partition {
    pub fn ranks(&self) -> Vec<usize> {
        self.factors.iter().map(Factor::rank).collect()
    }
}

fn components(n: usize, adjacent: impl Fn(usize, usize) -> bool) -> Vec<Vec<usize>> {
    let mut comp = vec![usize::MAX; n];
    let mut out = Vec::new();
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut members = vec![s];
        comp[s] = id;
        let mut i = 0;
        while i < members.len() {
            let a = members[i];
            for b in 0..n {
                if comp[b] == usize::MAX && adjacent(a, b) {
                    comp[b] = id;
                    members.push(b);
                }
            }
            i += 1;
        }
        members.sort_unstable();
        out.push(members);
    }
    out
}

fn columns_to_matrix(cols: &[Vec<u64>], k: u32) -> TwoAdicMatrix {
    let n = cols.len();
    TwoAdicMatrix::from_residues(n, k, (0..n * n).map(|i| cols[i % n][i / n]).collect())
}

/// Saturation of `Σ im(σ − 1)` over the given reflections, with the bits of precision it costs.
fn saturated_images(c: &CompleteMarkedLattice, part: &[usize]) -> Result<(Vec<Vec<u64>>, u32)> {
    let n = c.rank();
    let k = c.precision();
    let id = TwoAdicMatrix::identity(n, k);
    let diffs: Vec<TwoAdicMatrix> = part.iter().map(|&p| c.group.element(c.reflections[p]).sub(&id)).collect();
    let rows: Vec<Vec<u64>> =
        (0..n).map(|i| diffs.iter().flat_map(|d| (0..n).map(move |j| d.get(i, j))).collect()).collect();
    let smith = smith_mod2k(&rows, n * part.len(), k);
    let r = smith.rank()?;
    Ok((smith.saturated_image()?, smith.valuations[..r].iter().copied().max().unwrap_or(0)))
}

/// Basis of `L̆^W`, with the bits of precision it costs.
fn fixed_lattice(c: &CompleteMarkedLattice) -> Result<(Vec<Vec<u64>>, u32)> {
    let n = c.rank();
    let k = c.precision();
    if c.reflections.is_empty() {
        return Ok(((0..n).map(|j| (0..n).map(|i| (i == j) as u64).collect()).collect(), 0));
    }
    let id = TwoAdicMatrix::identity(n, k);
    let stacked: Vec<Vec<u64>> = c.reflections.iter().flat_map(|&r| c.group.element(r).sub(&id).rows()).collect();
    let smith = smith_mod2k(&stacked, n, k);
    let r = smith.rank()?;
    Ok((smith.kernel()?, smith.valuations[..r].iter().copied().max().unwrap_or(0)))
}

/// Components of the graph `σ ~ τ iff στ ≠ τσ`, as lists of reflection positions.
pub fn reflection_components(c: &CompleteMarkedLattice) -> Vec<Vec<usize>> {
    let refl: Vec<&TwoAdicMatrix> = c.reflections.iter().map(|&r| c.group.element(r)).collect();
    components(refl.len(), |a, b| refl[a].mul(refl[b]) != refl[b].mul(refl[a]))
}

/// Restrict to the summands spanned by `blocks` (column bases, in order), which must together
/// give `L̆` mod 2. `parts[i]` lists the reflections acting on block `i`; every other reflection
/// must act trivially on it.
fn split_into(c: &CompleteMarkedLattice, blocks: &[Vec<Vec<u64>>], parts: &[Vec<usize>], loss: u32) -> Result<(Vec<Factor>, u32)> {
    let n = c.rank();
    let k = c.precision();
    let kp = k.checked_sub(loss).filter(|&v| v >= 2).ok_or_else(|| {
        Error::InsufficientPrecision(format!("splitting loses {loss} of {k} bits"))
    })?;
    let all: Vec<Vec<u64>> = blocks.iter().flatten().cloned().collect();
    if all.len() != n {
        return Err(Error::Classification(format!("summands have total rank {}, lattice has rank {n}", all.len())));
    }
    let mod2: Vec<Vec<u8>> = (0..n).map(|i| all.iter().map(|col| (col[i] & 1) as u8).collect()).collect();
    if rank_mod2(&mod2) != n {
        return Err(Error::Classification("the sum of the factor lattices does not split mod 2".into()));
    }
    let q = columns_to_matrix(&all, kp);
    let q_inv = q.inverse()?;
    let mut factors = Vec::new();
    let mut offset = 0;
    for (part, basis) in parts.iter().zip(blocks) {
        let r = basis.len();
        let range = offset..offset + r;
        let mut gens = Vec::new();
        let mut doubled: HashMap<TwoAdicMatrix, bool> = HashMap::new();
        for &p in part {
            let m = q_inv.mul(&c.group.element(c.reflections[p]).reduce(kp)?).mul(&q);
            for i in 0..n {
                for j in 0..n {
                    let inside = range.contains(&i) && range.contains(&j);
                    if !inside && m.get(i, j) != (i == j) as u64 {
                        return Err(Error::Classification("a reflection does not preserve the factor splitting".into()));
                    }
                }
            }
            let block = TwoAdicMatrix::from_residues(
                r,
                kp,
                range.clone().flat_map(|i| range.clone().map(move |j| (i, j))).map(|(i, j)| m.get(i, j)).collect(),
            );
            doubled.insert(block.clone(), c.markings[p].doubled);
            gens.push(block);
        }
        let group = Arc::new(MatrixGroup::generate(TwoAdicMatrix::identity(r, kp), &gens, 200_000)?);
        let g2 = group.clone();
        let lattice = CompleteMarkedLattice::new(group, |e, _| doubled.get(g2.element(e)).copied().unwrap_or(false))?;
        if lattice.reflections.len() != part.len() {
            return Err(Error::Classification("factor group has reflections outside its component".into()));
        }
        factors.push(Factor {
            basis: basis.iter().map(|v| v.iter().map(|x| x & mask(kp)).collect()).collect(),
            lattice,
            ambient_reflections: part.iter().map(|&p| c.reflections[p]).collect(),
        });
        offset += r;
    }
    Ok((factors, kp))
}

/// Split `(L̆, W)` along the components of the non-commuting graph on reflections.
///
/// `L_i` is the saturation of the sum of the images of `σ − 1` over a component; the direct sum
/// of the `L_i` and the fixed part must map isomorphically onto `L̆` mod 2, and inputs where it
/// does not are reported as errors.
pub fn reflection_partition(c: &CompleteMarkedLattice) -> Result<Partition> {
    let parts = reflection_components(c);
    let mut loss = 0;
    let mut blocks = Vec::new();
    for part in &parts {
        let (b, l) = saturated_images(c, part)?;
        loss = loss.max(l);
        blocks.push(b);
    }
    let (fixed, l) = fixed_lattice(c)?;
    loss = loss.max(l);
    let mut all_parts = parts.clone();
    if !fixed.is_empty() {
        blocks.push(fixed.clone());
        all_parts.push(Vec::new());
    }
    let (mut factors, precision) = split_into(c, &blocks, &all_parts, loss)?;
    if !fixed.is_empty() {
        factors.pop();
    }
    Ok(Partition { factors, fixed_basis: fixed, precision })
}

/// The decomposition `(L̆₁, W₁) × (L_Δ, W_Δ)^m` that always exists: every DI(4) component splits
/// off, and everything else (Coxeter components and the fixed part) stays together in `L̆₁`.
#[derive(Clone, Debug)]
pub struct DI4Splitting {
    /// The part rationally of Coxeter type, `None` when it has rank 0.
    pub coxeter: Option<Factor>,
    pub di4: Vec<Factor>,
    pub precision: u32,
}

/// The restriction of `W` to the saturated image of a component.
fn component_factor(c: &CompleteMarkedLattice, part: &[usize]) -> Result<CompleteMarkedLattice> {
    let (basis, loss) = saturated_images(c, part)?;
    let n = c.rank();
    let k = c.precision();
    let kp = k.checked_sub(loss).filter(|&v| v >= 2).ok_or_else(|| Error::InsufficientPrecision("component".into()))?;
    let r = basis.len();
    // Complete the basis to one of L̆ so coordinates can be read off by inversion.
    let mut cols = basis.clone();
    for e in 0..n {
        if cols.len() == n {
            break;
        }
        let mut trial = cols.clone();
        trial.push((0..n).map(|i| (i == e) as u64).collect());
        let m2: Vec<Vec<u8>> = (0..n).map(|i| trial.iter().map(|col| (col[i] & 1) as u8).collect()).collect();
        if rank_mod2(&m2) == trial.len() {
            cols = trial;
        }
    }
    let q = columns_to_matrix(&cols, kp);
    let q_inv = q.inverse()?;
    let mut gens = Vec::new();
    let mut doubled: HashMap<TwoAdicMatrix, bool> = HashMap::new();
    for &p in part {
        let m = q_inv.mul(&c.group.element(c.reflections[p]).reduce(kp)?).mul(&q);
        let block = TwoAdicMatrix::from_residues(r, kp, (0..r).flat_map(|i| (0..r).map(move |j| (i, j))).map(|(i, j)| m.get(i, j)).collect());
        doubled.insert(block.clone(), c.markings[p].doubled);
        gens.push(block);
    }
    let group = Arc::new(MatrixGroup::generate(TwoAdicMatrix::identity(r, kp), &gens, 200_000)?);
    let g2 = group.clone();
    CompleteMarkedLattice::new(group, |e, _| doubled.get(g2.element(e)).copied().unwrap_or(false))
}

pub fn split_off_di4(c: &CompleteMarkedLattice) -> Result<DI4Splitting> {
    let parts = reflection_components(c);
    let mut rest = Vec::new();
    let mut di4_parts = Vec::new();
    for part in parts {
        if classify_factor(&component_factor(c, &part)?).ok() == Some(FactorTag::DI4) {
            di4_parts.push(part);
        } else {
            rest.extend(part);
        }
    }
    rest.sort_unstable();
    let mut loss = 0;
    let mut blocks = Vec::new();
    let mut all_parts = Vec::new();
    // L̆₁ = L̆ ∩ V₁, where V₁ is spanned by the remaining images and the fixed part.
    let (fixed, l) = fixed_lattice(c)?;
    loss = loss.max(l);
    let (rest_basis, l) = if rest.is_empty() { (Vec::new(), 0) } else { saturated_images(c, &rest)? };
    loss = loss.max(l);
    let mut coxeter_cols = rest_basis;
    coxeter_cols.extend(fixed);
    let has_coxeter = !coxeter_cols.is_empty();
    if has_coxeter {
        let k = c.precision();
        let n = c.rank();
        let rows: Vec<Vec<u64>> = (0..n).map(|i| coxeter_cols.iter().map(|col| col[i]).collect()).collect();
        let smith = smith_mod2k(&rows, coxeter_cols.len(), k);
        let r = smith.rank()?;
        loss = loss.max(smith.valuations[..r].iter().copied().max().unwrap_or(0));
        blocks.push(smith.saturated_image()?);
        all_parts.push(rest);
    }
    for part in &di4_parts {
        let (b, l) = saturated_images(c, part)?;
        loss = loss.max(l);
        blocks.push(b);
        all_parts.push(part.clone());
    }
    let (mut factors, precision) = split_into(c, &blocks, &all_parts, loss)?;
    let coxeter = if has_coxeter { Some(factors.remove(0)) } else { None };
    Ok(DI4Splitting { coxeter, di4: factors, precision })
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum FactorTag {
    Coxeter(String),
    DI4,
}

impl fmt::Display for FactorTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FactorTag::Coxeter(name) => write!(f, "Coxeter({name})"),
            FactorTag::DI4 => write!(f, "DI4"),
        }
    }
}

/// `(order, rank, reflections)` of an irreducible Weyl group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeylType {
    pub name: String,
    pub order: u128,
    pub rank: usize,
    pub reflections: usize,
}

fn factorial(n: u128) -> u128 {
    (1..=n).product()
}

/// Irreducible Weyl groups of the given rank. `B` stands for both `B` and `C`.
pub fn weyl_types(rank: usize) -> Vec<WeylType> {
    let r = rank as u128;
    let mut out = Vec::new();
    let mut push = |name: String, order: u128, reflections: usize| {
        out.push(WeylType { name, order, rank, reflections })
    };
    if rank >= 1 {
        push(format!("A{rank}"), factorial(r + 1), rank * (rank + 1) / 2);
    }
    if rank >= 2 {
        push(format!("B{rank}"), (1u128 << rank) * factorial(r), rank * rank);
    }
    if rank >= 4 {
        push(format!("D{rank}"), (1u128 << (rank - 1)) * factorial(r), rank * (rank - 1));
    }
    match rank {
        2 => push("G2".into(), 12, 6),
        4 => push("F4".into(), 1152, 24),
        6 => push("E6".into(), 51_840, 36),
        7 => push("E7".into(), 2_903_040, 63),
        8 => push("E8".into(), 696_729_600, 120),
        _ => {}
    }
    out
}

/// Tag an irreducible factor as DI(4) or as a Weyl group by its invariants.
pub fn classify_factor(f: &CompleteMarkedLattice) -> Result<FactorTag> {
    let order = f.group.order();
    let rank = f.rank();
    let gens: Vec<TwoAdicMatrix> = f.group.generators().iter().map(|&g| f.group.element(g).clone()).collect();
    if order == 336 && rank == 3 && mod2_image(&gens)?.order() == 168 && mod2_irreducible(&gens) {
        return Ok(FactorTag::DI4);
    }
    weyl_types(rank)
        .into_iter()
        .find(|t| t.order == order as u128 && t.reflections == f.reflections.len())
        .map(|t| FactorTag::Coxeter(t.name))
        .ok_or_else(|| {
            Error::Classification(format!(
                "no irreducible Weyl group of rank {rank} with order {order} and {} reflections",
                f.reflections.len()
            ))
        })
}

/// Partition and tag each factor.
pub fn classify(c: &CompleteMarkedLattice) -> Result<Vec<FactorTag>> {
    reflection_partition(c)?.factors.iter().map(|f| classify_factor(&f.lattice)).collect()
}

fn parse_type(name: &str) -> Result<(char, usize)> {
    let mut chars = name.chars();
    let kind = chars.next().ok_or_else(|| Error::UnknownEntry(name.into()))?;
    let n = chars.as_str().parse().map_err(|_| Error::UnknownEntry(name.into()))?;
    Ok((if kind == 'C' { 'B' } else { kind }, n))
}

fn int_to_residue(m: &IntMatrix, k: u32) -> TwoAdicMatrix {
    TwoAdicMatrix::from_int_matrix(m, k)
}

fn coxeter_order(a: &TwoAdicMatrix, b: &TwoAdicMatrix) -> usize {
    let ab = a.mul(b);
    let mut p = ab.clone();
    let mut m = 1;
    while !p.is_identity() && m <= 12 {
        p = p.mul(&ab);
        m += 1;
    }
    m
}

/// Reflections `t_i` of the factor satisfying the Coxeter relations of `simples` and
/// generating the whole factor group.
fn match_simples(f: &CompleteMarkedLattice, coxeter: &[Vec<usize>]) -> Option<Vec<usize>> {
    let r = coxeter.len();
    let refl: Vec<usize> = f.reflections.clone();
    let mut chosen: Vec<usize> = Vec::new();
    fn go(
        f: &CompleteMarkedLattice,
        refl: &[usize],
        coxeter: &[Vec<usize>],
        chosen: &mut Vec<usize>,
        r: usize,
    ) -> bool {
        if chosen.len() == r {
            let mats: Vec<TwoAdicMatrix> = chosen.iter().map(|&c| f.group.element(c).clone()).collect();
            let id = f.group.element(f.group.identity()).clone();
            return MatrixGroup::generate(id, &mats, f.group.order() + 1).map(|g| g.order()).ok() == Some(f.group.order());
        }
        let i = chosen.len();
        for &cand in refl {
            if chosen.contains(&cand) {
                continue;
            }
            let m = f.group.element(cand);
            if (0..i).all(|j| coxeter_order(f.group.element(chosen[j]), m) == coxeter[j][i]) {
                chosen.push(cand);
                if go(f, refl, coxeter, chosen, r) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    go(f, &refl, coxeter, &mut chosen, r).then_some(chosen)
}

/// Simultaneous breadth-first walk giving the isomorphism `s'_i ↦ t_i` on all elements, checked
/// to be a well-defined homomorphism.
fn word_isomorphism(
    source: &[IntMatrix],
    target: &[TwoAdicMatrix],
) -> Result<HashMap<IntMatrix, TwoAdicMatrix>> {
    let n = source[0].dim();
    let k = target[0].precision();
    let mut map = HashMap::from([(IntMatrix::identity(n), TwoAdicMatrix::identity(n, k))]);
    let mut queue = VecDeque::from([IntMatrix::identity(n)]);
    while let Some(a) = queue.pop_front() {
        let b = map[&a].clone();
        for (s, t) in source.iter().zip(target) {
            let a2 = a.mul(s);
            let b2 = b.mul(t);
            match map.get(&a2) {
                Some(existing) if *existing != b2 => {
                    return Err(Error::Classification("simple reflections do not define a homomorphism".into()))
                }
                Some(_) => {}
                None => {
                    map.insert(a2.clone(), b2);
                    queue.push_back(a2);
                }
            }
        }
    }
    Ok(map)
}

/// An integral marked reflection lattice `L` with `Z₂ ⊗ L ≅ L̆` for a Coxeter-type factor.
///
/// The catalog form `L'` of the same type is mapped into `L̆` by an intertwiner `X`, and `L` is
/// the pullback `X⁻¹(L̆)`, which contains `L'` with 2-power index.
pub fn coxeterize(f: &CompleteMarkedLattice, name: &str) -> Result<MarkedReflectionLattice> {
    let tag = classify_factor(f)?;
    let (kind, r) = parse_type(name)?;
    let expected = format!("{kind}{r}");
    if tag != FactorTag::Coxeter(expected.clone()) {
        return Err(Error::Classification(format!("factor is {tag}, not Coxeter({expected})")));
    }
    let k = f.precision();
    let cartan = cartan_matrix(kind, r)?;
    let unit: Vec<Vec<BigRational>> =
        (0..r).map(|j| (0..r).map(|i| if i == j { BigRational::one() } else { BigRational::zero() }).collect()).collect();
    let (_, simple_markings) = lattice_from_cartan(&cartan, &unit)?;
    let simples: Vec<IntMatrix> = simple_markings.iter().map(StrictMarking::reflection).collect();
    let coxeter: Vec<Vec<usize>> = (0..r)
        .map(|i| (0..r).map(|j| coxeter_order(&int_to_residue(&simples[i], k), &int_to_residue(&simples[j], k))).collect())
        .collect();
    let ts = match_simples(f, &coxeter).ok_or_else(|| Error::Classification("no simple system with the right Coxeter matrix".into()))?;
    let tmats: Vec<TwoAdicMatrix> = ts.iter().map(|&t| f.group.element(t).clone()).collect();

    // Intertwiner X with X·s'_i = t_i·X, unknowns X[a][b] in row-major order.
    let mut rows = Vec::new();
    for (s, t) in simples.iter().zip(&tmats) {
        let s2 = int_to_residue(s, k);
        for a in 0..r {
            for c in 0..r {
                let mut row = vec![0u64; r * r];
                for b in 0..r {
                    row[a * r + b] = row[a * r + b].wrapping_add(s2.get(b, c));
                    row[b * r + c] = row[b * r + c].wrapping_sub(t.get(a, b));
                }
                rows.push(row.into_iter().map(|x| x & mask(k)).collect::<Vec<_>>());
            }
        }
    }
    let smith = smith_mod2k(&rows, r * r, k);
    let rank = smith.rank()?;
    let loss = smith.valuations[..rank].iter().copied().max().unwrap_or(0);
    let kernel = smith.kernel()?;
    if kernel.len() != 1 {
        return Err(Error::Classification(format!("intertwiner space has rank {}", kernel.len())));
    }
    let k1 = k - loss;
    let x = TwoAdicMatrix::from_residues(r, k1, kernel[0].clone());

    // X⁻¹(L̆) is spanned by the columns of `right` scaled by 2^{-d_j}.
    let sx = smith_mod2k(&x.rows(), r, k1);
    if sx.rank()? != r {
        return Err(Error::Classification("intertwiner is singular".into()));
    }
    let dmax = sx.valuations.iter().copied().max().unwrap_or(0);
    let extra: Vec<Vec<BigRational>> = (0..r)
        .map(|j| {
            let den = BigInt::from(1u64) << sx.valuations[j];
            (0..r).map(|i| BigRational::new(BigInt::from(to_i64(sx.right[i][j], k1)), den.clone())).collect()
        })
        .collect();
    let basis = lattice_basis_with(r, &extra);
    let (integral, int_markings) = lattice_from_cartan(&cartan, &basis)?;

    // Y = X·B maps the new coordinates into L̆; check it is invertible and intertwines.
    let k2 = k1.checked_sub(dmax).filter(|&v| v >= 2).ok_or_else(|| {
        Error::InsufficientPrecision(format!("pullback needs {dmax} bits beyond the intertwiner precision {k1}"))
    })?;
    let scale = BigInt::from(1u64) << dmax;
    let mut y = vec![0u64; r * r];
    for a in 0..r {
        for b in 0..r {
            let mut s = 0u64;
            for (cidx, col) in basis[b].iter().enumerate() {
                let num = (col * BigRational::from_integer(scale.clone())).to_integer();
                let num = super::lattice::residue(&num, k1);
                s = s.wrapping_add(x.get(a, cidx).wrapping_mul(num));
            }
            let s = s & mask(k1);
            if s & ((1u64 << dmax) - 1) != 0 {
                return Err(Error::Assertion("pullback basis is not integral over Z₂".into()));
            }
            y[a * r + b] = s >> dmax;
        }
    }
    let y = TwoAdicMatrix::from_residues(r, k2, y);
    let y_inv = y.inverse().map_err(|_| Error::Assertion("Z₂ ⊗ L does not map onto L̆".into()))?;
    let int_simple_mats: Vec<IntMatrix> = int_markings.iter().map(StrictMarking::reflection).collect();
    let iso = word_isomorphism(&int_simple_mats, &tmats.iter().map(|t| t.reduce(k2)).collect::<Result<Vec<_>>>()?)?;
    if iso.len() != f.group.order() {
        return Err(Error::Assertion("integral and 2-adic groups have different orders".into()));
    }
    for (a, b) in &iso {
        if y.mul(&int_to_residue(a, k2)).mul(&y_inv) != *b {
            return Err(Error::Assertion("Y does not intertwine the two actions".into()));
        }
    }

    // Markings: the same kind (b₀ or 2b₀) as the corresponding 2-adic reflection.
    let factor_doubled: HashMap<TwoAdicMatrix, bool> = f
        .reflections
        .iter()
        .zip(&f.markings)
        .map(|(&e, m)| (f.group.element(e).reduce(k2).expect("k2 ≤ k"), m.doubled))
        .collect();
    let mut given = Vec::new();
    for &e in &integral.reflections {
        let m = integral.group.element(e);
        let doubled = *factor_doubled.get(&iso[m]).ok_or_else(|| Error::Assertion("reflection not matched".into()))?;
        let options = markings_of(&Reflection::new(m.clone())?);
        let pick = if doubled { options.get(1) } else { options.first() };
        given.push(pick.cloned().ok_or_else(|| Error::Assertion("marking kinds disagree mod 2".into()))?);
    }
    MarkedReflectionLattice::from_markings(integral.group.clone(), &given)
}

/// Group elements of a factor as a plain list, for reporting.
pub fn factor_group(f: &Factor) -> &Arc<TwoAdicGroup> {
    &f.lattice.group
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::build_entry;
    use crate::twoadic::{di4_data, promote};

    fn promoted(name: &str, k: u32) -> CompleteMarkedLattice {
        promote(&build_entry(name).unwrap().lattice, k).unwrap()
    }

    #[test]
    fn weyl_table() {
        let names: Vec<String> = weyl_types(4).into_iter().map(|t| t.name).collect();
        assert_eq!(names, ["A4", "B4", "D4", "F4"]);
        assert_eq!(weyl_types(2)[2].order, 12);
    }

    #[test]
    fn partitions() {
        assert_eq!(reflection_partition(&promoted("Spin(5)", 12)).unwrap().ranks(), vec![2]);
        assert_eq!(reflection_partition(&promoted("SU(2)xSU(2)", 12)).unwrap().ranks(), vec![1, 1]);
        let so3xu1 = CompleteMarkedLattice::block_sum(&[&promoted("SO(3)", 12), &trivial_rank_one(12)]).unwrap();
        let p = reflection_partition(&so3xu1).unwrap();
        assert_eq!((p.ranks(), p.fixed_basis.len()), (vec![1], 1));
        // U(2) is not a product of its reflection part and its fixed part.
        let u2 = promoted("U(2)", 12);
        assert!(matches!(reflection_partition(&u2), Err(Error::Classification(_))));
        let s = split_off_di4(&u2).unwrap();
        assert!(s.di4.is_empty());
        assert_eq!(s.coxeter.unwrap().rank(), 2);
        let di4 = di4_data(12).unwrap().lattice().unwrap();
        let sum = CompleteMarkedLattice::block_sum(&[&di4, &promoted("Spin(5)", 12)]).unwrap();
        let mut ranks = reflection_partition(&sum).unwrap().ranks();
        ranks.sort_unstable();
        assert_eq!(ranks, vec![2, 3]);
        let s = split_off_di4(&sum).unwrap();
        assert_eq!(s.di4.len(), 1);
        assert_eq!(s.coxeter.unwrap().rank(), 2);
    }

    fn trivial_rank_one(k: u32) -> CompleteMarkedLattice {
        let g = MatrixGroup::generate(TwoAdicMatrix::identity(1, k), &[], 2).unwrap();
        CompleteMarkedLattice::new(Arc::new(g), |_, _| false).unwrap()
    }

    #[test]
    fn tags() {
        assert_eq!(classify_factor(&promoted("G2", 12)).unwrap(), FactorTag::Coxeter("G2".into()));
        assert_eq!(classify_factor(&promoted("Spin(7)", 12)).unwrap(), FactorTag::Coxeter("B3".into()));
        assert_eq!(classify_factor(&di4_data(12).unwrap().lattice().unwrap()).unwrap(), FactorTag::DI4);
    }

    #[test]
    fn coxeterize_rank_one() {
        for name in ["SU(2)", "SO(3)"] {
            let e = build_entry(name).unwrap();
            let back = coxeterize(&promoted(name, 12), "A1").unwrap();
            assert_eq!(back, e.lattice, "{name}");
        }
        assert!(coxeterize(&promoted("SU(2)", 12), "B2").is_err());
    }

    #[test]
    fn coxeterize_conjugated_b2() {
        let c = promoted("Spin(5)", 16);
        let p = TwoAdicMatrix::from_rows(&[vec![1, 2], vec![0, 3]], 16).unwrap();
        let pi = p.inverse().unwrap();
        let gens: Vec<TwoAdicMatrix> =
            c.group.generators().iter().map(|&g| pi.mul(c.group.element(g)).mul(&p)).collect();
        let group = Arc::new(MatrixGroup::generate(TwoAdicMatrix::identity(2, 16), &gens, 100).unwrap());
        let conj = CompleteMarkedLattice::new(group, |_, _| false).unwrap();
        let z = coxeterize(&conj, "B2").unwrap();
        assert_eq!(z.group.order(), 8);
        assert_eq!(z.reflections.len(), 4);
    }

    #[test]
    fn di4_b2_a1_at_several_precisions() {
        let mut outputs = Vec::new();
        for k in [8, 12, 16] {
            let di4 = di4_data(k).unwrap().lattice().unwrap();
            let sum = CompleteMarkedLattice::block_sum(&[&di4, &promoted("Spin(5)", k), &promoted("SU(2)", k)]).unwrap();
            assert_eq!(sum.group.order(), 336 * 8 * 2);
            let mut tags = classify(&sum).unwrap();
            tags.sort();
            outputs.push(tags);
        }
        let expected = vec![FactorTag::Coxeter("A1".into()), FactorTag::Coxeter("B2".into()), FactorTag::DI4];
        assert!(outputs.iter().all(|t| *t == expected), "{outputs:?}");
    }
}

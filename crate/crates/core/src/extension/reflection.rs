use std::collections::VecDeque;
use std::sync::Arc;

use num_traits::ToPrimitive;
use serde::Serialize;

use super::cocycle::ExtensionCocycle;
use super::module::Module;
use crate::coxeter::SimpleSystem;
use crate::lattice::{reflection_indices, FiniteMatrixGroup, GroupTable, IntMatrix, Reflection};
use crate::{Error, Result};

/// Word lengths with respect to a generating set, by breadth-first search.
pub fn word_lengths(table: &GroupTable, generators: &[usize]) -> Vec<u32> {
    let mut len = vec![u32::MAX; table.order()];
    len[table.identity()] = 0;
    let mut queue = VecDeque::from([table.identity()]);
    while let Some(g) = queue.pop_front() {
        for &s in generators {
            let h = table.mul(g, s);
            if len[h] == u32::MAX {
                len[h] = len[g] + 1;
                queue.push_back(h);
            }
        }
    }
    len
}

/// Left cosets `G/H` with a fixed transversal.
#[derive(Clone, Debug)]
pub struct CosetSpace {
    pub subgroup: Vec<usize>,
    /// `reps[x]` is the chosen representative of coset `x`; the coset of `H` itself has representative `e`.
    pub reps: Vec<usize>,
    /// Coset label of every group element.
    pub coset_of: Vec<u32>,
}

impl CosetSpace {
    /// Cosets labelled in the order of their representatives; representatives minimize `(length, index)`.
    pub fn new(table: &GroupTable, subgroup: &[usize], lengths: &[u32]) -> Self {
        let n = table.order();
        let mut label = vec![u32::MAX; n];
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for g in 0..n {
            if label[g] != u32::MAX {
                continue;
            }
            let id = groups.len() as u32;
            let coset: Vec<usize> = subgroup.iter().map(|&h| table.mul(g, h)).collect();
            for &x in &coset {
                label[x] = id;
            }
            groups.push(coset);
        }
        let reps: Vec<usize> = groups.iter().map(|c| *c.iter().min_by_key(|&&g| (lengths[g], g)).unwrap()).collect();
        let mut order: Vec<usize> = (0..reps.len()).collect();
        order.sort_by_key(|&i| (lengths[reps[i]], reps[i]));
        let mut relabel = vec![0u32; reps.len()];
        for (new, &old) in order.iter().enumerate() {
            relabel[old] = new as u32;
        }
        Self::with_labels(table, subgroup, lengths, label.iter().map(|&l| relabel[l as usize]).collect())
    }

    /// Cosets with externally chosen labels (constant on cosets, `0..index`).
    pub fn with_labels(table: &GroupTable, subgroup: &[usize], lengths: &[u32], labels: Vec<u32>) -> Self {
        let index = labels.iter().map(|&l| l as usize + 1).max().unwrap_or(0);
        let mut reps = vec![usize::MAX; index];
        for g in 0..table.order() {
            let x = labels[g] as usize;
            if reps[x] == usize::MAX || (lengths[g], g) < (lengths[reps[x]], reps[x]) {
                reps[x] = g;
            }
        }
        let mut subgroup = subgroup.to_vec();
        subgroup.sort_unstable();
        CosetSpace { subgroup, reps, coset_of: labels }
    }

    pub fn index(&self) -> usize {
        self.reps.len()
    }

    /// The coset of `H` itself.
    pub fn base(&self) -> usize {
        self.coset_of[self.reps.iter().copied().find(|&r| self.subgroup.binary_search(&r).is_ok()).unwrap_or(0)] as usize
    }

    /// `g·x`.
    pub fn act(&self, table: &GroupTable, g: usize, x: usize) -> usize {
        self.coset_of[table.mul(g, self.reps[x])] as usize
    }

    /// `h(g, x) = t(gx)⁻¹·g·t(x) ∈ H`.
    pub fn h(&self, table: &GroupTable, g: usize, x: usize) -> usize {
        let gx = self.act(table, g, x);
        table.mul(table.inv(self.reps[gx]), table.mul(g, self.reps[x]))
    }

    pub fn permutation(&self, table: &GroupTable) -> Vec<Vec<u32>> {
        (0..table.order()).map(|g| (0..self.index()).map(|x| self.act(table, g, x) as u32).collect()).collect()
    }
}

/// `C_i = ⟨t_i⟩ × C_i^⊥` for a reflection `t_i`.
#[derive(Clone, Debug, Serialize)]
pub struct CentralizerSplitting {
    pub class_rep: usize,
    /// Canonical generator `a_i` of `ker(1 + t_i)`.
    pub witness: Vec<i64>,
    pub centralizer: Vec<usize>,
    pub perp: Vec<usize>,
}

/// Decompose the centralizer of a reflection; `sign(c)` reports whether `c ∈ C_i` negates `a_i`
/// (`None` if it sends `a_i` elsewhere).
pub fn centralizer_splitting_with<F>(table: &GroupTable, rep: usize, witness: Vec<i64>, sign: F) -> Result<CentralizerSplitting>
where
    F: Fn(usize) -> Option<bool>,
{
    let centralizer = table.centralizer(rep);
    let mut perp = Vec::new();
    for &c in &centralizer {
        match sign(c) {
            Some(false) => perp.push(c),
            Some(true) => {}
            None => return Err(Error::Assertion(format!("centralizer element {c} does not preserve ±a_i"))),
        }
    }
    if sign(rep) != Some(true) {
        return Err(Error::Assertion("t_i does not negate a_i".into()));
    }
    if centralizer.len() != 2 * perp.len() {
        return Err(Error::Assertion("C_i^⊥ is not of index 2".into()));
    }
    let closed = perp.iter().all(|&a| perp.iter().all(|&b| perp.binary_search(&table.mul(a, b)).is_ok()));
    if !closed {
        return Err(Error::Assertion("C_i^⊥ is not a subgroup".into()));
    }
    Ok(CentralizerSplitting { class_rep: rep, witness, centralizer, perp })
}

fn matrix_rows_i64(m: &IntMatrix) -> Vec<i64> {
    m.entries().iter().map(|x| x.to_i64().expect("small matrix entry")).collect()
}

fn apply_i64(m: &[i64], v: &[i64]) -> Vec<i64> {
    let n = v.len();
    (0..n).map(|i| (0..n).map(|j| m[i * n + j] * v[j]).sum()).collect()
}

/// Integral version: `a_i` is the canonical generator of `ker(1 + σ)`.
pub fn centralizer_splitting(group: &FiniteMatrixGroup, rep: usize) -> Result<CentralizerSplitting> {
    let sigma = Reflection::new(group.element(rep).clone())?;
    let a: Vec<i64> = sigma.root_generator().iter().map(|x| x.to_i64().expect("small root")).collect();
    let neg: Vec<i64> = a.iter().map(|x| -x).collect();
    let a2 = a.clone();
    centralizer_splitting_with(group.table(), rep, a, move |c| {
        let v = apply_i64(&matrix_rows_i64(group.element(c)), &a2);
        if v == a2 {
            Some(false)
        } else if v == neg {
            Some(true)
        } else {
            None
        }
    })
}

#[derive(Clone, Debug)]
pub struct ReflectionClass {
    pub splitting: CentralizerSplitting,
    /// Reflections in the class, in element order; member `x` corresponds to the coset `x` of `C_i`.
    pub members: Vec<usize>,
    /// Positions of the members in the full reflection list.
    pub positions: Vec<usize>,
    pub cosets: CosetSpace,
    /// `negates[g]` for `g ∈ C_i`: whether `g` negates `a_i`.
    pub negates: Vec<bool>,
}

/// Reflections of a finite group, split into conjugacy classes with their centralizer data.
#[derive(Clone, Debug)]
pub struct ReflectionData {
    pub table: Arc<GroupTable>,
    pub generators: Vec<usize>,
    pub reflections: Vec<usize>,
    pub lengths: Vec<u32>,
    pub classes: Vec<ReflectionClass>,
    /// `position[g]` is the index of `g` in `reflections`, or `u32::MAX`.
    pub position: Vec<u32>,
}

impl ReflectionData {
    /// Build from the group table, a list of reflections and, per class representative, its splitting.
    pub fn from_splittings<F>(table: Arc<GroupTable>, generators: Vec<usize>, reflections: Vec<usize>, mut split: F) -> Result<Self>
    where
        F: FnMut(usize) -> Result<CentralizerSplitting>,
    {
        let n = table.order();
        let lengths = word_lengths(&table, &generators);
        if lengths.contains(&u32::MAX) {
            return Err(Error::Assertion("generators do not generate the group".into()));
        }
        let mut position = vec![u32::MAX; n];
        for (i, &r) in reflections.iter().enumerate() {
            position[r] = i as u32;
        }
        let mut seen = vec![false; reflections.len()];
        let mut classes = Vec::new();
        for (i, &rep) in reflections.iter().enumerate() {
            if seen[i] {
                continue;
            }
            let members = table.conjugacy_class(rep);
            let mut positions = Vec::with_capacity(members.len());
            for &m in &members {
                let p = position[m];
                if p == u32::MAX {
                    return Err(Error::Assertion("conjugate of a reflection missing from the list".into()));
                }
                seen[p as usize] = true;
                positions.push(p as usize);
            }
            let splitting = split(rep)?;
            let labels: Vec<u32> = (0..n)
                .map(|g| members.binary_search(&table.conj(g, rep)).expect("class member") as u32)
                .collect();
            let cosets = CosetSpace::with_labels(&table, &splitting.centralizer, &lengths, labels);
            let mut negates = vec![false; n];
            let perp = &splitting.perp;
            for &c in &splitting.centralizer {
                negates[c] = perp.binary_search(&c).is_err();
            }
            classes.push(ReflectionClass { splitting, members, positions, cosets, negates });
        }
        Ok(ReflectionData { table, generators, reflections, lengths, classes, position })
    }

    pub fn from_group(group: &Arc<FiniteMatrixGroup>, generators: Vec<usize>) -> Result<Self> {
        let reflections = reflection_indices(group);
        let g = group.clone();
        Self::from_splittings(group.table().clone(), generators, reflections, move |rep| centralizer_splitting(&g, rep))
    }

    /// Generators and lengths taken from a simple system.
    pub fn from_simple_system(ss: &SimpleSystem) -> Result<Self> {
        Self::from_group(&ss.group, ss.simple_indices.clone())
    }

    pub fn len(&self) -> usize {
        self.reflections.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reflections.is_empty()
    }

    /// Conjugation permutation of `Σ`.
    pub fn permutation(&self) -> Vec<Vec<u32>> {
        let t = &self.table;
        (0..t.order())
            .map(|g| self.reflections.iter().map(|&r| self.position[t.conj(g, r)]).collect())
            .collect()
    }

    /// `Z[Σ]` with the conjugation action.
    pub fn sigma_module(&self) -> Module {
        Module::permutation(self.len(), Arc::new(self.permutation()), "Z[Σ]")
    }

    /// `c_ρ(g₁, g₂)`.
    pub fn rho_value(&self, g1: usize, g2: usize) -> Vec<i64> {
        let t = &self.table;
        let mut out = vec![0i64; self.len()];
        for class in &self.classes {
            let cs = &class.cosets;
            for x in 0..cs.index() {
                let x2 = cs.act(t, g2, x);
                let h2 = cs.h(t, g2, x);
                if !class.negates[h2] {
                    continue;
                }
                let h1 = cs.h(t, g1, x2);
                if class.negates[h1] {
                    out[class.positions[cs.act(t, g1, x2)]] += 1;
                }
            }
        }
        out
    }
}

/// The reflection extension `ρ(W)` as a cocycle over `Z[Σ]`: the sum over classes of the
/// sign class of `C_i → ⟨t_i⟩`, induced up to `W`.
pub fn reflection_extension(data: &Arc<ReflectionData>) -> ExtensionCocycle {
    let d = data.clone();
    ExtensionCocycle::from_fn(data.table.clone(), data.generators.clone(), data.sigma_module(), move |a, b| d.rho_value(a, b))
}

/// Induce an integral `H`-cocycle `k` (on `H` given by `G`-indices) to a cocycle over `Z[G/H]`.
pub fn induce<F>(table: Arc<GroupTable>, generators: Vec<usize>, cosets: Arc<CosetSpace>, k: F) -> ExtensionCocycle
where
    F: Fn(usize, usize) -> i64 + Send + Sync + 'static,
{
    let module = Module::permutation(cosets.index(), Arc::new(cosets.permutation(&table)), "Z[G/H]");
    let t = table.clone();
    ExtensionCocycle::from_fn(table, generators, module, move |g1, g2| {
        let mut out = vec![0i64; cosets.index()];
        for x in 0..cosets.index() {
            let x2 = cosets.act(&t, g2, x);
            let v = k(cosets.h(&t, g1, x2), cosets.h(&t, g2, x));
            if v != 0 {
                out[cosets.act(&t, g1, x2)] += v;
            }
        }
        out
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::build_entry;
    use crate::coxeter::find_simple_system;
    use crate::extension::cocycle::{split_check, CheckPlan};

    fn data(name: &str) -> (Arc<FiniteMatrixGroup>, Arc<ReflectionData>) {
        let entry = build_entry(name).unwrap();
        let g = entry.lattice.group.clone();
        let ss = find_simple_system(&g).unwrap();
        (g, Arc::new(ReflectionData::from_simple_system(&ss).unwrap()))
    }

    #[test]
    fn centralizers() {
        let (g, d) = data("SU(2)");
        assert_eq!(d.classes.len(), 1);
        assert_eq!(d.classes[0].splitting.centralizer.len(), g.order());
        assert_eq!(d.classes[0].splitting.perp.len(), 1);

        let (_, d) = data("SU(3)");
        assert_eq!(d.classes.len(), 1);
        assert_eq!(d.classes[0].splitting.centralizer.len(), 2);
        assert_eq!(d.classes[0].splitting.perp.len(), 1);

        // W(B2): each reflection commutes with exactly one perpendicular reflection.
        let (g, d) = data("Spin(5)");
        assert_eq!(d.classes.len(), 2);
        for class in &d.classes {
            let s = &class.splitting;
            assert_eq!(s.centralizer.len(), 4);
            assert_eq!(s.perp.len(), 2);
            let other = s.perp.iter().copied().find(|&p| p != g.identity()).unwrap();
            assert!(d.position[other] != u32::MAX, "C^⊥ is generated by a reflection");
        }
    }

    #[test]
    fn rho_a1() {
        let (g, d) = data("SU(2)");
        let c = reflection_extension(&d);
        let s = d.reflections[0];
        assert_eq!(c.value(s, s), vec![1]);
        assert_eq!(c.value(g.identity(), s), vec![0]);
        assert!(!split_check(&c).unwrap().split);
    }

    #[test]
    fn rho_is_a_cocycle() {
        for name in ["SU(3)", "Spin(5)", "G2", "SU(4)"] {
            let (_, d) = data(name);
            let rep = reflection_extension(&d).check_identity(CheckPlan::Exhaustive);
            assert!(rep.passed(), "{name}: {:?}", rep.failures);
        }
    }

    #[test]
    fn coset_transversal() {
        let (_, d) = data("Spin(5)");
        for class in &d.classes {
            let cs = &class.cosets;
            assert_eq!(cs.index(), class.members.len());
            let base = cs.base();
            assert_eq!(cs.reps[base], d.table.identity());
            for x in 0..cs.index() {
                assert_eq!(d.table.conj(cs.reps[x], class.splitting.class_rep), class.members[x]);
            }
        }
    }

    #[test]
    fn induce_trivial_and_whole_group() {
        let (_, d) = data("SU(3)");
        let t = d.table.clone();
        let n = t.order();
        let all: Vec<usize> = (0..n).collect();
        let lengths = d.lengths.clone();
        let whole = Arc::new(CosetSpace::new(&t, &all, &lengths));
        assert_eq!(whole.index(), 1);
        let zero = induce(t.clone(), d.generators.clone(), whole, |_, _| 0);
        assert!((0..n).all(|a| (0..n).all(|b| zero.value(a, b) == vec![0])));
    }
}

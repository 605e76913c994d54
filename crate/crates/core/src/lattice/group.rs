use std::collections::HashMap;
use std::hash::Hash;
use std::sync::{Arc, OnceLock};

use super::matrix::IntMatrix;
use crate::error::{Error, Result};

pub const DEFAULT_CAP: usize = 2_000_000;

pub trait GroupElement: Clone + Eq + Hash + Ord + Send + Sync {
    fn compose(&self, other: &Self) -> Self;
}

impl GroupElement for IntMatrix {
    fn compose(&self, other: &Self) -> Self {
        self.mul(other)
    }
}

/// Cayley table of a finite group on indices `0..order`.
#[derive(Clone, Debug)]
pub struct GroupTable {
    order: usize,
    identity: usize,
    mul: Vec<u32>,
    inv: Vec<u32>,
}

impl GroupTable {
    pub fn from_mul(order: usize, identity: usize, mul: Vec<u32>) -> Self {
        let mut inv = vec![0u32; order];
        for (g, slot) in inv.iter_mut().enumerate() {
            let row = &mul[g * order..(g + 1) * order];
            *slot = row.iter().position(|&x| x as usize == identity).expect("group has inverses") as u32;
        }
        GroupTable { order, identity, mul, inv }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a] as usize
    }

    /// `g·x·g⁻¹`
    #[inline]
    pub fn conj(&self, g: usize, x: usize) -> usize {
        self.mul(self.mul(g, x), self.inv(g))
    }

    pub fn product(&self, word: impl IntoIterator<Item = usize>) -> usize {
        word.into_iter().fold(self.identity, |acc, g| self.mul(acc, g))
    }

    pub fn element_order(&self, g: usize) -> usize {
        let mut x = g;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, g);
            k += 1;
        }
        k
    }

    /// Sorted elements of the subgroup generated by `gens`.
    pub fn generated(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.order];
        seen[self.identity] = true;
        let mut stack = vec![self.identity];
        while let Some(x) = stack.pop() {
            for &g in gens {
                let y = self.mul(x, g);
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        (0..self.order).filter(|&i| seen[i]).collect()
    }

    pub fn centralizer(&self, x: usize) -> Vec<usize> {
        (0..self.order).filter(|&g| self.mul(g, x) == self.mul(x, g)).collect()
    }

    pub fn conjugacy_class(&self, x: usize) -> Vec<usize> {
        let mut c: Vec<usize> = (0..self.order).map(|g| self.conj(g, x)).collect();
        c.sort_unstable();
        c.dedup();
        c
    }

    pub fn is_associative_sample(&self) -> bool {
        let n = self.order;
        let step = (n / 17).max(1);
        (0..n).step_by(step).all(|a| {
            (0..n).step_by(step).all(|b| {
                (0..n).step_by(step).all(|c| self.mul(self.mul(a, b), c) == self.mul(a, self.mul(b, c)))
            })
        })
    }
}

/// A finite group of matrices with deterministic (sorted) element order.
pub struct MatrixGroup<M: GroupElement> {
    elements: Vec<M>,
    index: HashMap<M, usize>,
    generators: Vec<usize>,
    identity: usize,
    /// `right_mul[g * ngens + j] = g · generators[j]`
    right_mul: Vec<u32>,
    /// Breadth-first discovery order and the `(parent, generator)` edge reaching each element.
    bfs_order: Vec<u32>,
    bfs_parent: Vec<(u32, u32)>,
    table: OnceLock<Arc<GroupTable>>,
}

pub type FiniteMatrixGroup = MatrixGroup<IntMatrix>;

impl<M: GroupElement> MatrixGroup<M> {
    pub fn generate(identity: M, gens: &[M], cap: usize) -> Result<Self> {
        let mut gens_dedup: Vec<M> = Vec::new();
        for g in gens {
            if !gens_dedup.contains(g) {
                gens_dedup.push(g.clone());
            }
        }
        let ng = gens_dedup.len();
        let mut elements = vec![identity.clone()];
        let mut index: HashMap<M, usize> = HashMap::from([(identity, 0)]);
        let mut parent = vec![(0u32, u32::MAX)];
        let mut right = Vec::new();
        let mut i = 0;
        while i < elements.len() {
            for (j, g) in gens_dedup.iter().enumerate() {
                let p = elements[i].compose(g);
                let k = match index.get(&p) {
                    Some(&k) => k,
                    None => {
                        let k = elements.len();
                        if k >= cap {
                            return Err(Error::CapExceeded(cap));
                        }
                        index.insert(p.clone(), k);
                        elements.push(p);
                        parent.push((i as u32, j as u32));
                        k
                    }
                };
                right.push(k as u32);
            }
            i += 1;
        }
        let n = elements.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| elements[a].cmp(&elements[b]));
        let mut new_of_old = vec![0u32; n];
        for (new, &old) in order.iter().enumerate() {
            new_of_old[old] = new as u32;
        }
        let mut sorted = Vec::with_capacity(n);
        let mut right_mul = vec![0u32; n * ng];
        let mut bfs_parent = vec![(0u32, 0u32); n];
        for (new, &old) in order.iter().enumerate() {
            sorted.push(elements[old].clone());
            for j in 0..ng {
                right_mul[new * ng + j] = new_of_old[right[old * ng + j] as usize];
            }
            let (p, j) = parent[old];
            bfs_parent[new] = (new_of_old[p as usize], j);
        }
        let bfs_order: Vec<u32> = (0..n).map(|old| new_of_old[old]).collect();
        let index = sorted.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect::<HashMap<_, _>>();
        let generators = gens_dedup.iter().map(|g| index[g]).collect();
        let identity = new_of_old[0] as usize;
        Ok(MatrixGroup {
            elements: sorted,
            index,
            generators,
            identity,
            right_mul,
            bfs_order,
            bfs_parent,
            table: OnceLock::new(),
        })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[M] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &M {
        &self.elements[i]
    }

    pub fn index_of(&self, m: &M) -> Option<usize> {
        self.index.get(m).copied()
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    /// Cayley table, built on first use from the breadth-first spanning tree.
    pub fn table(&self) -> &Arc<GroupTable> {
        self.table.get_or_init(|| {
            let n = self.order();
            let ng = self.generators.len();
            let mut mul = vec![0u32; n * n];
            for g in 0..n {
                let row = &mut mul[g * n..(g + 1) * n];
                for &h in &self.bfs_order {
                    let h = h as usize;
                    if h == self.identity {
                        row[h] = g as u32;
                    } else {
                        let (p, j) = self.bfs_parent[h];
                        let gp = row[p as usize] as usize;
                        row[h] = self.right_mul[gp * ng + j as usize];
                    }
                }
            }
            Arc::new(GroupTable::from_mul(n, self.identity, mul))
        })
    }

    /// Subgroup generated by the given elements, with its embedding into this group.
    pub fn subgroup(&self, gens: &[usize]) -> Result<(MatrixGroup<M>, Vec<usize>)> {
        let mats: Vec<M> = gens.iter().map(|&g| self.elements[g].clone()).collect();
        let sub = MatrixGroup::generate(self.elements[self.identity].clone(), &mats, self.order() + 1)?;
        let embedding = sub.elements.iter().map(|m| self.index[m]).collect();
        Ok((sub, embedding))
    }
}

impl FiniteMatrixGroup {
    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }

    pub fn from_generators(dim: usize, gens: &[IntMatrix], cap: usize) -> Result<Self> {
        for g in gens {
            if g.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: g.dim() });
            }
            if !g.is_unimodular() {
                return Err(Error::NotInvertible(g.determinant()));
            }
        }
        MatrixGroup::generate(IntMatrix::identity(dim), gens, cap)
    }
}

pub fn generate_group(dim: usize, gens: &[IntMatrix], cap: usize) -> Result<FiniteMatrixGroup> {
    FiniteMatrixGroup::from_generators(dim, gens, cap)
}

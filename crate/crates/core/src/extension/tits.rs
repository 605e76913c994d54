use std::sync::Arc;

use serde::Serialize;

use super::cocycle::{cohomologous, Cochain, ExtensionCocycle};
use super::reflection::{reflection_extension, ReflectionData};
use crate::coxeter::{SimpleSystem, Word};
use crate::{Error, Result};

/// An element `(a, w)` of `Z[Σ*] ⋊ W`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SemidirectElement {
    pub vec: Vec<i64>,
    pub part: usize,
}

/// `Z[Σ*] ⋊ W` with the conjugation action on `Σ*`.
#[derive(Clone, Debug)]
pub struct TitsContext {
    pub data: Arc<ReflectionData>,
    perm: Arc<Vec<Vec<u32>>>,
}

impl TitsContext {
    pub fn new(data: Arc<ReflectionData>) -> Self {
        let perm = Arc::new(data.permutation());
        TitsContext { data, perm }
    }

    pub fn identity(&self) -> SemidirectElement {
        SemidirectElement { vec: vec![0; self.data.len()], part: self.data.table.identity() }
    }

    pub fn act(&self, w: usize, v: &[i64]) -> Vec<i64> {
        let mut out = vec![0; v.len()];
        for (i, &x) in v.iter().enumerate() {
            out[self.perm[w][i] as usize] += x;
        }
        out
    }

    /// `(a,w)(b,v) = (a + w·b, wv)`.
    pub fn mul(&self, x: &SemidirectElement, y: &SemidirectElement) -> SemidirectElement {
        let moved = self.act(x.part, &y.vec);
        SemidirectElement {
            vec: x.vec.iter().zip(&moved).map(|(a, b)| a + b).collect(),
            part: self.data.table.mul(x.part, y.part),
        }
    }

    pub fn inv(&self, x: &SemidirectElement) -> SemidirectElement {
        let wi = self.data.table.inv(x.part);
        SemidirectElement { vec: self.act(wi, &x.vec).into_iter().map(|a| -a).collect(), part: wi }
    }

    /// `σ*` for the reflection with element index `r`.
    pub fn star(&self, r: usize) -> Vec<i64> {
        let mut v = vec![0; self.data.len()];
        v[self.data.position[r] as usize] = 1;
        v
    }
}

/// The generators `(s_i*, s_i)` of `τ(W)`.
pub fn tits_subgroup(ctx: &TitsContext, ss: &SimpleSystem) -> Vec<SemidirectElement> {
    ss.simple_indices.iter().map(|&s| SemidirectElement { vec: ctx.star(s), part: s }).collect()
}

/// `a(𝐢)` computed by multiplying generators and by the closed formula `(Σ σ_k*, r(𝐢))`;
/// the two must agree.
pub fn tits_word_element(ctx: &TitsContext, ss: &SimpleSystem, w: &Word) -> Result<SemidirectElement> {
    let gens = tits_subgroup(ctx, ss);
    let product = w.letters().iter().fold(ctx.identity(), |acc, &i| ctx.mul(&acc, &gens[i]));
    let closed = closed_formula(ctx, ss, w);
    if product != closed {
        return Err(Error::Assertion(format!("Tits word {w}: product and closed formula differ")));
    }
    Ok(product)
}

fn closed_formula(ctx: &TitsContext, ss: &SimpleSystem, w: &Word) -> SemidirectElement {
    let mut vec = vec![0; ctx.data.len()];
    for r in ss.reflection_sequence_indices(w) {
        vec[ctx.data.position[r] as usize] += 1;
    }
    SemidirectElement { vec, part: ss.word_element(w) }
}

/// `z(w₁,w₂) = s(w₁)s(w₂)s(w₁w₂)⁻¹` for the section through lexicographically first minimal
/// words, halved from `2Z[Σ*]` to `Z[Σ]`.
pub fn tits_cocycle(ctx: &TitsContext, ss: &SimpleSystem) -> Result<ExtensionCocycle> {
    let t = ctx.data.table.clone();
    let n = t.order();
    let sections: Vec<Vec<i64>> = (0..n).map(|g| closed_formula(ctx, ss, &ss.lexfirst_word(g)).vec).collect();
    let r = ctx.data.len();
    let mut values = Vec::with_capacity(n * n * r);
    for a in 0..n {
        for b in 0..n {
            let moved = ctx.act(a, &sections[b]);
            let ab = t.mul(a, b);
            for i in 0..r {
                let z = sections[a][i] + moved[i] - sections[ab][i];
                if z % 2 != 0 {
                    return Err(Error::Assertion(format!("Tits cocycle value outside 2Z[Σ*] at ({a},{b})")));
                }
                values.push(z / 2);
            }
        }
    }
    ExtensionCocycle::from_dense(t, ctx.data.generators.clone(), ctx.data.sigma_module(), values)
}

/// The unhalved values `s(w₁)s(w₂)s(w₁w₂)⁻¹`, for inspection.
pub fn tits_kernel_element(ctx: &TitsContext, ss: &SimpleSystem, a: usize, b: usize) -> SemidirectElement {
    let s = |g: usize| closed_formula(ctx, ss, &ss.lexfirst_word(g));
    let ab = ctx.data.table.mul(a, b);
    ctx.mul(&ctx.mul(&s(a), &s(b)), &ctx.inv(&s(ab)))
}

/// A cochain witnessing that `ρ(W)` and `τ(W)` are cohomologous.
pub fn tits_vs_reflection(ctx: &TitsContext, ss: &SimpleSystem) -> Result<Cochain> {
    let rho = reflection_extension(&ctx.data);
    let tau = tits_cocycle(ctx, ss)?;
    cohomologous(&rho, &tau)?.ok_or_else(|| Error::Assertion("reflection and Tits extensions are not cohomologous".into()))
}

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use super::cocycle::{split_check, ExtensionCocycle, SplitReport};
use super::module::{Coefficients, Module};
use super::reflection::ReflectionData;
use crate::catalog::CatalogEntry;
use crate::coxeter::{find_simple_system, prod_word, SimpleSystem};
use crate::linsolve::{AffineSolver, Ring};
use crate::rootdata::MarkedReflectionTorus;
use crate::{Error, Result};

/// A `W`-action on `Zʳ` (or on `Z₂ʳ` at finite precision) by matrices.
#[derive(Clone, Debug)]
pub struct TorusAction {
    pub rank: usize,
    pub matrices: Arc<Vec<Vec<i64>>>,
    /// Entries are residues modulo this number for 2-adic lattices.
    pub matrix_modulus: Option<i64>,
}

impl TorusAction {
    pub fn module(&self, denominator: i64, label: &str) -> Module {
        let mut m = Module::torus(self.rank, denominator, self.matrices.clone(), label);
        m.matrix_modulus = self.matrix_modulus;
        m
    }

    pub fn from_group(group: &crate::lattice::FiniteMatrixGroup) -> Self {
        let matrices = group
            .elements()
            .iter()
            .map(|m| m.entries().iter().map(|x| x.to_i64().expect("small matrix entry")).collect())
            .collect();
        TorusAction { rank: group.dim(), matrices: Arc::new(matrices), matrix_modulus: None }
    }
}

/// Numerators of `h_σ` over 2, parallel to the reflection list.
pub fn marking_numerators(m: &MarkedReflectionTorus) -> Result<Vec<Vec<i64>>> {
    let two = BigInt::from(2);
    m.markings
        .iter()
        .map(|h| {
            let v = h.numerators(&two).ok_or_else(|| Error::InvalidMarking(format!("{h} is not 2-torsion")))?;
            Ok(v.iter().map(|x| x.to_i64().expect("small numerator")).collect())
        })
        .collect()
}

/// Pushforward of `ρ(W)` along `σ ↦ h_σ`; `h` holds numerators over 2 parallel to `data.reflections`.
pub fn normalizer_cocycle(data: &Arc<ReflectionData>, action: &TorusAction, h: &[Vec<i64>]) -> Result<ExtensionCocycle> {
    if h.len() != data.len() {
        return Err(Error::DimensionMismatch { expected: data.len(), found: h.len() });
    }
    let module = action.module(2, "T[2]");
    // Equivariance h_{wσw⁻¹} = w·h_σ, checked on generators.
    for &g in &data.generators {
        for (i, &r) in data.reflections.iter().enumerate() {
            let j = data.position[data.table.conj(g, r)] as usize;
            if module.act(g, &h[i]) != module.reduced(h[j].clone()) {
                return Err(Error::InvalidMarking("torus markings are not equivariant".into()));
            }
        }
    }
    let rank = action.rank;
    let cols: Vec<Vec<i64>> = h.to_vec();
    let rho = super::reflection::reflection_extension(data);
    Ok(rho.pushforward(module, move |v| {
        let mut out = vec![0i64; rank];
        for (coef, col) in v.iter().zip(&cols) {
            if *coef != 0 {
                for k in 0..rank {
                    out[k] += coef * col[k];
                }
            }
        }
        out
    }))
}

/// `ν(T, W, {h_σ})` for an integral marked reflection torus.
pub fn normalizer_extension(m: &MarkedReflectionTorus, data: &Arc<ReflectionData>) -> Result<ExtensionCocycle> {
    if m.reflections != data.reflections {
        return Err(Error::Assertion("reflection data does not match the marked torus".into()));
    }
    normalizer_cocycle(data, &TorusAction::from_group(&m.group), &marking_numerators(m)?)
}

/// Elements `(t, w)` of the extension defined by a torus-valued cocycle, with coordinates as
/// numerators over a common denominator.
pub struct RealizedExtension<'a> {
    pub cocycle: &'a ExtensionCocycle,
    pub denominator: i64,
    module: Module,
    scale: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealizedElement {
    pub torus: Vec<i64>,
    pub part: usize,
}

impl<'a> RealizedExtension<'a> {
    pub fn new(cocycle: &'a ExtensionCocycle, denominator: i64) -> Result<Self> {
        let d = cocycle.module().denominator().ok_or_else(|| Error::Assertion("cocycle is not torus-valued".into()))?;
        if denominator % d != 0 {
            return Err(Error::Assertion(format!("denominator {denominator} is not a multiple of {d}")));
        }
        if let Some(mm) = cocycle.module().matrix_modulus {
            if mm % denominator != 0 {
                return Err(Error::InsufficientPrecision(format!("denominator {denominator} exceeds precision {mm}")));
            }
        }
        let module = cocycle.module().with_coefficients(Coefficients::Torus { denominator });
        Ok(RealizedExtension { cocycle, denominator, module, scale: denominator / d })
    }

    pub fn element(&self, torus: Vec<i64>, part: usize) -> RealizedElement {
        RealizedElement { torus: self.module.reduced(torus), part }
    }

    pub fn torus(&self, t: Vec<i64>) -> RealizedElement {
        self.element(t, self.cocycle.table().identity())
    }

    /// `(x,w)(y,v) = (x + w·y + c(w,v), wv)`.
    pub fn mul(&self, a: &RealizedElement, b: &RealizedElement) -> RealizedElement {
        let c: Vec<i64> = self.cocycle.value(a.part, b.part).into_iter().map(|v| v * self.scale).collect();
        let moved = self.module.act(a.part, &b.torus);
        let t = self.module.add(&self.module.add(&a.torus, &moved), &c);
        RealizedElement { torus: t, part: self.cocycle.table().mul(a.part, b.part) }
    }

    pub fn inv(&self, a: &RealizedElement) -> RealizedElement {
        let t = self.cocycle.table();
        let wi = t.inv(a.part);
        let c: Vec<i64> = self.cocycle.value(wi, a.part).into_iter().map(|v| v * self.scale).collect();
        let moved = self.module.act(wi, &a.torus);
        let x = self.module.sub(&self.module.zero(), &self.module.add(&moved, &c));
        RealizedElement { torus: x, part: wi }
    }

    pub fn product(&self, items: &[&RealizedElement]) -> RealizedElement {
        items.iter().fold(self.torus(self.module.zero()), |acc, x| self.mul(&acc, x))
    }

    pub fn act(&self, w: usize, t: &[i64]) -> Vec<i64> {
        self.module.act(w, t)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BraidCheck {
    pub i: usize,
    pub j: usize,
    pub m: usize,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PresentationReport {
    /// Common denominator of the torus coordinates used in the realized group.
    pub denominator: i64,
    /// Relations for the section elements `q_i = (0, s_i)`.
    pub squares: Vec<bool>,
    pub conjugation: bool,
    pub braids: Vec<BraidCheck>,
    /// Torus parts of lifts obtained by solving the relations as a linear system, as fractions.
    pub solved_lifts: Vec<Vec<String>>,
    /// Whether the solved lifts satisfy every relation.
    pub solved_lifts_pass: bool,
}

impl PresentationReport {
    /// All relations hold for the section elements `(0, s_i)`.
    pub fn passed(&self) -> bool {
        self.squares.iter().all(|&b| b) && self.conjugation && self.braids.iter().all(|b| b.holds)
    }
}

/// Affine expression `A·X + k` in the lift unknowns.
#[derive(Clone)]
struct Affine {
    coeff: Vec<i64>,
    konst: Vec<i64>,
    part: usize,
}

/// Check the Tits-type presentation in the group realized from a torus cocycle: for
/// `q_i = (0, s_i)`, `q_i² = h_{s_i}`, `q_i t q_i⁻¹ = s_i(t)` on torsion generators, and
/// `prod(m_ij; q_i, q_j) = prod(m_ij; q_j, q_i)`. Lifts solving the same relations as a
/// linear system are computed and verified alongside.
pub fn presentation_check_with(
    c: &ExtensionCocycle,
    simples: &[usize],
    coxeter: &[Vec<usize>],
    h_simple: &[Vec<i64>],
) -> Result<PresentationReport> {
    let module = c.module().clone();
    let r = module.rank;
    let l = simples.len();
    let cols = r * l;
    let d = module.denominator().ok_or_else(|| Error::Assertion("cocycle is not torus-valued".into()))?;
    let t = c.table().clone();
    let two_adic = module.matrix_modulus;
    let (ring, work_den) = match two_adic {
        None => (Ring::RationalsModOne { denominator: BigInt::from(d) }, d),
        Some(mm) => {
            let q = (mm as u64).min(1 << 8) as i64;
            (Ring::Modulo(BigInt::from(q)), q)
        }
    };
    let scale = work_den / d;
    let cval = |a: usize, b: usize| -> Vec<i64> { c.value(a, b).into_iter().map(|v| v * scale).collect() };
    let reduce = |x: i64| if two_adic.is_some() { x.rem_euclid(work_den) } else { x };
    let mat = |w: usize| module.matrix_of(w);
    let mul = |x: &Affine, y: &Affine| -> Affine {
        let m = mat(x.part);
        let mut coeff = x.coeff.clone();
        for i in 0..r {
            for col in 0..cols {
                let s: i64 = (0..r).map(|k| m[i * r + k] * y.coeff[k * cols + col]).sum();
                coeff[i * cols + col] = reduce(coeff[i * cols + col] + s);
            }
        }
        let cv = cval(x.part, y.part);
        let konst = (0..r)
            .map(|i| {
                let s: i64 = (0..r).map(|k| m[i * r + k] * y.konst[k]).sum();
                (x.konst[i] + s + cv[i]).rem_euclid(work_den)
            })
            .collect();
        Affine { coeff, konst, part: t.mul(x.part, y.part) }
    };
    let q: Vec<Affine> = (0..l)
        .map(|i| {
            let mut coeff = vec![0; r * cols];
            for k in 0..r {
                coeff[k * cols + i * r + k] = 1;
            }
            Affine { coeff, konst: vec![0; r], part: simples[i] }
        })
        .collect();
    let mut solver = AffineSolver::new(cols, ring);
    let mut push = |lhs: &Affine, rhs: &Affine, extra: &[i64]| {
        for i in 0..r {
            let row: Vec<BigInt> = (0..cols).map(|k| BigInt::from(reduce(lhs.coeff[i * cols + k] - rhs.coeff[i * cols + k]))).collect();
            let b = (rhs.konst[i] - lhs.konst[i] + extra[i]).rem_euclid(work_den);
            solver.push(row, BigInt::from(b));
        }
    };
    for i in 0..l {
        let sq = mul(&q[i], &q[i]);
        let target = Affine { coeff: vec![0; r * cols], konst: vec![0; r], part: sq.part };
        let h: Vec<i64> = h_simple[i].iter().map(|v| v * (work_den / 2)).collect();
        push(&sq, &target, &h);
    }
    let braid_words: Vec<(usize, usize, usize)> =
        (0..l).flat_map(|i| ((i + 1)..l).map(move |j| (i, j))).map(|(i, j)| (i, j, coxeter[i][j])).collect();
    for &(i, j, m) in &braid_words {
        let left = prod_word(m, i, j).letters().iter().fold(None::<Affine>, |acc, &k| Some(match acc {
            None => q[k].clone(),
            Some(a) => mul(&a, &q[k]),
        }));
        let right = prod_word(m, j, i).letters().iter().fold(None::<Affine>, |acc, &k| Some(match acc {
            None => q[k].clone(),
            Some(a) => mul(&a, &q[k]),
        }));
        push(&left.unwrap(), &right.unwrap(), &vec![0; r]);
    }
    let sol = solver.solve().ok_or_else(|| Error::Assertion("no lifts of the simple reflections satisfy the presentation".into()))?;
    let sol: Vec<BigRational> = match two_adic {
        None => sol,
        Some(_) => sol.into_iter().map(|x| x / BigRational::from_integer(BigInt::from(work_den))).collect(),
    };
    let mut den = BigInt::from(d);
    for x in &sol {
        den = den.lcm(x.denom());
    }
    let torsion_den: i64 = if two_adic.is_some() { 4 } else { 12 };
    let big = den.lcm(&BigInt::from(torsion_den)).to_i64().ok_or(Error::Overflow)?;
    let big = match two_adic {
        Some(mm) if mm % big != 0 => return Err(Error::InsufficientPrecision(format!("lift denominators exceed 2-adic precision {mm}"))),
        _ => big,
    };
    let ext = RealizedExtension::new(c, big)?;
    let lifts_num: Vec<Vec<i64>> = (0..l)
        .map(|i| {
            (0..r)
                .map(|k| {
                    let v = &sol[i * r + k] * BigRational::from_integer(BigInt::from(big));
                    v.to_integer().to_i64().ok_or(Error::Overflow)
                })
                .collect::<Result<Vec<i64>>>()
        })
        .collect::<Result<_>>()?;
    let (sq1, conj1, br1) = verify_relations(&ext, simples, coxeter, h_simple, &lifts_num, torsion_den);
    let solved_lifts_pass = sq1.iter().all(|&b| b) && conj1 && br1.iter().all(|b| b.holds);
    let zero_lifts = vec![vec![0; r]; l];
    let (squares, conjugation, braids) = verify_relations(&ext, simples, coxeter, h_simple, &zero_lifts, torsion_den);
    let solved_lifts = sol
        .chunks(r.max(1))
        .take(l)
        .map(|ch| ch.iter().map(|x| x.to_string()).collect())
        .collect();
    Ok(PresentationReport { denominator: big, squares, conjugation, braids, solved_lifts, solved_lifts_pass })
}

fn verify_relations(
    ext: &RealizedExtension<'_>,
    simples: &[usize],
    coxeter: &[Vec<usize>],
    h_simple: &[Vec<i64>],
    lifts: &[Vec<i64>],
    torsion_den: i64,
) -> (Vec<bool>, bool, Vec<BraidCheck>) {
    let l = simples.len();
    let r = ext.cocycle.module().rank;
    let big = ext.denominator;
    let q: Vec<RealizedElement> = (0..l).map(|i| ext.element(lifts[i].clone(), simples[i])).collect();
    let squares = (0..l)
        .map(|i| {
            let sq = ext.mul(&q[i], &q[i]);
            sq == ext.torus(h_simple[i].iter().map(|v| v * (big / 2)).collect())
        })
        .collect();
    let mut gens = Vec::new();
    let mut den = 2;
    while den <= torsion_den {
        if torsion_den % den == 0 {
            for k in 0..r {
                let mut v = vec![0; r];
                v[k] = big / den;
                gens.push(v);
            }
        }
        den += 1;
    }
    let conjugation = (0..l).all(|i| {
        let qi = ext.inv(&q[i]);
        gens.iter().all(|tv| {
            let conj = ext.product(&[&q[i], &ext.torus(tv.clone()), &qi]);
            conj == ext.torus(ext.act(simples[i], tv))
        })
    });
    let mut braids = Vec::new();
    for i in 0..l {
        for j in (i + 1)..l {
            let m = coxeter[i][j];
            let left: Vec<&RealizedElement> = prod_word(m, i, j).letters().iter().map(|&k| &q[k]).collect();
            let right: Vec<&RealizedElement> = prod_word(m, j, i).letters().iter().map(|&k| &q[k]).collect();
            braids.push(BraidCheck { i, j, m, holds: ext.product(&left) == ext.product(&right) });
        }
    }
    (squares, conjugation, braids)
}

/// [`presentation_check_with`] for an integral marked torus and a simple system.
pub fn presentation_check(m: &MarkedReflectionTorus, ss: &SimpleSystem) -> Result<PresentationReport> {
    let data = Arc::new(ReflectionData::from_simple_system(ss)?);
    let c = normalizer_extension(m, &data)?;
    let h = marking_numerators(m)?;
    let h_simple: Vec<Vec<i64>> = ss.simple_indices.iter().map(|&s| h[data.position[s] as usize].clone()).collect();
    presentation_check_with(&c, &ss.simple_indices, &ss.coxeter_matrix, &h_simple)
}

/// For each reflection `σ`, a lift `q` of `σ` with `q² = h_σ` and `q t q⁻¹ = σ(t)` on torsion
/// generators. Used where no Coxeter presentation is available.
pub fn reflection_lift_check(c: &ExtensionCocycle, data: &ReflectionData, h: &[Vec<i64>]) -> Result<Vec<bool>> {
    data.reflections
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let rep = presentation_check_with(c, &[s], &[vec![1]], &[h[i].clone()])?;
            Ok(rep.passed() || rep.solved_lifts_pass)
        })
        .collect()
}

/// `ν` of a catalog entry with its splitting verdict.
#[derive(Clone, Debug)]
pub struct NtModel {
    pub name: String,
    pub cocycle: ExtensionCocycle,
    pub split: SplitReport,
    pub expected_split: Option<bool>,
}

impl NtModel {
    /// `None` when the entry records no expectation.
    pub fn matches_expectation(&self) -> Option<bool> {
        self.expected_split.map(|e| e == self.split.split)
    }
}

pub fn nt_model(entry: &CatalogEntry) -> Result<NtModel> {
    let group = entry.lattice.group.clone();
    let ss = find_simple_system(&group)?;
    let data = Arc::new(ReflectionData::from_simple_system(&ss)?);
    let cocycle = normalizer_extension(&entry.torus(), &data)?;
    let split = split_check(&cocycle)?;
    Ok(NtModel { name: entry.name.to_string(), cocycle, split, expected_split: entry.expected.split })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::build_entry;
    use crate::extension::cocycle::{split_check_with, CheckPlan, SearchBound};

    fn model(name: &str) -> NtModel {
        nt_model(&build_entry(name).unwrap()).unwrap()
    }

    #[test]
    fn rank_one_models() {
        let su2 = model("SU(2)");
        let s = su2.cocycle.generators()[0];
        assert_eq!(su2.cocycle.value(s, s), vec![1]);
        assert!(!su2.split.split);
        let so3 = model("SO(3)");
        assert_eq!(so3.cocycle.value(s, s), vec![0]);
        assert!(so3.split.split);
    }

    #[test]
    fn u2_value() {
        let u2 = model("U(2)");
        let s = u2.cocycle.generators()[0];
        assert_eq!(u2.cocycle.value(s, s), vec![1, 1]);
        // (1 + σ)(1/2, 0) = (1/2, 1/2): the class is a coboundary.
        assert!(u2.split.split);
        assert!(split_check_with(&u2.cocycle, SearchBound::Exact).unwrap().split);
    }

    #[test]
    fn presentations() {
        for name in ["SU(2)", "SO(3)", "U(2)", "SU(3)", "Spin(5)", "SO(5)", "G2"] {
            let e = build_entry(name).unwrap();
            let ss = find_simple_system(&e.lattice.group).unwrap();
            let rep = presentation_check(&e.torus(), &ss).unwrap();
            assert!(rep.passed(), "{name}: {rep:?}");
            assert!(rep.solved_lifts_pass, "{name}");
        }
    }

    #[test]
    fn g2_braid_has_m6() {
        let e = build_entry("G2").unwrap();
        let ss = find_simple_system(&e.lattice.group).unwrap();
        let rep = presentation_check(&e.torus(), &ss).unwrap();
        assert_eq!(rep.braids.len(), 1);
        assert_eq!(rep.braids[0].m, 6);
        assert!(rep.braids[0].holds);
    }

    #[test]
    fn normalizer_is_cocycle() {
        for name in ["Spin(5)", "G2", "Spin(7)"] {
            let m = model(name);
            assert!(m.cocycle.check_identity(CheckPlan::Exhaustive).passed(), "{name}");
        }
    }
}

//! The acceptance suite as library calls, shared by the CLI and the test targets.

use std::sync::Arc;
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::catalog::{all_entries, build_entry, CatalogEntry};
use crate::cohomology::{centralizer_compat_check, double_coset_formula_check, sign_cocycle, Subgroup};
use crate::coxeter::{check_word_lemmas, find_simple_system, SimpleSystem};
use crate::extension::{
    normalizer_extension, presentation_check, tits_cocycle, tits_kernel_element,
    tits_vs_reflection, verify_witness, CheckPlan, ExtensionCocycle, ReflectionData, TitsContext,
};
use crate::lattice::{generate_group, markings_of, reflections_in, IntMatrix, DEFAULT_CAP};
use crate::rootdata::{
    enumerate_marking_families, lattice_to_rootsystem, lattice_to_torus, rootsystem_to_lattice, torus_to_lattice,
    MarkedReflectionLattice, TorusElement,
};
use crate::twoadic::{self, classify, FactorTag};
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Quick,
    Full,
}

/// Number of acceptance criteria.
pub const CRITERIA: u8 = 11;

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub number: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    /// Budget in seconds.
    pub budget: u64,
    #[serde(skip)]
    pub seconds: f64,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!("{} criterion {:>2}: {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.number, self.title, self.detail)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SelftestReport {
    pub level: Level,
    pub results: Vec<CriterionResult>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }
}

pub fn title(n: u8) -> &'static str {
    match n {
        1 => "marking-count law",
        2 => "round-trip bijections",
        3 => "Tits kernel in 2Z[Σ*]",
        4 => "reflection and Tits extensions agree",
        5 => "presentation relations",
        6 => "SU(2)/SO(3)/U(2) splitting verdicts",
        7 => "word lemmas",
        8 => "double-coset formula",
        9 => "centralizer compatibility",
        10 => "2-adic classification of DI4+B2+A1",
        11 => "DI4 fixture integrity",
        _ => "unknown",
    }
}

pub fn budget(n: u8) -> u64 {
    match n {
        1 => 5,
        2 => 30,
        3 => 60,
        4 => 120,
        5 => 300,
        6 => 5,
        7 => 180,
        8 => 120,
        9 => 120,
        10 => 180,
        11 => 30,
        _ => 0,
    }
}

/// Outcome of one criterion: `Ok(detail)` passes, `Err(detail)` fails.
type Verdict = std::result::Result<String, String>;

fn lift<T>(r: Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

pub fn run_criterion(n: u8, level: Level) -> CriterionResult {
    let start = Instant::now();
    let verdict = match n {
        1 => marking_count_law(),
        2 => round_trips(level),
        3 => tits_kernel(level),
        4 => rho_vs_tau(level),
        5 => presentations(level),
        6 => rank_one_verdicts(),
        7 => word_lemmas(level),
        8 => double_cosets(level),
        9 => compat(level),
        10 => two_adic_classification(level),
        11 => di4_integrity(level),
        _ => Err(format!("no criterion {n}")),
    };
    let (passed, detail) = match verdict {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    CriterionResult { number: n, title: title(n), passed, detail, budget: budget(n), seconds: start.elapsed().as_secs_f64() }
}

pub fn run(level: Level) -> SelftestReport {
    SelftestReport { level, results: (1..=CRITERIA).map(|n| run_criterion(n, level)).collect() }
}

fn entry(name: &str) -> std::result::Result<CatalogEntry, String> {
    lift(build_entry(name))
}

fn simple_system(e: &CatalogEntry) -> std::result::Result<SimpleSystem, String> {
    lift(find_simple_system(&e.lattice.group))
}

/// Independent count: `kb₀` is a marking iff `k` divides every entry of `σ − 1`.
fn marking_count_oracle(m: &IntMatrix) -> usize {
    let n = m.dim();
    let mut g = BigInt::zero();
    for i in 0..n {
        for j in 0..n {
            let d = m.get(i, j) - if i == j { 1 } else { 0 };
            g = g.gcd(&d);
        }
    }
    (1..=4).filter(|k| (&g % BigInt::from(*k)).is_zero()).count()
}

fn marking_count_law() -> Verdict {
    let mut checked = 0;
    for e in lift(all_entries())? {
        if e.rank > 4 {
            continue;
        }
        for (_, r) in reflections_in(&e.lattice.group) {
            let found = markings_of(&r).len();
            let expected = if r.trivial_mod2 { 2 } else { 1 };
            let oracle = marking_count_oracle(&r.matrix);
            if found != expected || oracle != expected {
                return Err(format!("{}: {} has {found} markings (oracle {oracle})", e.name, r.matrix));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} reflections"))
}

fn round_trip(m: &MarkedReflectionLattice) -> std::result::Result<(), String> {
    let rs = lattice_to_rootsystem(m);
    if lift(rootsystem_to_lattice(&rs))? != *m {
        return Err("root system round trip".into());
    }
    let t = lattice_to_torus(m);
    if lift(torus_to_lattice(&t))? != *m {
        return Err("torus round trip".into());
    }
    if lattice_to_rootsystem(&lift(rootsystem_to_lattice(&rs))?) != rs {
        return Err("root system identity".into());
    }
    Ok(())
}

/// A random unimodular matrix from elementary operations.
pub fn random_unimodular(rng: &mut StdRng, n: usize) -> IntMatrix {
    let mut rows: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    for _ in 0..3 * n {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        if i == j {
            if rng.gen_bool(0.2) {
                rows[i].iter_mut().for_each(|x| *x = -*x);
            }
            continue;
        }
        let c = rng.gen_range(-2..=2);
        for col in 0..n {
            let add = c * rows[j][col];
            rows[i][col] += add;
        }
    }
    IntMatrix::from_rows(&rows).expect("square")
}

/// A conjugate of a small catalog group by a random unimodular matrix, with a random marking family.
pub fn random_instance(rng: &mut StdRng, pool: &[CatalogEntry]) -> Result<MarkedReflectionLattice> {
    let e = &pool[rng.gen_range(0..pool.len())];
    let p = random_unimodular(rng, e.rank);
    let pinv = p.inverse()?;
    let gens: Vec<IntMatrix> =
        e.lattice.group.generators().iter().map(|&g| p.mul(e.lattice.group.element(g)).mul(&pinv)).collect();
    let group = Arc::new(generate_group(e.rank, &gens, DEFAULT_CAP)?);
    let mut families = enumerate_marking_families(&group)?;
    let k = rng.gen_range(0..families.len());
    Ok(families.swap_remove(k))
}

fn round_trips(level: Level) -> Verdict {
    let entries = lift(all_entries())?;
    for e in &entries {
        round_trip(&e.lattice).map_err(|m| format!("{}: {m}", e.name))?;
    }
    let pool: Vec<CatalogEntry> = entries.into_iter().filter(|e| e.rank <= 3).collect();
    let count = if level == Level::Full { 200 } else { 50 };
    let mut rng = StdRng::seed_from_u64(0x5eed);
    for i in 0..count {
        let m = lift(random_instance(&mut rng, &pool))?;
        round_trip(&m).map_err(|msg| format!("random instance {i}: {msg}"))?;
    }
    Ok(format!("{} catalog entries, {count} random instances", pool.len()))
}

const TITS_GROUPS: &[&str] = &["SU(2)", "SU(3)", "Spin(5)", "G2", "SU(4)", "Spin(7)"];

fn tits_groups(level: Level) -> &'static [&'static str] {
    if level == Level::Full {
        TITS_GROUPS
    } else {
        &TITS_GROUPS[..4]
    }
}

fn tits_context(name: &str) -> std::result::Result<(SimpleSystem, TitsContext), String> {
    let e = entry(name)?;
    let ss = simple_system(&e)?;
    let data = Arc::new(lift(ReflectionData::from_simple_system(&ss))?);
    Ok((ss, TitsContext::new(data)))
}

fn tits_kernel(level: Level) -> Verdict {
    let mut values = 0usize;
    for name in tits_groups(level) {
        let (ss, ctx) = tits_context(name)?;
        // tits_cocycle itself refuses values outside 2Z[Σ*]; the direct check below is independent.
        lift(tits_cocycle(&ctx, &ss))?;
        let t = ctx.data.table.clone();
        let e = t.identity();
        for a in 0..t.order() {
            for b in 0..t.order() {
                let z = tits_kernel_element(&ctx, &ss, a, b);
                if z.part != e || z.vec.iter().any(|x| x % 2 != 0) {
                    return Err(format!("{name}: s({a})s({b})s({a}{b})⁻¹ = {:?} not in 2Z[Σ*]", z.vec));
                }
                values += 1;
            }
            if level == Level::Quick && t.order() > 12 {
                break;
            }
        }
    }
    Ok(format!("{values} values over {}", tits_groups(level).join(", ")))
}

fn rho_vs_tau(level: Level) -> Verdict {
    for name in tits_groups(level) {
        let (ss, ctx) = tits_context(name)?;
        let b = lift(tits_vs_reflection(&ctx, &ss))?;
        let rho = crate::extension::reflection_extension(&ctx.data);
        let tau = lift(tits_cocycle(&ctx, &ss))?;
        let diff = lift(rho.sub(&tau))?;
        if !lift(verify_witness(&diff, &b, 1))? {
            return Err(format!("{name}: witness does not verify"));
        }
    }
    Ok(format!("witnesses for {}", tits_groups(level).join(", ")))
}

fn presentations(level: Level) -> Verdict {
    let mut names = Vec::new();
    for e in lift(all_entries())? {
        if level == Level::Quick && e.lattice.group.order() > 200 {
            continue;
        }
        let ss = simple_system(&e)?;
        let m = e.torus();
        let rep = lift(presentation_check(&m, &ss))?;
        if !rep.passed() {
            return Err(format!("{}: {rep:?}", e.name));
        }
        if e.name == "G2" && rep.braids.iter().map(|b| b.m).max() != Some(6) {
            return Err("G2: braid relation with m = 6 missing".into());
        }
        if e.name == "F4" {
            let data = Arc::new(lift(ReflectionData::from_simple_system(&ss))?);
            let nu = lift(normalizer_extension(&m, &data))?;
            let id = nu.check_identity(CheckPlan::Sampled { triples: 20_000, seed: 4 });
            if !id.passed() {
                return Err(format!("F4: cocycle identity fails at {:?}", id.failures.first()));
            }
        }
        names.push(e.name.to_string());
    }
    Ok(format!("{} entries", names.len()))
}

fn rank_one_verdicts() -> Verdict {
    let mut out = Vec::new();
    let mut ok = true;
    for (name, expect_split) in [("SU(2)", false), ("SO(3)", true), ("U(2)", false)] {
        let e = entry(name)?;
        let m = lift(crate::extension::nt_model(&e))?;
        let verdict = if m.split.split { "split" } else { "nonsplit" };
        let wanted = if expect_split { "split" } else { "nonsplit" };
        if m.split.split != expect_split {
            ok = false;
            let witness = m
                .split
                .witness
                .as_ref()
                .map(|w| format!(" (witness b = {:?} over {})", w.values, w.denominator().unwrap_or(1)))
                .unwrap_or_default();
            out.push(format!("{name} {verdict}, expected {wanted}{witness}"));
        } else {
            out.push(format!("{name} {verdict}"));
        }
    }
    if ok {
        Ok(out.join(", "))
    } else {
        Err(out.join(", "))
    }
}

fn word_lemmas(level: Level) -> Verdict {
    let names: &[&str] = if level == Level::Full { &["SU(3)", "Spin(5)", "G2", "SU(4)"] } else { &["SU(3)", "Spin(5)", "G2"] };
    let mut words = 0;
    for name in names {
        let ss = simple_system(&entry(name)?)?;
        let rep = check_word_lemmas(&ss);
        if !rep.passed() {
            return Err(format!("{name}: {rep:?}"));
        }
        words += rep.minimal_words_checked;
    }
    Ok(format!("{words} minimal words"))
}

fn centralizer(d: &ReflectionData, class: usize) -> std::result::Result<(Subgroup, ExtensionCocycle), String> {
    let c = &d.classes[class];
    let h = lift(Subgroup::new(&d.table, &c.splitting.centralizer))?;
    let neg: Vec<bool> = h.elements.iter().map(|&x| c.negates[x]).collect();
    let k = sign_cocycle(&h, neg);
    Ok((h, k))
}

fn double_cosets(level: Level) -> Verdict {
    let names: &[&str] = if level == Level::Full { &["SU(3)", "Spin(5)", "G2", "SU(4)"] } else { &["SU(3)", "Spin(5)", "G2"] };
    let mut instances = 0;
    for name in names {
        let e = entry(name)?;
        let ss = simple_system(&e)?;
        let d = lift(ReflectionData::from_simple_system(&ss))?;
        let whole = Subgroup::whole(e.lattice.group.table(), &ss.simple_indices);
        let table = e.lattice.group.table();
        for hc in 0..d.classes.len() {
            let (h, k) = centralizer(&d, hc)?;
            let mut ks = vec![whole.clone()];
            for kc in 0..d.classes.len() {
                ks.push(centralizer(&d, kc)?.0);
            }
            for kk in &ks {
                let rep = lift(double_coset_formula_check(table, &whole, kk, &h, &k))?;
                if !rep.cohomologous {
                    return Err(format!("{name}: {rep:?}"));
                }
                instances += 1;
            }
        }
    }
    if instances < 10 {
        return Err(format!("only {instances} instances"));
    }
    Ok(format!("{instances} instances"))
}

fn compat(level: Level) -> Verdict {
    let names: &[&str] =
        if level == Level::Full { &["SU(3)", "Spin(5)", "SO(5)", "G2", "Spin(7)", "SU(4)"] } else { &["SU(3)", "Spin(5)", "SO(5)", "G2"] };
    let mut applicable = 0;
    let mut considered = 0;
    for name in names {
        let e = entry(name)?;
        let m = e.torus();
        let n = e.rank;
        let mut candidates = vec![Vec::new()];
        for i in 0..n {
            let mut v = vec![(0, 1); n];
            v[i] = (1, 2);
            candidates.push(vec![TorusElement::from_fractions(&v)]);
        }
        let half: Vec<(i64, i64)> = vec![(1, 2); n];
        candidates.push(vec![TorusElement::from_fractions(&half)]);
        for a in candidates {
            considered += 1;
            let rep = lift(centralizer_compat_check(&m, &a))?;
            if rep.applicable {
                if rep.index > 1 {
                    applicable += 1;
                }
                if rep.cohomologous != Some(true) {
                    return Err(format!("{name}: {rep:?}"));
                }
            }
        }
    }
    if applicable < 5 {
        return Err(format!("only {applicable} applicable proper instances"));
    }
    Ok(format!("{applicable} applicable proper instances of {considered}"))
}

fn sorted_tags(k: u32) -> std::result::Result<Vec<String>, String> {
    let di4 = lift(twoadic::di4_data(k).and_then(|d| d.lattice()))?;
    let b2 = lift(twoadic::promote(&entry("Spin(5)")?.lattice, k))?;
    let a1 = lift(twoadic::promote(&entry("SU(2)")?.lattice, k))?;
    let sum = lift(twoadic::CompleteMarkedLattice::block_sum(&[&di4, &b2, &a1]))?;
    let factors = lift(classify(&sum))?;
    let mut tags: Vec<String> = factors.iter().map(|t| t.to_string()).collect();
    tags.sort();
    Ok(tags)
}

fn two_adic_classification(level: Level) -> Verdict {
    let precisions: &[u32] = if level == Level::Full { &[8, 12] } else { &[8] };
    let mut expected: Vec<String> =
        [FactorTag::DI4, FactorTag::Coxeter("B2".into()), FactorTag::Coxeter("A1".into())].iter().map(|t| t.to_string()).collect();
    expected.sort();
    for &k in precisions {
        let tags = sorted_tags(k)?;
        if tags != expected {
            return Err(format!("precision {k}: {tags:?}"));
        }
    }
    Ok(format!("{} at precisions {precisions:?}", expected.join(", ")))
}

fn di4_integrity(level: Level) -> Verdict {
    let text = lift(twoadic::di4::fixture_text())?;
    let stored = lift(twoadic::di4::parse_fixture(&text))?;
    let report = lift(stored.report())?;
    if let Some(name) = report.failure() {
        return Err(format!("DI4 invariant failed: {name}"));
    }
    if level == Level::Full {
        let oracle = lift(twoadic::di4_oracle(stored.precision))?;
        if oracle != stored {
            return Err("fixture differs from the oracle".into());
        }
    }
    Ok(format!(
        "order {}, -I {}, mod 2 image {}, reflections {} ({} trivial mod 2), marking families {}",
        report.order,
        report.contains_minus_identity,
        report.mod2_order,
        report.reflections,
        report.reflections_trivial_mod2,
        report.marking_families
    ))
}

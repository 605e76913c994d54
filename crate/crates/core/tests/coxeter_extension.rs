use std::sync::{Arc, OnceLock};

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use weylnorm::catalog::{all_entries, build_entry, CatalogEntry};
use weylnorm::coxeter::{check_word_lemmas, find_simple_system, find_simple_system_with, SimpleSystem, Word};
use weylnorm::extension::{
    cohomologous, normalizer_extension, reflection_extension, tits_cocycle, tits_vs_reflection, tits_word_element,
    CheckPlan, Coefficients, ExtensionCocycle, Module, ReflectionData, TitsContext,
};
use weylnorm::rootdata::{count_root_systems, enumerate_marking_families, lattice_to_torus};

/// One catalog entry per Weyl group type, keyed by entry name.
const GROUPS: &[&str] = &["SU(2)", "SU(3)", "Spin(5)", "G2", "SU(4)", "Spin(7)", "Sp(3)", "Spin(8)", "F4"];

fn entries() -> &'static [CatalogEntry] {
    static E: OnceLock<Vec<CatalogEntry>> = OnceLock::new();
    E.get_or_init(|| all_entries().unwrap())
}

fn setup(name: &str) -> (SimpleSystem, Arc<ReflectionData>) {
    let e = build_entry(name).unwrap();
    let ss = find_simple_system(&e.lattice.group).unwrap();
    let data = Arc::new(ReflectionData::from_simple_system(&ss).unwrap());
    (ss, data)
}

#[test]
fn word_lemmas_rank_three_and_below() {
    for name in ["SU(2)", "SU(3)", "Spin(5)", "G2", "SU(4)", "Spin(7)", "Sp(3)"] {
        let (ss, _) = setup(name);
        let rep = check_word_lemmas(&ss);
        assert!(rep.passed(), "{name}: {rep:?}");
        assert!(rep.minimal_words_checked >= ss.table().order());
    }
}

#[test]
fn every_cocycle_satisfies_the_identity() {
    for e in entries() {
        let order = e.lattice.group.order();
        let ss = find_simple_system(&e.lattice.group).unwrap();
        let data = Arc::new(ReflectionData::from_simple_system(&ss).unwrap());
        let nu = normalizer_extension(&e.torus(), &data).unwrap();
        assert!(nu.check_identity(CheckPlan::Exhaustive).passed(), "ν {}", e.name);
        // ρ and τ carry one coordinate per reflection; the largest group is sampled.
        let plan = if order <= 400 { CheckPlan::Exhaustive } else { CheckPlan::Sampled { triples: 50_000, seed: 9 } };
        assert!(reflection_extension(&data).check_identity(plan).passed(), "ρ {}", e.name);
        if order <= 400 {
            let ctx = TitsContext::new(data.clone());
            assert!(tits_cocycle(&ctx, &ss).unwrap().check_identity(plan).passed(), "τ {}", e.name);
        }
    }
}

#[test]
fn normalizer_values_are_two_torsion() {
    for e in entries() {
        let ss = find_simple_system(&e.lattice.group).unwrap();
        let data = Arc::new(ReflectionData::from_simple_system(&ss).unwrap());
        let nu = normalizer_extension(&e.torus(), &data).unwrap();
        assert_eq!(nu.module().coefficients, Coefficients::Torus { denominator: 2 }, "{}", e.name);
        let n = nu.order().min(200);
        for a in 0..n {
            for b in 0..n {
                assert!(nu.value(a, b).iter().all(|&x| (0..2).contains(&x)));
            }
        }
    }
}

#[test]
fn tits_words_agree_with_products() {
    let mut rng = StdRng::seed_from_u64(11);
    for name in GROUPS {
        let (ss, data) = setup(name);
        let ctx = TitsContext::new(data);
        for _ in 0..1000 {
            let len = rng.gen_range(0..16);
            let w = Word((0..len).map(|_| rng.gen_range(0..ss.rank())).collect());
            tits_word_element(&ctx, &ss, &w).unwrap();
        }
    }
}

#[test]
fn rho_and_tau_agree() {
    for name in ["SU(2)", "SU(3)", "Spin(5)", "G2", "SU(4)", "Spin(7)", "Sp(3)"] {
        let (ss, data) = setup(name);
        tits_vs_reflection(&TitsContext::new(data), &ss).unwrap();
    }
}

fn torus_like(c: &ExtensionCocycle, denominator: i64) -> Module {
    c.module().with_coefficients(Coefficients::Torus { denominator })
}

fn table(c: &ExtensionCocycle) -> Vec<Vec<i64>> {
    let n = c.order();
    (0..n * n).map(|i| c.value(i / n, i % n)).collect()
}

#[test]
fn pushforward_is_functorial() {
    for name in ["SU(2)", "U(2)", "SU(3)", "Spin(5)", "G2"] {
        let e = build_entry(name).unwrap();
        let ss = find_simple_system(&e.lattice.group).unwrap();
        let data = Arc::new(ReflectionData::from_simple_system(&ss).unwrap());
        let nu = normalizer_extension(&e.torus(), &data).unwrap();
        let t2 = torus_like(&nu, 2);
        let t8 = torus_like(&nu, 8);
        // f = −1 on T[2], then T[2] ⊆ T[8] (numerators times 4).
        let two_step = nu.pushforward(t2.clone(), |v| v.iter().map(|x| -x).collect()).pushforward(t8.clone(), |v| v.iter().map(|x| 4 * x).collect());
        let direct = nu.pushforward(t8, |v| v.iter().map(|x| -4 * x).collect());
        assert_eq!(table(&two_step), table(&direct), "{name}");
        assert!(two_step.check_identity(CheckPlan::Exhaustive).passed());
    }
}

#[test]
fn marking_count_bridge() {
    for (name, equal) in [("SU(2)", true), ("Spin(5)", true), ("SU(3)", false), ("G2", false), ("SO(4)", false)] {
        let e = build_entry(name).unwrap();
        let group = e.lattice.group.clone();
        let ss = find_simple_system(&group).unwrap();
        let data = Arc::new(ReflectionData::from_simple_system(&ss).unwrap());
        let mut classes: Vec<ExtensionCocycle> = Vec::new();
        for fam in enumerate_marking_families(&group).unwrap() {
            let nu = normalizer_extension(&lattice_to_torus(&fam), &data).unwrap();
            if !classes.iter().any(|c| cohomologous(c, &nu).unwrap().is_some()) {
                classes.push(nu);
            }
        }
        let count = count_root_systems(&group).unwrap() as usize;
        assert!(classes.len() <= count, "{name}");
        if equal {
            assert_eq!(classes.len(), count, "{name}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn simple_system_choice(base in 2u64..5000, pick in 0usize..6) {
        let name = ["SU(3)", "Spin(5)", "G2", "SU(4)", "Spin(7)", "Sp(3)"][pick];
        let (ss, data) = setup(name);
        let other = find_simple_system_with(&ss.group, base).unwrap();
        let mut a: Vec<usize> = (0..ss.table().order()).map(|g| ss.length(g)).collect();
        let mut b: Vec<usize> = (0..ss.table().order()).map(|g| other.length(g)).collect();
        a.sort_unstable();
        b.sort_unstable();
        prop_assert_eq!(a, b);
        let ctx = TitsContext::new(data);
        let z1 = tits_cocycle(&ctx, &ss).unwrap();
        let z2 = tits_cocycle(&ctx, &other).unwrap();
        prop_assert!(cohomologous(&z1, &z2).unwrap().is_some());
    }
}

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

use weylnorm::catalog::{all_entries, build_entry};
use weylnorm::lattice::reflections_in;
use weylnorm::selftest::random_instance;
use weylnorm::twoadic::{
    classify, di4_data, promote, reflection_partition, split_off_di4, CompleteMarkedLattice, FactorTag,
};

/// Irreducible entries with the expected tag of their Weyl group.
const FACTORS: &[(&str, &str)] = &[
    ("SU(2)", "A1"),
    ("SO(3)", "A1"),
    ("SU(3)", "A2"),
    ("PU(3)", "A2"),
    ("Spin(5)", "B2"),
    ("SO(5)", "B2"),
    ("G2", "G2"),
    ("G2_adjoint", "G2"),
    ("SU(4)", "A3"),
    ("SO(6)", "A3"),
    ("Spin(7)", "B3"),
    ("Sp(3)", "B3"),
];

fn promoted(name: &str, k: u32) -> CompleteMarkedLattice {
    promote(&build_entry(name).unwrap().lattice, k).unwrap()
}

fn sorted_tags(c: &CompleteMarkedLattice) -> Vec<String> {
    let mut tags: Vec<String> = classify(c).unwrap().iter().map(|t| t.to_string()).collect();
    tags.sort();
    tags
}

#[test]
fn promoted_marking_counts() {
    for e in all_entries().unwrap() {
        let c = promote(&e.lattice, 16).unwrap();
        // Element orders differ between the two groups, so compare multisets.
        let mut integral: Vec<usize> =
            reflections_in(&e.lattice.group).into_iter().map(|(_, r)| if r.trivial_mod2 { 2 } else { 1 }).collect();
        let mut counts = c.marking_counts();
        integral.sort_unstable();
        counts.sort_unstable();
        assert_eq!(counts, integral, "{}", e.name);
    }
}

#[test]
fn promoted_entries_classify() {
    for (name, tag) in FACTORS.iter().chain(&[("Spin(8)", "D4"), ("F4", "F4")]) {
        assert_eq!(sorted_tags(&promoted(name, 12)), vec![format!("Coxeter({tag})")], "{name}");
    }
    let sum = promoted("SU(2)xSU(2)", 12);
    assert_eq!(sorted_tags(&sum), vec!["Coxeter(A1)".to_string(), "Coxeter(A1)".to_string()]);
    // Two rationally isomorphic factors glued along the diagonal: reported, not decided.
    let so4 = promoted("SO(4)", 12);
    assert!(matches!(classify(&so4), Err(weylnorm::Error::Classification(_))));
    assert_eq!(split_off_di4(&so4).unwrap().coxeter.map(|f| f.rank()), Some(2));
}

#[test]
fn block_sums_with_di4_recover_the_blocks() {
    let k = 8;
    let di4 = di4_data(k).unwrap().lattice().unwrap();
    let mut pairs = 0;
    for (i, (a, ta)) in FACTORS.iter().enumerate() {
        for (b, tb) in &FACTORS[i..] {
            let (la, lb) = (promoted(a, k), promoted(b, k));
            if la.group.order() * lb.group.order() > 100 {
                continue;
            }
            let sum = CompleteMarkedLattice::block_sum(&[&la, &di4, &lb]).unwrap();
            let part = reflection_partition(&sum).unwrap();
            let mut ranks = part.ranks();
            ranks.sort_unstable();
            let mut expected = vec![la.rank(), 3, lb.rank()];
            expected.sort_unstable();
            assert_eq!(ranks, expected, "{a} + DI4 + {b}");
            let orders: u128 = part.factors.iter().map(|f| f.lattice.group.order() as u128).product();
            assert_eq!(orders, sum.group.order() as u128);
            let mut want = vec!["DI4".to_string(), format!("Coxeter({ta})"), format!("Coxeter({tb})")];
            want.sort();
            assert_eq!(sorted_tags(&sum), want, "{a} + DI4 + {b}");
            let split = split_off_di4(&sum).unwrap();
            assert_eq!(split.di4.len(), 1);
            assert_eq!(split.coxeter.map(|f| f.rank()), Some(la.rank() + lb.rank()));
            pairs += 1;
        }
    }
    assert!(pairs >= 10, "{pairs} pairs");
}

#[test]
fn precision_robustness() {
    for k in [8, 12] {
        let sum_at = |k: u32| {
            let di4 = di4_data(k).unwrap().lattice().unwrap();
            CompleteMarkedLattice::block_sum(&[&di4, &promoted("Spin(5)", k), &promoted("SU(2)", k)]).unwrap()
        };
        let (a, b) = (sum_at(k), sum_at(k + 4));
        assert_eq!(sorted_tags(&a), sorted_tags(&b));
        assert_eq!(reflection_partition(&a).unwrap().ranks(), reflection_partition(&b).unwrap().ranks());
        for name in ["SU(3)", "G2", "Sp(3)"] {
            assert_eq!(sorted_tags(&promoted(name, k)), sorted_tags(&promoted(name, k + 4)), "{name}");
        }
    }
}

#[test]
fn di4_has_no_reflection_trivial_mod_two() {
    let d = di4_data(16).unwrap();
    let report = d.report().unwrap();
    assert_eq!(report.order, 336);
    assert_eq!(report.reflections_trivial_mod2, 0);
    assert_eq!(report.marking_families, 1);
    let c = d.lattice().unwrap();
    assert_eq!(sorted_tags(&c), vec![FactorTag::DI4.to_string()]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Unimodular conjugates classify like the entry they come from.
    #[test]
    fn random_conjugates_classify(seed in any::<u64>(), k in 8u32..20) {
        let pool: Vec<_> = FACTORS.iter().map(|(n, _)| build_entry(n).unwrap()).collect();
        let mut rng = StdRng::seed_from_u64(seed);
        let m = random_instance(&mut rng, &pool).unwrap();
        let c = promote(&m, k).unwrap();
        let tags = sorted_tags(&c);
        prop_assert_eq!(tags.len(), 1);
        let order = m.group.order();
        let expected: Vec<&str> = FACTORS
            .iter()
            .filter(|(n, _)| build_entry(n).unwrap().lattice.group.order() == order && build_entry(n).unwrap().rank == m.rank())
            .map(|(_, t)| *t)
            .collect();
        prop_assert!(expected.iter().any(|t| tags[0] == format!("Coxeter({t})")), "{:?} vs {:?}", tags, expected);
    }
}

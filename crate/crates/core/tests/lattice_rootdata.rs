use std::collections::HashSet;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::One;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

use weylnorm::catalog::{all_entries, CatalogEntry};
use weylnorm::lattice::reflection::image_indices;
use weylnorm::lattice::{markings_of, reflections_in, IntMatrix, StrictMarking};
use weylnorm::rootdata::{
    count_root_systems, lattice_to_rootsystem, lattice_to_torus, rootsystem_to_lattice, torus_to_lattice,
    MarkedReflectionLattice, Root, RootSystem, TorusElement,
};
use weylnorm::selftest::random_instance;

fn small_pool() -> &'static [CatalogEntry] {
    static POOL: OnceLock<Vec<CatalogEntry>> = OnceLock::new();
    POOL.get_or_init(|| all_entries().unwrap().into_iter().filter(|e| e.rank <= 3).collect())
}

fn outer(b: &[BigInt], beta: &[BigInt]) -> IntMatrix {
    let n = b.len();
    let rows: Vec<Vec<BigInt>> = (0..n)
        .map(|i| (0..n).map(|j| &b[i] * &beta[j] + if i == j { BigInt::one() } else { BigInt::from(0) }).collect())
        .collect();
    IntMatrix::from_rows(&rows).unwrap()
}

fn check_lattice(m: &MarkedReflectionLattice) {
    let elements: HashSet<&IntMatrix> = m.group.elements().iter().collect();
    for a in m.group.elements() {
        for b in m.group.elements() {
            assert!(elements.contains(&a.mul(b)));
        }
    }
    for (_, r) in reflections_in(&m.group) {
        let ms = markings_of(&r);
        assert_eq!(ms.len(), if r.trivial_mod2 { 2 } else { 1 });
        for StrictMarking { b, beta } in &ms {
            assert_eq!(outer(b, beta), r.matrix);
            let pairing: BigInt = b.iter().zip(beta).map(|(x, y)| x * y).sum();
            assert_eq!(pairing, BigInt::from(-2));
        }
        // [ker(1+σ) : im(1−σ)] and [im(1−σ) : 2 ker(1+σ)]; the second is 1 iff trivial mod 2.
        let (upper, lower) = image_indices(&r);
        assert_eq!(&upper * &lower, BigInt::from(2));
        assert_eq!(lower.is_one(), r.trivial_mod2);
    }
}

#[test]
fn catalog_lattices() {
    for e in all_entries().unwrap() {
        if e.lattice.group.order() <= 400 {
            check_lattice(&e.lattice);
        }
        assert_eq!(rootsystem_to_lattice(&lattice_to_rootsystem(&e.lattice)).unwrap(), e.lattice, "{}", e.name);
        e.lattice.check().unwrap();
    }
}

#[test]
fn torus_bijection_is_halving() {
    for e in all_entries().unwrap() {
        let t = lattice_to_torus(&e.lattice);
        for (i, mk) in e.lattice.markings.iter().enumerate() {
            assert_eq!(t.markings[i], TorusElement::from_numerators(&mk.b, &BigInt::from(2)), "{}", e.name);
        }
        assert_eq!(torus_to_lattice(&t).unwrap(), e.lattice);
    }
}

/// Count by trying every per-class choice of `b₀` or `2b₀`.
fn exhaustive_family_count(group: &std::sync::Arc<weylnorm::lattice::FiniteMatrixGroup>) -> u64 {
    let classes = weylnorm::lattice::reflection_classes(group, &weylnorm::lattice::reflection_indices(group)).unwrap();
    let mut families = HashSet::new();
    for bits in 0u32..(1 << classes.len()) {
        let choice: Vec<bool> = (0..classes.len()).map(|i| bits >> i & 1 == 1).collect();
        if let Ok(m) = MarkedReflectionLattice::from_class_choices(group.clone(), &choice) {
            families.insert(format!("{:?}", lattice_to_rootsystem(&m).roots));
        }
    }
    families.len() as u64
}

#[test]
fn root_system_counts() {
    for e in small_pool() {
        assert_eq!(count_root_systems(&e.lattice.group).unwrap(), exhaustive_family_count(&e.lattice.group), "{}", e.name);
    }
}

#[test]
fn added_multiple_breaks_r3() {
    let e = weylnorm::catalog::build_entry("SU(2)").unwrap();
    let rs = lattice_to_rootsystem(&e.lattice);
    let r = &rs.roots[0];
    let mut roots = rs.roots.clone();
    roots.push(Root { vector: r.vector.iter().map(|x| x * 3).collect(), coroot: r.coroot.clone() });
    let bad = RootSystem::new(rs.rank, roots).unwrap().validate();
    assert!(!bad.passed());
    assert!(bad.failed_axioms().contains(&"R3"), "{:?}", bad.failed_axioms());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_lattices_satisfy_reflection_laws(seed in any::<u64>()) {
        let m = random_instance(&mut StdRng::seed_from_u64(seed), small_pool()).unwrap();
        check_lattice(&m);
        m.check().unwrap();
    }

    #[test]
    fn random_lattices_round_trip(seed in any::<u64>()) {
        let m = random_instance(&mut StdRng::seed_from_u64(seed), small_pool()).unwrap();
        let rs = lattice_to_rootsystem(&m);
        prop_assert!(rs.validate().passed());
        prop_assert_eq!(&rootsystem_to_lattice(&rs).unwrap(), &m);
        prop_assert_eq!(&torus_to_lattice(&lattice_to_torus(&m)).unwrap(), &m);
        prop_assert_eq!(&m.dual().unwrap().dual().unwrap(), &m);
    }

    #[test]
    fn validation_rejects_scaled_roots(seed in any::<u64>(), k in 2i64..5, pick in any::<prop::sample::Index>()) {
        let m = random_instance(&mut StdRng::seed_from_u64(seed), small_pool()).unwrap();
        let rs = lattice_to_rootsystem(&m);
        let r = &rs.roots[pick.index(rs.roots.len())];
        let mut roots = rs.roots.clone();
        roots.push(Root { vector: r.vector.iter().map(|x| x * k).collect(), coroot: r.coroot.clone() });
        let report = RootSystem::new(rs.rank, roots).unwrap().validate();
        prop_assert!(!report.passed());
    }
}

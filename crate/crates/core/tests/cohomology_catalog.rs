use std::sync::Arc;

use weylnorm::catalog::{all_entries, build_entry};
use weylnorm::cohomology::{
    centralizer_compat_check, double_coset_formula_check, double_cosets, pointwise_stabilizer, mod2_action, odd_index_restriction_check, shapiro_backward,
    shapiro_forward, sign_cocycle, vanishing_check, Subgroup,
};
use weylnorm::coxeter::find_simple_system;
use weylnorm::extension::{cohomologous, normalizer_extension, presentation_check, split_check, ExtensionCocycle, ReflectionData};
use weylnorm::rootdata::{enumerate_marking_families, lattice_to_rootsystem, lattice_to_torus, TorusElement};

struct Setup {
    table: Arc<weylnorm::lattice::GroupTable>,
    group: Arc<weylnorm::lattice::FiniteMatrixGroup>,
    data: ReflectionData,
    whole: Subgroup,
}

fn setup(name: &str) -> Setup {
    let group = build_entry(name).unwrap().lattice.group.clone();
    let ss = find_simple_system(&group).unwrap();
    let data = ReflectionData::from_simple_system(&ss).unwrap();
    let whole = Subgroup::whole(group.table(), &ss.simple_indices);
    Setup { table: group.table().clone(), group, data, whole }
}

/// `(C_i, k_i)` for reflection class `class`.
fn centralizer(d: &ReflectionData, class: usize) -> (Subgroup, ExtensionCocycle, Vec<bool>) {
    let c = &d.classes[class];
    let h = Subgroup::new(&d.table, &c.splitting.centralizer).unwrap();
    let neg: Vec<bool> = h.elements.iter().map(|&x| c.negates[x]).collect();
    (h.clone(), sign_cocycle(&h, neg.clone()), neg)
}

#[test]
fn shapiro_round_trip() {
    for name in ["SU(2)", "SU(3)", "Spin(5)", "G2", "SU(4)", "Spin(7)", "Sp(3)"] {
        let s = setup(name);
        for class in 0..s.data.classes.len() {
            let (h, k, _) = centralizer(&s.data, class);
            let (ind, pm) = shapiro_forward(&s.whole, &h, &k).unwrap();
            let back = shapiro_backward(&ind, &pm, &s.whole, &h).unwrap();
            assert!(cohomologous(&back, &k).unwrap().is_some(), "{name} class {class}");
        }
    }
}

#[test]
fn double_coset_formula_instances() {
    let mut instances = 0;
    let mut odd = 0;
    for name in ["SU(3)", "Spin(5)", "G2", "SU(4)"] {
        let s = setup(name);
        for hc in 0..s.data.classes.len() {
            let (h, k, _) = centralizer(&s.data, hc);
            let mut ks = vec![s.whole.clone()];
            ks.extend((0..s.data.classes.len()).map(|kc| centralizer(&s.data, kc).0));
            for kk in &ks {
                let rep = double_coset_formula_check(&s.table, &s.whole, kk, &h, &k).unwrap();
                assert!(rep.cohomologous, "{name}: {rep:?}");
                instances += 1;
                if rep.index % 2 == 1 {
                    odd += 1;
                }
            }
        }
    }
    assert!(instances >= 10 && odd > 0, "{instances} instances, {odd} of odd index");
}

/// Reflection-generated stabilizers `W_A` of single torus points of order 2 or 4.
fn stabilizers(name: &str) -> Vec<(TorusElement, Vec<usize>)> {
    let e = build_entry(name).unwrap();
    let m = e.torus();
    let n = e.rank;
    let mut out = Vec::new();
    for den in [2i64, 4] {
        for code in 1..den.pow(n as u32) {
            let v: Vec<(i64, i64)> = (0..n).map(|i| ((code / den.pow(i as u32)) % den, den)).collect();
            let a = TorusElement::from_fractions(&v);
            let wa = pointwise_stabilizer(&m, std::slice::from_ref(&a));
            let refl: Vec<usize> = wa.iter().copied().filter(|w| m.reflections.binary_search(w).is_ok()).collect();
            if wa.len() > 1 && wa.len() < m.group.order() && m.group.table().generated(&refl).len() == wa.len() {
                out.push((a, wa));
            }
        }
    }
    out
}

/// `v_α*(k_i)` is a sign character, so it vanishes iff no element of `K_α` negates `x_α a_i`.
#[test]
fn vanishing_matches_sign_oracle() {
    // Simply connected entries, where every X_A is connected.
    for name in ["SU(3)", "Spin(5)", "G2", "SU(4)", "Spin(7)", "Sp(3)"] {
        let s = setup(name);
        for (_, wa) in stabilizers(name) {
            let kk = Subgroup::new(&s.table, &wa).unwrap();
            for hc in 0..s.data.classes.len() {
                let (h, _, neg) = centralizer(&s.data, hc);
                let c = &s.data.classes[hc];
                let t_i = c.splitting.class_rep;
                let dc = double_cosets(&s.table, &s.whole, &kk, &h).unwrap();
                for case in vanishing_check(&s.table, &s.whole, &kk, &h, t_i, &neg).unwrap() {
                    let x = dc.reps[case.alpha];
                    let xi = s.table.inv(x);
                    let negating = dc.intersections[case.alpha].iter().any(|&k| c.negates[s.table.mul(s.table.mul(xi, k), x)]);
                    assert_eq!(case.restricted_trivial, !negating, "{name}: {case:?}");
                }
            }
        }
    }
}

/// In G2 with `X_A = SO(4)`, `W_A = {1, s, s', −1}`. For a reflection σ outside `W_A`,
/// `W_A ∩ C(σ) = {±1}` contains no reflection and `−1` negates the root of σ, so the
/// restricted class is nonzero. The compatibility conclusion still holds.
#[test]
fn vanishing_fails_for_g2_but_compatibility_holds() {
    let s = setup("G2");
    let e = build_entry("G2").unwrap();
    let a = TorusElement::from_fractions(&[(0, 1), (1, 2)]);
    let wa = pointwise_stabilizer(&e.torus(), std::slice::from_ref(&a));
    assert_eq!(wa.len(), 4);
    let kk = Subgroup::new(&s.table, &wa).unwrap();
    let mut nonzero = 0;
    for hc in 0..s.data.classes.len() {
        let (h, _, neg) = centralizer(&s.data, hc);
        let t_i = s.data.classes[hc].splitting.class_rep;
        for case in vanishing_check(&s.table, &s.whole, &kk, &h, t_i, &neg).unwrap() {
            if case.conjugates_outside && !case.restricted_trivial {
                nonzero += 1;
            }
        }
    }
    assert!(nonzero > 0);
    let rep = centralizer_compat_check(&e.torus(), &[a]).unwrap();
    assert!(rep.applicable);
    assert_eq!(rep.cohomologous, Some(true));
}

#[test]
fn compatibility_on_stabilizers() {
    let mut checked = 0;
    for name in ["SU(3)", "Spin(5)", "G2", "SU(4)", "Spin(7)", "Sp(3)"] {
        let m = build_entry(name).unwrap().torus();
        for (a, _) in stabilizers(name).into_iter().take(12) {
            let rep = centralizer_compat_check(&m, &[a]).unwrap();
            assert!(rep.applicable);
            assert_eq!(rep.cohomologous, Some(true), "{name}: {rep:?}");
            checked += 1;
        }
    }
    assert!(checked >= 5);
}

#[test]
fn odd_index_restriction_is_injective() {
    for name in ["SU(3)", "G2", "Spin(5)"] {
        let s = setup(name);
        let action = mod2_action(&s.group);
        let rank = s.group.dim();
        for class in 0..s.data.classes.len() {
            let (h, _, _) = centralizer(&s.data, class);
            let rep = odd_index_restriction_check(&s.table, &action, rank, &h).unwrap();
            if rep.index % 2 == 1 {
                assert!(rep.injective, "{name}: {rep:?}");
            }
        }
        let rep = odd_index_restriction_check(&s.table, &action, rank, &s.whole).unwrap();
        assert!(rep.injective);
    }
}

#[test]
fn centralizer_compatibility() {
    let mut applicable = 0;
    for name in ["SU(3)", "Spin(5)", "SO(5)", "G2", "Spin(7)", "SU(4)"] {
        let e = build_entry(name).unwrap();
        let m = e.torus();
        for i in 0..e.rank {
            let mut v = vec![(0, 1); e.rank];
            v[i] = (1, 2);
            let rep = centralizer_compat_check(&m, &[TorusElement::from_fractions(&v)]).unwrap();
            if rep.applicable && rep.index > 1 {
                applicable += 1;
                assert_eq!(rep.cohomologous, Some(true), "{name}: {rep:?}");
            }
        }
    }
    assert!(applicable >= 5);
}

#[test]
fn presentations_on_every_entry() {
    for e in all_entries().unwrap() {
        let ss = find_simple_system(&e.lattice.group).unwrap();
        let rep = presentation_check(&e.torus(), &ss).unwrap();
        assert!(rep.passed(), "{}: {rep:?}", e.name);
    }
}

#[test]
fn b2_families_are_distinguished() {
    let s = setup("Spin(5)");
    let fams = enumerate_marking_families(&s.group).unwrap();
    assert_eq!(fams.len(), 2);
    let rs: Vec<_> = fams.iter().map(lattice_to_rootsystem).collect();
    assert_ne!(rs[0], rs[1]);
    assert!(rs.iter().all(|r| r.validate().passed() && r.roots.len() == 8));
    // One family doubles the class trivial mod 2 and the other does not.
    let doubled: Vec<usize> = fams
        .iter()
        .map(|f| f.markings.iter().zip(&f.reflections).filter(|(mk, &r)| {
            let b0 = weylnorm::lattice::Reflection::new(f.group.element(r).clone()).unwrap().root_generator();
            mk.b != b0
        }).count())
        .collect();
    assert!(doubled.contains(&0) && doubled.iter().any(|&d| d > 0), "{doubled:?}");
    let data = Arc::new(s.data.clone());
    let nus: Vec<_> = fams.iter().map(|f| normalizer_extension(&lattice_to_torus(f), &data).unwrap()).collect();
    assert!(cohomologous(&nus[0], &nus[1]).unwrap().is_none());
}

#[test]
fn rank_one_markings_determine_the_class() {
    let su2 = build_entry("SU(2)").unwrap();
    let so3 = build_entry("SO(3)").unwrap();
    assert_eq!(su2.lattice.group.elements(), so3.lattice.group.elements());
    let ss = find_simple_system(&su2.lattice.group).unwrap();
    let data = Arc::new(ReflectionData::from_simple_system(&ss).unwrap());
    let a = normalizer_extension(&su2.torus(), &data).unwrap();
    let b = normalizer_extension(&so3.torus(), &data).unwrap();
    assert!(cohomologous(&a, &b).unwrap().is_none());
    assert!(!split_check(&a).unwrap().split);
    assert!(split_check(&b).unwrap().split);
}

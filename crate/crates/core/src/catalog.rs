//! Built-in marked reflection lattices for compact Lie groups of small rank.
//!
//! Conventions: the lattice is the cocharacter lattice `π₁T`, so roots in the
//! marked sense are the usual coroots and `n_r` is minus the usual root. The
//! simply connected form uses the basis of simple coroots; the adjoint form
//! uses fundamental coweights.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::matrix::{rational_inverse, IntMatrix, IntVector};
use crate::lattice::smith::smith;
use crate::lattice::{generate_group, StrictMarking, DEFAULT_CAP};
use crate::rootdata::{lattice_to_rootsystem, lattice_to_torus, MarkedReflectionLattice, MarkedReflectionTorus, TorusElement};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum LatticeForm {
    SimplyConnected,
    Adjoint,
    Intermediate(String),
    /// Reductive, not semisimple (the `U(2)` model).
    Reductive,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ExpectedFacts {
    /// Whether the normalizer extension is known to split.
    pub split: Option<bool>,
    /// Torus marking of the first simple reflection, when stated.
    pub first_marking: Option<TorusElement>,
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: String,
    pub cartan: String,
    pub rank: usize,
    pub form: LatticeForm,
    pub lattice: MarkedReflectionLattice,
    /// Markings `(a_i, n_i)` of the simple reflections, ordered as in the Cartan matrix.
    pub simple: Vec<StrictMarking>,
    pub expected: ExpectedFacts,
}

impl CatalogEntry {
    pub fn simple_roots(&self) -> Vec<IntVector> {
        self.simple.iter().map(|m| m.b.clone()).collect()
    }

    pub fn torus(&self) -> MarkedReflectionTorus {
        lattice_to_torus(&self.lattice)
    }
}

/// Cartan matrix `C[i][j] = α_j(α_i^∨)` for a single irreducible type.
pub fn cartan_matrix(kind: char, n: usize) -> Result<Vec<Vec<i64>>> {
    let mut c = vec![vec![0i64; n]; n];
    for (i, row) in c.iter_mut().enumerate() {
        row[i] = 2;
    }
    let link = |c: &mut Vec<Vec<i64>>, i: usize, j: usize| {
        c[i][j] = -1;
        c[j][i] = -1;
    };
    match (kind, n) {
        ('A', n) if n >= 1 => (0..n.saturating_sub(1)).for_each(|i| link(&mut c, i, i + 1)),
        ('B', n) if n >= 2 => {
            (0..n - 2).for_each(|i| link(&mut c, i, i + 1));
            c[n - 2][n - 1] = -1;
            c[n - 1][n - 2] = -2;
        }
        ('C', n) if n >= 2 => {
            (0..n - 2).for_each(|i| link(&mut c, i, i + 1));
            c[n - 2][n - 1] = -2;
            c[n - 1][n - 2] = -1;
        }
        ('D', n) if n >= 4 => {
            (0..n - 2).for_each(|i| link(&mut c, i, i + 1));
            link(&mut c, n - 3, n - 1);
        }
        ('G', 2) => {
            c[0][1] = -3;
            c[1][0] = -1;
        }
        ('F', 4) => {
            link(&mut c, 0, 1);
            c[1][2] = -1;
            c[2][1] = -2;
            link(&mut c, 2, 3);
        }
        ('E', n) if (6..=8).contains(&n) => {
            link(&mut c, 0, 2);
            link(&mut c, 1, 3);
            (2..n - 1).for_each(|i| link(&mut c, i, i + 1));
        }
        _ => return Err(Error::UnknownEntry(format!("{kind}{n}"))),
    }
    Ok(c)
}

/// Block-diagonal Cartan matrix of a product type such as `A1xA1`.
fn product_cartan(cartan: &str) -> Result<Vec<Vec<i64>>> {
    let blocks: Vec<Vec<Vec<i64>>> = cartan
        .split('x')
        .map(|part| {
            let mut chars = part.chars();
            let kind = chars.next().ok_or_else(|| Error::UnknownEntry(cartan.into()))?;
            let n: usize = chars.as_str().parse().map_err(|_| Error::UnknownEntry(cartan.into()))?;
            cartan_matrix(kind, n)
        })
        .collect::<Result<_>>()?;
    let total: usize = blocks.iter().map(Vec::len).sum();
    let mut c = vec![vec![0i64; total]; total];
    let mut off = 0;
    for b in blocks {
        for (i, row) in b.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                c[off + i][off + j] = v;
            }
        }
        off += b.len();
    }
    Ok(c)
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Marked lattice on the lattice with the given rational basis (columns, in simple-coroot coordinates).
pub fn lattice_from_cartan(c: &[Vec<i64>], basis: &[Vec<BigRational>]) -> Result<(MarkedReflectionLattice, Vec<StrictMarking>)> {
    let n = c.len();
    // Basis matrix B with columns basis[j]; B⁻¹ maps simple-coroot coordinates to lattice coordinates.
    let bmat: Vec<Vec<BigRational>> = (0..n).map(|i| (0..n).map(|j| basis[j][i].clone()).collect()).collect();
    let b_inv = rational_inverse(&bmat).ok_or_else(|| Error::LatticeOutOfRange("dependent basis".into()))?;
    let integral = |v: Vec<BigRational>, what: &str| -> Result<IntVector> {
        if v.iter().all(|x| x.is_integer()) {
            Ok(v.into_iter().map(|x| x.to_integer()).collect())
        } else {
            Err(Error::LatticeOutOfRange(format!("{what} is not integral on the lattice")))
        }
    };
    let mut simple_markings = Vec::new();
    for i in 0..n {
        // Root: α_i^∨ = e_i; coroot: −α_i with α_i(e_j) = C[j][i].
        let root: Vec<BigRational> = (0..n).map(|k| b_inv[k][i].clone()).collect();
        let root = integral(root, "a root")?;
        let coroot: Vec<BigRational> = (0..n)
            .map(|j| (0..n).map(|k| rat(-c[k][i]) * &bmat[k][j]).fold(BigRational::zero(), |a, b| a + b))
            .collect();
        let coroot = integral(coroot, "a coroot")?;
        simple_markings.push(StrictMarking { b: root, beta: coroot });
    }
    let gens: Vec<IntMatrix> = simple_markings.iter().map(StrictMarking::reflection).collect();
    let group = Arc::new(generate_group(n, &gens, DEFAULT_CAP)?);
    let lattice = MarkedReflectionLattice::from_markings(group, &simple_markings)?;
    Ok((lattice, simple_markings))
}

fn identity_basis(n: usize) -> Vec<Vec<BigRational>> {
    (0..n).map(|j| (0..n).map(|i| if i == j { rat(1) } else { rat(0) }).collect()).collect()
}

/// Fundamental coweights in simple-coroot coordinates: `ω_i^∨ = Σ_j (C⁻¹)_{ij} α_j^∨`.
fn coweight_basis(c: &[Vec<i64>]) -> Vec<Vec<BigRational>> {
    let cm: Vec<Vec<BigRational>> = c.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect();
    rational_inverse(&cm).expect("Cartan matrices are invertible")
}

/// Basis of the lattice generated by the coroot lattice and extra rational vectors.
pub fn lattice_basis_with(n: usize, extra: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let den = extra
        .iter()
        .flatten()
        .fold(BigInt::one(), |acc, x| num_integer::Integer::lcm(&acc, x.denom()));
    let mut rows: Vec<IntVector> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { den.clone() } else { BigInt::zero() }).collect())
        .collect();
    for v in extra {
        rows.push(v.iter().map(|x| (x * BigRational::from_integer(den.clone())).to_integer()).collect());
    }
    let s = smith(&rows, n);
    (0..s.rank)
        .map(|i| s.right_inv[i].iter().map(|x| BigRational::new(x * &s.diag[i], den.clone())).collect())
        .collect()
}

pub struct CatalogSpec {
    pub name: &'static str,
    pub cartan: &'static str,
    pub form: &'static str,
}

/// Every built-in entry name with its type and lattice form.
pub const ENTRIES: &[CatalogSpec] = &[
    CatalogSpec { name: "SU(2)", cartan: "A1", form: "sc" },
    CatalogSpec { name: "SO(3)", cartan: "A1", form: "adjoint" },
    CatalogSpec { name: "U(2)", cartan: "A1", form: "reductive" },
    CatalogSpec { name: "SU(2)xSU(2)", cartan: "A1xA1", form: "sc" },
    CatalogSpec { name: "SO(4)", cartan: "A1xA1", form: "diagonal" },
    CatalogSpec { name: "SO(3)xSO(3)", cartan: "A1xA1", form: "adjoint" },
    CatalogSpec { name: "SU(3)", cartan: "A2", form: "sc" },
    CatalogSpec { name: "PU(3)", cartan: "A2", form: "adjoint" },
    CatalogSpec { name: "SU(4)", cartan: "A3", form: "sc" },
    CatalogSpec { name: "SO(6)", cartan: "A3", form: "2w1" },
    CatalogSpec { name: "PU(4)", cartan: "A3", form: "adjoint" },
    CatalogSpec { name: "Spin(5)", cartan: "B2", form: "sc" },
    CatalogSpec { name: "SO(5)", cartan: "B2", form: "adjoint" },
    CatalogSpec { name: "Spin(7)", cartan: "B3", form: "sc" },
    CatalogSpec { name: "SO(7)", cartan: "B3", form: "adjoint" },
    CatalogSpec { name: "Sp(3)", cartan: "C3", form: "sc" },
    CatalogSpec { name: "PSp(3)", cartan: "C3", form: "adjoint" },
    CatalogSpec { name: "Spin(8)", cartan: "D4", form: "sc" },
    CatalogSpec { name: "PSO(8)", cartan: "D4", form: "adjoint" },
    CatalogSpec { name: "G2", cartan: "G2", form: "sc" },
    CatalogSpec { name: "G2_adjoint", cartan: "G2", form: "adjoint" },
    CatalogSpec { name: "F4", cartan: "F4", form: "sc" },
];

pub fn names() -> Vec<&'static str> {
    ENTRIES.iter().map(|e| e.name).collect()
}

fn u2_entry() -> Result<CatalogEntry> {
    let b: IntVector = vec![BigInt::one(), -BigInt::one()];
    let beta: IntVector = vec![-BigInt::one(), BigInt::one()];
    let mk = StrictMarking { b, beta };
    let group = Arc::new(generate_group(2, &[mk.reflection()], DEFAULT_CAP)?);
    let lattice = MarkedReflectionLattice::from_markings(group, std::slice::from_ref(&mk))?;
    Ok(CatalogEntry {
        name: "U(2)".into(),
        cartan: "A1".into(),
        rank: 2,
        form: LatticeForm::Reductive,
        lattice,
        simple: vec![mk],
        expected: ExpectedFacts {
            split: Some(false),
            first_marking: Some(TorusElement::from_fractions(&[(1, 2), (1, 2)])),
        },
    })
}

pub fn build_entry(name: &str) -> Result<CatalogEntry> {
    let spec = ENTRIES.iter().find(|e| e.name == name).ok_or_else(|| Error::UnknownEntry(name.into()))?;
    if spec.form == "reductive" {
        return u2_entry();
    }
    let c = product_cartan(spec.cartan)?;
    let n = c.len();
    let (basis, form) = match spec.form {
        "sc" => (identity_basis(n), LatticeForm::SimplyConnected),
        "adjoint" => (coweight_basis(&c), LatticeForm::Adjoint),
        "2w1" => {
            let w = coweight_basis(&c);
            let two_w1: Vec<BigRational> = w[0].iter().map(|x| x * rat(2)).collect();
            (lattice_basis_with(n, &[two_w1]), LatticeForm::Intermediate("coroot lattice + 2w1".into()))
        }
        "diagonal" => {
            let half = BigRational::new(1.into(), 2.into());
            (lattice_basis_with(n, &[vec![half.clone(), half]]), LatticeForm::Intermediate("coroot lattice + (w1+w2)".into()))
        }
        other => return Err(Error::UnknownEntry(format!("{name} ({other})"))),
    };
    let (lattice, simple) = lattice_from_cartan(&c, &basis)?;
    let expected = match name {
        "SU(2)" => ExpectedFacts {
            split: Some(false),
            first_marking: Some(TorusElement::from_fractions(&[(1, 2)])),
        },
        "SO(3)" => ExpectedFacts { split: Some(true), first_marking: Some(TorusElement::zero(1)) },
        _ => ExpectedFacts::default(),
    };
    let entry = CatalogEntry { name: name.into(), cartan: spec.cartan.into(), rank: n, form, lattice, simple, expected };
    debug_assert!(lattice_to_rootsystem(&entry.lattice).validate().passed());
    Ok(entry)
}

pub fn all_entries() -> Result<Vec<CatalogEntry>> {
    ENTRIES.iter().map(|e| build_entry(e.name)).collect()
}

/// Entries whose Weyl group has at most `max_order` elements.
pub fn entries_up_to(max_order: usize) -> Result<Vec<CatalogEntry>> {
    Ok(all_entries()?.into_iter().filter(|e| e.lattice.group.order() <= max_order).collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct TorusSplittingReport {
    pub entry: String,
    /// Index of the span of the simple roots in the lattice.
    #[serde(serialize_with = "crate::serde_big::int")]
    pub simple_root_index: BigInt,
    pub roots_are_basis: bool,
    /// Each `h_{s_i}` lies on its own summand `T₀⁻(s_i)`, and these summands are independent.
    pub summands_independent: bool,
}

/// Index of the sublattice spanned by the simple roots.
pub fn simple_root_index(entry: &CatalogEntry) -> BigInt {
    let n = entry.rank;
    if entry.simple.len() != n {
        return BigInt::zero();
    }
    let m = IntMatrix::from_rows(&entry.simple_roots()).expect("square");
    num_traits::Signed::abs(&m.determinant())
}

/// Check that the simple roots `a_i` form a basis of L, so that `T ≅ ⊕ T₀⁻(s_i)`.
pub fn simply_connected_torus_splitting(entry: &CatalogEntry) -> Result<TorusSplittingReport> {
    let index = simple_root_index(entry);
    if !index.is_one() {
        return Err(Error::NotSimplyConnected(format!(
            "{}: simple roots span a sublattice of index {}",
            entry.name, index
        )));
    }
    let torus = entry.torus();
    let two = BigInt::from(2);
    let mut independent = true;
    let roots = entry.simple_roots();
    for (i, mk) in entry.simple.iter().enumerate() {
        let idx = entry.lattice.group.index_of(&mk.reflection()).ok_or(Error::NotInGroup)?;
        let h = torus.marking_of(idx).ok_or(Error::NotAReflection)?;
        // In the simple-root basis, h_{s_i} has coordinates (0,..,1/2,..,0).
        let half = BigRational::new(1.into(), 2.into());
        let rebuilt: Vec<BigRational> =
            (0..entry.rank).map(|k| BigRational::from_integer(roots[i][k].clone()) * &half).collect();
        independent &= TorusElement::new(rebuilt) == *h && *h == TorusElement::from_numerators(&mk.b, &two);
    }
    Ok(TorusSplittingReport { entry: entry.name.clone(), simple_root_index: index, roots_are_basis: true, summands_independent: independent })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootdata::{integral_form, rootsystem_to_lattice};

    #[test]
    fn rank_level_models() {
        let su2 = build_entry("SU(2)").unwrap();
        assert_eq!(su2.lattice.markings[0].b, vec![BigInt::one()]);
        assert_eq!(su2.lattice.markings[0].beta, vec![BigInt::from(-2)]);
        assert_eq!(su2.torus().markings[0], TorusElement::from_fractions(&[(1, 2)]));
        let so3 = build_entry("SO(3)").unwrap();
        assert!(so3.torus().markings[0].is_zero());
        let u2 = build_entry("U(2)").unwrap();
        assert_eq!(u2.torus().markings[0], TorusElement::from_fractions(&[(1, 2), (1, 2)]));
        assert!(matches!(build_entry("E9"), Err(Error::UnknownEntry(_))));
    }

    #[test]
    fn group_orders() {
        for (name, order, refl) in [
            ("SU(3)", 6, 3),
            ("SU(4)", 24, 6),
            ("SO(6)", 24, 6),
            ("Spin(5)", 8, 4),
            ("Spin(7)", 48, 9),
            ("Sp(3)", 48, 9),
            ("G2", 12, 6),
            ("Spin(8)", 192, 12),
            ("SO(4)", 4, 2),
        ] {
            let e = build_entry(name).unwrap();
            assert_eq!(e.lattice.group.order(), order, "{name}");
            assert_eq!(e.lattice.reflections.len(), refl, "{name}");
            assert!(lattice_to_rootsystem(&e.lattice).validate().passed(), "{name}");
        }
    }

    #[test]
    fn agrees_with_integral_form() {
        for name in ["SU(3)", "PU(3)", "Spin(5)", "SO(5)", "G2", "SO(6)"] {
            let e = build_entry(name).unwrap();
            let rs = lattice_to_rootsystem(&e.lattice);
            // Re-derive the coroots from the roots alone, on the standard basis of L.
            let geometric: Vec<Vec<BigRational>> = rs
                .roots
                .iter()
                .map(|r| r.vector.iter().map(|x| BigRational::from_integer(x.clone())).collect())
                .collect();
            let rederived = integral_form(&geometric, &identity_basis(e.rank)).unwrap();
            assert_eq!(rederived, rs, "{name}");
            assert_eq!(rootsystem_to_lattice(&rs).unwrap(), e.lattice);
        }
    }

    #[test]
    fn sc_splitting() {
        for name in ["SU(3)", "Spin(5)", "G2", "SU(2)"] {
            let r = simply_connected_torus_splitting(&build_entry(name).unwrap()).unwrap();
            assert!(r.roots_are_basis && r.summands_independent, "{name}");
        }
        let ad = build_entry("PU(3)").unwrap();
        assert_eq!(simple_root_index(&ad), BigInt::from(3));
        assert!(matches!(simply_connected_torus_splitting(&ad), Err(Error::NotSimplyConnected(_))));
    }

    #[test]
    fn intermediate_lattice_index() {
        let so6 = build_entry("SO(6)").unwrap();
        assert_eq!(simple_root_index(&so6), BigInt::from(2));
        let pu4 = build_entry("PU(4)").unwrap();
        assert_eq!(simple_root_index(&pu4), BigInt::from(4));
    }
}

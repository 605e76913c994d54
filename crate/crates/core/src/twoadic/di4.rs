//! The rank-3 lattice `L_Δ` with `W_Δ = Z/2 × GL(3,F₂)`.
//!
//! The generator matrices are fixture data. They are regenerated by [`di4_oracle`], which
//! projects a permutation representation of `GL(3,F₂)` onto one of its two 3-dimensional
//! constituents; these have character values in `Z[(−1+√−7)/2] ⊂ Z₂`.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::Arc;

use serde::Serialize;

use super::lattice::{CompleteMarkedLattice, TwoAdicGroup};
use super::matrix::{mask, rank_mod2, smith_mod2k, to_i64, TwoAdicMatrix};
use crate::lattice::MatrixGroup;
use crate::{Error, Result};

pub const FIXTURE_FILE: &str = "di4.txt";
pub const FIXTURE_ENV: &str = "WEYLNORM_FIXTURES";
/// Precision at which the fixture is frozen.
pub const FIXTURE_PRECISION: u32 = 40;

const EMBEDDED: &str = include_str!("../../fixtures/di4.txt");

/// Generators of `W_Δ` acting on `Z₂³` at precision `2^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DI4Data {
    pub precision: u32,
    pub generators: Vec<TwoAdicMatrix>,
}

/// Outcome of the invariant checks on [`DI4Data`].
#[derive(Clone, Debug, Serialize)]
pub struct DI4Report {
    pub precision: u32,
    pub order: usize,
    pub contains_minus_identity: bool,
    pub mod2_order: usize,
    pub mod2_irreducible: bool,
    pub reflections: usize,
    pub reflections_trivial_mod2: usize,
    pub marking_families: usize,
}

impl DI4Report {
    /// Name of the first violated invariant.
    pub fn failure(&self) -> Option<&'static str> {
        if self.order != 336 {
            Some("group order 336")
        } else if !self.contains_minus_identity {
            Some("contains -I")
        } else if self.mod2_order != 168 {
            Some("mod 2 image of order 168")
        } else if !self.mod2_irreducible {
            Some("mod 2 action irreducible")
        } else if self.reflections_trivial_mod2 != 0 {
            Some("no reflection trivial mod 2")
        } else if self.marking_families != 1 {
            Some("unique marking family")
        } else {
            None
        }
    }
}

/// Whether `F₂ⁿ` has no proper nonzero subspace invariant under the reductions of `gens`.
pub fn mod2_irreducible(gens: &[TwoAdicMatrix]) -> bool {
    let n = gens.first().map_or(0, |g| g.dim());
    assert!(n <= 16, "mod 2 irreducibility is checked by enumeration");
    let reduced: Vec<TwoAdicMatrix> = gens.iter().map(|g| g.reduce(1).expect("precision ≥ 1")).collect();
    (1u32..(1 << n)).all(|bits| {
        let v: Vec<u64> = (0..n).map(|i| ((bits >> i) & 1) as u64).collect();
        let mut span = vec![v];
        let mut i = 0;
        while i < span.len() {
            for g in &reduced {
                let w = g.apply(&span[i]);
                let mut rows: Vec<Vec<u8>> = span.iter().map(|x| x.iter().map(|&y| y as u8).collect()).collect();
                let before = rank_mod2(&rows);
                rows.push(w.iter().map(|&y| y as u8).collect());
                if rank_mod2(&rows) > before {
                    span.push(w);
                }
            }
            i += 1;
        }
        span.len() == n
    })
}

/// Group generated by the reductions mod 2.
pub fn mod2_image(gens: &[TwoAdicMatrix]) -> Result<TwoAdicGroup> {
    let n = gens.first().map_or(0, |g| g.dim());
    let reduced: Vec<TwoAdicMatrix> = gens.iter().map(|g| g.reduce(1)).collect::<Result<_>>()?;
    MatrixGroup::generate(TwoAdicMatrix::identity(n, 1), &reduced, 1 << 20)
}

impl DI4Data {
    /// The generated group; an infinite closure fails the group order invariant.
    pub fn group(&self) -> Result<TwoAdicGroup> {
        MatrixGroup::generate(TwoAdicMatrix::identity(3, self.precision), &self.generators, 10_000).map_err(|e| match e {
            Error::CapExceeded(cap) => Error::Assertion(format!("DI4 invariant failed: group order 336 (closure exceeds {cap} elements)")),
            e => e,
        })
    }

    /// `(L_Δ, W_Δ)` with its unique marking family.
    pub fn lattice(&self) -> Result<CompleteMarkedLattice> {
        CompleteMarkedLattice::new(Arc::new(self.group()?), |_, _| false)
    }

    pub fn report(&self) -> Result<DI4Report> {
        let group = self.group()?;
        let minus = TwoAdicMatrix::identity(3, self.precision).neg();
        let reflections = super::lattice::two_adic_reflections(&group)?;
        let trivial = reflections.iter().filter(|(_, r)| r.trivial_mod2).count();
        // Families: one binary choice per reflection class made entirely of reflections trivial mod 2.
        let marking_families = if reflections.is_empty() {
            0
        } else {
            let t = group.table();
            let mut seen = std::collections::HashSet::new();
            let mut families = 1usize;
            for (i, r) in &reflections {
                if seen.contains(i) {
                    continue;
                }
                let class = t.conjugacy_class(*i);
                seen.extend(class.iter().copied());
                if r.trivial_mod2 {
                    families *= 2;
                }
            }
            families
        };
        Ok(DI4Report {
            precision: self.precision,
            order: group.order(),
            contains_minus_identity: group.index_of(&minus).is_some(),
            mod2_order: mod2_image(&self.generators)?.order(),
            mod2_irreducible: mod2_irreducible(&self.generators),
            reflections: reflections.len(),
            reflections_trivial_mod2: trivial,
            marking_families,
        })
    }

    /// Check every invariant; the error names the first one that fails.
    pub fn verify(&self) -> Result<DI4Report> {
        let report = self.report()?;
        match report.failure() {
            Some(name) => Err(Error::Assertion(format!("DI4 invariant failed: {name}"))),
            None => Ok(report),
        }
    }

    pub fn reduce(&self, k: u32) -> Result<DI4Data> {
        Ok(DI4Data { precision: k, generators: self.generators.iter().map(|g| g.reduce(k)).collect::<Result<_>>()? })
    }
}

/// `√−7` in `Z/2^k`, the root congruent to 1 mod 4.
pub fn sqrt_minus_seven(k: u32) -> u64 {
    let mut s: u64 = 1;
    for j in 3..k {
        if (s.wrapping_mul(s).wrapping_add(7) >> j) & 1 == 1 {
            s = s.wrapping_add(1 << (j - 1));
        }
    }
    s & mask(k)
}

pub fn gl32() -> Vec<TwoAdicMatrix> {
    (0u64..512)
        .map(|bits| TwoAdicMatrix::from_residues(3, 1, (0..9).map(|i| (bits >> i) & 1).collect()))
        .filter(|m| rank_mod2(&m.rows().iter().map(|r| r.iter().map(|&x| x as u8).collect()).collect::<Vec<_>>()) == 3)
        .collect()
}

pub fn element_order(m: &TwoAdicMatrix) -> usize {
    let mut p = m.clone();
    let mut n = 1;
    while !p.is_identity() {
        p = p.mul(m);
        n += 1;
    }
    n
}

/// `χ(g)` for one 3-dimensional character of `GL(3,F₂)`, as a residue mod `2^k`.
pub fn chi3(g: &TwoAdicMatrix, alpha: u64, k: u32) -> u64 {
    let m = mask(k);
    match element_order(g) {
        1 => 3,
        2 => m,
        3 => 0,
        4 => 1,
        7 => {
            // Characteristic polynomial x³ + x + 1 (trace 0) or x³ + x² + 1 (trace 1).
            if g.trace() & 1 == 0 {
                alpha
            } else {
                m.wrapping_sub(alpha) & m
            }
        }
        _ => unreachable!("GL(3,2) has element orders 1, 2, 3, 4, 7"),
    }
}

/// Rebuild the generators from scratch at precision `2^k`.
///
/// `GL(3,F₂)` acts on the 42 cosets of a cyclic subgroup of order 4; the permutation character
/// contains each 3-dimensional character once, so `E = Σ χ(g⁻¹)P(g)` has rank 3 and the
/// saturation of its image is a `G`-stable lattice.
pub fn di4_oracle(k: u32) -> Result<DI4Data> {
    let work = k + 16;
    if work > 62 {
        return Err(Error::InsufficientPrecision(format!("oracle precision {k} exceeds 46")));
    }
    let g = gl32();
    let index: HashMap<&TwoAdicMatrix, usize> = g.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mul = |a: usize, b: usize| index[&g[a].mul(&g[b])];
    let c4 = g.iter().position(|m| element_order(m) == 4).expect("element of order 4");
    let id = index[&TwoAdicMatrix::identity(3, 1)];
    let sub: Vec<usize> = std::iter::successors(Some(id), |&x| Some(mul(x, c4))).take(4).collect();
    // Left cosets xC, labelled by their least member.
    let coset_of: Vec<usize> = (0..g.len()).map(|x| sub.iter().map(|&c| mul(x, c)).min().expect("nonempty")).collect();
    let mut labels: Vec<usize> = coset_of.clone();
    labels.sort_unstable();
    labels.dedup();
    let npts = labels.len();
    if npts != 42 {
        return Err(Error::Assertion(format!("expected 42 cosets, found {npts}")));
    }
    let point: HashMap<usize, usize> = labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
    let act = |h: usize, p: usize| point[&coset_of[mul(h, labels[p])]];

    let s = sqrt_minus_seven(work + 1);
    let alpha = (s.wrapping_sub(1) >> 1) & mask(work);
    let wm = mask(work);
    let mut e = vec![vec![0u64; npts]; npts];
    for h in 0..g.len() {
        let hinv = (0..g.len()).find(|&x| mul(h, x) == id).expect("inverse");
        let c = chi3(&g[hinv], alpha, work);
        for p in 0..npts {
            let q = act(h, p);
            e[q][p] = e[q][p].wrapping_add(c) & wm;
        }
    }
    let smith = smith_mod2k(&e, npts, work);
    let rank = smith.rank()?;
    if rank != 3 {
        return Err(Error::Assertion(format!("projector has rank {rank}, expected 3")));
    }
    let loss = smith.valuations[..3].iter().copied().max().unwrap_or(0);
    if work - loss < k {
        return Err(Error::InsufficientPrecision(format!("projector loses {loss} bits")));
    }
    let basis = smith.saturated_image()?;
    let coords = |h: usize| -> TwoAdicMatrix {
        // Columns P(h)·B in the basis B, read through the left Smith transform.
        let mut entries = vec![0u64; 9];
        for (j, col) in basis.iter().enumerate() {
            let mut moved = vec![0u64; npts];
            for p in 0..npts {
                moved[act(h, p)] = col[p];
            }
            for i in 0..3 {
                let x = smith.left[i].iter().zip(&moved).fold(0u64, |a, (l, m)| a.wrapping_add(l.wrapping_mul(*m)));
                entries[i * 3 + j] = x & mask(k);
            }
        }
        TwoAdicMatrix::from_residues(3, k, entries)
    };
    // Two generators of GL(3,2): the first element of order 7 and the first involution that
    // together with it generates the whole group.
    let a = g.iter().position(|m| element_order(m) == 7).expect("element of order 7");
    let b = (0..g.len())
        .filter(|&x| element_order(&g[x]) == 2)
        .find(|&x| MatrixGroup::generate(TwoAdicMatrix::identity(3, 1), &[g[a].clone(), g[x].clone()], 200).map(|h| h.order()).ok() == Some(168))
        .expect("generating involution");
    let ma = coords(a);
    let mb = coords(b);
    // P(h)·B = B·M(h) must hold exactly at the target precision.
    for (h, mh) in [(a, &ma), (b, &mb)] {
        for (j, col) in basis.iter().enumerate() {
            for p in 0..npts {
                let lhs = col[p];
                let q = act(h, p);
                let rhs = (0..3).fold(0u64, |acc, i| acc.wrapping_add(basis[i][q].wrapping_mul(mh.get(i, j))));
                // (P(h)B)_q = B_p for q = h·p.
                if (lhs.wrapping_sub(rhs)) & mask(k) != 0 {
                    return Err(Error::Assertion("projected image is not stable under the permutation action".into()));
                }
            }
        }
    }
    let data = DI4Data { precision: k, generators: vec![ma, mb, TwoAdicMatrix::identity(3, k).neg()] };
    data.verify()?;
    Ok(data)
}

/// Fixture text with a precision header and the verification transcript as comments.
pub fn render_fixture(data: &DI4Data) -> Result<String> {
    let report = data.verify()?;
    let mut out = String::new();
    out.push_str("# DI(4) reflection lattice: W = Z/2 x GL(3,F2) on Z_2^3.\n");
    out.push_str("# Regenerate with `weylnorm di4-fixture`; do not edit by hand.\n");
    out.push_str(&format!(
        "# order {} | contains -I {} | mod 2 image {} | mod 2 irreducible {} | reflections {} | trivial mod 2 {} | marking families {}\n",
        report.order,
        report.contains_minus_identity,
        report.mod2_order,
        report.mod2_irreducible,
        report.reflections,
        report.reflections_trivial_mod2,
        report.marking_families
    ));
    out.push_str(&format!("precision {}\n", data.precision));
    for (i, g) in data.generators.iter().enumerate() {
        out.push_str(&format!("generator {i}\n"));
        for row in g.rows_i64() {
            out.push_str(&row.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "));
            out.push('\n');
        }
    }
    Ok(out)
}

pub fn parse_fixture(text: &str) -> Result<DI4Data> {
    let mut precision = None;
    let mut generators = Vec::new();
    let mut rows: Vec<Vec<i64>> = Vec::new();
    let err = |line: usize, message: &str| Error::Parse { line, column: 1, message: message.into() };
    let flush = |rows: &mut Vec<Vec<i64>>, generators: &mut Vec<TwoAdicMatrix>, k: Option<u32>, line: usize| -> Result<()> {
        if rows.is_empty() {
            return Ok(());
        }
        let k = k.ok_or_else(|| err(line, "matrix before precision header"))?;
        if rows.len() != 3 {
            return Err(err(line, "generator must have 3 rows"));
        }
        generators.push(TwoAdicMatrix::from_rows(rows, k)?);
        rows.clear();
        Ok(())
    };
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let lineno = n + 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("precision") {
            let k: u32 = rest.trim().parse().map_err(|_| err(lineno, "bad precision"))?;
            if !(8..=62).contains(&k) {
                return Err(err(lineno, "precision must lie in 8..=62"));
            }
            precision = Some(k);
        } else if line.starts_with("generator") {
            flush(&mut rows, &mut generators, precision, lineno)?;
        } else {
            let row: Vec<i64> = line
                .split_whitespace()
                .map(|t| t.parse::<i64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| err(lineno, "bad matrix entry"))?;
            if row.len() != 3 {
                return Err(err(lineno, "matrix rows have 3 entries"));
            }
            rows.push(row);
        }
    }
    flush(&mut rows, &mut generators, precision, text.lines().count())?;
    let precision = precision.ok_or_else(|| err(1, "missing precision header"))?;
    if generators.is_empty() {
        return Err(err(1, "no generators"));
    }
    Ok(DI4Data { precision, generators })
}

/// Location of the fixture when overridden through the environment.
pub fn fixture_override() -> Option<PathBuf> {
    std::env::var_os(FIXTURE_ENV).map(|d| PathBuf::from(d).join(FIXTURE_FILE))
}

/// Fixture text: the override file if set, else the copy compiled into the crate.
pub fn fixture_text() -> Result<String> {
    match fixture_override() {
        Some(path) => Ok(std::fs::read_to_string(path)?),
        None => Ok(EMBEDDED.to_string()),
    }
}

/// `W_Δ` on `L_Δ` at precision `2^k`, read from the fixture and verified.
pub fn di4_data(k: u32) -> Result<DI4Data> {
    let stored = parse_fixture(&fixture_text()?)?;
    if k > stored.precision {
        return Err(Error::InsufficientPrecision(format!("fixture holds precision {}, asked for {k}", stored.precision)));
    }
    let data = stored.reduce(k)?;
    data.verify()?;
    Ok(data)
}

/// Symmetric lifts of the generator entries, for display.
pub fn generator_rows(data: &DI4Data) -> Vec<Vec<Vec<i64>>> {
    data.generators.iter().map(|g| g.rows_i64()).collect()
}

pub fn entry_lift(x: u64, k: u32) -> i64 {
    to_i64(x, k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_root() {
        for k in [8, 20, 47] {
            let s = sqrt_minus_seven(k);
            assert_eq!(s.wrapping_mul(s).wrapping_add(7) & mask(k), 0);
        }
    }

    #[test]
    fn gl32_has_168_elements() {
        assert_eq!(gl32().len(), 168);
    }

    #[test]
    fn oracle_matches_fixture() {
        let fresh = di4_oracle(FIXTURE_PRECISION).unwrap();
        let stored = parse_fixture(EMBEDDED).unwrap();
        assert_eq!(fresh, stored);
        assert_eq!(render_fixture(&fresh).unwrap(), EMBEDDED);
    }

    #[test]
    fn invariants() {
        let d = di4_data(12).unwrap();
        let r = d.verify().unwrap();
        assert_eq!(r.order, 336);
        assert_eq!(r.reflections, 21);
        assert_eq!(r.reflections_trivial_mod2, 0);
        assert_eq!(r.marking_families, 1);
    }

    #[test]
    fn corrupted_fixture_is_named() {
        let mut d = di4_data(12).unwrap();
        d.generators.pop();
        let err = d.verify().unwrap_err().to_string();
        assert!(err.contains("DI4 invariant failed"), "{err}");
        // A changed entry makes the closure infinite.
        let d = di4_data(12).unwrap();
        let mut rows = d.generators[1].rows_i64();
        rows[1][0] += 2;
        let mut bad = d.clone();
        bad.generators[1] = TwoAdicMatrix::from_rows(&rows, 12).unwrap();
        let err = bad.verify().unwrap_err().to_string();
        assert!(err.contains("DI4 invariant failed: group order 336"), "{err}");
    }

    #[test]
    fn parse_errors_carry_lines() {
        let err = parse_fixture("precision 16\ngenerator 0\n1 2\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
    }

    #[test]
    fn normalizer_extension_of_di4() {
        use crate::extension::CheckPlan;
        let c = di4_data(12).unwrap().lattice().unwrap();
        let nu = crate::twoadic::discrete_normalizer_extension(&c).unwrap();
        assert_eq!(nu.order(), 336);
        assert!(nu.check_identity(CheckPlan::Exhaustive).passed());
        assert!(crate::twoadic::discrete_lift_check(&c).unwrap().iter().all(|&b| b));
    }
}

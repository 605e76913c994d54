//! Reports over input documents, with a plain-text rendering and a serde form.
//!
//! Each report is a library call; the command-line front end only prints them.

use std::fmt::Write as _;
use std::sync::Arc;

use num_rational::Ratio;
use serde::Serialize;

use crate::catalog::{self, CatalogEntry, LatticeForm};
use crate::cohomology::Subgroup;
use crate::coxeter::find_simple_system;
use crate::document::{Block, Document, DocumentKind};
use crate::extension::{
    normalizer_extension, presentation_check, split_check, CheckPlan, ExtensionCocycle, PresentationReport,
    ReflectionData, SplitReport,
};
use crate::lattice::{markings_of, reflection_classes, reflections_in};
use crate::rootdata::{
    count_root_systems, lattice_to_rootsystem, lattice_to_torus, rootsystem_to_lattice, torus_to_lattice,
    MarkedReflectionLattice,
};
use crate::selftest::SelftestReport;
use crate::twoadic::{self, classify_factor, reflection_partition, CompleteMarkedLattice};
use crate::{Error, Result};

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub kind: DocumentKind,
    pub name: Option<String>,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect()
    }

    pub fn render(&self) -> String {
        let mut out = header(self.kind, self.name.as_deref());
        for c in &self.checks {
            let _ = writeln!(out, "{} {}: {}", if c.passed { "ok  " } else { "FAIL" }, c.name, c.detail);
        }
        let _ = if self.passed() {
            writeln!(out, "valid")
        } else {
            writeln!(out, "invalid: {}", self.failed().join(", "))
        };
        out
    }
}

fn header(kind: DocumentKind, name: Option<&str>) -> String {
    match name {
        Some(n) => format!("{} {}\n", kind.as_str(), n),
        None => format!("{}\n", kind.as_str()),
    }
}

struct Checks(Vec<Check>);

impl Checks {
    fn push(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.0.push(Check { name: name.to_string(), passed, detail: detail.into() });
    }

    /// Record a failed check for input errors; parse, I/O and assertion errors propagate.
    fn attempt<T>(&mut self, name: &str, r: Result<T>) -> Result<Option<T>> {
        match r {
            Ok(v) => Ok(Some(v)),
            Err(e @ (Error::Parse { .. } | Error::Assertion(_) | Error::Io(_))) => Err(e),
            Err(e) => {
                self.push(name, false, e.to_string());
                Ok(None)
            }
        }
    }
}

fn identity_detail(r: &crate::extension::IdentityReport) -> String {
    let how = if r.exhaustive { "exhaustive" } else { "sampled" };
    if r.passed() {
        format!("{} triples, {how}", r.triples_checked)
    } else if !r.normalized {
        "not normalized".to_string()
    } else {
        format!("fails at {:?}", r.failures[0])
    }
}

fn nu_of(m: &MarkedReflectionLattice) -> Result<ExtensionCocycle> {
    let ss = find_simple_system(&m.group)?;
    let data = Arc::new(ReflectionData::from_simple_system(&ss)?);
    normalizer_extension(&lattice_to_torus(m), &data)
}

fn lattice_checks(checks: &mut Checks, m: &MarkedReflectionLattice) -> Result<Option<ExtensionCocycle>> {
    let order = m.group.order();
    let generated = m.group.table().generated(&m.reflections).len();
    checks.push(
        "reflection group",
        generated == order,
        format!("order {order}, {} reflections generate {generated} elements", m.reflections.len()),
    );
    if checks.attempt("markings", m.check())?.is_some() {
        checks.push("markings", true, format!("{} strict markings", m.markings.len()));
    }
    let rs = lattice_to_rootsystem(m);
    for c in rs.validate().checks {
        checks.push(&c.axiom, c.passed, c.detail);
    }
    if let Some(back) = checks.attempt("round trip", rootsystem_to_lattice(&rs))? {
        checks.push("round trip", back == *m, "lattice -> root system -> lattice");
    }
    let Some(nu) = checks.attempt("normalizer cocycle", nu_of(m))? else {
        return Ok(None);
    };
    let r = nu.check_identity(CheckPlan::Auto);
    checks.push("cocycle identity", r.passed(), identity_detail(&r));
    Ok(Some(nu))
}

/// Run the validators matching the document kind.
pub fn validate(doc: &Document) -> Result<ValidationReport> {
    let mut checks = Checks(Vec::new());
    match doc.kind {
        DocumentKind::RootSystem => {
            let rs = doc.to_rootsystem()?;
            let axioms = rs.validate();
            let ok = axioms.passed();
            for c in axioms.checks {
                checks.push(&c.axiom, c.passed, c.detail);
            }
            if ok {
                if let Some(m) = checks.attempt("lattice", rootsystem_to_lattice(&rs))? {
                    lattice_checks(&mut checks, &m)?;
                }
            }
        }
        DocumentKind::Lattice => {
            if let Some(m) = checks.attempt("markings", doc.to_lattice())? {
                lattice_checks(&mut checks, &m)?;
            }
        }
        DocumentKind::TorusMarking => {
            if let Some(t) = checks.attempt("torus markings", doc.to_torus())? {
                if checks.attempt("torus markings", t.check())?.is_some() {
                    checks.push("torus markings", true, format!("{} markings of order 2", t.markings.len()));
                }
                if let Some(m) = checks.attempt("lattice", torus_to_lattice(&t))? {
                    lattice_checks(&mut checks, &m)?;
                }
            }
        }
        DocumentKind::Subgroup => {
            if let Some(m) = checks.attempt("markings", doc.to_lattice())? {
                let nu = lattice_checks(&mut checks, &m)?;
                if let Some(idx) = checks.attempt("subgroup", doc.subgroup_indices(&m))? {
                    let h = Subgroup::generated(m.group.table(), &idx)?;
                    checks.push("subgroup", true, format!("order {}, index {}", h.order(), m.group.order() / h.order()));
                    if let Some(nu) = nu {
                        let r = nu.restrict(h.table.clone(), h.generators.clone(), h.elements.clone()).check_identity(CheckPlan::Auto);
                        checks.push("restricted cocycle identity", r.passed(), identity_detail(&r));
                    }
                }
            }
        }
        DocumentKind::TwoAdic => {
            if doc.blocks.contains(&Block::Di4) {
                let report = twoadic::di4_data(doc.precision.unwrap_or(twoadic::DEFAULT_PRECISION))?.report()?;
                checks.push("DI4", report.failure().is_none(), format!("order {}, mod 2 image {}", report.order, report.mod2_order));
            }
            if let Some(c) = checks.attempt("lattice", doc.to_complete(None))? {
                if checks.attempt("markings", c.check())?.is_some() {
                    checks.push("markings", true, format!("order {}, precision {}", c.group.order(), c.precision()));
                }
                if let Some(lifts) = checks.attempt("reflection lifts", twoadic::discrete_lift_check(&c))? {
                    let bad = lifts.iter().filter(|&&b| !b).count();
                    checks.push("reflection lifts", bad == 0, format!("{} reflections, {bad} without a lift", lifts.len()));
                }
                if let Some(nu) = checks.attempt("cocycle identity", twoadic::discrete_normalizer_extension(&c))? {
                    let r = nu.check_identity(CheckPlan::Auto);
                    checks.push("cocycle identity", r.passed(), identity_detail(&r));
                }
            }
        }
    }
    Ok(ValidationReport { kind: doc.kind, name: doc.name.clone(), checks: checks.0 })
}

#[derive(Clone, Debug, Serialize)]
pub struct MarkingRow {
    /// Element index in the generated group.
    pub element: usize,
    pub class: usize,
    pub trivial_mod2: bool,
    /// Strict markings available for this reflection.
    pub available: usize,
    pub b: Vec<String>,
    pub beta: Vec<String>,
    pub torus: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MarkingsReport {
    pub name: Option<String>,
    pub rank: usize,
    pub order: usize,
    pub classes: usize,
    pub reflections: Vec<MarkingRow>,
    /// Root systems with this Weyl group, up to equality.
    pub root_systems: Option<u64>,
    /// For 2-adic documents: the number of markings of each reflection.
    pub two_adic_counts: Option<Vec<usize>>,
}

impl MarkingsReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        if let Some(n) = &self.name {
            let _ = writeln!(out, "{n}");
        }
        let _ = writeln!(out, "rank {}, order {}, {} reflections in {} classes", self.rank, self.order, self.reflections.len().max(self.two_adic_counts.as_ref().map_or(0, Vec::len)), self.classes);
        for r in &self.reflections {
            let _ = writeln!(
                out,
                "class {} element {}: b = ({}), beta = ({}), h = ({}){}",
                r.class,
                r.element,
                r.b.join(", "),
                r.beta.join(", "),
                r.torus.join(", "),
                if r.trivial_mod2 { ", trivial mod 2" } else { "" }
            );
        }
        if let Some(n) = self.root_systems {
            let _ = writeln!(out, "root systems with this Weyl group: {n}");
        }
        if let Some(counts) = &self.two_adic_counts {
            let _ = writeln!(out, "markings per reflection: {}", counts.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" "));
        }
        out
    }
}

pub fn markings(doc: &Document) -> Result<MarkingsReport> {
    if doc.kind == DocumentKind::TwoAdic {
        let c = doc.to_complete(None)?;
        let t = c.group.table();
        let mut reps: Vec<usize> = c.reflections.iter().map(|&r| t.conjugacy_class(r)[0]).collect();
        reps.sort_unstable();
        reps.dedup();
        let classes = reps.len();
        return Ok(MarkingsReport {
            name: doc.name.clone(),
            rank: c.rank(),
            order: c.group.order(),
            classes,
            reflections: Vec::new(),
            root_systems: None,
            two_adic_counts: Some(c.marking_counts()),
        });
    }
    let m = doc.to_lattice()?;
    let classes = reflection_classes(&m.group, &m.reflections)?;
    let t = lattice_to_torus(&m);
    let mut rows = Vec::new();
    for (pos, (element, r)) in reflections_in(&m.group).into_iter().enumerate() {
        let class = classes.iter().position(|c| c.contains(&element)).unwrap_or(0);
        let mk = &m.markings[pos];
        rows.push(MarkingRow {
            element,
            class,
            trivial_mod2: r.trivial_mod2,
            available: markings_of(&r).len(),
            b: mk.b.iter().map(|x| x.to_string()).collect(),
            beta: mk.beta.iter().map(|x| x.to_string()).collect(),
            torus: t.markings[pos].coords().iter().map(|x| x.to_string()).collect(),
        });
    }
    Ok(MarkingsReport {
        name: doc.name.clone(),
        rank: m.rank(),
        order: m.group.order(),
        classes: classes.len(),
        reflections: rows,
        root_systems: Some(count_root_systems(&m.group)?),
        two_adic_counts: None,
    })
}

#[derive(Clone, Copy, Debug, Default)]
pub struct NtOptions {
    pub presentation_check: bool,
    pub split_check: bool,
    pub table: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneratorValue {
    pub i: usize,
    pub j: usize,
    pub value: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SplitSummary {
    pub verdict: &'static str,
    pub report: SplitReport,
    /// `b(s_i)` on the generators when a splitting cochain was found.
    pub witness: Option<Vec<Vec<String>>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct NtReport {
    pub name: Option<String>,
    pub order: usize,
    pub coefficients: String,
    /// Element indices of the generators `s_i`.
    pub generators: Vec<usize>,
    /// `ν(s_i, s_j)`.
    pub values: Vec<GeneratorValue>,
    pub split: Option<SplitSummary>,
    pub presentation: Option<PresentationReport>,
    /// 2-adic documents: per reflection, whether a lift with `q² = h_σ` exists.
    pub lifts: Option<Vec<bool>>,
    pub table: Option<String>,
}

impl NtReport {
    pub fn passed(&self) -> bool {
        self.presentation.as_ref().is_none_or(PresentationReport::passed) && self.lifts.as_ref().is_none_or(|l| l.iter().all(|&b| b))
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        if let Some(n) = &self.name {
            let _ = writeln!(out, "{n}");
        }
        let _ = writeln!(out, "order {}, coefficients {}", self.order, self.coefficients);
        for v in &self.values {
            let _ = writeln!(out, "nu(s{}, s{}) = ({})", v.i + 1, v.j + 1, v.value.join(", "));
        }
        if let Some(s) = &self.split {
            let _ = writeln!(out, "split check: {}", s.verdict);
            if let Some(w) = &s.witness {
                for (i, b) in w.iter().enumerate() {
                    let _ = writeln!(out, "  b(s{}) = ({})", i + 1, b.join(", "));
                }
            }
        }
        if let Some(p) = &self.presentation {
            let _ = writeln!(out, "presentation check: {}", if p.passed() { "pass" } else { "FAIL" });
            let _ = writeln!(out, "  squares {}, conjugation {}", p.squares.iter().all(|&b| b), p.conjugation);
            for b in &p.braids {
                let _ = writeln!(out, "  m{}{} = {}: {}", b.i + 1, b.j + 1, b.m, if b.holds { "holds" } else { "fails" });
            }
        }
        if let Some(l) = &self.lifts {
            let _ = writeln!(out, "reflection lifts: {}/{}", l.iter().filter(|&&b| b).count(), l.len());
        }
        if let Some(t) = &self.table {
            out.push_str(t);
        }
        out
    }
}

fn fractions(v: &[i64], den: Option<i64>) -> Vec<String> {
    v.iter()
        .map(|&x| match den {
            Some(d) => Ratio::new(x, d).to_string(),
            None => x.to_string(),
        })
        .collect()
}

/// The normalizer extension of the document with the requested verdicts.
pub fn build_nt(doc: &Document, opts: NtOptions) -> Result<NtReport> {
    let (nu, presentation, lifts) = if doc.kind == DocumentKind::TwoAdic {
        let c = doc.to_complete(None)?;
        let lifts = opts.presentation_check.then(|| twoadic::discrete_lift_check(&c)).transpose()?;
        (twoadic::discrete_normalizer_extension(&c)?, None, lifts)
    } else {
        let t = doc.to_torus()?;
        let ss = find_simple_system(&t.group)?;
        let data = Arc::new(ReflectionData::from_simple_system(&ss)?);
        let nu = normalizer_extension(&t, &data)?;
        let p = opts.presentation_check.then(|| presentation_check(&t, &ss)).transpose()?;
        (nu, p, None)
    };
    let den = nu.module().denominator();
    let gens = nu.generators().to_vec();
    let values = (0..gens.len())
        .flat_map(|i| (0..gens.len()).map(move |j| (i, j)))
        .map(|(i, j)| GeneratorValue { i, j, value: fractions(&nu.value(gens[i], gens[j]), den) })
        .collect();
    let split = if opts.split_check {
        let report = split_check(&nu)?;
        let witness = report.witness.as_ref().map(|b| gens.iter().map(|&g| fractions(&b.values[g], b.denominator())).collect());
        Some(SplitSummary { verdict: if report.split { "split" } else { "nonsplit" }, report, witness })
    } else {
        None
    };
    Ok(NtReport {
        name: doc.name.clone(),
        order: nu.order(),
        coefficients: nu.module().label.clone(),
        generators: gens,
        values,
        split,
        presentation,
        lifts,
        table: opts.table.then(|| nu.export_table()),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CompareReport {
    pub same_group: bool,
    pub same_markings: bool,
    pub same_rootsystem: bool,
    /// The second lattice is the dual of the first.
    pub dual: bool,
    /// Whether the normalizer extensions are cohomologous; `None` for different groups.
    pub cohomologous: Option<bool>,
}

impl CompareReport {
    pub fn equivalent(&self) -> bool {
        self.cohomologous == Some(true)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "same group: {}", self.same_group);
        let _ = writeln!(out, "same markings: {}", self.same_markings);
        let _ = writeln!(out, "same root system: {}", self.same_rootsystem);
        let _ = writeln!(out, "dual: {}", self.dual);
        let _ = match self.cohomologous {
            Some(c) => writeln!(out, "normalizer extensions cohomologous: {c}"),
            None => writeln!(out, "normalizer extensions: not comparable"),
        };
        out
    }
}

/// Compare two integral documents over the same reflection group.
pub fn compare(a: &Document, b: &Document) -> Result<CompareReport> {
    let (a, b) = (a.to_lattice()?, b.to_lattice()?);
    let mut ea: Vec<_> = a.group.elements().iter().collect();
    let mut eb: Vec<_> = b.group.elements().iter().collect();
    ea.sort();
    eb.sort();
    let same_rootsystem = lattice_to_rootsystem(&a) == lattice_to_rootsystem(&b);
    if ea != eb {
        return Ok(CompareReport { same_group: false, same_markings: false, same_rootsystem, dual: false, cohomologous: None });
    }
    let b = MarkedReflectionLattice::from_markings(a.group.clone(), &b.markings)?;
    let dual = a.dual()? == b;
    let nu_a = nu_of(&a)?;
    let ss = find_simple_system(&a.group)?;
    let data = Arc::new(ReflectionData::from_simple_system(&ss)?);
    let nu_b = normalizer_extension(&lattice_to_torus(&b), &data)?;
    let cohomologous = crate::extension::cohomologous(&nu_a, &nu_b)?.is_some();
    Ok(CompareReport { same_group: true, same_markings: a == b, same_rootsystem, dual, cohomologous: Some(cohomologous) })
}

#[derive(Clone, Debug, Serialize)]
pub struct FactorSummary {
    pub tag: String,
    pub rank: usize,
    pub order: usize,
    pub precision: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassifyReport {
    pub precision: u32,
    pub rank: usize,
    pub order: usize,
    pub factors: Vec<FactorSummary>,
    /// Rank of the summand fixed by the whole group.
    pub fixed_rank: usize,
}

impl ClassifyReport {
    pub fn render(&self) -> String {
        let mut out = format!("rank {}, order {}, precision {}\n", self.rank, self.order, self.precision);
        for f in &self.factors {
            let _ = writeln!(out, "{} rank {} order {} precision {}", f.tag, f.rank, f.order, f.precision);
        }
        let _ = writeln!(out, "{} factors, fixed rank {}", self.factors.len(), self.fixed_rank);
        out
    }
}

pub fn classify_lattice(c: &CompleteMarkedLattice) -> Result<ClassifyReport> {
    let part = reflection_partition(c)?;
    let factors = part
        .factors
        .iter()
        .map(|f| {
            Ok(FactorSummary {
                tag: classify_factor(&f.lattice)?.to_string(),
                rank: f.rank(),
                order: f.lattice.group.order(),
                precision: f.lattice.precision(),
            })
        })
        .collect::<Result<_>>()?;
    Ok(ClassifyReport { precision: c.precision(), rank: c.rank(), order: c.group.order(), factors, fixed_rank: part.fixed_basis.len() })
}

/// Classify the document's 2-adic lattice; integral documents are promoted.
pub fn classify2adic(doc: &Document, precision: Option<u32>) -> Result<ClassifyReport> {
    classify_lattice(&doc.to_complete(precision)?)
}

#[derive(Clone, Debug, Serialize)]
pub struct CatalogRow {
    pub name: String,
    pub cartan: String,
    pub rank: usize,
    pub form: LatticeForm,
    pub order: usize,
    pub reflections: usize,
}

pub fn catalog_rows() -> Result<Vec<CatalogRow>> {
    catalog::all_entries().map(|es| es.iter().map(catalog_row).collect())
}

fn catalog_row(e: &CatalogEntry) -> CatalogRow {
    CatalogRow {
        name: e.name.clone(),
        cartan: e.cartan.clone(),
        rank: e.rank,
        form: e.form.clone(),
        order: e.lattice.group.order(),
        reflections: e.lattice.reflections.len(),
    }
}

pub fn render_catalog(rows: &[CatalogRow]) -> String {
    let mut out = String::new();
    for r in rows {
        let _ = writeln!(out, "{:<14} {:<6} rank {} order {:>4} reflections {:>2} {:?}", r.name, r.cartan, r.rank, r.order, r.reflections, r.form);
    }
    out
}

/// A catalog entry as a document: the marked lattice, or its root system.
pub fn export_entry(name: &str, rootsystem: bool) -> Result<Document> {
    let e = catalog::build_entry(name)?;
    Ok(if rootsystem {
        Document::from_rootsystem(Some(&e.name), &lattice_to_rootsystem(&e.lattice))
    } else {
        Document::from_lattice(Some(&e.name), &e.lattice)
    })
}

pub fn render_selftest(r: &SelftestReport) -> String {
    let mut out = String::new();
    for c in &r.results {
        let _ = writeln!(out, "{} [{:.2}s of {}s]", c.line(), c.seconds, c.budget);
    }
    let total: f64 = r.results.iter().map(|c| c.seconds).sum();
    let failed = r.results.iter().filter(|c| !c.passed).count();
    let _ = writeln!(out, "{} of {} criteria passed in {total:.2}s", r.results.len() - failed, r.results.len());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(name: &str) -> Document {
        export_entry(name, false).unwrap()
    }

    #[test]
    fn exported_entries_validate() {
        for name in ["SU(2)", "SO(3)", "U(2)", "G2"] {
            let r = validate(&doc(name)).unwrap();
            assert!(r.passed(), "{}", r.render());
            let rs = validate(&export_entry(name, true).unwrap()).unwrap();
            assert!(rs.passed(), "{}", rs.render());
        }
    }

    #[test]
    fn nt_verdicts() {
        let opts = NtOptions { presentation_check: true, split_check: true, table: false };
        let su2 = build_nt(&doc("SU(2)"), opts).unwrap();
        assert_eq!(su2.split.as_ref().unwrap().verdict, "nonsplit");
        assert_eq!(su2.values[0].value, vec!["1/2"]);
        assert_eq!(build_nt(&doc("SO(3)"), opts).unwrap().split.unwrap().verdict, "split");
        let g2 = build_nt(&doc("G2"), opts).unwrap();
        assert!(g2.passed());
        assert_eq!(g2.presentation.unwrap().braids[0].m, 6);
    }

    #[test]
    fn compare_rank_one() {
        let r = compare(&doc("SU(2)"), &doc("SO(3)")).unwrap();
        assert!(r.same_group && !r.same_markings && r.dual);
        assert_eq!(r.cohomologous, Some(false));
        assert!(compare(&doc("G2"), &doc("G2")).unwrap().equivalent());
    }

    #[test]
    fn classify_blocks() {
        let d = Document::parse("kind two-adic\nprecision 12\nblock di4\nblock catalog Spin(5)\n").unwrap();
        let r = classify2adic(&d, None).unwrap();
        let mut tags: Vec<&str> = r.factors.iter().map(|f| f.tag.as_str()).collect();
        tags.sort();
        assert_eq!(tags, ["Coxeter(B2)", "DI4"]);
        let empty = Document::parse("kind two-adic\nrank 0\n").unwrap();
        assert!(classify2adic(&empty, None).unwrap().factors.is_empty());
    }
}

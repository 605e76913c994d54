"""Smoke test for the weylnorm Python bindings.

Build and install first:

    pip install --no-build-isolation ./crates/py
"""

import weylnorm_py as w


def check(cond, what):
    if not cond:
        raise SystemExit(f"FAIL {what}")
    print(f"ok   {what}")


def main():
    names = w.catalog_names()
    check("G2" in names and "F4" in names, "catalog lists G2 and F4")

    su2 = w.Lattice.catalog("SU(2)")
    so3 = w.Lattice.catalog("SO(3)")
    check(su2.markings() == [([1], [-2])], "SU(2) marking b = 1, beta = -2")
    check(su2.torus_markings() == [["1/2"]], "SU(2) torus marking 1/2")
    check(su2.dual() == so3, "SU(2) and SO(3) are dual")

    nu = su2.normalizer_extension()
    s = nu.generators[0]
    check(nu.value(s, s) == ["1/2"], "nu(s, s) = 1/2 for SU(2)")
    check(nu.check_identity(), "cocycle identity")
    check(not nu.split()[0], "SU(2) normalizer does not split")
    split, witness = so3.normalizer_extension().split()
    check(split and witness is not None, "SO(3) normalizer splits")
    check(not nu.cohomologous(so3.normalizer_extension()), "SU(2) and SO(3) classes differ")

    spin5 = w.Lattice.catalog("Spin(5)")
    check(spin5.count_root_systems() == 2, "two root systems with Weyl group B2")
    rs = spin5.root_system()
    check(len(rs) == 8 and rs.is_valid(), "Spin(5) root system is valid")
    check(rs.to_lattice() == spin5, "root system round trip")

    vector, coroot = rs.roots()[0]
    bad = w.RootSystem(rs.rank, rs.roots() + [([3 * x for x in vector], coroot)])
    failed = [a for a, ok, _ in bad.validate() if not ok]
    check("R3" in failed, "added multiple of a root fails R3")

    g2 = w.Lattice.catalog("G2")
    doc = g2.to_document("G2")
    checks = w.validate(doc)["checks"]
    check(checks and all(c["passed"] for c in checks), "G2 document validates")
    nt = w.build_nt(doc, presentation_check=True, split_check=True)
    check(nt["presentation"]["braids"][0]["m"] == 6, "G2 braid relation with m = 6")
    check(all(b["holds"] for b in nt["presentation"]["braids"]), "G2 presentation holds")

    try:
        w.Lattice.from_document("kind lattice\nrank 1\ngenerator\n")
    except w.ParseError as e:
        check("line 4" in str(e), "truncated document raises ParseError")
    else:
        raise SystemExit("FAIL truncated document parsed")

    k = 12
    total = w.TwoAdicLattice.block_sum([w.TwoAdicLattice.di4(k), spin5.promote(k), su2.promote(k)])
    check(total.rank == 6 and total.order == 336 * 8 * 2, "DI4 + B2 + A1 block sum")
    check(sorted(total.classify()) == ["Coxeter(A1)", "Coxeter(B2)", "DI4"], "2-adic classification")
    report = w.classify2adic("kind two-adic\nrank 0\n")
    check(report["factors"] == [], "empty rank-0 document has no factors")

    st = w.run_selftest("quick")
    failing = [r["number"] for r in st["results"] if not r["passed"]]
    print(f"selftest quick: failing criteria {failing}")
    check(failing == [6], "selftest: only the U(2) criterion fails")
    print("smoke test passed")


if __name__ == "__main__":
    main()

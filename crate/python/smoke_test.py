"""Smoke test for the dynaport_py bindings: one call per operation."""

import json

import dynaport_py as dp


def load(text):
    doc = json.loads(text)
    assert doc["schema_version"] == dp.SCHEMA_VERSION, doc
    return doc


def main():
    phi = dp.Map("x^2+1")
    assert phi.degree == 2 and phi.base == "nf"
    assert phi.orbit("2", 3) == ["2", "5", "26", "677"]
    assert phi.iterate("inf") == "inf"
    assert dp.Map(phi.expression) == phi

    port = load(dp.portrait(phi, "2", prime=5))
    assert (port["m"], port["n"]) == (0, 3), port

    found = load(dp.search(phi, "2", 0, 1, 100))
    assert found["witnesses"][0]["prime"] == 3, found

    grid = load(dp.admissible(phi, alpha="2", max_m=3, max_n=2))
    assert grid["command"] == "admissible"

    h = load(dp.height("x^2-2", "1/3", tol=1e-3))
    assert h["canonical_height"]["error_bound"] <= 1e-3

    ff = dp.Map("x^2+t", base="ff")
    assert ff.iterate("t", 1) == "t^2 + t"
    results = load(dp.gleason(n_max=4))["results"]
    assert all(r["squarefree"] for r in results)
    ffs = load(dp.ff_search(ff, "0", 0, 2))
    assert ffs["command"] == "ff-search"

    report = load(dp.verify("counterexamples"))
    assert not report["partial"]

    try:
        dp.Map("x^2+$")
    except ValueError as e:
        assert "position" in str(e)
    else:
        raise AssertionError("bad expression accepted")

    try:
        dp.search(ff, "t", 0, 1, 10)
    except ValueError:
        pass
    else:
        raise AssertionError("function-field map accepted by search")

    code, out, _ = dp.run(["portrait", "--map", "x^2+1", "--alpha", "2", "--prime", "5"])
    assert code == 0 and load(out)["n"] == 3

    print("smoke test passed")


if __name__ == "__main__":
    main()

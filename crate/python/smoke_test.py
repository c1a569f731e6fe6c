"""Smoke test for the binform_py extension module.

Build and run from the repository root:

    PYO3_BUILD_EXTENSION_MODULE=1 cargo build -p binform-py --release --features extension-module
    python3 python/smoke_test.py

The script looks for the built library under target/release and imports it.
"""

import importlib.util
import json
import pathlib
import sys
from fractions import Fraction

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load():
    for name in ("libbinform_py.so", "libbinform_py.dylib", "binform_py.dll"):
        path = ROOT / "target" / "release" / name
        if path.exists():
            spec = importlib.util.spec_from_file_location("binform_py", path)
            module = importlib.util.module_from_spec(spec)
            spec.loader.exec_module(module)
            return module
    sys.exit("binform_py not built; see the module docstring")


def main():
    bf = load()

    f = bf.BinaryForm("x^2*y + x*y^2")
    assert f.degree == 3
    assert f.coeffs == ["0", "1", "1", "0"]
    assert f.is_squarefree()
    assert bf.real_roots(f)["distinctRealProjective"] == 3

    g = bf.BinaryForm.from_coeffs([1, 0, "-3", Fraction(0)])
    assert g == bf.parse_form("x^3 - 3*x*y^2")
    assert g.evaluate(2, 1) == "2"
    assert str(g.hessian()).startswith("-36")

    cert = bf.rank(g)
    assert cert["realExact"] == 3 and cert["complexExact"] == 2

    report = bf.verify(bf.BinaryForm("x^3 + y^3"))
    assert report["criterionA"] is False and report["consistent"] is True
    assert bf.verify(g, corollary=True)["outcome"] == "consistent"

    assert bf.winding(g) == -2
    assert bf.winding(g, map="psi") == -3
    rows = bf.trajectory(f, steps=8)
    assert len(rows) == 8 and all(abs(vx * vx + vy * vy - 1) < 1e-12 for _, vx, vy, _ in rows)

    out = bf.experiment(json.dumps({"degree": 3, "samples": 10, "seed": 1}))
    assert out["samples"] == 10 and sum(out["histograms"]["realRank"].values()) == 10

    for bad in ("x^2 + y", "x^2 +"):
        try:
            bf.BinaryForm(bad)
        except ValueError:
            pass
        else:
            raise AssertionError(bad)
    try:
        bf.BinaryForm.from_coeffs([0.5, 1])
    except TypeError:
        pass
    else:
        raise AssertionError("float accepted")
    try:
        bf.verify(bf.BinaryForm("x^3 - 2*x^2*y + x*y^2"))
    except ArithmeticError:
        pass
    else:
        raise AssertionError("repeated root accepted")

    print("binform_py smoke test passed")


if __name__ == "__main__":
    main()

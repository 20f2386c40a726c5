"""Smoke test for the `bfun` extension module.

Build and expose the module first, for example:

    cargo build --release -p bfun-python --features extension-module
    cp target/release/libbfun.so python/bfun.so
    python3 python/smoke_test.py
"""

import json
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import bfun  # noqa: E402


def main() -> int:
    b1 = bfun.bhat_poly(1)
    assert b1.coeffs == ["1/1", "1/1"], b1.coeffs
    assert b1.roots == [(-1, 1, 1)]

    b2 = bfun.bhat_poly(2, "symbolic")
    assert b2.coeffs == ["6/1", "16/1", "14/1", "4/1"], b2.coeffs
    assert b2.alpha == "4/1"
    assert b2.matches_theorem()
    rep = json.loads(b2.report_json())
    assert rep["btilde_roots"] == [[-3, 2, 1], [-1, 1, 2]], rep["btilde_roots"]

    monic, alpha = bfun.theorem(3)
    assert alpha == "108/1" and monic[-1] == "1/1"

    assert bfun.cyclic_pair_det(2).startswith("MPOLY arity=6 ring=Q\n")

    radial = dict(bfun.verify_radial(3))
    assert radial["delta^-(k+1) L_k delta^(k+1) = Lap + 2(k+1) P+"]

    g = bfun.shift_generator(2)
    assert g.order == 1 and g.nullspace_dim == 1
    assert g.constant_term() == ["-2/1", "4/1"], g.constant_term()
    assert g.verify()
    assert json.loads(g.report_json())["N"] == [1]
    assert g.lweyl().startswith("LWEYL n=2\n")
    assert bfun.ct_formula(2) == ["6/1", "4/1"]

    try:
        bfun.bhat_poly(9)
    except ValueError:
        pass
    else:
        raise AssertionError("guard not enforced")

    print("python smoke test: ok")
    return 0


if __name__ == "__main__":
    sys.exit(main())

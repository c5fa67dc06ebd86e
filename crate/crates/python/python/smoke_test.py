"""Smoke test for the pygammaspec extension.

Build first, then run with the directory holding pygammaspec.so on PYTHONPATH:

    cargo build --release -p gammaspec-python --features extension-module
    cp target/release/libpygammaspec.so crates/python/python/pygammaspec.so
    python3 crates/python/python/smoke_test.py
"""

import json
import math

import pygammaspec as gs


def close(a, b):
    return len(a) == len(b) and all(math.isclose(x, y, abs_tol=1e-9) for x, y in zip(a, b))


def main():
    c3 = gs.Algebra.chain(3)
    assert c3.size == 3
    assert c3.primes() == [["0"], ["0", "e"]]
    assert c3.laplacian() == [[1, -1], [-1, 1]]
    assert close(c3.eigenvalues(), [0.0, 2.0])
    assert c3.is_connected() is True

    bb = gs.Algebra.boolean_product(2)
    assert sorted(bb.primes()) == [["(0,0)", "(0,1)"], ["(0,0)", "(1,0)"]]
    assert bb.laplacian() == [[0, 0], [0, 0]]
    assert bb.is_connected() is False
    assert bb.cluster(2, seed=3) == [[0], [1]]
    assert len(bb.automorphisms()) == 2

    covers, equal, member, witness = bb.cover("(1,1)", ["(1,0)", "(0,1)"])
    assert covers and equal and member and witness is not None

    c4 = gs.Algebra.chain(4)
    assert close(c4.eigenvalues(), [0.0, 3.0, 3.0])
    assert close(c4.eigenvalues(hasse=True), [0.0, 1.0, 3.0])
    assert c4.filippov_holds()

    again = gs.Algebra.from_json(bb.to_json())
    assert again.elements == bb.elements
    assert json.loads(again.to_json())["zero"] == "(0,0)"

    rows = c3.verify()
    assert rows and all(status != "fail" for _, _, status, _ in rows)

    mu = ["1", "1/2", "0"]
    assert c3.is_fuzzy_ideal(mu)
    assert gs.alpha_cut(mu, "1/2") == [0, 1]
    upper, middle, lower, holds = gs.stability(mu, ["1", "1/4", "0"], "1/2", "1/4")
    assert holds and set(upper) <= set(middle) <= set(lower)

    try:
        gs.Algebra.chain(3).radical(["nope"])
    except ValueError:
        pass
    else:
        raise AssertionError("unknown element accepted")

    print("pygammaspec smoke test: ok")


if __name__ == "__main__":
    main()

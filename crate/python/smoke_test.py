"""Smoke test for the Python bindings.

Build and install first:  pip install --no-build-isolation ./crates/python
"""

import math
from fractions import Fraction

import vasyunin


def main() -> None:
    assert [vasyunin.mobius(n) for n in range(1, 11)] == [1, -1, -1, 0, -1, 1, -1, 0, 0, 1]
    assert [vasyunin.coeff_closed(k) for k in (1, 2, 3, 4, 8, 9)] == [1, 1, -1, 2, 4, 0]

    f1 = vasyunin.seed("first", 1)
    assert f1.terms() == [(1, Fraction(1)), (2, Fraction(-2))]
    assert f1.is_zero_sum() and f1.period() == 2
    assert f1.profile(4) == [0, 1, 0, 1]
    assert f1(Fraction(7, 2)) == 1
    assert f1.integrate_weighted(1, 2) == Fraction(1, 2)
    assert f1.integrate_weighted(1, 4) == Fraction(7, 12)
    tail = f1.integral_to_infinity(1 << 12)
    assert tail["closed_form"] == "ln(2)" and tail["within_tail_bound"]

    g = vasyunin.NaturalFunction([(3, Fraction(1, 2)), (6, -1)])
    assert g.is_zero_sum() and g.jump_at(6) == Fraction(-1, 2)

    corr = vasyunin.build_correction("first", 8)
    assert corr.coeffs() == [1, 1, -1, 2, -1, -1, -1, 4]
    assert corr.verify_plateau() is None
    assert corr.to_canonical() == corr.phi()
    assert vasyunin.build_correction("third", 20).verify_plateau() is None

    est = vasyunin.delta_norm("first", 16, 16 << 12)
    assert est["lower_bound"] > Fraction(34, 100)
    assert abs(float(est["truncated"]) - math.log(2) / 2) <= float(est["tail_bound"]) + 1e-12

    report = vasyunin.divergence_report("first", 8, digits=20)
    assert report["metadata"]["summary"]["non_cauchy"] is True
    assert [row["n"] for row in report["rows"]] == list(range(2, 9))

    assert vasyunin.identity_audit(1000) is None

    try:
        vasyunin.seed("fourth", 1)
    except ValueError:
        pass
    else:
        raise AssertionError("unknown family accepted")

    print("python smoke test: ok")


if __name__ == "__main__":
    main()

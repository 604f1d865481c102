import json
import math
from fractions import Fraction

import mpmath
import pytest

from slabperc.events import Truncation
from slabperc.harness import (ab_suite, boundary_cycle, boundary_quarters, check_glue, check_recursive,
                              check_shortlong, check_wide, constants, dumps, fkg_suite, log10_c_star, trace_proof,
                              validate_arcs)


def test_constants_examples():
    c = constants(0.5, 1, 2)
    assert c.exponent == 98 and c.C_star_exact() == 4 ** 98
    assert c.log10_C_star == pytest.approx(98 * math.log10(4), rel=1e-12)
    assert c.log10_c_star == pytest.approx(-98 * math.log10(4), rel=1e-12)
    c3 = constants(0.5, 2, 3)
    assert c3.C_star_exact() == 4 ** 294
    assert abs(c3.log10_C_star - 294 * math.log10(4)) <= 1e-9 * 294 * math.log10(4)
    lo, hi = constants(0.3, 2, 3), constants(0.7, 2, 3)
    assert lo.log10_C_star == pytest.approx(hi.log10_C_star, rel=1e-14)
    # 1 - 0.75 is exactly 0.25 in binary, so this pair is symmetric bit for bit
    assert constants(0.25, 2, 3).C_star_exact() == constants(0.75, 2, 3).C_star_exact() == 8 ** 294
    assert 0 < c.c_star < 1


@pytest.mark.parametrize("p", [0.1, 0.3, 0.5, 0.77])
@pytest.mark.parametrize("k,d", [(1, 2), (2, 3), (3, 4)])
def test_log_and_mp_agree(p, k, d):
    c = constants(p, k, d)
    assert c.log10_C_star == pytest.approx(c.log10_C_star_mp(), rel=1e-9)
    exact = c.C_star_exact()
    with mpmath.workdps(50):
        ref = float(mpmath.log10(exact.numerator) - mpmath.log10(exact.denominator))
    assert c.log10_C_star == pytest.approx(ref, rel=1e-9)
    assert constants(p, k, d).log10_C_star == pytest.approx(constants(1 - p, k, d).log10_C_star, rel=1e-14)


def test_constants_reject_degenerate():
    for p in (0.0, 1.0):
        with pytest.raises(ValueError):
            constants(p, 2, 3)
        assert log10_c_star(p, 2, 3) == float("-inf")


def test_recursive_examples():
    rep = check_recursive(1, 1, 0.37, 200, 0, k=1, d=2)
    assert rep.rhs == 4 and rep.passed
    rep = check_recursive(2, 1, 0.5, 4000, 0, k=1, d=2)
    assert rep.passed and rep.direction == "<="
    assert rep.to_json()["estimates"][1]["p_hat"] == pytest.approx(0.75, abs=0.03)


def test_boundary_arcs():
    cyc = boundary_cycle(6, 6)
    assert len(cyc) == 20 and len(set(cyc)) == 20
    q = boundary_quarters(6, 6)
    assert sum(map(len, q)) == 20
    validate_arcs(6, 6, q)
    with pytest.raises(ValueError):
        validate_arcs(6, 6, [q[1], q[0], q[2], q[3]])
    with pytest.raises(ValueError):
        validate_arcs(6, 6, [q[0], q[0], q[2], q[3]])
    with pytest.raises(ValueError):
        validate_arcs(6, 6, [q[0][:1] + q[0][2:], q[1], q[2], q[3]])
    with pytest.raises(ValueError):
        validate_arcs(6, 6, [[(2, 2)], q[1], q[2], q[3]])
    with pytest.raises(ValueError):
        boundary_cycle(1, 4)


def test_glue_trivial_densities():
    q = boundary_quarters(4, 4)
    hi = check_glue(4, 4, *q, 1.0, 50, 0, k=1, d=2)
    assert hi.lhs == 1 and hi.passed
    lo = check_glue(4, 4, *q, 0.0, 50, 0, k=1, d=2)
    assert lo.lhs == 0 and lo.rhs == 0 and lo.passed


def test_glue_reports_effective_constant():
    q = boundary_quarters(6, 6)
    rep = check_glue(6, 6, *q, 0.5, 1000, 1, k=1, d=2)
    assert rep.passed and rep.extra["effective_glue_constant"] > 0
    assert rep.log10_rhs < -50


def test_wide_examples():
    rep = check_wide(2, 1, 0.5, 4000, 0, k=1, d=2)
    assert rep.passed and rep.lhs == pytest.approx(0.25, abs=0.03)
    assert check_wide(3, 2, 1.0, 20, 0).passed
    with pytest.raises(ValueError):
        check_wide(2, 2, 0.5, 10, 0)


def test_shortlong_trivial():
    one = check_shortlong(1, 1.0, 5, 0, k=1, d=2)
    assert one.lhs == 1 and one.passed
    zero = check_shortlong(1, 0.0, 5, 0, k=1, d=2)
    assert zero.lhs == 0 and zero.rhs == 0 and zero.passed


def test_report_json_schema():
    rep = check_recursive(1, 2, 0.5, 50, 3, k=1, d=2)
    obj = json.loads(dumps(rep))
    for key in ("check", "params", "lhs", "rhs", "log10_rhs", "slack", "pass", "seeds", "estimates",
                "boundary_hit_fraction"):
        assert key in obj


def test_trace_degenerate_densities():
    zero = trace_proof(1, 0.0, 20, 3, 0, k=1, d=2)
    assert zero["branch"] == "degenerate" and zero["pass"]
    assert zero["step0"]["c"]["p_hat"] == 0
    one = trace_proof(1, 1.0, 20, 3, 0, k=1, d=2)
    assert one["branch"] == "step1" and one["pass"]
    assert one["step0"]["p_44n_43n"]["p_hat"] == 1


def test_trace_small_run_deterministic():
    a = dumps(trace_proof(1, 0.5, 150, 5, 3, k=1, d=2))
    b = dumps(trace_proof(1, 0.5, 150, 5, 3, k=1, d=2))
    assert a == b
    rep = json.loads(a)
    assert rep["branch"] in {"step1", "step2", "step3", "main"}
    assert "criticality" in rep["notes"][0]


def test_suites():
    fkg = fkg_suite((0.5,))
    assert fkg["pass"] and fkg["min_margin"] >= -1e-12
    ab = ab_suite(10, (0.3,), seed=1)
    assert ab["pass"] and len(ab["results"]) == 10

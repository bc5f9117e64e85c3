import math

import pytest

from phaserx.golden import golden_minimize


def test_quadratic_minimum():
    x, fx = golden_minimize(lambda t: (t - 1.3) ** 2, -2.0, 4.0, xtol=1e-10)
    assert x == pytest.approx(1.3, abs=1e-8)
    assert fx == pytest.approx(0.0, abs=1e-16)


def test_boundary_minimum():
    # monotone decreasing: the minimum sits at the right endpoint
    x, fx = golden_minimize(lambda t: -t, 0.0, 1.0, xtol=1e-9)
    assert x == 1.0
    assert fx == -1.0


def test_swapped_bracket():
    x, _ = golden_minimize(lambda t: (t + 0.5) ** 2, 2.0, -2.0, xtol=1e-9)
    assert x == pytest.approx(-0.5, abs=1e-7)


def test_result_is_best_evaluated_point():
    seen = []

    def f(t):
        seen.append(t)
        return math.cos(3.0 * t)

    x, fx = golden_minimize(f, 0.0, 2.0, xtol=1e-8)
    best = min(seen, key=lambda t: math.cos(3.0 * t))
    assert fx <= math.cos(3.0 * best) + 1e-18
    assert fx == math.cos(3.0 * x)


def test_xtol_validation():
    with pytest.raises(ValueError):
        golden_minimize(lambda t: t * t, 0.0, 1.0, xtol=0.0)

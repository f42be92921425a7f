import math
from fractions import Fraction

import pytest

import fracwave


def test_hadamard():
    c = fracwave.hadamard_check(4, [0, 2], [0, 1])
    assert c["valid"]
    assert c["defect"] < 1e-12
    assert abs(c["matrix"][1][1] + 1 / math.sqrt(2)) < 1e-12


def test_hadamard_rejects_bad_sizes():
    with pytest.raises(ValueError):
        fracwave.hadamard_check(4, [0, 2], [0, 1, 2])


def test_lambda0():
    assert fracwave.lambda0(4, [0, 1], 2) == [[0], [1], [4], [5], [16], [17], [20], [21]]


def test_cycles():
    assert fracwave.find_cycles(4, [0, 3], B=[0, 2]) == [[0], [1]]
    stretched = {0: 0.5, 3: 0.5}
    assert fracwave.find_cycles(2, [0, 1], m0=stretched, on_torus=True) == [[0], [Fraction(1, 3), Fraction(2, 3)]]


def test_mu_hat_exact_zero():
    assert fracwave.mu_hat(4, [0, 2], 1)["exact_zero"]
    assert fracwave.mu_hat(3, [0, 2], Fraction(3, 4))["exact_zero"]
    v = fracwave.mu_hat(3, [0, 2], 0.37)
    assert abs(v["value"] - complex(0.273194477857332889, 0.631315189321893606)) < 1e-12


def test_lawton_and_cascade():
    assert fracwave.lawton({0: 0.5, 1: 0.5})["orthonormal"]
    assert fracwave.lawton({0: 0.5, 3: 0.5})["multiplicity"] == 2
    xs, values, residual = fracwave.cascade({0: 0.5, 3: 0.5}, 40, 8)
    assert residual < 1e-6
    inside = [v for x, v in zip(xs, values) if 0.1 < x < 2.9]
    assert all(abs(v - 1 / 3) < 1e-6 for v in inside)


def test_brolin_and_k2():
    m = fracwave.brolin_moments([0, 0, 1], 5000, 4, seed=3)
    assert m[0][0] == 1
    assert all(abs(v) < 5 * se for v, se in m[1:])
    f0, f1 = fracwave.k2_split({0: 1, 1: 2j, 5: 0.5})
    assert f0 == {0: 1}
    assert f1 == {0: 2j, 1: 0.5}

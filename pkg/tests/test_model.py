import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stochhr.errors import DomainError
from stochhr.model import (PRESETS, HRParameters, derived_constants, equilibria, preset,
                           random_reaction, reaction)


def test_paper_typical_values():
    p = preset("paper-typical")
    assert (p.J, p.r, p.q, p.c, p.a, p.b, p.alpha, p.beta) == (3.281, 0.0021, 0.0084, -1.6,
                                                                  3.0, 1.0, 1.0, 5.0)


def test_unknown_preset():
    with pytest.raises(DomainError):
        preset("nope")


@pytest.mark.parametrize("field", ["d1", "a", "b", "beta", "r"])
def test_positive_fields(field):
    with pytest.raises(DomainError):
        HRParameters(**{field: 0.0})


def test_nonfinite_rejected():
    with pytest.raises(DomainError):
        HRParameters(c=math.inf)
    with pytest.raises(DomainError):
        HRParameters(eps=-0.1)


def test_dict_roundtrip():
    for p in PRESETS.values():
        assert HRParameters.from_dict(p.to_dict()) == p
    with pytest.raises(DomainError):
        HRParameters.from_dict({"zeta": 1})


def test_derived_constants():
    p = HRParameters()
    k = derived_constants(p)
    assert k.c1 == pytest.approx(28.0)
    br = 28.0 ** 2 * (2.5 + 1 / 0.0021) + 0.0084 ** 2 / 0.0021
    assert k.c2 == pytest.approx(3.281 ** 2 / 2 + br ** 2 + 2 + 0.0084 ** 2 * 1.6 ** 2 / 0.0021)
    assert k.sigma == pytest.approx(0.00105) and k.d == 1.0 and k.eta == 1.0
    with pytest.raises(DomainError):
        derived_constants(p, eta=0)


@settings(max_examples=50, deadline=None)
@given(Q=st.floats(0.05, 20), seed=st.integers(0, 10_000))
def test_random_reaction_homogeneity(Q, seed):
    p = HRParameters()
    g = np.random.default_rng(seed).uniform(-3, 3, (3, 5))
    lhs = np.stack(random_reaction(tuple(Q * g), Q, p))
    rhs = Q * np.stack(reaction(tuple(g), p))
    np.testing.assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-12 * np.abs(rhs).max())


def test_random_reaction_rejects_nonpositive_q():
    with pytest.raises(DomainError):
        random_reaction((1.0, 1.0, 1.0), 0.0, HRParameters())


def test_equilibria_are_zeros_of_reaction():
    for p in PRESETS.values():
        for J in (0.0, 1.2, 3.1):
            eqs = equilibria(p, J)
            assert eqs
            for e in eqs:
                f = reaction(e, p.with_(J=J))
                assert max(abs(x) for x in f) < 1e-9


def test_dissipative_equilibria():
    eqs = equilibria(preset("dissipative"))
    us = sorted(round(e[0], 12) for e in eqs)
    assert us[0] == pytest.approx(-2.0) and us[-1] == pytest.approx(0.0, abs=1e-9)

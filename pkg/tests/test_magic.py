import math
from fractions import Fraction

import numpy as np
import pytest

from app.errors import InvalidAlpha, InvalidDim, NotAStationaryPoint
from app.known_states import FOOTNOTE_STATE, MAX_MAGIC_PARAMS, MAX_MAGIC_SEED, SIC_FIDUCIAL_1Q
from app.magic import (
    bloch_state,
    central_gradient,
    finite_difference_hessian,
    gradient_xi2,
    crossover_alpha,
    exact_xi,
    hessian_positive_definite,
    magic_difference,
    mub_bound,
    sic_bound,
    sre,
    stabilizer_norm,
    xi,
    xi2_closed_1q,
    xi2_closed_2q,
    xi2_closed_2q_params,
)
from app.optimize import ParamPoint, param_to_state
from app.states import ExactState, random_state
from app.structure import computational_state
from app.wh_group import wh_group

MAX_MAGIC_X = np.array(MAX_MAGIC_PARAMS[0] + MAX_MAGIC_PARAMS[1])


def test_stabilizer_state_has_zero_magic(group22):
    psi = computational_state(2)
    for alpha in (0.5, 2, 3):
        assert sre(alpha, psi, group22).m == pytest.approx(0.0, abs=1e-14)
    assert exact_xi(2, psi, group22) == 1
    assert stabilizer_norm(psi.to_pure(), group22).m == pytest.approx(0.0, abs=1e-14)


def test_max_magic_seed_exact_value(group22):
    value = sre(2, MAX_MAGIC_SEED, group22, exact=True)
    assert value.exact_xi == Fraction(7, 16)
    assert value.xi_text == "7/16"
    assert value.m == pytest.approx(math.log(16 / 7), abs=1e-15)
    assert xi(2, MAX_MAGIC_SEED.to_pure(), group22) == pytest.approx(7 / 16, abs=1e-15)


def test_purity_sum_rule(rng, group22):
    for _ in range(20):
        assert xi(1, random_state(4, rng), group22) == pytest.approx(1.0, abs=1e-12)


def test_alpha_validation(group22):
    psi = MAX_MAGIC_SEED.to_pure()
    with pytest.raises(InvalidAlpha):
        sre(1, psi, group22)
    with pytest.raises(InvalidAlpha):
        sre(0, psi, group22)
    with pytest.raises(InvalidAlpha):
        exact_xi(1.5, MAX_MAGIC_SEED, group22)


def test_exact_path_needs_gaussian_root_of_unity():
    state = ExactState.from_pairs([(1, 0), (0, 0), (0, 0)], 1)
    with pytest.raises(InvalidDim):
        exact_xi(2, state, wh_group((3,)))


def test_one_qubit_closed_form_matches_direct_sum(rng):
    group = wh_group((2,))
    for _ in range(50):
        theta, phi = rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi)
        assert xi2_closed_1q(theta, phi) == pytest.approx(xi(2, bloch_state(theta, phi), group), abs=1e-12)


def test_two_qubit_closed_form_matches_direct_sum(rng, group22):
    for _ in range(50):
        x = np.concatenate([rng.uniform(0, math.pi / 2, 3), rng.uniform(0, 2 * math.pi, 3)])
        direct = xi(2, param_to_state(ParamPoint.from_array(x)), group22)
        assert xi2_closed_2q_params(x) == pytest.approx(direct, abs=1e-12)


def test_closed_form_known_points():
    assert xi2_closed_2q(*MAX_MAGIC_X) == pytest.approx(7 / 16, abs=1e-15)
    # (1,1,1,1)/2 es un estado producto estabilizador
    t = math.pi / 4
    assert xi2_closed_2q(t, t, t, 0, 0, 0) == pytest.approx(1.0, abs=1e-15)


def test_sic_fiducial_saturates_one_qubit_bound():
    value = sre(2, SIC_FIDUCIAL_1Q, wh_group((2,)))
    assert value.xi == pytest.approx(2 / 3, abs=1e-14)
    assert value.m == pytest.approx(sic_bound(2, 2), abs=1e-14)


def test_bounds():
    assert sic_bound(2, 4) == pytest.approx(math.log(5 / 2), abs=1e-15)
    assert mub_bound(2, 4) == pytest.approx(math.log(16 / 7), abs=1e-15)
    for alpha in (1.5, 2, 3, 5):
        assert mub_bound(alpha, 4) < sic_bound(alpha, 4)
    with pytest.raises(InvalidAlpha):
        sic_bound(1, 4)
    with pytest.raises(InvalidDim):
        mub_bound(2, 1)


def test_central_gradient_orders():
    x = np.array([0.3, 1.1])
    f = lambda v: math.sin(v[0]) * math.cos(v[1])  # noqa: E731
    exact = np.array([math.cos(0.3) * math.cos(1.1), -math.sin(0.3) * math.sin(1.1)])
    for order in (2, 4, 6, 8):
        assert np.allclose(central_gradient(f, x, order=order), exact, atol=1e-9)


def test_hessian_at_max_magic_point():
    verdict = hessian_positive_definite(MAX_MAGIC_X)
    assert verdict.positive_definite
    assert verdict.min_eigenvalue > 1e-6
    assert verdict.gradient_norm < 1e-9


def test_hessian_rejects_non_stationary_point():
    with pytest.raises(NotAStationaryPoint):
        hessian_positive_definite([0.3, 0.5, 0.7, 0.1, 0.2, 0.3])


def test_hessian_of_quadratic_bowl():
    hess = finite_difference_hessian(lambda v: float(np.sum(v ** 2)), np.zeros(4))
    assert np.allclose(np.linalg.eigvalsh(hess), 2.0, atol=1e-6)


def test_gradient_xi2_matches_eighth_order_stencil():
    x = np.array([0.3, 0.7, 1.1, 0.2, 1.3, 2.4])
    reference = central_gradient(xi2_closed_2q_params, x, order=8)
    assert np.allclose(gradient_xi2(x), reference, atol=1e-8)


def test_stabilizer_point_is_not_a_certified_minimum():
    x = np.array([math.pi / 4] * 3 + [0.0] * 3)
    assert np.allclose(param_to_state(ParamPoint.from_array(x)).amplitudes, 0.5)
    assert xi2_closed_2q_params(x) == pytest.approx(1.0, abs=1e-12)
    try:
        verdict = hessian_positive_definite(x)
    except NotAStationaryPoint:
        return
    assert not verdict.positive_definite


def test_xi2_lies_between_global_min_and_one(rng, group22):
    for _ in range(200):
        value = xi(2, random_state(4, rng), group22)
        assert 7 / 16 - 1e-12 <= value <= 1 + 1e-12


def test_footnote_state_crossover(group22):
    reference = MAX_MAGIC_SEED.to_pure()
    assert magic_difference(0.5, FOOTNOTE_STATE, reference, group22) > 0
    assert magic_difference(2.0, FOOTNOTE_STATE, reference, group22) < 0
    alpha = crossover_alpha(FOOTNOTE_STATE, reference, group22)
    assert 1.4 < alpha < 1.9
    assert magic_difference(alpha, FOOTNOTE_STATE, reference, group22) == pytest.approx(0.0, abs=1e-10)


def test_crossover_bracket_cannot_contain_one(group22):
    with pytest.raises(InvalidAlpha):
        crossover_alpha(FOOTNOTE_STATE, MAX_MAGIC_SEED.to_pure(), group22, bracket=(0.5, 1.5))

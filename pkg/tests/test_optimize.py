import math

import numpy as np
import pytest

from app.errors import NotAMinimum, OutOfRange
from app.known_states import MAX_MAGIC_PARAMS, MAX_MAGIC_SEED
from app.optimize import (
    ParamPoint,
    certify_isolated_minimum,
    collect_minimizers,
    landscape,
    multistart_minimize,
    param_to_state,
    state_to_param,
)
from app.states import equal_up_to_phase, normalize, random_state


def test_param_point_of_max_magic_seed():
    psi = param_to_state(ParamPoint(*MAX_MAGIC_PARAMS))
    assert equal_up_to_phase(psi, MAX_MAGIC_SEED.to_pure(), 1e-12)


def test_state_to_param_inverts_parametrization(rng):
    for _ in range(10):
        psi = random_state(4, rng)
        point = state_to_param(psi)
        point.check_range()
        assert equal_up_to_phase(param_to_state(point), psi, 1e-10)


def test_state_to_param_with_zero_amplitudes():
    point = state_to_param(normalize([1, 0, 0, 0]))
    assert point.phis == (0.0, 0.0, 0.0)
    assert equal_up_to_phase(param_to_state(point), normalize([1, 0, 0, 0]))


def test_out_of_range_parameters():
    with pytest.raises(OutOfRange):
        param_to_state(ParamPoint((2.0, 0.1, 0.1), (0.0, 0.0, 0.0)))
    with pytest.raises(OutOfRange):
        param_to_state(ParamPoint((0.1,), (7.0,)))
    with pytest.raises(OutOfRange):
        landscape("three-qubit")


def test_one_qubit_search_is_deterministic():
    first = multistart_minimize("one-qubit", 12, seed=7)
    second = multistart_minimize("one-qubit", 12, seed=7)
    assert [r.start_index for r in first] == list(range(12))
    assert [r.xi_value for r in first] == [r.xi_value for r in second]
    assert min(r.xi_value for r in first) == pytest.approx(2 / 3, abs=1e-9)


@pytest.mark.slow
def test_one_qubit_finds_eight_minimizers():
    records = multistart_minimize("one-qubit", 200, seed=42)
    found = collect_minimizers(records, 2 / 3)
    assert found.size == 8
    assert all(tag == "raw" for tag, _ in found.generator_trace)


@pytest.mark.slow
def test_two_qubit_global_minimum_snaps_to_catalog(catalog):
    records = multistart_minimize("two-qubit", 300, seed=42)
    best = min(r.xi_value for r in records)
    assert best == pytest.approx(7 / 16, abs=1e-9)
    found = collect_minimizers(records, best, catalog=catalog)
    assert found.size >= 1
    assert all(tag == "snapped" for tag, _ in found.generator_trace)


def test_collect_minimizers_deduplicates():
    records = multistart_minimize("one-qubit", 12, seed=7)
    best = min(r.xi_value for r in records)
    found = collect_minimizers(list(records) + list(records), best)
    assert found.size == len(collect_minimizers(records, best).states)


def test_certify_isolated_minimum():
    record = certify_isolated_minimum(ParamPoint(*MAX_MAGIC_PARAMS))
    assert record.xi_value == pytest.approx(7 / 16, abs=1e-15)
    assert record.hessian_min_eigen > 1e-6

    with pytest.raises(NotAMinimum) as excinfo:
        certify_isolated_minimum(ParamPoint((0.3, 0.5, 0.7), (0.1, 0.2, 0.3)))
    assert excinfo.value.record is not None
    assert excinfo.value.record.gradient_norm >= 1e-8


def test_haar_starts_stay_in_range(rng):
    land = landscape("two-qubit")
    for _ in range(5):
        x = land.random_start(rng, haar=True)
        ParamPoint.from_array(x).check_range()
    assert land.theta_max == pytest.approx(math.pi / 2)
    assert np.all(np.isfinite(x))

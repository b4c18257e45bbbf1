import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polariton_ttm.maps import (DynamicalMapSeries, dynamical_maps, markovian_maps, observable_trajectory,
                                propagate_exact)
from polariton_ttm.models import (ModelSpec, damped_cosine_generator, initial_state,
                                  single_mode_decay_generator, tls_observable, tls_state)
from polariton_ttm.ttm import (TransferTensorSeries, TTMError, _tensor_newton, _tensor_recursion,
                               first_tensor_generator, read_series, reconstruct_maps, tensor_sum,
                               transfer_tensors, ttm_propagate, weighted_tensor_sum, write_series,
                               z_transform)

import oracles as O


@pytest.fixture(scope="module")
def tc2_series():
    return dynamical_maps(ModelSpec.create("TC", 2), 0.01, 600)


@pytest.fixture(scope="module")
def tc2_tensors(tc2_series):
    return transfer_tensors(tc2_series)


def random_series(seed, d=2, K=12):
    """Arbitrary (non-physical) map series with E_0 = 1."""
    rng = np.random.default_rng(seed)
    d2 = d * d
    maps = [np.eye(d2)] + [np.eye(d2) + 0.3 * (rng.standard_normal((d2, d2)) + 1j * rng.standard_normal((d2, d2)))
                           for _ in range(K)]
    return DynamicalMapSeries(d, 0.1, np.array(maps))


# -- construction ---------------------------------------------------------------------------

def test_first_tensors(tc2_series, tc2_tensors):
    E = tc2_series.maps
    assert np.allclose(tc2_tensors[1], E[1], atol=1e-14)
    assert np.allclose(tc2_tensors[2], E[2] - E[1] @ E[1], atol=1e-14)


def test_semigroup_has_no_memory():
    s = markovian_maps(single_mode_decay_generator(3, 1.0), 0.05, 40)
    T = transfer_tensors(s)
    assert np.max(np.abs(T.tensors[1:])) <= 1e-10
    assert np.allclose(tensor_sum(T), s.maps[1], atol=1e-10)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 15))
def test_reconstruction_round_trip(seed, K):
    s = random_series(seed, K=K)
    back = reconstruct_maps(transfer_tensors(s))
    scale = np.max(np.abs(s.maps))
    assert np.max(np.abs(back.maps - s.maps)) <= 1e-10 * scale


def test_reconstruction_of_physical_series(tc2_series, tc2_tensors):
    back = reconstruct_maps(tc2_tensors)
    assert np.max(np.abs(back.maps - tc2_series.maps)) < 1e-10


def test_newton_route_matches_direct_recursion(tc2_series):
    # two independent constructions of the same tensors: the recursion in k
    # and the power-series inverse T(x) = 1 - E(x)^-1
    E = tc2_series.maps[:401]
    direct = _tensor_recursion(E)
    newton = _tensor_newton(E)
    assert np.max(np.abs(direct - newton)) < 1e-10
    assert np.max(np.abs(transfer_tensors(tc2_series.truncate(400), method="direct").tensors
                         - transfer_tensors(tc2_series.truncate(400), method="newton").tensors)) < 1e-10


def test_identity_first_map_required():
    with pytest.raises(Exception):
        transfer_tensors(DynamicalMapSeries(2, 0.1, np.array([np.eye(4) * 2])))
    with pytest.raises(TTMError):
        transfer_tensors(DynamicalMapSeries(2, 0.1, np.array([np.eye(4)])))


def test_block_structure_is_found(tc2_tensors):
    # TC conserves excitation number, so the reduced tensors split into blocks
    sizes = sorted(len(b) for b in tc2_tensors.blocks)
    assert sum(sizes) == 16 and len(sizes) > 1


def test_tail_diagnostic(tc2_tensors):
    assert tc2_tensors.converged()
    assert not tc2_tensors.truncate(50).converged()


# -- propagation -----------------------------------------------------------------------------

def test_within_window_propagation_is_exact(tc2_series, tc2_tensors):
    rng = np.random.default_rng(1)
    for _ in range(20):
        X = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        r = X @ X.conj().T
        r /= np.trace(r)
        traj = ttm_propagate(tc2_tensors, r, 600)
        assert np.max(np.abs(traj.states - tc2_series.apply(r))) < 1e-10


def test_extrapolation_matches_exact_beyond_window(tc2_series):
    spec = ModelSpec.create("TC", 2)
    sz = tls_observable("sz:1", 2)
    exact = observable_trajectory(
        propagate_exact(spec, initial_state("fully_excited", spec), 0.01, 2000, reduced=True), None, sz)
    r0 = tls_state("fully_excited", 2)
    errors = {}
    for window in (3.5, 6.0):
        T = transfer_tensors(tc2_series.truncate(int(round(window / 0.01))))
        errors[window] = np.max(np.abs(observable_trajectory(ttm_propagate(T, r0, 2000), None, sz) - exact))
    assert errors[6.0] <= 1e-3
    # the shorter window still tracks the dynamics, only less tightly
    assert errors[6.0] < errors[3.5] < 0.05


def test_trace_drift_aborts():
    s = random_series(3, K=5)
    with pytest.raises(TTMError, match="learning window too short"):
        ttm_propagate(transfer_tensors(s), np.eye(2) / 2, 200)


def test_drift_is_reported(tc2_tensors):
    traj = ttm_propagate(tc2_tensors, tls_state("fully_excited", 2), 900)
    assert traj.trace_drift.shape == (901,) and traj.trace_drift.max() < 1e-8


# -- z-transform and sums --------------------------------------------------------------------

def test_z_transform_limits(tc2_tensors):
    assert np.max(np.abs(z_transform(tc2_tensors, 1e8))) <= 1e-7 * np.max(np.abs(tc2_tensors[1]))
    assert np.array_equal(z_transform(tc2_tensors, 1.0), tensor_sum(tc2_tensors)) or \
        np.allclose(z_transform(tc2_tensors, 1.0), tensor_sum(tc2_tensors), atol=1e-13)


@settings(max_examples=20, deadline=None)
@given(st.complex_numbers(min_magnitude=0.2, max_magnitude=5, allow_nan=False, allow_infinity=False))
def test_single_tensor_z_transform(z):
    T1 = np.arange(16).reshape(4, 4) + 1j
    series = TransferTensorSeries(2, 0.1, T1[None])
    assert np.allclose(z_transform(series, z), T1 / z)


def test_tensor_sum_preserves_trace_and_has_unit_eigenvalue(tc2_tensors):
    S = tensor_sum(tc2_tensors)
    vI = np.eye(4).reshape(-1, order="F")
    assert np.max(np.abs(vI @ S - vI)) <= 1e-8
    assert np.min(np.abs(np.linalg.eigvals(S) - 1)) <= 1e-6


def test_weighted_sums():
    T = TransferTensorSeries(1, 0.5, np.array([[[1.0]], [[2.0]], [[3.0]]]))
    assert weighted_tensor_sum(T, 1)[0, 0] == 1 + 4 + 9
    assert weighted_tensor_sum(T, 2)[0, 0] == 1 + 8 + 27


def test_discrete_generator_converges_first_order():
    G = single_mode_decay_generator(2, 1.0) + damped_cosine_generator(3.0, 0.7)
    errs = []
    for dt in (0.02, 0.01):
        T = transfer_tensors(markovian_maps(G, dt, 2))
        errs.append(np.max(np.abs(first_tensor_generator(T) - G)))
    slope = np.log2(errs[0] / errs[1])
    assert slope == pytest.approx(1.0, abs=0.05)


def test_mixed_dt_rejected():
    from polariton_ttm.ttm import _require_same_dt
    a = TransferTensorSeries(1, 0.1, np.ones((1, 1, 1)))
    b = TransferTensorSeries(1, 0.2, np.ones((1, 1, 1)))
    with pytest.raises(TTMError):
        _require_same_dt(a, b)


# -- text format --------------------------------------------------------------------------

def test_series_text_round_trip(tmp_path, tc2_series):
    s = tc2_series.truncate(5)
    write_series(s, tmp_path / "m.txt")
    assert (tmp_path / "m.txt").read_text().splitlines()[0] == "dmaps v1 d=4 dt=0.01 K=5"
    back = read_series(tmp_path / "m.txt")
    assert np.array_equal(back.maps, s.maps)
    T = transfer_tensors(s)
    write_series(T, tmp_path / "t.txt")
    assert (tmp_path / "t.txt").read_text().startswith("ttensors v1")
    assert np.array_equal(read_series(tmp_path / "t.txt").tensors, T.tensors)


def test_bad_header_rejected(tmp_path):
    (tmp_path / "x.txt").write_text("nonsense\n")
    with pytest.raises(TTMError):
        read_series(tmp_path / "x.txt")

"""Disordered ensembles: sampling, disorder-averaged maps, and rate sweeps.

Averaging the dynamical maps over realizations commutes with applying them
to a shared initial state, so ``mean_i E_k^i`` reproduces the averaged
density matrix exactly; transfer tensors built from those averaged maps give
the disorder-averaged TTM.  Averaging the tensors themselves has no such
property and is kept as a baseline.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import math

import numpy as np

from . import kinetics
from .maps import DynamicalMapSeries, Trajectory, _matrix, dynamical_maps, propagate_exact, worker_count
from .models import ModelError, ModelSpec, cavity_vacuum
from .ttm import TransferTensorSeries, transfer_tensors

#: parameters that may carry a uniform interval
PARAMETERS = ("omega_tls", "omega_c", "g", "kappa")

SWEEP_COLUMNS = ("delta", "rate", "lambda_max", "M", "seed")


class DisorderError(ValueError):
    """Invalid disorder specification or inconsistent ensemble."""


@dataclass(frozen=True)
class DisorderSpec:
    """Uniform disorder around a base model.

    ``intervals`` maps a parameter name to ``(lo, hi)``.  ``omega_tls`` is
    drawn independently per TLS unless listed in ``shared``.
    """

    base: ModelSpec
    intervals: dict = field(default_factory=dict)
    n_realizations: int = 1
    master_seed: int = 0
    shared: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "intervals", {k: (float(lo), float(hi))
                                               for k, (lo, hi) in self.intervals.items()})
        object.__setattr__(self, "shared", frozenset(self.shared))
        for name, (lo, hi) in self.intervals.items():
            if name not in PARAMETERS:
                raise DisorderError(f"unknown disorder parameter {name!r}")
            if not (math.isfinite(lo) and math.isfinite(hi)):
                raise DisorderError(f"interval for {name} must be finite")
            if lo > hi:
                raise DisorderError(f"interval for {name} has lo > hi ({lo} > {hi})")
        if int(self.n_realizations) != self.n_realizations or self.n_realizations < 1:
            raise DisorderError("n_realizations must be a positive integer")
        if not 0 <= int(self.master_seed) < 2 ** 64:
            raise DisorderError("master_seed must fit in 64 unsigned bits")


def realization_seed(master_seed, index):
    """64-bit seed of realization ``index``, independent of evaluation order."""
    ss = np.random.SeedSequence(int(master_seed), spawn_key=(int(index),))
    return int(ss.generate_state(1, np.uint64)[0])


def _draw(dspec, index):
    rng = np.random.default_rng(np.random.SeedSequence(int(dspec.master_seed), spawn_key=(int(index),)))
    changes = {}
    for name in PARAMETERS:  # fixed order keeps draws reproducible
        if name not in dspec.intervals:
            continue
        lo, hi = dspec.intervals[name]
        if name == "omega_tls":
            n = 1 if name in dspec.shared else dspec.base.n_tls
            vals = lo + (hi - lo) * rng.random(n)
            changes[name] = tuple(float(v) for v in np.broadcast_to(vals, (dspec.base.n_tls,)))
        else:
            changes[name] = float(lo + (hi - lo) * rng.random())
    try:
        return dspec.base.with_(**changes)
    except ModelError as exc:
        raise DisorderError(f"realization {index}: {exc}") from exc


def sample_realizations(dspec):
    """Model specs for every realization; a pure function of ``dspec``."""
    return [_draw(dspec, i) for i in range(dspec.n_realizations)]


def _check_shared(realizations):
    if not realizations:
        raise DisorderError("empty ensemble")
    dims = {(s.n_tls, s.n_cavity) for s in realizations}
    if len(dims) > 1:
        raise DisorderError(f"realizations differ in dimensions: {sorted(dims)}")


def _per_realization(fn, realizations, workers=None):
    with ThreadPoolExecutor(max_workers=workers or worker_count()) as pool:
        return list(pool.map(fn, realizations))


def _mean(stack):
    # fixed-order accumulation so results never depend on scheduling
    acc = np.zeros_like(stack[0])
    for x in stack:
        acc += x
    return acc / len(stack)


def _maps_of(realizations, dt, K, backend, check=None):
    if isinstance(realizations[0], DynamicalMapSeries):
        series = list(realizations)
        if len({(s.d, s.dt, s.K) for s in series}) > 1:
            raise DisorderError("map series differ in dimension, dt or length")
        return series
    _check_shared(realizations)
    series = _per_realization(lambda s: dynamical_maps(s, dt, K, backend=backend), realizations)
    if check is not None:
        for s in series:
            check(s)
    return series


def average_dynamical_maps(realizations, dt=None, K=None, backend="auto", check=None):
    """Entrywise mean ``(1/M) sum_i E_k^i``.

    ``realizations`` holds model specs or precomputed map series; ``check``
    is applied to every freshly generated series.
    """
    series = _maps_of(realizations, dt, K, backend, check)
    first = series[0]
    return DynamicalMapSeries(first.d, first.dt, _mean([s.maps for s in series]))


def average_transfer_tensors(realizations, dt=None, K=None, backend="auto"):
    """Entrywise mean ``(1/M) sum_i T_k^i`` of per-realization tensors."""
    series = _maps_of(realizations, dt, K, backend)
    tensors = [transfer_tensors(s) for s in series]
    first = tensors[0]
    return TransferTensorSeries(first.d, first.dt, _mean([t.tensors for t in tensors]))


def average_density_trajectories(realizations, rho0, dt, K_total, backend="auto"):
    """Pointwise mean of the exact reduced trajectories from a shared ``rho0``.

    ``observables`` of the result holds the per-realization standard
    deviation of every state entry under key ``"std"``.
    """
    _check_shared(realizations)
    r0 = _matrix(rho0)
    n = realizations[0].n_cavity

    def one(spec):
        full = np.kron(r0, cavity_vacuum(n))
        return propagate_exact(spec, full, dt, K_total, backend=backend, reduced=True).states

    states = _per_realization(one, realizations)
    mean = _mean(states)
    spread = np.sqrt(_mean([np.abs(s - mean) ** 2 for s in states]))
    d = r0.shape[0]
    return Trajectory(dt=float(dt), states=mean, dims=(2,) * int(round(math.log2(d))),
                      observables={"std": spread})


@dataclass
class EnsembleResult:
    averaged_maps: DynamicalMapSeries
    averaged_tensors: TransferTensorSeries
    averaged_trajectory: Trajectory
    seeds: list

    @property
    def da_tensors(self):
        return transfer_tensors(self.averaged_maps)


def run_ensemble(dspec, rho0, dt, K, K_total, trajectory_stride=1, backend="auto", check=None):
    """Maps, averaged maps and tensors, and the ground-truth trajectory.

    The trajectory is computed at ``dt / trajectory_stride`` to ``K_total``
    coarse steps.
    """
    specs = sample_realizations(dspec)
    series = _maps_of(specs, dt, K, backend, check)
    avg_maps = DynamicalMapSeries(series[0].d, series[0].dt, _mean([s.maps for s in series]))
    avg_tensors = average_transfer_tensors(series)
    traj = average_density_trajectories(specs, rho0, dt / trajectory_stride,
                                        K_total * trajectory_stride, backend)
    seeds = [realization_seed(dspec.master_seed, i) for i in range(dspec.n_realizations)]
    return EnsembleResult(avg_maps, avg_tensors, traj, seeds)


def disorder_rate_sweep(base, delta_grid, M, seed, rho0=None, dt=0.02, window_time=10.0,
                        center=45.0, null_correction=False, check=None):
    """Decay rate of the disorder-averaged dynamics versus disorder width.

    For each ``delta`` the TLS frequencies are drawn from
    ``U(center - delta, center + delta)``; the rate is ``1 / lambda_max`` of
    the normalized relaxation matrix of the DA-TTM tensors (plain
    pseudoinverse form by default).  Rows follow :data:`SWEEP_COLUMNS`.
    """
    grid = [float(x) for x in delta_grid]
    if not grid or any(x <= 0 for x in grid) or any(b <= a for a, b in zip(grid, grid[1:])):
        raise DisorderError("delta grid must be positive and strictly ascending")
    if rho0 is None:
        from .models import tls_state
        rho0 = tls_state("fully_excited", base.n_tls).matrix
    r0 = _matrix(rho0)
    K = int(math.ceil(window_time / dt - 1e-9))
    rows = []
    for delta in grid:
        dspec = DisorderSpec(base, {"omega_tls": (center - delta, center + delta)}, M, seed)
        T = transfer_tensors(average_dynamical_maps(sample_realizations(dspec), dt, K, check=check))
        rs = kinetics.steady_state(T, r0, method="auto")
        tau = kinetics.relaxation_matrix(T, r0, rs.matrix, null_correction=null_correction)
        eigs = kinetics.normalized_relaxation_matrix(tau, r0, rs.matrix).eigenvalues
        lam = float(np.max(eigs.real))
        rows.append({"delta": delta, "rate": kinetics.decay_rate(eigs), "lambda_max": lam,
                     "M": int(M), "seed": int(seed)})
    return rows


def sweep_csv(rows):
    lines = [",".join(SWEEP_COLUMNS)]
    for r in rows:
        lines.append(f"{r['delta']!r},{r['rate']!r},{r['lambda_max']!r},{r['M']},{r['seed']}")
    return "\n".join(lines) + "\n"


__all__ = [
    "DisorderSpec", "DisorderError", "EnsembleResult", "sample_realizations", "realization_seed",
    "average_dynamical_maps", "average_transfer_tensors", "average_density_trajectories",
    "run_ensemble", "disorder_rate_sweep", "sweep_csv", "SWEEP_COLUMNS",
]

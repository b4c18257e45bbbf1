"""Steady states, relaxation matrices, lifetimes, resonances and moments.

Everything here works in the z-domain of the transfer tensors.  With
``u = z - 1`` the kernel expands as

    1 - T[z] = sum_j A_j u^j,   A_0 = 1 - sum T_k,   A_1 = sum k T_k, ...

and the deviation ``drho_k = rho_k - rho_ss`` satisfies
``(1 - T[z]) drho[z] = rho_0 - (1 - T[z]) rho_ss z/(z-1)``.  Matching powers
of ``u`` gives a hierarchy ``sum_i A_i S_{m-i} = b_m`` whose solutions are
the discrete moments ``S_0 = sum_k drho_k``, ``S_1 = -sum_k k drho_k``, ...

``A_0`` is singular whenever a steady state exists.  The pseudoinverse fixes
``S_m`` only up to a null-space component; the exact component follows from
the solvability condition of the next equation in the hierarchy.  Passing
``null_correction=False`` drops it and reproduces the plain pseudoinverse
formulas ``(1 - sum T)^- drho_0 dt`` etc.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import math
from typing import NamedTuple

import numpy as np
from scipy.signal import peak_prominences

from . import maps as maps_mod
from .maps import DynamicalMapSeries, _matrix, worker_count
from .models import DensityMatrix, ModelError, ModelSpec
from .numerics import DEFAULT_RANK_TOL, _svd, hermitize, max_abs, pseudoinverse, unvec, vec
from .ttm import TTMError, TransferTensorSeries, tensor_sum, transfer_tensors

#: offsets used for the final-value limit z -> 1
RICHARDSON_EPS = (1e-5, 1e-6)

#: ||(1 - sum T) vec(rho_ss)|| above which the steady state is rejected
STEADY_RESIDUAL_TOL = 1e-6

#: largest accepted change between the Richardson estimate and its finer input
EXTRAPOLATION_TOL = 1e-5

#: distance of the closest eigenvalue of sum T to 1
UNIT_EIGENVALUE_TOL = 1e-4

#: relative anti-Hermitian part of tau_hat that signals an unconverged window
ASYMMETRY_TOL = 1e-6

#: eigenvalues below this fraction of the largest count as zero
EIGEN_ZERO_REL = 1e-8

#: relative rank cut for the initial deviation in the normalized matrix
DEVIATION_RANK_TOL = 1e-4


class KineticsError(ValueError):
    """Kinetic quantity cannot be resolved from the given tensors."""


def _dims_for(d):
    return (2,) * int(round(math.log2(d))) if d & (d - 1) == 0 else (d,)


def _reduced(rho, d):
    r = _matrix(rho)
    if r.shape != (d, d):
        raise KineticsError(f"state of shape {r.shape} does not match tensor dimension {d}")
    return r


# -- steady state -------------------------------------------------------------

def _final_value(tensors, v0, eps):
    z = 1.0 + eps
    d2 = tensors.d ** 2
    k = np.arange(1, tensors.K + 1)
    Tz = np.tensordot(np.exp(-k * math.log1p(eps)), tensors.tensors, axes=1)
    return (z - 1.0) * np.linalg.solve(np.eye(d2) - Tz, v0)


def _null_spaces(A, tol=DEFAULT_RANK_TOL):
    """Pseudoinverse with right and left null-space bases from one SVD."""
    U, s, Vh = _svd(A)
    cut = tol * (s[0] if s.size else 0.0)
    r = int(np.sum(s > cut))
    inv = (Vh[:r].conj().T / s[:r]) @ U[:, :r].conj().T
    return inv, Vh[r:].conj().T, U[:, r:].conj().T


def _finish_state(v, d):
    rho = hermitize(unvec(v, d))
    tr = np.trace(rho).real
    if abs(tr) < 1e-12:
        raise KineticsError("steady state has vanishing trace")
    return rho / tr


def steady_state(tensors, rho0, method="richardson", eps=RICHARDSON_EPS,
                 residual_tol=STEADY_RESIDUAL_TOL, extrapolation_tol=EXTRAPOLATION_TOL):
    """Infinite-time state ``lim_{z->1} (z-1)(1 - T[z])^-1 vec(rho0)``.

    ``method``:

    ``"richardson"``
        evaluate at ``z = 1 + eps`` for the two offsets and extrapolate
        linearly to ``eps = 0``.  The same extrapolation from the next
        coarser pair of offsets serves as an error estimate; the method fails
        when the two extrapolations differ by more than ``extrapolation_tol``
        (modes decaying on the scale of ``eps`` per step).
    ``"residue"``
        exact residue at ``z = 1`` from the null spaces of ``1 - sum T``:
        ``rho_ss = R (L^H W R)^-1 L^H rho0`` with ``W = sum k T_k``.
    ``"auto"``
        Richardson, falling back to the residue on disagreement.

    The result is Hermitized and trace-normalised, then checked against the
    fixed-point residual.
    """
    if method not in ("richardson", "residue", "auto"):
        raise KineticsError(f"unknown steady-state method {method!r}")
    d = tensors.d
    d2 = d * d
    r0 = _reduced(rho0, d)
    v0 = vec(r0)
    S = tensor_sum(tensors)
    A0 = np.eye(d2) - S
    gap = np.min(np.abs(np.linalg.eigvals(S) - 1.0))
    if gap > UNIT_EIGENVALUE_TOL:
        raise KineticsError(f"sum of transfer tensors has no unit eigenvalue (closest at distance {gap:.3g})")

    v = None
    if method in ("richardson", "auto"):
        e1, e2 = eps
        e0 = e1 * e1 / e2  # one step coarser, used only to estimate the error
        x0, x1, x2 = (_final_value(tensors, v0, e) for e in (e0, e1, e2))
        xr = (e1 * x2 - e2 * x1) / (e1 - e2)
        coarse = (e0 * x1 - e1 * x0) / (e0 - e1)
        # the fine pair carries an error smaller by e2/e0 than the coarse pair
        disagreement = max_abs(xr - coarse) * e2 / e0
        if disagreement <= extrapolation_tol:
            v = xr
        elif method == "richardson":
            raise KineticsError(
                f"final-value extrapolation disagrees by {disagreement:.3g}; slow or degenerate modes"
            )
    if v is None:
        _, R, Lh = _null_spaces(A0)
        if R.shape[1] == 0:
            raise KineticsError("1 - sum T has no null space")
        W = np.tensordot(np.arange(1, tensors.K + 1, dtype=float), tensors.tensors, axes=1)
        v = R @ np.linalg.solve(Lh @ W @ R, Lh @ v0)

    rho = _finish_state(v, d)
    residual = np.linalg.norm(A0 @ vec(rho))
    if residual > residual_tol:
        raise KineticsError(f"steady-state residual {residual:.3g} exceeds {residual_tol:g}")
    return DensityMatrix(_dims_for(d), rho)


# -- the z-domain hierarchy -----------------------------------------------------

def _expansion(tensors, order):
    """``A_0 ... A_order`` of ``1 - T[1+u] = sum_j A_j u^j``."""
    d2 = tensors.d ** 2
    k = np.arange(1, tensors.K + 1, dtype=float)
    out = [np.eye(d2) - tensor_sum(tensors)]
    coeff = np.ones_like(k)
    for j in range(1, order + 1):
        coeff = coeff * (k + j - 1) / j  # binomial(k + j - 1, j)
        out.append((-1) ** (j + 1) * np.tensordot(coeff, tensors.tensors, axes=1))
    return out


def deviation_moments(tensors, rho0, rho_ss, order=0, null_correction=True):
    """Vectors ``S_0 ... S_order`` with ``drho[1+u] = sum_m S_m u^m``.

    ``S_0 = sum_k drho_k``, ``-S_1 = sum_k k drho_k`` and
    ``S_1 + 2 S_2 = sum_k k^2 drho_k`` (sums start at k = 0).
    """
    d = tensors.d
    v0 = vec(_reduced(rho0, d))
    vs = vec(_reduced(rho_ss, d))
    A = _expansion(tensors, order + 2)
    A0inv, R, Lh = _null_spaces(A[0])
    b = [v0 - A[1] @ vs] + [-(A[m] + A[m + 1]) @ vs for m in range(1, order + 2)]
    S = []
    if null_correction and R.shape[1]:
        proj = Lh @ A[1] @ R
        if np.linalg.cond(proj) > 1e12:
            raise KineticsError("unit eigenvalue of sum T is not semisimple; null component undetermined")
    for m in range(order + 1):
        rhs = b[m] - sum((A[i] @ S[m - i] for i in range(1, m + 1)), np.zeros_like(v0))
        p = A0inv @ rhs
        if null_correction and R.shape[1]:
            nxt = b[m + 1] - A[1] @ p - sum((A[i] @ S[m + 1 - i] for i in range(2, m + 2)),
                                            np.zeros_like(v0))
            p = p + R @ np.linalg.solve(proj, Lh @ nxt)
        S.append(p)
    return S


# -- relaxation matrix ----------------------------------------------------------

@dataclass
class RelaxationMatrix:
    """``tau_hat = sum_k (rho_k - rho_ss) dt`` as a Hermitian d x d matrix."""

    matrix: np.ndarray
    dt: float
    asymmetry: float = 0.0
    projections: dict = field(default_factory=dict)

    def project(self, obs, name=None):
        """``Tr{obs tau_hat}``; stored under ``name`` when given."""
        val = float(np.trace(np.asarray(obs) @ self.matrix).real)
        if name is not None:
            self.projections[name] = val
        return val


def relaxation_matrix(tensors, rho0, rho_ss, null_correction=True,
                      rank_tol=DEFAULT_RANK_TOL, asymmetry_tol=ASYMMETRY_TOL):
    """Relaxation matrix from the summed transfer tensors.

    With ``null_correction=False`` this is literally
    ``unvec((1 - sum T)^- vec(rho0 - rho_ss)) dt``.  The default adds the
    null-space component that makes it equal to the time sum of the deviation.
    The anti-Hermitian part (relative to the largest entry) is reported and
    raises above ``asymmetry_tol``.
    """
    d = tensors.d
    r0, rs = _reduced(rho0, d), _reduced(rho_ss, d)
    if null_correction:
        v = deviation_moments(tensors, r0, rs, 0, True)[0]
    else:
        A0 = np.eye(d * d) - tensor_sum(tensors)
        v = pseudoinverse(A0, rank_tol) @ vec(r0 - rs)
    M = unvec(v, d) * tensors.dt
    # below one step's worth of unit deviation the relative asymmetry is noise
    scale = max(max_abs(M), tensors.dt)
    asym = max_abs(M - M.conj().T) / 2 / scale
    if asym > asymmetry_tol:
        raise KineticsError(
            f"relaxation matrix asymmetry {asym:.3g} exceeds {asymmetry_tol:g}; learning window unconverged"
        )
    return RelaxationMatrix(hermitize(M), tensors.dt, asym)


def lifetime(tau_hat, obs, rho0, rho_ss):
    """``tau = Tr{o tau_hat} / (<o>(0) - <o>(inf))``."""
    o = np.asarray(obs)
    r0, rs = _matrix(rho0), _matrix(rho_ss)
    denom = float(np.trace(o @ (r0 - rs)).real)
    if abs(denom) <= 1e-10:
        raise KineticsError("observable does not change between the initial and steady states")
    return tau_hat.project(o) / denom


class NormalizedRelaxation(NamedTuple):
    matrix: np.ndarray
    eigenvalues: np.ndarray  # sorted by real part, descending
    nonzero: int


def normalized_relaxation_matrix(tau_hat, rho0, rho_ss, rank_tol=DEVIATION_RANK_TOL):
    """``tau' = [rho0 - rho_ss]^- tau_hat`` and its eigenvalues.

    Singular values of the initial deviation below ``rank_tol`` (relative)
    are dropped: a steady state that is only converged to ~1e-6 otherwise
    leaves tiny populations whose inverse swamps the spectrum.
    """
    delta = _matrix(rho0) - _matrix(rho_ss)
    if max_abs(delta) <= 1e-12:
        raise KineticsError("initial state equals the steady state")
    M = pseudoinverse(delta, rank_tol) @ tau_hat.matrix
    ev = np.linalg.eigvals(M)
    ev = ev[np.argsort(-ev.real, kind="stable")]
    big = np.max(np.abs(ev)) if ev.size else 0.0
    nonzero = int(np.sum(np.abs(ev) > EIGEN_ZERO_REL * big)) if big > 0 else 0
    return NormalizedRelaxation(M, ev, nonzero)


def decay_rate(eigenvalues):
    """``1 / lambda_max`` with ``lambda_max`` the largest real part."""
    lam = float(np.max(np.real(eigenvalues)))
    if lam <= 0:
        raise KineticsError("normalized relaxation matrix has no positive eigenvalue")
    return 1.0 / lam


# -- moments ---------------------------------------------------------------------

def moments(tensors, rho0, rho_ss, obs, order=1, null_correction=True):
    """Discrete time moments of the observable deviation.

    ``order=1``: ``M_1 = dt^2 Tr{o sum_k k drho_k}``;
    ``order=2``: ``M_2 = dt^3 Tr{o sum_k k^2 drho_k}``.

    ``null_correction=False`` evaluates the pseudoinverse expressions
    ``R W R drho_0`` and ``(2 R W R W R + R V R) drho_0``.
    """
    if order not in (1, 2):
        raise KineticsError("moment order must be 1 or 2")
    d, dt = tensors.d, tensors.dt
    o = np.asarray(obs)
    if null_correction:
        S = deviation_moments(tensors, rho0, rho_ss, order, True)
        v = -S[1] if order == 1 else S[1] + 2 * S[2]
    else:
        A0 = np.eye(d * d) - tensor_sum(tensors)
        R = pseudoinverse(A0)
        if np.linalg.matrix_rank(A0, tol=DEFAULT_RANK_TOL * np.linalg.norm(A0, 2)) == 0:
            raise KineticsError("pseudoinverse rank collapse")
        k = np.arange(1, tensors.K + 1, dtype=float)
        W = np.tensordot(k, tensors.tensors, axes=1)
        d0 = vec(_matrix(rho0) - _matrix(rho_ss))
        RWR = R @ W @ R
        if order == 1:
            v = RWR @ d0
        else:
            V = np.tensordot(k * k, tensors.tensors, axes=1)
            v = (2 * RWR @ W @ R + R @ V @ R) @ d0
    return float(np.trace(o @ unvec(v, d)).real) * dt ** (order + 1)


def poisson_indicator(m1, m2, tau_o):
    """``M_2 <tau>_o / M_1^2 - 1``."""
    if m1 == 0:
        raise KineticsError("first moment vanishes")
    return m2 * tau_o / (m1 * m1) - 1.0


# -- resonances ------------------------------------------------------------------

def analytic_damped_cosine_tau(omega, r, dt):
    """``(dt/2)(cos w dt - e^{-r dt}) / (cosh r dt - cos w dt)``.

    Equals ``sum_{k>=1} cos(w k dt) e^{-r k dt} dt``; adding ``dt`` gives the
    sum from ``k = 0`` that the tensor pipeline computes.
    """
    if not r > 0 or not dt > 0:
        raise KineticsError("need r > 0 and dt > 0")
    a, c = r * dt, math.cos(omega * dt)
    den = math.cosh(a) - c
    if den <= 0:
        raise KineticsError("degenerate denominator")
    return 0.5 * dt * (c - math.exp(-a)) / den


@dataclass
class ResonanceScan:
    dt_grid: np.ndarray
    tau_values: np.ndarray
    tau_corrected: np.ndarray
    peaks: list

    def __post_init__(self):
        if not len(self.dt_grid) == len(self.tau_values) == len(self.tau_corrected):
            raise KineticsError("resonance scan grids differ in length")

    def peak_positions(self):
        return [p[0] for p in self.peaks]


def find_peaks(x, y, mad_factor=3.0):
    """Strict interior maxima of ``y`` whose prominence clears a noise floor.

    The floor is ``mad_factor`` times the median absolute deviation of the
    grid increments of ``y``, which tracks point-to-point jitter rather than
    the slow baseline drift.  Flat tops count once, at their smallest ``x``.
    """
    y = np.asarray(y, dtype=float)
    n = len(y)
    if n < 3:
        return []
    inc = np.diff(y)
    floor = mad_factor * np.median(np.abs(inc - np.median(inc)))
    cand = []
    i = 1
    while i < n - 1:
        j = i
        while j + 1 < n and y[j + 1] == y[i]:
            j += 1
        if j < n - 1 and y[i] > y[i - 1] and y[j] > y[j + 1]:
            cand.append(i)
        i = j + 1
    if not cand:
        return []
    prom = peak_prominences(y, cand)[0]
    return [i for i, p in zip(cand, prom) if p > floor]


def _lifetime_at(source, rho0, obs, dt, window_time, steady_method, null_correction, check=None):
    K = int(math.ceil(window_time / dt - 1e-9))
    series = source(dt, K)
    if check is not None:
        check(series)
    T = transfer_tensors(series)
    rs = steady_state(T, rho0, method=steady_method)
    tau = relaxation_matrix(T, rho0, rs, null_correction=null_correction)
    return lifetime(tau, obs, rho0, rs)


def map_source(spec, backend="auto"):
    """``(dt, K) -> DynamicalMapSeries`` for a model."""
    return lambda dt, K: maps_mod.dynamical_maps(spec, dt, K, backend=backend)


def resonance_scan(scenario, rho0, obs, dt_grid, window_time, steady_method="auto",
                   null_correction=True, workers=None, check=None):
    """Lifetime estimate as a function of the tensor time step.

    ``scenario`` is a :class:`ModelSpec` or a callable ``(dt, K) ->
    DynamicalMapSeries``.  Each grid point builds its own maps over the same
    physical ``window_time``.  ``tau_corrected`` subtracts ``dt/2``.
    ``check`` (optional) is called with every generated map series.
    """
    grid = np.asarray(dt_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0 or np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
        raise KineticsError("dt grid must be positive and strictly ascending")
    if window_time < grid[-1]:
        raise KineticsError("learning window shorter than one dt step")
    source = map_source(scenario) if isinstance(scenario, ModelSpec) else scenario
    r0 = _matrix(rho0)

    def one(dt):
        return _lifetime_at(source, r0, obs, float(dt), window_time, steady_method, null_correction, check)

    with ThreadPoolExecutor(max_workers=workers or worker_count()) as pool:
        tau = np.array(list(pool.map(one, grid)))
    corrected = tau - grid / 2
    peaks = [(grid[i], 2 * math.pi / grid[i], corrected[i]) for i in find_peaks(grid, corrected)]
    return ResonanceScan(grid, tau, corrected, peaks)


# -- aggregated report ------------------------------------------------------------

def _fmt(x):
    return repr(float(x))


@dataclass
class KineticsReport:
    steady_state: DensityMatrix
    tau_hat: RelaxationMatrix
    tau_hat_prime_eigs: list
    lifetimes: dict = field(default_factory=dict)
    moments: dict = field(default_factory=dict)
    steady_values: dict = field(default_factory=dict)
    resonances: ResonanceScan = None

    def rows(self):
        """Flat ``(quantity, value)`` pairs."""
        out = [(f"steady_{k}", v) for k, v in self.steady_values.items()]
        out += [(f"tau_hat_{k}", v) for k, v in self.tau_hat.projections.items()]
        out += [(f"lifetime_{k}", v) for k, v in self.lifetimes.items()]
        out += [(f"rate_{k}", 1.0 / v) for k, v in self.lifetimes.items() if v]
        out += [(k, v) for k, v in self.moments.items()]
        out += [(f"tau_prime_eig_{i}", float(np.real(e))) for i, e in enumerate(self.tau_hat_prime_eigs)]
        out.append(("tau_hat_asymmetry", self.tau_hat.asymmetry))
        return out

    def to_csv(self):
        lines = ["quantity,value"]
        lines += [f"{k},{_fmt(v)}" for k, v in self.rows()]
        return "\n".join(lines) + "\n"

    def to_text(self):
        parts = ["[steady_state]"]
        parts += [f"{k} = {_fmt(v)}" for k, v in self.steady_values.items()]
        parts += ["", "[relaxation]", f"dt = {_fmt(self.tau_hat.dt)}",
                  f"asymmetry = {_fmt(self.tau_hat.asymmetry)}"]
        parts += [f"tau_hat_{k} = {_fmt(v)}" for k, v in self.tau_hat.projections.items()]
        parts += [f"eigenvalues = {' '.join(_fmt(np.real(e)) for e in self.tau_hat_prime_eigs)}"]
        parts += ["", "[lifetimes]"] + [f"{k} = {_fmt(v)}" for k, v in self.lifetimes.items()]
        if self.moments:
            parts += ["", "[moments]"] + [f"{k} = {_fmt(v)}" for k, v in self.moments.items()]
        if self.resonances is not None:
            parts += ["", "[resonances]"]
            parts += [f"peak dt = {_fmt(a)} omega = {_fmt(b)} tau = {_fmt(c)}"
                      for a, b, c in self.resonances.peaks]
        return "\n".join(parts) + "\n"


def analyse(tensors, rho0, observables, with_moments=True, steady_method="auto",
            null_correction=True):
    """Steady state, relaxation matrix, lifetimes and moments for named observables."""
    r0 = _reduced(rho0, tensors.d)
    rs = steady_state(tensors, r0, method=steady_method)
    tau = relaxation_matrix(tensors, r0, rs.matrix, null_correction=null_correction)
    norm = None
    if max_abs(r0 - rs.matrix) > 1e-12:
        # the spectrum is taken from the plain pseudoinverse form; the corrected
        # matrix adds approach-to-steady-state modes on top of the depletion mode
        raw = tau if not null_correction else relaxation_matrix(tensors, r0, rs.matrix, False)
        norm = normalized_relaxation_matrix(raw, r0, rs.matrix)
    report = KineticsReport(rs, tau, list(norm.eigenvalues) if norm else [])
    for name, op in observables.items():
        op = np.asarray(op)
        report.steady_values[name] = rs.expect(op)
        tau.project(op, name)
        try:
            t = lifetime(tau, op, r0, rs.matrix)
        except KineticsError:
            continue
        report.lifetimes[name] = t
        if with_moments:
            m1 = moments(tensors, r0, rs.matrix, op, 1, null_correction)
            m2 = moments(tensors, r0, rs.matrix, op, 2, null_correction)
            report.moments[f"M1_{name}"] = m1
            report.moments[f"M2_{name}"] = m2
            if m1:
                report.moments[f"poisson_{name}"] = poisson_indicator(m1, m2, tau.projections[name])
    return report




# -- parameter sweeps -------------------------------------------------------------

#: learning window is at least this long and at least ``MEMORY_FACTOR / kappa``
MIN_WINDOW = 4.0
MEMORY_FACTOR = 2.0

#: default number of tensors per sweep point
SWEEP_STEPS = 400


def learning_plan(kappa, min_window=MIN_WINDOW, memory_factor=MEMORY_FACTOR,
                  steps=SWEEP_STEPS, min_dt=0.01):
    """``(dt, K)`` for a lifetime estimate at cavity loss ``kappa``.

    The cavity correlation time scales as 1/kappa, so the window grows as
    ``memory_factor / kappa``; dt grows with it to keep about ``steps``
    tensors.
    """
    window = max(min_window, memory_factor / kappa)
    dt = max(min_dt, window / steps)
    return dt, int(math.ceil(window / dt - 1e-9))


def kappa_sweep(base, kappas, rho0, obs, plan=learning_plan, backend="auto",
                steady_method="auto", check=None, errors="raise"):
    """Lifetime of ``obs`` for each cavity loss rate.

    Returns rows ``{"kappa", "dt", "window", "tau", "rate"}``; ``tau`` has the
    ``dt/2`` discretisation baseline removed.  ``check`` (optional) is called
    with every generated map series.  With ``errors="record"`` a point whose
    tensors give no physical steady state keeps ``nan`` values and the reason
    under ``"error"`` instead of aborting the sweep.
    """
    if errors not in ("raise", "record"):
        raise KineticsError(f"errors must be 'raise' or 'record', not {errors!r}")
    r0 = _matrix(rho0)
    rows = []
    for kappa in kappas:
        spec = base.with_(kappa=float(kappa))
        dt, K = plan(float(kappa))
        series = maps_mod.dynamical_maps(spec, dt, K, backend=backend)
        if check is not None:
            check(series)
        row = {"kappa": float(kappa), "dt": dt, "window": dt * K, "tau": math.nan, "rate": math.nan}
        try:
            T = transfer_tensors(series)
            rs = steady_state(T, r0, method=steady_method)
            tau = lifetime(relaxation_matrix(T, r0, rs.matrix), obs, r0, rs.matrix) - dt / 2
            if not tau > 0:
                raise KineticsError(f"non-positive lifetime {tau:.3g} at kappa {kappa:g}")
        except (KineticsError, TTMError, ModelError) as exc:
            if errors == "raise":
                raise
            row["error"] = str(exc)
        else:
            row.update(tau=tau, rate=1.0 / tau)
        rows.append(row)
    return rows

__all__ = [
    "KineticsError", "RelaxationMatrix", "ResonanceScan", "KineticsReport", "NormalizedRelaxation",
    "steady_state", "relaxation_matrix", "lifetime", "normalized_relaxation_matrix",
    "analytic_damped_cosine_tau", "resonance_scan", "moments", "poisson_indicator",
    "deviation_moments", "find_peaks", "decay_rate", "analyse", "map_source",
    "learning_plan", "kappa_sweep",
]

"""Exact full-system propagation and reduced dynamical maps.

The reduced map ``E_k`` is a ``d^2 x d^2`` matrix acting on column-stacked
``vec(rho)`` of the TLS subsystem.  Column ``i + j*d`` of ``E_k`` is the
reduced state at ``t_k`` obtained from ``|i><j| (x) |0><0|`` (cavity vacuum),
so ``E_0`` is exactly the identity.

Three propagation backends are available:

``dense``
    ``exp(L dt)`` on every invariant block of the sparse Liouvillian
    (connected components of its sparsity graph).  Exact and robust for
    stiff generators; default whenever the largest block is small enough.
``taylor``
    matrix-free truncated Taylor action of the generator applied to stacks of
    full-space density matrices; used when the blocks are too large.
``rk``
    adaptive DOP853 integration, mostly used as an independent check.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import math
import os
import warnings

import numpy as np
import scipy.sparse as sp
from scipy.integrate import solve_ivp
from scipy.sparse.csgraph import connected_components

from . import models
from .numerics import matrix_exponential, max_abs, unvec, vec

BACKENDS = ("auto", "dense", "taylor", "rk")

#: largest invariant Liouvillian block the dense backend exponentiates
MAX_DENSE_BLOCK = 2500


class MapError(ValueError):
    """Invalid input to propagation or map extraction."""


class FockConvergenceWarning(UserWarning):
    """The cavity truncation did not converge to the requested tolerance."""


def worker_count():
    """Worker cap from ``POLARITON_TTM_THREADS`` (default: all cores)."""
    env = os.environ.get("POLARITON_TTM_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


# -- data types ---------------------------------------------------------------

@dataclass
class Trajectory:
    """Time series of density matrices on a uniform grid ``t_k = k dt``.

    ``states`` is an array of shape ``(K+1, D, D)``.  ``trace_drift`` is filled
    by TTM propagation.
    """

    dt: float
    states: np.ndarray
    dims: tuple = ()
    observables: dict = field(default_factory=dict)
    trace_drift: np.ndarray = None

    def __post_init__(self):
        self.states = np.asarray(self.states)
        if not self.dims:
            self.dims = (self.states.shape[-1],)
        self.dims = tuple(self.dims)

    @property
    def times(self):
        return self.dt * np.arange(len(self.states))

    def __len__(self):
        return len(self.states)

    def density_matrix(self, k):
        return models.DensityMatrix(self.dims, self.states[k])

    def expect(self, op):
        return observable_trajectory(self, None, op)


@dataclass
class DynamicalMapSeries:
    """Ordered maps ``E_0 ... E_K`` on the reduced space, step ``dt``."""

    d: int
    dt: float
    maps: np.ndarray
    fock_gap: float = None

    def __post_init__(self):
        self.maps = np.asarray(self.maps, dtype=complex)
        d2 = self.d * self.d
        if self.maps.ndim != 3 or self.maps.shape[1:] != (d2, d2):
            raise MapError(f"maps must have shape (K+1, {d2}, {d2}), got {self.maps.shape}")
        if not np.array_equal(self.maps[0], np.eye(d2)):
            raise MapError("E_0 must be exactly the identity")
        if not self.dt > 0:
            raise MapError("dt must be positive")

    @property
    def K(self):
        return len(self.maps) - 1

    def truncate(self, K):
        """Series restricted to ``E_0 ... E_K``."""
        if K > self.K:
            raise MapError(f"cannot truncate a series of length {self.K} to {K}")
        return DynamicalMapSeries(self.d, self.dt, self.maps[: K + 1].copy(), self.fock_gap)

    def subsample(self, stride):
        """Series at step ``stride * dt`` (every ``stride``-th map)."""
        return DynamicalMapSeries(self.d, self.dt * stride, self.maps[::stride].copy(), self.fock_gap)

    def apply(self, rho0):
        """Reduced states ``unvec(E_k vec(rho0))`` for every k, shape (K+1, d, d)."""
        v = self.maps @ vec(_matrix(rho0))
        return v.reshape(-1, self.d, self.d).transpose(0, 2, 1)


def _matrix(rho):
    return rho.matrix if isinstance(rho, models.DensityMatrix) else np.asarray(rho, dtype=complex)


# -- CPTP diagnostics ---------------------------------------------------------

def choi_matrix(E, d=None):
    """Choi matrix ``sum_ij |i><j| (x) E(|i><j|)`` of a column-stacked superoperator."""
    E = np.asarray(E)
    if d is None:
        d = int(round(math.sqrt(E.shape[0])))
    # E[a + b d, i + j d] = E(|i><j|)[a, b]  ->  C[(i, a), (j, b)]
    E4 = E.reshape(d, d, d, d)  # [b, a, j, i]
    return E4.transpose(3, 1, 2, 0).reshape(d * d, d * d)


def cptp_violations(E, d=None, rng=None):
    """Return ``(trace_err, hermiticity_err, min_choi_eig)`` for one map."""
    E = np.asarray(E)
    if d is None:
        d = int(round(math.sqrt(E.shape[0])))
    vI = vec(np.eye(d))
    trace_err = max_abs(vI.conj() @ E - vI.conj())
    rng = np.random.default_rng(0) if rng is None else rng
    A = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    A = A + A.conj().T
    out = unvec(E @ vec(A), d)
    herm_err = max_abs(out - out.conj().T) / max(max_abs(A), 1.0)
    C = choi_matrix(E, d)
    min_eig = float(np.linalg.eigvalsh(0.5 * (C + C.conj().T))[0])
    return trace_err, herm_err, min_eig


def check_cptp(series, trace_tol=1e-8, herm_tol=1e-8, choi_tol=1e-7):
    """Worst-case CPTP diagnostics over a whole map series.

    Returns a dict with the worst trace error, Hermiticity error, minimum Choi
    eigenvalue and an ``ok`` flag.
    """
    maps = series.maps if isinstance(series, DynamicalMapSeries) else np.asarray(series)
    d = int(round(math.sqrt(maps.shape[1])))
    rng = np.random.default_rng(12345)
    worst = [0.0, 0.0, np.inf]
    for E in maps:
        t, h, c = cptp_violations(E, d, rng)
        worst = [max(worst[0], t), max(worst[1], h), min(worst[2], c)]
    return {
        "trace_err": worst[0],
        "hermiticity_err": worst[1],
        "min_choi_eig": worst[2],
        "ok": worst[0] <= trace_tol and worst[1] <= herm_tol and worst[2] >= -choi_tol,
    }


# -- propagation engine -------------------------------------------------------

def sparse_liouvillian(spec, ops=None):
    """Liouvillian as a scipy CSR matrix (same convention as ``models.liouvillian``)."""
    ops = ops or models.build_operators(spec)
    H = sp.csr_matrix(models.hamiltonian(spec, ops))
    a = sp.csr_matrix(ops.a)
    num = (a.conj().T @ a).tocsr()
    I = sp.identity(spec.full_dim, dtype=complex, format="csr")
    L = -1j * (sp.kron(I, H) - sp.kron(H.T, I))
    if spec.kappa:
        L = L + 0.5 * spec.kappa * (2 * sp.kron(a.conj(), a) - sp.kron(I, num) - sp.kron(num.T, I))
    L = sp.csr_matrix(L)
    L.eliminate_zeros()
    return L


def invariant_blocks(L):
    """Index sets of the connected components of the Liouvillian graph."""
    pattern = abs(L)
    ncomp, labels = connected_components(pattern + pattern.T, directed=False)
    order = np.argsort(labels, kind="stable")
    bounds = np.cumsum(np.bincount(labels, minlength=ncomp))[:-1]
    return np.split(order, bounds)


class Propagator:
    """Steps stacks of full-space density matrices by a fixed ``dt``.

    Parameters
    ----------
    spec : ModelSpec
    dt : float
        Step length in 1/kappa_0.
    backend : {"auto", "dense", "taylor", "rk"}
    """

    def __init__(self, spec, dt, backend="auto", rk_tol=1e-12):
        if backend not in BACKENDS:
            raise MapError(f"unknown backend {backend!r}; expected one of {BACKENDS}")
        if not dt > 0 or not math.isfinite(dt):
            raise MapError("dt must be positive and finite")
        self.spec = spec
        self.dt = float(dt)
        self.D = spec.full_dim
        self.rk_tol = rk_tol
        ops = models.build_operators(spec)
        self._rhs = models.lindblad_rhs(spec, ops)
        self._norm = models.generator_norm_bound(spec, ops)
        self._blocks = None
        if backend in ("auto", "dense"):
            L = sparse_liouvillian(spec, ops)
            blocks = invariant_blocks(L)
            largest = max(len(b) for b in blocks)
            if backend == "dense" or largest <= MAX_DENSE_BLOCK:
                backend = "dense"
                Lc = L.tocsc()
                self._blocks = [
                    (idx, matrix_exponential(Lc[idx][:, idx].toarray(), self.dt)) for idx in blocks
                ]
            else:
                backend = "taylor"
        self.backend = backend

    # vec <-> stacks of matrices (column stacking)
    def _to_vec(self, X):
        return X.transpose(0, 2, 1).reshape(X.shape[0], -1)

    def _from_vec(self, V):
        return V.reshape(V.shape[0], self.D, self.D).transpose(0, 2, 1)

    def run(self, X0, n_steps, record=None):
        """Propagate ``X0`` (shape (m, D, D)) for ``n_steps`` steps.

        ``record(k, X)`` is called for k = 0..n_steps with the current stack;
        its return values are collected into a list.
        """
        X0 = np.asarray(X0, dtype=complex)
        if X0.ndim == 2:
            X0 = X0[None]
        if X0.shape[1:] != (self.D, self.D):
            raise MapError(f"state shape {X0.shape[1:]} does not match full dimension {self.D}")
        record = record or (lambda k, X: X.copy())
        if self.backend == "dense":
            return self._run_dense(X0, n_steps, record)
        if self.backend == "rk":
            return self._run_rk(X0, n_steps, record)
        return self._run_taylor(X0, n_steps, record)

    def _run_dense(self, X0, n_steps, record):
        V = self._to_vec(X0)
        work = []
        for idx, U in self._blocks:
            rows = np.flatnonzero(np.any(V[:, idx] != 0, axis=1))
            if rows.size:
                work.append((idx, rows, U.T.copy(), V[np.ix_(rows, idx)]))
        out = [record(0, X0)]
        for k in range(1, n_steps + 1):
            V = np.zeros_like(V) if k == 1 else V
            for i, (idx, rows, UT, W) in enumerate(work):
                W = W @ UT
                work[i] = (idx, rows, UT, W)
                V[np.ix_(rows, idx)] = W
            out.append(record(k, self._from_vec(V)))
        return out

    def _taylor_step(self, X, tol=2.0 ** -53, max_terms=60):
        s = max(1, math.ceil(self._norm * self.dt))
        h = self.dt / s
        for _ in range(s):
            term = X
            acc = X.copy()
            prev = np.inf
            for j in range(1, max_terms + 1):
                term = self._rhs(term) * (h / j)
                acc += term
                cur = max_abs(term)
                if cur + prev <= tol * max_abs(acc):
                    break
                prev = cur
            X = acc
        return X

    def _run_taylor(self, X0, n_steps, record):
        X = X0.copy()
        out = [record(0, X)]
        workers = min(worker_count(), X.shape[0])
        chunks = np.array_split(np.arange(X.shape[0]), workers) if workers > 1 else None
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for k in range(1, n_steps + 1):
                if chunks is None:
                    X = self._taylor_step(X)
                else:
                    parts = list(pool.map(lambda c: self._taylor_step(X[c]), chunks))
                    X = np.concatenate(parts, axis=0)
                out.append(record(k, X))
        return out

    def _run_rk(self, X0, n_steps, record):
        shape = X0.shape
        rhs = self._rhs

        def f(t, y):
            return rhs(y.reshape(shape)).ravel()

        t_eval = self.dt * np.arange(n_steps + 1)
        sol = solve_ivp(f, (0.0, t_eval[-1]), X0.ravel(), method="DOP853", t_eval=t_eval,
                        rtol=self.rk_tol, atol=self.rk_tol * 1e-2)
        if not sol.success:
            raise MapError(f"adaptive integration failed: {sol.message}")
        return [record(k, sol.y[:, k].reshape(shape)) for k in range(n_steps + 1)]


# -- public operations --------------------------------------------------------

def partial_trace_cavity(rho_f, dims=None):
    """Trace out the trailing cavity factor.

    Accepts a :class:`DensityMatrix` (dims taken from it; returns a
    DensityMatrix) or a raw matrix / stack of matrices with explicit ``dims``
    (returns an array).
    """
    if isinstance(rho_f, models.DensityMatrix):
        if len(rho_f.dims) < 2:
            raise MapError("state has no cavity factor to trace out")
        red = _ptrace(rho_f.matrix, rho_f.dims)
        return models.DensityMatrix(rho_f.dims[:-1], 0.5 * (red + red.conj().T))
    if dims is None or len(dims) < 2:
        raise MapError("partial trace needs dims ending with the cavity factor")
    return _ptrace(np.asarray(rho_f), dims)


def _ptrace(M, dims):
    d = int(np.prod(dims[:-1]))
    n = dims[-1]
    lead = M.shape[:-2]
    R = M.reshape(*lead, d, n, d, n)
    return np.trace(R, axis1=-3, axis2=-1)


def _full_matrix(rho0, spec):
    M = _matrix(rho0)
    if M.shape != (spec.full_dim, spec.full_dim):
        raise MapError(f"initial state has shape {M.shape}, expected full dimension {spec.full_dim}")
    return M


def propagate_exact(spec, rho0, dt, K, backend="auto", reduced=False):
    """Exact full-system trajectory ``rho_f(k dt)``, k = 0..K.

    The step propagator is computed once and reused.  With ``reduced=True``
    only the cavity-traced states are stored.
    """
    if K < 1:
        raise MapError("K must be >= 1")
    M = _full_matrix(rho0, spec)
    prop = Propagator(spec, dt, backend)
    if reduced:
        rec = lambda k, X: _ptrace(X[0], spec.dims)
        dims = tuple(spec.dims[:-1])
    else:
        rec = lambda k, X: X[0].copy()
        dims = tuple(spec.dims)
    states = np.array(prop.run(M[None], K, rec))
    return Trajectory(dt=dt, states=states, dims=dims)


def dynamical_maps(spec, dt, K, backend="auto", fock_gap=None):
    """Reduced dynamical maps ``E_0 ... E_K`` at step ``dt``.

    Every reduced matrix unit ``|i><j|`` is tensored with the cavity vacuum,
    propagated exactly and traced over the cavity at each step.
    """
    if K < 0:
        raise MapError("K must be >= 0")
    d = spec.tls_dim
    n = spec.n_cavity
    d2 = d * d
    maps = np.empty((K + 1, d2, d2), dtype=complex)
    maps[0] = np.eye(d2)
    if K:
        # the image of |j><i| is the adjoint of the image of |i><j|, so only
        # columns with i <= j are propagated
        pairs = [(i, j) for j in range(d) for i in range(j + 1)]
        X0 = np.zeros((len(pairs), spec.full_dim, spec.full_dim), dtype=complex)
        for c, (i, j) in enumerate(pairs):
            X0[c, i * n, j * n] = 1.0
        direct = np.array([i + j * d for i, j in pairs])
        mirror = np.array([j + i * d for i, j in pairs])

        def rec(k, X):
            if k:
                red = _ptrace(X, spec.dims)  # (len(pairs), d, d)
                maps[k][:, direct] = red.transpose(0, 2, 1).reshape(len(pairs), d2).T
                maps[k][:, mirror] = red.conj().reshape(len(pairs), d2).T
            return None

        Propagator(spec, dt, backend).run(X0, K, rec)
    if fock_gap is not None and fock_gap > FOCK_TOL:
        warnings.warn(f"cavity truncation not converged (gap {fock_gap:.3g})", FockConvergenceWarning)
    return DynamicalMapSeries(d=d, dt=float(dt), maps=maps, fock_gap=fock_gap)


def markovian_maps(generator, dt, K):
    """Map series ``E_k = exp(generator dt)^k`` of a memoryless reduced generator."""
    G = np.asarray(generator, dtype=complex)
    d2 = G.shape[0]
    d = int(round(math.sqrt(d2)))
    if G.shape != (d2, d2) or d * d != d2:
        raise MapError(f"generator must be square with size d^2, got {G.shape}")
    if K < 0:
        raise MapError("K must be >= 0")
    step = matrix_exponential(G, dt)
    maps = np.empty((K + 1, d2, d2), dtype=complex)
    maps[0] = np.eye(d2)
    for k in range(1, K + 1):
        maps[k] = step @ maps[k - 1]
    return DynamicalMapSeries(d=d, dt=float(dt), maps=maps)


def observable_trajectory(source, rho0, obs):
    """Real time series ``Tr{obs rho(t_k)}``.

    ``source`` is a :class:`Trajectory` (``rho0`` ignored) or a
    :class:`DynamicalMapSeries` applied to ``rho0``.
    """
    if isinstance(source, DynamicalMapSeries):
        states = source.apply(rho0)
    elif isinstance(source, Trajectory):
        states = source.states
    else:
        states = np.asarray(source)
    obs = np.asarray(obs)
    if obs.shape != states.shape[1:]:
        raise MapError(f"observable shape {obs.shape} does not match states {states.shape[1:]}")
    vals = np.einsum("ij,kji->k", obs, states)
    if max_abs(vals.imag) > 1e-8:
        raise MapError("observable has an imaginary expectation value; state or operator not Hermitian")
    return vals.real.copy()


# -- cavity truncation --------------------------------------------------------

#: max-abs change of the fully excited <sigma_z> trajectory that counts as converged
FOCK_TOL = 1e-6


def converge_fock(spec, window_time, dt, tol=FOCK_TOL, max_cavity=40, backend="auto"):
    """Grow the Fock truncation until the learning-window dynamics converge.

    TC keeps ``n = N + 1``.  For Dicke/PF, ``n - N`` is doubled until the fully
    excited ``<sigma_z^1>`` trajectory over the window changes by less than
    ``tol`` (max-abs).  Returns ``(spec, gap)``.
    """
    if spec.kind == "TC":
        return spec, 0.0
    K = max(1, int(round(window_time / dt)))

    def sz_trace(s):
        rho0 = models.initial_state("fully_excited", s)
        traj = propagate_exact(s, rho0, dt, K, backend=backend, reduced=True)
        return observable_trajectory(traj, None, models.tls_observable("sz:1", s.n_tls))

    cur = spec
    cur_sz = sz_trace(cur)
    gap = np.inf
    while True:
        extra = 2 * (cur.n_cavity - cur.n_tls)
        n_next = cur.n_tls + extra
        if n_next > max_cavity or 2 ** cur.n_tls * n_next > models.MAX_FULL_DIM:
            break
        nxt = cur.with_(n_cavity=n_next)
        nxt_sz = sz_trace(nxt)
        gap = float(np.max(np.abs(nxt_sz - cur_sz)))
        cur, cur_sz = nxt, nxt_sz
        if gap < tol:
            break
    if gap >= tol:
        warnings.warn(f"cavity truncation not converged at n={cur.n_cavity} (gap {gap:.3g})",
                      FockConvergenceWarning)
    return cur, gap


__all__ = [
    "Trajectory", "DynamicalMapSeries", "Propagator", "MapError", "FockConvergenceWarning",
    "propagate_exact", "partial_trace_cavity", "dynamical_maps", "observable_trajectory",
    "choi_matrix", "cptp_violations", "check_cptp", "converge_fock", "sparse_liouvillian",
    "invariant_blocks", "worker_count", "markovian_maps",
]

"""Transfer tensors: construction, propagation, z-transform, text I/O.

With ``E_k`` the reduced dynamical maps, the transfer tensors follow from

    T_k = E_k - sum_{m=1}^{k-1} T_{k-m} E_m,      T_1 = E_1,

and propagate the reduced state as ``rho_k = sum_{m} T_{k-m} rho_m`` with a
convolution depth equal to the number of tensors.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy.sparse.csgraph import connected_components

from .maps import DynamicalMapSeries, MapError, Trajectory, _matrix
from .numerics import max_abs, vec

#: ||T_K|| / ||T_1|| below which a learning window counts as converged
DEFAULT_TAIL_TOL = 1e-4

#: trace drift that aborts TTM propagation
MAX_TRACE_DRIFT = 1e-3


class TTMError(ValueError):
    """Inconsistent tensor series or a failed propagation."""


@dataclass
class TransferTensorSeries:
    """Ordered tensors ``T_1 ... T_K`` (stored as ``tensors[k-1]``)."""

    d: int
    dt: float
    tensors: np.ndarray
    blocks: list = None

    def __post_init__(self):
        self.tensors = np.asarray(self.tensors, dtype=complex)
        if self.blocks is None:
            self.blocks = _block_structure(self.tensors)
        d2 = self.d * self.d
        if self.tensors.ndim != 3 or self.tensors.shape[1:] != (d2, d2):
            raise TTMError(f"tensors must have shape (K, {d2}, {d2}), got {self.tensors.shape}")
        if not self.dt > 0:
            raise TTMError("dt must be positive")

    @property
    def K(self):
        return len(self.tensors)

    def __getitem__(self, k):
        """1-based access: ``series[1]`` is ``T_1``."""
        if not 1 <= k <= self.K:
            raise IndexError(f"transfer tensor index {k} outside 1..{self.K}")
        return self.tensors[k - 1]

    def truncate(self, K):
        return TransferTensorSeries(self.d, self.dt, self.tensors[:K].copy(), self.blocks)

    def tail_ratio(self):
        """``||T_K|| / ||T_1||`` in the max-abs norm."""
        return max_abs(self.tensors[-1]) / max(max_abs(self.tensors[0]), 1e-300)

    def converged(self, tol=DEFAULT_TAIL_TOL):
        return self.tail_ratio() < tol


def _require_same_dt(*series):
    dts = {float(s.dt) for s in series}
    if len(dts) > 1:
        raise TTMError(f"series with different time steps cannot be combined: {sorted(dts)}")


def _block_structure(stack, rel_tol=1e-13):
    """Common block-diagonal structure (up to permutation) of a matrix stack."""
    A = np.max(np.abs(stack), axis=0)
    pattern = A > rel_tol * max(A.max(), 1e-300)
    ncomp, labels = connected_components(pattern | pattern.T, directed=False)
    return [np.flatnonzero(labels == c) for c in range(ncomp)]


def _tensor_recursion(E):
    """Transfer tensors for one block; ``E`` has shape (K+1, b, b)."""
    K = len(E) - 1
    b = E.shape[1]
    T = np.empty((K, b, b), dtype=complex)
    if K == 0:
        return T
    estack = np.ascontiguousarray(E[1:]).reshape(K * b, b)  # [E_1; E_2; ...]
    wide = np.zeros((b, K * b), dtype=complex)  # T_m sits at column block K - m
    for k in range(1, K + 1):
        Tk = E[k].copy()
        if k > 1:
            Tk -= wide[:, (K - k + 1) * b:] @ estack[: (k - 1) * b]
        T[k - 1] = Tk
        wide[:, (K - k) * b:(K - k + 1) * b] = Tk
    return T


def _series_product(A, B, n):
    """First ``n`` coefficients of the matrix power-series product ``A(x) B(x)``."""
    m = 1 << (len(A) + len(B) - 2).bit_length()
    Af = np.fft.fft(A, m, axis=0)
    Bf = np.fft.fft(B, m, axis=0)
    return np.fft.ifft(Af @ Bf, axis=0)[:n]


def _tensor_newton(E):
    """Same result as :func:`_tensor_recursion` via ``T(x) = 1 - E(x)^{-1}``.

    The inverse series is built by Newton doubling ``G <- G (2 - E G)`` with
    FFT convolutions, so the cost grows like ``K log K`` instead of ``K^2``.
    """
    K = len(E) - 1
    b = E.shape[1]
    eye = np.eye(b, dtype=complex)
    G = eye[None].copy()  # inverse of E(x) modulo x^1
    n = 1
    while n < K + 1:
        n = min(2 * n, K + 1)
        EG = _series_product(E[:n], G, n)
        R = -EG
        R[0] += 2 * eye
        G = _series_product(G, R, n)
    return -G[1:]


#: series length beyond which the FFT route replaces the direct recursion
NEWTON_MIN_K = 200

METHODS = ("auto", "direct", "newton")


def transfer_tensors(maps, method="auto"):
    """Transfer tensors of a dynamical map series.

    The recursion runs independently on every invariant block shared by all
    maps (e.g. excitation-number sectors), which is exact and much cheaper
    than the dense recursion when such structure exists.

    ``method="direct"`` evaluates the recursion term by term;
    ``"newton"`` inverts the map power series with FFT convolutions
    (round-off relative to the largest map entry, ~1e-13);
    ``"auto"`` picks Newton for series longer than :data:`NEWTON_MIN_K`.
    """
    if not isinstance(maps, DynamicalMapSeries):
        raise TTMError("transfer_tensors expects a DynamicalMapSeries")
    if method not in METHODS:
        raise TTMError(f"unknown method {method!r}; expected one of {METHODS}")
    if method == "auto":
        method = "newton" if maps.K > NEWTON_MIN_K else "direct"
    solve = _tensor_newton if method == "newton" else _tensor_recursion
    E = maps.maps
    d2 = E.shape[1]
    if not np.array_equal(E[0], np.eye(d2)):
        raise TTMError("E_0 must be the identity")
    if maps.K < 1:
        raise TTMError("need at least one map beyond E_0")
    blocks = _block_structure(E[1:])
    if len(blocks) == 1:
        T = solve(E)
    else:
        T = np.zeros((maps.K, d2, d2), dtype=complex)
        for idx in blocks:
            T[:, idx[:, None], idx] = solve(E[:, idx[:, None], idx])
    return TransferTensorSeries(d=maps.d, dt=maps.dt, tensors=T, blocks=blocks)


def reconstruct_maps(tensors):
    """Invert the recursion: ``E_k = T_k + sum_{m=1}^{k-1} T_{k-m} E_m``."""
    K, d2 = tensors.K, tensors.d ** 2
    E = np.empty((K + 1, d2, d2), dtype=complex)
    E[0] = np.eye(d2)
    T = tensors.tensors
    for k in range(1, K + 1):
        acc = T[k - 1].copy()
        for m in range(1, k):
            acc += T[k - m - 1] @ E[m]
        E[k] = acc
    return DynamicalMapSeries(d=tensors.d, dt=tensors.dt, maps=E)


def ttm_propagate(tensors, rho0, K_total, max_drift=MAX_TRACE_DRIFT):
    """Propagate a reduced state to ``K_total`` steps with the tensors.

    Returns a :class:`Trajectory` whose ``trace_drift`` holds
    ``|Tr rho_k - 1|`` per step.  Raises :class:`TTMError` when the drift
    exceeds ``max_drift`` (learning window too short).
    """
    if K_total < 1:
        raise TTMError("K_total must be >= 1")
    d, K = tensors.d, tensors.K
    r0 = _matrix(rho0)
    if r0.shape != (d, d):
        raise TTMError(f"initial state shape {r0.shape} does not match reduced dimension {d}")
    v0 = vec(r0)
    hist = np.zeros((K_total + 1, d * d), dtype=complex)
    hist[0] = v0
    tr0 = np.trace(r0)
    # only invariant blocks touched by rho0 evolve; each gets its own
    # wide tensor [T_1 | T_2 | ... | T_K] restricted to the block
    active = []
    for idx in tensors.blocks:
        if np.any(v0[idx] != 0):
            Tb = tensors.tensors[:, idx[:, None], idx]
            active.append((idx, Tb.transpose(1, 0, 2).reshape(len(idx), -1)))
    drift = np.zeros(K_total + 1)
    diag = np.arange(d) * (d + 1)
    for k in range(1, K_total + 1):
        depth = min(k, K)
        for idx, wide in active:
            b = len(idx)
            past = hist[k - depth:k, idx][::-1].ravel()  # rho_{k-1}, ..., rho_{k-depth}
            hist[k, idx] = wide[:, : depth * b] @ past
        drift[k] = abs(hist[k, diag].sum() - tr0)
        if drift[k] > max_drift:
            raise TTMError(
                f"trace drift {drift[k]:.3g} at step {k} exceeds {max_drift:g}; "
                "learning window too short"
            )
    states = hist.reshape(-1, d, d).transpose(0, 2, 1)
    return Trajectory(dt=tensors.dt, states=states, dims=(2,) * int(round(math.log2(d))),
                      trace_drift=drift)


def z_transform(tensors, z):
    """``T[z] = sum_{k=1}^K z^{-k} T_k``."""
    z = complex(z)
    if z == 0:
        raise TTMError("z-transform is undefined at z = 0")
    k = np.arange(1, tensors.K + 1)
    # powers computed in log space so |z| >> 1 does not overflow
    w = np.exp(-k * np.log(z))
    return np.tensordot(w, tensors.tensors, axes=1)


def tensor_sum(tensors):
    """``sum_k T_k`` (the z-transform at z = 1)."""
    if tensors.K < 1:
        raise TTMError("empty tensor series")
    return tensors.tensors.sum(axis=0)


def weighted_tensor_sum(tensors, power):
    """``sum_k k**power T_k``."""
    k = np.arange(1, tensors.K + 1, dtype=float)
    return np.tensordot(k ** power, tensors.tensors, axes=1)


def first_tensor_generator(tensors):
    """Generator estimate ``(T_1 - 1) / dt``; exact as dt -> 0 for memoryless dynamics."""
    d2 = tensors.d ** 2
    return (tensors[1] - np.eye(d2)) / tensors.dt


# -- text interchange format --------------------------------------------------

def _fmt(x):
    return f"{x.real:.17g},{x.imag:.17g}"


def _write_blocks(fh, header, blocks):
    fh.write(header + "\n")
    for k, M in blocks:
        fh.write(f"# k={k}\n")
        for row in M:
            fh.write(" ".join(_fmt(x) for x in row) + "\n")


def write_series(series, path):
    """Write a map or tensor series in the ``dmaps v1`` / ``ttensors v1`` text format.

    Header ``<tag> v1 d=<d> dt=<dt> K=<K>``, then one block per matrix opened
    by ``# k=<k>``, rows in order, entries ``re,im`` separated by spaces, 17
    significant digits.
    """
    if isinstance(series, DynamicalMapSeries):
        header = f"dmaps v1 d={series.d} dt={series.dt!r} K={series.K}"
        blocks = enumerate(series.maps)
    elif isinstance(series, TransferTensorSeries):
        header = f"ttensors v1 d={series.d} dt={series.dt!r} K={series.K}"
        blocks = enumerate(series.tensors, start=1)
    else:
        raise TTMError(f"cannot serialise {type(series).__name__}")
    with open(path, "w") as fh:
        _write_blocks(fh, header, blocks)


def read_series(path):
    """Read a series written by :func:`write_series` (either tag)."""
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 5 or header[1] != "v1" or header[0] not in ("dmaps", "ttensors"):
            raise TTMError(f"unrecognised series header: {' '.join(header)!r}")
        fields = dict(item.split("=", 1) for item in header[2:])
        d, dt, K = int(fields["d"]), float(fields["dt"]), int(fields["K"])
        d2 = d * d
        mats = []
        rows = []
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                if rows:
                    mats.append(rows)
                rows = []
                continue
            rows.append([complex(float(a), float(b)) for a, b in
                         (entry.split(",") for entry in line.split())])
        if rows:
            mats.append(rows)
    data = np.array(mats, dtype=complex)
    expected = K + 1 if header[0] == "dmaps" else K
    if data.shape != (expected, d2, d2):
        raise TTMError(f"series body has shape {data.shape}, header implies {(expected, d2, d2)}")
    if header[0] == "dmaps":
        return DynamicalMapSeries(d=d, dt=dt, maps=data)
    return TransferTensorSeries(d=d, dt=dt, tensors=data)


__all__ = [
    "TransferTensorSeries", "TTMError", "transfer_tensors", "reconstruct_maps",
    "ttm_propagate", "z_transform", "tensor_sum", "weighted_tensor_sum",
    "first_tensor_generator", "write_series", "read_series", "DEFAULT_TAIL_TOL",
]

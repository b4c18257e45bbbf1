"""Cavity polariton models: operators, Hamiltonians, Liouvillian, initial states.

Units: the reference cavity loss rate kappa_0 is 1.  Frequencies and rates
are in kappa_0, times in 1/kappa_0, and hbar = 1.

Spin convention: ``sigma_z`` has eigenvalues +-1/2 while
``sigma_x = sigma_plus + sigma_minus`` has eigenvalues +-1, so that dropping
the counter-rotating terms of the Dicke coupling yields the Tavis-Cummings
coupling with the same ``g``.

Subsystem ordering is ``[TLS_1, ..., TLS_N, cavity]``; TLS basis index 0 is
the excited state.
"""

from dataclasses import dataclass, field, replace
from functools import reduce
import math

import numpy as np

from .numerics import max_abs

KINDS = ("TC", "Dicke", "PF")

#: guard on the full Hilbert-space dimension 2**N * n
MAX_FULL_DIM = 4096

SIGMA_PLUS = np.array([[0, 1], [0, 0]], dtype=complex)
SIGMA_MINUS = SIGMA_PLUS.T.copy()
SIGMA_Z = np.diag([0.5, -0.5]).astype(complex)
SIGMA_X = SIGMA_PLUS + SIGMA_MINUS


class ModelError(ValueError):
    """Invalid model parameters or state specification."""


def default_coupling(n_tls):
    """g = 10 kappa_0 / sqrt(N)."""
    if n_tls < 1:
        raise ModelError("n_tls must be >= 1")
    return 10.0 / math.sqrt(n_tls)


@dataclass(frozen=True)
class ModelSpec:
    """Physical parameters of a lossy single-mode cavity coupled to N TLS."""

    kind: str
    n_tls: int
    n_cavity: int
    omega_c: float
    omega_tls: tuple
    g: float
    kappa: float

    def __post_init__(self):
        object.__setattr__(self, "omega_tls", tuple(float(w) for w in self.omega_tls))
        self.validate()

    @classmethod
    def create(cls, kind="TC", n_tls=2, n_cavity=None, omega=0.0, omega_c=None,
               omega_tls=None, g=None, kappa=1.0):
        """Build a spec with the package defaults filled in.

        ``omega`` sets both the cavity and the TLS frequencies unless
        ``omega_c`` / ``omega_tls`` override them.  ``n_cavity`` defaults to
        N + 1 and ``g`` to 10/sqrt(N).
        """
        if omega_tls is None:
            omega_tls = [omega] * n_tls
        elif np.isscalar(omega_tls):
            omega_tls = [omega_tls] * n_tls
        return cls(
            kind=kind,
            n_tls=int(n_tls),
            n_cavity=int(n_cavity if n_cavity is not None else n_tls + 1),
            omega_c=float(omega if omega_c is None else omega_c),
            omega_tls=tuple(omega_tls),
            g=float(default_coupling(n_tls) if g is None else g),
            kappa=float(kappa),
        )

    def validate(self):
        if self.kind not in KINDS:
            raise ModelError(f"unknown model kind {self.kind!r}; expected one of {KINDS}")
        if self.n_tls < 1:
            raise ModelError("n_tls must be >= 1")
        if self.n_cavity < 2:
            raise ModelError("n_cavity must be >= 2")
        if len(self.omega_tls) != self.n_tls:
            raise ModelError(f"omega_tls has {len(self.omega_tls)} entries, expected {self.n_tls}")
        values = [self.omega_c, self.g, self.kappa, *self.omega_tls]
        if not all(math.isfinite(v) for v in values):
            raise ModelError("model parameters must be finite")
        if self.kappa < 0:
            raise ModelError("kappa must be non-negative")
        if self.kind == "PF" and self.omega_c == 0:
            raise ModelError("PF model needs omega_c != 0 (dipole self-energy divides by it)")
        if self.full_dim > MAX_FULL_DIM:
            raise ModelError(f"full dimension {self.full_dim} exceeds the {MAX_FULL_DIM} guard")

    @property
    def tls_dim(self):
        return 2 ** self.n_tls

    @property
    def full_dim(self):
        return 2 ** self.n_tls * self.n_cavity

    @property
    def dims(self):
        return [2] * self.n_tls + [self.n_cavity]

    def with_(self, **changes):
        """Copy with some fields replaced (re-validated)."""
        return replace(self, **changes)

    def to_dict(self):
        return {
            "kind": self.kind,
            "n_tls": self.n_tls,
            "n_cavity": self.n_cavity,
            "omega_c": self.omega_c,
            "omega_tls": list(self.omega_tls),
            "g": self.g,
            "kappa": self.kappa,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(**data)


@dataclass(frozen=True)
class DensityMatrix:
    """A validated density matrix with subsystem dimensions."""

    dims: tuple
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        dims = tuple(int(x) for x in self.dims)
        M = np.array(self.matrix, dtype=complex)
        M.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "matrix", M)
        D = int(np.prod(dims))
        if M.shape != (D, D):
            raise ModelError(f"matrix shape {M.shape} does not match dims {dims}")
        if max_abs(M - M.conj().T) > 1e-10:
            raise ModelError("density matrix is not Hermitian")
        if abs(np.trace(M) - 1) > 1e-10:
            raise ModelError(f"density matrix trace {np.trace(M).real:.3g} != 1")
        if np.linalg.eigvalsh(0.5 * (M + M.conj().T))[0] < -1e-8:
            raise ModelError("density matrix is not positive semidefinite")

    @property
    def dim(self):
        return self.matrix.shape[0]

    def expect(self, op):
        return float(np.real(np.trace(op @ self.matrix)))

    @classmethod
    def from_ket(cls, dims, psi):
        psi = np.asarray(psi, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        return cls(dims, np.outer(psi, psi.conj()))


@dataclass(frozen=True)
class OperatorSet:
    """Single-site operators embedded in the full ``2**N * n`` space."""

    sz: tuple
    sx: tuple
    sp: tuple
    sm: tuple
    a: np.ndarray
    adag: np.ndarray
    n_tls: int
    n_cavity: int

    @property
    def dim(self):
        return self.a.shape[0]

    def number(self):
        return self.adag @ self.a

    def excitation_number(self):
        """a^dag a + sum_j sigma_j^+ sigma_j^-."""
        return self.number() + sum(p @ m for p, m in zip(self.sp, self.sm))


def destroy(n):
    """Truncated annihilation operator on n Fock levels."""
    return np.diag(np.sqrt(np.arange(1, n)), 1).astype(complex)


def embed(op, site, dims):
    """Kronecker-embed a single-site operator at position ``site``."""
    factors = [np.eye(d, dtype=complex) for d in dims]
    factors[site] = np.asarray(op, dtype=complex)
    return reduce(np.kron, factors)


def tls_operator(op, site, n_tls):
    """Embed a single-TLS operator on the TLS-only space."""
    return embed(op, site, [2] * n_tls)


def build_operators(spec):
    dims = spec.dims
    N = spec.n_tls
    ops = {name: [] for name in ("sz", "sx", "sp", "sm")}
    for j in range(N):
        ops["sz"].append(embed(SIGMA_Z, j, dims))
        ops["sx"].append(embed(SIGMA_X, j, dims))
        ops["sp"].append(embed(SIGMA_PLUS, j, dims))
        ops["sm"].append(embed(SIGMA_MINUS, j, dims))
    a = embed(destroy(spec.n_cavity), N, dims)
    return OperatorSet(
        sz=tuple(ops["sz"]), sx=tuple(ops["sx"]), sp=tuple(ops["sp"]), sm=tuple(ops["sm"]),
        a=a, adag=a.conj().T.copy(), n_tls=N, n_cavity=spec.n_cavity,
    )


def hamiltonian(spec, ops=None):
    """Model Hamiltonian on the full space (hbar = 1).

    TC:    w_c a^dag a + sum_j (w_j sz_j + g a sp_j + g a^dag sm_j)
    Dicke: w_c a^dag a + sum_j w_j sz_j + g (a + a^dag) sum_j sx_j
    PF:    Dicke + (g^2 / w_c) (sum_j sx_j)^2
    """
    ops = ops or build_operators(spec)
    H = spec.omega_c * ops.number()
    for w, sz in zip(spec.omega_tls, ops.sz):
        H = H + w * sz
    if spec.kind == "TC":
        for sp, sm in zip(ops.sp, ops.sm):
            H = H + spec.g * (ops.a @ sp + ops.adag @ sm)
    else:
        Sx = sum(ops.sx)
        H = H + spec.g * (ops.a + ops.adag) @ Sx
        if spec.kind == "PF":
            H = H + (spec.g ** 2 / spec.omega_c) * (Sx @ Sx)
    return H


def liouvillian(spec, ops=None):
    """Dense Lindblad superoperator on column-stacked vec(rho_f).

    L = -i (I (x) H - H^T (x) I) + kappa/2 (2 conj(a) (x) a - I (x) n - n^T (x) I)
    with n = a^dag a.  Size (2**N n)^2 square; only practical for small systems.
    """
    ops = ops or build_operators(spec)
    H = hamiltonian(spec, ops)
    D = H.shape[0]
    I = np.eye(D, dtype=complex)
    num = ops.number()
    L = -1j * (np.kron(I, H) - np.kron(H.T, I))
    if spec.kappa:
        L += 0.5 * spec.kappa * (2 * np.kron(ops.a.conj(), ops.a)
                                 - np.kron(I, num) - np.kron(num.T, I))
    return L


def lindblad_rhs(spec, ops=None):
    """Matrix-form generator ``rho -> L(rho)`` acting on stacks ``(..., D, D)``.

    Uses L(rho) = G rho + rho G^dag + kappa a rho a^dag with the non-Hermitian
    G = -i H - kappa/2 a^dag a; this avoids materialising the D^2 x D^2
    superoperator.
    """
    ops = ops or build_operators(spec)
    H = hamiltonian(spec, ops)
    G = -1j * H - 0.5 * spec.kappa * ops.number()
    Gdag = G.conj().T.copy()
    a, adag, kappa = ops.a, ops.adag, spec.kappa

    def rhs(rho):
        out = G @ rho + rho @ Gdag
        if kappa:
            out += kappa * (a @ rho @ adag)
        return out

    return rhs


def generator_norm_bound(spec, ops=None):
    """Cheap upper bound on the induced 2-norm of the Liouvillian."""
    ops = ops or build_operators(spec)
    H = hamiltonian(spec, ops)
    hnorm = np.linalg.norm(H, 2)
    nmax = spec.n_cavity - 1
    return 2 * hnorm + 2 * spec.kappa * nmax


def single_mode_decay_generator(n_levels, kappa):
    """Liouvillian of a lone damped mode truncated to ``n_levels`` Fock states.

    Photon number relaxes as ``exp(-kappa t)``; the vacuum is the unique
    steady state.  Used as an analytic fixture for the kinetics routines.
    """
    if n_levels < 2:
        raise ModelError("a decaying mode needs at least 2 levels")
    if not kappa > 0:
        raise ModelError("kappa must be positive")
    a = destroy(n_levels)
    num = a.conj().T @ a
    I = np.eye(n_levels, dtype=complex)
    return 0.5 * kappa * (2 * np.kron(a.conj(), a) - np.kron(I, num) - np.kron(num.T, I))


def damped_cosine_generator(omega, r):
    """Qubit generator whose coherence rotates at ``omega`` and dephases at ``r``.

    Starting from ``|+><+|`` the expectation of ``sigma_x`` is
    ``exp(-r t) cos(omega t)``; populations are conserved.
    """
    if not r > 0:
        raise ModelError("dephasing rate must be positive")
    # vec order: rho_00, rho_10, rho_01, rho_11
    return np.diag([0.0, -r + 1j * omega, -r - 1j * omega, 0.0]).astype(complex)


# -- initial states -----------------------------------------------------------

def parse_pattern(pattern):
    """Normalise an excitation pattern to ``(name, arg)``.

    Accepts ``"fully_excited"``, ``"coherent_superposition"``,
    ``"singly_excited:j"`` (1-based TLS index), ``"k_excited:k"`` (first k TLS
    excited), or an already-split tuple.
    """
    if isinstance(pattern, (tuple, list)):
        name, arg = pattern[0], (pattern[1] if len(pattern) > 1 else None)
    else:
        name, _, arg = str(pattern).partition(":")
        arg = arg or None
    name = name.strip()
    if arg is not None:
        try:
            arg = int(arg)
        except ValueError:
            raise ModelError(f"bad excitation pattern argument {arg!r}") from None
    if name == "singly_excited" and arg is None:
        arg = 1
    if name not in ("fully_excited", "singly_excited", "k_excited", "coherent_superposition"):
        raise ModelError(f"unknown excitation pattern {name!r}")
    if name == "k_excited" and arg is None:
        raise ModelError("k_excited needs the number of excited TLS")
    return name, arg


def tls_ket(pattern, n_tls):
    """Pure TLS product state for an excitation pattern."""
    name, arg = parse_pattern(pattern)
    up = np.array([1, 0], dtype=complex)
    down = np.array([0, 1], dtype=complex)
    if name == "fully_excited":
        sites = [up] * n_tls
    elif name == "singly_excited":
        if not 1 <= arg <= n_tls:
            raise ModelError(f"TLS index {arg} outside 1..{n_tls}")
        sites = [up if j == arg - 1 else down for j in range(n_tls)]
    elif name == "k_excited":
        if not 0 <= arg <= n_tls:
            raise ModelError(f"cannot excite {arg} of {n_tls} TLS")
        sites = [up if j < arg else down for j in range(n_tls)]
    else:
        sites = [(up + down) / np.sqrt(2)] * n_tls
    return reduce(np.kron, sites)


def tls_state(pattern, n_tls):
    """Reduced (TLS-only) initial density matrix."""
    return DensityMatrix.from_ket([2] * n_tls, tls_ket(pattern, n_tls))


def cavity_vacuum(n_cavity):
    rho = np.zeros((n_cavity, n_cavity), dtype=complex)
    rho[0, 0] = 1
    return rho


def initial_state(pattern, spec):
    """Full-space product state: TLS pattern (x) cavity vacuum."""
    psi = np.kron(tls_ket(pattern, spec.n_tls), np.eye(spec.n_cavity)[0])
    return DensityMatrix.from_ket(spec.dims, psi)


def fully_excited_projector(n_tls):
    """|N/2, N/2><N/2, N/2| on the TLS space."""
    P = np.zeros((2 ** n_tls, 2 ** n_tls), dtype=complex)
    P[0, 0] = 1
    return P


def tls_observable(name, n_tls):
    """Named TLS-space observable.

    ``sz:j`` / ``sx:j`` (1-based), ``sz_total``, ``survival`` (fully excited
    projector), ``identity``.
    """
    base, _, arg = name.partition(":")
    if base in ("sz", "sx"):
        j = int(arg or 1)
        if not 1 <= j <= n_tls:
            raise ModelError(f"TLS index {j} outside 1..{n_tls}")
        return tls_operator(SIGMA_Z if base == "sz" else SIGMA_X, j - 1, n_tls)
    if base == "sz_total":
        return sum(tls_operator(SIGMA_Z, j, n_tls) for j in range(n_tls))
    if base == "survival":
        return fully_excited_projector(n_tls)
    if base == "identity":
        return np.eye(2 ** n_tls, dtype=complex)
    raise ModelError(f"unknown observable {name!r}")


__all__ = [
    "KINDS", "ModelSpec", "DensityMatrix", "OperatorSet", "ModelError",
    "build_operators", "hamiltonian", "liouvillian", "lindblad_rhs",
    "initial_state", "tls_state", "tls_observable", "fully_excited_projector",
    "default_coupling", "destroy", "embed", "tls_operator", "cavity_vacuum",
    "parse_pattern", "generator_norm_bound", "single_mode_decay_generator",
    "damped_cosine_generator",
]

"""Sparse operators and states on composite qubit/resonator Hilbert spaces.

Basis convention: each qubit uses |0> (ground, sigma_z = -1) and |1>
(excited, sigma_z = +1).  Subsystems are ordered resonators first, then
qubits, and tensor products follow that order (leftmost slot is the most
significant index).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg
import scipy.sparse as sp

DENSE_EXP_LIMIT = 64


class SpecMismatchError(ValueError):
    """Operands live on different Hilbert spaces."""


@dataclass(frozen=True)
class HilbertSpec:
    """Ordered list of subsystem dimensions with tags like ``"r1"`` or ``"q2"``."""

    dims: tuple[int, ...]
    labels: tuple[str, ...]

    def __post_init__(self):
        if len(self.dims) != len(self.labels):
            raise ValueError("dims and labels must have the same length")
        if any(int(d) < 1 for d in self.dims):
            raise ValueError(f"subsystem dimensions must be positive: {self.dims}")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError(f"duplicate subsystem labels: {self.labels}")

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims, dtype=np.int64))

    def slot(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"no subsystem {label!r} in {self.labels}") from None

    def subspec(self, slots: Iterable[int]) -> "HilbertSpec":
        slots = sorted(set(slots))
        return HilbertSpec(tuple(self.dims[s] for s in slots),
                           tuple(self.labels[s] for s in slots))

    @classmethod
    def single(cls, dim: int, label: str = "s") -> "HilbertSpec":
        return cls((dim,), (label,))

    @classmethod
    def network(cls, n_qubits: int, fock_levels: int) -> "HilbertSpec":
        """Resonators r1..r(2N+2) followed by qubits q1..qN."""
        n_res = 2 * n_qubits + 2
        dims = (fock_levels,) * n_res + (2,) * n_qubits
        labels = tuple(f"r{m}" for m in range(1, n_res + 1)) + tuple(
            f"q{n}" for n in range(1, n_qubits + 1))
        return cls(dims, labels)


class Operator:
    """Sparse complex matrix tied to a :class:`HilbertSpec`."""

    __slots__ = ("spec", "matrix")

    def __init__(self, matrix, spec: HilbertSpec | None = None):
        m = sp.csr_matrix(matrix, dtype=complex)
        if spec is None:
            spec = HilbertSpec.single(m.shape[0])
        if m.shape != (spec.dim, spec.dim):
            raise SpecMismatchError(f"matrix shape {m.shape} does not match dimension {spec.dim}")
        m.sum_duplicates()
        m.sort_indices()
        self.matrix = m
        self.spec = spec

    def _check(self, other: "Operator"):
        if self.spec != other.spec:
            raise SpecMismatchError(f"{self.spec.labels} vs {other.spec.labels}")

    def __matmul__(self, other):
        if isinstance(other, Operator):
            self._check(other)
            return Operator(self.matrix @ other.matrix, self.spec)
        return self.matrix @ other

    def __add__(self, other: "Operator") -> "Operator":
        self._check(other)
        return Operator(self.matrix + other.matrix, self.spec)

    def __sub__(self, other: "Operator") -> "Operator":
        self._check(other)
        return Operator(self.matrix - other.matrix, self.spec)

    def __neg__(self) -> "Operator":
        return Operator(-self.matrix, self.spec)

    def __mul__(self, scalar) -> "Operator":
        return Operator(self.matrix * complex(scalar), self.spec)

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> "Operator":
        return Operator(self.matrix / complex(scalar), self.spec)

    def __repr__(self):
        return f"Operator(dim={self.spec.dim}, nnz={self.matrix.nnz}, labels={self.spec.labels})"

    @property
    def dim(self) -> int:
        return self.spec.dim

    def dag(self) -> "Operator":
        return Operator(self.matrix.conj().T, self.spec)

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def hermiticity_residual(self) -> float:
        diff = self.matrix - self.matrix.conj().T
        return float(np.max(np.abs(diff.data))) if diff.nnz else 0.0

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return self.hermiticity_residual() < tol

    def trace(self) -> complex:
        return complex(self.matrix.diagonal().sum())

    def allclose(self, other: "Operator", atol: float = 1e-12) -> bool:
        self._check(other)
        diff = self.matrix - other.matrix
        return diff.nnz == 0 or float(np.max(np.abs(diff.data))) <= atol


def identity(spec: HilbertSpec) -> Operator:
    return Operator(sp.identity(spec.dim, dtype=complex, format="csr"), spec)


def zero(spec: HilbertSpec) -> Operator:
    return Operator(sp.csr_matrix((spec.dim, spec.dim), dtype=complex), spec)


def destroy(cutoff: int) -> Operator:
    """Truncated annihilation operator with ``cutoff`` Fock levels."""
    if int(cutoff) != cutoff or cutoff < 2:
        raise ValueError(f"invalid cutoff {cutoff!r}: need at least 2 Fock levels")
    k = np.arange(1, cutoff)
    return Operator(sp.diags(np.sqrt(k), 1, shape=(cutoff, cutoff)), HilbertSpec.single(cutoff, "mode"))


def create(cutoff: int) -> Operator:
    return destroy(cutoff).dag()


def number(cutoff: int) -> Operator:
    return Operator(sp.diags(np.arange(cutoff, dtype=float)), HilbertSpec.single(cutoff, "mode"))


_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, 1j], [-1j, 0]], dtype=complex),
    "z": np.array([[-1, 0], [0, 1]], dtype=complex),
    "plus": np.array([[0, 0], [1, 0]], dtype=complex),
    "minus": np.array([[0, 1], [0, 0]], dtype=complex),
    "i": np.eye(2, dtype=complex),
}


def pauli(axis: str) -> Operator:
    """Single-qubit Pauli or ladder operator; ``axis`` in x, y, z, plus, minus."""
    try:
        m = _PAULI[axis]
    except KeyError:
        raise ValueError(f"unknown Pauli axis {axis!r}; expected one of x, y, z, plus, minus") from None
    return Operator(m, HilbertSpec.single(2, "qubit"))


def tensor(*ops: Operator) -> Operator:
    """Kronecker product of single-subsystem-or-larger operators, specs concatenated."""
    mat = reduce(lambda a, b: sp.kron(a, b, format="csr"), (o.matrix for o in ops))
    dims = sum((o.spec.dims for o in ops), ())
    labels = sum((o.spec.labels for o in ops), ())
    if len(set(labels)) != len(labels):
        labels = tuple(f"s{i}" for i in range(len(dims)))
    return Operator(mat, HilbertSpec(dims, labels))


def embed(op: Operator, slot: int | str, spec: HilbertSpec) -> Operator:
    """Lift a one-subsystem operator to ``spec``, identity on every other slot."""
    if isinstance(slot, str):
        slot = spec.slot(slot)
    if not 0 <= slot < len(spec.dims):
        raise IndexError(f"slot {slot} out of range for {len(spec.dims)} subsystems")
    if op.dim != spec.dims[slot]:
        raise SpecMismatchError(
            f"operator dimension {op.dim} does not match subsystem {spec.labels[slot]} "
            f"of dimension {spec.dims[slot]}")
    left = int(np.prod(spec.dims[:slot], dtype=np.int64))
    right = int(np.prod(spec.dims[slot + 1:], dtype=np.int64))
    m = op.matrix
    if right > 1:
        m = sp.kron(m, sp.identity(right, format="csr"), format="csr")
    if left > 1:
        m = sp.kron(sp.identity(left, format="csr"), m, format="csr")
    return Operator(m, spec)


class State:
    """Pure state (1-d vector) or density matrix (2-d array) on a ``HilbertSpec``."""

    __slots__ = ("spec", "data")

    def __init__(self, data, spec: HilbertSpec | None = None):
        arr = np.asarray(data, dtype=complex)
        if arr.ndim not in (1, 2):
            raise ValueError("state data must be a vector or a square matrix")
        if spec is None:
            spec = HilbertSpec.single(arr.shape[0])
        if arr.shape[0] != spec.dim or (arr.ndim == 2 and arr.shape != (spec.dim, spec.dim)):
            raise SpecMismatchError(f"state shape {arr.shape} does not match dimension {spec.dim}")
        self.data = arr
        self.spec = spec

    @property
    def is_pure(self) -> bool:
        return self.data.ndim == 1

    def density_matrix(self) -> np.ndarray:
        if self.is_pure:
            return np.outer(self.data, self.data.conj())
        return self.data

    def to_dm(self) -> "State":
        return State(self.density_matrix(), self.spec)

    def norm(self) -> float:
        if self.is_pure:
            return float(np.linalg.norm(self.data))
        return float(np.trace(self.data).real)

    def validate(self, tol: float = 1e-9, eig_tol: float = 1e-8) -> None:
        """Raise ``ValueError`` if the state violates normalization or positivity."""
        if self.is_pure:
            if abs(np.linalg.norm(self.data) - 1.0) > tol:
                raise ValueError(f"pure state norm {np.linalg.norm(self.data):.12f} != 1")
            return
        rho = self.data
        tr = np.trace(rho)
        if abs(tr - 1.0) > tol:
            raise ValueError(f"density matrix trace {tr:.12f} != 1")
        herm = float(np.max(np.abs(rho - rho.conj().T)))
        if herm > tol:
            raise ValueError(f"density matrix not Hermitian (residual {herm:.3e})")
        lo = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0])
        if lo < -eig_tol:
            raise ValueError(f"density matrix has negative eigenvalue {lo:.3e}")


def ket(spec: HilbertSpec, levels: Sequence[int]) -> State:
    """Computational basis product state, one level index per subsystem."""
    if len(levels) != len(spec.dims):
        raise ValueError("need one level per subsystem")
    idx = 0
    for lev, d in zip(levels, spec.dims):
        if not 0 <= lev < d:
            raise ValueError(f"level {lev} out of range for dimension {d}")
        idx = idx * d + lev
    v = np.zeros(spec.dim, dtype=complex)
    v[idx] = 1.0
    return State(v, spec)


def product_state(factors: Sequence[np.ndarray], spec: HilbertSpec) -> State:
    """Tensor product of per-subsystem vectors (all 1-d) or matrices (any 2-d)."""
    arrs = [np.asarray(f, dtype=complex) for f in factors]
    if len(arrs) != len(spec.dims):
        raise ValueError("need one factor per subsystem")
    if all(a.ndim == 1 for a in arrs):
        return State(reduce(np.kron, arrs), spec)
    mats = [np.outer(a, a.conj()) if a.ndim == 1 else a for a in arrs]
    return State(reduce(np.kron, mats), spec)


def expect(op: Operator, state: State, return_residual: bool = False):
    """Expectation value <psi|A|psi> or tr(A rho).

    For Hermitian ``op`` the real part is returned; with ``return_residual``
    the discarded imaginary part is returned alongside.
    """
    if op.spec != state.spec:
        raise SpecMismatchError(f"operator on {op.spec.labels}, state on {state.spec.labels}")
    if state.is_pure:
        val = complex(np.vdot(state.data, op.matrix @ state.data))
    else:
        # tr(A rho) = sum_ij A_ij rho_ji
        coo = op.matrix.tocoo()
        val = complex(np.sum(coo.data * state.data[coo.col, coo.row]))
    if op.is_hermitian(1e-12):
        if return_residual:
            return val.real, abs(val.imag)
        return val.real
    if return_residual:
        return val, 0.0
    return val


def partial_trace(state: State, keep: Iterable[int | str]) -> State:
    """Reduced density matrix on the ``keep`` slots (labels or indices)."""
    spec = state.spec
    keep = sorted({spec.slot(k) if isinstance(k, str) else int(k) for k in keep})
    if not keep:
        raise ValueError("keep set must not be empty")
    if any(not 0 <= k < len(spec.dims) for k in keep):
        raise IndexError(f"slots {keep} out of range for {len(spec.dims)} subsystems")
    n = len(spec.dims)
    traced = [i for i in range(n) if i not in keep]
    dk = int(np.prod([spec.dims[i] for i in keep], dtype=np.int64))
    if state.is_pure:
        psi = state.data.reshape(spec.dims).transpose(keep + traced).reshape(dk, -1)
        rho = psi @ psi.conj().T
    else:
        rho = state.data.reshape(spec.dims + spec.dims)
        perm = keep + traced
        rho = rho.transpose(perm + [p + n for p in perm]).reshape(dk, spec.dim // dk, dk, spec.dim // dk)
        rho = np.einsum("ajbj->ab", rho)
    return State(rho, spec.subspec(keep))


def matrix_exp_small(op: Operator, scale: complex = 1.0) -> Operator:
    """Dense ``exp(scale * A)`` for operators of dimension <= 64."""
    if op.dim > DENSE_EXP_LIMIT:
        raise ValueError(
            f"dimension {op.dim} exceeds the dense limit {DENSE_EXP_LIMIT}; "
            "use scipy.sparse.linalg.expm_multiply or the dynamics propagators instead")
    return Operator(scipy.linalg.expm(complex(scale) * op.dense()), op.spec)

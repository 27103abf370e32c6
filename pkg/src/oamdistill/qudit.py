"""Dense state vectors, density matrices and operators on registers of qudits.

Flat indices follow the mixed-radix convention with the leftmost tensor factor
most significant, so ``dims=(3, 3), digits=(1, 2)`` is flat index 5.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np

MAX_DIM = 8
MAX_AMPLITUDES = 2**24

ATOL = 1e-12


class DomainError(ValueError):
    """Raised when an argument is outside the domain of an operation."""


class ResourceLimitError(RuntimeError):
    """Raised when a request would exceed the memory/enumeration guards."""


def check_dim(d: int, max_dim: int = MAX_DIM) -> int:
    if isinstance(d, bool) or int(d) != d:
        raise DomainError(f"qudit dimension must be an integer, got {d!r}")
    d = int(d)
    if d < 2:
        raise DomainError(f"qudit dimension must be >= 2, got {d}")
    if d > max_dim:
        raise ResourceLimitError(f"qudit dimension {d} exceeds guard {max_dim}")
    return d


def check_index(i: int, d: int) -> int:
    if not 0 <= i < d:
        raise DomainError(f"index {i} out of range for dimension {d}")
    return int(i)


def _check_size(dims: Sequence[int]) -> int:
    size = int(np.prod(dims, dtype=object)) if len(dims) else 1
    if size > MAX_AMPLITUDES:
        raise ResourceLimitError(
            f"joint dimension {size} exceeds the {MAX_AMPLITUDES}-amplitude guard"
        )
    return size


def mod_arith(i: int, j: int, d: int, sign: str = "sub") -> int:
    """Return ``(i + j) % d`` or ``(i - j) % d``."""
    check_index(i, d)
    check_index(j, d)
    if sign == "add":
        return (i + j) % d
    if sign == "sub":
        return (i - j) % d
    raise DomainError(f"sign must be 'add' or 'sub', got {sign!r}")


@dataclass(frozen=True)
class PureState:
    """Amplitude vector over ``dims`` with an ensemble weight.

    Post-selected branches keep their amplitudes normalized and carry the
    surviving probability mass in ``weight``.
    """

    dims: tuple
    amplitudes: np.ndarray
    weight: float = 1.0

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        amps = np.asarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amps.size != _check_size(dims):
            raise DomainError(
                f"amplitude vector has length {amps.size}, dims {dims} need "
                f"{int(np.prod(dims))}"
            )
        if self.weight < 0:
            raise DomainError(f"weight must be >= 0, got {self.weight}")
        amps.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "weight", float(self.weight))

    @property
    def n_factors(self) -> int:
        return len(self.dims)

    def tensor_view(self) -> np.ndarray:
        return self.amplitudes.reshape(self.dims)

    def normalized(self) -> "PureState":
        n = np.sqrt(norm2(self))
        if n == 0:
            raise DomainError("cannot normalize the zero vector")
        return PureState(self.dims, self.amplitudes / n, self.weight)

    def with_weight(self, weight: float) -> "PureState":
        return PureState(self.dims, self.amplitudes, weight)


@dataclass(frozen=True)
class WeightedEnsemble:
    """Mixed state as a list of weighted pure branches."""

    branches: tuple = field(default_factory=tuple)

    def __post_init__(self):
        branches = tuple(self.branches)
        if branches:
            dims = branches[0].dims
            for b in branches:
                if b.dims != dims:
                    raise DomainError("all ensemble branches must share dims")
        total = sum(b.weight for b in branches)
        if total > 1 + ATOL:
            raise DomainError(f"total ensemble weight {total} exceeds 1")
        object.__setattr__(self, "branches", branches)

    @property
    def dims(self) -> tuple:
        if not self.branches:
            raise DomainError("empty ensemble has no dims")
        return self.branches[0].dims

    @property
    def total_weight(self) -> float:
        return float(sum(b.weight for b in self.branches))


@dataclass(frozen=True)
class DensityMatrix:
    dims: tuple
    entries: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        size = _check_size(dims)
        m = np.asarray(self.entries, dtype=np.complex128)
        if m.shape != (size, size):
            raise DomainError(f"matrix shape {m.shape} does not match dims {dims}")
        m.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "entries", m)

    @property
    def trace(self) -> float:
        return float(np.trace(self.entries).real)

    def is_valid(self, atol: float = ATOL) -> bool:
        m = self.entries
        if np.max(np.abs(m - m.conj().T), initial=0.0) > atol:
            return False
        if np.linalg.eigvalsh(m).min() < -1e-10:
            return False
        return self.trace <= 1 + atol


@dataclass(frozen=True)
class LinearOperator:
    """Dense matrix mapping the space of ``in_dims`` to that of ``out_dims``."""

    in_dims: tuple
    out_dims: tuple
    entries: np.ndarray

    def __post_init__(self):
        in_dims = tuple(int(d) for d in self.in_dims)
        out_dims = tuple(int(d) for d in self.out_dims)
        m = np.asarray(self.entries, dtype=np.complex128)
        if m.shape != (int(np.prod(out_dims)), int(np.prod(in_dims))):
            raise DomainError(
                f"matrix shape {m.shape} inconsistent with {in_dims} -> {out_dims}"
            )
        m.setflags(write=False)
        object.__setattr__(self, "in_dims", in_dims)
        object.__setattr__(self, "out_dims", out_dims)
        object.__setattr__(self, "entries", m)

    def unitarity_error(self) -> float:
        m = self.entries
        if m.shape[0] != m.shape[1]:
            return float("inf")
        return float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))))

    def is_unitary(self, atol: float = ATOL) -> bool:
        return self.unitarity_error() < atol

    def __matmul__(self, other: "LinearOperator") -> "LinearOperator":
        if other.out_dims != self.in_dims:
            raise DomainError("operator dims do not compose")
        return LinearOperator(other.in_dims, self.out_dims, self.entries @ other.entries)


def flat_index(dims: Sequence[int], digits: Sequence[int]) -> int:
    if len(dims) != len(digits):
        raise DomainError(f"{len(digits)} digits given for {len(dims)} factors")
    idx = 0
    for d, x in zip(dims, digits):
        idx = idx * d + check_index(x, d)
    return idx


def basis_state(dims: Sequence[int], digits: Sequence[int]) -> PureState:
    """Computational basis vector ``|digits>``."""
    size = _check_size(dims)
    amps = np.zeros(size, dtype=np.complex128)
    amps[flat_index(dims, digits)] = 1.0
    return PureState(tuple(dims), amps)


def tensor(*states: PureState) -> PureState:
    if not states:
        raise DomainError("tensor needs at least one state")
    dims = tuple(d for s in states for d in s.dims)
    _check_size(dims)
    amps = states[0].amplitudes
    weight = states[0].weight
    for s in states[1:]:
        amps = np.kron(amps, s.amplitudes)
        weight *= s.weight
    return PureState(dims, amps, weight)


def inner(a: PureState, b: PureState) -> complex:
    """``<a|b>``, conjugate-linear in ``a``."""
    if a.dims != b.dims:
        raise DomainError(f"dims mismatch: {a.dims} vs {b.dims}")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def norm2(a: PureState) -> float:
    return float(np.vdot(a.amplitudes, a.amplitudes).real)


def overlap2(a: PureState, b: PureState) -> float:
    """Squared overlap of the normalized states; equality up to global phase."""
    return abs(inner(a, b)) ** 2 / (norm2(a) * norm2(b))


def apply_local(op: LinearOperator, s: PureState, targets: Sequence[int]) -> PureState:
    """Apply ``op`` to the factors ``targets`` (in order) of ``s``."""
    targets = list(targets)
    n = s.n_factors
    if len(set(targets)) != len(targets):
        raise DomainError(f"repeated target factor in {targets}")
    for t in targets:
        if not 0 <= t < n:
            raise DomainError(f"target factor {t} out of range for {n} factors")
    if tuple(s.dims[t] for t in targets) != op.in_dims:
        raise DomainError(
            f"operator acts on {op.in_dims}, targets have {[s.dims[t] for t in targets]}"
        )
    if op.out_dims != op.in_dims:
        raise DomainError("apply_local needs a square operator")
    k = len(targets)
    mat = op.entries.reshape(op.out_dims + op.in_dims)
    psi = s.tensor_view()
    out = np.tensordot(mat, psi, axes=(list(range(k, 2 * k)), targets))
    out = np.moveaxis(out, list(range(k)), targets)
    return PureState(s.dims, out.reshape(-1), s.weight)


def projector(s: PureState) -> np.ndarray:
    v = s.amplitudes
    return np.outer(v, v.conj())


def partial_trace(dm: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """Reduced density matrix on the factors in ``keep`` (kept in ascending order)."""
    keep = sorted(set(keep))
    n = len(dm.dims)
    if not keep:
        raise DomainError("keep set must be nonempty")
    for k in keep:
        if not 0 <= k < n:
            raise DomainError(f"factor {k} out of range for {n} factors")
    t = dm.entries.reshape(dm.dims + dm.dims)
    traced = [i for i in range(n) if i not in keep]
    # Trace from the highest factor down so remaining axis numbers stay valid.
    cur_n = n
    for i in sorted(traced, reverse=True):
        t = np.trace(t, axis1=i, axis2=i + cur_n)
        cur_n -= 1
    kept_dims = tuple(dm.dims[k] for k in keep)
    size = int(np.prod(kept_dims))
    return DensityMatrix(kept_dims, t.reshape(size, size))


def ensemble_to_dm(e: WeightedEnsemble) -> DensityMatrix:
    dims = e.dims
    size = _check_size(dims)
    rho = np.zeros((size, size), dtype=np.complex128)
    for b in e.branches:
        if b.weight == 0:
            continue
        rho += b.weight * projector(b.normalized())
    return DensityMatrix(dims, rho)


def fidelity(state: Union[WeightedEnsemble, DensityMatrix], target: PureState) -> float:
    """``<target|rho|target>`` for an ensemble or a density matrix."""
    if abs(norm2(target) - 1) > 1e-10:
        raise DomainError("target state must be normalized")
    if isinstance(state, DensityMatrix):
        if state.dims != target.dims:
            raise DomainError(f"dims mismatch: {state.dims} vs {target.dims}")
        v = target.amplitudes
        return float(np.vdot(v, state.entries @ v).real)
    total = 0.0
    for b in state.branches:
        if b.weight == 0:
            continue
        total += b.weight * abs(inner(target, b)) ** 2 / norm2(b)
    return total

"""Dense linear algebra on small labelled composite Hilbert spaces.

States and operators carry a :class:`HilbertFactorization`, an ordered list of
``(label, dim)`` pairs, so that unitaries, channels, projectors and partial
traces can address tensor factors by name instead of by index gymnastics.
All objects are immutable; every operation returns a new object.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

HERMITIAN_TOL = 1e-12
POSITIVITY_TOL = 1e-10
TRACE_TOL = 1e-12
UNITARY_TOL = 1e-10
KRAUS_TOL = 1e-10
PHASE_ZERO_TOL = 1e-12


class LabelError(ValueError):
    """Unknown or duplicated tensor-factor label."""


class DimensionError(ValueError):
    """Operator and state dimensions do not line up."""


@dataclass(frozen=True)
class HilbertFactorization:
    factors: tuple[tuple[str, int], ...]

    def __post_init__(self):
        factors = tuple((str(lab), int(d)) for lab, d in self.factors)
        object.__setattr__(self, "factors", factors)
        labels = [lab for lab, _ in factors]
        if len(set(labels)) != len(labels):
            raise LabelError(f"duplicate factor labels in {labels}")
        if any(d < 1 for _, d in factors):
            raise DimensionError(f"factor dimensions must be positive: {factors}")

    @classmethod
    def of(cls, *factors: tuple[str, int]) -> "HilbertFactorization":
        return cls(tuple(factors))

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(lab for lab, _ in self.factors)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(d for _, d in self.factors)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims, dtype=int)) if self.factors else 1

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise LabelError(f"unknown factor label {label!r}; have {self.labels}") from None

    def dim_of(self, label: str) -> int:
        return self.dims[self.index(label)]

    def __add__(self, other: "HilbertFactorization") -> "HilbertFactorization":
        clash = set(self.labels) & set(other.labels)
        if clash:
            raise LabelError(f"label collision: {sorted(clash)}")
        return HilbertFactorization(self.factors + other.factors)

    def subspace(self, labels: Iterable[str]) -> "HilbertFactorization":
        return HilbertFactorization(tuple((lab, self.dim_of(lab)) for lab in labels))


@dataclass(frozen=True)
class Operator:
    space: HilbertFactorization
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        n = self.space.dim
        if m.shape != (n, n):
            raise DimensionError(f"operator shape {m.shape} does not match space dim {n}")
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def dag(self) -> "Operator":
        return Operator(self.space, self.matrix.conj().T)

    def __matmul__(self, other: "Operator") -> "Operator":
        if other.space != self.space:
            raise DimensionError("operators live on different spaces")
        return Operator(self.space, self.matrix @ other.matrix)

    def is_unitary(self, tol: float = UNITARY_TOL) -> bool:
        m = self.matrix
        return bool(np.max(np.abs(m.conj().T @ m - np.eye(len(m))), initial=0.0) <= tol)

    def is_projector(self, tol: float = UNITARY_TOL) -> bool:
        m = self.matrix
        herm = np.max(np.abs(m - m.conj().T), initial=0.0) <= tol
        idem = np.max(np.abs(m @ m - m), initial=0.0) <= tol
        return bool(herm and idem)

    @classmethod
    def identity(cls, space: HilbertFactorization) -> "Operator":
        return cls(space, np.eye(space.dim))


@dataclass(frozen=True)
class DensityOperator:
    """Positive operator of trace at most one.

    ``normalized=False`` marks a conditional (post-measurement) state whose
    trace is an outcome probability rather than one.
    """

    space: HilbertFactorization
    matrix: np.ndarray = field(repr=False)
    normalized: bool = True

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        n = self.space.dim
        if m.shape != (n, n):
            raise DimensionError(f"density matrix shape {m.shape} does not match space dim {n}")
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)
        herm = np.max(np.abs(m - m.conj().T), initial=0.0)
        if herm > HERMITIAN_TOL * max(1.0, np.max(np.abs(m), initial=0.0)):
            raise ValueError(f"density matrix is not Hermitian (max deviation {herm:.3e})")
        tr = self.trace
        if self.normalized:
            if abs(tr - 1.0) > TRACE_TOL:
                raise ValueError(f"normalized state has trace {tr!r}")
        elif tr < -TRACE_TOL or tr > 1.0 + TRACE_TOL:
            raise ValueError(f"unnormalized state has trace {tr!r} outside [0, 1]")

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))

    @property
    def dim(self) -> int:
        return self.space.dim

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.matrix).min())

    def validate(self, tol: float = POSITIVITY_TOL) -> "DensityOperator":
        """Eigenvalue positivity check; returns ``self`` so it can be chained."""
        lo = self.min_eigenvalue()
        if lo < -tol:
            raise ValueError(f"state is not positive (min eigenvalue {lo:.3e})")
        return self

    def renormalize(self) -> "DensityOperator":
        tr = self.trace
        if tr <= 0:
            raise ValueError("cannot renormalize a zero-trace state")
        return DensityOperator(self.space, self.matrix / tr, normalized=True)

    def unnormalized(self) -> "DensityOperator":
        return DensityOperator(self.space, self.matrix, normalized=False)

    def scaled(self, w: float) -> "DensityOperator":
        return DensityOperator(self.space, self.matrix * w, normalized=False)

    def __add__(self, other: "DensityOperator") -> "DensityOperator":
        if other.space != self.space:
            raise DimensionError("cannot add states on different spaces")
        return DensityOperator(self.space, self.matrix + other.matrix, normalized=False)

    def expectation(self, op: np.ndarray) -> complex:
        return complex(np.trace(np.asarray(op) @ self.matrix))

    @classmethod
    def pure(cls, space: HilbertFactorization, psi: Sequence[complex]) -> "DensityOperator":
        v = np.asarray(psi, dtype=complex).reshape(-1)
        v = v / np.linalg.norm(v)
        return cls(space, np.outer(v, v.conj()))

    @classmethod
    def basis(cls, space: HilbertFactorization, *levels: int) -> "DensityOperator":
        """Product basis state ``|levels[0], levels[1], ...><...|``."""
        if len(levels) != len(space.factors):
            raise DimensionError("need one level per factor")
        idx = int(np.ravel_multi_index(levels, space.dims))
        m = np.zeros((space.dim, space.dim), dtype=complex)
        m[idx, idx] = 1.0
        return cls(space, m)

    @classmethod
    def maximally_mixed(cls, space: HilbertFactorization) -> "DensityOperator":
        return cls(space, np.eye(space.dim) / space.dim)


@dataclass(frozen=True)
class KrausChannel:
    operators: tuple[Operator, ...]
    trace_preserving: bool = True

    def __post_init__(self):
        ops = tuple(self.operators)
        if not ops:
            raise ValueError("channel needs at least one Kraus operator")
        space = ops[0].space
        if any(k.space != space for k in ops):
            raise DimensionError("Kraus operators must share a space")
        object.__setattr__(self, "operators", ops)
        if self.trace_preserving:
            dev = self.completeness_error()
            if dev > KRAUS_TOL:
                raise ValueError(f"Kraus set is not trace preserving (deviation {dev:.3e})")

    @property
    def space(self) -> HilbertFactorization:
        return self.operators[0].space

    def completeness_error(self) -> float:
        s = sum(k.matrix.conj().T @ k.matrix for k in self.operators)
        return float(np.max(np.abs(s - np.eye(self.space.dim))))

    def then(self, other: "KrausChannel") -> "KrausChannel":
        """Composite channel: ``self`` first, then ``other``."""
        ops = tuple(b @ a for a in self.operators for b in other.operators)
        return KrausChannel(ops, self.trace_preserving and other.trace_preserving)


# ---------------------------------------------------------------------------
# tensor-index helpers


def _as_tensor(m: np.ndarray, dims: Sequence[int]) -> np.ndarray:
    return m.reshape(tuple(dims) + tuple(dims))


def _selected_axes(space: HilbertFactorization, on: Sequence[str]) -> list[int]:
    axes = [space.index(lab) for lab in on]
    if len(set(axes)) != len(axes):
        raise LabelError(f"repeated label in {on}")
    return axes


def _apply_left(t: np.ndarray, op: np.ndarray, axes: list[int]) -> np.ndarray:
    """Contract ``op`` (reshaped over ``axes``) into the row indices of tensor ``t``."""
    k = len(axes)
    op_t = op.reshape(tuple(t.shape[a] for a in axes) * 2)
    out = np.tensordot(op_t, t, axes=(list(range(k, 2 * k)), axes))
    # tensordot puts the new axes first; move them back into place.
    return np.moveaxis(out, list(range(k)), axes)


def _apply_right(t: np.ndarray, op: np.ndarray, axes: list[int], n: int) -> np.ndarray:
    """Contract ``op^dagger`` into the column indices of tensor ``t``."""
    col_axes = [a + n for a in axes]
    k = len(axes)
    opd = op.conj().T.reshape(tuple(t.shape[a] for a in col_axes) * 2)
    out = np.tensordot(t, opd, axes=(col_axes, list(range(k))))
    # tensordot appends new axes last.
    return np.moveaxis(out, list(range(2 * n - k, 2 * n)), col_axes)


def _sandwich(rho: DensityOperator, op: np.ndarray, on: Sequence[str]) -> np.ndarray:
    space = rho.space
    axes = _selected_axes(space, on)
    sub = int(np.prod([space.dims[a] for a in axes], dtype=int))
    if op.shape != (sub, sub):
        raise DimensionError(f"operator of shape {op.shape} cannot act on factors {list(on)}")
    n = len(space.factors)
    t = _as_tensor(rho.matrix, space.dims)
    t = _apply_left(t, op, axes)
    t = _apply_right(t, op, axes, n)
    return t.reshape(space.dim, space.dim)


def _resolve_on(space: HilbertFactorization, op_space: HilbertFactorization, on) -> list[str]:
    on = list(op_space.labels if on is None else on)
    if [space.dim_of(lab) for lab in on] != list(op_space.dims):
        raise DimensionError(f"factors {on} have dims {[space.dim_of(l) for l in on]}, "
                             f"operator expects {list(op_space.dims)}")
    return on


# ---------------------------------------------------------------------------
# public operations


def tensor(a, b):
    """Kronecker product of two states or two operators; labels must be disjoint."""
    space = a.space + b.space
    m = np.kron(a.matrix, b.matrix)
    if isinstance(a, DensityOperator) and isinstance(b, DensityOperator):
        return DensityOperator(space, m, normalized=a.normalized and b.normalized)
    if isinstance(a, Operator) and isinstance(b, Operator):
        return Operator(space, m)
    raise TypeError("tensor() needs two DensityOperators or two Operators")


def partial_trace(rho: DensityOperator, discard: Iterable[str]) -> DensityOperator:
    discard = list(discard)
    space = rho.space
    axes = _selected_axes(space, discard)
    keep = [i for i in range(len(space.factors)) if i not in axes]
    n = len(space.factors)
    t = _as_tensor(rho.matrix, space.dims)
    letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
    if 2 * n > len(letters):
        raise DimensionError("too many factors for partial_trace")
    row = list(letters[:n])
    col = list(letters[n:2 * n])
    for a in axes:
        col[a] = row[a]
    out = "".join(row[i] for i in keep) + "".join(col[i] for i in keep)
    m = np.einsum("".join(row) + "".join(col) + "->" + out, t)
    reduced = HilbertFactorization(tuple(space.factors[i] for i in keep))
    m = m.reshape(reduced.dim, reduced.dim)
    return DensityOperator(reduced, m, normalized=rho.normalized)


def apply_unitary(rho: DensityOperator, U: Operator, on: Sequence[str] | None = None) -> DensityOperator:
    on = _resolve_on(rho.space, U.space, on)
    if not U.is_unitary():
        raise ValueError("operator is not unitary")
    return DensityOperator(rho.space, _sandwich(rho, U.matrix, on), normalized=rho.normalized)


def apply_channel(rho: DensityOperator, ch: KrausChannel, on: Sequence[str] | None = None) -> DensityOperator:
    on = _resolve_on(rho.space, ch.space, on)
    m = sum(_sandwich(rho, k.matrix, on) for k in ch.operators)
    normalized = rho.normalized and ch.trace_preserving
    return DensityOperator(rho.space, m, normalized=normalized)


def project(rho: DensityOperator, P: Operator, on: Sequence[str] | None = None) -> DensityOperator:
    """Unnormalized post-measurement state ``P rho P``; its trace is the outcome probability."""
    on = _resolve_on(rho.space, P.space, on)
    if not P.is_projector():
        raise ValueError("operator is not an orthogonal projector")
    return DensityOperator(rho.space, _sandwich(rho, P.matrix, on), normalized=False)


def embed_levels(rho: DensityOperator, label: str, new_dim: int) -> DensityOperator:
    """Zero-pad factor ``label`` to ``new_dim`` levels (raises a truncation)."""
    space = rho.space
    i = space.index(label)
    old = space.dims[i]
    if new_dim < old:
        raise DimensionError("embed_levels can only enlarge a factor")
    iso = np.zeros((new_dim, old))
    iso[:old, :old] = np.eye(old)
    dims_new = list(space.dims)
    dims_new[i] = new_dim
    n = len(space.factors)
    t = _as_tensor(rho.matrix, space.dims)
    t = np.moveaxis(np.tensordot(iso, t, axes=([1], [i])), 0, i)
    t = np.moveaxis(np.tensordot(t, iso.T, axes=([n + i], [0])), -1, n + i)
    new_space = HilbertFactorization(tuple(
        (lab, new_dim if j == i else d) for j, (lab, d) in enumerate(space.factors)))
    return DensityOperator(new_space, t.reshape(new_space.dim, new_space.dim), normalized=rho.normalized)


def reorder(rho: DensityOperator, labels: Sequence[str]) -> DensityOperator:
    """Permute tensor factors into the order given by ``labels``."""
    space = rho.space
    if sorted(labels) != sorted(space.labels):
        raise LabelError(f"reorder needs a permutation of {space.labels}")
    perm = [space.index(lab) for lab in labels]
    n = len(perm)
    t = _as_tensor(rho.matrix, space.dims).transpose(perm + [p + n for p in perm])
    new_space = space.subspace(labels)
    return DensityOperator(new_space, t.reshape(new_space.dim, new_space.dim), normalized=rho.normalized)


def overlap_decompose(u, v) -> tuple[float, float]:
    """Polar form of ``<u|v> = magnitude * exp(-i * lam)``; returns ``(magnitude, lam)``.

    ``lam`` is reported as 0 when the overlap vanishes.
    """
    u = np.asarray(u, dtype=complex).reshape(-1)
    v = np.asarray(v, dtype=complex).reshape(-1)
    for name, w in (("u", u), ("v", v)):
        if abs(np.linalg.norm(w) - 1.0) > 1e-10:
            raise ValueError(f"{name} is not unit norm")
    ov = np.vdot(u, v)
    mag = float(min(abs(ov), 1.0))
    if mag < PHASE_ZERO_TOL:
        return mag, 0.0
    return mag, float(-np.angle(ov))


def fidelity_pure(rho: DensityOperator, psi) -> float:
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    return float(np.real(np.vdot(psi, rho.matrix @ psi)) / rho.trace)

"""Dense complex linear algebra over multi-qudit Hilbert spaces.

The value types here (:class:`QState`, :class:`PureVec`) pair a dense
matrix or vector with the ordered list of subsystem dimensions.  Indexing
is row-major throughout: the leftmost subsystem varies slowest, matching
``numpy.reshape`` and ``numpy.kron``.  All objects are immutable after
construction and every operation is a pure function, so everything in
this module is safe to use from concurrent workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

HERM_TOL = 1e-10
TRACE_TOL = 1e-10
# Eigensolvers report small negative noise on rank-deficient states
# (pure-state projectors), so positivity is checked with a floor.
PSD_TOL = 1e-9
NORM_TOL = 1e-12
# Below this, squared Schmidt coefficients are treated as numerical zeros.
SCHMIDT_CUTOFF = 1e-12


def _as_dims(dims) -> tuple[int, ...]:
    out = tuple(int(d) for d in dims)
    if not out:
        raise ValueError("dims must be nonempty")
    if any(d < 2 for d in out):
        raise ValueError(f"every subsystem dimension must be >= 2, got {out}")
    return out


@dataclass(frozen=True)
class Bipartition:
    """Subset of subsystem indices defining the kept side S of a cut S | S-bar."""

    kept: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "kept", tuple(sorted(set(int(i) for i in self.kept))))

    def validate(self, n_subsystems: int, proper: bool = True) -> None:
        if any(i < 0 or i >= n_subsystems for i in self.kept):
            raise ValueError(
                f"bipartition {self.kept} out of range for {n_subsystems} subsystems"
            )
        if proper and not 0 < len(self.kept) < n_subsystems:
            raise ValueError("bipartition must keep a nonempty proper subset")

    def complement(self, n_subsystems: int) -> tuple[int, ...]:
        return tuple(i for i in range(n_subsystems) if i not in self.kept)


@dataclass(frozen=True)
class QState:
    """Density operator: Hermitian, unit-trace, positive semidefinite.

    Attributes
    ----------
    dims : tuple of int
        Ordered subsystem dimensions, each >= 2.
    matrix : ndarray
        Dense complex square matrix of side ``prod(dims)``.
    """

    dims: tuple[int, ...]
    matrix: np.ndarray

    def __post_init__(self):
        dims = _as_dims(self.dims)
        m = np.array(self.matrix, dtype=complex)
        side = math.prod(dims)
        if m.shape != (side, side):
            raise ValueError(f"matrix shape {m.shape} does not match dims {dims}")
        if np.abs(m - m.conj().T).max() > HERM_TOL:
            raise ValueError("matrix is not Hermitian within tolerance")
        if abs(np.trace(m).real - 1.0) > TRACE_TOL or abs(np.trace(m).imag) > TRACE_TOL:
            raise ValueError("matrix does not have unit trace")
        if np.linalg.eigvalsh(m)[0] < -PSD_TOL:
            raise ValueError("matrix is not positive semidefinite within tolerance")
        m.flags.writeable = False
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return math.prod(self.dims)

    def purity(self) -> float:
        return hs_inner(self.matrix, self.matrix)


@dataclass(frozen=True)
class PureVec:
    """Normalized state vector with an explicit subsystem layout."""

    dims: tuple[int, ...]
    vec: np.ndarray

    def __post_init__(self):
        dims = _as_dims(self.dims)
        v = np.array(self.vec, dtype=complex).ravel()
        if v.shape != (math.prod(dims),):
            raise ValueError(f"vector length {v.shape} does not match dims {dims}")
        if abs(np.linalg.norm(v) - 1.0) > NORM_TOL:
            raise ValueError("vector is not normalized")
        v.flags.writeable = False
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "vec", v)

    @property
    def dim(self) -> int:
        return math.prod(self.dims)

    def projector(self) -> QState:
        return QState(self.dims, np.outer(self.vec, self.vec.conj()))


@dataclass(frozen=True)
class SchmidtDecomp:
    """Schmidt data of a pure state across one cut.

    ``coeffs`` holds the squared Schmidt coefficients, strictly positive
    and descending, summing to one.  ``left_vecs`` / ``right_vecs`` hold
    the matching orthonormal vectors as columns.
    """

    coeffs: np.ndarray
    left_vecs: np.ndarray
    right_vecs: np.ndarray

    @property
    def rank(self) -> int:
        return len(self.coeffs)

    def reconstruct(self) -> np.ndarray:
        """Rebuild the state vector sum_k sqrt(l_k) |e_k> x |f_k>."""
        weights = np.sqrt(self.coeffs)
        mat = (self.left_vecs * weights) @ self.right_vecs.T
        return mat.reshape(-1)


def basis_state(dims, indices) -> PureVec:
    """Computational-basis product state |i_1 i_2 ...> on the given layout."""
    dims = _as_dims(dims)
    indices = tuple(int(i) for i in indices)
    if len(indices) != len(dims):
        raise ValueError("one basis index per subsystem required")
    flat = 0
    for d, i in zip(dims, indices):
        if not 0 <= i < d:
            raise ValueError(f"basis index {i} out of range for dimension {d}")
        flat = flat * d + i
    v = np.zeros(math.prod(dims), dtype=complex)
    v[flat] = 1.0
    return PureVec(dims, v)


def tensor(a, b):
    """Kronecker composition of two states of the same kind."""
    if isinstance(a, QState) and isinstance(b, QState):
        return QState(a.dims + b.dims, np.kron(a.matrix, b.matrix))
    if isinstance(a, PureVec) and isinstance(b, PureVec):
        return PureVec(a.dims + b.dims, np.kron(a.vec, b.vec))
    raise TypeError("tensor requires two QState or two PureVec arguments")


def partial_trace_matrix(m: np.ndarray, dims, keep) -> np.ndarray:
    """Trace out every subsystem not listed in ``keep`` from a plain matrix."""
    dims = _as_dims(dims)
    n = len(dims)
    keep = sorted(set(int(i) for i in keep))
    if any(i < 0 or i >= n for i in keep):
        raise ValueError(f"kept indices {keep} out of range for dims {dims}")
    if not keep:
        raise ValueError("cannot trace out every subsystem")
    t = np.asarray(m).reshape(dims + dims)
    left = list(dims)
    for idx in sorted(set(range(n)) - set(keep), reverse=True):
        t = np.trace(t, axis1=idx, axis2=idx + len(left))
        left.pop(idx)
    side = math.prod(left)
    return t.reshape(side, side)


def partial_trace(state: QState, part: Bipartition) -> QState:
    """Reduced state on the kept subsystems, Tr over the complement."""
    part.validate(len(state.dims), proper=False)
    if not part.kept:
        raise ValueError("bipartition keeps no subsystem")
    reduced = partial_trace_matrix(state.matrix, state.dims, part.kept)
    return QState(tuple(state.dims[i] for i in part.kept), reduced)


def partial_transpose_matrix(m: np.ndarray, dims, transposed) -> np.ndarray:
    """Transpose the row/column indices of the listed subsystems only."""
    dims = _as_dims(dims)
    n = len(dims)
    transposed = sorted(set(int(i) for i in transposed))
    if any(i < 0 or i >= n for i in transposed):
        raise ValueError(f"indices {transposed} out of range for dims {dims}")
    perm = list(range(2 * n))
    for idx in transposed:
        perm[idx], perm[n + idx] = perm[n + idx], perm[idx]
    side = math.prod(dims)
    return np.asarray(m).reshape(dims + dims).transpose(perm).reshape(side, side)


def partial_transpose(state: QState, part: Bipartition) -> np.ndarray:
    """Partial transpose of a state; Hermitian but not necessarily PSD."""
    part.validate(len(state.dims), proper=False)
    return partial_transpose_matrix(state.matrix, state.dims, part.kept)


def permute_subsystems_matrix(m: np.ndarray, dims, order) -> np.ndarray:
    """Reorder subsystems so output slot k carries input subsystem order[k]."""
    dims = _as_dims(dims)
    n = len(dims)
    order = [int(i) for i in order]
    if sorted(order) != list(range(n)):
        raise ValueError(f"order {order} is not a permutation of {n} subsystems")
    perm = order + [i + n for i in order]
    side = math.prod(dims)
    return np.asarray(m).reshape(dims + dims).transpose(perm).reshape(side, side)


def permute_subsystems_vec(v: np.ndarray, dims, order) -> np.ndarray:
    dims = _as_dims(dims)
    order = [int(i) for i in order]
    if sorted(order) != list(range(len(dims))):
        raise ValueError(f"order {order} is not a permutation")
    return np.asarray(v).reshape(dims).transpose(order).reshape(-1)


def embed_operator(m: np.ndarray, dims, positions) -> np.ndarray:
    """Place an operator on the listed subsystems, identity elsewhere.

    ``m`` must act on ``dims[positions]`` taken in ascending position order.
    """
    dims = _as_dims(dims)
    n = len(dims)
    positions = sorted(set(int(i) for i in positions))
    rest = [i for i in range(n) if i not in positions]
    expected = math.prod(dims[i] for i in positions)
    if np.asarray(m).shape != (expected, expected):
        raise ValueError("operator shape does not match the target subsystems")
    big = np.kron(np.asarray(m), np.eye(math.prod([dims[i] for i in rest] or [1])))
    layout = positions + rest
    layout_dims = tuple(dims[i] for i in layout)
    order = [layout.index(k) for k in range(n)]
    return permute_subsystems_matrix(big, layout_dims, order)


def hs_inner(a, b) -> float:
    """Hilbert-Schmidt inner product Tr[a b] of two Hermitian matrices."""
    am = a.matrix if isinstance(a, QState) else np.asarray(a)
    bm = b.matrix if isinstance(b, QState) else np.asarray(b)
    if am.shape != bm.shape:
        raise ValueError(f"dimension mismatch: {am.shape} vs {bm.shape}")
    val = np.einsum("ij,ji->", am, bm)
    if abs(val.imag) > HERM_TOL:
        raise ValueError(f"inner product has imaginary part {val.imag:.3e}")
    return float(val.real)


def eig_hermitian(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvectors (columns)."""
    mm = m.matrix if isinstance(m, QState) else np.asarray(m, dtype=complex)
    scale = max(1.0, float(np.abs(mm).max()))
    if np.abs(mm - mm.conj().T).max() > HERM_TOL * scale:
        raise ValueError("input is not Hermitian within tolerance")
    w, v = np.linalg.eigh(mm)
    return w, v


def bipartite_view(state: QState, part: Bipartition | None = None) -> QState:
    """View a multi-qudit state as two subsystems, S and its complement.

    Subsystems in ``part.kept`` are permuted to the front and merged; the
    rest are merged behind them.  With two subsystems and no explicit cut
    this is the identity.
    """
    n = len(state.dims)
    if part is None:
        if n != 2:
            raise ValueError("state is not bipartite as laid out; pass a Bipartition")
        return state
    part.validate(n)
    keep = list(part.kept)
    rest = list(part.complement(n))
    m = permute_subsystems_matrix(state.matrix, state.dims, keep + rest)
    d_s = math.prod(state.dims[i] for i in keep)
    d_rest = math.prod(state.dims[i] for i in rest)
    return QState((d_s, d_rest), m)


def schmidt_decompose(v: PureVec, part: Bipartition | None = None,
                      cutoff: float = SCHMIDT_CUTOFF) -> SchmidtDecomp:
    """Schmidt decomposition of a pure state across a bipartite cut."""
    n = len(v.dims)
    if part is None:
        if n != 2:
            raise ValueError("state is not bipartite as laid out; pass a Bipartition")
        keep, rest = [0], [1]
    else:
        part.validate(n)
        keep = list(part.kept)
        rest = list(part.complement(n))
    vec = permute_subsystems_vec(v.vec, v.dims, keep + rest)
    d_left = math.prod(v.dims[i] for i in keep)
    coeff_matrix = vec.reshape(d_left, -1)
    u, s, vh = np.linalg.svd(coeff_matrix, full_matrices=False)
    mask = s * s > cutoff
    return SchmidtDecomp(
        coeffs=(s[mask] ** 2),
        left_vecs=u[:, mask],
        right_vecs=vh[mask, :].T,
    )

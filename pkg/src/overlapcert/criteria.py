"""Bipartite entanglement and Schmidt-number detection criteria.

The central quantity is the ratio of global to local state overlap,

    s_X(rho, sigma) = Tr[rho sigma] / Tr[rho_X sigma_X],   X in {A, B},

with s = max(s_A, s_B) and the convention s_X = 0 when the denominator
vanishes.  If rho has Schmidt number at most r then s <= r for every
sigma, so observing s > r certifies Schmidt number >= r+1 for BOTH
states at once.  The same module implements the criteria this ratio is
compared against: the reduction check, the purity check, fidelity-based
witnesses with their spectral detectability bound, and the third-moment
partial-transpose test.

Every strict inequality carries the tolerance ``DEFAULT_TOL``; ratios of
exactly r (pure states against their verifier) must not round up to a
certificate of r+1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .qmat import (
    Bipartition,
    PureVec,
    QState,
    eig_hermitian,
    hs_inner,
    partial_trace_matrix,
    partial_transpose_matrix,
    permute_subsystems_matrix,
    permute_subsystems_vec,
    schmidt_decompose,
)

DEFAULT_TOL = 1e-9


def sn_bound_from_ratio(s: float, tol: float = DEFAULT_TOL) -> int:
    """Certified Schmidt-number lower bound from an overlap ratio."""
    return max(1, math.ceil(s - tol))


@dataclass(frozen=True)
class OverlapRatio:
    """Global and local overlaps of one state pair, with their ratios."""

    global_overlap: float
    local_a: float
    local_b: float
    s_a: float
    s_b: float
    s: float


@dataclass(frozen=True)
class CriterionVerdict:
    """Outcome of one criterion applied to one state (or state pair)."""

    criterion: str
    values: dict
    threshold: float
    detected: bool
    sn_lower_bound: int

    def to_json(self) -> dict:
        return {
            "criterion": self.criterion,
            "values": {k: float(v) for k, v in self.values.items()},
            "threshold": float(self.threshold),
            "detected": bool(self.detected),
            "sn_bound": int(self.sn_lower_bound),
        }


def _grouped(state: QState, split: Bipartition | None):
    """Matrix in (S, S-bar) layout plus bookkeeping to undo the grouping."""
    n = len(state.dims)
    if split is None:
        if n != 2:
            raise ValueError("state is not bipartite as laid out; pass a Bipartition")
        layout = [0, 1]
    else:
        split.validate(n)
        layout = list(split.kept) + list(split.complement(n))
    layout_dims = tuple(state.dims[i] for i in layout)
    if layout == list(range(n)):
        m = state.matrix
    else:
        m = permute_subsystems_matrix(state.matrix, state.dims, layout)
    k = len(split.kept) if split is not None else 1
    d_a = math.prod(layout_dims[:k])
    d_b = math.prod(layout_dims[k:])
    return m, d_a, d_b, layout, layout_dims


def _ratio_parts(rho_m, sigma_m, d_a, d_b):
    dims = (d_a, d_b)
    g = hs_inner(rho_m, sigma_m)
    la = hs_inner(
        partial_trace_matrix(rho_m, dims, [0]), partial_trace_matrix(sigma_m, dims, [0])
    )
    lb = hs_inner(
        partial_trace_matrix(rho_m, dims, [1]), partial_trace_matrix(sigma_m, dims, [1])
    )
    return g, la, lb


def overlap_ratio(rho: QState, sigma: QState,
                  split: Bipartition | None = None) -> OverlapRatio:
    """Global-to-local overlap ratios of two states with identical layout."""
    if rho.dims != sigma.dims:
        raise ValueError(f"dimension mismatch: {rho.dims} vs {sigma.dims}")
    rm, d_a, d_b, _, _ = _grouped(rho, split)
    sm, _, _, _, _ = _grouped(sigma, split)
    g, la, lb = _ratio_parts(rm, sm, d_a, d_b)
    s_a = g / la if la > 0.0 else 0.0
    s_b = g / lb if lb > 0.0 else 0.0
    return OverlapRatio(g, la, lb, s_a, s_b, max(s_a, s_b))


def ipc_bound(rho: QState, sigma: QState, split: Bipartition | None = None,
              tol: float = DEFAULT_TOL) -> CriterionVerdict:
    """Schmidt-number lower bound from the overlap ratio.

    The certified bound applies simultaneously to ``rho`` and ``sigma``.
    """
    ratio = overlap_ratio(rho, sigma, split)
    bound = sn_bound_from_ratio(ratio.s, tol)
    return CriterionVerdict(
        criterion="ipc",
        values={
            "s": ratio.s,
            "s_a": ratio.s_a,
            "s_b": ratio.s_b,
            "global": ratio.global_overlap,
            "local_a": ratio.local_a,
            "local_b": ratio.local_b,
        },
        threshold=1.0,
        detected=bound >= 2,
        sn_lower_bound=bound,
    )


def reduction_check(rho: QState, r: int = 1, split: Bipartition | None = None,
                    tol: float = DEFAULT_TOL) -> CriterionVerdict:
    """Positivity test of r*rho_A x I - rho and r*I x rho_B - rho.

    A negative eigenvalue beyond tolerance on either side rules out
    Schmidt number <= r.
    """
    if r < 1:
        raise ValueError("r must be >= 1")
    m, d_a, d_b, _, _ = _grouped(rho, split)
    dims = (d_a, d_b)
    rho_a = partial_trace_matrix(m, dims, [0])
    rho_b = partial_trace_matrix(m, dims, [1])
    op_a = r * np.kron(rho_a, np.eye(d_b)) - m
    op_b = r * np.kron(np.eye(d_a), rho_b) - m
    min_a = float(np.linalg.eigvalsh(op_a)[0])
    min_b = float(np.linalg.eigvalsh(op_b)[0])
    min_eig = min(min_a, min_b)
    detected = min_eig < -tol
    return CriterionVerdict(
        criterion=f"reduction-r{r}",
        values={
            "min_eig": min_eig,
            "min_eig_a_side": min_a,
            "min_eig_b_side": min_b,
            "r": float(r),
        },
        threshold=0.0,
        detected=detected,
        sn_lower_bound=r + 1 if detected else 1,
    )


def extract_ipc_witness(rho: QState, r: int = 1, split: Bipartition | None = None,
                        tol: float = DEFAULT_TOL) -> QState | None:
    """Partner state certifying s > r, or None when the reduction check passes.

    When r*rho_A x I - rho (or the B side) has a negative eigenvalue, the
    projector onto its most negative eigenvector is a sigma for which the
    overlap ratio strictly exceeds r.  Degenerate negative eigenspaces are
    resolved deterministically by the eigensolver's lowest index.
    """
    if r < 1:
        raise ValueError("r must be >= 1")
    m, d_a, d_b, layout, layout_dims = _grouped(rho, split)
    dims = (d_a, d_b)
    rho_a = partial_trace_matrix(m, dims, [0])
    rho_b = partial_trace_matrix(m, dims, [1])
    op_a = r * np.kron(rho_a, np.eye(d_b)) - m
    op_b = r * np.kron(np.eye(d_a), rho_b) - m
    w_a, v_a = eig_hermitian(op_a)
    w_b, v_b = eig_hermitian(op_b)
    if min(w_a[0], w_b[0]) >= -tol:
        return None
    vec = v_a[:, 0] if w_a[0] <= w_b[0] else v_b[:, 0]
    # Undo the grouping permutation so the witness lives on rho's layout.
    n = len(rho.dims)
    if layout != list(range(n)):
        inverse = [layout.index(k) for k in range(n)]
        vec = permute_subsystems_vec(vec, layout_dims, inverse)
    return PureVec(rho.dims, vec).projector()


def purity_check(rho: QState, split: Bipartition | None = None,
                 tol: float = DEFAULT_TOL) -> CriterionVerdict:
    """Global purity against the smaller local purity.

    Detection (Tr[rho^2] above the minimum local purity) certifies
    entanglement; the size of the purity ratio certifies more.  Writing
    g_X = log2(Tr[rho^2] / Tr[rho_X^2]) for the second-order Renyi entropy
    gap, g_X > log2(r) certifies Schmidt number >= r+1, so the bound is
    ceil(max_X 2^{g_X}) with the usual tolerance guard.
    """
    m, d_a, d_b, _, _ = _grouped(rho, split)
    g, la, lb = _ratio_parts(m, m, d_a, d_b)
    min_local = min(la, lb)
    s = g / min_local if min_local > 0.0 else 0.0
    bound = sn_bound_from_ratio(s, tol)
    return CriterionVerdict(
        criterion="purity",
        values={"purity_global": g, "purity_a": la, "purity_b": lb,
                "purity_ratio": s},
        threshold=min_local,
        detected=g > min_local + tol,
        sn_lower_bound=bound,
    )


def fbc_witness_value(rho: QState, phi: PureVec, r: int = 1,
                      split: Bipartition | None = None,
                      tol: float = DEFAULT_TOL) -> CriterionVerdict:
    """Expectation of the rank-r fidelity witness built from ``phi``.

    The witness is (sum of the top r squared Schmidt coefficients of phi)
    times the identity, minus |phi><phi|.  A negative expectation value on
    ``rho`` certifies Schmidt number >= r+1.
    """
    if r < 1:
        raise ValueError("r must be >= 1")
    if rho.dims != phi.dims:
        raise ValueError(f"dimension mismatch: {rho.dims} vs {phi.dims}")
    sd = schmidt_decompose(phi, split)
    if sd.rank < r:
        raise ValueError(f"witness state has Schmidt rank {sd.rank} < r={r}")
    top_r = float(np.sum(sd.coeffs[:r]))
    fidelity = float(np.real(phi.vec.conj() @ (rho.matrix @ phi.vec)))
    value = top_r - fidelity
    detected = value < -tol
    return CriterionVerdict(
        criterion=f"fbc-r{r}",
        values={"witness_value": value, "fidelity": fidelity, "top_r_sum": top_r,
                "r": float(r)},
        threshold=0.0,
        detected=detected,
        sn_lower_bound=r + 1 if detected else 1,
    )


def fbc_spectrum_bound(rho: QState, r: int = 1, split: Bipartition | None = None,
                       tol: float = DEFAULT_TOL) -> bool:
    """True when no rank-r fidelity witness can detect ``rho``.

    If the largest eigenvalue of rho is at most max(r/d_A, r/d_B), every
    witness of the fidelity form has nonnegative expectation, i.e. rho is
    provably (r+1)-unfaithful.
    """
    if r < 1:
        raise ValueError("r must be >= 1")
    _, d_a, d_b, _, _ = _grouped(rho, split)
    lam_max = float(np.linalg.eigvalsh(rho.matrix)[-1])
    return lam_max <= max(r / d_a, r / d_b) + tol


def pt_moments(rho: QState, k_max: int = 3,
               split: Bipartition | None = None) -> list[float]:
    """Moments p_k = Tr[(rho^T_A)^k] for k = 1 .. k_max."""
    if k_max < 2:
        raise ValueError("k_max must be >= 2")
    m, d_a, d_b, _, _ = _grouped(rho, split)
    pt = partial_transpose_matrix(m, (d_a, d_b), [0])
    eigs = np.linalg.eigvalsh(pt)
    return [float(np.sum(eigs**k)) for k in range(1, k_max + 1)]


def p3_ppt_check(rho: QState, split: Bipartition | None = None,
                 tol: float = DEFAULT_TOL) -> CriterionVerdict:
    """Third-moment partial-transpose test: separable states obey p2^2 <= p3."""
    p1, p2, p3 = pt_moments(rho, 3, split)
    detected = p2 * p2 > p3 + tol
    return CriterionVerdict(
        criterion="p3-ppt",
        values={"p1": p1, "p2": p2, "p3": p3, "gap": p2 * p2 - p3},
        threshold=0.0,
        detected=detected,
        sn_lower_bound=2 if detected else 1,
    )


# ---------------------------------------------------------------------------
# Closed forms for the corner-isotropic family.


def corner_delta(d: int, x: float) -> float:
    """Largest eigenvalue of corner_isotropic(d, x).

    With m = (1-x)/(d-1)^2 and n = x/d the top of the spectrum is
    (m + n d + sqrt((m + n d)^2 - 4 m n)) / 2.
    """
    m = (1.0 - x) / (d - 1) ** 2
    n = x / d
    return (m + n * d + math.sqrt((m + n * d) ** 2 - 4.0 * m * n)) / 2.0


def corner_fbc_psi_boundary(d: int, r: int = 1) -> float:
    """Smallest x at which the rank-r fidelity witness of |Psi> detects.

    Solves x + (1-x)/(d(d-1)) = r/d, i.e. x = (r(d-1) - 1)/(d^2 - d - 1).
    """
    return (r * (d - 1) - 1.0) / (d * d - d - 1.0)


def corner_isotropic_closed_forms(d: int, x: float) -> dict:
    """Closed-form scalars for corner_isotropic(d, x).

    Returns the largest eigenvalue ``delta``, the third-moment gap
    ``p2sq_minus_p3``, the global and local purities, and the x-threshold
    above which the fidelity witness of |Psi> detects.
    """
    if d < 3:
        raise ValueError("corner-isotropic family needs d >= 3")
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x={x} outside [0, 1]")
    poly = (
        (d**3 - 2 * d**2 + 2) ** 2 * x**3
        + (2 * d**4 - 12 * d**3 + 18 * d**2 - 5 * d - 6) * x**2
        + (-(d**4) + 8 * d**3 - 15 * d**2 + 10 * d + 1) * x
        - d
    )
    return {
        "delta": corner_delta(d, x),
        "p2sq_minus_p3": x / ((d - 1) ** 4 * d**2) * poly,
        "purity_global": (1 - x) ** 2 / (d - 1) ** 2 + x**2
        + 2 * (1 - x) * x / ((d - 1) * d),
        "purity_local": (1 - x) ** 2 / (d - 1) + x**2 / d + 2 * (1 - x) * x / d,
        "fbc_psi_threshold": corner_fbc_psi_boundary(d, 1),
    }

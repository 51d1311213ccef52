"""Multipartite extensions of the overlap-ratio criterion.

Two tools: a bipartition scan that certifies a pair of n-partite states
entangled when the global overlap beats every cut's local overlaps, and a
tripartite positive-map test built from a reduction-type inversion map on
A tensored with a state-inversion map on B.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .criteria import DEFAULT_TOL
from .qmat import Bipartition, QState, embed_operator, hs_inner, partial_trace_matrix

# Exhaustive bipartition enumeration is exponential; past this size the
# scan refuses rather than silently taking hours.
MAX_SUBSYSTEMS = 12


@dataclass(frozen=True)
class CutOverlap:
    """Local overlaps of one bipartition, kept side S and its complement."""

    kept: tuple[int, ...]
    overlap_kept: float
    overlap_rest: float

    @property
    def min_side(self) -> float:
        return min(self.overlap_kept, self.overlap_rest)


@dataclass(frozen=True)
class MultiVerdict:
    """Outcome of the bipartition-scan overlap criterion."""

    global_overlap: float
    cut_table: tuple[CutOverlap, ...]
    min_cut: tuple[int, ...]
    min_value: float
    detected: bool

    def to_json(self) -> dict:
        return {
            "global_overlap": self.global_overlap,
            "min_cut": list(self.min_cut),
            "min_value": self.min_value,
            "detected": self.detected,
            "cuts": [
                {
                    "kept": list(c.kept),
                    "overlap_kept": c.overlap_kept,
                    "overlap_rest": c.overlap_rest,
                }
                for c in self.cut_table
            ],
        }


def bipartitions(n_subsystems: int) -> list[Bipartition]:
    """All 2**(n-1) - 1 distinct cuts, canonicalized so subsystem 0 is in S."""
    if n_subsystems < 2:
        raise ValueError("need at least two subsystems")
    if n_subsystems > MAX_SUBSYSTEMS:
        raise ValueError(
            f"exhaustive enumeration limited to {MAX_SUBSYSTEMS} subsystems"
        )
    cuts = []
    rest = list(range(1, n_subsystems))
    for mask in range(2 ** (n_subsystems - 1)):
        kept = [0] + [rest[i] for i in range(n_subsystems - 1) if mask >> i & 1]
        if len(kept) == n_subsystems:
            continue
        cuts.append(Bipartition(tuple(kept)))
    return cuts


def multipartite_ipc(rho: QState, sigma: QState,
                     tol: float = DEFAULT_TOL) -> MultiVerdict:
    """Bipartition-scan overlap criterion for n >= 3 parties.

    Detection means the global overlap exceeds, beyond tolerance, the
    minimum over all cuts of min(<rho_S, sigma_S>, <rho_Sbar, sigma_Sbar>);
    it certifies that neither state is fully separable.
    """
    if rho.dims != sigma.dims:
        raise ValueError(f"dimension mismatch: {rho.dims} vs {sigma.dims}")
    n = len(rho.dims)
    if n < 3:
        raise ValueError("use the bipartite criterion for two subsystems")
    global_overlap = hs_inner(rho, sigma)
    table = []
    for cut in bipartitions(n):
        comp = cut.complement(n)
        v_kept = hs_inner(
            partial_trace_matrix(rho.matrix, rho.dims, cut.kept),
            partial_trace_matrix(sigma.matrix, sigma.dims, cut.kept),
        )
        v_rest = hs_inner(
            partial_trace_matrix(rho.matrix, rho.dims, comp),
            partial_trace_matrix(sigma.matrix, sigma.dims, comp),
        )
        table.append(CutOverlap(cut.kept, v_kept, v_rest))
    best = min(table, key=lambda c: c.min_side)
    return MultiVerdict(
        global_overlap=global_overlap,
        cut_table=tuple(table),
        min_cut=best.kept,
        min_value=best.min_side,
        detected=global_overlap > best.min_side + tol,
    )


def _three_party(rho: QState):
    if len(rho.dims) != 3:
        raise ValueError("this map is defined for exactly three subsystems")
    return rho.dims


def lambda_map_value(rho: QState, sigma: QState, r: int = 1) -> float:
    """Inner product <L(rho), sigma> of the tripartite inversion map.

    L = (Tr_A(.) x 1_A - id/r) x (Tr_B(.) x 1_B + id) x id_C, evaluated
    through the closed form

        <rho_C, sigma_C> + <rho_BC, sigma_BC>
            - (1/r) <rho_AC, sigma_AC> - (1/r) <rho, sigma>,

    which is symmetric under swapping the roles of rho and sigma.
    """
    if r < 1:
        raise ValueError("r must be >= 1")
    dims = _three_party(rho)
    if sigma.dims != dims:
        raise ValueError(f"dimension mismatch: {dims} vs {sigma.dims}")
    t_c = hs_inner(
        partial_trace_matrix(rho.matrix, dims, [2]),
        partial_trace_matrix(sigma.matrix, dims, [2]),
    )
    t_bc = hs_inner(
        partial_trace_matrix(rho.matrix, dims, [1, 2]),
        partial_trace_matrix(sigma.matrix, dims, [1, 2]),
    )
    t_ac = hs_inner(
        partial_trace_matrix(rho.matrix, dims, [0, 2]),
        partial_trace_matrix(sigma.matrix, dims, [0, 2]),
    )
    t_full = hs_inner(rho, sigma)
    return t_c + t_bc - (t_ac + t_full) / r


def apply_lambda_map(rho: QState, r: int = 1) -> np.ndarray:
    """Explicit matrix of L(rho); the closed form above is its cheap twin."""
    if r < 1:
        raise ValueError("r must be >= 1")
    dims = _three_party(rho)
    rho_c = partial_trace_matrix(rho.matrix, dims, [2])
    rho_bc = partial_trace_matrix(rho.matrix, dims, [1, 2])
    rho_ac = partial_trace_matrix(rho.matrix, dims, [0, 2])
    return (
        embed_operator(rho_c, dims, [2])
        + embed_operator(rho_bc, dims, [1, 2])
        - embed_operator(rho_ac, dims, [0, 2]) / r
        - rho.matrix / r
    )


@dataclass(frozen=True)
class LambdaMapVerdict:
    """Structured conclusion of the tripartite inversion-map test.

    A negative value rules out every decomposition of either state into
    bipartite-product terms whose A|C components all have Schmidt number
    at most r; what remains is the disjunction recorded in ``conclusion``.
    ``r_op`` is the largest level at which the value stays negative.
    """

    r: int
    value: float
    detected: bool
    r_op: int

    @property
    def conclusion(self) -> tuple[str, str] | None:
        if not self.detected:
            return None
        return (
            "genuine multipartite entanglement",
            f"every bipartite decomposition contains an A|C component "
            f"with Schmidt number > {self.r}",
        )

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "value": self.value,
            "detected": self.detected,
            "r_op": self.r_op,
            "conclusion": list(self.conclusion) if self.conclusion else None,
        }


def lambda_map_verdict(rho: QState, sigma: QState, r: int = 1,
                       tol: float = DEFAULT_TOL) -> LambdaMapVerdict:
    """Evaluate the map at level r and report the detection disjunction.

    The conclusion applies to both input states.  ``r_op`` is found by
    scanning upward: the value is increasing in r, so detection at some
    level implies detection at all lower levels.
    """
    value = lambda_map_value(rho, sigma, r)
    detected = value < -tol

    # value(level) = A - B/level with A, B >= 0 and A - B = value(1), so
    # it is negative exactly for level < B/(A + tol).
    value_1 = lambda_map_value(rho, sigma, 1)
    t_full = hs_inner(rho, sigma)
    dims = rho.dims
    t_ac = hs_inner(
        partial_trace_matrix(rho.matrix, dims, [0, 2]),
        partial_trace_matrix(sigma.matrix, dims, [0, 2]),
    )
    b_part = t_ac + t_full
    a_part = value_1 + b_part
    r_op = max(0, math.ceil(b_part / (a_part + tol)) - 1)
    while r_op >= 1 and lambda_map_value(rho, sigma, r_op) >= -tol:
        r_op -= 1
    return LambdaMapVerdict(r=r, value=value, detected=detected, r_op=r_op)

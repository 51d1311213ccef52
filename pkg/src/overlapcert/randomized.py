"""Simulation of the two-state local randomized-measurement protocol.

One setting samples a single-qudit unitary for every qudit, applies the
same product unitary to both states, and measures in the computational
basis.  From the outcome statistics the overlaps Tr[rho_X sigma_X] for
X in {A, B, AB} are estimated with the second-order cross-correlation

    Tr[rho_X sigma_X] = d_X * sum_{s,t} (-l)^{-D(s,t)} E_U[P(U,s) Q(U,t)]

where D is the Hamming distance between outcome strings and l the local
dimension.  The same data yields the local overlaps by marginalizing the
outcomes, which is what makes the overlap-ratio criterion measurable.

Finite-shot second moments use distinct-pair U-statistics: cross-state
products pair shots from the two independent records, and within-state
(purity) products exclude the diagonal, which removes the plug-in bias
of naive empirical frequencies.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .qmat import QState

_DESIGNS = ("haar", "clifford")


@dataclass(frozen=True)
class ProtocolConfig:
    """Measurement-protocol parameters.

    ``m`` and ``n`` are the qudit counts on sides A and B, each qudit of
    dimension ``local_dim``; the target states must have total dimension
    local_dim**(m+n), with side A on the leading qudits.
    ``shots_per_setting=None`` means exact outcome probabilities.
    """

    local_dim: int
    m: int
    n: int
    n_unitaries: int
    shots_per_setting: int | None = None
    seed: int = 0
    design: str = "haar"

    def __post_init__(self):
        if self.local_dim < 2:
            raise ValueError("local_dim must be >= 2")
        if self.m < 1 or self.n < 1:
            raise ValueError("each side needs at least one qudit")
        if self.n_unitaries < 1:
            raise ValueError("n_unitaries must be >= 1")
        if self.shots_per_setting is not None and self.shots_per_setting < 1:
            raise ValueError("shots_per_setting must be positive or None for exact")
        if self.design not in _DESIGNS:
            raise ValueError(f"design must be one of {_DESIGNS}")
        if self.design == "clifford" and self.local_dim != 2:
            raise ValueError("clifford design is defined for local_dim 2 only")

    @property
    def d_a(self) -> int:
        return self.local_dim**self.m

    @property
    def d_b(self) -> int:
        return self.local_dim**self.n

    @property
    def exact(self) -> bool:
        return self.shots_per_setting is None

    def to_json(self) -> dict:
        return {
            "local_dim": self.local_dim,
            "m": self.m,
            "n": self.n,
            "n_unitaries": self.n_unitaries,
            "shots_per_setting": "exact" if self.exact else self.shots_per_setting,
            "seed": self.seed,
            "design": self.design,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ProtocolConfig":
        shots = obj.get("shots_per_setting", "exact")
        if shots in ("exact", None):
            shots = None
        else:
            shots = int(shots)
        return cls(
            local_dim=int(obj["local_dim"]),
            m=int(obj["m"]),
            n=int(obj["n"]),
            n_unitaries=int(obj["n_unitaries"]),
            shots_per_setting=shots,
            seed=int(obj.get("seed", 0)),
            design=obj.get("design", "haar"),
        )


@dataclass(frozen=True)
class MeasurementRecord:
    """Outcome data of one setting: the sampled locals plus both states' data.

    Exact mode fills the ``*_probs`` fields with full outcome probability
    vectors; shot mode fills ``*_counts`` with dense count vectors.
    """

    setting: int
    unitaries_a: tuple
    unitaries_b: tuple
    rho_probs: np.ndarray | None = None
    sigma_probs: np.ndarray | None = None
    rho_counts: np.ndarray | None = None
    sigma_counts: np.ndarray | None = None


@dataclass(frozen=True)
class OverlapEstimate:
    """Estimated overlaps, their jackknife standard errors, and the ratio.

    ``s`` is the larger of the two local ratio estimates; it is only
    reported when at least one denominator clears the instability guard
    (mean above ``snr_guard`` times its standard error), otherwise
    ``s = 0`` and ``reliable`` is False.
    """

    overlap_ab: float
    overlap_a: float
    overlap_b: float
    se_ab: float
    se_a: float
    se_b: float
    s_a: float
    s_b: float
    s: float
    se_s: float
    reliable: bool
    n_settings: int

    def to_json(self) -> dict:
        return {
            "overlap_ab": self.overlap_ab,
            "overlap_a": self.overlap_a,
            "overlap_b": self.overlap_b,
            "se_ab": self.se_ab,
            "se_a": self.se_a,
            "se_b": self.se_b,
            "s_a": self.s_a,
            "s_b": self.s_b,
            "s": self.s,
            "se_s": self.se_s,
            "reliable": self.reliable,
            "n_settings": self.n_settings,
        }


_CLIFFORD_CACHE: list | None = None


def _single_qubit_cliffords() -> list:
    """The 24 single-qubit Clifford unitaries, phase-normalized and sorted."""
    global _CLIFFORD_CACHE
    if _CLIFFORD_CACHE is not None:
        return _CLIFFORD_CACHE
    h = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
    s = np.array([[1, 0], [0, 1j]], dtype=complex)

    def canon(u):
        flat = u.ravel()
        first = flat[np.argmax(np.abs(flat) > 1e-9)]
        return np.round(u * (abs(first) / first), 12)

    def key(u):
        return tuple((float(z.real), float(z.imag)) for z in np.round(u.ravel(), 9))

    seen = {}
    frontier = [canon(np.eye(2, dtype=complex))]
    seen[key(frontier[0])] = frontier[0]
    while frontier:
        nxt = []
        for u in frontier:
            for g in (h, s):
                cand = canon(g @ u)
                k = key(cand)
                if k not in seen:
                    seen[k] = cand
                    nxt.append(cand)
        frontier = nxt
    group = [seen[k] for k in sorted(seen)]
    assert len(group) == 24, f"Clifford closure produced {len(group)} elements"
    _CLIFFORD_CACHE = group
    return group


def sample_local_unitary(local_dim: int, rng: np.random.Generator,
                         design: str = "haar") -> np.ndarray:
    """Draw one single-qudit unitary from the requested 2-design."""
    if local_dim < 2:
        raise ValueError("local_dim must be >= 2")
    if design == "haar":
        z = rng.standard_normal((local_dim, local_dim)) \
            + 1j * rng.standard_normal((local_dim, local_dim))
        q, r = np.linalg.qr(z)
        # Phase correction of the R diagonal makes the distribution Haar.
        d = np.diag(r)
        return q * (d / np.abs(d))
    if design == "clifford":
        if local_dim != 2:
            raise ValueError("clifford design is defined for local_dim 2 only")
        group = _single_qubit_cliffords()
        return group[int(rng.integers(len(group)))]
    raise ValueError(f"unknown design {design!r}")


def _kron_chain(mats) -> np.ndarray:
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


def _outcome_probs(u: np.ndarray, rho: np.ndarray) -> np.ndarray:
    probs = np.einsum("ij,jk,ik->i", u, rho, u.conj()).real
    return probs


def run_protocol(rho: QState, sigma: QState, cfg: ProtocolConfig) -> list[MeasurementRecord]:
    """Measure both states under identical sampled settings.

    Returns one record per setting.  Per-setting randomness comes from a
    counter-based split of the seed, so records are reproducible and
    independent of evaluation order.
    """
    total = cfg.local_dim ** (cfg.m + cfg.n)
    if rho.dim != total or sigma.dim != total:
        raise ValueError(
            f"states of dimension {rho.dim}/{sigma.dim} do not match the "
            f"protocol layout {cfg.local_dim}^({cfg.m}+{cfg.n})={total}"
        )
    for state, name in ((rho, "rho"), (sigma, "sigma")):
        # some prefix of the state's subsystems must form side A
        prefixes = {math.prod(state.dims[:k]) for k in range(1, len(state.dims))}
        if cfg.d_a not in prefixes:
            raise ValueError(
                f"{name} dims {state.dims} admit no A|B cut at dimension "
                f"{cfg.d_a}|{cfg.d_b}"
            )
    streams = np.random.SeedSequence(cfg.seed).spawn(cfg.n_unitaries)
    records = []
    for u_idx in range(cfg.n_unitaries):
        rng = np.random.default_rng(streams[u_idx])
        locals_a = tuple(
            sample_local_unitary(cfg.local_dim, rng, cfg.design) for _ in range(cfg.m)
        )
        locals_b = tuple(
            sample_local_unitary(cfg.local_dim, rng, cfg.design) for _ in range(cfg.n)
        )
        u_full = _kron_chain(locals_a + locals_b)
        p_rho = _outcome_probs(u_full, rho.matrix)
        p_sigma = _outcome_probs(u_full, sigma.matrix)
        if cfg.exact:
            records.append(MeasurementRecord(
                setting=u_idx, unitaries_a=locals_a, unitaries_b=locals_b,
                rho_probs=p_rho, sigma_probs=p_sigma,
            ))
        else:
            shots = cfg.shots_per_setting
            pr = np.clip(p_rho, 0.0, None)
            ps = np.clip(p_sigma, 0.0, None)
            c_rho = rng.multinomial(shots, pr / pr.sum())
            c_sigma = rng.multinomial(shots, ps / ps.sum())
            records.append(MeasurementRecord(
                setting=u_idx, unitaries_a=locals_a, unitaries_b=locals_b,
                rho_counts=c_rho, sigma_counts=c_sigma,
            ))
    return records


def _hamming_weight_matrix(local_dim: int, n_qudits: int) -> np.ndarray:
    """Matrix of (-local_dim)^(-HammingDistance) over all outcome pairs."""
    d = local_dim**n_qudits
    digits = np.empty((d, n_qudits), dtype=np.int64)
    rem = np.arange(d)
    for k in range(n_qudits - 1, -1, -1):
        digits[:, k] = rem % local_dim
        rem = rem // local_dim
    dist = (digits[:, None, :] != digits[None, :, :]).sum(axis=2)
    return (-float(local_dim)) ** (-dist)


def _frequencies(records, which: str) -> np.ndarray:
    """Per-setting outcome frequency vectors, shape (n_settings, d)."""
    rows = []
    for rec in records:
        probs = rec.rho_probs if which == "rho" else rec.sigma_probs
        counts = rec.rho_counts if which == "rho" else rec.sigma_counts
        if probs is not None:
            rows.append(np.asarray(probs, dtype=float))
        else:
            c = np.asarray(counts, dtype=float)
            rows.append(c / c.sum())
    return np.vstack(rows)


def _marginals(freqs: np.ndarray, d_a: int, d_b: int):
    cube = freqs.reshape(freqs.shape[0], d_a, d_b)
    return cube.sum(axis=2), cube.sum(axis=1)


def _jackknife_se_mean(y: np.ndarray) -> float:
    n = len(y)
    if n < 2:
        return float("nan")
    loo = (y.sum() - y) / (n - 1)
    return float(np.sqrt((n - 1) / n * np.sum((loo - loo.mean()) ** 2)))


def _ratio_stat(g: float, a: float, b: float) -> tuple[float, float, float]:
    s_a = g / a if a > 0.0 else 0.0
    s_b = g / b if b > 0.0 else 0.0
    return s_a, s_b, max(s_a, s_b)


def estimate_overlaps(records, cfg: ProtocolConfig,
                      snr_guard: float = 10.0) -> OverlapEstimate:
    """Cross-correlation estimate of Tr[rho_X sigma_X] for X in {A, B, AB}.

    Standard errors come from leave-one-setting-out jackknife.  The ratio
    is flagged unreliable (and reported as 0) when no local denominator
    exceeds ``snr_guard`` times its own standard error.
    """
    if len(records) < 2:
        raise ValueError("estimation needs at least two settings")
    f_rho = _frequencies(records, "rho")
    f_sigma = _frequencies(records, "sigma")
    if not cfg.exact and cfg.shots_per_setting < 1:
        raise ValueError("zero shots per setting")

    w_ab = _hamming_weight_matrix(cfg.local_dim, cfg.m + cfg.n)
    w_a = _hamming_weight_matrix(cfg.local_dim, cfg.m)
    w_b = _hamming_weight_matrix(cfg.local_dim, cfg.n)
    ra, rb = _marginals(f_rho, cfg.d_a, cfg.d_b)
    sa, sb = _marginals(f_sigma, cfg.d_a, cfg.d_b)

    d_total = cfg.d_a * cfg.d_b
    y_ab = d_total * np.einsum("ui,ij,uj->u", f_rho, w_ab, f_sigma)
    y_a = cfg.d_a * np.einsum("ui,ij,uj->u", ra, w_a, sa)
    y_b = cfg.d_b * np.einsum("ui,ij,uj->u", rb, w_b, sb)

    n = len(records)
    means = {"ab": y_ab.mean(), "a": y_a.mean(), "b": y_b.mean()}
    ses = {k: _jackknife_se_mean(v) for k, v in (("ab", y_ab), ("a", y_a), ("b", y_b))}

    # Jackknife of the nonlinear ratio: recompute it from leave-one-out means.
    loo_ab = (y_ab.sum() - y_ab) / (n - 1)
    loo_a = (y_a.sum() - y_a) / (n - 1)
    loo_b = (y_b.sum() - y_b) / (n - 1)
    theta = np.array([
        _ratio_stat(loo_ab[i], loo_a[i], loo_b[i])[2] for i in range(n)
    ])
    se_s = float(np.sqrt((n - 1) / n * np.sum((theta - theta.mean()) ** 2)))

    ok_a = means["a"] > snr_guard * ses["a"]
    ok_b = means["b"] > snr_guard * ses["b"]
    s_a, s_b, _ = _ratio_stat(means["ab"], means["a"], means["b"])
    candidates = [v for v, ok in ((s_a, ok_a), (s_b, ok_b)) if ok]
    reliable = bool(candidates)
    s = max(candidates) if candidates else 0.0
    return OverlapEstimate(
        overlap_ab=float(means["ab"]), overlap_a=float(means["a"]),
        overlap_b=float(means["b"]), se_ab=ses["ab"], se_a=ses["a"], se_b=ses["b"],
        s_a=s_a, s_b=s_b, s=float(s), se_s=se_s, reliable=reliable, n_settings=n,
    )


def estimate_self_overlaps(records, cfg: ProtocolConfig, which: str = "rho",
                           snr_guard: float = 10.0) -> OverlapEstimate:
    """Purity-type estimate Tr[rho_X^2] from a single state's records.

    Shot mode pairs only distinct shots of the same record (the diagonal
    of the naive product is biased by the multinomial variance).
    """
    if which not in ("rho", "sigma"):
        raise ValueError("which must be 'rho' or 'sigma'")
    if len(records) < 2:
        raise ValueError("estimation needs at least two settings")

    w_ab = _hamming_weight_matrix(cfg.local_dim, cfg.m + cfg.n)
    w_a = _hamming_weight_matrix(cfg.local_dim, cfg.m)
    w_b = _hamming_weight_matrix(cfg.local_dim, cfg.n)
    d_total = cfg.d_a * cfg.d_b

    ys = {"ab": [], "a": [], "b": []}
    for rec in records:
        probs = rec.rho_probs if which == "rho" else rec.sigma_probs
        counts = rec.rho_counts if which == "rho" else rec.sigma_counts
        if probs is not None:
            f = np.asarray(probs, dtype=float)
            fa = f.reshape(cfg.d_a, cfg.d_b).sum(axis=1)
            fb = f.reshape(cfg.d_a, cfg.d_b).sum(axis=0)
            ys["ab"].append(d_total * f @ w_ab @ f)
            ys["a"].append(cfg.d_a * fa @ w_a @ fa)
            ys["b"].append(cfg.d_b * fb @ w_b @ fb)
        else:
            c = np.asarray(counts, dtype=float)
            shots = c.sum()
            if shots < 2:
                raise ValueError("within-state estimation needs >= 2 shots")
            ca = c.reshape(cfg.d_a, cfg.d_b).sum(axis=1)
            cb = c.reshape(cfg.d_a, cfg.d_b).sum(axis=0)
            norm = shots * (shots - 1)
            # distinct-pair U-statistic; the diagonal weight is always 1
            ys["ab"].append(d_total * (c @ w_ab @ c - shots) / norm)
            ys["a"].append(cfg.d_a * (ca @ w_a @ ca - shots) / norm)
            ys["b"].append(cfg.d_b * (cb @ w_b @ cb - shots) / norm)

    y_ab, y_a, y_b = (np.asarray(ys[k]) for k in ("ab", "a", "b"))
    n = len(records)
    mean_ab, mean_a, mean_b = y_ab.mean(), y_a.mean(), y_b.mean()
    se_ab, se_a, se_b = (_jackknife_se_mean(v) for v in (y_ab, y_a, y_b))
    loo_ab = (y_ab.sum() - y_ab) / (n - 1)
    loo_a = (y_a.sum() - y_a) / (n - 1)
    loo_b = (y_b.sum() - y_b) / (n - 1)
    theta = np.array([
        _ratio_stat(loo_ab[i], loo_a[i], loo_b[i])[2] for i in range(n)
    ])
    se_s = float(np.sqrt((n - 1) / n * np.sum((theta - theta.mean()) ** 2)))
    ok_a = mean_a > snr_guard * se_a
    ok_b = mean_b > snr_guard * se_b
    s_a, s_b, _ = _ratio_stat(mean_ab, mean_a, mean_b)
    candidates = [v for v, ok in ((s_a, ok_a), (s_b, ok_b)) if ok]
    return OverlapEstimate(
        overlap_ab=float(mean_ab), overlap_a=float(mean_a), overlap_b=float(mean_b),
        se_ab=se_ab, se_a=se_a, se_b=se_b, s_a=s_a, s_b=s_b,
        s=float(max(candidates)) if candidates else 0.0, se_s=se_s,
        reliable=bool(candidates), n_settings=n,
    )


@dataclass(frozen=True)
class SwapTestResult:
    estimate: float
    std_error: float
    p_zero: float
    shots: int


def swap_test_overlap(rho: QState, sigma: QState, shots: int,
                      seed: int = 0) -> SwapTestResult:
    """Ancilla-based overlap estimate: P(0) = (1 + Tr[rho sigma]) / 2."""
    if shots < 1:
        raise ValueError("shots must be positive")
    if rho.dim != sigma.dim:
        raise ValueError(f"dimension mismatch: {rho.dim} vs {sigma.dim}")
    overlap = float(np.einsum("ij,ji->", rho.matrix, sigma.matrix).real)
    p_zero = min(1.0, max(0.0, (1.0 + overlap) / 2.0))
    rng = np.random.default_rng(seed)
    zeros = int(rng.binomial(shots, p_zero))
    freq = zeros / shots
    return SwapTestResult(
        estimate=2.0 * freq - 1.0,
        std_error=2.0 * math.sqrt(max(freq * (1.0 - freq), 0.0) / shots),
        p_zero=freq,
        shots=shots,
    )


# ---------------------------------------------------------------------------
# JSON-lines persistence so estimation can be rerun offline.


def _complex_flat(m: np.ndarray) -> list[float]:
    flat = np.asarray(m).ravel()
    out = []
    for z in flat:
        out.extend((float(z.real), float(z.imag)))
    return out


def _complex_unflat(values, side: int) -> np.ndarray:
    arr = np.asarray(values, dtype=float).reshape(-1, 2)
    return (arr[:, 0] + 1j * arr[:, 1]).reshape(side, side)


def write_records(path, cfg: ProtocolConfig, records) -> None:
    """One JSON line for the config, then one line per setting."""
    with open(path, "w") as fh:
        fh.write(json.dumps({"protocol": cfg.to_json()}, sort_keys=True) + "\n")
        for rec in records:
            obj = {
                "setting": rec.setting,
                "unitaries_a": [_complex_flat(u) for u in rec.unitaries_a],
                "unitaries_b": [_complex_flat(u) for u in rec.unitaries_b],
            }
            if rec.rho_probs is not None:
                obj["rho_probs"] = [float(v) for v in rec.rho_probs]
                obj["sigma_probs"] = [float(v) for v in rec.sigma_probs]
            else:
                obj["rho_counts"] = {
                    str(i): int(c) for i, c in enumerate(rec.rho_counts) if c
                }
                obj["sigma_counts"] = {
                    str(i): int(c) for i, c in enumerate(rec.sigma_counts) if c
                }
            fh.write(json.dumps(obj, sort_keys=True) + "\n")


def read_records(path) -> tuple[ProtocolConfig, list[MeasurementRecord]]:
    with open(path) as fh:
        header = json.loads(fh.readline())
        cfg = ProtocolConfig.from_json(header["protocol"])
        total = cfg.local_dim ** (cfg.m + cfg.n)
        records = []
        for line in fh:
            obj = json.loads(line)
            ua = tuple(_complex_unflat(u, cfg.local_dim) for u in obj["unitaries_a"])
            ub = tuple(_complex_unflat(u, cfg.local_dim) for u in obj["unitaries_b"])
            if "rho_probs" in obj:
                records.append(MeasurementRecord(
                    setting=int(obj["setting"]), unitaries_a=ua, unitaries_b=ub,
                    rho_probs=np.asarray(obj["rho_probs"], dtype=float),
                    sigma_probs=np.asarray(obj["sigma_probs"], dtype=float),
                ))
            else:
                c_rho = np.zeros(total, dtype=np.int64)
                for k, v in obj["rho_counts"].items():
                    c_rho[int(k)] = int(v)
                c_sigma = np.zeros(total, dtype=np.int64)
                for k, v in obj["sigma_counts"].items():
                    c_sigma[int(k)] = int(v)
                records.append(MeasurementRecord(
                    setting=int(obj["setting"]), unitaries_a=ua, unitaries_b=ub,
                    rho_counts=c_rho, sigma_counts=c_sigma,
                ))
    return cfg, records

"""Command-line harness: figure-data scans, the measurement pipeline, and
the worked-example checks, all emitting deterministic CSV/JSON.

Every output file starts with a comment line recording the full
configuration and seed, so a rerun with identical flags is byte-identical.
Exit codes: 0 success, 1 assertion failure in ``examples``, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from ._scan import bisect_root, golden_section_max, maximize_unimodal
from .criteria import (
    corner_delta,
    corner_fbc_psi_boundary,
    corner_isotropic_closed_forms,
    fbc_spectrum_bound,
    overlap_ratio,
    sn_bound_from_ratio,
)
from .multipartite import lambda_map_value, lambda_map_verdict, multipartite_ipc
from .qmat import QState, hs_inner
from .randomized import ProtocolConfig, estimate_overlaps, run_protocol, write_records
from .states import (
    StateSpec,
    build_density,
    ghz_noisy,
    ghz_pure,
    isotropic,
    sn3_probe_state,
    sn3_unfaithful_state,
)


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def _write_csv(path, columns, rows, config) -> None:
    lines = ["# config: " + json.dumps(config, sort_keys=True)]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def _write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n")


# ---------------------------------------------------------------------------
# fig1: detection region for isotropic pairs


def cmd_fig1(d: int, grid: int, r_max: int, out: str, seed: int = 0) -> int:
    """Scan the overlap ratio of isotropic pairs over the fidelity square."""
    if d < 2:
        raise ValueError("d must be >= 2")
    if grid < 2:
        raise ValueError("grid must be >= 2")
    r_cap = r_max if r_max >= 1 else d
    xs = np.linspace(1.0 / d**2, 1.0, grid)
    states = {float(x): isotropic(d, float(x)) for x in xs}
    rows = []
    for x in xs:
        for y in xs:
            s = overlap_ratio(states[float(x)], states[float(y)]).s
            detected = max(0, sn_bound_from_ratio(s) - 1)
            rows.append((float(x), float(y), s, min(detected, r_cap)))
    config = {"command": "fig1", "d": d, "grid": grid, "r_max": r_cap, "seed": seed}
    _write_csv(out, ["x", "y", "s_value", "max_r_detected"], rows, config)
    return 0


# ---------------------------------------------------------------------------
# fig3: detection bands and criteria boundaries for the corner family


def _corner_best_ratio(d: int, x: float, pre_scan: int = 33):
    """max over y of the overlap ratio against the tilted probe family.

    The probe is pure and diagonal in the computational Schmidt basis, so
    the ratio reduces to scalar arithmetic on the diagonal data.
    """
    m_noise = (1.0 - x) / (d - 1) ** 2
    diag_a_bulk = (1.0 - x) / (d - 1) + x / d  # first d-1 entries of rho_A
    diag_a_last = x / d

    def ratio(y: float) -> float:
        c2 = max(0.0, 1.0 - (d - 1) * y * y)
        amp = (d - 1) * y + math.sqrt(c2)
        g = m_noise * (d - 1) * y * y + (x / d) * amp * amp
        local = diag_a_bulk * (d - 1) * y * y + diag_a_last * c2
        return g / local if local > 0 else 0.0

    return maximize_unimodal(ratio, 0.0, 1.0 / math.sqrt(d - 1), tol=1e-10,
                             pre_scan=pre_scan)


def cmd_fig3(d_min: int, d_max: int, r_max: int, grid: int, out: str,
             seed: int = 0) -> int:
    """Emit the (d, r) detection bands (panel a) and per-d criterion
    boundaries (panel b) for the corner-isotropic family, as two CSVs."""
    if d_min < 3:
        raise ValueError("the corner family needs d >= 3")
    config = {
        "command": "fig3", "d_min": d_min, "d_max": d_max, "r_max": r_max,
        "grid": grid, "seed": seed,
    }
    rows_a = []
    for d in range(d_min, d_max + 1):
        for r in range(1, min(r_max, d - 1) + 1):
            def excess(x):
                return _corner_best_ratio(d, x, pre_scan=grid)[1] - r

            x_lo_domain, x_hi_domain = 1e-8, 1.0
            if excess(x_hi_domain) < 0:
                continue
            if excess(x_lo_domain) >= 0:
                x_lower = 0.0
            else:
                x_lower = bisect_root(excess, x_lo_domain, x_hi_domain, tol=1e-8)

            def spectrum_gap(x):
                return corner_delta(d, x) - r / d

            if spectrum_gap(1.0) <= 0:
                x_upper = 1.0
            elif spectrum_gap(0.0) >= 0:
                x_upper = 0.0
            else:
                x_upper = bisect_root(spectrum_gap, 0.0, 1.0, tol=1e-8)
            rows_a.append((d, r, x_lower, x_upper))
    path_a = out + ".a.csv"
    _write_csv(path_a, ["d", "r", "x_ratio_boundary", "x_unfaithful_boundary"],
               rows_a, config)

    rows_b = []
    for d in range(d_min, d_max + 1):
        def p3_gap(x):
            return corner_isotropic_closed_forms(d, x)["p2sq_minus_p3"]

        def pc_gap(x):
            f = corner_isotropic_closed_forms(d, x)
            return f["purity_global"] - f["purity_local"]

        x_p3 = bisect_root(p3_gap, 1e-12, 1.0, tol=1e-10)
        x_pc = bisect_root(pc_gap, 1e-12, 1.0, tol=1e-10)
        rows_b.append((d, 0.0, x_p3, corner_fbc_psi_boundary(d, 1), x_pc))
    path_b = out + ".b.csv"
    _write_csv(path_b,
               ["d", "x_ipc_boundary", "x_p3ppt_boundary", "x_fbc_boundary",
                "x_pc_boundary"],
               rows_b, config)
    return 0


# ---------------------------------------------------------------------------
# rfbc-tightness: witness boundary vs spectrum boundary


def cmd_rfbc_tightness(d_min: int, d_max: int, r_max: int, out: str,
                       seed: int = 0) -> int:
    """Both detectability boundaries of rank-r fidelity witnesses per (d, r).

    The witness curve is where the particular maximally entangled witness
    starts detecting; the spectrum curve is where detection by any witness
    becomes possible at all.  Emitted only for r <= d.
    """
    if d_min < 3:
        raise ValueError("the corner family needs d >= 3")
    rows = []
    for d in range(d_min, d_max + 1):
        for r in range(1, min(r_max, d) + 1):
            x_witness = corner_fbc_psi_boundary(d, r)

            def spectrum_gap(x):
                return corner_delta(d, x) - r / d

            if spectrum_gap(1.0) <= 0:
                x_spectrum = 1.0
            else:
                x_spectrum = bisect_root(spectrum_gap, 0.0, 1.0, tol=1e-8)
            rows.append((d, r, x_spectrum, x_witness))
    config = {"command": "rfbc-tightness", "d_min": d_min, "d_max": d_max,
              "r_max": r_max, "seed": seed}
    _write_csv(out, ["d", "r", "x_spectrum_boundary", "x_witness_boundary"],
               rows, config)
    return 0


# ---------------------------------------------------------------------------
# rm-experiment: full measurement pipeline


def cmd_rm_experiment(config_path: str, out: str, settings: int | None = None,
                      shots: int | None = None, exact: bool = False,
                      seed: int | None = None) -> int:
    """Build both states, run the protocol, estimate, and certify."""
    cfg_obj = json.loads(Path(config_path).read_text())
    rho_spec = StateSpec.from_json(cfg_obj["rho"])
    sigma_spec = StateSpec.from_json(cfg_obj["sigma"])
    protocol = ProtocolConfig.from_json(cfg_obj["protocol"])
    overrides = {}
    if settings is not None:
        overrides["n_unitaries"] = settings
    if shots is not None:
        overrides["shots_per_setting"] = shots
    if exact:
        overrides["shots_per_setting"] = None
    if seed is not None:
        overrides["seed"] = seed
    if overrides:
        base = protocol.to_json()
        base.update(
            {k: ("exact" if v is None and k == "shots_per_setting" else v)
             for k, v in overrides.items()}
        )
        protocol = ProtocolConfig.from_json(base)

    rho = build_density(rho_spec)
    sigma = build_density(sigma_spec)
    records = run_protocol(rho, sigma, protocol)
    estimate = estimate_overlaps(records, protocol)

    records_path = out + ".records.jsonl"
    write_records(records_path, protocol, records)

    # ground truth is available because the run is simulated
    grouped_rho = QState((protocol.d_a, protocol.d_b), rho.matrix)
    grouped_sigma = QState((protocol.d_a, protocol.d_b), sigma.matrix)
    exact_ratio = overlap_ratio(grouped_rho, grouped_sigma).s

    bound_point = sn_bound_from_ratio(estimate.s) if estimate.reliable else 1
    bound_2se = (
        sn_bound_from_ratio(estimate.s - 2.0 * estimate.se_s)
        if estimate.reliable
        else 1
    )
    report = {
        "rho": rho_spec.to_json(),
        "sigma": sigma_spec.to_json(),
        "protocol": protocol.to_json(),
        "estimate": estimate.to_json(),
        "sn_bound_point": bound_point,
        "sn_bound_minus_2se": bound_2se,
        "exact_ratio": exact_ratio,
        "records_path": records_path,
    }
    _write_json(out, report)
    return 0


# ---------------------------------------------------------------------------
# examples: the worked examples with their reference numbers


def _example_isotropic(report: dict, failures: list) -> None:
    checks = []
    for d in (2, 3, 4, 6, 10):
        target = isotropic(d, 1.0)
        worst = 0.0
        for x in np.linspace(1.0 / d**2, 1.0, 9):
            s = overlap_ratio(isotropic(d, float(x)), target).s
            worst = max(worst, abs(s - d * float(x)))
        checks.append({"d": d, "max_abs_error": worst, "ok": worst <= 1e-9})
    report["isotropic_pairs"] = checks
    failures.extend(f"isotropic d={c['d']}" for c in checks if not c["ok"])


def _example_sn3(report: dict, failures: list) -> None:
    rho = sn3_unfaithful_state()

    def ratio(t):
        return overlap_ratio(rho, sn3_probe_state(t).projector()).s

    t_best, s_best = golden_section_max(ratio, 0.0, 1.0 / 6.0, tol=1e-12)
    unfaithful = fbc_spectrum_bound(rho, 2)
    bound = sn_bound_from_ratio(s_best)
    entry = {
        "peak_ratio": s_best,
        "peak_parameter": t_best,
        "sn_bound": bound,
        "blocked_for_rank2_witnesses": unfaithful,
        "ok": (
            abs(s_best - 12.0 / 5.0) <= 1e-8
            and abs(t_best - 7.0 / 54.0) <= 1e-6
            and unfaithful
            and bound == 3
        ),
    }
    report["rank2_sn3_state"] = entry
    if not entry["ok"]:
        failures.append("rank2_sn3_state")


def _example_ghz_thresholds(report: dict, failures: list) -> None:
    checks = []
    for n in (3, 4, 5):
        sig = ghz_pure(n, 2).projector()

        def margin(p):
            v = multipartite_ipc(ghz_noisy(n, 2, p), sig)
            return v.global_overlap - v.min_value

        p_star = bisect_root(margin, 1e-6, 0.999, tol=1e-9)
        expect = 1.0 / (2 ** (n - 1) + 1)
        checks.append({
            "n": n, "threshold": p_star, "expected": expect,
            "ok": abs(p_star - expect) <= 1e-6,
        })
    report["ghz_thresholds"] = checks
    failures.extend(f"ghz n={c['n']}" for c in checks if not c["ok"])


def _example_inversion_map(report: dict, failures: list) -> None:
    from .multipartite import apply_lambda_map

    grid_ok = True
    worst = 0.0
    for d in (2, 3, 4):
        sig = ghz_pure(3, d).projector()
        for p in (0.2, 0.6, 0.95):
            rho = ghz_noisy(3, d, p)
            for r in (1, 2, 3):
                closed = lambda_map_value(rho, sig, r)
                explicit = hs_inner(apply_lambda_map(rho, r), sig.matrix)
                worst = max(worst, abs(closed - explicit))
    grid_ok = worst <= 1e-9

    # detection levels on a (d, p) grid; the expected r_op follows from the
    # overlap expansion of the map value (affine in p, increasing in r)
    level_checks = []
    for d in (2, 3, 4):
        sig = ghz_pure(3, d).projector()
        for p in (0.8, 0.9, 0.95, 0.99):
            rho = ghz_noisy(3, d, p)
            verdict = lambda_map_verdict(rho, sig, 1)
            boundary = (d + 1) * (p * d * d + (1 - p)) / (
                2 * p * d * d + (1 - p) * d * (d + 1)
            )
            expected = max(0, math.ceil(boundary - 1e-12) - 1)
            level_checks.append({
                "d": d, "p": p, "r_op": verdict.r_op, "expected": expected,
                "ok": verdict.r_op == expected,
            })
    report["inversion_map"] = {
        "closed_vs_explicit_max_error": worst,
        "closed_vs_explicit_ok": grid_ok,
        "levels": level_checks,
    }
    if not grid_ok:
        failures.append("inversion_map closed-vs-explicit")
    failures.extend(
        f"inversion_map d={c['d']} p={c['p']}" for c in level_checks if not c["ok"]
    )


def cmd_examples(out: str, seed: int = 0) -> int:
    """Run every worked example and compare against its reference numbers."""
    report: dict = {"seed": seed}
    failures: list[str] = []
    _example_isotropic(report, failures)
    _example_sn3(report, failures)
    _example_ghz_thresholds(report, failures)
    _example_inversion_map(report, failures)
    report["failures"] = failures
    report["ok"] = not failures
    _write_json(out, report)
    if failures:
        print("FAILED checks: " + ", ".join(failures), file=sys.stderr)
        return 1
    return 0


# ---------------------------------------------------------------------------
# argument parsing


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="overlapcert",
        description="Overlap-ratio certification scans and experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p1 = sub.add_parser(
        "fig1",
        help="isotropic-pair detection scan",
        description="CSV columns: x, y (fidelities of the two isotropic "
        "states), s_value (overlap ratio), max_r_detected (largest r whose "
        "inequality is violated, capped at --r-max).",
    )
    p1.add_argument("--d", type=int, required=True, help="local dimension")
    p1.add_argument("--grid", type=int, default=20, help="grid points per axis")
    p1.add_argument("--r-max", type=int, default=0,
                    help="cap for the reported detection level (default d)")
    p1.add_argument("--out", required=True, help="output CSV path")
    p1.add_argument("--seed", type=int, default=0)

    p3 = sub.add_parser(
        "fig3",
        help="corner-family bands and criterion boundaries",
        description="Writes OUT.a.csv (columns d, r, x_ratio_boundary, "
        "x_unfaithful_boundary: the band where the ratio certifies r+1 while "
        "no rank-r fidelity witness can) and OUT.b.csv (columns d, "
        "x_ipc_boundary, x_p3ppt_boundary, x_fbc_boundary, x_pc_boundary: "
        "smallest x detected by each criterion).",
    )
    p3.add_argument("--d-min", type=int, default=3)
    p3.add_argument("--d-max", type=int, default=10)
    p3.add_argument("--r-max", type=int, default=5)
    p3.add_argument("--grid", type=int, default=33,
                    help="pre-scan resolution for the probe maximization")
    p3.add_argument("--out", required=True, help="output path prefix")
    p3.add_argument("--seed", type=int, default=0)

    pt = sub.add_parser(
        "rfbc-tightness",
        help="witness vs spectrum boundaries per (d, r)",
        description="CSV columns: d, r, x_spectrum_boundary (below it no "
        "rank-r fidelity witness detects), x_witness_boundary (above it the "
        "maximally entangled witness detects).",
    )
    pt.add_argument("--d-min", type=int, default=3)
    pt.add_argument("--d-max", type=int, default=10)
    pt.add_argument("--r-max", type=int, default=4)
    pt.add_argument("--out", required=True)
    pt.add_argument("--seed", type=int, default=0)

    pr = sub.add_parser(
        "rm-experiment",
        help="randomized-measurement pipeline end to end",
        description="Reads a JSON config {rho, sigma, protocol}, simulates "
        "the protocol, writes OUT (JSON report with estimates, standard "
        "errors and certified bounds) and OUT.records.jsonl.",
    )
    pr.add_argument("--config", required=True, help="JSON config path")
    pr.add_argument("--out", required=True, help="output report path")
    pr.add_argument("--settings", type=int, default=None,
                    help="override number of settings")
    pr.add_argument("--shots", type=int, default=None,
                    help="override shots per setting")
    pr.add_argument("--exact", action="store_true",
                    help="force exact outcome probabilities")
    pr.add_argument("--seed", type=int, default=None, help="override seed")

    pe = sub.add_parser(
        "examples",
        help="run the worked examples against their reference values",
        description="Writes a JSON report; exits 1 if any reference number "
        "is missed beyond tolerance.",
    )
    pe.add_argument("--out", required=True)
    pe.add_argument("--seed", type=int, default=0)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "fig1":
        return cmd_fig1(args.d, args.grid, args.r_max, args.out, args.seed)
    if args.command == "fig3":
        return cmd_fig3(args.d_min, args.d_max, args.r_max, args.grid,
                        args.out, args.seed)
    if args.command == "rfbc-tightness":
        return cmd_rfbc_tightness(args.d_min, args.d_max, args.r_max,
                                  args.out, args.seed)
    if args.command == "rm-experiment":
        return cmd_rm_experiment(args.config, args.out, args.settings,
                                 args.shots, args.exact, args.seed)
    if args.command == "examples":
        return cmd_examples(args.out, args.seed)
    raise AssertionError(f"unhandled command {args.command}")


if __name__ == "__main__":
    sys.exit(main())

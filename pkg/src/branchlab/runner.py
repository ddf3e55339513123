"""Scenario dispatch and deterministic result files.

Every command yields a :class:`ResultBundle`: CSV rows under a fixed
header, a JSON payload, and optionally an SVG plot and a text transcript.
Rationals are written as ``"p/q"`` strings; a float only ever appears in a
column whose name ends in ``_float``.
"""
from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import chain, collapse, core, svg, typicality, validity
from .core import format_rational
from .scenario import ScenarioConfig

DEFAULT_EXACT_N_CAP = 4096


def exact_n_cap() -> int:
    """Largest N evaluated in exact arithmetic by the typicality command."""
    raw = os.environ.get("BRANCHLAB_EXACT_N_CAP")
    return int(raw) if raw else DEFAULT_EXACT_N_CAP


@dataclass
class ResultBundle:
    command: str
    header: list[str]
    rows: list[dict]
    payload: dict
    svg: str | None = None
    transcript: str | None = None
    files: dict[str, Path] = field(default_factory=dict)

    def csv_text(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.header)
        for row in self.rows:
            writer.writerow([_cell(row.get(col)) for col in self.header])
        return buf.getvalue()

    def json_text(self) -> str:
        return json.dumps(self.payload, sort_keys=True, indent=2) + "\n"

    def write(self, out_dir: str | os.PathLike) -> dict[str, Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        targets = {"results.csv": self.csv_text(), "results.json": self.json_text()}
        if self.svg is not None:
            targets["plot.svg"] = self.svg
        if self.transcript is not None:
            targets["transcript.txt"] = self.transcript
        for name, text in targets.items():
            path = out / name
            with open(path, "w", newline="", encoding="utf-8") as fh:
                fh.write(text)
            self.files[name] = path
        return self.files


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (tuple, list)):
        return " ".join(_cell(v) for v in value)
    return str(value)


def _rat(x):
    return format_rational(x)


def _rats(xs):
    return [format_rational(x) for x in xs]


def _counts_str(counts) -> str:
    return " ".join(str(int(m)) for m in counts)


# --------------------------------------------------------------------------


def _typicality(cfg: ScenarioConfig, jobs: int) -> ResultBundle:
    dist = cfg.dist
    cap_N = exact_n_cap()
    exact_Ns = [N for N in cfg.N if N <= cap_N]
    curve = dict(typicality.concentration_curve(dist, cfg.epsilon, exact_Ns, jobs=jobs))
    rows = []
    for N in cfg.N:
        if N in curve:
            report = typicality.weight_in_window(dist, N, cfg.epsilon)
            outside = curve[N]
            rows.append(
                {
                    "N": N,
                    "epsilon": cfg.epsilon,
                    "weight_inside": report.weight_inside,
                    "weight_outside": outside,
                    "weight_outside_float": float(outside),
                    "mode_class": _counts_str(report.mode_class.counts),
                    "approximate": False,
                }
            )
        else:
            approx = typicality.weight_outside_float(dist, N, cfg.epsilon)
            rows.append(
                {
                    "N": N,
                    "epsilon": cfg.epsilon,
                    "weight_inside": None,
                    "weight_outside": None,
                    "weight_outside_float": approx,
                    "mode_class": None,
                    "approximate": True,
                }
            )
    header = ["N", "epsilon", "weight_inside", "weight_outside", "weight_outside_float", "mode_class", "approximate"]
    payload_rows = [
        {
            "N": r["N"],
            "weight_inside": None if r["weight_inside"] is None else _rat(r["weight_inside"]),
            "weight_outside": None if r["weight_outside"] is None else _rat(r["weight_outside"]),
            "weight_outside_float": r["weight_outside_float"],
            "mode_class": r["mode_class"],
            "approximate": r["approximate"],
        }
        for r in rows
    ]
    payload = {"rows": payload_rows, "epsilon": _rat(cfg.epsilon)}
    if cfg.delta is not None:
        found = typicality.min_sample_size(dist, cfg.epsilon, cfg.delta, cfg.n_max)
        payload["min_sample_size"] = (
            {"reached": False, "N_max": found.N_max} if isinstance(found, typicality.NotReached) else {"reached": True, "N": found}
        )
    plot = svg.line_plot(
        [r["N"] for r in rows],
        [r["weight_outside_float"] for r in rows],
        title=f"weight outside |m/N - q| <= {cfg.epsilon}",
        xlabel="N",
        ylabel="weight outside window",
    )
    return ResultBundle("typicality", header, rows, payload, svg=plot)


def _branch_stats(cfg: ScenarioConfig, jobs: int) -> ResultBundle:
    dist = cfg.dist
    rows, summaries = [], []
    for N in cfg.N:
        ens = core.enumerate_classes(dist.n, N).with_distribution(dist)
        weights = ens.weights()
        mults = ens.multiplicities()
        for counts, m, w in zip(ens.counts.tolist(), mults, weights):
            rows.append(
                {"N": N, "counts": _counts_str(counts), "multiplicity": m, "weight": w, "weight_float": float(w)}
            )
        mode = typicality.sharp_max(dist, N)
        summaries.append(
            {
                "N": N,
                "classes": len(ens),
                "multiplicity_sum": sum(mults),
                "weight_sum": _rat(sum(weights, Fraction(0))),
                "mode_class": list(mode.counts),
            }
        )
    header = ["N", "counts", "multiplicity", "weight", "weight_float"]
    payload = {"summaries": summaries, "rows": [{**r, "weight": _rat(r["weight"])} for r in rows]}
    return ResultBundle("branch-stats", header, rows, payload)


def _validity_feasibility(cfg: ScenarioConfig, jobs: int) -> ResultBundle:
    dist = cfg.dist
    rows, results = [], []
    for N in cfg.N:
        found = validity.born_feasibility(dist, N)
        targets = validity.born_targets(dist, N)
        if isinstance(found, validity.Infeasible):
            rows.append({"N": N, "verdict": "infeasible", "targets": _rats(targets), "assignment": None, "average": None})
            results.append({"N": N, "verdict": "infeasible", "targets": _rats(targets), "nodes": found.nodes})
        else:
            avg = validity.weighted_average_counts(found)
            text = "; ".join(f"{_counts_str(c.counts)}:{k}" for c, k in found.valid_counts.items())
            rows.append({"N": N, "verdict": "feasible", "targets": _rats(targets), "assignment": text, "average": avg.to_json()})
            results.append({"N": N, "verdict": "feasible", "targets": _rats(targets), "assignment": found.to_json(), "average": avg.to_json()})
    header = ["N", "verdict", "targets", "assignment", "average"]
    return ResultBundle("validity-feasibility", header, rows, {"results": results})


def _validity_joint(cfg: ScenarioConfig, jobs: int) -> ResultBundle:
    a, b = cfg.dist, cfg.dist_b
    rows, certs = [], []
    for N in cfg.N:
        cert = validity.joint_infeasibility(a, b, N)
        ok = validity.verify_certificate(cert)
        rows.append(
            {
                "N": N,
                "target_A": _rats(cert.target_A),
                "target_B": _rats(cert.target_B),
                "assignment_frequency": _rats(cert.assignment_frequency),
                "coordinate": cert.reason["coordinate"],
                "verified": ok,
            }
        )
        certs.append({"certificate": cert.to_json(), "verified": ok})
    header = ["N", "target_A", "target_B", "assignment_frequency", "coordinate", "verified"]
    return ResultBundle("validity-joint", header, rows, {"certificates": certs})


def _achievable_set(cfg: ScenarioConfig, jobs: int) -> ResultBundle:
    n = cfg.n
    rows = []
    points = []
    header = ["N", "k_cap"] + [f"f_{j}" for j in range(1, n + 1)] + [f"f_{j}_float" for j in range(1, n + 1)]
    if cfg.q is not None:
        header.append("matches_target")
    payload_sets = []
    for N in cfg.N:
        vectors = validity.sorted_vectors(validity.achievable_set(n, N, cfg.k_cap))
        target = validity.born_targets(cfg.dist, N) if cfg.q is not None else None
        for f in vectors:
            row = {"N": N, "k_cap": cfg.k_cap}
            for j, v in enumerate(f.values, start=1):
                row[f"f_{j}"] = v
                row[f"f_{j}_float"] = float(v)
            if target is not None:
                row["matches_target"] = f.values == target
            rows.append(row)
            points.append((N, f, target is not None and f.values == target))
        payload_sets.append(
            {
                "N": N,
                "size": len(vectors),
                "vectors": [f.to_json() for f in vectors],
                "target": None if target is None else _rats(target),
                "target_reachable": None if target is None else any(f.values == target for f in vectors),
            }
        )
    plot = None
    if n >= 2:
        plot = svg.scatter_plot(
            [float(f.values[0]) / N for N, f, _ in points],
            [float(f.values[1]) / N for N, f, _ in points],
            title=f"achievable averaged frequencies, n={n}, k_cap={cfg.k_cap}",
            xlabel="f_1 / N",
            ylabel="f_2 / N",
            highlight=[i for i, p in enumerate(points) if p[2]],
        )
    return ResultBundle("achievable-set", header, rows, {"n": n, "k_cap": cfg.k_cap, "sets": payload_sets}, svg=plot)


def _collapse_sample(cfg: ScenarioConfig, jobs: int) -> ResultBundle:
    dist = cfg.dist
    n = dist.n
    header = ["seed", "N"] + [f"count_{j}" for j in range(1, n + 1)] + [f"freq_{j}" for j in range(1, n + 1)] + ["chi_square_float"]
    rows, runs = [], []
    for N in cfg.N:
        for t in range(cfg.trials):
            seed = (cfg.seed + t) % 2**64
            run = collapse.sample_runs(dist, N, seed)
            counts = run.counts(n)
            freqs = collapse.empirical_frequencies(run, n)
            try:
                chi = collapse.chi_square_statistic(run, dist)
            except collapse.ExpectedCountTooSmall:
                chi = None
            row = {"seed": seed, "N": N, "chi_square_float": chi}
            for j in range(n):
                row[f"count_{j + 1}"] = int(counts[j])
                row[f"freq_{j + 1}"] = freqs[j]
            rows.append(row)
            runs.append(
                {
                    "seed": seed,
                    "N": N,
                    "counts": [int(c) for c in counts],
                    "frequencies": _rats(freqs),
                    "chi_square_float": chi,
                    "outcomes": "".join(str(int(o)) if n < 10 else f"{int(o)}," for o in run.outcomes),
                }
            )
    payload = {"generator": "splitmix64", "runs": runs}
    if n >= 2 and n - 1 in collapse.CHI2_CRITICAL_95:
        payload["chi_square_critical_95_float"] = collapse.CHI2_CRITICAL_95[n - 1]
    return ResultBundle("collapse-sample", header, rows, payload)


def _chain_demo(cfg: ScenarioConfig, jobs: int) -> ResultBundle:
    dist = cfg.dist
    built = chain.build_measurement_chain(dist)
    report = chain.equal_validity_demonstration(dist)
    rows = []
    for stage, state in (("before", built.before), ("split", built.after), ("aware", report.derived)):
        for basis, coef in state.terms.items():
            square = coef * coef
            rows.append(
                {
                    "stage": stage,
                    "system": basis[0].tag,
                    "detector": basis[1].tag,
                    "observer": basis[2].tag,
                    "coefficient": str(coef),
                    "coefficient_squared": square.to_fraction(),
                }
            )
    header = ["stage", "system", "detector", "observer", "coefficient", "coefficient_squared"]
    transcript_lines = ["measurement chain", "before the observer looks:"]
    transcript_lines += ["  " + s for s in built.before.lines()]
    transcript_lines.append("after the observer looks (observer splits):")
    transcript_lines += ["  " + s for s in built.after.lines()]
    transcript_lines.append("")
    transcript_lines += list(report.transcript)
    payload = {
        "before": built.before.to_json(),
        "after": built.after.to_json(),
        "chain_consistent": chain.apply_rule(built.rule, built.before) == built.after,
        "equal_validity": {
            "n_versions": report.n_versions,
            "versions": list(report.versions),
            "aware": list(report.aware),
            "states_equal": report.states_equal,
            "squared_norm": str(report.squared_norm),
            "derived": report.derived.to_json(),
        },
    }
    return ResultBundle("chain-demo", header, rows, payload, transcript="\n".join(transcript_lines) + "\n")


_DISPATCH = {
    "typicality": _typicality,
    "branch-stats": _branch_stats,
    "validity-feasibility": _validity_feasibility,
    "validity-joint": _validity_joint,
    "achievable-set": _achievable_set,
    "collapse-sample": _collapse_sample,
    "chain-demo": _chain_demo,
}


def run_scenario(config: ScenarioConfig, out_dir: str | os.PathLike | None = None, jobs: int = 1) -> ResultBundle:
    """Run one scenario; write its files when ``out_dir`` is given."""
    bundle = _DISPATCH[config.command](config, jobs)
    bundle.payload = {"command": config.command, "scenario": config.to_json(), "version": 1, **bundle.payload}
    if out_dir is not None:
        bundle.write(out_dir)
    return bundle

"""CSV and JSON writers for decompositions, sensitivity reports and samples."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .sensitivity import component_table, total_effects


def fmt(x):
    return format(float(x), ".17g")


def subset_label(u):
    return "{" + ",".join(str(v + 1) for v in u) + "}"


def monomial_label(subset, exps):
    parts = [f"X{v + 1}" + (f"^{p}" if p > 1 else "") for v, p in zip(subset, exps) if p]
    return "*".join(parts) if parts else "1"


def write_components_csv(expansion, path):
    """One row per (component, monomial), constant first."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["subset", "monomial", "exponents", "coefficient"])
        w.writerow(["{}", "1", "", fmt(expansion.constant)])
        for u, poly in component_table(expansion):
            terms = sorted(poly.terms.items(), key=lambda t: (sum(t[0]), tuple(-e for e in t[0])))
            if not terms:
                w.writerow([subset_label(u), "0", "", fmt(0.0)])
            for exps, c in terms:
                w.writerow([subset_label(u), monomial_label(u, exps),
                            " ".join(str(e) for e in exps), fmt(c)])


def write_indices_csv(report, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["subset", "S_uv", "S_uc", "S_u"])
        for u in sorted(report.triplets, key=lambda u: (len(u), u)):
            w.writerow([subset_label(u)] + [fmt(x) for x in report.triplets[u]])
        w.writerow(["sum"] + [fmt(x) for x in report.column_sums()])


def write_effects_csv(report, path):
    te = total_effects(report)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["variable", "total_effect", "rank", "tied"])
        for i, (v, r, t) in enumerate(zip(te.values, te.ranks, te.tied)):
            w.writerow([f"X{i + 1}", fmt(v), int(r), "yes" if t else "no"])


def report_to_dict(report, dims=None, selection=None):
    te = total_effects(report)
    out = {
        "mean": report.mean,
        "variance": report.variance,
        "variance_sum": report.ledger.variance_sum,
        "covariance_sum": report.ledger.covariance_sum,
        "truncation": {"S": report.truncation[0], "m": report.truncation[1]},
        "indices": [
            {"subset": [v + 1 for v in u], "S_uv": t[0], "S_uc": t[1], "S_u": t[2]}
            for u, t in sorted(report.triplets.items(), key=lambda kv: (len(kv[0]), kv[0]))
        ],
        "column_sums": dict(zip(("S_uv", "S_uc", "S_u"), report.column_sums())),
        "total_effects": [
            {"variable": i + 1, "value": float(v), "rank": int(r), "tied": bool(t)}
            for i, (v, r, t) in enumerate(zip(te.values, te.ranks, te.tied))
        ],
    }
    if dims is not None:
        out["effective_dimensions"] = {
            "p": dims.p,
            "superposition": dims.superposition,
            "truncation": dims.truncation,
            "superposition_saturated": dims.superposition_saturated,
            "truncation_saturated": dims.truncation_saturated,
        }
    if selection is not None:
        out["adaptive"] = {
            "eps1": selection.eps1,
            "eps2": selection.eps2,
            "retained": [{"subset": [v + 1 for v in u], "order": m}
                         for u, m in sorted(selection.retained.items(),
                                            key=lambda kv: (len(kv[0]), kv[0]))],
        }
    return out


def write_json(data, path):
    with open(path, "w") as fh:
        json.dump(data, fh, indent=1)
        fh.write("\n")


def write_samples_csv(points, values, path):
    points = np.asarray(points)
    N = points.shape[1] if points.ndim == 2 else 0
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"x{i + 1}" for i in range(N)] + ["y"])
        for p, y in zip(points, values):
            w.writerow([fmt(v) for v in p] + [fmt(y)])


def sample_summary(values, bins):
    values = np.asarray(values, dtype=float)
    k = len(values)
    out = {"count": k}
    if k == 0:
        return out
    var = float(values.var(ddof=1)) if k > 1 else 0.0
    counts, edges = np.histogram(values, bins=bins)
    out.update({
        "mean": float(values.mean()),
        "std": var ** 0.5,
        "variance": var,
        "stderr_mean": (var / k) ** 0.5,
        "min": float(values.min()),
        "max": float(values.max()),
        "histogram": {"edges": edges.tolist(), "counts": counts.tolist()},
    })
    return out


def ensure_dir(path):
    p = Path(path)
    p.mkdir(parents=True, exist_ok=True)
    return p

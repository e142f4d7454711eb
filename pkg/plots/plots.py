#!/usr/bin/env python3
"""Regenerate figures from sphcap experiment outputs.

Reads a small figure-spec JSON and renders one PNG from the CSV/JSON files
written by ``sphcap experiment``:

    {"kind": "hist_overlay",
     "input": "pooled.csv",        # per-sample CSV (trial,statistic,value)
     "summary": "pooled.json",     # matching summary with a --emit-curve table
     "output": "hole_hist.png"}

    {"kind": "convergence",
     "series": [{"csv": "p2.csv", "summary": "p2_n1000.json", "label": "p=2"}],
     "output": "moments.png"}

Every analytic overlay and reference line comes out of the JSON summaries —
curve tables and reference values the experiment subcommand emitted — so no
formula is duplicated here.  Rendering is deterministic: identical input
files give byte-identical PNGs (no timestamps are embedded).

Exit codes follow the sphcap CLI: 0 success, 1 usage error, 2 data error.
"""

import argparse
import csv
import json
import math
import sys

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

FORMAT_VERSION = 1
KINDS = ("hist_overlay", "convergence", "cdf_compare", "separation_hist")

_SAMPLE_HEADER = ["trial", "statistic", "value"]
_SERIES_HEADER = ["n", "mean", "stderr"]


class SpecError(ValueError):
    """Figure spec is malformed (usage error)."""


class DataError(ValueError):
    """Input CSV/JSON is missing, malformed, or inconsistent."""


# ---------------------------------------------------------------- input readers

def _read_rows(path, header):
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            got = next(reader, None)
            if got != header:
                raise DataError(f"{path}: expected header {','.join(header)!r}, got {got}")
            rows = list(reader)
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise DataError(f"{path}: no data rows")
    return rows


def read_samples(path) -> np.ndarray:
    """Per-sample values from an experiment CSV."""
    rows = _read_rows(path, _SAMPLE_HEADER)
    try:
        return np.array([float(r[2]) for r in rows])
    except (IndexError, ValueError) as exc:
        raise DataError(f"{path}: malformed row: {exc}") from exc


def read_series(path):
    """(n, mean, stderr) arrays from a collated convergence CSV."""
    rows = _read_rows(path, _SERIES_HEADER)
    try:
        n = np.array([int(r[0]) for r in rows])
        mean = np.array([float(r[1]) for r in rows])
        err = np.array([float(r[2]) for r in rows])
    except (IndexError, ValueError) as exc:
        raise DataError(f"{path}: malformed row: {exc}") from exc
    return n, mean, err


def read_summary(path) -> dict:
    try:
        with open(path) as fh:
            payload = json.load(fh)
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: not valid JSON: {exc}") from exc
    version = payload.get("format_version")
    if version != FORMAT_VERSION:
        raise DataError(f"{path}: format_version {version!r}, tool expects {FORMAT_VERSION}")
    return payload


def _curve(summary: dict, path: str, want_id: str) -> dict:
    curve = summary.get("curve")
    if curve is None:
        raise DataError(
            f"{path}: no curve table; rerun the experiment with --emit-curve"
        )
    if curve.get("id") != want_id:
        raise DataError(f"{path}: curve id {curve.get('id')!r}, figure needs {want_id!r}")
    return curve


# ---------------------------------------------------------------- figure kinds

def _hist_with_overlay(spec: dict, want_id: str, xlabel: str):
    samples = read_samples(spec["input"])
    summary = read_summary(spec["summary"])
    curve = _curve(summary, spec["summary"], want_id)

    edges = np.histogram_bin_edges(samples, bins="fd")
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.hist(samples, bins=edges, density=True, color="#9ecae1",
            edgecolor="white", linewidth=0.3, label="samples")

    x = np.asarray(curve["x"], dtype=float)
    pdf = np.asarray(curve["pdf"], dtype=float)
    keep = (x >= samples.min()) & (x <= samples.max())
    ax.plot(x[keep], pdf[keep], color="#d62728", lw=1.8, label="limit density")

    cfg = summary.get("config", {})
    ax.set_xlabel(xlabel.format(**curve.get("params", {})))
    ax.set_ylabel("density")
    ax.set_title(spec.get("title", f"N = {cfg.get('n', '?')}, {cfg.get('trials', '?')} trials"))
    ax.legend(frameon=False)

    manifest = {
        "kind": spec["kind"],
        "bins": int(edges.size - 1),
        "bin_width": float(edges[1] - edges[0]),
        "overlay_mass": float(np.trapezoid(pdf[keep], x[keep])),
        "overlay_peak_x": float(x[keep][np.argmax(pdf[keep])]),
        "sample_range": [float(samples.min()), float(samples.max())],
    }
    return fig, manifest


def hist_overlay(spec: dict):
    return _hist_with_overlay(spec, "hole_radius_cdf",
                              "scaled hole radius  $N^{{1/{d}}}\\rho$")


def separation_hist(spec: dict):
    return _hist_with_overlay(spec, "separation_limit_cdf",
                              "scaled separation  $N^{{2/{d}}}\\theta_{{\\min}}$")


def cdf_compare(spec: dict):
    samples = np.sort(read_samples(spec["input"]))
    summary = read_summary(spec["summary"])
    curve = summary.get("curve")
    if curve is None:
        raise DataError(f"{spec['summary']}: no curve table; rerun with --emit-curve")

    x = np.asarray(curve["x"], dtype=float)
    ref = np.asarray(curve["cdf"], dtype=float)
    emp = np.arange(1, samples.size + 1) / samples.size

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.step(samples, emp, where="post", color="#1f77b4", lw=1.0, label="empirical")
    ax.plot(x, ref, color="#d62728", lw=1.5, ls="--", label="limit")
    ax.set_xlim(0.0, samples[-1] * 1.05)
    ax.set_xlabel("scaled statistic")
    ax.set_ylabel("CDF")
    ax.set_title(spec.get("title", curve.get("id", "")))
    ax.legend(frameon=False)

    ref_at_samples = np.interp(samples, x, ref)
    sup_gap = float(np.max(np.abs(emp - ref_at_samples)))
    return fig, {"kind": "cdf_compare", "sup_gap": sup_gap, "n_samples": int(samples.size)}


def convergence(spec: dict):
    series = spec.get("series")
    if not isinstance(series, list) or not series:
        raise SpecError("convergence spec needs a non-empty 'series' list")

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    rows_out = []
    for i, entry in enumerate(series):
        for key in ("csv", "summary"):
            if key not in entry:
                raise SpecError(f"series entry {i} is missing {key!r}")
        n, mean, err = read_series(entry["csv"])
        summary = read_summary(entry["summary"])
        ref = summary.get("reference", {})
        if ref.get("id") != "scaled_moment_constant":
            raise DataError(
                f"{entry['summary']}: reference id {ref.get('id')!r}; "
                "convergence figures need a moment-experiment summary"
            )
        # scaling convention travels with the data: mean / n^scale_exponent
        expo = float(ref["params"]["scale_exponent"])
        scaled = mean / n.astype(float) ** expo
        scaled_err = err / n.astype(float) ** expo

        color = f"C{i}"
        label = entry.get("label", f"p={ref['params'].get('p')}")
        ax.errorbar(n, scaled, yerr=scaled_err, marker="o", ms=4.0, lw=1.0,
                    capsize=2.5, color=color, label=label)
        ax.axhline(float(ref["value"]), ls="--", lw=1.0, color=color)
        rows_out.append({
            "label": label,
            "n": n.tolist(),
            "scaled_mean": scaled.tolist(),
            "scaled_stderr": scaled_err.tolist(),
            "reference_y": float(ref["value"]),
        })

    ax.set_xscale("log")
    ax.set_xlabel("N")
    ax.set_ylabel("scaled moment")
    ax.set_title(spec.get("title", "scaled hole-radius moments"))
    ax.legend(frameon=False)
    return fig, {"kind": "convergence", "series": rows_out}


_BUILDERS = {
    "hist_overlay": hist_overlay,
    "convergence": convergence,
    "cdf_compare": cdf_compare,
    "separation_hist": separation_hist,
}


# ---------------------------------------------------------------- entry points

def load_spec(path) -> dict:
    try:
        with open(path) as fh:
            spec = json.load(fh)
    except OSError as exc:
        raise SpecError(f"cannot read spec {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}: not valid JSON: {exc}") from exc
    kind = spec.get("kind")
    if kind not in KINDS:
        raise SpecError(f"unknown kind {kind!r}; valid kinds: {', '.join(KINDS)}")
    if "output" not in spec:
        raise SpecError("spec is missing 'output'")
    if kind != "convergence":
        for key in ("input", "summary"):
            if key not in spec:
                raise SpecError(f"{kind} spec is missing {key!r}")
    return spec


def build_figure(spec: dict):
    """Figure plus a manifest of the rendered values; writes nothing."""
    return _BUILDERS[spec["kind"]](spec)


def save_figure(fig, path) -> None:
    # Software tEXt chunk is the only non-content PNG metadata matplotlib
    # writes; dropping it keeps regenerated files byte-identical
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="plots.py", description=__doc__.split("\n")[0])
    parser.add_argument("--spec", required=True, help="figure spec JSON")
    args = parser.parse_args(argv)

    try:
        spec = load_spec(args.spec)
        fig, manifest = build_figure(spec)
    except SpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    save_figure(fig, spec["output"])
    print(json.dumps({"output": spec["output"], "manifest": manifest}))
    return 0


if __name__ == "__main__":
    sys.exit(main())

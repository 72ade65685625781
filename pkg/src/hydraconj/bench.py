"""Experiment harness: growth curves, distortion data, conjugator-length and
runtime scaling.  CSV files are the contract; figures are optional artifacts
rendered next to them.
"""

from __future__ import annotations

import csv
import math
import random
import time
from dataclasses import dataclass
from pathlib import Path

from .words import Word, S
from .automorphism import apply_phi_power, letter_image_length
from .engine import decide_conjugacy

GROWTH_HEADER = ["i", "r", "exact_length", "binomial_length", "ratio_to_power"]
DISTORTION_HEADER = ["i", "k", "a_length", "h_word_length"]
CL_HEADER = ["n", "sample", "input_len", "witness_len", "method", "runtime_ms", "verified"]
RT_HEADER = ["n", "samples", "median_ms"]


def run_growth(m: int, i_set: list[int], r_max: int) -> tuple[list[list], list[list]]:
    """Growth rows (i, r, |phi^r(a_i)|, binomial prediction, ratio to |r|^(i-1))
    and the sharp distortion family g = phi^k(a_i^k) with |g|_H <= 3k."""
    rows = []
    for i in sorted(i_set):
        for r in range(-r_max, r_max + 1):
            exact = len(apply_phi_power((i,), r))
            predicted = letter_image_length(i, r)
            ratio = exact / (abs(r) ** (i - 1)) if r != 0 and i > 1 else float(exact)
            rows.append([i, r, exact, predicted, round(ratio, 6)])
    distortion = []
    for i in sorted(i_set):
        for k in range(1, r_max + 1):
            g = apply_phi_power((i,) * k, k)
            distortion.append([i, k, len(g), 3 * k])
    return rows, distortion


def _random_reduced(rng: random.Random, m: int, length: int, with_s: bool = True) -> Word:
    letters = [i for i in range(1, m + 1)] + [-i for i in range(1, m + 1)]
    if with_s:
        letters += [S, -S]
    out: list[int] = []
    while len(out) < length:
        x = rng.choice(letters)
        if out and out[-1] == -x:
            continue
        out.append(x)
    return tuple(out)


def sample_conjugate_pair(rng: random.Random, m: int, n: int) -> tuple[Word, Word]:
    """(u, w^-1 u w) with total input length roughly n."""
    lu = max(1, (2 * n) // 5)
    lw = max(1, n // 5)
    u = _random_reduced(rng, m, lu)
    w = _random_reduced(rng, m, lw)
    v = tuple(-x for x in reversed(w)) + u + w
    return u, v


def run_cl_experiment(
    m: int, n_set: list[int], samples: int, seed: int = 0
) -> tuple[list[list], dict]:
    """Witness-length scaling on constructed conjugate pairs."""
    rng = random.Random(seed)
    rows = []
    for n in sorted(n_set):
        for idx in range(samples):
            u, v = sample_conjugate_pair(rng, m, n)
            t0 = time.perf_counter()
            cert = decide_conjugacy(u, v, m)
            dt = (time.perf_counter() - t0) * 1000.0
            witness_len = len(cert.witness) if cert.witness is not None else -1
            rows.append(
                [
                    n,
                    idx,
                    len(u) + len(v),
                    witness_len,
                    cert.method or "",
                    round(dt, 3),
                    cert.verified,
                ]
            )
    summary = {
        "witness_slope": round(_ls_slope(
            [(r[0], r[3]) for r in rows if r[3] >= 0]
        ), 2),
        "runtime_loglog_slope": round(_ls_slope(
            [
                (math.log(r[0]), math.log(max(r[5], 1e-3)))
                for r in rows
                if r[3] >= 0
            ]
        ), 2),
        "seed": seed,
    }
    return rows, summary


def run_rt_experiment(
    m: int, n_set: list[int], samples: int, seed: int = 0
) -> tuple[list[list], dict]:
    """Median decision time per input scale; slope measured log-log."""
    rng = random.Random(seed)
    rows = []
    medians = []
    for n in sorted(n_set):
        times = []
        for _ in range(samples):
            u, v = sample_conjugate_pair(rng, m, n)
            t0 = time.perf_counter()
            decide_conjugacy(u, v, m)
            times.append((time.perf_counter() - t0) * 1000.0)
        times.sort()
        med = times[len(times) // 2]
        medians.append((n, med))
        rows.append([n, samples, round(med, 3)])
    slope = _ls_slope([(math.log(n), math.log(max(t, 1e-3))) for n, t in medians])
    return rows, {"loglog_slope": round(slope, 2), "seed": seed}


def _ls_slope(points: list[tuple[float, float]]) -> float:
    if len(points) < 2:
        return float("nan")
    n = len(points)
    sx = sum(p[0] for p in points)
    sy = sum(p[1] for p in points)
    sxx = sum(p[0] * p[0] for p in points)
    sxy = sum(p[0] * p[1] for p in points)
    denom = n * sxx - sx * sx
    if denom == 0:
        return float("nan")
    return (n * sxy - sx * sy) / denom


def write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


# ---------------------------------------------------------------------------
# Figures (rendered alongside the CSV output).
# ---------------------------------------------------------------------------


def plot_growth(rows: list[list], out: Path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    by_i: dict[int, list[tuple[int, int]]] = {}
    for i, r, exact, _, _ in rows:
        if r > 0:
            by_i.setdefault(i, []).append((r, exact))
    for i, pts in sorted(by_i.items()):
        pts.sort()
        ax.plot([p[0] for p in pts], [p[1] for p in pts], label=f"i = {i}")
    ax.set_xlabel("power r")
    ax.set_ylabel("letters in image of a_i")
    ax.set_yscale("log")
    ax.legend()
    ax.set_title("letter growth under iteration")
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    plt.close(fig)


def plot_cl(rows: list[list], summary: dict, out: Path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    xs = [r[0] for r in rows if r[3] >= 0]
    ys = [r[3] for r in rows if r[3] >= 0]
    ax.scatter(xs, ys, s=12, alpha=0.5)
    slope = summary.get("witness_slope")
    if xs and isinstance(slope, float) and not math.isnan(slope):
        ax.plot(sorted(set(xs)), [slope * x for x in sorted(set(xs))], "r--",
                label=f"slope {slope}")
        ax.legend()
    ax.set_xlabel("input scale n")
    ax.set_ylabel("compressed witness length")
    ax.set_title("conjugator length scaling")
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    plt.close(fig)


def plot_rt(rows: list[list], summary: dict, out: Path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot([r[0] for r in rows], [r[2] for r in rows], "o-")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("input scale n")
    ax.set_ylabel("median decision time (ms)")
    ax.set_title(f"runtime scaling (log-log slope {summary.get('loglog_slope')})")
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    plt.close(fig)

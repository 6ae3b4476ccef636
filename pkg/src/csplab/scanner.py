"""Monte-Carlo satisfiability scans over (n, c) grids.

Each grid cell runs independent sample+solve trials at edge probability
p = c / n^(k-1), reports the empirical satisfiability probability with a
Wilson 95% interval, and accounts for budget-limited solver runs as
indeterminate rather than dropping them.  Per-n transition windows record
where the curve falls from a high to a low probability level; comparing
window widths across n gives an evidence-grade sharp-vs-coarse verdict.

All cells are deterministic functions of the master seed, so scans can be
distributed over worker processes without changing any number.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace

from .distributions import NamedDistribution, distribution_from_spec
from .model import ConstraintDistribution, sample_csp, sample_hat_csp
from .rng import derive_seed
from .solver import BudgetExceeded, solve

WILSON_Z = 1.959963984540054  # 95%
DEFAULT_BUDGET = 10_000_000
SHRINK_RATIO = 0.6

SHARP = "sharp"
COARSE = "coarse"
INCONCLUSIVE = "inconclusive"


def wilson_interval(successes: int, trials: int, z: float = WILSON_Z
                    ) -> tuple[float, float]:
    """Wilson score interval for a Bernoulli proportion."""
    if trials == 0:
        return 0.0, 1.0
    phat = successes / trials
    denom = 1.0 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    margin = (z / denom) * math.sqrt(phat * (1 - phat) / trials
                                     + z * z / (4 * trials * trials))
    return max(0.0, center - margin), min(1.0, center + margin)


# ---------------------------------------------------------------------------
# cells
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CellResult:
    n: int
    c: float
    trials: int
    sat: int
    unsat: int
    indeterminate: int

    @property
    def decided(self) -> int:
        return self.sat + self.unsat

    @property
    def phat(self) -> float | None:
        return self.sat / self.decided if self.decided else None

    @property
    def interval(self) -> tuple[float, float]:
        return wilson_interval(self.sat, self.decided)


def _normalize(dist: NamedDistribution | ConstraintDistribution) -> NamedDistribution:
    if isinstance(dist, NamedDistribution):
        return dist
    return NamedDistribution("custom", dist)


def estimate_sat_prob(dist: NamedDistribution | ConstraintDistribution, model: str,
                      n: int, c: float, trials: int, seed: int, *,
                      budget: int | None = DEFAULT_BUDGET) -> CellResult:
    """One grid cell: `trials` independent sample+solve runs at p = c/n^(k-1)."""
    nd = _normalize(dist)
    if trials < 1:
        raise ValueError("need at least one trial")
    if model not in ("simple", "hat"):
        raise ValueError(f"unknown model {model!r}")
    k = nd.arity
    p = c / n ** (k - 1)
    if model == "simple" and not 0.0 <= p <= 1.0:
        raise ValueError(f"p = c/n^(k-1) = {p} outside [0, 1]")
    sampler = sample_csp if model == "simple" else sample_hat_csp
    sat = unsat = indeterminate = 0
    for t in range(trials):
        s = derive_seed(seed, "trial", t)
        instance = sampler(n, p, nd.dist, s)
        try:
            result = solve(instance, max_nodes=budget)
        except BudgetExceeded:
            indeterminate += 1
            continue
        if result is None:
            unsat += 1
        else:
            sat += 1
    return CellResult(n, c, trials, sat, unsat, indeterminate)


@dataclass(frozen=True)
class ScanResult:
    dist_tag: str
    model: str
    n_list: tuple[int, ...]
    c_grid: tuple[float, ...]
    trials: int
    seed: int
    budget: int | None
    cells: tuple[CellResult, ...]

    def cell(self, n: int, c: float) -> CellResult:
        for cell in self.cells:
            if cell.n == n and cell.c == c:
                return cell
        raise KeyError(f"no cell ({n}, {c})")

    def row(self, n: int) -> list[CellResult]:
        return sorted((x for x in self.cells if x.n == n), key=lambda x: x.c)

    @property
    def indeterminate_fraction(self) -> float:
        total = sum(x.trials for x in self.cells)
        return sum(x.indeterminate for x in self.cells) / total if total else 0.0


def _cell_seed(seed: int, n: int, c: float) -> int:
    return derive_seed(seed, "cell", n, repr(float(c)))


def _run_cell(args) -> CellResult:
    nd, model, n, c, trials, seed, budget = args
    return estimate_sat_prob(nd, model, n, c, trials, _cell_seed(seed, n, c),
                             budget=budget)


def scan(dist: NamedDistribution | ConstraintDistribution, model: str,
         n_list: list[int], c_grid: list[float], trials: int, seed: int, *,
         budget: int | None = DEFAULT_BUDGET, workers: int = 1) -> ScanResult:
    """Full (n, c) grid of estimate_sat_prob cells; deterministic under seed,
    embarrassingly parallel over cells."""
    nd = _normalize(dist)
    if not n_list or not c_grid:
        raise ValueError("n_list and c_grid must be nonempty")
    jobs = [(nd, model, n, float(c), trials, seed, budget)
            for n in n_list for c in c_grid]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            cells = tuple(pool.map(_run_cell, jobs))
    else:
        cells = tuple(_run_cell(job) for job in jobs)
    return ScanResult(nd.tag, model, tuple(n_list), tuple(float(c) for c in c_grid),
                      trials, seed, budget, cells)


# ---------------------------------------------------------------------------
# transition windows and the sharpness verdict
# ---------------------------------------------------------------------------

def monotone_envelope(values: list[float], weights: list[float]) -> list[float]:
    """Weighted least-squares nonincreasing fit (pool adjacent violators)."""
    blocks = [[v, w] for v, w in zip(values, weights)]
    i = 0
    while i < len(blocks) - 1:
        if blocks[i][0] < blocks[i + 1][0] - 1e-15:
            v1, w1 = blocks[i]
            v2, w2 = blocks[i + 1]
            blocks[i] = [(v1 * w1 + v2 * w2) / (w1 + w2), w1 + w2]
            del blocks[i + 1]
            i = max(i - 1, 0)
        else:
            i += 1
    out = []
    idx = 0
    consumed = 0.0
    for w in weights:
        out.append(blocks[idx][0])
        consumed += w
        if consumed >= blocks[idx][1] - 1e-9:
            consumed = 0.0
            idx += 1
    return out


@dataclass(frozen=True)
class TransitionWindow:
    n: int
    c_lo: float | None
    c_hi: float | None
    reason: str | None = None

    @property
    def defined(self) -> bool:
        return self.c_lo is not None and self.c_hi is not None and self.reason is None

    @property
    def width(self) -> float | None:
        return self.c_hi - self.c_lo if self.defined else None


def transition_window(result: ScanResult, hi: float = 0.8, lo: float = 0.2, *,
                      smooth: bool = False) -> dict[int, TransitionWindow]:
    """Per-n window [largest c with phat >= hi, smallest c with phat <= lo].

    Undefined (with a reason) when the grid does not bracket the crossing or
    the two levels come out in the wrong order.
    """
    out: dict[int, TransitionWindow] = {}
    for n in result.n_list:
        row = result.row(n)
        usable = [cell for cell in row if cell.phat is not None]
        if not usable:
            out[n] = TransitionWindow(n, None, None, "no decided trials")
            continue
        cs = [cell.c for cell in usable]
        ps = [cell.phat for cell in usable]
        if smooth:
            ps = monotone_envelope(ps, [float(cell.decided) for cell in usable])
        c_lo = max((c for c, p in zip(cs, ps) if p >= hi), default=None)
        c_hi = min((c for c, p in zip(cs, ps) if p <= lo), default=None)
        if c_lo is None:
            out[n] = TransitionWindow(n, None, c_hi, f"no cell with phat >= {hi}")
        elif c_hi is None:
            out[n] = TransitionWindow(n, c_lo, None, f"no cell with phat <= {lo}")
        elif c_hi < c_lo:
            out[n] = TransitionWindow(n, c_lo, c_hi, "levels crossed out of order")
        else:
            out[n] = TransitionWindow(n, c_lo, c_hi)
    return out


@dataclass(frozen=True)
class SharpnessVerdict:
    verdict: str
    ratio: float | None
    width_small_n: float | None
    width_large_n: float | None
    detail: str


def sharpness_verdict(result: ScanResult, windows: dict[int, TransitionWindow] | None
                      = None, *, shrink_ratio: float = SHRINK_RATIO
                      ) -> SharpnessVerdict:
    """Evidence-grade shrink test on window widths across instance sizes.

    Declares `sharp` when the largest-n window is at most shrink_ratio times
    the smallest-n window, `coarse` when it exceeds that bound by at least
    one grid step, and `inconclusive` otherwise (or when windows are
    undefined or fewer than three sizes were scanned).  Finite-size data can
    only ever provide evidence, not a limit statement.
    """
    if windows is None:
        windows = transition_window(result)
    if len(result.n_list) < 3:
        return SharpnessVerdict(INCONCLUSIVE, None, None, None,
                                "need at least three instance sizes")
    n_small, n_large = min(result.n_list), max(result.n_list)
    w_small = windows[n_small].width
    w_large = windows[n_large].width
    if w_small is None or w_large is None:
        return SharpnessVerdict(INCONCLUSIVE, None, w_small, w_large,
                                "window undefined at extreme sizes")
    if w_small == 0:
        return SharpnessVerdict(INCONCLUSIVE, None, w_small, w_large,
                                "degenerate zero-width window")
    step = min((b - a for a, b in zip(result.c_grid, result.c_grid[1:])),
               default=0.0)
    ratio = w_large / w_small
    if w_large <= shrink_ratio * w_small:
        return SharpnessVerdict(SHARP, ratio, w_small, w_large,
                                f"width shrinks by factor {ratio:.3f}")
    if w_large >= shrink_ratio * w_small + step:
        return SharpnessVerdict(COARSE, ratio, w_small, w_large,
                                f"width ratio {ratio:.3f} stays above {shrink_ratio}")
    return SharpnessVerdict(INCONCLUSIVE, ratio, w_small, w_large,
                            "ratio within one grid step of the decision bound")


# ---------------------------------------------------------------------------
# bisection threshold estimate
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ThresholdEstimate:
    c: float
    phat_at_c: float
    probes: tuple[tuple[float, float], ...]


def threshold_estimate(dist: NamedDistribution | ConstraintDistribution, model: str,
                       n: int, tol: float, trials_per_probe: int, seed: int, *,
                       bracket: tuple[float, float], budget: int | None = DEFAULT_BUDGET,
                       prob_fn=None) -> ThresholdEstimate:
    """Bisect the empirical satisfiability curve down to a bracket of width tol.

    The initial bracket must straddle the crossing: phat near one at the low
    end and near zero at the high end.  `prob_fn` replaces the Monte-Carlo
    probe for testing.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if not lo < hi:
        raise ValueError("bracket must satisfy lo < hi")
    nd = _normalize(dist)
    probes: list[tuple[float, float]] = []

    def probe(c: float) -> float:
        if prob_fn is not None:
            p = float(prob_fn(c))
        else:
            cell = estimate_sat_prob(nd, model, n, c, trials_per_probe,
                                     derive_seed(seed, "probe", len(probes), repr(c)),
                                     budget=budget)
            if cell.phat is None:
                raise RuntimeError(f"all probe trials indeterminate at c = {c}")
            p = cell.phat
        probes.append((c, p))
        return p

    p_lo = probe(lo)
    p_hi = probe(hi)
    if p_lo < 0.8 or p_hi > 0.2:
        raise ValueError(f"bracket does not straddle the transition: "
                         f"phat({lo}) = {p_lo:.3f}, phat({hi}) = {p_hi:.3f}")
    p_mid = (p_lo + p_hi) / 2
    while hi - lo > tol:
        mid = (lo + hi) / 2
        p_mid = probe(mid)
        if p_mid >= 0.5:
            lo = mid
        else:
            hi = mid
    return ThresholdEstimate((lo + hi) / 2, p_mid, tuple(probes))


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

CSV_HEADER = ["dist", "model", "n", "c", "trials", "sat", "indeterminate",
              "phat", "ci_lo", "ci_hi"]


def scan_to_csv(result: ScanResult, *, provenance: dict | None = None) -> str:
    buf = io.StringIO()
    for line in _provenance_lines(result, provenance):
        buf.write(line + "\n")
    writer = csv.writer(buf)
    writer.writerow(CSV_HEADER)
    for cell in result.cells:
        ci_lo, ci_hi = cell.interval
        phat = "" if cell.phat is None else f"{cell.phat:.6f}"
        writer.writerow([result.dist_tag, result.model, cell.n, f"{cell.c:g}",
                         cell.trials, cell.sat, cell.indeterminate, phat,
                         f"{ci_lo:.6f}", f"{ci_hi:.6f}"])
    return buf.getvalue()


def _provenance_lines(result: ScanResult, provenance: dict | None) -> list[str]:
    from . import __version__

    lines = [f"# csplab {__version__}",
             f"# dist={result.dist_tag} model={result.model} seed={result.seed} "
             f"trials={result.trials} budget={result.budget}"]
    if provenance:
        lines.append("# config: " + json.dumps(provenance, sort_keys=True))
    return lines


def scan_to_jsonable(result: ScanResult, windows: dict[int, TransitionWindow],
                     verdict: SharpnessVerdict, *, provenance: dict | None = None
                     ) -> dict:
    from . import __version__

    return {
        "tool": {"name": "csplab", "version": __version__},
        "config": provenance or {},
        "dist": result.dist_tag,
        "model": result.model,
        "seed": result.seed,
        "trials": result.trials,
        "budget": result.budget,
        "indeterminate_fraction": result.indeterminate_fraction,
        "cells": [{
            "n": cell.n, "c": cell.c, "trials": cell.trials, "sat": cell.sat,
            "unsat": cell.unsat, "indeterminate": cell.indeterminate,
            "phat": cell.phat, "ci_lo": cell.interval[0], "ci_hi": cell.interval[1],
        } for cell in result.cells],
        "windows": [{
            "n": w.n, "c_lo": w.c_lo, "c_hi": w.c_hi, "width": w.width,
            "defined": w.defined, "reason": w.reason,
        } for w in windows.values()],
        "verdict": asdict(verdict),
    }

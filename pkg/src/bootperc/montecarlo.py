"""Seeded Monte Carlo estimation of event probabilities and critical
probabilities, plus the sweep runner.

Per-trial randomness comes from a counter-style Philox stream keyed on
(master seed, trial index), so estimates are reproducible regardless of
execution order or degree of parallelism.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .structures import CellSet, DomainError, Rectangle, StructureSpec, STAR, SLAB
from .dynamics import (
    CrossDirection,
    is_crossed,
    is_semi_crossed,
    percolates,
    semi_percolates,
)
from .span import span_direct

_Z95 = 1.959963984540054

PERCOLATES = "percolates"
SEMI_PERCOLATES = "semi_percolates"
SPANS = "spans"
CROSSED = "crossed"
SEMI_CROSSED = "semi_crossed"
LONG_SPAN = "long_span"

_KINDS = (PERCOLATES, SEMI_PERCOLATES, SPANS, CROSSED, SEMI_CROSSED, LONG_SPAN)


@dataclass(frozen=True)
class EventSpec:
    """A monotone event evaluated on the random initial set."""

    kind: str
    structure: StructureSpec
    rectangle: Rectangle | None = None
    direction: CrossDirection | None = None
    axis: int | None = None
    long_threshold: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise DomainError(f"unknown event kind {self.kind!r}")
        if self.kind in (SEMI_PERCOLATES, SEMI_CROSSED) and self.structure.family != STAR:
            raise DomainError(f"{self.kind} requires a star structure")
        if self.kind == CROSSED and self.structure.family != SLAB:
            raise DomainError("crossed requires a slab structure")
        if self.kind in (SPANS, CROSSED, SEMI_CROSSED) and self.rectangle is None:
            raise DomainError(f"{self.kind} requires a rectangle")
        if self.kind == LONG_SPAN and self.long_threshold is None:
            raise DomainError("long_span requires a length threshold")

    def evaluate(self, cells: CellSet) -> bool:
        spec = self.structure
        if self.kind == PERCOLATES:
            return percolates(spec, cells)
        if self.kind == SEMI_PERCOLATES:
            return semi_percolates(spec, cells)
        if self.kind == SPANS:
            return self.rectangle in span_direct(spec, cells).rectangles
        if self.kind == CROSSED:
            return is_crossed(spec, self.rectangle, cells,
                              self.direction or CrossDirection())
        if self.kind == SEMI_CROSSED:
            return is_semi_crossed(spec, self.rectangle, cells, self.axis or 1)
        longest = max((r.long for r in span_direct(spec, cells).rectangles),
                      default=0)
        return longest >= self.long_threshold

    def label(self) -> str:
        return self.kind

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.rectangle is not None:
            out["rect"] = self.rectangle.to_json()
        if self.direction is not None:
            out["direction"] = {"axis": self.direction.axis,
                                "reverse": self.direction.reverse}
        if self.axis is not None:
            out["axis"] = self.axis
        if self.long_threshold is not None:
            out["longThreshold"] = self.long_threshold
        return out

    @staticmethod
    def from_json(obj: dict, structure: StructureSpec) -> "EventSpec":
        try:
            kind = obj["kind"]
        except (KeyError, TypeError) as exc:
            raise DomainError("bad event JSON: missing 'kind'") from exc
        rect = Rectangle.from_json(obj["rect"]) if "rect" in obj else None
        direction = None
        if "direction" in obj:
            dobj = obj["direction"]
            if isinstance(dobj, str):
                direction = CrossDirection.from_name(dobj)
            else:
                direction = CrossDirection(int(dobj.get("axis", 1)),
                                           bool(dobj.get("reverse", False)))
        return EventSpec(kind, structure, rect, direction,
                         obj.get("axis"), obj.get("longThreshold"))


@dataclass(frozen=True)
class Estimate:
    """A Monte Carlo point estimate with its Wilson 95% interval."""

    p_hat: float
    trials: int
    ci_low: float
    ci_high: float
    master_seed: int


def wilson_interval(successes: int, trials: int, z: float = _Z95) -> tuple[float, float]:
    if trials < 1:
        raise DomainError("trials must be >= 1")
    phat = successes / trials
    denom = 1.0 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def trial_rng(master_seed: int, trial: int) -> np.random.Generator:
    """Counter-style stream for one trial: Philox keyed on (seed, trial)."""
    key = (int(master_seed) & (2 ** 64 - 1)) * 2 ** 64 + int(trial)
    return np.random.Generator(np.random.Philox(key=key))


def derive_seed(master_seed: int, index: int) -> int:
    """A stable 64-bit subseed for the index-th child task."""
    ss = np.random.SeedSequence([int(master_seed) & (2 ** 64 - 1), int(index)])
    return int(ss.generate_state(1, np.uint64)[0])


def sample_bin(region, p: float, rng: np.random.Generator) -> CellSet:
    """Bin(region, p): include each vertex independently with probability p,
    one uniform per vertex in canonical order.
    """
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"p = {p} outside [0, 1]")
    shape = region.shape if isinstance(region, (StructureSpec, CellSet)) \
        else tuple(int(s) for s in region)
    u = rng.random(int(np.prod(shape)))
    return CellSet.from_mask((u < p).reshape(shape))


def _default_workers() -> int:
    env = os.environ.get("BOOTPERC_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise DomainError(f"BOOTPERC_THREADS = {env!r} is not an integer")
    return 1


def estimate_event_prob(event: EventSpec, p: float, trials: int,
                        master_seed: int, workers: int | None = None) -> Estimate:
    """Estimate P(event) at density p over independent seeded trials."""
    if trials < 1:
        raise DomainError("trials must be >= 1")
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"p = {p} outside [0, 1]")
    workers = workers if workers is not None else _default_workers()
    spec = event.structure

    def run(trial: int) -> bool:
        cells = sample_bin(spec, p, trial_rng(master_seed, trial))
        return event.evaluate(cells)

    if workers <= 1:
        successes = sum(run(t) for t in range(trials))
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            successes = sum(pool.map(run, range(trials)))
    low, high = wilson_interval(successes, trials)
    return Estimate(successes / trials, trials, low, high, master_seed)


def estimate_p_alpha(spec: StructureSpec, event, alpha: float,
                     trials_per_eval: int, seed: int, p_tol: float,
                     workers: int | None = None) -> Estimate:
    """Stochastic bisection for p_alpha = inf{p : P(event at p) >= alpha}.

    Each midpoint gets a fresh derived seed; the returned interval is the
    final bisection bracket, not a guaranteed confidence interval.
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError("alpha must lie in (0, 1)")
    if not p_tol > 0.0:
        raise DomainError("p_tol must be positive")
    event = event if isinstance(event, EventSpec) else EventSpec(event, spec)
    lo, hi = 0.0, 1.0
    evals = 0
    total = 0
    while hi - lo >= p_tol:
        mid = 0.5 * (lo + hi)
        est = estimate_event_prob(event, mid, trials_per_eval,
                                  derive_seed(seed, evals), workers)
        evals += 1
        total += trials_per_eval
        if est.p_hat >= alpha:
            hi = mid
        else:
            lo = mid
    return Estimate(0.5 * (lo + hi), total, lo, hi, seed)


def estimate_lgap(ell: int, m: int, u: float, trials: int, master_seed: int) -> Estimate:
    """Directly simulate the no-L-gap event on m+1 primary and ell*m
    secondary independent indicators of probability u."""
    if ell < 0 or m < 0:
        raise DomainError("ell and m must be >= 0")
    if not 0.0 <= u <= 1.0:
        raise DomainError(f"u = {u} outside [0, 1]")
    if trials < 1:
        raise DomainError("trials must be >= 1")
    if m == 0:
        return Estimate(1.0, trials, *wilson_interval(trials, trials), master_seed)
    rng = np.random.Generator(np.random.Philox(key=int(master_seed) & (2 ** 64 - 1)))
    successes = 0
    chunk = 1 << 14
    done = 0
    while done < trials:
        b = min(chunk, trials - done)
        primary = rng.random((b, m + 1)) < u
        gap = ~primary[:, :m] & ~primary[:, 1:]
        if ell:
            secondary = rng.random((b, ell, m)) < u
            gap &= ~secondary.any(axis=1)
        successes += int((~gap.any(axis=1)).sum())
        done += b
    low, high = wilson_interval(successes, trials)
    return Estimate(successes / trials, trials, low, high, master_seed)


@dataclass(frozen=True)
class SweepPoint:
    structure: StructureSpec
    event: EventSpec
    p: float
    trials: int


@dataclass(frozen=True)
class SweepConfig:
    """A declarative experiment grid; fully determines the output rows."""

    points: tuple[SweepPoint, ...]
    master_seed: int
    output: str | None = None

    def __post_init__(self) -> None:
        if not self.points:
            raise DomainError("sweep grid must be nonempty")

    @staticmethod
    def from_json(obj: dict) -> "SweepConfig":
        try:
            master_seed = int(obj["masterSeed"])
            grid = obj["grid"]
        except (KeyError, TypeError, ValueError) as exc:
            raise DomainError(f"bad sweep config: {exc}") from exc
        points = []
        for entry in grid:
            try:
                structure = StructureSpec.from_json(entry["structure"])
                event = EventSpec.from_json(entry["event"], structure)
                ps = entry["p"]
                trials = int(entry["trials"])
            except (KeyError, TypeError, ValueError) as exc:
                raise DomainError(f"bad sweep grid entry: {exc}") from exc
            if not isinstance(ps, (list, tuple)):
                ps = [ps]
            for p in ps:
                points.append(SweepPoint(structure, event, float(p), trials))
        return SweepConfig(tuple(points), master_seed, obj.get("output"))


SWEEP_COLUMNS = ["family", "n", "d", "ell", "k", "r", "event", "p",
                 "trials", "pHat", "ciLow", "ciHigh", "seed"]


def run_sweep(config: SweepConfig, out_path: str | None = None,
              workers: int | None = None) -> list[dict]:
    """Evaluate every grid point; stream rows to CSV if a path is given."""
    out_path = out_path or config.output
    rows = []
    writer = None
    handle = None
    try:
        if out_path is not None:
            try:
                handle = open(out_path, "w", newline="")
            except OSError as exc:
                raise OSError(f"cannot open sweep output {out_path!r}: {exc}") from exc
            writer = csv.DictWriter(handle, fieldnames=SWEEP_COLUMNS)
            writer.writeheader()
        for idx, point in enumerate(config.points):
            seed = derive_seed(config.master_seed, idx)
            try:
                est = estimate_event_prob(point.event, point.p, point.trials,
                                          seed, workers)
            except Exception as exc:
                raise type(exc)(f"sweep point {idx} ({point.event.kind}, "
                                f"p={point.p}): {exc}") from exc
            spec = point.structure
            row = {
                "family": spec.family, "n": spec.n, "d": spec.d,
                "ell": spec.ell, "k": spec.k, "r": spec.r,
                "event": point.event.label(), "p": repr(point.p),
                "trials": point.trials, "pHat": repr(est.p_hat),
                "ciLow": repr(est.ci_low), "ciHigh": repr(est.ci_high),
                "seed": seed,
            }
            rows.append(row)
            if writer is not None:
                writer.writerow(row)
                handle.flush()
    finally:
        if handle is not None:
            handle.close()
    return rows

"""Timing runs over the organization families used to show exponential growth.

``n`` organizations of three nodes each, two of three inside an organization,
and a root threshold of either ``n - 1`` or ``floor(2n/3) + 1``.
"""
import time
from dataclasses import asdict, dataclass
from typing import Callable, Dict, List, Sequence

import numpy as np

from .generators import generate_org_fbas
from .quorums import enumerate_quorums, quorum_intersection

ROOT_RULES: Dict[str, Callable[[int], int]] = {
    "n-1": lambda n: n - 1,
    "2n/3+1": lambda n: 2 * n // 3 + 1,
}


@dataclass(frozen=True)
class BenchRow:
    rule: str
    orgs: int
    nodes: int
    root_threshold: int
    quorums: int
    enumerate_seconds: float
    intersects: bool
    intersection_seconds: float


def run_bench(org_counts: Sequence[int] = range(2, 7), rules: Sequence[str] = tuple(ROOT_RULES),
              repeats: int = 1) -> List[BenchRow]:
    """Best-of-``repeats`` wall times; building the FBAS is not timed."""
    rows = []
    for rule in rules:
        for n in org_counts:
            t = ROOT_RULES[rule](n)
            f = generate_org_fbas([3] * n, [2] * n, t)
            f.preds
            best_enum = best_qi = float("inf")
            for _ in range(repeats):
                f.memo.clear()
                start = time.perf_counter()
                count = sum(1 for _ in enumerate_quorums(f))
                mid = time.perf_counter()
                intersects = quorum_intersection(f).intersects
                end = time.perf_counter()
                best_enum = min(best_enum, mid - start)
                best_qi = min(best_qi, end - mid)
            rows.append(BenchRow(rule, n, 3 * n, t, count, best_enum, intersects, best_qi))
    return rows


def log_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Least-squares slope of ``log(y)`` against ``x``."""
    return float(np.polyfit(np.asarray(xs, dtype=float), np.log(np.asarray(ys, dtype=float)), 1)[0])


def format_rows(rows: Sequence[BenchRow], delimiter: str = "\t") -> str:
    header = list(asdict(rows[0]).keys()) if rows else [f for f in BenchRow.__dataclass_fields__]
    lines = [delimiter.join(header)]
    for r in rows:
        vals = []
        for k, v in asdict(r).items():
            vals.append(f"{v:.6g}" if isinstance(v, float) else str(v).lower() if isinstance(v, bool) else str(v))
        lines.append(delimiter.join(vals))
    return "\n".join(lines) + "\n"

"""Run configuration and deterministic claim reports."""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field

from .numeric import IndeterminateError

VERDICTS = ("pass", "fail", "indeterminate")


@dataclass(frozen=True)
class RunConfig:
    seed: int = 20240601
    mode: str = "exact"
    tol: float = 1e-9
    algebra: str = "2+3"
    tie_pairs: int = 500
    complex_pairs: int = 300
    lift_pairs: int = 200
    reconstruction_cases: int = 50
    sublemma_cases: int = 50
    like_tensor_cases: int = 100
    sample_points: int = 5
    inject_fault: str | None = None

    def __post_init__(self):
        if self.mode not in ("exact", "float"):
            raise ValueError("mode must be 'exact' or 'float'")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        for name in ("tie_pairs", "complex_pairs", "lift_pairs", "reconstruction_cases",
                     "sublemma_cases", "like_tensor_cases", "sample_points"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class Record:
    claim_id: str
    anchor: str
    verdict: str
    margin: float = math.inf
    elapsed: float = 0.0
    note: str = ""


@dataclass
class Report:
    title: str
    config: RunConfig
    records: list = field(default_factory=list)

    def check(self, claim_id: str, anchor: str, fn):
        """Run ``fn`` and record its verdict.

        ``fn`` returns a bool, or a ``(bool, margin)`` pair, or
        ``(bool, margin, note)``.  Indeterminate float decisions and
        exceptions are recorded rather than raised.
        """
        start = time.perf_counter()
        margin, note = math.inf, ""
        try:
            out = fn()
            if isinstance(out, tuple):
                ok, margin = bool(out[0]), float(out[1])
                note = str(out[2]) if len(out) > 2 else ""
            else:
                ok = bool(out)
            verdict = "pass" if ok else "fail"
        except IndeterminateError as exc:
            verdict, margin, note = "indeterminate", exc.margin, str(exc)
        except Exception as exc:  # a crashing check is a failed claim
            verdict, note = "fail", f"{type(exc).__name__}: {exc}"
        self.records.append(Record(claim_id, anchor, verdict, margin,
                                   time.perf_counter() - start, note))
        return verdict == "pass"

    def extend(self, other: "Report"):
        self.records.extend(other.records)

    @property
    def ok(self) -> bool:
        return all(r.verdict == "pass" for r in self.records)

    def exit_code(self) -> int:
        return 0 if self.ok else 1

    def ordered(self) -> list:
        return sorted(self.records, key=lambda r: r.claim_id)


def _fmt_margin(m: float) -> str:
    if math.isinf(m):
        return "exact"
    return f"{m:.3e}"


def render(report: Report, fmt: str = "text", timing: bool = False) -> str:
    """Serialize a report.  Without ``timing`` the output is a pure function of config and build."""
    cfg = report.config
    if fmt == "text":
        head = f"# {report.title} seed={cfg.seed} mode={cfg.mode} tol={cfg.tol:g}"
        cols = ["claim", "verdict", "margin", "anchor"] + (["elapsed"] if timing else []) + ["note"]
        lines = [head, "\t".join(cols)]
        for r in report.ordered():
            row = [r.claim_id, r.verdict, _fmt_margin(r.margin), r.anchor]
            if timing:
                row.append(f"{r.elapsed:.3f}")
            row.append(r.note)
            lines.append("\t".join(row))
        counts = {v: sum(1 for r in report.records if r.verdict == v) for v in VERDICTS}
        lines.append("# summary " + " ".join(f"{k}={v}" for k, v in counts.items()))
        return "\n".join(lines) + "\n"
    if fmt == "structured":
        payload = {
            "title": report.title,
            "seed": cfg.seed,
            "mode": cfg.mode,
            "tol": cfg.tol,
            "records": [],
        }
        for r in report.ordered():
            rec = {"claim": r.claim_id, "anchor": r.anchor, "verdict": r.verdict,
                   "margin": None if math.isinf(r.margin) else r.margin, "note": r.note}
            if timing:
                rec["elapsed"] = round(r.elapsed, 6)
            payload["records"].append(rec)
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"
    raise ValueError(f"unknown format {fmt!r}")

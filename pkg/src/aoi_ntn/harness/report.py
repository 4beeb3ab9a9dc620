"""Analytic-vs-simulation discrepancy reports."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from ..analytic import FlowSet, ServiceSpec, mgf_derivative_check

# reference flows for the MGF check when a results file carries no metadata
DEFAULT_FLOWS = FlowSet((1.0, 1.0, 1.0), 0.8, ServiceSpec(4.0, 1.0, "exponential"))


@dataclass
class DiscrepancyReport:
    tolerance: float
    entries: list  # (sweep_value, rel_error, mark)
    derivative_check: dict
    label: str = ""
    notes: list = field(default_factory=list)

    @property
    def max_error(self):
        errs = [abs(e) for _, e, _ in self.entries if math.isfinite(e)]
        return max(errs) if errs else math.nan

    @property
    def all_pass(self):
        return all(mark == "pass" for _, _, mark in self.entries)

    def render(self):
        out = [f"# discrepancy report {self.label}".rstrip(), f"tolerance {self.tolerance!r}"]
        out.append("sweep_value,rel_error,mark")
        out += [f"{v!r},{e!r},{m}" for v, e, m in self.entries]
        flagged = sum(m != "pass" for _, _, m in self.entries)
        out.append(f"max_abs_rel_error {self.max_error!r}")
        out.append(f"flagged {flagged} of {len(self.entries)}")
        out.append("# departure-MGF derivative cross-check (MGF derivatives vs closed-form moments)")
        out += [f"{k} {v!r}" for k, v in self.derivative_check.items()]
        out += [f"note {n}" for n in self.notes]
        return "\n".join(out) + "\n"


def compare_analytic_vs_des(rows, tolerance=0.1, flows: FlowSet | None = None, target=0, label=""):
    """Flag rows whose |relative error| exceeds ``tolerance``.

    Rows without both columns are marked ``n/a``. The MGF cross-check is
    always included, on ``flows`` if given or on a reference flow set.
    """
    entries = []
    for r in rows:
        e = r.rel_error
        if not math.isfinite(e):
            mark = "n/a"
        else:
            mark = "pass" if abs(e) <= tolerance else "flag"
        entries.append((r.sweep_value, e, mark))
    notes = []
    if flows is None:
        flows = DEFAULT_FLOWS
        notes.append("MGF check uses reference flows (no metadata)")
    return DiscrepancyReport(tolerance, entries, mgf_derivative_check(flows, target), label, notes)

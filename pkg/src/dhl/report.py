"""Check records and their emission as JSON, CSV and SVG."""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass, field

import numpy as np


@dataclass
class Record:
    name: str
    anchor: str
    predicted: object
    computed: object
    tolerance: object
    passed: bool

    def as_dict(self):
        return {
            "name": self.name,
            "anchor": self.anchor,
            "predicted": _plain(self.predicted),
            "computed": _plain(self.computed),
            "tolerance": _plain(self.tolerance),
            "pass": bool(self.passed),
        }


def _plain(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating, float)):
        v = float(v)
        if not np.isfinite(v):
            return str(v)
        return v
    if isinstance(v, (complex, np.complexfloating)):
        return [_plain(v.real), _plain(v.imag)]
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_plain(x) for x in v]
    return v


@dataclass
class Report:
    command: str
    environment: dict
    records: list = field(default_factory=list)
    tables: dict = field(default_factory=dict)  # name -> (header, rows)
    plots: dict = field(default_factory=dict)  # name -> callable(ax)

    def add(self, rec: Record):
        self.records.append(rec)

    def extend(self, recs):
        self.records.extend(recs)

    def ordered(self):
        # failing records first, then by name
        return sorted(self.records, key=lambda r: (bool(r.passed), r.name))

    @property
    def all_pass(self):
        return all(r.passed for r in self.records)

    def to_json(self) -> str:
        recs = [r.as_dict() for r in self.ordered()]
        doc = {
            "command": self.command,
            "environment": _plain(self.environment),
            "summary": {"records": len(recs), "failed": sum(not r["pass"] for r in recs)},
            "records": recs,
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    def emit(self, out_dir):
        os.makedirs(os.path.join(out_dir, "tables"), exist_ok=True)
        os.makedirs(os.path.join(out_dir, "plots"), exist_ok=True)
        with open(os.path.join(out_dir, "report.json"), "w") as fh:
            fh.write(self.to_json())
        header = ["name", "anchor", "predicted", "computed", "tolerance", "pass"]
        rows = [[json.dumps(d[h]) if not isinstance(d[h], str) else d[h] for h in header]
                for d in (r.as_dict() for r in self.ordered())]
        _write_csv(os.path.join(out_dir, "tables", "records.csv"), header, rows)
        for name, (hdr, rws) in sorted(self.tables.items()):
            _write_csv(os.path.join(out_dir, "tables", f"{name}.csv"), hdr, rws)
        if self.plots:
            _render(out_dir, self.plots)


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def _render(out_dir, plots):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    # fixed ids and no date stamp keep the SVG output reproducible
    with matplotlib.rc_context({"svg.hashsalt": "dhl", "svg.fonttype": "none"}):
        for name, draw in sorted(plots.items()):
            fig, ax = plt.subplots(figsize=(6, 4))
            draw(ax)
            fig.tight_layout()
            fig.savefig(os.path.join(out_dir, "plots", f"{name}.svg"), format="svg", metadata={"Date": None})
            plt.close(fig)


def spectrum_plot(spectra):
    """Singular values (descending) of several problems on a log axis."""

    def draw(ax):
        for label, sv, thr in spectra:
            sv = np.asarray(sv)
            ax.semilogy(np.arange(1, sv.size + 1), np.maximum(sv, 1e-18), ".", ms=2, label=label)
        if spectra:
            ax.axhline(spectra[0][2], color="k", lw=0.8, ls="--", label="rank threshold")
        ax.set_xlabel("index")
        ax.set_ylabel("singular value")
        ax.legend(fontsize=6)

    return draw


def energy_plot(trajectories, floor):
    def draw(ax):
        for label, t, e in trajectories:
            ax.semilogy(t, np.maximum(np.asarray(e) - floor, 1e-16), label=label)
        ax.set_xlabel("flow time")
        ax.set_ylabel("energy - <omega, A>")
        ax.legend(fontsize=7)

    return draw

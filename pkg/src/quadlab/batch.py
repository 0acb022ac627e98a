"""Corpus verification: run the full pipeline per instance and write reports.

Config (JSON)::

    {
      "mode": "from_L" | "from_K",     # default from_L
      "K": 10,                         # from_K only
      "modulus": false,                # also solve the modulus and check the Rengel sandwich
      "figures": 12,                   # PNG count per batch (0 = none, "all")
      "workers": 1,
      "instances": [
        {"id": "r1", "generator": "random", "seed": 1, "n": 16, "cells": 60},
        {"id": "p1", "generator": "pinch", "t": 1},
        {"id": "f1", "file": "quad.json"},
        {"id": "q1", "quad": {"vertices": [...], "marks": [...]}}
      ],
      "corpus": {"seeds": 200, "sizes": [[16, 60], [32, 240]]}
    }

``corpus`` expands into random instances (seed ``k`` uses size ``k % len(sizes)``).
"""
from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ModulusOutOfRange, QuadlabError
from .geom_core import quad_from_json

COLUMNS = [
    "id",
    "status",
    "n_vertices",
    "s_a",
    "s_b",
    "M",
    "M_err",
    "rengel_lower",
    "rengel_upper",
    "rengel_ok",
    "required_r",
    "found_r",
    "branch",
    "pass",
    "error",
    "seconds",
]


@dataclass
class BatchReport:
    rows: list = field(default_factory=list)
    config: dict = field(default_factory=dict)

    @property
    def aggregates(self) -> dict:
        n = len(self.rows)
        passed = sum(1 for r in self.rows if r["pass"])
        constructive = sum(1 for r in self.rows if r["branch"] in ("tangent_construction", "seven_arc"))
        return {
            "rows": n,
            "passed": passed,
            "pass_rate": passed / n if n else 1.0,
            "constructive_rate": constructive / n if n else 1.0,
            "errors": sum(1 for r in self.rows if r["status"] == "error"),
            "rejected": sum(1 for r in self.rows if r["status"] == "rejected"),
            "failed": sum(1 for r in self.rows if r["status"] == "fail"),
        }

    @property
    def ok(self) -> bool:
        a = self.aggregates
        return a["errors"] == 0 and a["failed"] == 0

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
        w.writeheader()
        for r in self.rows:
            w.writerow({k: _csv_value(r.get(k)) for k in COLUMNS})
        return buf.getvalue()

    def to_json(self) -> dict:
        return {"aggregates": self.aggregates, "rows": self.rows}


def _csv_value(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return v


def expand_instances(config: dict) -> list[dict]:
    items = [dict(x) for x in config.get("instances", [])]
    corpus = config.get("corpus")
    if corpus:
        seeds = corpus.get("seeds", 0)
        seeds = range(seeds) if isinstance(seeds, int) else seeds
        sizes = corpus.get("sizes", [[16, 60]])
        for k, s in enumerate(seeds):
            n, cells = sizes[k % len(sizes)]
            items.append({"id": f"seed{s}-n{n}", "generator": "random", "seed": int(s), "n": n, "cells": cells})
    for k, it in enumerate(items):
        it.setdefault("id", f"instance{k}")
    return items


def load_instance(item: dict, base: Path | None = None):
    from .generators import GeneratorParams, PinchParams, generate_random_rectilinear, pinch_family

    if "quad" in item:
        return quad_from_json(item["quad"])
    if "file" in item:
        p = Path(item["file"])
        if base is not None and not p.is_absolute():
            p = base / p
        return quad_from_json(json.loads(p.read_text()))
    gen = item.get("generator")
    if gen == "random":
        return generate_random_rectilinear(
            GeneratorParams(int(item.get("seed", 1)), int(item.get("n", 16)), int(item.get("cells", 60)))
        )
    if gen == "pinch":
        return pinch_family(PinchParams(t=float(item.get("t", 1.0))))[0]
    raise QuadlabError(f"instance {item.get('id')!r} has no quad, file or known generator")


def run_instance(item: dict, config: dict, base: Path | None = None) -> dict:
    from .disk_placement import verify_theorem
    from .modulus import modulus_extrapolated, rengel_bounds

    row = {k: None for k in COLUMNS}
    row.update(id=item["id"], status="error")
    row["pass"] = False
    t0 = time.perf_counter()
    try:
        Q = load_instance(item, base)
        row["n_vertices"] = Q.polygon.n
        mode = config.get("mode", "from_L")
        rep = verify_theorem(Q, mode, L=item.get("L"), K=config.get("K"))
        c = rep.constants
        row.update(s_a=c["s_a"], s_b=c["s_b"], required_r=rep.required_radius, found_r=rep.found.radius)
        row["branch"] = rep.found.provenance
        rb = rengel_bounds(c["s_a"], c["s_b"])
        row.update(rengel_lower=rb.lower, rengel_upper=rb.upper)
        rengel_ok = None
        if config.get("modulus"):
            h = _default_step(Q)
            m = modulus_extrapolated(Q, [4 * h, 2 * h, h])
            row.update(M=m.M, M_err=m.error_estimate)
            rengel_ok = rb.contains(m.M, m.error_estimate)
        row["rengel_ok"] = rengel_ok
        row["pass"] = bool(rep.passed and rengel_ok is not False)
        row["status"] = "pass" if row["pass"] else "fail"
        row["_trace"] = rep.to_json()
    except ModulusOutOfRange as exc:
        row.update(status="rejected", error=str(exc), M=exc.M)
    except Exception as exc:  # noqa: BLE001 - rows isolate every failure
        row.update(status="error", error=f"{type(exc).__name__}: {exc}")
    row["seconds"] = round(time.perf_counter() - t0, 3)
    return row


def _default_step(Q) -> float:
    span = float(np.ptp(Q.polygon.xy, axis=0).max())
    return 2.0 ** round(math.log2(span / 128))


def _figure(row: dict, item: dict, base, path: Path):
    from .internal_distance import geodesic_between_sides
    from .render import Scene, plot_scene

    Q = load_instance(item, base)
    tr = row.get("_trace") or {}
    disks = []
    if tr.get("found"):
        f = tr["found"]
        # the constructed disk is tiny; draw it enlarged to stay visible
        disks.append((f["center"][0], f["center"][1], max(f["radius"], 0.01 * Q.polygon.diag), "found"))
    if tr.get("largest"):
        g = tr["largest"]
        disks.append((g["center"][0], g["center"][1], g["radius"], "largest"))
    C = geodesic_between_sides(Q, "A").path
    sc = Scene.from_quad(Q, geodesics=[C], disks=disks, title=f"{row['id']}: {row['status']}")
    plot_scene(sc, path)


def _summary_figure(report: BatchReport, path: Path):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    rows = [r for r in report.rows if r["found_r"] and r["required_r"]]
    fig, ax = plt.subplots(1, 2, figsize=(9, 3.5))
    if rows:
        ratio = [r["found_r"] / r["required_r"] for r in rows]
        ax[0].hist(np.log10(ratio), bins=30, color="#4c72b0")
        ax[0].axvline(0, color="red")
        ax[0].set_xlabel("log10(found r / required r)")
        sa_sb = [max(r["s_a"] / r["s_b"], r["s_b"] / r["s_a"]) for r in rows]
        ax[1].scatter(sa_sb, [r["found_r"] for r in rows], s=8)
        ax[1].set_xscale("log")
        ax[1].set_yscale("log")
        ax[1].set_xlabel("distance ratio")
        ax[1].set_ylabel("found radius")
    a = report.aggregates
    fig.suptitle(f"{a['passed']}/{a['rows']} pass, constructive {a['constructive_rate']:.0%}")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _run(args):
    item, config, base = args
    return run_instance(item, config, base)


def run_batch(config: dict, output_dir=None, base: Path | None = None) -> BatchReport:
    items = expand_instances(config)
    workers = int(config.get("workers", 1))
    if workers > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            rows = list(ex.map(_run, [(it, config, base) for it in items]))
    else:
        rows = [run_instance(it, config, base) for it in items]
    traces = [r.pop("_trace", None) for r in rows]
    report = BatchReport(rows, config)
    if output_dir is not None:
        out = Path(output_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.csv").write_text(report.to_csv())
        (out / "report.json").write_text(json.dumps(report.to_json(), indent=1, sort_keys=True) + "\n")
        nfig = config.get("figures", 12)
        nfig = len(rows) if nfig == "all" else int(nfig)
        if nfig > 0 and rows:
            figdir = out / "figures"
            figdir.mkdir(exist_ok=True)
            for row, item, tr in list(zip(rows, items, traces))[:nfig]:
                if row["status"] == "error":
                    continue
                _figure({**row, "_trace": tr}, item, base, figdir / f"{row['id']}.png")
            _summary_figure(report, figdir / "summary.png")
    return report

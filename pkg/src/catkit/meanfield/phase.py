"""Phase-diagram sweeps over two couplings.

Each cell holds the global minimiser and a phase label: ``normal`` when every
exactly-even order parameter vanishes (``|c| <= tol``), ``paired`` otherwise,
``failed`` when the minimiser could not be refined.  Transitions between
neighbouring normal and paired cells are typed by a heuristic: if the
symmetric (normal) branch is still a local minimum in the paired cell, the
two states coexist and the transition is first order; if the normal branch
has already gone unstable there, the order parameter grew continuously and
the transition is second order.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .critical import global_minimum, symmetric_branch
from .models import Model

log = logging.getLogger(__name__)

PHASE_TOL = 1e-6
TIE_TOL = 1e-12
PHASES = ("normal", "paired", "failed")
CSV_HEADER = ["p1", "p2", "c1", "c2", "objective", "phase", "first_order_edge", "second_order_edge"]


class SweepError(ValueError):
    pass


def parse_sweep(spec: str):
    """``"lam=0:2:0.5,delt=-1:1:0.5"`` -> ``[("lam", grid), ("delt", grid)]`` (stop inclusive)."""
    out = []
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            name, rng = part.split("=")
            start, stop, step = (float(x) for x in rng.split(":"))
        except ValueError:
            raise SweepError(f"bad sweep component {part!r}; expected name=start:stop:step") from None
        if step <= 0 or stop < start:
            raise SweepError(f"sweep {name!r} needs step > 0 and stop >= start")
        n = int(np.floor((stop - start) / step + 1e-9)) + 1
        out.append((name.strip(), start + step * np.arange(n)))
    if len(out) != 2:
        raise SweepError("a phase diagram sweeps exactly two parameters")
    return out


@dataclass
class Cell:
    p1: float
    p2: float
    c: tuple
    objective: float
    phase: str
    normal_metastable: bool | None = None
    first_order_edge: bool = False
    second_order_edge: bool = False


@dataclass
class PhaseDiagram:
    names: tuple
    grids: tuple
    cells: list  # row-major: p1 outer, p2 inner
    tol: float = PHASE_TOL
    model: str = ""
    meta: dict = field(default_factory=dict)

    @property
    def shape(self):
        return len(self.grids[0]), len(self.grids[1])

    def cell(self, i, j) -> Cell:
        return self.cells[i * self.shape[1] + j]

    def labels(self) -> np.ndarray:
        return np.array([c.phase for c in self.cells]).reshape(self.shape)

    def counts(self) -> dict:
        out = {p: 0 for p in PHASES}
        for c in self.cells:
            out[c.phase] += 1
        return out

    def edge_counts(self) -> dict:
        return {"first_order": sum(c.first_order_edge for c in self.cells),
                "second_order": sum(c.second_order_edge for c in self.cells)}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for c in self.cells:
            c1 = c.c[0]
            c2 = c.c[1] if len(c.c) > 1 else float("nan")
            w.writerow([_num(c.p1), _num(c.p2), _num(c1), _num(c2), _num(c.objective), c.phase,
                        int(c.first_order_edge), int(c.second_order_edge)])
        return buf.getvalue()

    def summary(self) -> dict:
        return {
            "model": self.model,
            "params": list(self.names),
            "shape": list(self.shape),
            "ranges": [[float(g[0]), float(g[-1])] for g in self.grids],
            "phase_tol": self.tol,
            "counts": self.counts(),
            "edges": self.edge_counts(),
            **self.meta,
        }


def _num(x) -> str:
    return "nan" if not np.isfinite(x) else repr(float(x))


def _cell(args):
    model, names, v1, v2, box, tol, grid = args
    m = model.with_params(**{names[0]: float(v1), names[1]: float(v2)})
    res = global_minimum(m, box, grid=grid)
    if not res.success:
        return Cell(float(v1), float(v2), res.c, res.objective, "failed")
    even = model.even or tuple(range(model.dim))
    paired = any(abs(res.c[i]) > tol for i in even)
    c = tuple(abs(x) if i in model.even else x for i, x in enumerate(res.c))
    obj = float(res.objective)
    meta = None
    if paired:
        nb = symmetric_branch(m, box)
        if nb.success and nb.objective <= obj + TIE_TOL * (1.0 + abs(obj)):
            # energy tie (e.g. a flat direction): the symmetric state is the minimiser
            return Cell(float(v1), float(v2), tuple(nb.c), float(nb.objective), "normal")
        if nb.success:
            H = m.hessian(np.asarray(nb.c))
            meta = bool(all(H[i, i] > 0 for i in even))
    return Cell(float(v1), float(v2), c, obj, "paired" if paired else "normal", meta)


def _row(args):
    model, names, v1, grid2, box, tol, grid = args
    return [_cell((model, names, v1, v2, box, tol, grid)) for v2 in grid2]


def phase_diagram(model: Model, sweep, box=None, tol: float = PHASE_TOL, jobs: int = 1,
                  grid: int | None = None) -> PhaseDiagram:
    """Sweep two couplings of ``model``; cells are computed row by row and merged in order."""
    if isinstance(sweep, str):
        sweep = parse_sweep(sweep)
    (n1, g1), (n2, g2) = sweep
    for name in (n1, n2):
        if not hasattr(model.params, name):
            raise SweepError(f"model has no parameter {name!r}")
    box = box or model.default_box()
    grid = grid or (201 if model.dim == 1 else 41)
    tasks = [(model, (n1, n2), v1, g2, box, tol, grid) for v1 in g1]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            rows = list(ex.map(_row, tasks))
    else:
        rows = [_row(t) for t in tasks]
    cells = [c for row in rows for c in row]
    pd = PhaseDiagram((n1, n2), (np.asarray(g1), np.asarray(g2)), cells, tol, type(model).__name__)
    mark_edges(pd)
    return pd


def mark_edges(pd: PhaseDiagram) -> None:
    n, m = pd.shape
    for i in range(n):
        for j in range(m):
            a = pd.cell(i, j)
            for di, dj in ((1, 0), (0, 1)):
                if i + di >= n or j + dj >= m:
                    continue
                b = pd.cell(i + di, j + dj)
                if {a.phase, b.phase} != {"normal", "paired"}:
                    continue
                paired = a if a.phase == "paired" else b
                first = bool(paired.normal_metastable)
                for c in (a, b):
                    if first:
                        c.first_order_edge = True
                    else:
                        c.second_order_edge = True


def write_outputs(pd: PhaseDiagram, csv_path, json_path=None, png_path=None) -> dict:
    with open(csv_path, "w", newline="") as fh:
        fh.write(pd.to_csv())
    summary = pd.summary()
    if json_path:
        with open(json_path, "w") as fh:
            json.dump(summary, fh, indent=2, sort_keys=True)
            fh.write("\n")
    if png_path:
        from ..plotting import plot_phase_diagram

        plot_phase_diagram(pd, png_path)
    return summary

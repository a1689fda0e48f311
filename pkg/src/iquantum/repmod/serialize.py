"""Line-oriented text form of a realization; parse(render(x)) reproduces x exactly."""

from __future__ import annotations

from typing import List, Optional

from ..linalg import SparseMatrix, Vec
from ..qfield import ParseError, parse, render
from ..rootdata import RootDatum
from .module import WeightModuleRealization

FORMAT_VERSION = "iquantum-realization/1"


def _ints(xs) -> str:
    return " ".join(str(x) for x in xs)


def render_realization(real: WeightModuleRealization, datum_hash: str = "-") -> str:
    lines = [FORMAT_VERSION, f"datum {datum_hash}", f"label {real.label or '-'}",
             f"highest {_ints(real.highest) if real.highest is not None else '-'}",
             f"dim {real.dim}", f"nodes {real.n}"]
    for k, w in enumerate(real.weights):
        parent = "-"
        word = "-"
        if real.parents is not None and real.parents[k] is not None:
            parent = f"{real.parents[k][0]}:{real.parents[k][1]}"
        if real.provenance is not None:
            word = ",".join(map(str, real.provenance[k])) or "."
        lines.append(f"v {k} wt {_ints(w)} parent {parent} word {word}")
    for name, mats in (("E", real.E), ("F", real.F)):
        for i, m in enumerate(mats):
            for c, col in enumerate(m.cols):
                for r in sorted(col):
                    lines.append(f"{name} {i} {r} {c} {render(col[r])}")
    lines.append("end")
    return "\n".join(lines) + "\n"


def parse_realization(text: str, root: RootDatum) -> WeightModuleRealization:
    lines = text.splitlines()

    def fail(no, msg):
        raise ParseError(msg, lines[no] if no < len(lines) else "", 0, no + 1)

    if not lines or lines[0] != FORMAT_VERSION:
        fail(0, "unknown realization format")
    fields = {}
    for no in range(1, 6):
        key, _, val = lines[no].partition(" ")
        fields[key] = val
    try:
        dim = int(fields["dim"])
        nodes = int(fields["nodes"])
    except (KeyError, ValueError):
        fail(4, "missing dim/nodes header")
    if nodes != root.cartan.n:
        fail(5, "node count does not match the datum")
    highest = None if fields.get("highest", "-") == "-" else tuple(int(x) for x in fields["highest"].split())
    label = "" if fields.get("label", "-") == "-" else fields["label"]
    weights: List[tuple] = []
    parents: List[Optional[tuple]] = []
    prov: List[tuple] = []
    has_prov = True
    no = 6
    for k in range(dim):
        parts = lines[no].split()
        if parts[:2] != ["v", str(k)] or "wt" not in parts:
            fail(no, f"expected vector line {k}")
        a = parts.index("parent")
        weights.append(tuple(int(x) for x in parts[3:a]))
        pa = parts[a + 1]
        parents.append(None if pa == "-" else tuple(int(x) for x in pa.split(":")))
        wd = parts[a + 3]
        if wd == "-":
            has_prov = False
            prov.append(())
        else:
            prov.append(() if wd == "." else tuple(int(x) for x in wd.split(",")))
        no += 1
    cols = {"E": [[dict() for _ in range(dim)] for _ in range(nodes)],
            "F": [[dict() for _ in range(dim)] for _ in range(nodes)]}
    while no < len(lines) and lines[no] != "end":
        parts = lines[no].split(" ", 4)
        if len(parts) != 5 or parts[0] not in cols:
            fail(no, "malformed matrix entry")
        i, r, c = int(parts[1]), int(parts[2]), int(parts[3])
        col: Vec = cols[parts[0]][i][c]
        col[r] = parse(parts[4])
        no += 1
    if no >= len(lines):
        fail(no, "missing end marker")
    E = [SparseMatrix(dim, dim, cols["E"][i]) for i in range(nodes)]
    F = [SparseMatrix(dim, dim, cols["F"][i]) for i in range(nodes)]
    if all(p is None for p in parents):
        parents_out = None
    else:
        parents_out = parents
    return WeightModuleRealization(root, weights, E, F, highest=highest, parents=parents_out,
                                   provenance=prov if has_prov else None, label=label)

"""Free-format MPS dump of a LinearModel, for cross-checking with other solvers.

Layout::

    NAME          <model name>
    ROWS
     N  obj
     L  <row>          (G for >=, E for =)
    COLUMNS
        MARKER  'MARKER'  'INTORG'      (around integer columns)
        <col>  obj  <c_j>
        <col>  <row>  <a_ij>
        MARKER  'MARKER'  'INTEND'
    RHS
        rhs  <row>  <b_i>
    BOUNDS
     LO bnd <col> <lb>    UP / FX / FR / MI as needed
    ENDATA

Names are the model's variable and constraint names with whitespace replaced
by underscores; objective sense is minimise.
"""

from __future__ import annotations

import io
import math

from .model import EQ, GE, LinearModel

_KIND = {EQ: "E", GE: "G"}


def _name(s: str) -> str:
    return "_".join(s.split()) or "_"


def _num(v: float) -> str:
    return repr(float(v)) if v != int(v) else str(int(v))


def model_to_mps(model: LinearModel) -> str:
    out = io.StringIO()
    out.write(f"NAME          {_name(model.name)}\nROWS\n N  obj\n")
    for con in model.constraints:
        out.write(f" {_KIND.get(con.sense, 'L')}  {_name(con.name)}\n")
    by_col: list[list[tuple[str, float]]] = [[] for _ in model.variables]
    for con in model.constraints:
        for j, a in zip(con.index, con.coef):
            by_col[j].append((_name(con.name), a))
    out.write("COLUMNS\n")
    in_int = False
    for j, var in enumerate(model.variables):
        if var.integer != in_int:
            out.write(f"    MARKER  'MARKER'  '{'INTORG' if var.integer else 'INTEND'}'\n")
            in_int = var.integer
        name = _name(var.name)
        if var.obj:
            out.write(f"    {name}  obj  {_num(var.obj)}\n")
        for row, a in by_col[j]:
            out.write(f"    {name}  {row}  {_num(a)}\n")
        if not var.obj and not by_col[j]:
            out.write(f"    {name}  obj  0\n")
    if in_int:
        out.write("    MARKER  'MARKER'  'INTEND'\n")
    out.write("RHS\n")
    for con in model.constraints:
        if con.rhs:
            out.write(f"    rhs  {_name(con.name)}  {_num(con.rhs)}\n")
    out.write("BOUNDS\n")
    for var in model.variables:
        name = _name(var.name)
        if var.lb == var.ub:
            out.write(f" FX bnd {name} {_num(var.lb)}\n")
            continue
        if math.isinf(var.lb) and math.isinf(var.ub):
            out.write(f" FR bnd {name}\n")
            continue
        if math.isinf(var.lb):
            out.write(f" MI bnd {name}\n")
        elif var.lb != 0:
            out.write(f" LO bnd {name} {_num(var.lb)}\n")
        if not math.isinf(var.ub):
            out.write(f" UP bnd {name} {_num(var.ub)}\n")
    out.write("ENDATA\n")
    return out.getvalue()


def write_mps(model: LinearModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(model_to_mps(model))

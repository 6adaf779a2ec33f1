"""
Free-form MPS reader/writer.

Sections: NAME, OBJSENSE, ROWS, COLUMNS (with INTORG/INTEND markers), RHS, BOUNDS, ENDATA.
Fixed-column files, RANGES, SOS and objective constants are rejected. Instance metadata
travels in a `* meta: {json}` comment so that write -> parse is the identity.
"""
import json
import logging
import math
from typing import Dict, List, Optional, Tuple

from predsearch.errors import MpsParseError
from predsearch.models.milp_model import MilpInstance, ObjSense, Row, Sense, VarKind

logger = logging.getLogger(__name__)

META_PREFIX = "* meta:"
_SECTIONS = {"NAME", "OBJSENSE", "ROWS", "COLUMNS", "RHS", "BOUNDS", "ENDATA"}
_UNSUPPORTED = {"RANGES", "SOS", "QUADOBJ", "QMATRIX", "QSECTION", "INDICATORS"}
_ROW_SENSE = {"L": Sense.LE, "G": Sense.GE, "E": Sense.EQ}
_SENSE_TAG = {Sense.LE: "L", Sense.GE: "G", Sense.EQ: "E"}


def _fmt(v: float) -> str:
    return format(v, ".17g")


def _num(tok: str, line_no: int) -> float:
    try:
        v = float(tok)
    except ValueError:
        raise MpsParseError(f"expected a number, got {tok!r}", line_no)
    if math.isnan(v):
        raise MpsParseError("NaN is not a valid MPS value", line_no)
    return v


class _Column:
    __slots__ = ("name", "integer", "obj", "has_obj", "coeffs", "lower", "upper", "line_no")

    def __init__(self, name: str, integer: bool, line_no: int):
        self.name = name
        self.integer = integer
        self.obj = 0.0
        self.has_obj = False
        self.coeffs: Dict[str, float] = {}
        self.lower = 0.0
        self.upper = 1.0 if integer else math.inf
        self.line_no = line_no


def parse_mps(text: str) -> MilpInstance:
    name = "instance"
    sense = ObjSense.MIN
    meta: dict = {}
    obj_row: Optional[str] = None
    free_rows: set = set()
    row_order: List[str] = []
    row_sense: Dict[str, Sense] = {}
    rhs: Dict[str, float] = {}
    columns: Dict[str, _Column] = {}
    col_order: List[str] = []
    in_integer_block = False
    section: Optional[str] = None
    ended = False
    last_line = 0

    for line_no, raw in enumerate(text.splitlines(), start=1):
        last_line = line_no
        if raw.startswith(META_PREFIX):
            try:
                meta = json.loads(raw[len(META_PREFIX):])
            except json.JSONDecodeError as e:
                raise MpsParseError(f"bad meta comment: {e}", line_no)
            continue
        if not raw.strip() or raw.lstrip().startswith("*"):
            continue
        tokens = raw.split()

        if not raw[0].isspace():
            head = tokens[0].upper()
            if head in _UNSUPPORTED:
                raise MpsParseError(f"section {head} is not supported", line_no)
            if head not in _SECTIONS:
                raise MpsParseError(f"malformed section header {tokens[0]!r}", line_no)
            section = head
            if head == "NAME":
                name = tokens[1] if len(tokens) > 1 else name
            elif head == "OBJSENSE" and len(tokens) > 1:
                sense = _parse_objsense(tokens[1], line_no)
            elif head == "ENDATA":
                ended = True
                break
            elif len(tokens) > 1:
                raise MpsParseError(f"unexpected tokens after {head}", line_no)
            continue

        if section is None or section == "NAME":
            raise MpsParseError("data line outside of a section", line_no)

        if section == "OBJSENSE":
            sense = _parse_objsense(tokens[0], line_no)

        elif section == "ROWS":
            if len(tokens) != 2:
                raise MpsParseError("ROWS entries need a type and a name", line_no)
            kind, rname = tokens[0].upper(), tokens[1]
            if rname in row_sense or rname == obj_row or rname in free_rows:
                raise MpsParseError(f"duplicate row {rname!r}", line_no)
            if kind == "N":
                if obj_row is None:
                    obj_row = rname
                else:
                    free_rows.add(rname)
            elif kind in _ROW_SENSE:
                row_sense[rname] = _ROW_SENSE[kind]
                row_order.append(rname)
            else:
                raise MpsParseError(f"unknown row type {kind!r}", line_no)

        elif section == "COLUMNS":
            if len(tokens) >= 3 and tokens[1].strip("'").upper() == "MARKER":
                marker = tokens[2].strip("'").upper()
                if marker == "INTORG":
                    in_integer_block = True
                elif marker == "INTEND":
                    in_integer_block = False
                else:
                    raise MpsParseError(f"unknown marker {tokens[2]!r}", line_no)
                continue
            if len(tokens) not in (3, 5):
                raise MpsParseError("COLUMNS entries are: column row value [row value]", line_no)
            cname = tokens[0]
            col = columns.get(cname)
            if col is None:
                col = _Column(cname, in_integer_block, line_no)
                columns[cname] = col
                col_order.append(cname)
            for k in range(1, len(tokens), 2):
                rname, val = tokens[k], _num(tokens[k + 1], line_no)
                if not math.isfinite(val):
                    raise MpsParseError("coefficients must be finite", line_no)
                if rname == obj_row:
                    if col.has_obj:
                        raise MpsParseError(f"duplicate coefficient ({rname}, {cname})", line_no)
                    col.has_obj = True
                    col.obj = val
                elif rname in free_rows:
                    continue
                elif rname in row_sense:
                    if rname in col.coeffs:
                        raise MpsParseError(f"duplicate coefficient ({rname}, {cname})", line_no)
                    col.coeffs[rname] = val
                else:
                    raise MpsParseError(f"unknown row {rname!r}", line_no)

        elif section == "RHS":
            if len(tokens) in (3, 5):
                pairs = tokens[1:]
            elif len(tokens) in (2, 4):
                pairs = tokens
            else:
                raise MpsParseError("RHS entries are: set row value [row value]", line_no)
            for k in range(0, len(pairs), 2):
                rname, val = pairs[k], _num(pairs[k + 1], line_no)
                if rname == obj_row:
                    raise MpsParseError("objective constants are not supported", line_no)
                if rname in free_rows:
                    continue
                if rname not in row_sense:
                    raise MpsParseError(f"unknown row {rname!r}", line_no)
                if rname in rhs:
                    raise MpsParseError(f"duplicate rhs for row {rname!r}", line_no)
                if not math.isfinite(val):
                    raise MpsParseError("rhs must be finite", line_no)
                rhs[rname] = val

        elif section == "BOUNDS":
            _apply_bound(tokens, columns, line_no)

    if not ended:
        raise MpsParseError("missing ENDATA", last_line + 1)
    if obj_row is None:
        raise MpsParseError("no objective (N) row declared", last_line)

    # binaries first, each group in order of appearance
    binaries = [c for c in col_order if columns[c].integer]
    continuous = [c for c in col_order if not columns[c].integer]
    ordered = binaries + continuous
    index = {c: j for j, c in enumerate(ordered)}

    for cname in binaries:
        col = columns[cname]
        if col.lower not in (0.0, 1.0) or col.upper not in (0.0, 1.0) or col.lower > col.upper:
            raise MpsParseError(
                f"integer column {cname!r} has bounds [{col.lower}, {col.upper}]; "
                "only binary integers are supported", col.line_no)

    row_coeffs: Dict[str, Dict[int, float]] = {r: {} for r in row_order}
    for cname in ordered:
        for rname, val in columns[cname].coeffs.items():
            if val == 0.0:
                continue
            row_coeffs[rname][index[cname]] = val

    sign = -1.0 if sense == ObjSense.MAX else 1.0
    rows = [
        Row(coeffs=dict(sorted(row_coeffs[r].items())), rhs=rhs.get(r, 0.0), sense=row_sense[r])
        for r in row_order
    ]
    try:
        inst = MilpInstance(
            name=name,
            objective=[sign * columns[c].obj if columns[c].obj != 0.0 else 0.0 for c in ordered],
            sense_flag=sense,
            rows=rows,
            lower=[columns[c].lower for c in ordered],
            upper=[columns[c].upper for c in ordered],
            var_kind=[VarKind.BINARY if columns[c].integer else VarKind.CONTINUOUS for c in ordered],
            var_names=ordered,
            row_names=row_order,
            meta=meta,
        )
    except ValueError as e:
        raise MpsParseError(f"invalid instance: {e}")
    logger.debug(f"Parsed MPS {name}: n={inst.num_vars} q={inst.num_binary} m={inst.num_rows}")
    return inst


def _parse_objsense(tok: str, line_no: int) -> ObjSense:
    t = tok.upper()
    if t in ("MAX", "MAXIMIZE"):
        return ObjSense.MAX
    if t in ("MIN", "MINIMIZE"):
        return ObjSense.MIN
    raise MpsParseError(f"unknown objective sense {tok!r}", line_no)


def _apply_bound(tokens: List[str], columns: Dict[str, _Column], line_no: int) -> None:
    kind = tokens[0].upper()
    needs_value = kind in ("UP", "LO", "FX")
    if kind not in ("UP", "LO", "FX", "FR", "MI", "PL", "BV"):
        raise MpsParseError(f"unsupported bound type {kind!r}", line_no)
    if len(tokens) not in ((4,) if needs_value else (3, 4)):
        raise MpsParseError(f"malformed {kind} bound", line_no)
    cname = tokens[2]
    col = columns.get(cname)
    if col is None:
        raise MpsParseError(f"unknown column {cname!r}", line_no)
    val = _num(tokens[3], line_no) if needs_value else None
    if kind == "UP":
        col.upper = val
    elif kind == "LO":
        col.lower = val
    elif kind == "FX":
        col.lower = col.upper = val
    elif kind == "FR":
        col.lower, col.upper = -math.inf, math.inf
    elif kind == "MI":
        col.lower = -math.inf
    elif kind == "PL":
        col.upper = math.inf
    elif kind == "BV":
        col.integer = True
        col.lower, col.upper = 0.0, 1.0


def write_mps(inst: MilpInstance) -> str:
    out: List[str] = []
    if inst.meta:
        out.append(META_PREFIX + " " + json.dumps(inst.meta, sort_keys=True))
    out.append(f"NAME {inst.name}")
    if inst.sense_flag == ObjSense.MAX:
        out.append("OBJSENSE")
        out.append("    MAX")
    obj_name = "OBJ"
    while obj_name in inst.row_names:
        obj_name += "_"
    out.append("ROWS")
    out.append(f" N  {obj_name}")
    for rname, row in zip(inst.row_names, inst.rows):
        out.append(f" {_SENSE_TAG[row.sense]}  {rname}")

    by_col: List[List[Tuple[str, float]]] = [[] for _ in range(inst.num_vars)]
    for rname, row in zip(inst.row_names, inst.rows):
        for j, a in row.coeffs.items():
            by_col[j].append((rname, a))

    sign = -1.0 if inst.sense_flag == ObjSense.MAX else 1.0
    out.append("COLUMNS")
    q = inst.num_binary
    for j, cname in enumerate(inst.var_names):
        if j == 0 and q > 0:
            out.append("    MARKER  'MARKER'  'INTORG'")
        obj = sign * inst.objective[j] if inst.objective[j] != 0.0 else 0.0
        out.append(f"    {cname}  {obj_name}  {_fmt(obj)}")
        for rname, a in by_col[j]:
            out.append(f"    {cname}  {rname}  {_fmt(a)}")
        if j == q - 1:
            out.append("    MARKER  'MARKER'  'INTEND'")

    out.append("RHS")
    for rname, row in zip(inst.row_names, inst.rows):
        if row.rhs != 0.0:
            out.append(f"    RHS  {rname}  {_fmt(row.rhs)}")

    out.append("BOUNDS")
    for j, cname in enumerate(inst.var_names):
        lo, up = inst.lower[j], inst.upper[j]
        if inst.var_kind[j] == VarKind.BINARY:
            if lo == up:
                out.append(f" FX BND  {cname}  {_fmt(lo)}")
            else:
                out.append(f" BV BND  {cname}")
            continue
        if lo == up:
            out.append(f" FX BND  {cname}  {_fmt(lo)}")
        elif lo == -math.inf and up == math.inf:
            out.append(f" FR BND  {cname}")
        else:
            if lo == -math.inf:
                out.append(f" MI BND  {cname}")
            elif lo != 0.0:
                out.append(f" LO BND  {cname}  {_fmt(lo)}")
            if up != math.inf:
                out.append(f" UP BND  {cname}  {_fmt(up)}")
    out.append("ENDATA")
    return "\n".join(out) + "\n"


def read_mps_file(path: str) -> MilpInstance:
    with open(path, "r", encoding="utf-8") as f:
        return parse_mps(f.read())


def write_mps_file(inst: MilpInstance, path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(write_mps(inst))

"""Problem-file I/O: the two on-disk input formats and the built-in instance.

A problem file carries the nonnegative matrix H plus whatever optional
blocks the analyses need: the update vectors v and w, a left factor C
for the flow and normal-case checks, and a domination matrix K for the
disk criterion. Two formats are accepted:

* a JSON document with keys "H", "v", "w", "C", "K", "name",
  "description" (matrices as arrays of row arrays);
* a plain whitespace format: first line n, then the n rows of H, then
  optional blocks tagged "v:" and "w:" holding n numbers each.

Blank lines are ignored and '#' starts a comment in the plain format.
"""

import dataclasses
import json
import math
import re

import numpy as np

from .errors import DomainError, ParseError
from .linalg import as_square_matrix, as_vector

_MATRIX_KEYS = ("H", "C", "K")
_VECTOR_KEYS = ("v", "w")
_TEXT_KEYS = ("name", "description")
_TOKEN = re.compile(r"\S+")


@dataclasses.dataclass(frozen=True, eq=False)
class ProblemFile:
    """One analysis input; H is required, everything else optional."""

    H: np.ndarray
    v: np.ndarray | None = None
    w: np.ndarray | None = None
    C: np.ndarray | None = None
    K: np.ndarray | None = None
    name: str = ""
    description: str = ""

    def __post_init__(self):
        hm = as_square_matrix(self.H, "H")
        object.__setattr__(self, "H", hm)
        n = hm.shape[0]
        for key in _VECTOR_KEYS:
            val = getattr(self, key)
            if val is not None:
                object.__setattr__(self, key, as_vector(val, n, key))
        for key in ("C", "K"):
            val = getattr(self, key)
            if val is not None:
                mat = as_square_matrix(val, key)
                if mat.shape[0] != n:
                    raise DomainError(
                        f"{key} must be {n} x {n} to match H, got {mat.shape}"
                    )
                object.__setattr__(self, key, mat)

    @property
    def n(self):
        return self.H.shape[0]

    def __repr__(self):
        blocks = [k for k in ("v", "w", "C", "K") if getattr(self, k) is not None]
        label = f" name={self.name!r}" if self.name else ""
        return f"ProblemFile(n={self.n}, blocks={blocks}{label})"


def parse(path):
    """Read and parse a problem file; see the module docstring for formats."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    return parse_string(text)


def parse_string(text):
    """Parse a problem document from a string (format auto-detected)."""
    stripped = text.lstrip()
    if not stripped:
        raise ParseError("empty problem document")
    if stripped[0] in "{[":
        return _parse_json(text)
    return _parse_plain(text)


def emit(problem):
    """Serialize to the JSON format; parse(emit(p)) reproduces p exactly."""
    if not isinstance(problem, ProblemFile):
        raise DomainError("emit expects a ProblemFile")
    doc = {}
    if problem.name:
        doc["name"] = problem.name
    if problem.description:
        doc["description"] = problem.description
    doc["H"] = [[float(x) for x in row] for row in problem.H]
    for key in _VECTOR_KEYS:
        vec = getattr(problem, key)
        if vec is not None:
            doc[key] = [float(x) for x in vec]
    for key in ("C", "K"):
        mat = getattr(problem, key)
        if mat is not None:
            doc[key] = [[float(x) for x in row] for row in mat]
    return json.dumps(doc, indent=2) + "\n"


def _parse_json(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"invalid document: {exc.msg}", line=exc.lineno, column=exc.colno
        ) from exc
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object")
    known = set(_MATRIX_KEYS) | set(_VECTOR_KEYS) | set(_TEXT_KEYS)
    unknown = sorted(set(doc) - known)
    if unknown:
        raise ParseError("unknown keys: " + ", ".join(unknown))
    if "H" not in doc:
        raise ParseError('missing required key "H"')

    fields = {}
    for key in _TEXT_KEYS:
        if key in doc:
            if not isinstance(doc[key], str):
                raise ParseError(f'"{key}" must be a string')
            fields[key] = doc[key]
    for key in _MATRIX_KEYS:
        if key in doc:
            fields[key] = _number_grid(doc[key], key)
    for key in _VECTOR_KEYS:
        if key in doc:
            fields[key] = _number_row(doc[key], key)

    n = len(fields["H"])
    for key, val in fields.items():
        if key in _TEXT_KEYS:
            continue
        rows = val if key in _MATRIX_KEYS else [val]
        for i, row in enumerate(rows):
            if len(row) != n:
                where = f'"{key}" row {i}' if key in _MATRIX_KEYS else f'"{key}"'
                raise ParseError(
                    f"{where} has {len(row)} entries, expected {n} to match H"
                )
    return ProblemFile(**fields)


def _number_grid(obj, key):
    if not isinstance(obj, list) or not obj:
        raise ParseError(f'"{key}" must be a non-empty array of rows')
    return [_number_row(row, f'"{key}" row {i}', quoted=False) for i, row in enumerate(obj)]


def _number_row(obj, label, quoted=True):
    name = f'"{label}"' if quoted else label
    if not isinstance(obj, list) or not obj:
        raise ParseError(f"{name} must be a non-empty array of numbers")
    out = []
    for j, cell in enumerate(obj):
        if isinstance(cell, bool) or not isinstance(cell, (int, float)):
            raise ParseError(f"{name} entry {j} is not a number: {cell!r}")
        if not math.isfinite(cell):
            raise ParseError(f"{name} entry {j} is not finite")
        out.append(float(cell))
    return out


def _scan_lines(text):
    """Nonblank lines as lists of (token, line_no, column), comments stripped."""
    lines = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        toks = [(m.group(), ln, m.start() + 1) for m in _TOKEN.finditer(body)]
        if toks:
            lines.append(toks)
    return lines


def _number_token(tok, ln, col, what):
    try:
        val = float(tok)
    except ValueError:
        raise ParseError(f"expected {what}, found {tok!r}", line=ln, column=col) from None
    if not math.isfinite(val):
        raise ParseError(f"{what} must be finite, found {tok!r}", line=ln, column=col)
    return val


def _parse_plain(text):
    lines = _scan_lines(text)
    if not lines:
        raise ParseError("empty problem document")

    head = lines[0]
    tok, ln, col = head[0]
    if not re.fullmatch(r"[+-]?\d+", tok) or int(tok) < 1:
        raise ParseError(
            f"first line must be the positive dimension n, found {tok!r}",
            line=ln,
            column=col,
        )
    n = int(tok)
    if len(head) > 1:
        _, ln, col = head[1]
        raise ParseError("dimension line must hold a single number", line=ln, column=col)

    if len(lines) < 1 + n:
        last = lines[-1][-1]
        raise ParseError(
            f"expected {n} rows of H, found {len(lines) - 1}", line=last[1]
        )
    rows = []
    for i in range(n):
        row_toks = lines[1 + i]
        if len(row_toks) != n:
            tok, ln, col = row_toks[min(n, len(row_toks) - 1)]
            raise ParseError(
                f"row {i + 1} of H has {len(row_toks)} entries, expected {n}",
                line=ln,
                column=col if len(row_toks) > n else col + len(tok),
            )
        rows.append(
            [_number_token(t, ln, c, f"entry of H row {i + 1}") for t, ln, c in row_toks]
        )

    vectors = {}
    pending = None  # (key, collected) for a vector continuing across lines
    for row_toks in lines[1 + n :]:
        start = 0
        tok, ln, col = row_toks[0]
        if pending is None:
            key = tok.rstrip(":")
            if tok not in ("v:", "w:"):
                raise ParseError(f"unexpected token {tok!r}", line=ln, column=col)
            if key in vectors:
                raise ParseError(f"duplicate block {tok!r}", line=ln, column=col)
            vectors[key] = []
            pending = key
            start = 1
        bucket = vectors[pending]
        for tok, ln, col in row_toks[start:]:
            if len(bucket) == n:
                raise ParseError(
                    f"block '{pending}:' has more than {n} entries", line=ln, column=col
                )
            bucket.append(_number_token(tok, ln, col, f"entry of {pending}"))
        if len(bucket) == n:
            pending = None

    if pending is not None:
        last = lines[-1][-1]
        raise ParseError(
            f"block '{pending}:' has {len(vectors[pending])} entries, expected {n}",
            line=last[1],
        )
    return ProblemFile(H=rows, **vectors)


# Built-in regression instance: a 6 x 6 nonnegative H with simple Perron
# root and positive update vectors whose rank-one update rho(H) I - H
# + v w^T has an eigenvalue pair strictly in the left half plane. It is
# kept as a data document (not constructed in code) so the file shipped
# under problems/ and the built-in are byte-identical.
COUNTEREXAMPLE_DOC = """\
{
  "name": "builtin-counterexample",
  "description": "6 x 6 nonnegative H, rho(H) = 1, v, w > 0: the update rho(H) I - H + v w^T is not positive stable, so positivity of the data alone cannot guarantee stability.",
  "H": [
    [1.0, 1.0, 1.0, 1.0, 1.0, 1.0],
    [0.0, 0.5, 1.0, 1.0, 1.0, 1.0],
    [0.0, 0.0, 0.0, 0.35, 1.0, 1.0],
    [0.0, 0.0, 0.35, 0.0, 1.0, 1.0],
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.15],
    [0.0, 0.0, 0.0, 0.0, 0.15, 0.0]
  ],
  "v": [0.05, 0.1, 0.05, 0.15, 0.25, 0.2],
  "w": [0.65, 0.15, 0.1, 0.05, 0.3, 0.8]
}
"""


def counterexample_problem():
    """The built-in unstable instance, parsed from its data document."""
    return parse_string(COUNTEREXAMPLE_DOC)

"""Text formats for instances and results, with line-numbered parse errors."""
import os
import tempfile
from fractions import Fraction

import numpy as np

from .balanced import BalancedWitness, NotFound
from .errors import FraccutError
from .geometry import AffineFunctional, ColoredPointSet, Halfspace, SideAssignment
from .grid import DensityGrid


class ParseError(FraccutError, ValueError):
    def __init__(self, message, line=None, path=None):
        where = f"{path or '<input>'}:{line}: " if line is not None else f"{path or '<input>'}: "
        super().__init__(where + message)
        self.line = line
        self.path = path


def write_atomic(path, text):
    """Write ``text`` to ``path`` through a temporary file and a rename."""
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _lines(text):
    """Non-blank, non-comment lines as (line number, tokens)."""
    out = []
    for no, raw in enumerate(text.splitlines(), 1):
        s = raw.split("#", 1)[0].strip()
        if s:
            out.append((no, s.split()))
    return out


def parse_rational(tok, line=None, path=None):
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"not a rational number: {tok!r}", line, path) from None


def fmt_rational(x):
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def fmt_number(x):
    if isinstance(x, (Fraction, int, np.integer)):
        return fmt_rational(x)
    return repr(float(x))


def _int(tok, what, line, path):
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"{what} must be an integer, got {tok!r}", line, path) from None


# ---------------------------------------------------------------------------
# point sets
# ---------------------------------------------------------------------------

def format_points(s):
    n = len(s) // s.colors_count
    out = [f"dim {s.dim} colors {s.colors_count} {n}"]
    for p, c in zip(s.points, s.colors):
        out.append(" ".join([str(c)] + [fmt_rational(v) for v in p]))
    return "\n".join(out) + "\n"


def parse_points(text, path=None, check_general_position=True):
    """Header "dim d colors k n" (n points per color; "n 4" is also accepted), then "color x_1 .. x_d"."""
    lines = _lines(text)
    if not lines:
        raise ParseError("empty point file", None, path)
    no, head = lines[0]
    if head[:1] != ["dim"] or len(head) < 4 or head[2] != "colors":
        raise ParseError('header must read "dim d colors k n"', no, path)
    d = _int(head[1], "dim", no, path)
    k = _int(head[3], "colors", no, path)
    rest = head[4:]
    if rest[:1] == ["n"]:
        rest = rest[1:]
    if len(rest) != 1:
        raise ParseError('header must read "dim d colors k n"', no, path)
    n = _int(rest[0], "n", no, path)
    if d < 1 or k != d + 1 or n < 1:
        raise ParseError(f"need d >= 1, colors = d + 1 and n >= 1 (got d={d}, colors={k}, n={n})", no, path)
    points, colors = [], []
    for no, toks in lines[1:]:
        if len(toks) != d + 1:
            raise ParseError(f"expected a color and {d} coordinates, got {len(toks)} fields", no, path)
        c = _int(toks[0], "color", no, path)
        if not 0 <= c < k:
            raise ParseError(f"color {c} outside 0..{k - 1}", no, path)
        colors.append(c)
        points.append(tuple(parse_rational(t, no, path) for t in toks[1:]))
    if len(points) != n * k:
        raise ParseError(f"expected {n * k} points ({n} per color), found {len(points)}", lines[-1][0], path)
    try:
        return ColoredPointSet(points, colors, check_general_position=check_general_position)
    except ValueError as e:
        raise ParseError(str(e), None, path) from None


# ---------------------------------------------------------------------------
# grids
# ---------------------------------------------------------------------------

def format_grid(g):
    if g.dim == 1:
        head = f"dim 1 {g.shape[0]} {fmt_rational(g.origin[0])} {fmt_rational(g.spacing[0])}"
    else:
        ny, nx = g.shape
        head = (f"dim 2 {nx} {ny} {fmt_rational(g.origin[0])} {fmt_rational(g.origin[1])} "
                f"{fmt_rational(g.spacing[0])} {fmt_rational(g.spacing[1])}")
    fmt = fmt_rational if g.is_exact else (lambda v: repr(float(v)))
    rows = [g.values] if g.dim == 1 else list(g.values)
    return head + "\n" + "\n".join(" ".join(fmt(v) for v in row) for row in rows) + "\n"


def parse_grid(text, path=None, exact=True):
    """Header "dim d nx [ny] x0 [y0] hx [hy]" then row-major values.

    ``exact=True`` keeps every value as a Fraction (decimals are read as exact
    decimal fractions); otherwise values become doubles.
    """
    lines = _lines(text)
    if not lines:
        raise ParseError("empty grid file", None, path)
    no, head = lines[0]
    if head[:1] != ["dim"] or len(head) < 2:
        raise ParseError('header must read "dim d nx [ny] x0 [y0] hx [hy]"', no, path)
    d = _int(head[1], "dim", no, path)
    if d not in (1, 2):
        raise ParseError(f"only 1D and 2D grids are supported, got dim {d}", no, path)
    if len(head) != 2 + 3 * d:
        raise ParseError(f"a {d}D grid header has {3 * d} fields after the dimension", no, path)
    shape = [_int(t, "cell count", no, path) for t in head[2:2 + d]]
    if any(v < 1 for v in shape):
        raise ParseError("cell counts must be positive", no, path)
    origin = [parse_rational(t, no, path) for t in head[2 + d:2 + 2 * d]]
    spacing = [parse_rational(t, no, path) for t in head[2 + 2 * d:]]
    if any(h <= 0 for h in spacing):
        raise ParseError("cell sizes must be positive", no, path)
    vals = []
    for no, toks in lines[1:]:
        vals.extend(parse_rational(t, no, path) for t in toks)
    total = int(np.prod(shape))
    if len(vals) != total:
        raise ParseError(f"expected {total} values, found {len(vals)}", lines[-1][0], path)
    arr = np.array(vals, dtype=object) if exact else np.array([float(v) for v in vals])
    if d == 2:
        arr = arr.reshape(shape[1], shape[0])
    return DensityGrid(tuple(origin), tuple(spacing), arr)


# ---------------------------------------------------------------------------
# witnesses and certified negatives
# ---------------------------------------------------------------------------

def format_witness(w):
    h = w.halfspace.functional
    coeffs = h.as_tuple() if w.halfspace.sense > 0 else (-h).as_tuple()
    assign = " ".join(f"{i}:{'+' if s > 0 else '-'}" for i, s in w.assignment.sides)
    counts = " ".join(f"{p}/{m}" for p, m in w.side_counts)
    return f"functional: {' '.join(fmt_number(c) for c in coeffs)} | assignment: {assign} | counts: {counts}\n"


def format_not_found(nf):
    return f"not-found: dichotomies {nf.dichotomies_inspected} | subsets: {nf.subsets_inspected}\n"


def _fields(line, no, path, names):
    parts = [p.strip() for p in line.split("|")]
    out = {}
    for part in parts:
        key, sep, val = part.partition(":")
        if not sep:
            raise ParseError(f"field without a name: {part!r}", no, path)
        out[key.strip()] = val.split()
    missing = [n for n in names if n not in out]
    if missing:
        raise ParseError(f"missing field(s): {', '.join(missing)}", no, path)
    return out


def parse_witness(text, path=None):
    """Inverse of :func:`format_witness`; counts read as "plus/minus" per color."""
    lines = [(no, raw) for no, raw in enumerate(text.splitlines(), 1) if raw.strip()]
    if len(lines) != 1:
        raise ParseError("a witness file holds exactly one line", None, path)
    no, line = lines[0]
    if line.startswith("not-found"):
        f = _fields(line, no, path, ["not-found", "subsets"])
        try:
            return NotFound(int(f["not-found"][1]), int(f["subsets"][0]))
        except (IndexError, ValueError):
            raise ParseError("malformed not-found line", no, path) from None
    f = _fields(line, no, path, ["functional", "assignment", "counts"])
    coeffs = [parse_rational(t, no, path) for t in f["functional"]]
    if len(coeffs) < 2:
        raise ParseError("functional needs d + 1 coefficients", no, path)
    sides = []
    for t in f["assignment"]:
        i, sep, s = t.partition(":")
        if not sep or s not in ("+", "-"):
            raise ParseError(f"assignment entries look like 3:+ or 4:-, got {t!r}", no, path)
        sides.append((_int(i, "index", no, path), 1 if s == "+" else -1))
    counts = []
    for t in f["counts"]:
        p, sep, m = t.partition("/")
        if not sep:
            raise ParseError(f"counts look like plus/minus, got {t!r}", no, path)
        counts.append((_int(p, "count", no, path), _int(m, "count", no, path)))
    H = Halfspace(AffineFunctional(tuple(coeffs[:-1]), coeffs[-1]), 1)
    return BalancedWitness(H, SideAssignment(sides), tuple(counts))


# ---------------------------------------------------------------------------
# continuous results
# ---------------------------------------------------------------------------

def format_fraction_cut(u, fractions, t, residual):
    return (f"u: {' '.join(fmt_number(v) for v in u)} | fractions: {' '.join(fmt_number(v) for v in fractions)}"
            f" | t: {fmt_number(t)} | residual: {fmt_number(residual)}\n")


def parse_fraction_cut(text, path=None):
    """(u, fractions, t, residual) from a result line."""
    lines = [(no, raw) for no, raw in enumerate(text.splitlines(), 1) if raw.strip()]
    if len(lines) != 1:
        raise ParseError("a cut result holds exactly one line", None, path)
    no, line = lines[0]
    f = _fields(line, no, path, ["u", "fractions", "t", "residual"])
    num = lambda t: float(parse_rational(t, no, path))  # noqa: E731
    return (tuple(num(v) for v in f["u"]), tuple(num(v) for v in f["fractions"]),
            num(f["t"][0]), num(f["residual"][0]))


def format_halfspace(H, fractions=None):
    f = H.functional
    coeffs = f.as_tuple() if H.sense > 0 else (-f).as_tuple()
    s = f"halfspace: {' '.join(fmt_number(c) for c in coeffs)} | kind: {H.kind}"
    if fractions is not None:
        s += f" | fractions: {' '.join(fmt_number(v) for v in fractions)}"
    return s + "\n"


def parse_halfspace(text, path=None):
    lines = [(no, raw) for no, raw in enumerate(text.splitlines(), 1) if raw.strip()]
    if not lines:
        raise ParseError("empty halfspace file", None, path)
    no, line = lines[0]
    f = _fields(line, no, path, ["halfspace", "kind"])
    coeffs = [parse_rational(t, no, path) for t in f["halfspace"]]
    kind = f["kind"][0] if f["kind"] else "none"
    fr = tuple(float(parse_rational(t, no, path)) for t in f.get("fractions", []))
    return Halfspace(AffineFunctional(tuple(coeffs[:-1]), coeffs[-1]), 1, kind), fr


# ---------------------------------------------------------------------------
# partitions, windows, intervals
# ---------------------------------------------------------------------------

def format_partition(p):
    lines = [" ".join(fmt_number(v) for v in f.as_row()) for f in p.functionals]
    if p.cell_measures is not None:
        lines.append("cell-measures")
        lines += [" ".join(fmt_number(v) for v in row) for row in np.asarray(p.cell_measures)]
    if p.residual is not None:
        lines.append(f"residual {fmt_number(p.residual)}")
    return "\n".join(lines) + "\n"


def parse_partition(text, path=None):
    from .window import GVPartition, QuadraticFunctional
    lines = _lines(text)
    funcs, matrix, residual = [], [], None
    mode = "f"
    for no, toks in lines:
        if toks == ["cell-measures"]:
            mode = "m"
            continue
        if toks[0] == "residual":
            residual = float(parse_rational(toks[1], no, path)) if len(toks) == 2 else None
            if residual is None:
                raise ParseError("residual line needs one value", no, path)
            continue
        vals = [float(parse_rational(t, no, path)) for t in toks]
        if mode == "f":
            if len(vals) != 4:
                raise ParseError(f'functional lines read "a0 a1 a2 b", got {len(vals)} fields', no, path)
            funcs.append(QuadraticFunctional.from_row(vals))
        else:
            matrix.append(vals)
    if len(funcs) < 2:
        raise ParseError("a partition needs at least two functionals", None, path)
    if matrix and len(matrix) != len(funcs):
        raise ParseError("cell-measure matrix needs one row per functional", None, path)
    return GVPartition(tuple(funcs), np.array(matrix) if matrix else None, residual)


def format_window(w):
    out = [f"stages {len(w.partitions)}"]
    for p, c in zip(w.partitions, w.cells):
        out.append(f"stage cell {c.index}")
        out.append(format_partition(p).rstrip("\n"))
    out.append(f"fractions: {' '.join(fmt_number(v) for v in w.fractions)}")
    return "\n".join(out) + "\n"


def parse_window(text, path=None):
    from .window import ConvexWindow, extract_convex_cell
    lines = text.splitlines()
    blocks, fractions, cur = [], (), None
    for no, raw in enumerate(lines, 1):
        s = raw.strip()
        if not s or s.startswith("stages"):
            continue
        if s.startswith("stage cell"):
            cur = []
            blocks.append(cur)
        elif s.startswith("fractions:"):
            fractions = tuple(float(parse_rational(t, no, path)) for t in s.split(":", 1)[1].split())
        elif cur is None:
            raise ParseError("content before the first stage", no, path)
        else:
            cur.append(raw)
    parts = tuple(parse_partition("\n".join(b), path) for b in blocks)
    return ConvexWindow(tuple(extract_convex_cell(p) for p in parts), parts, fractions)


def format_interval(w):
    return f"{fmt_rational(w.a)} {fmt_rational(w.b)}\n"


def parse_interval(text, path=None):
    lines = _lines(text)
    if len(lines) != 1 or len(lines[0][1]) != 2:
        raise ParseError('an interval file holds one line "a b"', lines[0][0] if lines else None, path)
    no, (a, b) = lines[0]
    return parse_rational(a, no, path), parse_rational(b, no, path)


def read_text(path):
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as e:
        raise ParseError(f"cannot read: {e.strerror}", None, path) from None

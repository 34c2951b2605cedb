"""Deterministic text serialization and input-file parsing for the CLI.

All floating-point output goes through ``fmt_float`` (17 significant digits,
lowercase exponent), so identical inputs produce byte-identical CSV and JSON
artifacts across runs and platforms with the same BLAS results.
"""

from __future__ import annotations

import json
import math
import re

import numpy as np

from .errors import ConstructionError, ParseError

FLOAT_FMT = "%.16e"
_SENTINEL = chr(0) + "f:"  # never appears in normal data
_SENTINEL_RE = re.compile(r'"\\u0000f:([^"]*)"')


def fmt_float(x: float) -> str:
    return FLOAT_FMT % float(x)


def _wrap(obj):
    """Recursively replace floats with sentinel strings for exact formatting."""
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return "inf" if x > 0 else "-inf" if x < 0 else "nan"
        return _SENTINEL + fmt_float(x)
    if isinstance(obj, (complex, np.complexfloating)):
        c = complex(obj)
        return {"re": _wrap(c.real), "im": _wrap(c.imag)}
    if isinstance(obj, str):
        return obj
    if isinstance(obj, np.ndarray):
        return _wrap(obj.tolist())
    if isinstance(obj, dict):
        return {str(k): _wrap(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_wrap(v) for v in obj]
    return str(obj)


def json_dumps(obj) -> str:
    """JSON with every float rendered through ``fmt_float``."""
    text = json.dumps(_wrap(obj), indent=2, ensure_ascii=True)
    return _SENTINEL_RE.sub(r"\1", text) + "\n"


def format_cell(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (bool,)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return fmt_float(float(value))


def write_csv(path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format_cell(c) for c in row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def parse_scalar(token: str, line: int | None = None, column: int | None = None) -> complex:
    """One matrix/state entry: ``a``, ``bi``, or ``a+bi`` (also ``a-bi``).

    The imaginary unit is written ``i``; scientific notation is accepted in
    both parts.
    """
    t = token.strip()
    if not t or "j" in t or "J" in t or " " in t:
        raise ParseError(f"bad numeric entry {token!r}", line=line, column=column)
    try:
        value = complex(t.replace("i", "j").replace("I", "j"))
    except ValueError:
        raise ParseError(f"bad numeric entry {token!r}", line=line, column=column) from None
    if not (np.isfinite(value.real) and np.isfinite(value.imag)):
        raise ParseError(f"non-finite entry {token!r}", line=line, column=column)
    return value


def parse_state_text(text: str) -> np.ndarray:
    """Comma- or whitespace-separated amplitude list -> complex vector."""
    tokens = [tok for tok in re.split(r"[,\s]+", text.strip()) if tok]
    if not tokens:
        raise ParseError("empty state amplitude list")
    return np.array([parse_scalar(tok) for tok in tokens], dtype=complex)


def parse_matrix_text(text: str, source: str = "<matrix>") -> np.ndarray:
    """Parse the matrix file format:

        dim <n>
        a11 a12 ... a1n
        ...
        an1 ...     ann

    Blank lines and ``#`` comments are skipped. Entries use the grammar of
    ``parse_scalar``. The matrix must be conjugate-symmetric entrywise to
    1e-12; violations name the offending entry pair.
    """
    rows: list[list[complex]] = []
    dim: int | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if not stripped:
            continue
        if dim is None:
            parts = stripped.split()
            if len(parts) != 2 or parts[0] != "dim":
                raise ParseError(
                    f"{source}: expected header 'dim <n>', got {stripped!r}", line=lineno, column=1)
            try:
                dim = int(parts[1])
            except ValueError:
                raise ParseError(f"{source}: bad dimension {parts[1]!r}",
                                 line=lineno, column=len("dim ") + 1) from None
            if dim < 1:
                raise ParseError(f"{source}: dim must be >= 1, got {dim}", line=lineno, column=5)
            continue
        tokens = stripped.split()
        if len(tokens) != dim:
            raise ParseError(
                f"{source}: row {len(rows) + 1} has {len(tokens)} entries, expected {dim}",
                line=lineno, column=1)
        row = []
        pos = 0
        for tok in tokens:
            col = raw.index(tok, pos) + 1
            pos = col - 1 + len(tok)
            row.append(parse_scalar(tok, line=lineno, column=col))
        rows.append(row)
        if len(rows) == dim:
            break
    if dim is None:
        raise ParseError(f"{source}: missing 'dim <n>' header")
    if len(rows) != dim:
        raise ParseError(f"{source}: expected {dim} rows, found {len(rows)}")
    m = np.array(rows, dtype=complex)
    asym = np.abs(m - m.conj().T)
    worst = float(asym.max())
    if worst > 1e-12:
        i, j = np.unravel_index(int(np.argmax(asym)), asym.shape)
        raise ConstructionError(
            f"{source}: not Hermitian: entry ({i + 1},{j + 1}) = {m[i, j]} vs "
            f"({j + 1},{i + 1}) = {m[j, i]} (|difference| = {worst:.3e})")
    return m


def load_matrix_file(path: str) -> np.ndarray:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_matrix_text(fh.read(), source=path)

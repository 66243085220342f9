"""Quasi-cyclic base matrices, expanded sparse PCMs and the cyclic-shift algebra.

A QC parity-check matrix is an M x N array of Z x Z circulants.  The compact
description is a base matrix whose cell (m, n) holds the set of shift offsets
of the circulant's first row, or is empty for the all-zero block.  All other
modules build on the row-index shift map ``pi_shift``, the per-block column
rotation ``block_shift_rows`` and the shift-class generators defined here.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

log = logging.getLogger(__name__)

EMPTY = None  # cell marker for an all-zero circulant block


class MatrixFormatError(ValueError):
    """Malformed base-matrix text or violated base-matrix invariant."""


class ValidationError(ValueError):
    """Expanded PCM violates the assumptions of partition search."""


@dataclass(frozen=True)
class BaseMatrix:
    """M x N array of circulant shift sets with lifting size Z.

    ``cells[m][n]`` is either ``None`` (zero block) or a tuple of distinct
    shift values in ``[0, Z)``, sorted ascending.
    """

    M: int
    N: int
    Z: int
    cells: tuple[tuple[tuple[int, ...] | None, ...], ...]

    def __post_init__(self):
        if self.M < 1 or self.N < 1 or self.Z < 1:
            raise MatrixFormatError("M, N and Z must all be positive")
        if len(self.cells) != self.M or any(len(r) != self.N for r in self.cells):
            raise MatrixFormatError("cell array does not match M x N")
        for row in self.cells:
            for cell in row:
                if cell is None:
                    continue
                if len(cell) == 0:
                    raise MatrixFormatError("empty shift list; use -1 for a zero block")
                if len(set(cell)) != len(cell):
                    raise MatrixFormatError(f"duplicate shift in cell {cell}")
                if any(v < 0 or v >= self.Z for v in cell):
                    raise MatrixFormatError(f"shift out of range [0, {self.Z}): {cell}")

    @property
    def num_shifts(self) -> int:
        """Total number of shift values over all cells."""
        return sum(len(c) for row in self.cells for c in row if c is not None)

    def column_degrees(self) -> list[int]:
        """Number of nonzero blocks in each block column."""
        return [sum(1 for m in range(self.M) if self.cells[m][n] is not None) for n in range(self.N)]

    def block_row_shifted(self, offsets) -> "BaseMatrix":
        """Apply the block s-cyclic shift ``phi^offsets[m]`` to each block row m.

        Rotating block row m by j replaces every shift v in that row by
        (v + j) mod Z (the new first row of each circulant is old row j).
        """
        if len(offsets) != self.M:
            raise ValueError("need one offset per block row")
        cells = tuple(
            tuple(
                None if c is None else tuple(sorted((v + offsets[m]) % self.Z for v in c))
                for c in self.cells[m]
            )
            for m in range(self.M)
        )
        return BaseMatrix(self.M, self.N, self.Z, cells)


def parse_base_matrix(text: str) -> BaseMatrix:
    """Parse the whitespace-separated base-matrix text format.

    First non-comment line is ``M N Z``; then M lines of N cells, where a
    cell is ``-1`` or a comma-separated list of shifts.  Shifts >= Z are
    reduced modulo Z with a logged warning.
    """
    lines = [ln for ln in (raw.strip() for raw in text.splitlines()) if ln and not ln.startswith("#")]
    if not lines:
        raise MatrixFormatError("empty input")
    head = lines[0].split()
    if len(head) != 3:
        raise MatrixFormatError(f"header must be 'M N Z', got {lines[0]!r}")
    try:
        M, N, Z = (int(x) for x in head)
    except ValueError as exc:
        raise MatrixFormatError(f"bad header {lines[0]!r}") from exc
    if len(lines) != 1 + M:
        raise MatrixFormatError(f"expected {M} matrix rows, found {len(lines) - 1}")
    cells = []
    for m in range(M):
        toks = lines[1 + m].split()
        if len(toks) != N:
            raise MatrixFormatError(f"row {m}: expected {N} cells, found {len(toks)}")
        row = []
        for n, tok in enumerate(toks):
            if tok == "-1":
                row.append(None)
                continue
            try:
                vals = [int(p) for p in tok.split(",")]
            except ValueError as exc:
                raise MatrixFormatError(f"row {m} cell {n}: bad cell {tok!r}") from exc
            if any(v < 0 for v in vals):
                raise MatrixFormatError(f"row {m} cell {n}: negative shift in {tok!r}")
            reduced = [v % Z for v in vals]
            if reduced != vals:
                log.warning("row %d cell %d: shift(s) %s reduced modulo Z=%d", m, n, tok, Z)
            if len(set(reduced)) != len(reduced):
                raise MatrixFormatError(f"row {m} cell {n}: duplicate shift after mod-Z in {tok!r}")
            row.append(tuple(sorted(reduced)))
        cells.append(tuple(row))
    return BaseMatrix(M, N, Z, tuple(cells))


def serialize_base_matrix(b: BaseMatrix, header_comments: tuple[str, ...] = ()) -> str:
    out = [f"# {c}" for c in header_comments]
    out.append(f"{b.M} {b.N} {b.Z}")
    for row in b.cells:
        out.append(" ".join("-1" if c is None else ",".join(str(v) for v in c) for c in row))
    return "\n".join(out) + "\n"


def load_base_matrix(path) -> BaseMatrix:
    with open(path) as fh:
        return parse_base_matrix(fh.read())


def bundled_matrix(name: str) -> BaseMatrix:
    """Load a base matrix shipped with the package (``b0`` .. ``b3``)."""
    from importlib import resources

    text = resources.files("qcpart").joinpath("data", f"{name}.txt").read_text()
    return parse_base_matrix(text)


@dataclass(frozen=True)
class SparsePcm:
    """Expanded MZ x NZ matrix in CSR form with small-integer values.

    ``vals`` is all-ones for a plain binary PCM; shifted-sum matrices carry
    multiplicities.  Column indices are sorted within each row.
    """

    M: int
    N: int
    Z: int
    row_ptr: np.ndarray  # int64, len MZ+1
    cols: np.ndarray  # int32, len nnz
    vals: np.ndarray  # int32, len nnz

    @property
    def num_rows(self) -> int:
        return self.M * self.Z

    @property
    def num_cols(self) -> int:
        return self.N * self.Z

    @property
    def nnz(self) -> int:
        return len(self.cols)

    def row(self, i: int) -> np.ndarray:
        return self.cols[self.row_ptr[i] : self.row_ptr[i + 1]]

    def row_vals(self, i: int) -> np.ndarray:
        return self.vals[self.row_ptr[i] : self.row_ptr[i + 1]]

    def is_binary(self) -> bool:
        return bool(np.all(self.vals == 1))

    def to_dense(self) -> np.ndarray:
        a = np.zeros((self.num_rows, self.num_cols), dtype=np.int64)
        for i in range(self.num_rows):
            a[i, self.row(i)] = self.row_vals(i)
        return a


def expand(b: BaseMatrix, validate: bool = True) -> SparsePcm:
    """Expand a base matrix to its MZ x NZ binary sparse PCM.

    Shift v in cell (m, n) contributes a 1 at (mZ + i, nZ + ((v + i) mod Z))
    for every i in [Z).  With ``validate`` the result is checked for zero
    rows and duplicate rows, which partition search assumes are absent.
    """
    Z = b.Z
    per_row_cols: list[np.ndarray] = []
    i = np.arange(Z)
    for m in range(b.M):
        # columns of row mZ+i, one vector of col indices per i, built per block
        blocks = []
        for n, cell in enumerate(b.cells[m]):
            if cell is None:
                continue
            for v in cell:
                blocks.append(n * Z + (v + i) % Z)  # shape (Z,)
        if blocks:
            rows_cols = np.sort(np.stack(blocks, axis=1), axis=1)  # (Z, w)
        else:
            rows_cols = np.empty((Z, 0), dtype=np.int64)
        per_row_cols.append(rows_cols)
    widths = [rc.shape[1] for rc in per_row_cols]
    row_ptr = np.zeros(b.M * Z + 1, dtype=np.int64)
    for m in range(b.M):
        row_ptr[m * Z + 1 : (m + 1) * Z + 1] = widths[m]
    np.cumsum(row_ptr, out=row_ptr)
    cols = np.concatenate([rc.reshape(-1) for rc in per_row_cols]) if row_ptr[-1] else np.empty(0, dtype=np.int64)
    pcm = SparsePcm(b.M, b.N, Z, row_ptr, cols.astype(np.int32), np.ones(len(cols), dtype=np.int32))
    if validate:
        validate_for_partition(pcm)
    return pcm


def validate_for_partition(h: SparsePcm) -> None:
    """Reject zero rows and duplicate rows (partition theorems assume both)."""
    widths = np.diff(h.row_ptr)
    if np.any(widths == 0):
        raise ValidationError(f"zero row at index {int(np.argmin(widths > 0))}")
    seen: dict[bytes, int] = {}
    for i in range(h.num_rows):
        key = h.row(i).tobytes() + h.row_vals(i).tobytes()
        if key in seen:
            raise ValidationError(f"rows {seen[key]} and {i} are identical")
        seen[key] = i


def pi_shift(i: int, s: int, Z: int) -> int:
    """Row-index shadow of the block cyclic shift: Z*floor(i/Z) + ((i+s) mod Z)."""
    return Z * (i // Z) + (i + s) % Z


def pi_shift_set(indices, s: int, Z: int) -> np.ndarray:
    idx = np.asarray(indices)
    return Z * (idx // Z) + (idx + s) % Z


def block_shift_rows(h: SparsePcm, rows, s: int) -> list[np.ndarray]:
    """Apply the block s-cyclic shift to each selected row of h.

    Each column index c in block n maps to nZ + ((c - nZ + s) mod Z); by the
    block cyclic shift property the result of shifting row i equals row
    pi_shift(i, s) verbatim.
    """
    Z = h.Z
    out = []
    for i in rows:
        c = h.row(i)
        n = c // Z
        out.append(np.sort(n * Z + (c - n * Z + s) % Z).astype(c.dtype))
    return out


def column_weight(h: SparsePcm, rows=None, cols=None) -> tuple[np.ndarray, int]:
    """Per-column weights (value sums) of the row submatrix, and their maximum.

    ``rows=None`` takes all rows; ``cols`` restricts which columns enter the
    maximum (the returned vector is always full length NZ).  The maximum of an
    empty row set is 0 by convention.
    """
    if rows is None:
        rows = range(h.num_rows)
    w = np.zeros(h.num_cols, dtype=np.int64)
    for i in rows:
        np.add.at(w, h.row(i), h.row_vals(i))
    if cols is not None:
        sel = w[np.asarray(list(cols), dtype=np.int64)]
        return w, int(sel.max()) if len(sel) else 0
    return w, int(w.max()) if len(w) else 0


def matrix_max_column_weight(h: SparsePcm) -> int:
    """omega(H): maximum column value-sum over the full matrix."""
    return column_weight(h)[1]


@dataclass(frozen=True)
class ShiftClass:
    """An S-class C_{m,s} or LS-class C_{m,s,l}: an orbit of row indices."""

    m: int
    s: int
    l: int | None
    members: tuple[int, ...]


def s_class(m: int, s_residue: int, S: int, Z: int) -> ShiftClass:
    """The S-class C_{m,s} = mZ + {s}_S, of size Z/S."""
    if S < 1 or Z % S:
        raise ValueError(f"S={S} must divide Z={Z}")
    if not 0 <= s_residue < S:
        raise ValueError(f"s must be in [0, {S})")
    members = tuple(m * Z + (s_residue + r * S) % Z for r in range(Z // S))
    return ShiftClass(m, s_residue, None, tuple(sorted(members)))


def ls_class(m: int, s_residue: int, l: int, L: int, S: int, Z: int) -> ShiftClass:
    """The LS-class C_{m,s,l} = mZ + s + {lS}_{LS}, of size Z/(LS)."""
    if L < 1 or S < 1 or Z % (L * S):
        raise ValueError(f"L*S={L * S} must divide Z={Z}")
    if not 0 <= s_residue < S:
        raise ValueError(f"s must be in [0, {S})")
    if not 0 <= l < L:
        raise ValueError(f"l must be in [0, {L})")
    members = tuple(m * Z + (s_residue + l * S + r * L * S) % Z for r in range(Z // (L * S)))
    return ShiftClass(m, s_residue, l, tuple(sorted(members)))


def factors(n: int) -> list[int]:
    """All positive divisors of n, ascending."""
    small, big = [], []
    for d in range(1, math.isqrt(n) + 1):
        if n % d == 0:
            small.append(d)
            if d != n // d:
                big.append(n // d)
    return small + big[::-1]

"""Row-layered sum-product decoding with syndrome-based early stopping.

A layer's check rows are processed against the posteriors as they stood when
the layer began; each edge keeps its previous check-to-variable message, and
posteriors accumulate the message differences.  When every layer has maximum
column weight 1 the per-layer updates never collide, which is the property
the partition search optimizes for.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .partition import PartitionScheme, evaluate_omega
from .qc import SparsePcm


@dataclass(frozen=True)
class DecodeResult:
    bits: np.ndarray  # uint8 hard decisions, length NZ
    iterations: int
    converged: bool


class LayeredDecoder:
    """Decoder bound to one parity-check matrix and one layer partition."""

    def __init__(self, pcm: SparsePcm, scheme: PartitionScheme | None = None, max_iters: int = 10, clamp: float = 30.0):
        if not pcm.is_binary():
            raise ValueError("decoding requires a binary parity-check matrix")
        self.pcm = pcm
        self.max_iters = max_iters
        self.clamp = clamp
        if scheme is None:
            # single layer holding every row: plain flooding schedule
            self.layers = [np.arange(pcm.num_rows, dtype=np.int64)]
            self.collision_free = False
        else:
            self.layers = scheme.layers(pcm.Z)
            self.collision_free = evaluate_omega(pcm, scheme) == 1
        self._row_ptr = pcm.row_ptr
        self._cols = pcm.cols.astype(np.int64)

    def decode(self, llr: np.ndarray, max_iters: int | None = None) -> DecodeResult:
        if len(llr) != self.pcm.num_cols:
            raise ValueError(f"need {self.pcm.num_cols} channel LLRs, got {len(llr)}")
        iters = self.max_iters if max_iters is None else max_iters
        bits, used, ok = kernels.spa_decode(self.layers, self._row_ptr, self._cols, np.asarray(llr, dtype=np.float64), iters, self.clamp)
        return DecodeResult(np.asarray(bits, dtype=np.uint8), int(used), bool(ok))

    def syndrome_ok(self, bits: np.ndarray) -> bool:
        h = self.pcm
        bits = np.asarray(bits, dtype=np.uint8)
        for i in range(h.num_rows):
            if bits[h.row(i)].sum() % 2:
                return False
        return True


def flooding_spa(pcm: SparsePcm, llr: np.ndarray, max_iters: int = 10, clamp: float = 30.0) -> DecodeResult:
    """Reference flooding-schedule SPA: all checks update simultaneously.

    Kept simple and independent of the layered kernel so the two can be used
    as oracles for each other.
    """
    lam0 = np.asarray(llr, dtype=np.float64)
    nr = pcm.num_rows
    cols = pcm.cols.astype(np.int64)
    row_ptr = pcm.row_ptr
    v2c = np.tile(lam0[cols], 1).astype(np.float64)
    c2v = np.zeros(len(cols), dtype=np.float64)
    bits = (lam0 < 0).astype(np.uint8)
    for it in range(1, max_iters + 1):
        for i in range(nr):
            a, b = row_ptr[i], row_ptr[i + 1]
            t = np.tanh(np.clip(v2c[a:b], -clamp, clamp) / 2.0)
            signs = np.where(t < 0.0, -1.0, 1.0)
            logs = np.log(np.maximum(np.abs(t), 1e-300))
            prod_excl = signs * signs.prod() * np.exp(logs.sum() - logs)
            c2v[a:b] = 2.0 * np.arctanh(np.clip(prod_excl, -1 + 1e-12, 1 - 1e-12))
        lam = lam0 + np.bincount(cols, weights=c2v, minlength=pcm.num_cols)
        v2c = lam[cols] - c2v
        bits = (lam < 0).astype(np.uint8)
        good = True
        for i in range(nr):
            if bits[cols[row_ptr[i] : row_ptr[i + 1]]].sum() % 2:
                good = False
                break
        if good:
            return DecodeResult(bits, it, True)
    return DecodeResult(bits, max_iters, False)

"""Monte-Carlo frame-error-rate measurement over BPSK/AWGN.

All-zero codeword transmission (valid by code linearity and channel/decoder
symmetry); per-frame seeds are derived from (master seed, SNR index, frame
index), so results do not depend on batching or worker count.
"""

from __future__ import annotations

import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .decoder import LayeredDecoder
from .partition import PartitionScheme
from .qc import SparsePcm

BATCH = 64


@dataclass(frozen=True)
class ChannelConfig:
    snr_db: tuple[float, ...]
    rate: float
    max_iters: int = 10
    min_frame_errors: int = 100
    max_frames: int = 1_000_000
    seed: int = 0

    def __post_init__(self):
        if not self.snr_db:
            raise ValueError("need at least one SNR point")
        if not 0.0 < self.rate <= 1.0:
            raise ValueError("rate must be in (0, 1]")
        if self.min_frame_errors < 1:
            raise ValueError("min_frame_errors must be >= 1")


@dataclass(frozen=True)
class SnrPointResult:
    snr_db: float
    frames: int
    frame_errors: int
    fer: float
    avg_iterations: float


@dataclass(frozen=True)
class SimResult:
    points: tuple[SnrPointResult, ...]
    seed: int

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("snr_db,frames,frame_errors,fer,avg_iterations,seed\n")
        for p in self.points:
            buf.write(f"{p.snr_db:.2f},{p.frames},{p.frame_errors},{p.fer:.6e},{p.avg_iterations:.4f},{self.seed}\n")
        return buf.getvalue()


def noise_sigma(snr_db: float, rate: float) -> float:
    """Noise standard deviation for Eb/N0 = snr_db at the given code rate."""
    return float(1.0 / np.sqrt(2.0 * rate * 10.0 ** (snr_db / 10.0)))


def gen_frame_llrs(snr_db: float, rate: float, n: int, frame_seed) -> np.ndarray:
    """Channel LLRs for one all-zero BPSK frame: y = 1 + sigma*g, r = 2y/sigma^2."""
    sigma = noise_sigma(snr_db, rate)
    rng = np.random.default_rng(np.random.SeedSequence(frame_seed))
    y = 1.0 + sigma * rng.standard_normal(n)
    return 2.0 * y / (sigma * sigma)


def _run_batch(args):
    pcm, scheme, cfg, snr_idx, start, count = args
    dec = LayeredDecoder(pcm, scheme, max_iters=cfg.max_iters)
    snr = cfg.snr_db[snr_idx]
    errors = 0
    iter_sum = 0
    for f in range(start, start + count):
        llr = gen_frame_llrs(snr, cfg.rate, pcm.num_cols, (cfg.seed, snr_idx, f))
        res = dec.decode(llr)
        iter_sum += res.iterations
        if res.bits.any():
            errors += 1
    return errors, iter_sum


def run_monte_carlo(pcm: SparsePcm, scheme: PartitionScheme | None, cfg: ChannelConfig, workers: int = 1) -> SimResult:
    """Simulate each SNR point until min_frame_errors or max_frames is hit.

    Frames are dispatched in fixed-size batches and results are applied in
    batch order, stopping at the first batch boundary where the error target
    is met (extra speculative batches are discarded), so frame counts are
    identical for any worker count.
    """
    points = []
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for snr_idx in range(len(cfg.snr_db)):
            frames = errors = iter_sum = 0
            done = False
            while not done:
                wave = max(1, workers)
                batches = []
                for w in range(wave):
                    start = frames + w * BATCH
                    count = min(BATCH, cfg.max_frames - start)
                    if count > 0:
                        batches.append((pcm, scheme, cfg, snr_idx, start, count))
                if not batches:
                    break
                if pool is None:
                    outs = map(_run_batch, batches)
                else:
                    outs = pool.map(_run_batch, batches)
                for (e, s), b in zip(outs, batches):
                    errors += e
                    iter_sum += s
                    frames += b[5]
                    if errors >= cfg.min_frame_errors or frames >= cfg.max_frames:
                        done = True
                        break
            fer = errors / frames if frames else 0.0
            points.append(SnrPointResult(cfg.snr_db[snr_idx], frames, errors, fer, iter_sum / frames if frames else 0.0))
    finally:
        if pool is not None:
            pool.shutdown()
    return SimResult(tuple(points), cfg.seed)


def wilson_interval(errors: int, frames: int, z: float = 1.96) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if frames == 0:
        return 0.0, 1.0
    p = errors / frames
    denom = 1.0 + z * z / frames
    center = (p + z * z / (2 * frames)) / denom
    half = z * np.sqrt(p * (1 - p) / frames + z * z / (4 * frames * frames)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def default_rate(pcm: SparsePcm) -> float:
    return (pcm.N - pcm.M) / pcm.N

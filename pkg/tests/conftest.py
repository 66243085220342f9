import numpy as np
import pytest

from qcpart.qc import expand, parse_base_matrix

# 2x3 base matrix with Z=4, small enough to verify everything by hand
TOY_TEXT = "2 3 4\n1 3 -1\n0 2 0\n"

# its full 8x12 expansion, frozen as an independent oracle
TOY_DENSE = np.array(
    [
        [0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0],
        [0, 0, 1, 0, 1, 0, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, 1, 0, 1, 0, 0, 0, 0, 0, 0],
        [1, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0],
        [1, 0, 0, 0, 0, 0, 1, 0, 1, 0, 0, 0],
        [0, 1, 0, 0, 0, 0, 0, 1, 0, 1, 0, 0],
        [0, 0, 1, 0, 1, 0, 0, 0, 0, 0, 1, 0],
        [0, 0, 0, 1, 0, 1, 0, 0, 0, 0, 0, 1],
    ],
    dtype=np.int64,
)


@pytest.fixture(scope="session")
def toy_base():
    return parse_base_matrix(TOY_TEXT)


@pytest.fixture(scope="session")
def toy_pcm(toy_base):
    return expand(toy_base)


def random_base_text(rng, Z=None, M=None, N=None, multi=False):
    """Random parseable base-matrix text with at least one shift per row."""
    Z = Z or rng.choice([4, 6, 8])
    M = M or rng.randint(1, 2)
    N = N or rng.randint(2, 4)
    while True:
        rows = []
        for _ in range(M):
            cells = []
            for _ in range(N):
                if rng.random() < 0.3:
                    cells.append("-1")
                else:
                    count = rng.choice([1, 1, 2]) if multi else 1
                    cells.append(",".join(str(v) for v in sorted(rng.sample(range(Z), count))))
            rows.append(" ".join(cells))
        if all("-1" != c for c in (r.split()[0] for r in rows)) or any(
            any(c != "-1" for c in r.split()) for r in rows
        ):
            txt = f"{M} {N} {Z}\n" + "\n".join(rows) + "\n"
            try:
                expand(parse_base_matrix(txt))
            except Exception:
                continue
            return txt

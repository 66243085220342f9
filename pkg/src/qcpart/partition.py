"""Layer partition schemes: generation, evaluation, bounds and search.

A scheme is a pair (S, T0): layer l is the block (lS)-cyclic shift of layer 0,
so only T0 and the shift step S are free.  Every feasible T0 is a union of
M*S LS-classes, one from each S-class, which reduces the search space to
L^(M*S) selector arrays per S.  Column-weight evaluation is restricted to the
columns j with j mod Z < L*S; for unions of LS-classes the column-weight
profile is constant on pi^(LS) orbits, so the restriction is lossless.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .qc import (
    SparsePcm,
    column_weight,
    factors,
    ls_class,
    matrix_max_column_weight,
    pi_shift_set,
    validate_for_partition,
)


class InfeasibleSchemeError(ValueError):
    """Row set is not a valid (S, T0) partition scheme for the matrix."""


@dataclass(frozen=True)
class PartitionScheme:
    """A feasible solution (S, T0) with its generating selector array.

    ``selectors[m*S + s]`` is the LS-class index chosen from S-class C_{m,s};
    T0 is the union of the selected classes and layer l is pi^(lS)(T0).
    """

    S: int
    L: int
    t0: tuple[int, ...]
    selectors: tuple[int, ...]

    def layers(self, Z: int) -> list[np.ndarray]:
        t0 = np.asarray(self.t0, dtype=np.int64)
        return [np.sort(pi_shift_set(t0, l * self.S, Z)) for l in range(self.L)]


@dataclass(frozen=True)
class SchemeEvaluation:
    omega: int
    layer_distance: int
    omega_lb: int
    d_ub: int


@dataclass(frozen=True)
class ShiftedSum:
    """H^(S,k) = H + phi^S(H) + ... + phi^((k-1)S)(H), with integer entries."""

    base: SparsePcm
    S: int
    k: int
    matrix: SparsePcm


def _as_pcm(h) -> SparsePcm:
    return h.matrix if isinstance(h, ShiftedSum) else h


def _check_divisors(Z: int, L: int, S: int) -> None:
    if L < 1 or Z % L:
        raise ValueError(f"L={L} must divide Z={Z}")
    if S < 1 or (Z // L) % S:
        raise ValueError(f"S={S} must divide Z/L={Z // L}")


def shifted_sum(h: SparsePcm, S: int, k: int) -> ShiftedSum:
    """Integer matrix whose (i, j) entry counts t in [k) with phi^(tS)(H)[i, j] = 1."""
    if k < 1:
        raise ValueError("k must be >= 1")
    Z = h.Z
    widths = np.diff(h.row_ptr)
    rows = np.repeat(np.arange(h.num_rows, dtype=np.int64), widths)
    keys = []
    for t in range(k):
        c = h.cols.astype(np.int64)
        shifted = (c // Z) * Z + (c % Z + t * S) % Z
        keys.append(rows * h.num_cols + shifted)
    allkeys = np.concatenate(keys)
    allvals = np.tile(h.vals.astype(np.int64), k)
    uk, inv = np.unique(allkeys, return_inverse=True)
    sums = np.bincount(inv, weights=allvals).astype(np.int32)
    out_rows = uk // h.num_cols
    out_cols = (uk % h.num_cols).astype(np.int32)
    row_ptr = np.zeros(h.num_rows + 1, dtype=np.int64)
    np.add.at(row_ptr, out_rows + 1, 1)
    np.cumsum(row_ptr, out=row_ptr)
    mat = SparsePcm(h.M, h.N, Z, row_ptr, out_cols, sums)
    return ShiftedSum(h, S, k, mat)


# ---------------------------------------------------------------------------
# Restricted column-weight profiles of LS-classes


class ClassProfiles:
    """Sparse restricted column-weight vectors of every LS-class C_{m,s,l}.

    Buckets index the columns j with j mod Z < L*S as (j // Z) * L*S +
    (j mod Z); per-class vectors are additive, so any union of classes is
    evaluated by summing its members' sparse vectors.
    """

    def __init__(self, h, L: int, S: int):
        pcm = _as_pcm(h)
        Z = pcm.Z
        _check_divisors(Z, L, S)
        self.pcm = pcm
        self.L, self.S, self.Z = L, S, Z
        self.MS = pcm.M * S
        self.nbuckets = pcm.N * L * S
        LS = L * S
        widths = np.diff(pcm.row_ptr)
        erows = np.repeat(np.arange(pcm.num_rows, dtype=np.int64), widths)
        r = erows % Z
        cls = ((erows // Z) * S + r % S) * L + (r // S) % L
        cmod = pcm.cols.astype(np.int64) % Z
        mask = cmod < LS
        bucket = (pcm.cols[mask] // Z) * LS + cmod[mask]
        key = cls[mask] * self.nbuckets + bucket
        uk, inv = np.unique(key, return_inverse=True)
        sums = np.bincount(inv, weights=pcm.vals[mask]).astype(np.int64)
        # split per class id = pos * L + l
        self._buckets: list[np.ndarray] = []
        self._counts: list[np.ndarray] = []
        owner = uk // self.nbuckets
        bkt = uk % self.nbuckets
        start = np.searchsorted(owner, np.arange(self.MS * L + 1))
        for cid in range(self.MS * L):
            a, b = start[cid], start[cid + 1]
            self._buckets.append(bkt[a:b].astype(np.int64))
            self._counts.append(sums[a:b])

    def profile(self, pos: int, l: int) -> tuple[np.ndarray, np.ndarray]:
        cid = pos * self.L + l
        return self._buckets[cid], self._counts[cid]

    def omega_of_selectors(self, selectors) -> int:
        acc = np.zeros(self.nbuckets, dtype=np.int64)
        for pos, l in enumerate(selectors):
            b, c = self.profile(pos, l)
            acc[b] += c
        return int(acc.max()) if self.nbuckets else 0


# ---------------------------------------------------------------------------
# Scheme construction and evaluation


def scheme_from_selectors(h, L: int, S: int, selectors) -> PartitionScheme:
    pcm = _as_pcm(h)
    Z = pcm.Z
    _check_divisors(Z, L, S)
    selectors = tuple(int(x) for x in selectors)
    if len(selectors) != pcm.M * S:
        raise InfeasibleSchemeError(f"need {pcm.M * S} selectors, got {len(selectors)}")
    if any(not 0 <= l < L for l in selectors):
        raise InfeasibleSchemeError("selector out of range [0, L)")
    t0: list[int] = []
    for m in range(pcm.M):
        for s in range(S):
            t0.extend(ls_class(m, s, selectors[m * S + s], L, S, Z).members)
    return PartitionScheme(S, L, tuple(sorted(t0)), selectors)


def scheme_from_t0(h, L: int, S: int, t0) -> PartitionScheme:
    """Recover the selector array from an explicit T0, validating feasibility."""
    pcm = _as_pcm(h)
    Z = pcm.Z
    _check_divisors(Z, L, S)
    t0 = sorted(int(x) for x in t0)
    if len(t0) != pcm.M * Z // L:
        raise InfeasibleSchemeError(f"|T0| must be MZ/L = {pcm.M * Z // L}, got {len(t0)}")
    tset = set(t0)
    selectors = []
    for m in range(pcm.M):
        for s in range(S):
            hits = [l for l in range(L) if set(ls_class(m, s, l, L, S, Z).members) <= tset]
            if len(hits) != 1:
                raise InfeasibleSchemeError(f"T0 is not a one-per-S-class union of LS-classes at (m={m}, s={s})")
            selectors.append(hits[0])
    scheme = scheme_from_selectors(pcm, L, S, selectors)
    if list(scheme.t0) != t0:
        raise InfeasibleSchemeError("T0 contains rows outside the selected LS-classes")
    return scheme


def feasible_schemes(h, L: int, S: int):
    """Yield all L^(M*S) feasible schemes for this S, in odometer order."""
    pcm = _as_pcm(h)
    validate_for_partition(pcm)
    _check_divisors(pcm.Z, L, S)
    import itertools

    for sel in itertools.product(range(L), repeat=pcm.M * S):
        yield scheme_from_selectors(pcm, L, S, sel)


def evaluate_omega(h, scheme: PartitionScheme, restricted: bool = True) -> int:
    """Maximum column value-sum of the layer-0 row submatrix.

    The restricted path inspects only columns j with j mod Z < L*S, which is
    exact for feasible schemes; ``restricted=False`` scans all NZ columns.
    """
    pcm = _as_pcm(h)
    if len(scheme.t0) != pcm.M * pcm.Z // scheme.L:
        raise InfeasibleSchemeError("scheme size does not match matrix dimensions")
    if restricted:
        profiles = ClassProfiles(pcm, scheme.L, scheme.S)
        return profiles.omega_of_selectors(scheme.selectors)
    return column_weight(pcm, scheme.t0)[1]


def omega_lower_bound(h, L: int) -> int:
    """ceil(omega(H) / L), a floor for every feasible scheme."""
    if L < 1:
        raise ValueError("L must be >= 1")
    return -(-matrix_max_column_weight(_as_pcm(h)) // L)


def distance_upper_bound(h, L: int) -> int:
    """floor(L / omega(H)), a cap on the layer distance of any scheme."""
    pcm = _as_pcm(h)
    if pcm.Z % L:
        raise ValueError(f"L={L} must divide Z={pcm.Z}")
    return L // matrix_max_column_weight(pcm)


def min_layers_for_distance(h, k: int) -> int | None:
    """Smallest factor of Z that is >= k * omega(H); None if no factor qualifies."""
    if k < 1:
        raise ValueError("k must be >= 1")
    pcm = _as_pcm(h)
    need = k * matrix_max_column_weight(pcm)
    for f in factors(pcm.Z):
        if f >= need:
            return f
    return None


def layer_distance(h, scheme: PartitionScheme) -> int:
    """Largest l in [0, L) such that layers 0..l-1 stacked have omega <= 1."""
    pcm = _as_pcm(h)
    if evaluate_omega(pcm, scheme) > 1:
        return 0
    counts = np.zeros(pcm.num_cols, dtype=np.int64)
    layers = scheme.layers(pcm.Z)
    for l in range(1, scheme.L):
        for i in layers[l - 1]:
            np.add.at(counts, pcm.row(i), pcm.row_vals(i))
        if counts.max() > 1:
            return l - 1
    return scheme.L - 1


def layer_distance_via_shifted_sum(h, scheme: PartitionScheme) -> int:
    """Layer distance as the largest k with omega(H^(S,k)_{T0}) <= 1."""
    pcm = _as_pcm(h)
    d = 0
    for k in range(1, scheme.L):
        ss = shifted_sum(pcm, scheme.S, k)
        if evaluate_omega(ss.matrix, scheme) <= 1:
            d = k
        else:
            break
    return d


def evaluate_scheme(h, scheme: PartitionScheme) -> SchemeEvaluation:
    pcm = _as_pcm(h)
    return SchemeEvaluation(
        omega=evaluate_omega(pcm, scheme),
        layer_distance=layer_distance(pcm, scheme),
        omega_lb=omega_lower_bound(pcm, scheme.L),
        d_ub=distance_upper_bound(pcm, scheme.L),
    )


# ---------------------------------------------------------------------------
# Search


@dataclass
class SearchBudget:
    time_limit: float = 60.0
    max_candidates_per_s: int | None = None


@dataclass
class SearchResult:
    scheme: PartitionScheme | None
    omega: int | None
    proven_optimal: bool
    swept_all: bool
    evaluated: int
    elapsed: float
    method: str = ""

    def summary(self) -> str:
        if self.scheme is None:
            return "no scheme found"
        return f"omega={self.omega} S={self.scheme.S} proven_optimal={self.proven_optimal}"


def _candidate_s_values(Z: int, L: int, s_values) -> list[int]:
    if s_values is None:
        return factors(Z // L)
    for S in s_values:
        _check_divisors(Z, L, S)
    return sorted(s_values)


def solve_enumerative(
    h, L: int, budget: SearchBudget | None = None, s_values=None, upper_bound: int | None = None
) -> SearchResult:
    """Exhaustive search over feasible schemes, with branch-and-bound pruning.

    Iterates S over the factors of Z/L in increasing order and the selector
    odometer in canonical order within each S.  Adding an LS-class can only
    raise the running column-weight maximum, so branches whose partial maximum
    already reaches the incumbent are pruned without loss.  Stops early once
    the lower bound ceil(omega(H)/L) is met.

    ``upper_bound`` discards schemes with omega >= that value up front, which
    turns the search into a fast feasibility test (e.g. upper_bound=2 asks
    whether any scheme achieves omega = 1).
    """
    pcm = _as_pcm(h)
    validate_for_partition(pcm)
    if pcm.Z % L:
        raise ValueError(f"L={L} must divide Z={pcm.Z}")
    budget = budget or SearchBudget()
    lb = omega_lower_bound(pcm, L)
    t_start = time.monotonic()
    best_omega: int | None = None
    best: tuple[int, tuple[int, ...]] | None = None  # (S, selectors)
    evaluated = 0
    truncated = False

    for S in _candidate_s_values(pcm.Z, L, s_values):
        profiles = ClassProfiles(pcm, L, S)
        MS = profiles.MS
        acc = np.zeros(profiles.nbuckets, dtype=np.int64)
        sel = [0] * MS
        maxes = [0] * (MS + 1)  # running max after filling positions < pos
        leaves_this_s = 0
        pos = 0
        sel[0] = -1
        while pos >= 0:
            if time.monotonic() - t_start > budget.time_limit:
                truncated = True
                break
            if budget.max_candidates_per_s is not None and leaves_this_s >= budget.max_candidates_per_s:
                truncated = True
                break
            sel[pos] += 1
            if sel[pos] >= L:
                pos -= 1
                if pos >= 0:
                    b, c = profiles.profile(pos, sel[pos])
                    acc[b] -= c
                continue
            b, c = profiles.profile(pos, sel[pos])
            acc[b] += c
            # acc[b] holds post-add values, so the touched maximum is exact
            newmax = max(maxes[pos], int(acc[b].max())) if len(b) else maxes[pos]
            limit = best_omega if best_omega is not None else upper_bound
            if limit is not None and newmax >= limit:
                acc[b] -= c
                continue
            if pos == MS - 1:
                leaves_this_s += 1
                evaluated += 1
                omega = max(newmax, 1)  # no zero rows, so omega >= 1 at a full T0
                if best_omega is None or omega < best_omega:
                    best_omega = omega
                    best = (S, tuple(sel))
                    if best_omega <= lb:
                        acc[b] -= c
                        break
                acc[b] -= c
                continue
            maxes[pos + 1] = newmax
            pos += 1
            sel[pos] = -1
        if best_omega is not None and best_omega <= lb:
            break
        if truncated:
            break

    elapsed = time.monotonic() - t_start
    swept_all = not truncated
    if best is None:
        # reachable only under an upper_bound: a full sweep proves infeasibility
        return SearchResult(None, None, swept_all, swept_all, evaluated, elapsed, "enumerative")
    S, selectors = best
    scheme = scheme_from_selectors(pcm, L, S, selectors)
    proven = best_omega == lb or swept_all
    return SearchResult(scheme, best_omega, proven, swept_all, evaluated, elapsed, "enumerative")


def solve_greedy(h, L: int, s_values=None, stop_at_lb: bool = True) -> SearchResult:
    """One-pass greedy scheme per S: scan S-classes (m, s) in row-major order
    and take the first LS-class index minimizing the incremental maximum
    column weight; keep the strictly best result over all S."""
    pcm = _as_pcm(h)
    validate_for_partition(pcm)
    if pcm.Z % L:
        raise ValueError(f"L={L} must divide Z={pcm.Z}")
    lb = omega_lower_bound(pcm, L)
    t_start = time.monotonic()
    best_omega: int | None = None
    best: tuple[int, tuple[int, ...]] | None = None
    evaluated = 0
    for S in _candidate_s_values(pcm.Z, L, s_values):
        profiles = ClassProfiles(pcm, L, S)
        acc = np.zeros(profiles.nbuckets, dtype=np.int64)
        curmax = 0
        selectors = []
        for pos in range(profiles.MS):
            best_l, best_w = 0, None
            for l in range(L):
                b, c = profiles.profile(pos, l)
                w = max(curmax, int((acc[b] + c).max()) if len(b) else 0)
                evaluated += 1
                if best_w is None or w < best_w:
                    best_w, best_l = w, l
            b, c = profiles.profile(pos, best_l)
            acc[b] += c
            curmax = best_w
            selectors.append(best_l)
        omega = max(curmax, 1)
        if best_omega is None or omega < best_omega:
            best_omega = omega
            best = (S, tuple(selectors))
            if stop_at_lb and best_omega <= lb:
                break
    S, selectors = best
    scheme = scheme_from_selectors(pcm, L, S, selectors)
    elapsed = time.monotonic() - t_start
    return SearchResult(scheme, best_omega, best_omega == lb, True, evaluated, elapsed, "greedy")


@dataclass
class DistanceSearchResult:
    found: bool
    scheme: PartitionScheme | None
    omega: int | None
    distance: int | None
    best_shifted_omega: int | None = None

    def summary(self) -> str:
        if not self.found:
            return f"no scheme with requested layer distance (best shifted-sum omega {self.best_shifted_omega})"
        return f"omega={self.omega} S={self.scheme.S} distance={self.distance}"


def solve_with_distance(h, L: int, k: int, method: str = "greedy", budget: SearchBudget | None = None) -> DistanceSearchResult:
    """Search for a scheme with layer distance >= k by driving the chosen
    solver toward omega = 1 on the shifted sum H^(S,k), per candidate S."""
    pcm = _as_pcm(h)
    if k < 1:
        raise ValueError("k must be >= 1")
    if pcm.Z % L:
        raise ValueError(f"L={L} must divide Z={pcm.Z}")
    budget = budget or SearchBudget()
    best_shifted: int | None = None
    if -(-k * matrix_max_column_weight(pcm) // L) > 1:
        return DistanceSearchResult(False, None, None, None, None)
    t_start = time.monotonic()
    for S in factors(pcm.Z // L):
        remaining = budget.time_limit - (time.monotonic() - t_start)
        if remaining <= 0:
            break
        ss = shifted_sum(pcm, S, k)
        sub = SearchBudget(remaining, budget.max_candidates_per_s)
        if method == "greedy":
            res = solve_greedy(ss.matrix, L, s_values=[S])
        elif method == "enum":
            res = solve_enumerative(ss.matrix, L, budget=sub, s_values=[S], upper_bound=2)
        else:
            raise ValueError(f"unknown method {method!r}")
        if best_shifted is None or (res.omega is not None and res.omega < best_shifted):
            best_shifted = res.omega
        if res.omega == 1:
            scheme = scheme_from_selectors(pcm, L, S, res.scheme.selectors)
            return DistanceSearchResult(
                True, scheme, evaluate_omega(pcm, scheme), layer_distance(pcm, scheme), 1
            )
    return DistanceSearchResult(False, None, None, None, best_shifted)


def find_min_layers(h, k: int, method: str = "greedy", budget: SearchBudget | None = None):
    """Smallest layer count L (a factor of Z, starting at the bound from
    k * omega(H)) admitting a scheme with layer distance >= k, or None."""
    pcm = _as_pcm(h)
    lo = min_layers_for_distance(pcm, k)
    if lo is None:
        return None
    for L in factors(pcm.Z):
        if L < lo:
            continue
        res = solve_with_distance(pcm, L, k, method=method, budget=budget)
        if res.found:
            return L, res
    return None


# ---------------------------------------------------------------------------
# Scheme files


def serialize_scheme(scheme: PartitionScheme, omega: int, distance: int) -> str:
    return (
        f"S {scheme.S}\n"
        f"L {scheme.L}\n"
        f"T0 {' '.join(str(i) for i in scheme.t0)}\n"
        f"omega {omega}\n"
        f"distance {distance}\n"
    )


def save_scheme(path, scheme: PartitionScheme, omega: int, distance: int) -> None:
    with open(path, "w") as fh:
        fh.write(serialize_scheme(scheme, omega, distance))


def load_scheme(path, h=None) -> tuple[PartitionScheme, int, int]:
    """Load a scheme file; with a matrix given, re-verify feasibility and the
    recorded omega/distance values."""
    fields = {}
    with open(path) as fh:
        for ln in fh:
            ln = ln.strip()
            if not ln:
                continue
            key, _, rest = ln.partition(" ")
            fields[key] = rest
    try:
        S = int(fields["S"])
        L = int(fields["L"])
        t0 = [int(x) for x in fields["T0"].split()]
        omega = int(fields["omega"])
        distance = int(fields["distance"])
    except (KeyError, ValueError) as exc:
        raise ValueError(f"malformed scheme file {path}") from exc
    if h is None:
        scheme = PartitionScheme(S, L, tuple(sorted(t0)), ())
    else:
        pcm = _as_pcm(h)
        scheme = scheme_from_t0(pcm, L, S, t0)
        if evaluate_omega(pcm, scheme) != omega:
            raise ValueError(f"scheme file {path}: recorded omega {omega} does not match matrix")
        if layer_distance(pcm, scheme) != distance:
            raise ValueError(f"scheme file {path}: recorded distance {distance} does not match matrix")
    return scheme, omega, distance

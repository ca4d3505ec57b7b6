"""Concrete measure-preserving systems and subsequence ergodic averages.

Three system families are enough for desk-scale experiments: circle rotations
(sampled in 128-bit fixed point so indicator evaluations stay exact relative
to the dyadic angle over 10^8 steps), cyclic rotations on Z_P (exact closed
forms), and i.i.d. 0/1 symbol streams from the package's stateless generator.

The subsequence average at horizon N is the mean of the observable over the
orbit positions picked out by the constructed sequence below N.  The module
also houses the threshold decomposition of an observable against a ledger's
cumulative counts, Rokhlin-style towers on Z_P with the exact transfer check
onto the grid operators, and the per-block count-bound records.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .ledger import Ledger
from .rng import index_u64
from .sequence import SequenceStore
from .zops import FiniteSignal, GridContext, progression_mean, progression_mean_j

F = Fraction

FIXED_BITS = 128
_ONE = 1 << FIXED_BITS


class BadSpec(Exception):
    pass


class HorizonExceeded(Exception):
    pass


class TowerTooShort(Exception):
    pass


# ---------------------------------------------------------------------------
# observables and systems

@dataclass(frozen=True)
class StepObservable:
    """Finite-valued step function on [0, 1): breaks[i] <= x < breaks[i+1]."""

    breaks: tuple[Fraction, ...]      # 0 = b_0 < ... < b_k = 1
    values: tuple[Fraction, ...]      # one per piece

    def __post_init__(self):
        bs = self.breaks
        if bs[0] != 0 or bs[-1] != 1 or any(a >= b for a, b in zip(bs, bs[1:])):
            raise BadSpec("breaks must increase from 0 to 1")
        if len(self.values) != len(bs) - 1:
            raise BadSpec("one value per piece")

    @property
    def mean(self) -> Fraction:
        return sum(v * (b - a) for v, a, b in
                   zip(self.values, self.breaks, self.breaks[1:]))

    def thresholds_fixed(self) -> list[int]:
        """ceil(b * 2^FIXED_BITS) per break; exact comparisons for fixed-point x."""
        return [-((-b.numerator << FIXED_BITS) // b.denominator) for b in self.breaks]


def indicator(lo: Fraction, hi: Fraction) -> StepObservable:
    lo, hi = F(lo), F(hi)
    if not 0 <= lo < hi <= 1:
        raise BadSpec("indicator endpoints must satisfy 0 <= lo < hi <= 1")
    breaks = [F(0), lo, hi, F(1)]
    values = [F(0), F(1), F(0)]
    if lo == 0:
        breaks, values = breaks[1:], values[1:]
    if hi == 1:
        breaks, values = breaks[:-1], values[:-1]
    return StepObservable(tuple(breaks), tuple(values))


def golden_alpha_fixed(bits: int = FIXED_BITS) -> int:
    """frac((sqrt(5)-1)/2) in fixed point, exact to the last bit."""
    return (math.isqrt(5 << (2 * bits)) - (1 << bits)) // 2


@dataclass(frozen=True)
class RotationSystem:
    """x -> x + alpha mod 1 with alpha given in 128-bit fixed point."""

    alpha_fixed: int
    tag: str = "rotation"

    @staticmethod
    def golden() -> "RotationSystem":
        return RotationSystem(golden_alpha_fixed(), "rotation(golden)")

    @staticmethod
    def from_fraction(alpha: Fraction) -> "RotationSystem":
        alpha = F(alpha)
        if not 0 < alpha < 1:
            raise BadSpec("alpha must lie in (0, 1)")
        fixed = (alpha.numerator << FIXED_BITS) // alpha.denominator
        return RotationSystem(fixed, f"rotation({alpha})")


@dataclass(frozen=True)
class CyclicSystem:
    """x -> x + 1 on Z_P with an observable table indexed by residue."""

    P: int
    table: tuple          # exact values per residue
    tag: str = "cyclic"

    def __post_init__(self):
        if self.P < 1 or len(self.table) != self.P:
            raise BadSpec("table must have exactly P entries")

    @property
    def mean(self) -> Fraction:
        return F(sum(self.table), self.P)


@dataclass(frozen=True)
class BernoulliSystem:
    """i.i.d. 0/1 symbols; symbol at index n is a pure function of (seed, n)."""

    prob: Fraction
    seed: int
    tag: str = "bernoulli"

    def __post_init__(self):
        if not 0 <= self.prob <= 1:
            raise BadSpec("prob must lie in [0, 1]")

    @property
    def threshold(self) -> int:
        return (F(self.prob).numerator << 64) // F(self.prob).denominator

    @property
    def mean(self) -> Fraction:
        return F(self.threshold, 1 << 64)    # the exactly realized rate


@dataclass(frozen=True)
class OrbitSignal:
    """Observable values along one orbit: values[n] = f(T^n x0)."""

    values: np.ndarray
    mean_true: Fraction
    system_tag: str
    x0_repr: str
    f_repr: str

    @property
    def n_max(self) -> int:
        return int(self.values.size)


def _x0_fixed(x0) -> int:
    x0 = F(x0)
    if not 0 <= x0 < 1:
        raise BadSpec("x0 must lie in [0, 1)")
    return (x0.numerator << FIXED_BITS) // x0.denominator


def _rotation_piece_values(obs: StepObservable):
    ints = all(v.denominator == 1 for v in obs.values)
    vals = [int(v) if ints else float(v) for v in obs.values]
    dtype = np.int64 if ints else np.float64
    return vals, dtype


def sample_orbit(system, x0, n_max: int, observable: StepObservable | None = None) -> OrbitSignal:
    """Dense orbit values for n in [0, n_max)."""
    if n_max < 1:
        raise BadSpec("n_max must be >= 1")
    if isinstance(system, RotationSystem):
        if observable is None:
            raise BadSpec("rotation systems need a step observable")
        thr = observable.thresholds_fixed()
        piece_vals, dtype = _rotation_piece_values(observable)
        out = np.empty(n_max, dtype=dtype)
        cur = _x0_fixed(x0)
        alpha = system.alpha_fixed
        if len(piece_vals) == 3 and piece_vals[0] == 0 and piece_vals[2] == 0:
            lo_t, hi_t = thr[1], thr[2]          # plain indicator fast path
            one, zero = piece_vals[1], 0
            for n in range(n_max):
                out[n] = one if lo_t <= cur < hi_t else zero
                cur = (cur + alpha) & (_ONE - 1)
        else:
            import bisect
            for n in range(n_max):
                out[n] = piece_vals[bisect.bisect_right(thr, cur) - 1]
                cur = (cur + alpha) & (_ONE - 1)
        return OrbitSignal(out, observable.mean, system.tag, str(F(x0)),
                           f"step{tuple(map(str, observable.values))}")
    if isinstance(system, CyclicSystem):
        x0 = int(x0) % system.P
        idx = (x0 + np.arange(n_max, dtype=np.int64)) % system.P
        table = np.array([int(v) for v in system.table], dtype=np.int64) \
            if all(F(v).denominator == 1 for v in system.table) \
            else np.array([float(v) for v in system.table])
        return OrbitSignal(table[idx], system.mean, system.tag, str(x0), "residue table")
    if isinstance(system, BernoulliSystem):
        thr = system.threshold
        out = np.fromiter(
            (1 if index_u64(system.seed, n) < thr else 0 for n in range(n_max)),
            dtype=np.int64, count=n_max)
        return OrbitSignal(out, system.mean, system.tag, "seeded", f"bern({system.prob})")
    raise BadSpec(f"unknown system {system!r}")


def fragile_positions(system: RotationSystem, x0, positions,
                      observable: StepObservable,
                      tol: Fraction = F(1, 10**12)) -> np.ndarray:
    """Mask of orbit positions within `tol` of an observable breakpoint.

    Indicator evaluations at such positions are the only ones that could flip
    under a higher-precision angle; tests exclude them.
    """
    thr = observable.thresholds_fixed()
    tol_fixed = (F(tol).numerator << FIXED_BITS) // F(tol).denominator
    x0f = _x0_fixed(x0)
    alpha = system.alpha_fixed
    mask = _ONE - 1
    out = np.zeros(len(positions), dtype=bool)
    for i, n in enumerate(positions):
        cur = (x0f + int(n) * alpha) & mask
        for t in thr:
            d = abs(cur - (t & mask))
            if min(d, _ONE - d) <= tol_fixed:
                out[i] = True
                break
    return out


def sample_at(system, x0, positions, observable: StepObservable | None = None) -> np.ndarray:
    """Observable values at scattered orbit positions (same generators)."""
    positions = np.asarray(positions, dtype=np.int64)
    if isinstance(system, RotationSystem):
        if observable is None:
            raise BadSpec("rotation systems need a step observable")
        thr = observable.thresholds_fixed()
        piece_vals, dtype = _rotation_piece_values(observable)
        x0f = _x0_fixed(x0)
        alpha = system.alpha_fixed
        mask = _ONE - 1
        import bisect
        out = np.empty(len(positions), dtype=dtype)
        for i, n in enumerate(positions):
            cur = (x0f + int(n) * alpha) & mask
            out[i] = piece_vals[bisect.bisect_right(thr, cur) - 1]
        return out
    if isinstance(system, CyclicSystem):
        table = np.array([int(v) for v in system.table], dtype=np.int64)
        return table[(int(x0) + positions) % system.P]
    if isinstance(system, BernoulliSystem):
        thr = system.threshold
        return np.fromiter(
            (1 if index_u64(system.seed, int(n)) < thr else 0 for n in positions),
            dtype=np.int64, count=len(positions))
    raise BadSpec(f"unknown system {system!r}")


# ---------------------------------------------------------------------------
# subsequence averages

def _element_prefix(values_at_elements):
    arr = np.asarray(values_at_elements)
    if arr.dtype == np.int64:
        return np.concatenate([[0], np.cumsum(arr, dtype=np.int64)])
    return np.concatenate([[0.0], np.cumsum(arr)])


def average_from_samples(samples, store: SequenceStore, N: int):
    """Mean of the sampled values over sequence elements below N (0 if none)."""
    if N > store.horizon:
        raise HorizonExceeded(f"N={N} beyond store horizon {store.horizon}")
    k = store.count_range(0, N)
    if k == 0:
        return F(0)
    total = np.asarray(samples)[:k].sum()
    if isinstance(total, (np.integer, int)):
        return F(int(total), k)
    return float(total) / k


def subseq_average(orbit: OrbitSignal, store: SequenceStore, N: int):
    """A(f, x, N): average of f over the orbit at the sequence points < N."""
    if N > orbit.n_max:
        raise HorizonExceeded(f"N={N} beyond orbit horizon {orbit.n_max}")
    k = store.count_range(0, min(N, store.horizon))
    samples = orbit.values[store.elements[:k]]
    return average_from_samples(samples, store, N)


def subseq_max(orbit: OrbitSignal, store: SequenceStore, n_max: int):
    """sup over 1 <= N <= n_max of |A(f, x, N)|."""
    if n_max > orbit.n_max:
        raise HorizonExceeded(n_max)
    k_top = store.count_range(0, min(n_max, store.horizon))
    samples = orbit.values[store.elements[:k_top]]
    pref = _element_prefix(samples)
    ks = np.arange(1, k_top + 1)
    if k_top == 0:
        return F(0)
    vals = np.abs(pref[1:]) / ks
    best_k = int(np.argmax(vals)) + 1
    total = pref[best_k]
    if isinstance(total, (np.integer, int)):
        return abs(F(int(total), best_k))
    return float(vals.max())


def default_checkpoints(store: SequenceStore, n_points: int = 24) -> list[int]:
    """Block boundaries plus log-spaced horizons, deduplicated, sorted."""
    marks = {b.beta for b in store.blocks}
    lo, hi = 1, store.horizon
    for i in range(n_points):
        marks.add(int(round(lo * (hi / lo) ** (i / max(n_points - 1, 1)))))
    return sorted(m for m in marks if 1 <= m <= hi)


@dataclass(frozen=True)
class ConvergenceRow:
    N: int
    average: float
    deviation: float
    block_m: int


@dataclass(frozen=True)
class ConvergenceReport:
    rows: tuple[ConvergenceRow, ...]
    mean_true: float
    final_deviation: float
    trend_slope: float | None     # slope of log|dev| against log N

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("N,A,deviation,block_m\n")
            for r in self.rows:
                fh.write(f"{r.N},{r.average!r},{r.deviation!r},{r.block_m}\n")


def convergence_report(orbit: OrbitSignal, store: SequenceStore,
                       checkpoints=None) -> ConvergenceReport:
    if checkpoints is None:
        checkpoints = default_checkpoints(store)
    checkpoints = sorted(set(int(c) for c in checkpoints))
    if checkpoints and checkpoints[-1] > min(orbit.n_max, store.horizon):
        raise HorizonExceeded(checkpoints[-1])
    k_top = store.count_range(0, checkpoints[-1]) if checkpoints else 0
    samples = orbit.values[store.elements[:k_top]]
    pref = _element_prefix(samples)
    mean = float(orbit.mean_true)
    rows = []
    for N in checkpoints:
        k = store.count_range(0, N)
        a = float(pref[k]) / k if k else 0.0
        rows.append(ConvergenceRow(N, a, abs(a - mean), store.block_of(N - 1)))
    devs = [(math.log(r.N), math.log(r.deviation)) for r in rows if r.deviation > 0]
    slope = None
    if len(devs) >= 2:
        xs, ys = zip(*devs)
        xbar, ybar = sum(xs) / len(xs), sum(ys) / len(ys)
        den = sum((x - xbar) ** 2 for x in xs)
        if den > 0:
            slope = sum((x - xbar) * (y - ybar) for x, y in zip(xs, ys)) / den
    return ConvergenceReport(tuple(rows), mean, rows[-1].deviation if rows else 0.0,
                             slope)


# ---------------------------------------------------------------------------
# threshold decomposition against a ledger

@dataclass(frozen=True)
class Decomposition:
    """Per-block threshold split of the scaled observable values.

    parts[m][v] = (low, mid, high): exactly one is v/lam' (the scaled value),
    the others 0; low is active when the scaled value is below the count
    through block m-3, high when at or above the count through block m.
    """

    lam: Fraction
    lam_prime: Fraction
    values: tuple[Fraction, ...]
    parts: dict

    def check_identity(self) -> bool:
        return all(
            sum(self.parts[m][v]) == v / self.lam_prime
            for m in self.parts for v in self.values
        )


def decompose(values, ledger: Ledger, lam) -> Decomposition:
    """Split each observable value by the ledger's cumulative-count thresholds."""
    lam = F(lam)
    if lam <= 0:
        raise BadSpec("lambda must be positive")
    lamp = lam / 3
    vals = tuple(sorted(set(F(v) for v in values)))
    if any(v < 0 for v in vals):
        raise BadSpec("threshold decomposition expects nonnegative values")
    parts = {}
    for m in range(1, ledger.complete_horizon + 1):
        low_thr = ledger.nb(m - 3)
        high_thr = ledger.nb(m)
        table = {}
        for v in vals:
            s = v / lamp
            if s < low_thr:
                table[v] = (s, F(0), F(0))
            elif s < high_thr:
                table[v] = (F(0), s, F(0))
            else:
                table[v] = (F(0), F(0), s)
        parts[m] = table
    return Decomposition(lam, lamp, vals, parts)


# ---------------------------------------------------------------------------
# towers and the transfer identity

@dataclass(frozen=True)
class Tower:
    P: int
    height: int
    base: np.ndarray        # base residues, one per column

    @property
    def covered(self) -> Fraction:
        return F(len(self.base) * self.height, self.P)


def build_tower(P: int, height: int, eps: Fraction) -> Tower:
    """Columns of consecutive residues: base at multiples of the height."""
    if not 1 <= height <= P:
        raise BadSpec("height must lie in [1, P]")
    if not 0 < F(eps) < 1:
        raise BadSpec("eps must lie in (0, 1)")
    cols = P // height
    tower = Tower(P, height, np.arange(cols, dtype=np.int64) * height)
    if tower.covered <= 1 - F(eps):
        raise BadSpec(
            f"height {height} cannot cover 1-eps of Z_{P}; covered {tower.covered}")
    return tower


def dynamical_window(x_residue_mod_p: int, p: int, N: int) -> tuple[int, int]:
    """Offset window of the orbit operator: [-r, floor((N+r)/p)*p + p - r)."""
    r = x_residue_mod_p
    return -r, ((N + r) // p) * p + p - r


def dynamical_mean(system: CyclicSystem, x: int, r: int, ctx: GridContext,
                   N: int, j: int | None = None):
    """The orbit-side operator: averages f(T^(l q_j) x) over the window.

    r is the level of x in its tower column reduced mod p (the offset data
    the abstract construction attaches to x).  Implemented independently of
    the grid operators (table lookups on Z_P) so the transfer identity is a
    genuine two-route check.
    """
    p = ctx.p
    lo, hi = dynamical_window(r, p, N)
    table = system.table

    def raw(q):
        first = -(-lo // q) * q
        tot = 0
        cnt = 0
        for off in range(first, hi, q):
            tot += table[(x + off) % system.P]
            cnt += 1
        return tot, cnt

    if j is not None:
        tot, cnt = raw(ctx.primes[j])
        return F(tot, cnt)
    tot_all = 0
    cnt_all = 0
    for q in ctx.primes:
        tot, cnt = raw(q)
        tot_all += tot
        cnt_all += cnt
    return F(tot_all, cnt_all)


def tower_transfer_check(tower: Tower, system: CyclicSystem, ctx: GridContext,
                         trials: int, horizon: int, seed: int) -> dict:
    """Exact equality of the orbit operator and the grid operator.

    Each trial picks a tower column and a level n(x) clear of the top and
    bottom margins, forms the column signal phi(n) = f(T^n base) of length
    the tower height, and compares the grid operator at offset n(x) with the
    dynamical operator at x, per progression and combined, in exact rationals.
    """
    from .rng import SplitMix64
    p = ctx.p
    if system.P != tower.P:
        raise BadSpec("tower and system disagree on P")
    lo_level, hi_level = p, tower.height - horizon - 2 * p
    if hi_level <= lo_level:
        raise TowerTooShort(
            f"height {tower.height} leaves no levels for horizon {horizon}")
    rng = SplitMix64(seed)
    table_int = [int(v) for v in system.table]
    sys_int = CyclicSystem(system.P, tuple(table_int), system.tag)
    checked = 0
    mismatches = []
    for _ in range(trials):
        col = rng.randint(0, len(tower.base) - 1)
        level = rng.randint(lo_level, hi_level - 1)
        N = rng.randint(1, horizon)
        base = int(tower.base[col])
        x = (base + level) % system.P
        r = level % p
        column = [table_int[(base + k) % system.P] for k in range(tower.height)]
        phi = FiniteSignal(0, column)
        ok = True
        for j in range(ctx.K):
            grid = progression_mean_j(phi, ctx, level, N, j)
            dyn = dynamical_mean(sys_int, x, r, ctx, N, j)
            if grid != dyn:
                ok = False
        grid_c = progression_mean(phi, ctx, level, N)
        dyn_c = dynamical_mean(sys_int, x, r, ctx, N)
        if grid_c != dyn_c:
            ok = False
        checked += 1
        if not ok:
            mismatches.append({"col": col, "level": level, "N": N})
    return {"trials": checked, "exact_matches": checked - len(mismatches),
            "mismatches": mismatches, "ok": not mismatches}


# ---------------------------------------------------------------------------
# per-block count bounds

def count_bounds_check(ledger: Ledger, store: SequenceStore,
                       per_block_grid: int = 6) -> list[dict]:
    """The count estimates every block must satisfy, in exact rationals.

    For each block: the full-block two-sided bounds, a grid of horizons N
    inside the block with the windowed two-sided bounds, and the global
    lower bound count(0, N) > (3/5) Q(m) N.
    """
    tab = ledger.constants
    out = []
    for sb in store.blocks:
        m = sb.m
        params = ledger.block(m)
        gamma, Q, p = params.gamma, params.Q, params.p
        blk_count = sb.size
        length = sb.beta - sb.beta_prev
        P_full = length // p
        rec = {
            "m": m,
            "f4aa": blk_count > (1 - gamma) * (1 - tab.gamma_beta) * sb.beta * Q,
            # outer form needs p_m below the previous endpoint; block 1 only
            # supports the (P_m + 1) p Q form
            "f4ab": blk_count < (P_full + 1) * p * Q if m == 1
            else blk_count < sb.beta * Q,
            "grid": [],
        }
        Ns = {sb.beta_prev + 1, sb.beta_prev + params.d + 1, sb.beta}
        for i in range(1, per_block_grid + 1):
            Ns.add(sb.beta_prev + max(1, (length * i) // per_block_grid))
        for N in sorted(Ns):
            if not sb.beta_prev < N <= sb.beta:
                continue
            cnt = store.count_range(sb.beta_prev, N)
            P_N = (N - sb.beta_prev) // p
            g = {
                "N": N,
                "f6aa_inner": cnt >= (1 - gamma) * P_N * p * Q,
                "f6aa": cnt > (1 - gamma) * (N - sb.beta_prev - p) * Q,
                "f6ab_inner": cnt < (P_N + 1) * p * Q,
                "f6ab": cnt < (N - sb.beta_prev + p) * Q,
                "f4bb": store.count_range(0, N) > F(3, 5) * Q * N,
            }
            g["ok"] = all(v for k, v in g.items() if k != "N")
            rec["grid"].append(g)
        rec["ok"] = rec["f4aa"] and rec["f4ab"] and all(g["ok"] for g in rec["grid"])
        out.append(rec)
    return out

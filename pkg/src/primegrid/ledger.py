"""Inductive parameter system for the sparse sequence construction.

A ledger holds one row per block m: the prime count K_m, the primes q_{j,m},
their product p_m (the block period), Q(m) = sum 1/q_{j,m}, the deletion
distance d_m, and the density-defect bound gamma_m, together with the block
endpoints beta_{m-1} < beta_m and the element count of each finished block.

The induction follows the construction's ordering exactly: the parameters of
block m are chosen first (K_m from the count through block m-2, then the
primes), and only then is beta_{m-1} fixed as the smallest admissible multiple
of p_m, which finishes block m-1 and determines its element count.  The last
appended block therefore always has an open right endpoint; it is closed by
the next extension.

All record evaluation is exact rational arithmetic; no floats enter this
module.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from fractions import Fraction

from .blocksets import block_count
from .constants import ConstantTable, frac_json, frac_parse, constants_for
from .primes import consecutive_primes, next_prime

F = Fraction


class LedgerError(Exception):
    pass


class MissingBlock(LedgerError):
    pass


class MissingCount(LedgerError):
    pass


class InfeasibleAtScale(LedgerError):
    """The smallest admissible parameter exceeds the caller's resource cap."""

    def __init__(self, m: int, what: str, required, cap):
        self.m = m
        self.what = what
        self.required = required
        self.cap = cap
        super().__init__(
            f"block {m}: smallest admissible {what} is {required}, cap {cap}"
        )


class NoPrimeWindow(LedgerError):
    pass


def default_d(m: int) -> int:
    """Deletion distance for block m (d_m = m)."""
    return m


@dataclass(frozen=True)
class BlockParams:
    m: int
    beta_prev: int
    K: int
    primes: tuple[int, ...]
    p: int
    Q: Fraction
    d: int
    gamma: Fraction
    beta: int | None = None
    count: int | None = None

    def __post_init__(self):
        if self.p != _prod(self.primes):
            raise ValueError("p must be the product of the primes")
        if self.Q != sum(F(1, q) for q in self.primes):
            raise ValueError("Q must be the exact reciprocal sum")


def _prod(xs) -> int:
    out = 1
    for x in xs:
        out *= x
    return out


@dataclass(frozen=True)
class ConstraintRecord:
    name: str
    lhs: Fraction
    rhs: Fraction
    op: str          # one of "<", ">", "=="
    satisfied: bool
    note: str = ""


@dataclass(frozen=True)
class ConstraintReport:
    m: int
    profile: str
    records: tuple[ConstraintRecord, ...]

    @property
    def overall(self) -> bool:
        return all(r.satisfied for r in self.records)

    def failing(self) -> list[ConstraintRecord]:
        return [r for r in self.records if not r.satisfied]


@dataclass(frozen=True)
class Ledger:
    constants: ConstantTable
    blocks: tuple[BlockParams, ...]
    nbar: tuple[int, ...]   # nbar[i] = count of elements below beta_i, i = 0..H

    @property
    def complete_horizon(self) -> int:
        """Number of blocks whose right endpoint is fixed."""
        return len(self.nbar) - 1

    def block(self, m: int) -> BlockParams:
        if not 1 <= m <= len(self.blocks):
            raise MissingBlock(f"block {m} not present (have {len(self.blocks)})")
        return self.blocks[m - 1]

    def nb(self, i: int) -> int:
        """Cumulative count through block i (0 for i <= 0)."""
        if i <= 0:
            return 0
        if i >= len(self.nbar):
            raise MissingCount(f"count through block {i} not yet determined")
        return self.nbar[i]


def new_ledger(constants: ConstantTable) -> Ledger:
    """Base ledger: block 1 uses the single modulus 1 (every integer)."""
    b1 = BlockParams(
        m=1, beta_prev=0, K=1, primes=(1,), p=1, Q=F(1),
        d=default_d(1), gamma=constants.gamma_small,
    )
    return Ledger(constants=constants, blocks=(b1,), nbar=(0,))


def _check(name, lhs, rhs, op, note="") -> ConstraintRecord:
    lhs = F(lhs)
    rhs = F(rhs)
    ok = {"<": lhs < rhs, ">": lhs > rhs, "==": lhs == rhs}[op]
    return ConstraintRecord(name, lhs, rhs, op, ok, note)


def _block_count_for(ledger: Ledger, m: int, beta_prev: int, beta: int) -> int:
    """Exact element count of block m on [beta_prev, beta)."""
    blk = ledger.block(m)
    if m == 1:
        return beta - beta_prev
    return block_count(blk.primes, blk.d, beta_prev, beta)


def check_constraints(ledger: Ledger, m: int) -> ConstraintReport:
    """Evaluate every named inequality the construction imposes on block m.

    Records referencing the still-open right endpoint of the last block are
    omitted for that block (they are imposed when the endpoint is chosen).
    """
    blk = ledger.block(m)
    tab = ledger.constants
    recs: list[ConstraintRecord] = []

    if m == 1:
        recs.append(_check("base_K", blk.K, 1, "=="))
        recs.append(_check("base_q", blk.primes[0], 1, "==", "single modulus 1"))
        recs.append(_check("base_p", blk.p, 1, "=="))
        recs.append(_check("base_Q", blk.Q, 1, "=="))
        recs.append(_check("gamma_small", blk.gamma, tab.gamma_small, "=="))
        if blk.beta is not None:
            recs.append(_check("beta1_floor", blk.beta, 10, ">"))
            recs.append(_check(
                "f3c", blk.beta_prev + 2 * blk.p,
                tab.f3c.value(1) * blk.beta, "<",
            ))
        return ConstraintReport(m, tab.profile, tuple(recs))

    prev = ledger.block(m - 1)
    if prev.beta is None or prev.beta != blk.beta_prev:
        raise MissingBlock(f"block {m-1} not finished before block {m}")
    nb = ledger.nb
    K, d, p, qmin = blk.K, blk.d, blk.p, min(blk.primes)

    ratio = max(
        F(a, b) for a in blk.primes for b in blk.primes
    )
    recs.append(_check("d20f1", ratio, 2, "<", "max prime ratio"))
    recs.append(_check("d_lt_q", d, qmin, "<"))
    recs.append(_check("pmbbb", blk.beta_prev % p, 0, "==", "p_m | beta_{m-1}"))
    recs.append(_check("p_monotone", prev.p, p, "<"))
    recs.append(_check("Q_monotone", blk.Q, prev.Q, "<"))

    recs.append(_check(
        "f13", tab.k_growth.value(m) * nb(m - 2) / K,
        tab.k_threshold.value(m), "<",
    ))
    recs.append(_check(
        "f15", F(nb(m - 2) * 4 * K * K * (d + 1), qmin),
        tab.spacing_rhs.value(m), "<",
    ))
    recs.append(_check(
        "5aa", blk.gamma, F(2 * K * (d + 1), qmin), ">",
        "deletion margin per period",
    ))
    recs.append(_check("f4c_gamma", 1 - blk.gamma, tab.f4c_floor, ">"))
    recs.append(_check(
        "f4c_p", p, tab.f4c_div * (blk.beta_prev - prev.beta_prev), "<",
    ))
    if m > 3:
        if tab.gamma_main is None:
            recs.append(_check(
                "f18", blk.gamma, F(1, 2000 * m * nb(m - 3)), "<",
                "gamma_m below the lagged form",
            ))
        else:
            recs.append(_check("f18", blk.gamma, 1, "<"))
    else:
        recs.append(_check("gamma_small", blk.gamma, tab.gamma_small, "=="))

    nbar_m1 = nb(m - 1)
    sum_counts = sum(nb(i) for i in range(1, m - 1))
    recs.append(_check("f19_sum", sum_counts * nb(m - 3),
                       tab.f19_sum.value(m) * nbar_m1, "<"))
    recs.append(_check("f19_p_count", p, tab.f19_p * nbar_m1, "<"))
    recs.append(_check("f19_p_beta", p, tab.f19_p * blk.beta_prev, "<"))
    recs.append(_check("d38f1", sum_counts * nb(m - 3),
                       tab.d38f1.value(m) * nbar_m1, "<"))
    recs.append(_check("f15a", nb(m - 3) * 3 * p,
                       tab.f15a.value(m) * nbar_m1, "<"))
    recs.append(_check("d63", nb(m - 2),
                       tab.d63.value(m) * (nbar_m1 - nb(m - 2)), "<"))
    recs.append(_check("e28", nb(m - 2), tab.e28.value(m) * nbar_m1, "<"))
    recs.append(_check("f12", 10**4 * (m + 1) * nb(m - 2) * p * nb(m - 3),
                       tab.f12.value(m) * nbar_m1, "<"))
    recs.append(_check("d65", 2 * (prev.beta_prev + 2 * prev.p) * nb(m - 3),
                       tab.d65.value(m) * blk.beta_prev, "<"))
    recs.append(_check(
        "suppl2",
        nb(m - 3) * 2 * (prev.beta_prev + 10**4 * p * nb(m - 2) * (m + 1)),
        tab.suppl2.value(m) * nbar_m1, "<",
    ))
    recs.append(_check("d67", 2 * 10**4 * p * nb(m - 2) * (m + 1) * nb(m - 3),
                       tab.d67.value(m) * blk.beta_prev, "<"))
    if blk.beta is not None:
        recs.append(_check("f3c", blk.beta_prev + 2 * p,
                           tab.f3c.value(m) * blk.beta, "<"))
    return ConstraintReport(m, tab.profile, tuple(recs))


def _choose_k(ledger: Ledger, m: int, max_k: int) -> int:
    """Smallest K admissible for block m; at least 2 so deletion is active."""
    tab = ledger.constants
    bound = tab.k_growth.value(m) * ledger.nb(m - 2) / tab.k_threshold.value(m)
    k_min = bound.numerator // bound.denominator + 1
    k = max(2, k_min)
    if k > max_k:
        raise InfeasibleAtScale(m, "K", k_min, max_k)
    return k


def _choose_primes(ledger: Ledger, m: int, K: int, d: int, gamma: Fraction,
                   max_prime: int) -> tuple[int, ...]:
    """K consecutive primes, smallest admissible, spanning less than a factor 2.

    The least prime must clear the deletion-margin bound (so the per-period
    lower density estimate holds with the block's gamma) and the prime-size
    rule against the count through block m-2; consecutive primes with
    q_max < 2*q_min realize the comparable-size requirement structurally.
    """
    tab = ledger.constants
    prev = ledger.block(m - 1)
    bound = F(2 * K * (d + 1)) / gamma
    nb2 = ledger.nb(m - 2)
    if nb2 > 0:
        bound = max(bound, F(nb2 * 4 * K * K * (d + 1)) / tab.spacing_rhs.value(m))
    bound = max(bound, F(d))
    q1 = next_prime(bound.numerator // bound.denominator)
    while q1 <= max_prime:
        ps = consecutive_primes(q1, K)
        Q = sum(F(1, q) for q in ps)
        if ps[-1] < 2 * q1 and _prod(ps) > prev.p and Q < prev.Q:
            return tuple(ps)
        q1 = next_prime(q1)
    raise NoPrimeWindow(f"block {m}: no admissible window of {K} primes below {max_prime}")


def extend_ledger(ledger: Ledger, max_k: int = 10**6,
                  max_prime: int = 2**62, max_beta: int = 2**62) -> Ledger:
    """Append block m = len(blocks)+1 and close block m-1.

    Chooses d_m = m, the minimal admissible K_m and prime window, then the
    smallest multiple of p_m for beta_{m-1} satisfying every endpoint record.
    Raises InfeasibleAtScale / NoPrimeWindow when a cap is exceeded (with the
    faithful table this is the expected outcome at m = 3).
    """
    m = len(ledger.blocks) + 1
    if ledger.block(m - 1).beta is not None:
        raise LedgerError("last block already closed; ledger corrupt")
    tab = ledger.constants
    d = default_d(m)
    gamma = tab.gamma(m, ledger.nb(m - 2))
    K = _choose_k(ledger, m, max_k)
    primes = _choose_primes(ledger, m, K, d, gamma, max_prime)
    p = _prod(primes)
    Q = sum(F(1, q) for q in primes)

    prev = ledger.block(m - 1)
    beta_pp = prev.beta_prev               # beta_{m-2}
    lower = [
        F(beta_pp),
        F(beta_pp + 2 * prev.p) / tab.f3c.value(m - 1),
        F(beta_pp) + F(p) / tab.f4c_div,
        F(p) / tab.f19_p,
        2 * (beta_pp + 2 * prev.p) * F(ledger.nb(m - 3)) / tab.d65.value(m),
        2 * 10**4 * p * ledger.nb(m - 2) * (m + 1) * F(ledger.nb(m - 3))
        / tab.d67.value(m),
    ]
    if m == 2:
        lower.append(F(10))
    lb = max(lower)
    cand = p * (lb.numerator // lb.denominator // p + 1)
    while cand <= lb:
        cand += p

    nb2, nb3 = ledger.nb(m - 2), ledger.nb(m - 3)
    sum_counts = sum(ledger.nb(i) for i in range(1, m - 1))
    while True:
        if cand > max_beta:
            raise InfeasibleAtScale(m, "beta_{m-1}", cand, max_beta)
        count = _block_count_for(ledger, m - 1, beta_pp, cand)
        nbar_m1 = nb2 + count
        ok = (
            p < tab.f19_p * nbar_m1
            and sum_counts * nb3 < tab.f19_sum.value(m) * nbar_m1
            and sum_counts * nb3 < tab.d38f1.value(m) * nbar_m1
            and nb3 * 3 * p < tab.f15a.value(m) * nbar_m1
            and nb2 < tab.d63.value(m) * (nbar_m1 - nb2)
            and nb2 < tab.e28.value(m) * nbar_m1
            and 10**4 * (m + 1) * nb2 * p * nb3 < tab.f12.value(m) * nbar_m1
            and nb3 * 2 * (beta_pp + 10**4 * p * nb2 * (m + 1))
            < tab.suppl2.value(m) * nbar_m1
        )
        if ok:
            break
        cand += p

    closed_prev = replace(prev, beta=cand, count=count)
    new_block = BlockParams(
        m=m, beta_prev=cand, K=K, primes=primes, p=p, Q=Q, d=d, gamma=gamma,
    )
    blocks = ledger.blocks[: m - 2] + (closed_prev, new_block)
    out = Ledger(constants=tab, blocks=blocks, nbar=ledger.nbar + (nbar_m1,))

    for mm in (m - 1, m):
        rep = check_constraints(out, mm)
        if not rep.overall:
            bad = ", ".join(r.name for r in rep.failing())
            raise LedgerError(f"extension left block {mm} with failing records: {bad}")
    return out


def extend_to(ledger: Ledger, horizon: int, **caps) -> Ledger:
    """Extend until `horizon` blocks have parameters chosen."""
    while len(ledger.blocks) < horizon:
        ledger = extend_ledger(ledger, **caps)
    return ledger


def build_ledger(profile: str, horizon: int, **caps) -> Ledger:
    return extend_to(new_ledger(constants_for(profile)), horizon, **caps)


def structural_report(ledger: Ledger) -> ConstraintReport:
    """Cross-block invariants: monotonicity of p, Q, d and the count prefix."""
    recs = []
    blocks = ledger.blocks
    recs.append(_check("beta0_zero", blocks[0].beta_prev, 0, "=="))
    for a, b in zip(blocks, blocks[1:]):
        recs.append(_check(f"p_up_{b.m}", a.p, b.p, "<"))
        recs.append(_check(f"Q_down_{b.m}", b.Q, a.Q, "<"))
        recs.append(_check(f"d_up_{b.m}", a.d, b.d + 1, "<", "d nondecreasing"))
    for a, b in zip(blocks, blocks[2:]):
        recs.append(_check(f"d_strict_{b.m}", a.d, b.d, "<",
                           "d grows within every 2 blocks"))
    for i in range(1, len(ledger.nbar)):
        recs.append(_check(f"nbar_up_{i}", ledger.nbar[i - 1], ledger.nbar[i] + 1,
                           "<", "nbar nondecreasing"))
    return ConstraintReport(0, ledger.constants.profile, tuple(recs))


def full_report(ledger: Ledger) -> list[ConstraintReport]:
    """Structural report plus the per-block record set for every block."""
    out = [structural_report(ledger)]
    for m in range(1, len(ledger.blocks) + 1):
        out.append(check_constraints(ledger, m))
    return out


# ---------------------------------------------------------------------------
# serialization

def ledger_to_json(ledger: Ledger) -> dict:
    return {
        "constants": ledger.constants.to_json(),
        "blocks": [
            {
                "m": b.m,
                "beta_prev": b.beta_prev,
                "beta": b.beta,
                "K": b.K,
                "primes": list(b.primes),
                "p": b.p,
                "Q": frac_json(b.Q),
                "d": b.d,
                "gamma": frac_json(b.gamma),
                "count": b.count,
            }
            for b in ledger.blocks
        ],
        "nbar": list(ledger.nbar),
    }


def ledger_from_json(obj: dict) -> Ledger:
    tab = ConstantTable.from_json(obj["constants"])
    blocks = tuple(
        BlockParams(
            m=int(b["m"]),
            beta_prev=int(b["beta_prev"]),
            beta=None if b["beta"] is None else int(b["beta"]),
            K=int(b["K"]),
            primes=tuple(int(q) for q in b["primes"]),
            p=int(b["p"]),
            Q=frac_parse(b["Q"]),
            d=int(b["d"]),
            gamma=frac_parse(b["gamma"]),
            count=None if b["count"] is None else int(b["count"]),
        )
        for b in obj["blocks"]
    )
    return Ledger(constants=tab, blocks=blocks, nbar=tuple(int(x) for x in obj["nbar"]))


def save_ledger(ledger: Ledger, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(ledger_to_json(ledger), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_ledger(path) -> Ledger:
    with open(path, encoding="utf-8") as fh:
        return ledger_from_json(json.load(fh))

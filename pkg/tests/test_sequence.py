from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from primegrid.blocksets import block_elements, survivors_by_progression
from primegrid.constants import demo_constants
from primegrid.ledger import BlockParams, Ledger
from primegrid.rng import SplitMix64
from primegrid.sequence import (
    OutOfBuiltRange,
    SequenceBlock,
    SequenceStore,
    WindowTooLarge,
    banach_density,
    block_summaries,
    build_block,
    build_store,
    gap_profile,
    verify_block,
)

from _oracles import oracle_block


def test_toy_block_matches_hand_value():
    # moduli {3, 5}, d = 1 on [15, 45): multiples of 5 all die, multiples of 3
    # die within distance 1 of a multiple of 5
    got = block_elements((3, 5), 1, 15, 45)
    assert list(got) == [18, 27, 33, 42]
    assert oracle_block((3, 5), 1, 15, 45) == [18, 27, 33, 42]


def test_oracle_equivalence_randomized():
    rng = SplitMix64(0x5EED)
    pool = [2, 3, 4, 5, 6, 7, 9, 11, 13]
    configs = 0
    while configs < 24:
        k = rng.randint(1, 3)
        moduli = []
        while len(moduli) < k:
            q = pool[rng.randint(0, len(pool) - 1)]
            if q not in moduli:
                moduli.append(q)
        d = rng.randint(0, 4)
        lo = rng.randint(0, 60)
        hi = lo + rng.randint(0, 160)
        got = list(block_elements(tuple(moduli), d, lo, hi))
        assert got == oracle_block(tuple(moduli), d, lo, hi), \
            (moduli, d, lo, hi)
        configs += 1


def test_deleted_counts_match_oracle():
    moduli, d, lo, hi = (5, 7), 2, 35, 175
    per_j, deleted = survivors_by_progression(moduli, d, lo, hi)
    for j, q in enumerate(moduli):
        total = len([n for n in range(lo, hi) if n % q == 0])
        keep = [n for n in oracle_block(moduli, d, lo, hi) if n % q == 0]
        assert len(per_j[j]) == len(keep)
        assert deleted[j] == total - len(keep)


# ---------------------------------------------------------------------------
# store construction and counting


def toy_store():
    """Block 1 = [0, 15), block 2 = the toy {3,5}, d=1 construction."""
    b1 = SequenceBlock(1, 0, 15, 1, (1,), np.arange(15, dtype=np.int64), (0,))
    elems = block_elements((3, 5), 1, 15, 45)
    b2 = SequenceBlock(2, 15, 45, 1, (3, 5), elems, (0, 0))
    return SequenceStore([b1, b2])


def test_count_range_toy():
    store = toy_store()
    assert store.count_range(15, 30) == 2          # elements 18 and 27
    assert store.count_range(7, 7) == 0
    assert store.count_range(0, 15) == 15          # first block is everything
    with pytest.raises(OutOfBuiltRange):
        store.count_range(0, 46)
    with pytest.raises(ValueError):
        store.count_range(5, 3)


def test_store_demo_first_block(demo_ledger, demo_store):
    b1 = demo_store.blocks[0]
    assert b1.beta == demo_ledger.blocks[0].beta
    assert list(b1.elements[:4]) == [0, 1, 2, 3]
    assert b1.size == b1.beta
    # n_k = k - 1 on the first block
    assert demo_store.nk(1) == 0
    assert demo_store.nk(b1.beta) == b1.beta - 1


def test_store_counts_match_ledger(demo_ledger, demo_store):
    for m in range(1, 6):
        assert demo_store.blocks[m - 1].size == demo_ledger.blocks[m - 1].count
        assert demo_store.nbar_block(m) == demo_ledger.nbar[m]


def test_build_block_empty_interval():
    tab = demo_constants()
    b1 = BlockParams(m=1, beta_prev=0, K=1, primes=(1,), p=1, Q=F(1), d=1,
                     gamma=tab.gamma_small, beta=20, count=20)
    b2 = BlockParams(m=2, beta_prev=20, K=2, primes=(3, 5), p=15, Q=F(8, 15),
                     d=2, gamma=F(1, 5), beta=20, count=0)
    led = Ledger(constants=tab, blocks=(b1, b2), nbar=(0, 20, 20))
    assert build_block(led, 2).size == 0


# ---------------------------------------------------------------------------
# per-window density bounds


def test_verify_blocks_demo(demo_ledger, demo_store):
    for m in range(2, 6):
        rep = verify_block(demo_ledger, demo_store, m)
        gamma = demo_ledger.blocks[m - 1].gamma
        assert rep.ok
        assert rep.n_windows > 0
        assert 1 - gamma < rep.min_ratio <= rep.max_ratio < 1
        assert rep.min_gap >= demo_ledger.blocks[m - 1].d
        assert rep.spacing_ok


def test_window_counts_are_flat_inside_blocks(demo_ledger, demo_store):
    # interior aligned windows all hold the same survivor count
    for m in (2, 3, 5):
        rep = verify_block(demo_ledger, demo_store, m)
        assert rep.min_ratio == rep.max_ratio


def test_k1_edge_case_flagged():
    tab = demo_constants()
    b1 = BlockParams(m=1, beta_prev=0, K=1, primes=(1,), p=1, Q=F(1), d=1,
                     gamma=tab.gamma_small, beta=14, count=14)
    b2 = BlockParams(m=2, beta_prev=14, K=1, primes=(7,), p=7, Q=F(1, 7),
                     d=2, gamma=F(1, 5), beta=70, count=8)
    led = Ledger(constants=tab, blocks=(b1, b2), nbar=(0, 14, 22))
    elems = block_elements((7,), 2, 14, 70)
    store = SequenceStore([
        SequenceBlock(1, 0, 14, 1, (1,), np.arange(14, dtype=np.int64), (0,)),
        SequenceBlock(2, 14, 70, 2, (7,), elems, (0,)),
    ])
    rep = verify_block(led, store, 2)
    assert rep.k1_edge
    assert rep.min_ratio == rep.max_ratio == 1     # no deletion possible
    assert rep.upper_ok                            # waived for K = 1


def test_toy_block_ratio_fails_lower_bound():
    # period 15, d=1 toy: 4 survivors against p*Q = 8 per period
    tab = demo_constants()
    b1 = BlockParams(m=1, beta_prev=0, K=1, primes=(1,), p=1, Q=F(1), d=1,
                     gamma=tab.gamma_small, beta=15, count=15)
    b2 = BlockParams(m=2, beta_prev=15, K=2, primes=(3, 5), p=15, Q=F(8, 15),
                     d=1, gamma=F(1, 5), beta=45, count=4)
    led = Ledger(constants=tab, blocks=(b1, b2), nbar=(0, 15, 19))
    store = toy_store()
    rep = verify_block(led, store, 2)
    assert rep.min_ratio == F(2, 8)    # window [15, 30) holds 18 and 27
    assert not rep.lower_ok


# ---------------------------------------------------------------------------
# gaps and density


def test_gap_profile(demo_ledger, demo_store):
    prof = gap_profile(demo_store)
    by_m = {m: g for m, _, g in prof}
    assert by_m[1] == 1
    for m in range(2, 6):
        assert by_m[m] >= demo_ledger.blocks[m - 1].d


def test_min_gap_grows_block_to_block(demo_store):
    gaps = [g for _, _, g in gap_profile(demo_store)]
    assert gaps == sorted(gaps)
    assert gaps[-1] > gaps[0]


def test_banach_density_decreasing(demo_store):
    vals = [banach_density(demo_store, L) for L in (10**3, 10**4, 10**5, 10**6)]
    assert vals[0] == 1                     # a window inside the first block
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_banach_density_full_window(demo_store):
    d = banach_density(demo_store, demo_store.horizon)
    assert d == F(demo_store.total, demo_store.horizon)
    with pytest.raises(WindowTooLarge):
        banach_density(demo_store, demo_store.horizon + 1)


def test_aligned_window_density_bounded_by_Q(demo_ledger, demo_store):
    # inside block m every aligned period window holds fewer than p*Q points
    for m in (2, 4):
        blk = demo_ledger.blocks[m - 1]
        sb = demo_store.blocks[m - 1]
        edges = sb.beta_prev + blk.p * np.arange(
            (sb.beta - sb.beta_prev) // blk.p + 1, dtype=np.int64)
        counts = np.diff(np.searchsorted(sb.elements, edges))
        assert F(int(counts.max()), blk.p) <= blk.Q


def test_store_global_monotone(demo_store):
    assert (np.diff(demo_store.elements) > 0).all()
    assert demo_store.total == sum(b.size for b in demo_store.blocks)


def test_block_summaries_schema(demo_store):
    summ = block_summaries(demo_store)
    assert [s["m"] for s in summ] == [1, 2, 3, 4, 5]
    assert set(summ[0]) == {"m", "beta_prev", "beta", "size", "min_gap"}


def test_build_store_partial(demo_ledger):
    store3 = build_store(demo_ledger, through=3)
    assert store3.horizon == demo_ledger.blocks[2].beta
    assert len(store3.blocks) == 3


def test_build_store_requires_closed_blocks(demo_ledger):
    from primegrid.constants import demo_constants as dc
    from primegrid.ledger import new_ledger
    from primegrid.sequence import LedgerIncomplete

    with pytest.raises(LedgerIncomplete):
        build_store(new_ledger(dc()))
    with pytest.raises(LedgerIncomplete):
        build_store(demo_ledger, through=9)


@settings(max_examples=80, deadline=None)
@given(
    qs=st.lists(st.sampled_from([2, 3, 5, 7, 11, 13]), min_size=2, max_size=3,
                unique=True),
    d=st.integers(1, 4),
    periods=st.integers(1, 4),
)
def test_survivor_gaps_and_left_emptiness(qs, d, periods):
    # within any block whose left endpoint is a common multiple: survivors
    # keep gaps above d and the first d positions stay empty
    qs = tuple(sorted(qs))
    if d >= min(qs):
        return
    p = 1
    for q in qs:
        p *= q
    lo, hi = p, p + periods * p
    elems = block_elements(qs, d, lo, hi)
    if len(elems) >= 2:
        assert int(np.diff(elems).min()) > d
    assert not ((elems >= lo) & (elems < lo + d)).any()
    assert list(elems) == oracle_block(qs, d, lo, hi)

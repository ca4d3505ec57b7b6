import json

from primegrid.zbattery import (
    battery_deviation_l2,
    battery_progression_weak,
    battery_window_strong,
    battery_window_weak,
    random_signal,
    run_all,
    shrink_signal,
    signal_json,
)
from primegrid.rng import SplitMix64
from primegrid.zops import FiniteSignal


def test_batteries_deterministic():
    a = run_all(123, trials=12)
    b = run_all(123, trials=12)
    assert json.dumps(a, sort_keys=True, default=str) == \
        json.dumps(b, sort_keys=True, default=str)
    c = run_all(124, trials=12)
    assert json.dumps(a, sort_keys=True, default=str) != \
        json.dumps(c, sort_keys=True, default=str)


def test_batteries_clean_at_modest_trials():
    res = run_all(777, trials=60)
    for name, s in res["summary"].items():
        assert s["failures"] == 0, name
        assert s["trials"] >= 60


def test_record_schema():
    recs = battery_progression_weak(5, 6)
    for rec in recs:
        assert set(rec) >= {"test", "ctx", "seed", "trial", "lhs", "rhs",
                            "ratio", "pass"}
        assert rec["pass"] is True


def test_deviation_battery_includes_wide_context():
    recs = battery_deviation_l2(5, 8)
    ctxs = {tuple(r["ctx"]) for r in recs}
    assert (5, 7, 11) in ctxs
    flagged = [r for r in recs if tuple(r["ctx"]) == (5, 7, 11)]
    assert all(r["ratio_ok_ctx"] is False for r in flagged)


def test_random_signal_reproducible():
    a = random_signal(SplitMix64(9), 10)
    b = random_signal(SplitMix64(9), 10)
    assert a.lo == b.lo and a.values == b.values
    assert any(v != 0 for v in a.values)


def test_shrink_minimizes_under_predicate():
    sig = FiniteSignal(-3, [0.0, 2.0, 0.0, -1.0, 5.0, 0.0])
    # predicate: keeps failing while total mass at least 5
    small = shrink_signal(sig, lambda s: s.l1 >= 5.0)
    assert small.l1 >= 5.0
    assert len(small.values) <= 2
    assert small.l1 <= sig.l1


def test_signal_json_rational_fields():
    sig = FiniteSignal(2, [0.5, -1.0])
    blob = signal_json(sig)
    assert blob["lo"] == 2
    assert blob["values"][0] == {"num": "1", "den": "2"}
    assert blob["values"][1] == {"num": "-1", "den": "1"}


def test_window_batteries_have_margin():
    for recs in (battery_window_weak(31, 40), battery_window_strong(31, 40)):
        worst = max(r["ratio"] for r in recs)
        assert worst <= 1.0

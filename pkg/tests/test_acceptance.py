"""Acceptance criteria 1-10, one PASS/FAIL line each.

Every criterion is measured through the verification registry (the same
code ``cusplab verify`` runs) and timed against its runtime budget. Criteria
known to be unattainable are still run as stated and fail visibly.
"""

import time

import pytest

from cusplab import checks


def _run(names):
    start = time.perf_counter()
    results = [checks.run_check(n) for n in names]
    return results, time.perf_counter() - start


def _report(capsys, number, ok, text):
    with capsys.disabled():
        print(f"\nCRITERION {number}: {'PASS' if ok else 'FAIL'}  {text}")


def _fmt(results):
    parts = []
    for r in results:
        vals = ", ".join(f"{k}={v:.3g}" for k, v in r.measured.items() if isinstance(v, float))
        parts.append(f"{r.name}[{'ok' if r.passed else 'fail'}: {vals}]")
    return "; ".join(parts)


CRITERIA = [
    (1, ["free_propagation"], 60.0),
    (2, ["figure1_small_r", "figure1_large_r"], 1.0),
    (3, ["half_power_free"], 1.0),
    (4, ["te_residual_m0_3", "te_residual_m4", "te_divergence"], 10.0),
    (5, ["borel_eq20"], 10.0),
    (6, ["s_equation"], 1.0),
    (7, ["tail_identity"], 5.0),
    (8, ["ehrenfest"], 120.0),
    (9, ["t11_2_amplitude"], 10.0),
    (10, ["special_functions"], 1.0),
]


@pytest.mark.parametrize("number,names,budget", CRITERIA, ids=[f"criterion_{c[0]}" for c in CRITERIA])
def test_criterion(number, names, budget, capsys):
    results, elapsed = _run(names)
    if number == 9:
        # the criterion is the documented non-goal: the registry must carry the
        # substitution and the substitute checks must pass
        r = results[0]
        ok = (r.status == "substituted" and r.passed and elapsed <= budget
              and set(r.measured["substitutes"]) == set(checks.SUBSTITUTES)
              and "t11_2_amplitude" in checks.render_markdown())
        _report(capsys, 9, ok, f"status={r.status}; substitutes={r.measured['substitutes']}; "
                               f"term size at r=1, t=0.01: {r.measured['amplitude_at_r1_t0.01']:.3g} "
                               f"time={elapsed:.2f}s (budget {budget:g}s)")
        assert ok
        return
    ok = all(r.passed for r in results) and elapsed <= budget
    _report(capsys, number, ok, f"{_fmt(results)} time={elapsed:.2f}s (budget {budget:g}s)")
    assert all(r.passed for r in results), [r.to_dict() for r in results if not r.passed]
    assert elapsed <= budget

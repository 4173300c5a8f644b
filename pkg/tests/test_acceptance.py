"""Exit criteria for the solver, simulator and experiment harness.

Each test records one PASS/FAIL line, collected in the terminal summary.
"""
import itertools
import time
import warnings

import numpy as np
import pytest
from scipy.stats import chisquare

from conftest import params, solved
from oracles import timeline_step
from ehaoi.harness.experiments import slice_policy, withhold_set
from ehaoi.harness.trace import aoi_at, worked_example_log
from ehaoi.kernel import build_kernel
from ehaoi.model import START_STATE, Disturbance, StateSpace, admissible_actions, next_state, reachable_states
from ehaoi.simulator import estimate_value, transition_counts
from ehaoi.solver import bellman_residual, default_tolerance, evaluate_policy

GAMMA = 0.99
EPS = default_tolerance(GAMMA)
PE_GRID = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]
PS_GRID = [0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]
E_MAX_GRID = [1, 2, 3, 5]


def j0(**overrides) -> float:
    return solved(**overrides).value(START_STATE)


@pytest.mark.parametrize("pe", [0.2, 0.5, 0.8])
def test_c1_bellman_fixed_point(pe, report_criterion):
    sol = solved(pe=pe)
    residual = bellman_residual(sol.J, sol.kernel, GAMMA)
    s0 = sol.kernel.space.encode(START_STATE)
    gap = abs(evaluate_policy(sol.policy, sol.kernel, GAMMA)[s0] - sol.J[s0])
    bound = GAMMA / (1 - GAMMA) * EPS + 1e-8
    ok = residual < EPS and gap <= bound
    report_criterion(1, ok, f"pe={pe}: |TJ-J|={residual:.2e} < {EPS:.2e}, |J_mu*-J|(s0)={gap:.2e} <= {bound:.2e}")
    assert ok


def test_c2_closed_form_chain(report_criterion):
    J = j0(pe=1.0, ps=1.0, p01=0.0, e_max=2)
    expected = 1 + 2 * GAMMA + GAMMA**2 / (1 - GAMMA)
    ok = abs(J - 100.99) <= 1e-4 and abs(expected - 100.99) < 1e-12
    report_criterion(2, ok, f"J*(s0)={J:.6f}, closed form 100.99, tol 1e-4")
    assert ok


def test_c3_monte_carlo_agreement(report_criterion):
    sol = solved()
    start = time.perf_counter()
    est = estimate_value(sol.policy, START_STATE, 10_000, 1200, 0, sol.kernel)
    elapsed = time.perf_counter() - start
    J = sol.value(START_STATE)
    ok = abs(est.mean - J) <= 3 * est.stderr and elapsed < 60
    report_criterion(
        3, ok, f"estimate {est.mean:.3f} +/- {est.stderr:.3f} vs J*(s0)={J:.3f} ({elapsed:.1f}s, limit 60s)"
    )
    assert ok


def test_c4_buffer_and_harvest_ordering(report_criterion):
    table = np.array([[j0(pe=pe, e_max=e) for pe in PE_GRID] for e in E_MAX_GRID])
    along_pe = np.all(np.diff(table, axis=1) <= 0)
    along_buffer = np.all(np.diff(table, axis=0) <= 0)
    gain_small = table[0] - table[1]  # e_max 1 -> 2
    gain_large = table[2] - table[3]  # e_max 3 -> 5
    diminishing = np.all(gain_large < gain_small)
    ok = bool(along_pe and along_buffer and diminishing)
    report_criterion(
        4,
        ok,
        f"nonincreasing in pe: {along_pe}, in e_max: {along_buffer}, "
        f"gain 3->5 < gain 1->2 at every pe: {diminishing}",
    )
    assert ok


def test_c5_success_probability_ordering(report_criterion):
    table = np.array([[j0(pe=pe, ps=ps) for ps in PS_GRID] for pe in PE_GRID])
    ok = bool(np.all(np.diff(table, axis=1) <= 0))
    report_criterion(5, ok, f"J*(s0) nonincreasing in ps for all {len(PE_GRID)} pe values: {ok}")
    assert ok


def test_c6_process_transition_grid(report_criterion):
    table = np.array([[j0(p01=a, p10=b) for b in PE_GRID] for a in PE_GRID])
    argmax = tuple(PE_GRID[i] for i in np.unravel_index(np.argmax(table), table.shape))
    argmin = tuple(PE_GRID[i] for i in np.unravel_index(np.argmin(table), table.shape))
    column = table[::-1, PE_GRID.index(0.9)]  # p01 from 0.9 down to 0.1 at p10 = 0.9
    increasing = bool(np.all(np.diff(column) > 0))
    ok = argmax == (0.9, 0.1) and argmin == (0.9, 0.9) and increasing
    report_criterion(
        6, ok, f"max at {argmax}, min at {argmin}, increasing as p01 drops at p10=0.9: {increasing}"
    )
    assert ok


def test_c7_policy_structure(report_criterion):
    high, low = solved(pe=0.8), solved(pe=0.4)
    wh_high = withhold_set(slice_policy(high, 0))
    wh_low = withhold_set(slice_policy(low, 0))
    strict = wh_low > wh_high
    diff = sorted(
        (e, d + 1) for e, d in zip(*np.nonzero(slice_policy(high, 0) != slice_policy(high, 1)))
    )
    diff = [(int(e), int(d)) for e, d in diff]
    soft_ok = diff == [(2, 1), (3, 1)]
    if not soft_ok:
        warnings.warn(f"Z=0/Z=1 difference set at pe=0.8 is {diff}, expected [(2, 1), (3, 1)]; ties go to withhold")
    report_criterion(
        7,
        strict,
        f"withhold set at pe=0.4 strictly contains pe=0.8: {strict}; "
        f"soft: Z=0/Z=1 differ at {diff} ({'matches' if soft_ok else 'DEVIATES from'} [(2, 1), (3, 1)], ties -> withhold)",
    )
    assert strict


def test_c8_dynamics_match_timeline(report_criterion, baseline):
    space = StateSpace(baseline)
    checks = 0
    mismatches = []
    for i in sorted(reachable_states(baseline, START_STATE)):
        s = space.decode(i)
        for a in sorted(admissible_actions(s)):
            for ws, we, wz in itertools.product((0, 1), repeat=3):
                if ws and a == 0:
                    continue
                checks += 1
                got = next_state(s, a, Disturbance(ws, we, wz), baseline)
                want = timeline_step(s, a, ws, we, wz, baseline)
                if got != want:
                    mismatches.append((s, a, (ws, we, wz), got, want))
    ok = not mismatches and checks < 25_000
    report_criterion(8, ok, f"{checks} reachable (state, action, disturbance) checks, {len(mismatches)} mismatches")
    assert ok, mismatches[:5]


def test_c9_kernel_sanity(report_criterion, baseline):
    K = build_kernel(baseline)
    worst = 0.0
    for a in (0, 1):
        sums = np.asarray(K.matrices[a].sum(axis=1)).ravel()[K.admissible[:, a]]
        worst = max(worst, float(np.max(np.abs(sums - 1.0))))

    rng = np.random.default_rng(2024)
    candidates = sorted(reachable_states(baseline, START_STATE))
    pvalues = []
    for i in rng.permutation(candidates):
        i = int(i)
        a = int(rng.integers(0, 2)) if K.admissible[i, 1] else 0
        row = K.row(i, a)
        if len(row) < 2:
            continue
        counts = transition_counts(K.space.decode(i), a, 100_000, [2024, i, a], K)
        assert set(counts) <= {j for j, _ in row}
        observed = [counts.get(j, 0) for j, _ in row]
        expected = [q * 100_000 for _, q in row]
        pvalues.append(chisquare(observed, expected).pvalue)
        if len(pvalues) == 10:
            break
    ok = worst <= 1e-12 and len(pvalues) == 10 and min(pvalues) > 1e-3
    report_criterion(
        9, ok, f"max |row sum - 1| = {worst:.1e}; chi-square min p over {len(pvalues)} rows = {min(pvalues):.3f}"
    )
    assert ok


def test_c10_worked_trace(report_criterion):
    log = worked_example_log()
    at6, at8 = aoi_at(log, 6)[3:], aoi_at(log, 8)[3:]
    ok = at6 == (6, 1) and at8 == (0, 1)
    report_criterion(10, ok, f"(d0, d1) at k=6: {at6}, at k=8: {at8}")
    assert ok

import math

import numpy as np
import pytest
from scipy.special import ndtr

from conftest import CRW_PARAMS, chain_rule_law
from qdsp.applications import (DELTA_PARAMS, DELTA_STRIKES, CRW_EXAMPLE, DonskerWalk, MarketParams, black_scholes_delta,
                               build_crw_model, build_delta_model, delta_start, donsker_gaps, evaluate_grid,
                               load_crw_params, normal_cdf, run_crw_pipeline, run_delta_pipeline)
from qdsp.errors import DomainError
from qdsp.model import char_fn_brute_force, expectation_brute_force, sum_distribution


def test_normal_cdf():
    for x in (-3.0, -0.4, 0.0, 1.2, 6.0):
        assert normal_cdf(x) == pytest.approx(float(ndtr(x)), abs=1e-15)


def test_black_scholes_reference_values():
    # d1 = (ln(S0/K) + (r + sigma^2/2) tau) / (sigma sqrt(tau)) at tau = 9
    assert delta_start(DELTA_PARAMS, 110) == pytest.approx(1.4414970032612517, abs=1e-12)
    assert black_scholes_delta(DELTA_PARAMS, 110) == pytest.approx(0.925277838329513, abs=1e-12)
    assert black_scholes_delta(DELTA_PARAMS, 25) == pytest.approx(1.0, abs=1e-12)


def test_market_params_validation(tmp_path):
    with pytest.raises(DomainError):
        MarketParams(0.0, -0.1, 0.0, 100.0, 0.0, 1.0)
    with pytest.raises(DomainError):
        MarketParams(0.0, 0.1, 0.0, 100.0, 2.0, 1.0)
    with pytest.raises(DomainError):
        DELTA_PARAMS.strike(None)
    path = tmp_path / "p.json"
    path.write_text('{"mu": 0, "sigma": 0.02, "r": 0.02, "S0": 100, "t": 1, "T": 10, "K": 110}')
    p = MarketParams.load(path)
    assert p.K == 110 and p.tau == 9


def test_donsker_walk_moments():
    w = DonskerWalk(mu_B=0.3, sigma_B=2.0, n=16, x0=1.0)
    m = w.to_model()
    assert expectation_brute_force(m, lambda x: x) == pytest.approx(1.3, abs=1e-12)
    assert expectation_brute_force(m, lambda x: (x - 1.3) ** 2) == pytest.approx(4.0, abs=1e-12)
    with pytest.raises(DomainError):
        DonskerWalk(0.0, 1.0, 0)


def test_delta_model_matches_scaled_walk():
    m = build_delta_model(DELTA_PARAMS, 4, 110)
    tau = 9.0
    assert m.x0 == pytest.approx(delta_start(DELTA_PARAMS, 110))
    drift = (0 - 0.02**2 / 2) / (0.02 * 3) / 4
    assert sorted(m.values[0]) == pytest.approx([drift - 0.5 / math.sqrt(tau), drift + 0.5 / math.sqrt(tau)])


def test_delta_pipeline_identity():
    # the assembled value equals E[Phi(S) - S/P] up to truncation
    P = 100.0
    rows = run_delta_pipeline(DELTA_PARAMS, [110, 25], n=4, L=100, P=P)
    assert [r.K for r in rows] == [25.0, 110.0]
    for r in rows:
        m = build_delta_model(DELTA_PARAMS, 4, r.K)
        ramp = expectation_brute_force(m, lambda x: x) / P
        assert r.estimate_re == pytest.approx(r.brute_force - ramp, abs=1e-9)
        assert abs(r.estimate_im) <= 1e-12
        assert r.reference == black_scholes_delta(DELTA_PARAMS, r.K)


def test_delta_pipeline_negative_orders_agree():
    a = run_delta_pipeline(DELTA_PARAMS, [110], L=40)
    b = run_delta_pipeline(DELTA_PARAMS, [110], L=40, explicit_negative=True)
    assert a[0].estimate_re == pytest.approx(b[0].estimate_re, abs=1e-13)


def test_delta_pipeline_threads_do_not_change_output():
    kw = dict(n=4, L=20, method="shots", shots=512, seed=9)
    assert run_delta_pipeline(DELTA_PARAMS, [110], threads=1, **kw) == \
        run_delta_pipeline(DELTA_PARAMS, [110], threads=4, **kw)


def test_unknown_method():
    with pytest.raises(DomainError):
        evaluate_grid(build_crw_model(**CRW_EXAMPLE), [0], 100.0, "magic")


def test_crw_pipeline_matches_chain_rule():
    model = build_crw_model(**CRW_EXAMPLE)
    rows = run_crw_pipeline(model, L=10)
    law = chain_rule_law(**CRW_PARAMS)
    assert len(rows) == 21
    for r in rows:
        phi = sum(p * np.exp(1j * r.v * s) for s, p in law.items())
        assert complex(r.re, r.im) == pytest.approx(phi, abs=1e-12)
        assert complex(r.oracle_re, r.oracle_im) == pytest.approx(phi, abs=1e-12)


def test_crw_params_file(tmp_path):
    path = tmp_path / "crw.json"
    path.write_text('{"x0": 0, "x_plus": 1, "x_minus": -1, "p": [0.5, 0.6], "q": [0.5, 0.2]}')
    m = load_crw_params(path)
    assert m.n == 2
    # P[up, up] = 0.5 * 0.6
    sums, probs = sum_distribution(m)
    assert dict(zip(sums.tolist(), probs.tolist()))[2.0] == pytest.approx(0.3)
    path.write_text('{"x_plus": 1}')
    with pytest.raises(DomainError):
        load_crw_params(path)


def test_ae_grid_within_bound():
    model = build_crw_model(**CRW_EXAMPLE)
    ests = evaluate_grid(model, [0, 7], 100.0, "ae", ae_m=7)
    for e in ests:
        assert abs(e.value - char_fn_brute_force(model, e.v)) < 0.1


def test_donsker_gaps_shrink():
    gaps = donsker_gaps(DELTA_PARAMS, 110, [4, 16, 64])
    mags = [abs(g) for _, _, g in gaps]
    assert mags[0] > mags[1] > mags[2]


def test_strike_list_is_the_experiment_grid():
    assert len(DELTA_STRIKES) == 12 and 110 in DELTA_STRIKES

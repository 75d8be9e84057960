import math

import pytest

import mchit


@pytest.fixture(scope="module")
def h_chain():
    return mchit.build_preset("h", p=1e-3, h=0.25)


def test_build_and_validate(h_chain):
    assert h_chain.n == 4
    assert mchit.validate(h_chain)["pass"]


def test_json_round_trip(h_chain):
    text = h_chain.to_json()
    again = mchit.MarkovChain.from_json(text)
    assert again.n == h_chain.n
    for x in range(4):
        for y in range(4):
            assert again.prob(x, y) == h_chain.prob(x, y)


def test_hitting_stats_ordering(h_chain):
    stats = mchit.hitting_stats(h_chain, 1, [3])
    zeta = math.exp(-1.0)
    assert stats["T_LT"] <= stats["T_E"] * (1 + 1e-10)
    assert zeta * stats["T_Q"][zeta] <= stats["T_E"] * (1 + 1e-10)


def test_survival_curve_mean(h_chain):
    curve = mchit.survival_curve(h_chain, 1, [3])
    assert curve[0] == 1.0
    assert abs(sum(curve) - mchit.mean_hitting_time(h_chain, 1, [3])) < 1e-6


def test_rho_values(h_chain):
    # rho_A = p^{1-2h}/2 on this family
    assert mchit.rho_A(h_chain, 1, [3]) == pytest.approx(0.5 * 1e-3**0.5, rel=1e-10)
    assert 0 < mchit.rho_B(h_chain, 1, [3]) < 1


def test_recurrence_and_basin(h_chain):
    cert = mchit.minimal_R(h_chain, 1, [3], 0.1)
    assert not cert["capped"]
    assert cert["achieved"] <= 0.1
    b = mchit.basin(h_chain, 1, [3], cert["achieved"])
    assert 0 in b["members"]


def test_lemma_suite(h_chain):
    rep = mchit.lemma_suite(h_chain, 1, [3])
    assert rep["all_pass"], [c["name"] for c in rep["checks"] if not c["pass"]]


def test_envelope(h_chain):
    dev = mchit.verify_exponential_law(h_chain, 1, [3], t_points=50, t_max=10.0)
    assert dev["pass"]
    assert dev["max_measured"] < 0.01


def test_t3_suite(h_chain):
    rep = mchit.theorem_t3_inequality_suite(h_chain, 1, [3])
    assert rep["all_pass"]


def test_sampling_determinism(h_chain):
    a = mchit.sample_hitting_times(h_chain, 1, [3], count=500, seed=9)
    b = mchit.sample_hitting_times(h_chain, 1, [3], count=500, seed=9)
    c = mchit.sample_hitting_times(h_chain, 1, [3], count=500, seed=10)
    assert a["samples"] == b["samples"]
    assert a["samples"] != c["samples"]
    assert a["capped_count"] == 0
    assert mchit.dkw_band(500) > 0


def test_error_mapping():
    with pytest.raises(mchit.ParamOutOfRange):
        mchit.build_preset("abc", L=3)
    with pytest.raises(mchit.ConfigError):
        mchit.MarkovChain.from_json("{\"n\": 2}")

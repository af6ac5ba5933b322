"""Link budget: independent dB-chain recomputation and shape properties."""

import math

import pytest

from sbra.linkbudget import (DEFAULT_PARAMS, LinkBudgetParams,
                             free_space_path_loss_db, link_rate,
                             noise_floor_dbm, snr_db)


def test_fspl_against_textbook_constant():
    # FSPL(dB) = 92.45 + 20 log10(f_GHz) + 20 log10(d_km)
    for d_m in (10.0, 100.0, 150.0, 300.0):
        for f in (28.0, 60.0, 73.0):
            want = 92.45 + 20 * math.log10(f) + 20 * math.log10(d_m / 1000.0)
            assert free_space_path_loss_db(d_m, f) == pytest.approx(want, abs=0.01)


def test_noise_floor_value():
    # -174 dBm/Hz + 10 log10(2160 MHz) + NF 7 dB
    want = -174.0 + 10 * math.log10(2160e6) + 7.0
    assert noise_floor_dbm(DEFAULT_PARAMS) == pytest.approx(want, abs=1e-9)
    assert noise_floor_dbm(DEFAULT_PARAMS) == pytest.approx(-73.655, abs=0.001)


def test_snr_chain_recomputed():
    p = DEFAULT_PARAMS
    for d in (50.0, 140.0, 180.0, 280.0):
        rx = (p.tx_power_dbm + 2 * p.antenna_gain_dbi
              - free_space_path_loss_db(d, p.carrier_ghz)
              - p.atmospheric_db_per_km * d / 1000.0)
        assert snr_db(d) == pytest.approx(rx - noise_floor_dbm(p), abs=1e-9)


def test_rate_recomputed_from_shannon():
    p = DEFAULT_PARAMS
    for d in (60.0, 140.0, 180.0, 242.487, 280.0):
        shannon = p.bandwidth_mhz * math.log2(1 + 10 ** (snr_db(d, p) / 10.0))
        want = round(min(shannon, p.rate_cap_mbps), 3)
        got = link_rate(d, p)
        if shannon < p.rate_floor_mbps:
            assert got is None
        else:
            assert got == want


def test_rate_monotone_and_truncated():
    prev = None
    saw_cap = saw_none = False
    for d in [1.0 * i for i in range(1, 2000)]:
        r = link_rate(float(d))
        if r is None:
            saw_none = True
            # once unusable, farther is never usable again
            assert link_rate(float(d) + 100.0) is None
            break
        if r == DEFAULT_PARAMS.rate_cap_mbps:
            saw_cap = True
        if prev is not None:
            assert r <= prev
        prev = r
    assert saw_cap, "short distances should saturate at the cap"
    assert saw_none, "long distances should fall below the floor"


def test_canonical_distances_usable():
    # every lattice spacing the generators rely on must clear the floor
    for d in (140.0, 180.0, 242.487, 280.0, 300.0):
        assert link_rate(d) is not None


def test_rate_is_kbps_grained():
    r = link_rate(173.0)
    assert r is not None
    assert round(r * 1000) == pytest.approx(r * 1000, abs=1e-6)


def test_nonpositive_distance_rejected():
    with pytest.raises(ValueError):
        link_rate(0.0)
    with pytest.raises(ValueError):
        link_rate(-5.0)


def test_params_as_pairs_sorted():
    pairs = LinkBudgetParams().as_pairs()
    assert [k for k, _ in pairs] == sorted(k for k, _ in pairs)
    assert ("carrier_ghz", 60.0) in pairs

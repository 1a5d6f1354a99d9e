"""Growth fitting on synthetic and measured step series."""

import pytest

from qmlab.analysis import growth_report
from qmlab.growth import fit_growth


def test_exact_linear_series():
    rep = fit_growth([(n, 7 * n) for n in (4, 8, 16, 32, 64)])
    assert rep.fitted_exponent == pytest.approx(1.0)
    assert rep.linear and rep.verdict == "linear"


def test_quadratic_series():
    rep = fit_growth([(n, n * n) for n in (4, 8, 16, 32, 64)])
    assert rep.fitted_exponent == pytest.approx(2.0)
    assert not rep.linear and rep.verdict == "not-linear"


def test_nlogn_with_big_spread_fails_ratio():
    import math
    rep = fit_growth([(n, int(n * math.log(n) ** 2)) for n in (4, 16, 256, 4096, 65536)])
    assert rep.max_ratio / rep.min_ratio > 3
    assert not rep.linear


def test_series_validation():
    with pytest.raises(ValueError):
        fit_growth([(4, 4), (8, 8), (16, 16)])          # too short
    with pytest.raises(ValueError):
        fit_growth([(4, 4), (4, 5), (8, 8), (16, 16)])  # duplicate n
    with pytest.raises(ValueError):
        fit_growth([(1, 1), (2, 2), (4, 4), (8, 8)])    # n below 2


def test_unsorted_input_is_sorted():
    rep = fit_growth([(64, 64), (4, 4), (16, 16), (8, 8)])
    assert [n for n, _ in rep.series] == [4, 8, 16, 64]


def test_measured_mk_growth_small():
    rep = growth_report("mk:2", range(6, 10))
    assert rep.fitted_exponent == pytest.approx(1.0, abs=0.01)
    assert rep.linear


def test_riffle_copy_acceptor_linear_over_wide_range():
    # members with tag lengths 4..14 (input sizes 2**5 .. 2**15)
    rep = growth_report("lprime", range(5, 16))
    assert rep.linear


def test_unknown_machine():
    with pytest.raises(KeyError):
        growth_report("warp-drive", range(6, 10))

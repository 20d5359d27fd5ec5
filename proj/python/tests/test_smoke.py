import math

import pytest

import srm


def test_w_fixture_and_mix():
    x1 = srm.construct_curve([8, 6, 4, 2])
    x2 = srm.construct_curve([4, 2, 2, 2, 2])
    mixed = srm.mix(x1, x2, 0.5)
    assert mixed.values == [6, 4, 3, 2, 1]
    assert [srm.compute_index(c, "w").level for c in (x1, x2, mixed)] == [4, 3, 5]
    assert srm.srm_generic(mixed, "w").level == 5


def test_closed_forms():
    assert srm.compute_index(srm.construct_curve([10]), "h_r").level == 2
    assert srm.compute_index(srm.construct_curve([10, 9, 5, 2]), "h2").level == 2
    assert srm.phi_index(srm.construct_curve([8, 6, 4, 2]), 1.62).level == pytest.approx(8.0)
    shifted = srm.shift_citations(srm.construct_curve([8, 6, 4, 2]), 1)
    assert math.isinf(srm.compute_index(shifted, "pubs").level)


def test_errors_map_to_python():
    with pytest.raises(ValueError):
        srm.construct_curve([1, -3])
    with pytest.raises(KeyError):
        srm.compute_index(srm.construct_curve([1]), "g-index")
    with pytest.raises(ValueError):
        srm.append_publication(srm.construct_curve([3], tail=1))


def test_duality():
    x = srm.construct_curve([8, 6, 4, 2])
    z = srm.DualDensity.uniform(10)
    assert srm.expected_value(z, x) == pytest.approx(2.0)
    assert srm.gamma(z, 4, "w") == pytest.approx(1.2)
    assert srm.dual_value(x, "c_max", [srm.DualDensity.indicator(0, 1, 10)]) == 8
    assert srm.minimizer_gap("pubs", x, 0.1, 10) == 0
    assert srm.weak_duality_margin(x, "h", z) >= -1e-9


def test_calibration():
    curves = [srm.construct_curve([100 / i**1.5 for i in range(1, 21)])]
    fit = srm.fit_author(curves[0], "a")
    assert fit.beta_hat == pytest.approx(1.5, abs=1e-9)
    assert fit.q_hat == pytest.approx(100, rel=1e-9)
    profile = srm.calibrate_cohort(curves, ["a"])
    again = srm.CohortProfile.from_json(profile.to_json())
    assert again.beta_bar == profile.beta_bar


def test_ranking_and_cli(tmp_path):
    ranking = srm.rank_authors(
        {"a": srm.construct_curve([4]), "b": srm.construct_curve([3]),
         "c": srm.construct_curve([4])}, "c_max")
    assert ranking == [("a", 4, 1), ("c", 4, 1), ("b", 3, 3)]

    cohort = tmp_path / "cohort.csv"
    cohort.write_text("author_id,citations\nX1,8;6;4;2\nX2,4;2;2;2;2\n")
    code, out, _ = srm.run_cli(["compute", "--input", str(cohort), "--indices", "w"])
    assert code == 0
    assert out == "author_id,w\nX1,4\nX2,3\n"
    assert srm.run_cli(["compute"])[0] == 2

import math

import pytest

import rambig


def test_worst_case_hand_example():
    s = rambig.AmbiguitySet(rambig.NormKind.L1, [1.0] * 5, 0.4, [0.2] * 5)
    value, argmin = rambig.worst_case([1, 2, 3, 4, 5], s)
    assert value == pytest.approx(2.2)
    assert argmin == pytest.approx([0.4, 0.2, 0.2, 0.2, 0.0])
    assert rambig.dual_lower_bound([1, 2, 3, 4, 5], s) <= value + 1e-12


def test_invalid_set_raises():
    with pytest.raises(ValueError):
        rambig.AmbiguitySet(rambig.NormKind.L1, [1.0, 1.0], -1.0, [0.5, 0.5])


def test_weights_and_bounds():
    w, objective = rambig.optimal_weights([0.0, 7.0], rambig.NormKind.L1)
    assert sum(x * x for x in w) == pytest.approx(1.0)
    assert objective == pytest.approx(7.0 / math.sqrt(2.0))
    assert rambig.hoeffding_l1_psi(100, 5, 1, 0.05) == pytest.approx(0.40177, abs=1e-5)
    assert rambig.credible_index(0.05, 100) == 95


def test_value_iteration():
    mdp = rambig.make_domain("riverswim")
    values, policy = rambig.value_iteration(mdp)
    assert policy == [1] * 6
    assert len(values) == 6


def test_pipeline_and_single_update():
    mdp = rambig.make_domain("riverswim")
    stats = rambig.simulate_dataset("riverswim", 50, seed=3)
    assert stats == rambig.simulate_dataset("riverswim", 50, seed=3)
    report = rambig.run_weighted_pipeline(stats, mdp, "hoeffding:l1:weighted", 0.05)
    assert report["guaranteed_return"] < 3000 / (1 - 0.95)
    assert len(report["weights"]) == 12

    single = rambig.SampleStats(5, 1)
    for j, c in enumerate([20, 25, 15, 30, 10]):
        single.add(0, 0, j, c)
    value, psi, weights = rambig.single_update_guarantee(
        single, [1, 2, 3, 4, 5], "bci:l1:weighted", 0.1, posterior_draws=500, seed=1)
    assert 1.0 <= value <= 3.0
    assert psi > 0


def test_run_experiment(tmp_path):
    text = "domain = single_bellman\nmethods = hoeffding:l1:weighted\ntrials = 2\nseed = 1\n"
    a = rambig.run_experiment(text, tmp_path / "a")
    b = rambig.run_experiment(text, tmp_path / "b")
    assert a.read_bytes() == b.read_bytes()
    plot = rambig.emit_plot_data(a, tmp_path / "plot.csv")
    assert plot.read_text().startswith("series,")
    with pytest.raises(ValueError):
        rambig.run_experiment("domain = nowhere\n", tmp_path / "c")

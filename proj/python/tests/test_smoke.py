import math

import numpy as np
import pytest

import herdselect as hs


def test_version():
    assert hs.__version__.count(".") == 2


def test_dataset_round_trip():
    values = np.arange(12, dtype=float).reshape(4, 3)
    d = hs.Dataset(values, [0, 1, 0, 1], name="toy")
    assert (d.n_samples, d.n_genes, d.n_classes) == (4, 3, 2)
    assert np.array_equal(d.values, values)
    assert d.gene_names == ["g0", "g1", "g2"]
    with pytest.raises(hs.HerdselectError):
        hs.Dataset(values, [0, 0, 0, 0])


def test_statistics_on_reference_ranks():
    ranks = [3.9, 5.8, 6, 4.6, 2.5, 4.2, 1]
    fr = hs.friedman(ranks, 10)
    assert fr["chi_square"] == pytest.approx(40.5, abs=1e-9)
    assert fr["df"] == 6
    pairs = hs.posthoc_vs_control(ranks, 10, 6)
    assert [p["rejected"] for p in pairs] == [True, True, True, True, False, True]


def test_transfer_functions_and_fitness():
    assert hs.tf_value("s2", 0.0) == 0.5
    assert hs.tf_value("V2", 1.0) == pytest.approx(math.tanh(1.0))
    w1, w2 = hs.x_shaped_pair(0.7)
    assert w1 + w2 == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(hs.HerdselectError):
        hs.tf_value("q", 0.0)
    assert hs.fitness_value(0.9, 10, 100, 0.99) == pytest.approx(0.9, abs=1e-12)


def test_information_measures():
    x = [0, 0, 1, 1]
    assert hs.entropy(x) == pytest.approx(1.0)
    assert hs.mutual_information(x, x) == pytest.approx(1.0)
    assert hs.mutual_information(x, [0, 1, 0, 1]) == pytest.approx(0.0, abs=1e-12)


def test_mrmr_puts_planted_genes_first():
    d, planted = hs.make_synthetic(80, 3, 20, 2, 4.0, 5)
    top = hs.mrmr_rank(d, 3)
    assert sorted(top) == sorted(planted)


def test_optimize_python_cost():
    pos, cost, trace = hs.optimize(lambda x: sum(v * v for v in x), 3, -5, 5, n_horses=8, max_iter=10, seed=2)
    assert len(pos) == 3 and len(trace) == 11
    assert cost == trace[-1]
    assert all(b <= a for a, b in zip(trace, trace[1:]))


def test_select_is_deterministic():
    d, _ = hs.make_synthetic(40, 3, 12, 2, 3.0, 3)
    opts = dict(tf="x", horses=6, iters=3, top_m=8, folds=3, repeats=2, classifier="knn", seed=7)
    a = hs.select(d, **opts)
    b = hs.select(d, threads=2, **opts)
    assert a == b
    assert len(a["per_repeat"]) == 2
    assert 0.0 <= a["best_accuracy"] <= 1.0


def test_cli_in_process(tmp_path):
    code, out, _ = hs.run_cli(["demo-data", "--samples", "30", "--out", str(tmp_path)])
    assert code == 0
    d = hs.load_csv(str(tmp_path / "data.csv"))
    assert d.n_samples == 30
    code, _, err = hs.run_cli(["select", "--tf", "q", "--data", str(tmp_path / "data.csv")])
    assert code == 2 and "s1" in err

"""Smoke tests for the python surface of the C++ core."""

import math

import pytest

import detssl


def test_table1_losses_at_known_points():
    assert detssl.entropy_loss([1.0, 0.0]) == 0.0
    assert detssl.entropy_loss([0.5, 0.5]) == pytest.approx(-math.log(2), rel=1e-12)
    assert detssl.exclusivity_loss([0.5, 0.5]) == pytest.approx(math.log(0.5), rel=1e-12)
    assert detssl.pseudo_label_loss([0.7, 0.3]) == pytest.approx(math.log(0.7), rel=1e-12)
    assert detssl.dp_loss([0.5, 0.5], 10.0) == pytest.approx(-9 * math.log(2), rel=1e-12)


def test_loss_gradients_have_the_right_shape_and_sign():
    value, grad = detssl.unsup_loss_grad("dp", [0.25, 0.25, 0.25, 0.25], temperature=10.0)
    assert value < 0
    assert len(grad) == 4
    assert all(g == pytest.approx(grad[0]) for g in grad)


def test_invalid_simplex_is_rejected():
    with pytest.raises(ValueError):
        detssl.entropy_loss([0.9, 0.9])


def test_mixture_density_matches_change_of_variables():
    mix = detssl.GaussianMixture1D(mu0=-1.0, mu1=1.0, sigma=1.0, pi1=0.5)
    assert detssl.theta_of_x(0.0, mix) == pytest.approx(0.5)
    assert detssl.x_of_theta(0.5, mix) == pytest.approx(0.0, abs=1e-12)
    assert detssl.p_theta_density(0.5, mix) == pytest.approx(0.48394, abs=1e-5)
    joint = detssl.p_theta_joint(0.3, 0, mix) + detssl.p_theta_joint(0.3, 1, mix)
    assert joint == pytest.approx(detssl.p_theta_density(0.3, mix), rel=1e-12)
    assert detssl.theta_density_mass(mix, 0.0, 1.0) == pytest.approx(1.0, abs=1e-3)


def test_sampling_is_seed_deterministic():
    mix = detssl.GaussianMixture1D()
    a = detssl.sample_mixture(mix, 100, seed=5)
    b = detssl.sample_mixture(mix, 100, seed=5)
    assert a == b
    assert len(a) == 100


def test_rule_compilation():
    out = detssl.compile_rules("attrs: legs, fins\nlegs -> !fins\n")
    assert out["attributes"] == ["legs", "fins"]
    assert set(out["valid"]) == {"00", "10", "01"}

    value, grad = detssl.rule_logloss_grad(
        "attrs: a, b\nexactly_one(a, b)\n", [0.9, 0.1], g="identity"
    )
    expected = math.log(0.9 * 0.9 + 0.1 * 0.1)
    assert value == pytest.approx(expected, rel=1e-9)
    assert len(grad) == 2


def test_dataset_generation_is_deterministic():
    a = detssl.gen_blobs(num_classes=3, n_labelled_per_class=2, n_unlabelled=10,
                         n_test=10, seed=3)
    b = detssl.gen_blobs(num_classes=3, n_labelled_per_class=2, n_unlabelled=10,
                         n_test=10, seed=3)
    assert a["labelled_x"] == b["labelled_x"]
    assert len(a["labelled_y"]) == 6
    assert a["label_kind"] == "class"


def test_tiny_experiment_runs_end_to_end():
    config = """
    {
      "name": "smoke",
      "dataset": {"type": "blobs", "num_classes": 3, "separation": 4.0,
                  "n_labelled_per_class": 4, "n_unlabelled": 40, "n_test": 40},
      "model": {"hidden": [16], "head": "softmax"},
      "train": {"lambda_u": 1.0, "epochs": 4, "learning_rate": 0.05},
      "relaxation": {"kind": "dp", "T": 10.0},
      "seeds": [1, 2]
    }
    """
    report = detssl.run_experiment(config)
    assert len(report["per_seed"]) == 2
    assert 0.0 <= report["mean_test_accuracy"] <= 1.0
    rerun = detssl.run_experiment(config)
    assert rerun["per_seed"] == report["per_seed"]

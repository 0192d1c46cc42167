"""Discriminative semi-supervised learning toolkit.

Thin python surface over the C++ core: Table-1 relaxation losses, the 1-D
two-Gaussian theta-density machinery, propositional rule compilation, seeded
synthetic datasets and the experiment runner.
"""

from detssl._core import (
    GaussianMixture1D,
    compile_rules,
    dp_loss,
    entropy_loss,
    exclusivity_loss,
    gen_blobs,
    gen_two_moons,
    gradcheck_report,
    p_theta_density,
    p_theta_joint,
    p_x_density,
    pseudo_label_loss,
    rule_logloss_grad,
    run_experiment,
    sample_mixture,
    theta_density_mass,
    theta_of_x,
    unsup_loss_grad,
    x_of_theta,
)

__all__ = [
    "GaussianMixture1D",
    "compile_rules",
    "dp_loss",
    "entropy_loss",
    "exclusivity_loss",
    "gen_blobs",
    "gen_two_moons",
    "gradcheck_report",
    "p_theta_density",
    "p_theta_joint",
    "p_x_density",
    "pseudo_label_loss",
    "rule_logloss_grad",
    "run_experiment",
    "sample_mixture",
    "theta_density_mass",
    "theta_of_x",
    "unsup_loss_grad",
    "x_of_theta",
]

__version__ = "0.1.0"

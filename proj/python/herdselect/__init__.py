"""Gene selection with a binary horse herd search over MRMR-filtered genes."""

import json

from ._core import (
    Dataset,
    HerdselectError,
    __version__,
    entropy,
    fitness_value,
    friedman,
    load_csv,
    make_synthetic,
    mrmr_rank,
    mutual_information,
    optimize,
    posthoc_vs_control,
    run_cli,
    select_json,
    tf_value,
    x_shaped_pair,
)


def select(dataset, **options):
    """Runs the full selection pipeline and returns the result as a dict.

    Keyword options mirror the command-line flags: tf, horses, iters, top_m,
    folds, repeats, alpha, classifier, knn_k, svm_c, seed, threads.
    """
    return json.loads(select_json(dataset, **options))


__all__ = [
    "Dataset",
    "HerdselectError",
    "__version__",
    "entropy",
    "fitness_value",
    "friedman",
    "load_csv",
    "make_synthetic",
    "mrmr_rank",
    "mutual_information",
    "optimize",
    "posthoc_vs_control",
    "run_cli",
    "select",
    "select_json",
    "tf_value",
    "x_shaped_pair",
]

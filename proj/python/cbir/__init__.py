"""Multi-descriptor content-based image retrieval (C++ core)."""

from ._core import (
    CDH_DIMS,
    CLD_DIMS,
    EOH_DIMS,
    LBP_DIMS,
    CbirError,
    Database,
    PRCurve,
    SplitAssignment,
    compute_all,
    compute_cdh,
    compute_cld,
    compute_eoh,
    compute_lbp,
    distance,
    generate_synthetic,
    make_split,
    mean_difference_step,
    normalize_distances,
    pr_curve,
    raw_pr_auc,
    relevant_ratio_update,
    resize_bilinear,
    run_cli,
    write_synthetic_corpus,
)

__all__ = [name for name in dir() if not name.startswith("_")]

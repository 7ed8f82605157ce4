"""Dataset certification gate: Python bindings for the core operations."""

from ._core import (
    audit_sample_plan,
    check,
    cohen_kappa,
    longest_run_p_value,
    near_duplicate_pairs,
    required_test_size,
    sha256_digest,
    test_bound,
    tv_distance,
)

__version__ = "1.0.0"

__all__ = [
    "audit_sample_plan",
    "check",
    "cohen_kappa",
    "longest_run_p_value",
    "near_duplicate_pairs",
    "required_test_size",
    "sha256_digest",
    "test_bound",
    "tv_distance",
]

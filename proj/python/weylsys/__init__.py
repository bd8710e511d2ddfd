"""Exact counting, Weyl sums and pencil invariants for systems of integral forms."""

from ._core import (
    FeasibilityError,
    Form,
    FormSystem,
    __version__,
    count_zeros,
    count_zeros_mod,
    dichotomy,
    discriminant,
    pencil_rank,
    run_cli,
    singular_series,
    weyl_sum,
)

__all__ = [
    "FeasibilityError",
    "Form",
    "FormSystem",
    "count_zeros",
    "count_zeros_mod",
    "dichotomy",
    "discriminant",
    "pencil_rank",
    "run_cli",
    "singular_series",
    "weyl_sum",
]

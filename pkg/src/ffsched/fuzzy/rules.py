"""Linguistic rules mapping utilization error terms to a period rescaling."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class RuleBase:
    """Complete rule matrix: one output label per (error, delta-error) pair."""

    error_labels: tuple[str, ...]
    delta_labels: tuple[str, ...]
    output_labels: tuple[str, ...]
    matrix: tuple[tuple[str, ...], ...]  # matrix[error][delta] -> output label

    def __post_init__(self):
        if len(self.matrix) != len(self.error_labels):
            raise ValueError("one matrix row per error label required")
        for row in self.matrix:
            if len(row) != len(self.delta_labels):
                raise ValueError("one matrix column per delta label required")
            for label in row:
                if label not in self.output_labels:
                    raise ValueError(f"unknown output label {label!r}")

    def consequent_index(self, error_index: int, delta_index: int) -> int:
        return self.output_labels.index(self.matrix[error_index][delta_index])


_INPUT = ("NB", "NS", "ZE", "PS", "PB")
_OUTPUT = ("NB", "NM", "NS", "ZE", "PS", "PM", "PB")

# Negative error means the CPU runs above target, so periods must grow fast;
# positive error (spare capacity) shrinks them cautiously.
DEFAULT_RULES = RuleBase(
    error_labels=_INPUT,
    delta_labels=_INPUT,
    output_labels=_OUTPUT,
    matrix=(
        ("PB", "PB", "PB", "PB", "PM"),
        ("PB", "PB", "PM", "PS", "ZE"),
        ("PM", "PS", "ZE", "ZE", "NS"),
        ("PS", "ZE", "ZE", "NS", "NM"),
        ("ZE", "NS", "NM", "NB", "NB"),
    ),
)

"""Max-min rule evaluation and centre-of-gravity defuzzification."""

from __future__ import annotations

from ..errors import DegenerateSetError
from .membership import MembershipFamily
from .rules import RuleBase


def infer(
    mu_error: tuple[float, ...],
    mu_delta: tuple[float, ...],
    rules: RuleBase,
    out_family: MembershipFamily,
) -> tuple[float, ...]:
    """Aggregate the rule consequents into one output fuzzy set.

    Each rule fires at the minimum of its antecedent memberships, clips its
    consequent shape at that strength, and the clipped shapes combine by
    pointwise maximum over the output level grid.
    """
    if not any(m > 0 for m in mu_error) or not any(m > 0 for m in mu_delta):
        raise DegenerateSetError("membership vector has no support")
    levels = out_family.universe.levels
    agg = [0.0] * len(levels)
    for i, wi in enumerate(mu_error):
        if wi <= 0.0:
            continue
        for j, wj in enumerate(mu_delta):
            if wj <= 0.0:
                continue
            strength = min(wi, wj)  # AND = min
            k = rules.consequent_index(i, j)
            for n, level in enumerate(levels):
                clipped = min(strength, out_family.membership(k, level))
                if clipped > agg[n]:
                    agg[n] = clipped
    return tuple(agg)


def defuzzify_centroid(aggregate: tuple[float, ...], out_family: MembershipFamily) -> float:
    """Centre of gravity of the aggregate over the output levels."""
    total = sum(aggregate)
    if total <= 0.0:
        raise DegenerateSetError("aggregate has zero mass")
    weighted = sum(level * m for level, m in zip(out_family.universe.levels, aggregate))
    return weighted / total

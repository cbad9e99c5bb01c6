"""Canonical end-to-end flows tying codes, layouts, gates and schedules together.

``canonical_layout`` evaluates a code's published seed and, for the
[[144,12,12]] code, refines the ancilla matching so the edge-distance
distribution equals the published one (the matching at the optimal D_max is
not unique; the refinement reconstructs the reference assignment).
``canonical_schedule`` then applies the reference scheduling policy: the
long-range 90s classes run strictly serially and the remaining classes are
grouped greedily under the crosstalk constraint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .bbcode import BBCodeSpec, tanner_graph
from .layout import (
    LayoutResult,
    TABLE_SEEDS,
    evaluate_seed,
    match_reference_distribution,
    seed_from_strings,
)
from .scheduler import (
    GATE_CLASS_TABLE,
    SERIAL_CLASS_IDS,
    Schedule,
    TimingModel,
    assign_gate_classes,
    build_gate_list,
    cycle_time,
    greedy_schedule,
    reference_distribution,
)
from .layout import distance_histogram

__all__ = [
    "canonical_seed",
    "canonical_layout",
    "canonical_schedule",
    "CanonicalRun",
]

_REFERENCE_CODE = "[[144,12,12]]"


def canonical_seed(spec: BBCodeSpec):
    """The published optimal seed for a built-in code."""
    try:
        strings = TABLE_SEEDS[spec.name]
    except KeyError:
        raise KeyError(f"no published seed for code {spec.name or spec.describe()!r}") from None
    return seed_from_strings(strings, spec)


def canonical_layout(spec: BBCodeSpec, *, refine: bool = True) -> LayoutResult:
    """Published-seed layout at the optimal D_max.

    For the [[144,12,12]] code (and ``refine=True``) the ancilla assignment
    is the reconstruction matching the published distance distribution;
    other codes keep the plain matching witness.
    """
    seed = canonical_seed(spec)
    result = evaluate_seed(seed, spec)
    if refine and spec.name == _REFERENCE_CODE:
        tanner = tanner_graph(spec)
        data_only = result.placement
        from dataclasses import replace

        refined = match_reference_distribution(
            seed,
            spec,
            replace(data_only, pos_x=None, pos_z=None),
            tanner,
            reference_distribution(),
        )
        if refined is None:
            raise RuntimeError(
                "published distance distribution is unreachable on this layout"
            )
        result = LayoutResult(seed=seed, placement=refined, d2_max=result.d2_max)
    return result


@dataclass(frozen=True)
class CanonicalRun:
    """Layout, gate classes and schedule of one canonical pipeline run."""

    layout: LayoutResult
    schedule: Schedule

    @property
    def classes(self):
        return self.schedule.classes


def canonical_schedule(
    spec: BBCodeSpec,
    *,
    rng_seed: int = 0,
    restarts: int = 50,
    layout: LayoutResult | None = None,
    serial_class_ids: tuple[int, ...] | None = None,
) -> CanonicalRun:
    """Canonical layout plus the reference CZ schedule for a code.

    ``serial_class_ids`` of None applies the reference policy (serialize the
    90s classes) for the [[144,12,12]] code and plain greedy otherwise.
    """
    tanner = tanner_graph(spec)
    if layout is None:
        layout = canonical_layout(spec)
    if serial_class_ids is None:
        serial_class_ids = SERIAL_CLASS_IDS if spec.name == _REFERENCE_CODE else ()
    hist = distance_histogram(layout.placement, tanner)
    classes = assign_gate_classes(hist)
    gates = build_gate_list(layout.placement, tanner, classes)
    schedule = greedy_schedule(
        gates,
        classes,
        rng_seed=rng_seed,
        restarts=restarts,
        serial_class_ids=serial_class_ids,
    )
    return CanonicalRun(layout=layout, schedule=schedule)

"""Blockade-aware CZ scheduling and the QEC cycle-time cost model.

Every Tanner edge is one CZ gate.  Gates are grouped into slots under three
rules: only gates of the same distance class run together, the X-check
subcircuit strictly precedes the Z-check subcircuit, and within a slot every
atom i must keep its blockade-crosstalk metric

    x_i = sum over atoms j in other pairs of V(R_ij)/2pi [MHz] * t_gate [us]

strictly below the threshold (0.01 by default).  Interactions between
concurrently driven pairs follow the 1/R^6 tail anchored at each class's
tabulated strength.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bbcode import TannerGraph
from .constants import (
    CROSSTALK_THRESHOLD,
    LATTICE_SPACING_UM,
    LEVEL_LIFETIMES_US,
    LOCAL_GATE_FIXED_US,
    LOCAL_SWITCH_UNITS,
)
from .layout import DistanceHistogram, Placement

__all__ = [
    "GateClass",
    "GateOp",
    "ScheduledSlot",
    "Schedule",
    "TimingModel",
    "CycleBreakdown",
    "GATE_CLASS_TABLE",
    "SERIAL_CLASS_IDS",
    "reference_distribution",
    "assign_gate_classes",
    "cross_pair_interaction",
    "crosstalk_metric",
    "compatible",
    "build_gate_list",
    "greedy_schedule",
    "certify_schedule",
    "cycle_time",
    "cycle_time_upper_bound",
    "sweep_cycle_time",
]


@dataclass(frozen=True)
class GateClass:
    """One (distance, Rydberg level, pulse) combination covering some CZs."""

    class_id: int
    d2: int
    level: str
    interaction_mhz: float
    t_gate_ns: float
    count: int
    lifetime_us: float
    extrapolated: bool = False

    @property
    def distance(self) -> float:
        return round(math.sqrt(self.d2), 6)

    @property
    def separation_um(self) -> float:
        return LATTICE_SPACING_UM * math.sqrt(self.d2)


def _published(class_id, d2, level, v, t_gate, count) -> GateClass:
    return GateClass(
        class_id=class_id,
        d2=d2,
        level=level,
        interaction_mhz=v,
        t_gate_ns=t_gate,
        count=count,
        lifetime_us=LEVEL_LIFETIMES_US[level],
    )


# The 17 published distance classes of the [[144,12,12]] layout, with the
# interaction strength quoted at R = 1.7*D um and the per-class gate time.
GATE_CLASS_TABLE: tuple[GateClass, ...] = (
    _published(1, 1, "50s1/2", 415.0, 130, 80),
    _published(2, 2, "50s1/2", 58.5, 180, 4),
    _published(3, 4, "83s1/2", 1160.0, 150, 88),
    _published(4, 5, "83s1/2", 780.0, 150, 16),
    _published(5, 10, "83s1/2", 170.0, 180, 12),
    _published(6, 13, "83s1/2", 85.0, 180, 12),
    _published(7, 17, "83s1/2", 40.0, 180, 56),
    _published(8, 20, "83s1/2", 25.0, 200, 112),
    _published(9, 25, "83s1/2", 13.0, 270, 24),
    _published(10, 26, "83s1/2", 11.5, 270, 4),
    _published(11, 34, "83s1/2", 5.2, 270, 8),
    _published(12, 36, "90s1/2", 11.2, 350, 112),
    _published(13, 37, "90s1/2", 10.1, 355, 48),
    _published(14, 41, "90s1/2", 7.7, 430, 16),
    _published(15, 45, "90s1/2", 5.8, 440, 52),
    _published(16, 50, "90s1/2", 4.25, 480, 4),
    _published(17, 52, "90s1/2", 3.8, 480, 216),
)

# Classes the reference schedule runs strictly one gate at a time (the long
# range 90s rows, whose same-class gates interfere across the whole grid).
SERIAL_CLASS_IDS: tuple[int, ...] = (12, 13, 14, 15, 16, 17)


def reference_distribution() -> list[tuple[int, int]]:
    """(d2, count) pairs of the published distance distribution."""
    return [(gc.d2, gc.count) for gc in GATE_CLASS_TABLE]


def _nearest_level(distance: float) -> str:
    if distance <= 1.5:
        return "50s1/2"
    if distance <= 5.9:
        return "83s1/2"
    return "90s1/2"


def assign_gate_classes(histogram: DistanceHistogram) -> tuple[GateClass, ...]:
    """Map each histogram distance onto a gate class.

    Distances matching a published class take that class's strength, timing
    and id, with the count coming from the histogram.  Unknown distances get
    a synthesized class: level by distance, strength extrapolated by the
    1/R^6 law from the nearest same-level anchor, flagged ``extrapolated``.
    """
    by_d2 = {gc.d2: gc for gc in GATE_CLASS_TABLE}
    classes = []
    next_id = len(GATE_CLASS_TABLE) + 1
    for d2, distance, count in histogram.entries:
        known = by_d2.get(d2)
        if known is not None:
            classes.append(
                GateClass(
                    class_id=known.class_id,
                    d2=d2,
                    level=known.level,
                    interaction_mhz=known.interaction_mhz,
                    t_gate_ns=known.t_gate_ns,
                    count=count,
                    lifetime_us=known.lifetime_us,
                )
            )
            continue
        level = _nearest_level(distance)
        anchors = [gc for gc in GATE_CLASS_TABLE if gc.level == level]
        anchor = min(anchors, key=lambda gc: abs(gc.distance - distance))
        scaled = anchor.interaction_mhz * (anchor.d2 / d2) ** 3
        classes.append(
            GateClass(
                class_id=next_id,
                d2=d2,
                level=level,
                interaction_mhz=scaled,
                t_gate_ns=anchor.t_gate_ns,
                count=count,
                lifetime_us=LEVEL_LIFETIMES_US[level],
                extrapolated=True,
            )
        )
        next_id += 1
    return tuple(sorted(classes, key=lambda gc: gc.d2))


@dataclass(frozen=True)
class GateOp:
    """One CZ between a check atom and a data atom, with grid coordinates."""

    check_id: int
    data_id: int
    class_id: int
    subcircuit: str
    check_pos: tuple[int, int]
    data_pos: tuple[int, int]

    @property
    def atoms(self) -> tuple[tuple[int, int], tuple[int, int]]:
        return (self.check_pos, self.data_pos)


def build_gate_list(
    placement: Placement, tanner: TannerGraph, classes: tuple[GateClass, ...]
) -> tuple[GateOp, ...]:
    """All 6n CZ gates of a complete placement, tagged with class and subcircuit."""
    if not placement.complete:
        raise ValueError("placement is incomplete")
    by_d2 = {gc.d2: gc.class_id for gc in classes}
    data_pos = np.vstack([placement.pos_l, placement.pos_r])
    check_pos = np.vstack([placement.pos_x, placement.pos_z])
    half = tanner.half
    gates = []
    for cid in range(tanner.n_checks):
        cpos = check_pos[cid]
        sub = "X" if cid < half else "Z"
        for did in tanner.check_neighbors[cid]:
            dpos = data_pos[did]
            d2 = int(((cpos - dpos) ** 2).sum())
            gates.append(
                GateOp(
                    check_id=cid,
                    data_id=int(did),
                    class_id=by_d2[d2],
                    subcircuit=sub,
                    check_pos=(int(cpos[0]), int(cpos[1])),
                    data_pos=(int(dpos[0]), int(dpos[1])),
                )
            )
    return tuple(gates)


def cross_pair_interaction(
    atom_a: tuple[float, float], atom_b: tuple[float, float], gate_class: GateClass
) -> float:
    """Interaction strength V/2pi in MHz between atoms of different CZ pairs.

    The 1/R^6 tail anchored at the class's tabulated strength; the lattice
    spacing cancels in the ratio, so lattice coordinates are used directly.
    """
    d2 = (atom_a[0] - atom_b[0]) ** 2 + (atom_a[1] - atom_b[1]) ** 2
    if d2 == 0:
        raise ValueError("coincident atoms have no defined pair interaction")
    return gate_class.interaction_mhz * (gate_class.d2 / d2) ** 3


def crosstalk_metric(
    atom: tuple[float, float],
    other_gates: list[GateOp] | tuple[GateOp, ...],
    gate_class: GateClass,
) -> float:
    """x_i for one atom: summed spurious strengths (MHz) times t_gate (us)."""
    total = 0.0
    for gate in other_gates:
        for other in gate.atoms:
            total += cross_pair_interaction(atom, other, gate_class)
    return total * gate_class.t_gate_ns * 1e-3


def compatible(
    gate_a: GateOp,
    gate_b: GateOp,
    gate_class: GateClass,
    threshold: float = CROSSTALK_THRESHOLD,
) -> bool:
    """True iff the two gates may share a slot: distinct atoms, all x_i < threshold."""
    if set(gate_a.atoms) & set(gate_b.atoms):
        return False
    for atom in gate_a.atoms:
        if crosstalk_metric(atom, [gate_b], gate_class) >= threshold:
            return False
    for atom in gate_b.atoms:
        if crosstalk_metric(atom, [gate_a], gate_class) >= threshold:
            return False
    return True


@dataclass(frozen=True)
class ScheduledSlot:
    """One beam configuration: same-class same-subcircuit gates run at once."""

    subcircuit: str
    class_id: int
    gates: tuple[GateOp, ...]
    illumination_ns: float


@dataclass(frozen=True)
class Schedule:
    """Ordered slots covering every CZ exactly once."""

    slots: tuple[ScheduledSlot, ...]
    classes: tuple[GateClass, ...]
    rng_seed: int
    restarts: int
    threshold: float
    serial_class_ids: tuple[int, ...]

    @property
    def n_slots(self) -> int:
        return len(self.slots)

    @property
    def n_gates(self) -> int:
        return sum(len(s.gates) for s in self.slots)

    @property
    def illumination_us(self) -> float:
        return sum(s.illumination_ns for s in self.slots) * 1e-3

    def slots_for_classes(self, class_ids) -> int:
        wanted = set(class_ids)
        return sum(1 for s in self.slots if s.class_id in wanted)

    def summary(self) -> dict:
        per_class: dict[int, int] = {}
        for s in self.slots:
            per_class[s.class_id] = per_class.get(s.class_id, 0) + 1
        return {
            "n_slots": self.n_slots,
            "n_gates": self.n_gates,
            "illumination_us": round(self.illumination_us, 3),
            "slots_per_class": {str(k): v for k, v in sorted(per_class.items())},
            "rng_seed": self.rng_seed,
            "restarts": self.restarts,
        }


def _bucket_crosstalk(
    gates: list[GateOp], gate_class: GateClass
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized crosstalk tensor and pairwise compatibility for one bucket.

    Returns (contrib, pair_ok): contrib[g, i, h] is the x-metric on atom i
    of gate g contributed by gate h; pair_ok[g, h] is the two-gate test.
    """
    g_count = len(gates)
    atoms = np.array([[g.check_pos, g.data_pos] for g in gates], dtype=np.float64)
    flat = atoms.reshape(g_count * 2, 2)
    diff = flat[:, None, :] - flat[None, :, :]
    d2 = (diff**2).sum(axis=2)
    with np.errstate(divide="ignore"):
        strengths = gate_class.interaction_mhz * (gate_class.d2 / d2) ** 3
    strengths[d2 == 0] = np.inf
    strengths = strengths.reshape(g_count, 2, g_count, 2)
    contrib = strengths.sum(axis=3) * gate_class.t_gate_ns * 1e-3
    for g in range(g_count):
        contrib[g, :, g] = 0.0

    shared = np.zeros((g_count, g_count), dtype=bool)
    atom_sets = [set(g.atoms) for g in gates]
    for a in range(g_count):
        for b in range(a + 1, g_count):
            if atom_sets[a] & atom_sets[b]:
                shared[a, b] = shared[b, a] = True
    return contrib, shared


def _greedy_groups(
    gates: list[GateOp],
    gate_class: GateClass,
    threshold: float,
    rng: np.random.Generator,
    group_attempts: int = 4,
) -> list[list[int]]:
    """Cover a bucket with mutually compatible groups.

    Each round builds a few candidate groups by greedy accumulation over
    differently ordered gates, keeps the largest (ties broken in favor of
    leaving the most compatible pairs available), removes it, and repeats.
    The cumulative x_i of every atom in a group stays below the threshold,
    which implies all pairwise tests as well.
    """
    g_count = len(gates)
    contrib, shared = _bucket_crosstalk(gates, gate_class)
    pair_ok = (
        (contrib < threshold).all(axis=1)
        & (contrib.transpose(2, 1, 0) < threshold).all(axis=1)
        & ~shared
    )
    np.fill_diagonal(pair_ok, False)

    remaining = list(range(g_count))
    groups: list[list[int]] = []
    while remaining:
        degrees = pair_ok[np.ix_(remaining, remaining)].sum(axis=1)
        base = [g for _, g in sorted(zip(degrees, remaining))]
        candidates: list[list[int]] = []
        orders = [base]
        for _ in range(max(0, group_attempts - 1)):
            perm = list(base)
            rng.shuffle(perm)
            orders.append(perm)
        for order_ in orders:
            group: list[int] = []
            totals = np.zeros((g_count, 2))
            for g in order_:
                if group and not pair_ok[g, group].all():
                    continue
                add_g = contrib[g][:, group].sum(axis=1) if group else np.zeros(2)
                if (add_g >= threshold).any():
                    continue
                if group and (
                    (totals[group] + contrib[group, :, g] >= threshold).any()
                ):
                    continue
                for h in group:
                    totals[h] += contrib[h, :, g]
                totals[g] = add_g
                group.append(g)
            candidates.append(sorted(group))
        best_size = max(len(c) for c in candidates)
        finalists = [c for c in candidates if len(c) == best_size]
        if len(finalists) > 1:
            def remaining_pairs(group):
                rest = [g for g in remaining if g not in group]
                if not rest:
                    return 0
                return int(pair_ok[np.ix_(rest, rest)].sum())
            finalists.sort(key=lambda c: (-remaining_pairs(c), c))
        chosen = finalists[0]
        groups.append(chosen)
        remaining = [g for g in remaining if g not in chosen]
    return groups


@dataclass(frozen=True)
class TimingModel:
    """Per-round cost model: beam switching, reset, measurement, local layers."""

    t_switch_us: float = 1.5
    t_op_us: float = 0.0
    t_meas_us: float = 0.0
    local_gate_fixed_us: float = LOCAL_GATE_FIXED_US
    local_switch_units: int = LOCAL_SWITCH_UNITS
    crosstalk_threshold: float = CROSSTALK_THRESHOLD

    def __post_init__(self) -> None:
        if min(self.t_switch_us, self.t_op_us, self.t_meas_us) < 0:
            raise ValueError("timing entries must be non-negative")


def greedy_schedule(
    gates: tuple[GateOp, ...],
    classes: tuple[GateClass, ...],
    *,
    rng_seed: int = 0,
    restarts: int = 50,
    threshold: float = CROSSTALK_THRESHOLD,
    serial_class_ids: tuple[int, ...] = (),
) -> Schedule:
    """Slot assignment covering every CZ once; X slots precede Z slots.

    Within each (class, subcircuit) bucket a randomized greedy grouping runs
    ``restarts`` times and the fewest-slot outcome is kept; buckets whose
    class is listed in ``serial_class_ids`` are emitted one gate per slot
    (the reference schedule serializes the long-range 90s classes).
    Deterministic for a fixed ``rng_seed``.
    """
    slots: list[ScheduledSlot] = []
    for sub in ("X", "Z"):
        for gc in sorted(classes, key=lambda c: c.class_id):
            bucket = [g for g in gates if g.subcircuit == sub and g.class_id == gc.class_id]
            if not bucket:
                continue
            bucket.sort(key=lambda g: (g.check_id, g.data_id))
            if gc.class_id in serial_class_ids:
                groups = [[i] for i in range(len(bucket))]
            else:
                best_groups: list[list[int]] | None = None
                for r in range(max(1, restarts)):
                    rng = np.random.default_rng(
                        (rng_seed * 1_000_003 + r) * 131 + gc.class_id * 7 + (sub == "Z")
                    )
                    groups_r = _greedy_groups(bucket, gc, threshold, rng)
                    if best_groups is None or len(groups_r) < len(best_groups):
                        best_groups = groups_r
                groups = best_groups or []
            for group in groups:
                slots.append(
                    ScheduledSlot(
                        subcircuit=sub,
                        class_id=gc.class_id,
                        gates=tuple(bucket[i] for i in group),
                        illumination_ns=gc.t_gate_ns,
                    )
                )
    return Schedule(
        slots=tuple(slots),
        classes=classes,
        rng_seed=rng_seed,
        restarts=restarts,
        threshold=threshold,
        serial_class_ids=tuple(serial_class_ids),
    )


def certify_schedule(schedule: Schedule, gates: tuple[GateOp, ...]) -> float:
    """Validate coverage, atom-disjointness and crosstalk; returns max x_i.

    Raises ValueError on any violation.
    """
    seen = {}
    for slot in schedule.slots:
        atoms_in_slot = set()
        for gate in slot.gates:
            key = (gate.check_id, gate.data_id)
            if key in seen:
                raise ValueError(f"gate {key} scheduled twice")
            seen[key] = slot
            for atom in gate.atoms:
                if atom in atoms_in_slot:
                    raise ValueError(f"atom {atom} appears twice in one slot")
                atoms_in_slot.add(atom)
            if gate.subcircuit != slot.subcircuit or gate.class_id != slot.class_id:
                raise ValueError("gate does not match its slot's class/subcircuit")
    expected = {(g.check_id, g.data_id) for g in gates}
    if set(seen) != expected:
        raise ValueError("schedule does not cover every Tanner edge exactly once")
    x_pos = [i for i, s in enumerate(schedule.slots) if s.subcircuit == "X"]
    z_pos = [i for i, s in enumerate(schedule.slots) if s.subcircuit == "Z"]
    if x_pos and z_pos and max(x_pos) > min(z_pos):
        raise ValueError("X-subcircuit slots must precede Z-subcircuit slots")

    by_class = {gc.class_id: gc for gc in schedule.classes}
    worst = 0.0
    for slot in schedule.slots:
        gc = by_class[slot.class_id]
        for gate in slot.gates:
            others = [g for g in slot.gates if g is not gate]
            if not others:
                continue
            for atom in gate.atoms:
                x = crosstalk_metric(atom, others, gc)
                worst = max(worst, x)
                if x >= schedule.threshold:
                    raise ValueError(
                        f"crosstalk x_i={x:.4f} >= {schedule.threshold} in a slot"
                    )
    return worst


@dataclass(frozen=True)
class CycleBreakdown:
    """Cycle-time components in microseconds."""

    illumination_us: float
    local_fixed_us: float
    switch_units: int
    switching_us: float
    t_op_us: float
    t_meas_us: float

    @property
    def total_us(self) -> float:
        return (
            self.illumination_us
            + self.local_fixed_us
            + self.switching_us
            + self.t_op_us
            + self.t_meas_us
        )

    @property
    def total_ms(self) -> float:
        return self.total_us * 1e-3


def cycle_time(schedule: Schedule, timing: TimingModel) -> CycleBreakdown:
    """Full-round cost: CZ illumination + local layers + switching + reset/readout."""
    units = schedule.n_slots + timing.local_switch_units
    return CycleBreakdown(
        illumination_us=schedule.illumination_us,
        local_fixed_us=timing.local_gate_fixed_us,
        switch_units=units,
        switching_us=units * timing.t_switch_us,
        t_op_us=timing.t_op_us,
        t_meas_us=timing.t_meas_us,
    )


def cycle_time_upper_bound(n_block: int, t_max_us: float, timing: TimingModel) -> float:
    """No-parallelism bound: 6N(t_max + t_switch) + 4 t_switch + 3.5 us."""
    return (
        6 * n_block * (t_max_us + timing.t_switch_us)
        + timing.local_switch_units * timing.t_switch_us
        + timing.local_gate_fixed_us
    )


def sweep_cycle_time(
    schedule: Schedule,
    t_switch_values_us,
    op_meas_pairs_us,
) -> list[dict[str, float]]:
    """Cycle-time curves vs switching time for several (t_op, t_meas) settings.

    Each curve is affine in t_switch with slope n_slots + local switch units.
    """
    rows = []
    for t_op, t_meas in op_meas_pairs_us:
        for t_switch in t_switch_values_us:
            timing = TimingModel(t_switch_us=float(t_switch), t_op_us=float(t_op), t_meas_us=float(t_meas))
            total = cycle_time(schedule, timing).total_us
            rows.append(
                {
                    "t_switch_us": float(t_switch),
                    "t_op_us": float(t_op),
                    "t_meas_us": float(t_meas),
                    "total_us": round(total, 6),
                    "total_ms": round(total * 1e-3, 6),
                }
            )
    return rows

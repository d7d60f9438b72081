"""Turning bin masses into concrete VGG-style architectures.

A network template fixes the functional sequence (conv/pool/fc slots, input
geometry, class count); an allocation maps a feature budget onto the slots
proportionally to their bin masses.  Realization propagates tensor shapes
through the slots and accounts parameters and FLOPs, producing a hashable,
fully determined architecture description.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass

from .skewnorm import BinMasses, SkewNormalParams

CONV = "conv3x3"
FULLY_CONNECTED = "fully_connected"

#: Slot widths of the 16-slot reference configuration (13 conv + 3 fc).  The
#: feature budget of a template is the sum of its reference widths; the final
#: class projection is appended at realization and carries no budget share.
REFERENCE_WIDTHS = {
    "vgg16": (64, 64, 128, 128, 256, 256, 256, 512, 512, 512, 512, 512, 512,
              4096, 4096, 4096),
    "vgg10": (64, 64, 128, 128, 256, 256, 512, 512, 4096, 4096),
}


@dataclass(frozen=True)
class LayerSlot:
    """One slot of a template: a 3x3 convolution or a fully connected layer."""

    kind: str
    pool_after: bool = False

    def __post_init__(self) -> None:
        if self.kind not in (CONV, FULLY_CONNECTED):
            raise ValueError(f"unknown slot kind {self.kind!r}")
        if self.kind == FULLY_CONNECTED and self.pool_after:
            raise ValueError("fully connected slots cannot be followed by pooling")


@dataclass(frozen=True)
class NetworkTemplate:
    """Layer-slot skeleton plus input geometry and class count."""

    name: str
    slots: tuple[LayerSlot, ...]
    input_height: int = 32
    input_width: int = 32
    input_channels: int = 3
    class_count: int = 10

    def __post_init__(self) -> None:
        if not self.slots:
            raise ValueError("template needs at least one slot")
        kinds = [slot.kind for slot in self.slots]
        first_fc = kinds.index(FULLY_CONNECTED) if FULLY_CONNECTED in kinds else len(kinds)
        if CONV in kinds[first_fc:]:
            raise ValueError("all convolution slots must precede fully connected slots")
        for field in ("input_height", "input_width", "input_channels", "class_count"):
            if getattr(self, field) < 1:
                raise ValueError(f"{field} must be positive")
        pools = sum(slot.pool_after for slot in self.slots)
        if pools > math.log2(min(self.input_height, self.input_width)):
            raise ValueError(
                f"{pools} pooling steps would collapse a "
                f"{self.input_height}x{self.input_width} input to zero size"
            )

    @property
    def slot_count(self) -> int:
        return len(self.slots)


def _template(name: str, conv_count: int, pool_slots: set[int], fc_count: int) -> NetworkTemplate:
    slots = [LayerSlot(CONV, pool_after=i in pool_slots) for i in range(1, conv_count + 1)]
    slots += [LayerSlot(FULLY_CONNECTED)] * fc_count
    return NetworkTemplate(name=name, slots=tuple(slots))


def default_vgg16_template() -> NetworkTemplate:
    """16-slot template: 13 conv slots with pooling after 2, 4, 7, 10, 13,
    then 3 fully connected slots, for a 32x32x3 input and 10 classes."""
    return _template("vgg16", 13, {2, 4, 7, 10, 13}, 3)


def default_vgg10_template() -> NetworkTemplate:
    """10-slot variant: 8 conv slots with pooling after 2, 4, 6, 8, then 2
    fully connected slots."""
    return _template("vgg10", 8, {2, 4, 6, 8}, 2)


_TEMPLATE_BUILDERS = {
    "vgg16": default_vgg16_template,
    "vgg10": default_vgg10_template,
}


def get_template(name: str) -> NetworkTemplate:
    try:
        return _TEMPLATE_BUILDERS[name]()
    except KeyError:
        raise ValueError(f"unknown template {name!r}") from None


def template_budget(template: NetworkTemplate) -> int:
    """Feature budget of a template: the sum of its reference slot widths."""
    widths = REFERENCE_WIDTHS.get(template.name)
    if widths is None or len(widths) != template.slot_count:
        raise ValueError(f"no reference widths for template {template.name!r}")
    return sum(widths)


def vgg_budget(template: NetworkTemplate) -> int:
    """Budget of the 16-slot default template (16512 features)."""
    if template != default_vgg16_template():
        raise ValueError("vgg_budget is defined for the 16-slot default template only")
    return template_budget(template)


@dataclass(frozen=True)
class FeatureAllocation:
    """Integer per-slot feature counts drawn from a fixed budget.

    ``captured_mass`` is the probability mass the bins retained; mass lost
    outside the layer range shrinks the realized feature total rather than
    being renormalized away.  ``starved_slots`` counts slots whose share of
    the budget rounded to zero and only reached one feature through the
    one-feature floor.
    """

    counts: tuple[int, ...]
    budget: int
    captured_mass: float
    starved_slots: int = 0

    def __post_init__(self) -> None:
        if not self.counts:
            raise ValueError("allocation needs at least one slot")
        if any(c < 1 for c in self.counts):
            raise ValueError("every slot must hold at least one feature")
        if self.budget < 1:
            raise ValueError("budget must be positive")
        if not 0.0 <= self.captured_mass <= 1.0 + 1e-9:
            raise ValueError(f"captured mass {self.captured_mass} outside [0, 1]")
        # Half a unit of rounding slack per slot, plus up to half a unit more
        # for slots lifted to the one-feature floor.
        if sum(self.counts) > self.budget + len(self.counts):
            raise ValueError(
                f"counts sum to {sum(self.counts)}, beyond budget {self.budget} "
                f"plus rounding slack"
            )

    @property
    def slot_count(self) -> int:
        return len(self.counts)

    def total(self) -> int:
        return sum(self.counts)


def allocate(masses: BinMasses, budget: int) -> FeatureAllocation:
    """Scale bin masses by the budget and round to integer feature counts.

    Rounding is half-away-from-zero, then floored at one feature per slot so
    that no realized layer is empty.  Masses are not renormalized: whatever
    mass the bins lost stays lost from the feature total.
    """
    if budget < masses.layer_count:
        raise ValueError(
            f"budget {budget} cannot give {masses.layer_count} slots one feature each"
        )
    counts = []
    starved = 0
    for mass in masses.masses:
        rounded = math.floor(budget * mass + 0.5)
        if rounded < 1:
            starved += 1
        counts.append(max(1, rounded))
    return FeatureAllocation(
        counts=tuple(counts),
        budget=budget,
        captured_mass=masses.total(),
        starved_slots=starved,
    )


def is_valid(allocation: FeatureAllocation, tolerance: float = 0.05) -> bool:
    """True iff the allocation kept at least ``1 - tolerance`` of the mass.

    The boundary is inclusive: captured mass of exactly 0.95 passes the
    default 5% tolerance.
    """
    if not 0.0 < tolerance < 1.0:
        raise ValueError(f"tolerance must lie in (0, 1), got {tolerance}")
    return allocation.captured_mass >= 1.0 - tolerance


def has_full_coverage(allocation: FeatureAllocation) -> bool:
    """True iff every slot earned its features from the distribution itself,
    with no slot lifted from a zero-rounded share."""
    return allocation.starved_slots == 0


def classify_shape(allocation: FeatureAllocation) -> str:
    """Qualitative profile of the counts: increasing, decreasing, peaked or flat."""
    counts = allocation.counts
    diffs = [b - a for a, b in zip(counts, counts[1:])]
    if all(d == 0 for d in diffs):
        return "flat"
    if all(d >= 0 for d in diffs):
        return "increasing"
    if all(d <= 0 for d in diffs):
        return "decreasing"
    return "peaked"


@dataclass(frozen=True)
class ArchitectureSpec:
    """A realized architecture: shapes, parameter/FLOP counts and identity."""

    params: SkewNormalParams
    allocation: FeatureAllocation
    template_name: str
    layer_shapes: tuple[tuple[int, ...], ...]
    parameter_count: int
    flop_count: int
    arch_id: str

    def __post_init__(self) -> None:
        if self.parameter_count <= 0:
            raise ValueError("parameter count must be positive")
        if len(self.layer_shapes) != self.allocation.slot_count + 1:
            raise ValueError("expected one shape per slot plus the classifier")


def _arch_id(params: SkewNormalParams, template: NetworkTemplate,
             allocation: FeatureAllocation) -> str:
    payload = json.dumps(
        {
            "xi": params.xi,
            "omega": params.omega,
            "alpha": params.alpha,
            "template": template.name,
            "counts": list(allocation.counts),
            "budget": allocation.budget,
        },
        sort_keys=True,
        separators=(",", ":"),
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


def realize(
    template: NetworkTemplate,
    allocation: FeatureAllocation,
    params: SkewNormalParams,
) -> ArchitectureSpec:
    """Instantiate an allocation on a template, propagating shapes layer by
    layer and accounting parameters and FLOPs.

    Convolutions use unit padding (spatial size preserved), pooling halves the
    spatial size, the first fully connected slot flattens its input.  Each
    conv slot carries weights, biases and two batch-norm parameters per
    feature; fully connected slots carry weights and biases.  A fixed
    projection onto the class count is appended after the last slot.  FLOPs
    count one multiply-accumulate as two operations; pooling and activations
    are ignored.
    """
    if allocation.slot_count != template.slot_count:
        raise ValueError(
            f"allocation has {allocation.slot_count} slots, "
            f"template {template.name!r} has {template.slot_count}"
        )

    height, width = template.input_height, template.input_width
    channels = template.input_channels
    flat: int | None = None
    shapes: list[tuple[int, ...]] = []
    parameter_count = 0
    flop_count = 0

    for slot, features in zip(template.slots, allocation.counts):
        if slot.kind == CONV:
            parameter_count += 9 * channels * features + features + 2 * features
            flop_count += 2 * 9 * channels * features * height * width
            channels = features
            if slot.pool_after:
                if height < 2 or width < 2:
                    raise ValueError(
                        f"pooling below 1x1: spatial size {height}x{width} in "
                        f"template {template.name!r}"
                    )
                height //= 2
                width //= 2
            shapes.append((height, width, channels))
        else:
            fan_in = height * width * channels if flat is None else flat
            parameter_count += fan_in * features + features
            flop_count += 2 * fan_in * features
            flat = features
            shapes.append((features,))

    fan_in = height * width * channels if flat is None else flat
    parameter_count += fan_in * template.class_count + template.class_count
    flop_count += 2 * fan_in * template.class_count
    shapes.append((template.class_count,))

    return ArchitectureSpec(
        params=params,
        allocation=allocation,
        template_name=template.name,
        layer_shapes=tuple(shapes),
        parameter_count=parameter_count,
        flop_count=flop_count,
        arch_id=_arch_id(params, template, allocation),
    )

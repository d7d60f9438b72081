"""Enumeration of the discretized (xi, omega, alpha) parameter grid.

Triples iterate in lexicographic order with exact integer-index stepping, so
two runs of the same grid produce byte-identical output.  A triple survives
when its allocation keeps at least 95% of the probability mass and, under the
default feasibility rule, when every layer's budget share rounds to at least
one feature on its own.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from . import archgen, skewnorm
from .archgen import ArchitectureSpec, classify_shape
from .skewnorm import DEFAULT_SUBDIVISIONS, SkewNormalParams

Range = tuple[float, float, float]

#: Bin alignment used by the default grid.  Lower-aligned unit bins (layer i
#: integrates [i-1, i]) combined with the full-coverage rule reproduce the
#: published family size; see docs/grid-sensitivity.md for the counts under
#: the other conventions.
DEFAULT_GRID_ALIGNMENT = "lower"


@dataclass(frozen=True)
class GridSpec:
    """Discretized parameter ranges plus the allocation settings to apply."""

    xi_range: Range
    omega_range: Range
    alpha_range: Range
    budget: int
    tolerance: float = 0.05
    template_name: str = "vgg16"
    subdivisions: int = DEFAULT_SUBDIVISIONS
    alignment: str = DEFAULT_GRID_ALIGNMENT
    require_full_coverage: bool = True

    def __post_init__(self) -> None:
        for name in ("xi_range", "omega_range", "alpha_range"):
            lo, hi, step = getattr(self, name)
            if step <= 0:
                raise ValueError(f"{name} step must be > 0, got {step}")
            if lo > hi:
                raise ValueError(f"{name} has min {lo} above max {hi}")
        if not 0.0 < self.tolerance < 1.0:
            raise ValueError(f"tolerance must lie in (0, 1), got {self.tolerance}")
        if self.budget < 1:
            raise ValueError("budget must be positive")
        if self.alignment not in skewnorm.BIN_ALIGNMENTS:
            raise ValueError(f"unknown bin alignment {self.alignment!r}")


def axis_values(axis: Range) -> list[float]:
    """Inclusive range values computed as min + k*step to avoid float drift."""
    lo, hi, step = axis
    steps = math.floor((hi - lo) / step + 1e-9)
    return [lo + k * step for k in range(steps + 1)]


def default_grid(template_name: str = "vgg16") -> GridSpec:
    """The published grid: xi in [1, 16] step 1, omega in [0.5, 5.5] step 0.5,
    alpha in [-40, 40] step 4, 5% mass tolerance, template-derived budget."""
    template = archgen.get_template(template_name)
    return GridSpec(
        xi_range=(1.0, float(template.slot_count), 1.0),
        omega_range=(0.5, 5.5, 0.5),
        alpha_range=(-40.0, 40.0, 4.0),
        budget=archgen.template_budget(template),
        tolerance=0.05,
        template_name=template_name,
    )


def candidate_count(grid: GridSpec) -> int:
    return (
        len(axis_values(grid.xi_range))
        * len(axis_values(grid.omega_range))
        * len(axis_values(grid.alpha_range))
    )


def enumerate_grid(grid: GridSpec) -> list[ArchitectureSpec]:
    """Realize every triple that passes the validity and feasibility filters.

    Output order is the lexicographic (xi, omega, alpha) iteration order,
    independent of how the evaluation is scheduled.
    """
    template = archgen.get_template(grid.template_name)
    if grid.budget < template.slot_count:
        raise ValueError(
            f"budget {grid.budget} below slot count of template {grid.template_name!r}"
        )
    specs = []
    for xi in axis_values(grid.xi_range):
        for omega in axis_values(grid.omega_range):
            for alpha in axis_values(grid.alpha_range):
                params = SkewNormalParams(xi, omega, alpha)
                masses = skewnorm.bin_masses(
                    params, template.slot_count, grid.subdivisions, grid.alignment
                )
                allocation = archgen.allocate(masses, grid.budget)
                if not archgen.is_valid(allocation, grid.tolerance):
                    continue
                if grid.require_full_coverage and not archgen.has_full_coverage(allocation):
                    continue
                specs.append(archgen.realize(template, allocation, params))
    return specs


def relaxed(grid: GridSpec, tolerance: float) -> GridSpec:
    """Same grid with a different mass tolerance."""
    return replace(grid, tolerance=tolerance)


@dataclass(frozen=True)
class SummaryRow:
    xi: float
    omega: float
    alpha: float
    captured_mass: float
    parameter_count: int
    flop_count: int
    shape_class: str
    arch_id: str
    counts: tuple[int, ...]


@dataclass(frozen=True)
class GridSummary:
    rows: tuple[SummaryRow, ...]

    def shape_tally(self) -> dict[str, int]:
        tally: dict[str, int] = {}
        for row in self.rows:
            tally[row.shape_class] = tally.get(row.shape_class, 0) + 1
        return tally

    def to_csv(self) -> str:
        """Deterministic CSV rendering (floats via repr, LF line endings)."""
        lines = [
            "xi,omega,alpha,captured_mass,parameter_count,flop_count,"
            "shape_class,arch_id,counts"
        ]
        for row in self.rows:
            counts = " ".join(str(c) for c in row.counts)
            lines.append(
                f"{row.xi!r},{row.omega!r},{row.alpha!r},{row.captured_mass!r},"
                f"{row.parameter_count},{row.flop_count},{row.shape_class},"
                f"{row.arch_id},{counts}"
            )
        return "\n".join(lines) + "\n"


def summarize(specs: list[ArchitectureSpec]) -> GridSummary:
    """One row per architecture, sorted by (xi, omega, alpha)."""
    if not specs:
        raise ValueError("nothing to summarize: no architectures given")
    ordered = sorted(specs, key=lambda s: (s.params.xi, s.params.omega, s.params.alpha))
    rows = tuple(
        SummaryRow(
            xi=spec.params.xi,
            omega=spec.params.omega,
            alpha=spec.params.alpha,
            captured_mass=spec.allocation.captured_mass,
            parameter_count=spec.parameter_count,
            flop_count=spec.flop_count,
            shape_class=classify_shape(spec.allocation),
            arch_id=spec.arch_id,
            counts=spec.allocation.counts,
        )
        for spec in ordered
    )
    return GridSummary(rows=rows)

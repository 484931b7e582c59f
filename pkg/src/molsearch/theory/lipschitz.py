"""How fast a function can move across one edit, and what that costs.

`local_lipschitz` measures the largest one-edit jump of any function at a
point; `find_cliffs` enumerates where the ground truth jumps by at least K.
A :class:`SmoothFit` is a predictor together with a certified cap on its
own one-edit movement.  When such a predictor agrees with the truth at a
sharp point, `error_lower_bound_check` confirms the unavoidable
consequence: some neighbor's prediction is off by at least the gap between
the truth's jump and the predictor's cap.
"""
from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass
from typing import Callable, Mapping, NamedTuple, Union

from .space import CliffSpace

__all__ = [
    "local_lipschitz",
    "find_cliffs",
    "SmoothFit",
    "clamped_fit",
    "BoundCheck",
    "error_lower_bound_check",
]

CERTIFY_TOL = 1e-9  # float headroom when checking a fit against its cap
HOLDS_TOL = 1e-12


def _as_function(f) -> Callable[[str], float]:
    if callable(f):
        return f
    if isinstance(f, Mapping):
        return f.__getitem__
    raise TypeError(f"expected a callable or mapping, got {type(f).__name__}")


def local_lipschitz(f, x: str, space: CliffSpace) -> float:
    """Largest |f(x) - f(x')| over the declared neighbors of x.

    Zero for a point with an empty neighborhood; always non-negative.
    """
    fn = _as_function(f)
    neighborhood = space.neighbors_of(x)  # also validates membership
    here = fn(x)
    if not neighborhood:
        return 0.0
    return max(abs(here - fn(other)) for other in neighborhood)


def find_cliffs(space: CliffSpace, K: float) -> tuple:
    """All points where the ground truth jumps by at least K across one
    edit, exact by enumeration, in the space's point order."""
    if K <= 0:
        raise ValueError("the jump threshold K must be positive")
    return tuple(
        x for x in space.points
        if local_lipschitz(space.f_star, x, space) >= K
    )


@dataclass(frozen=True)
class SmoothFit:
    """A point predictor whose one-edit movement is capped by `kappa`.

    Build through :meth:`certified`, which scans every neighborhood and
    refuses caps the predictor does not actually honor.
    """

    values: Mapping[str, float]
    kappa: float

    def __call__(self, x: str) -> float:
        try:
            return self.values[x]
        except KeyError:
            raise ValueError(f"{x!r} is outside the fitted space") from None

    @classmethod
    def certified(
        cls,
        space: CliffSpace,
        predictor: Union[Callable[[str], float], Mapping[str, float]],
        kappa: float,
    ) -> "SmoothFit":
        if kappa < 0:
            raise ValueError("kappa must be non-negative")
        fn = _as_function(predictor)
        table = {x: float(fn(x)) for x in space.points}
        worst = max(local_lipschitz(table, x, space) for x in space.points)
        if worst > kappa + CERTIFY_TOL:
            raise ValueError(
                f"smoothness certification failed: measured jump {worst:.6g} "
                f"exceeds the declared cap {kappa:.6g}"
            )
        return cls(values=table, kappa=float(kappa))


def clamped_fit(space: CliffSpace, anchor: str, kappa: float) -> SmoothFit:
    """Best-effort kappa-smooth predictor that matches the truth at
    `anchor` exactly.

    Construction: clamp every raw value into the cone the anchor allows
    (anchor value +/- kappa per edit step), then relax edge by edge - a
    multi-source shortest-path sweep - until no edge moves by more than
    kappa.  Relaxation only ever lowers values toward a neighbor's value
    plus kappa, so the result is the largest kappa-smooth function under
    the clamped start; at the anchor itself nothing can undercut the raw
    value, which keeps the match exact.
    """
    space._require(anchor)
    if kappa < 0:
        raise ValueError("kappa must be non-negative")
    anchor_value = space.f_star(anchor)

    # Edit distance from the anchor, by breadth-first walk.
    hops = {anchor: 0}
    queue = deque([anchor])
    while queue:
        current = queue.popleft()
        for other in space.neighbors_of(current):
            if other not in hops:
                hops[other] = hops[current] + 1
                queue.append(other)

    # Raw start: the truth, floored by the anchor's lower cone so no
    # candidate can ever finish below the anchor value at the anchor.
    start = {}
    for x in space.points:
        raw = space.f_star(x)
        if x in hops:
            raw = max(raw, anchor_value - kappa * hops[x])
        start[x] = raw

    # Lower each point to the cheapest "some start value + kappa per hop"
    # it can be reached at.  Plain Dijkstra with every point as a source.
    smooth: dict[str, float] = {}
    heap = [(value, x) for x, value in start.items()]
    heapq.heapify(heap)
    while heap:
        value, x = heapq.heappop(heap)
        if x in smooth:
            continue
        smooth[x] = value
        for other in space.neighbors_of(x):
            if other not in smooth:
                heapq.heappush(heap, (value + kappa, other))

    smooth[anchor] = anchor_value  # exact by design; undo float drift
    return SmoothFit.certified(space, smooth, kappa)


class BoundCheck(NamedTuple):
    bound: float
    observed: float
    holds: bool


def error_lower_bound_check(
    space: CliffSpace, fit: SmoothFit, x: str
) -> BoundCheck:
    """Confirm the forced neighborhood error of a smooth fit at a sharp
    point.

    Requires the fit to match the truth at x exactly; then the bound is
    (local jump of the truth at x) - kappa, the observation is the worst
    neighbor error, and `holds` records that the observation reaches the
    bound (up to float noise).  A False result signals a bug, not a
    property of the instance.
    """
    space._require(x)
    if fit(x) != space.f_star(x):
        raise ValueError(
            f"fit does not match the truth at {x!r}: "
            f"{fit(x)!r} != {space.f_star(x)!r}"
        )
    jump = local_lipschitz(space.f_star, x, space)
    bound = jump - fit.kappa
    neighborhood = space.neighbors_of(x)
    observed = max(
        (abs(fit(other) - space.f_star(other)) for other in neighborhood),
        default=0.0,
    )
    return BoundCheck(
        bound=bound, observed=observed, holds=observed >= bound - HOLDS_TOL
    )

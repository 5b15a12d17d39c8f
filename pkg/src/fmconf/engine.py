"""Configuration validity, exhaustive enumeration, and layer metrics.

A configuration of a scope is any subset of the scope subtree's features
that contains the scope root and satisfies every in-scope arc: when an
arc's tail is selected, between ``min`` and ``max`` of its heads must be
selected; when a tree arc's tail is deselected, none of its heads may be.
Features selected outside the scope subtree are ignored.

Enumeration identifies each configuration with its selection bit-vector
over the scope subtree's features in canonical index-then-token order and
emits configurations in ascending vector order (vectors compared left to
right, so omitting an early feature sorts before selecting it). The same
order breaks ties throughout the package.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterator, Mapping

from .errors import (
    NoLayerTagsError,
    NoValidConfigurationError,
    ScopeTooLargeError,
    UnknownFeatureError,
)
from .model import (
    Configuration,
    Feature,
    FeatureId,
    FeatureModel,
    Layer,
    Level,
    scope_subtree,
)

DEFAULT_SCOPE_CAP = 64
BRUTE_FORCE_CAP = 20

LEVEL_ORDER = (Level.PROVIDER, Level.TENANT, Level.USER)
LAYER_ORDER = (Layer.GUI, Layer.BP, Layer.S, Layer.DB)


class ViolationReason(Enum):
    BELOW_MIN = "BelowMin"
    ABOVE_MAX = "AboveMax"
    ORPHAN_HEAD = "OrphanHead"
    ROOT_MISSING = "RootMissing"


@dataclass(frozen=True)
class Violation:
    """One failed check. ``arc`` is None for a missing scope root."""

    arc: object
    observed: int
    reason: ViolationReason

    def __str__(self) -> str:
        if self.reason is ViolationReason.ROOT_MISSING:
            return "scope root is not selected"
        return f"{self.reason.value} on arc {self.arc} (observed {self.observed})"


def check_configuration(model: FeatureModel, config: Configuration,
                        scope: str | FeatureId) -> list[Violation]:
    """All violations of ``config`` against the scope's arcs.

    Empty result means the configuration is valid for the scope.
    """
    for fid in config.selected:
        model.feature(fid)  # membership check, raises UnknownFeatureError
    keep = model.subtree_tokens(scope)
    scope_token = model.feature(scope).token
    all_selected = {fid.token for fid in config.selected}
    selected = all_selected & keep

    violations: list[Violation] = []
    if scope_token not in all_selected:
        violations.append(Violation(None, 0, ViolationReason.ROOT_MISSING))

    for arc in model.arcs_within(scope_token):
        count = sum(1 for h in arc.heads if h.token in selected)
        if arc.tail.token in selected:
            if count < arc.mult.min:
                violations.append(Violation(arc, count, ViolationReason.BELOW_MIN))
            elif count > arc.mult.max:
                violations.append(Violation(arc, count, ViolationReason.ABOVE_MAX))
        elif not arc.cross and count > 0:
            violations.append(Violation(arc, count, ViolationReason.ORPHAN_HEAD))
    return violations


def is_valid(model: FeatureModel, config: Configuration,
             scope: str | FeatureId) -> bool:
    return not check_configuration(model, config, scope)


def _scope_positions(sub: FeatureModel):
    """Feature order, position lookup, and per-arc tables for a scope."""
    order = sub.features
    pos = {f.token: i for i, f in enumerate(order)}
    arcs = [
        (
            pos[a.tail.token],
            tuple(pos[h.token] for h in a.heads),
            a.mult.min,
            a.mult.max,
            not a.cross,
        )
        for a in sub.arcs
    ]
    return order, pos, arcs


def enumerate_configurations(model: FeatureModel, scope: str | FeatureId,
                             *, cap: int | None = None,
                             allow_large: bool = False) -> Iterator[Configuration]:
    """Lazily yield every valid configuration of the scope.

    Output is duplicate-free and in ascending bit-vector order. Scopes
    larger than ``cap`` features (default ``DEFAULT_SCOPE_CAP``) are
    refused unless ``allow_large`` consents to streaming an unbounded
    result.
    """
    sub = scope_subtree(model, scope)
    order, pos, arcs = _scope_positions(sub)
    n = len(order)
    limit = DEFAULT_SCOPE_CAP if cap is None else cap
    if n > limit and not allow_large:
        raise ScopeTooLargeError(
            f"scope {sub.root.token!r} has {n} features, cap is {limit}")

    scope_pos = pos[sub.root.token]
    ids = tuple(f.id for f in order)

    arcs_at: list[list[int]] = [[] for _ in range(n)]
    for ai, (tail_p, head_ps, _lo, _hi, _tree) in enumerate(arcs):
        arcs_at[tail_p].append(ai)
        for hp in head_ps:
            arcs_at[hp].append(ai)

    value = [-1] * n                      # -1 undecided, else 0/1
    sel = [0] * len(arcs)                 # selected heads per arc
    und = [len(a[1]) for a in arcs]       # undecided heads per arc

    def arc_dead(ai: int) -> bool:
        tail_p, _head_ps, lo, hi, tree = arcs[ai]
        t = value[tail_p]
        s, u = sel[ai], und[ai]
        if t == 1:
            return s > hi or s + u < lo
        if t == 0:
            return tree and s > 0
        if tree:
            # Tail undecided: selecting it needs min..max reachable,
            # deselecting it needs zero selected heads.
            return not ((s <= hi and s + u >= lo) or s == 0)
        return False

    def assign(p: int, v: int) -> bool:
        # Counter updates must complete before any deadness check so that
        # retract() can always reverse them in full.
        value[p] = v
        for ai in arcs_at[p]:
            if p in arcs[ai][1]:
                und[ai] -= 1
                sel[ai] += v
        for ai in arcs_at[p]:
            if arc_dead(ai):
                return False
        return True

    def retract(p: int, v: int) -> None:
        for ai in arcs_at[p]:
            if p in arcs[ai][1]:
                und[ai] += 1
                sel[ai] -= v
        value[p] = -1

    # Decide positions in canonical order, zero branch first: complete
    # assignments appear exactly in ascending bit-vector order, and tree
    # parents are decided before their children wherever indices follow
    # the tree, which lets the bound checks prune early.
    def walk(p: int) -> Iterator[Configuration]:
        if p == n:
            yield Configuration(frozenset(
                ids[i] for i in range(n) if value[i] == 1))
            return
        choices = (1,) if p == scope_pos else (0, 1)
        for v in choices:
            if assign(p, v):
                yield from walk(p + 1)
            retract(p, v)

    return walk(0)


def brute_force_enumerate(model: FeatureModel, scope: str | FeatureId
                          ) -> set[Configuration]:
    """Definitional oracle: filter all subsets of the scope through
    :func:`is_valid`. Deliberately shares no search logic with
    :func:`enumerate_configurations`.
    """
    keep = model.subtree_tokens(scope)
    if len(keep) > BRUTE_FORCE_CAP:
        raise ScopeTooLargeError(
            f"scope {model.feature(scope).token!r} has {len(keep)} features, "
            f"brute force caps at {BRUTE_FORCE_CAP}")
    scope_id = model.feature(scope).id
    others = [model.feature(tok).id
              for tok in sorted(keep) if tok != scope_id.token]
    result = set()
    for bits in range(1 << len(others)):
        chosen = frozenset(
            others[j] for j in range(len(others)) if bits >> j & 1)
        config = Configuration(chosen | {scope_id})
        if is_valid(model, config, scope):
            result.add(config)
    return result


@dataclass(frozen=True)
class LayerMetrics:
    """Variability and commonality figures for one scope.

    ``variability`` is k over the count of non-empty feature subsets,
    ``2^n - 1``. ``commonality`` maps each subtree feature to the fraction
    of the k configurations containing it; the scope root always maps to 1.
    Both are exact rationals.
    """

    scope: FeatureId
    k: int
    n: int
    variability: Fraction
    commonality: Mapping[FeatureId, Fraction]

    def share(self, ref: str | FeatureId) -> int:
        """Number of configurations containing the feature."""
        token = ref.token if isinstance(ref, FeatureId) else ref
        for fid, frac in self.commonality.items():
            if fid.token == token:
                return int(frac * self.k)
        raise UnknownFeatureError(f"{token!r} is not in scope {self.scope.token!r}")


def layer_metrics(model: FeatureModel, scope: str | FeatureId,
                  *, cap: int | None = None,
                  allow_large: bool = False) -> LayerMetrics:
    """Enumerate the scope and derive k, n, variability, and commonality."""
    sub = scope_subtree(model, scope)
    order = sub.features
    counts = {f.token: 0 for f in order}
    k = 0
    for config in enumerate_configurations(model, scope, cap=cap,
                                           allow_large=allow_large):
        k += 1
        for fid in config.selected:
            counts[fid.token] += 1
    if k == 0:
        # Possible only through cross-arc conflicts; metrics are undefined.
        raise NoValidConfigurationError(
            f"scope {sub.root.token!r} admits no valid configuration")
    n = len(order)
    return LayerMetrics(
        scope=sub.root,
        k=k,
        n=n,
        variability=Fraction(k, (1 << n) - 1),
        commonality={f.id: Fraction(counts[f.token], k) for f in order},
    )


def layer_roots(model: FeatureModel) -> dict[tuple[Level, Layer], FeatureId]:
    """The subtree root of each tagged (level, layer) pair present.

    A layer root is a feature whose (level, layer) pair differs from its
    parent's. Raises :class:`NoLayerTagsError` when nothing is tagged.
    """
    roots: dict[tuple[Level, Layer], FeatureId] = {}
    for f in model.features:          # canonical order, first root wins
        if f.layer is Layer.NONE:
            continue
        par = model.parent(f.id)
        if par is not None:
            pf = model.feature(par)
            if (pf.level, pf.layer) == (f.level, f.layer):
                continue
        roots.setdefault((f.level, f.layer), f.id)
    if not roots:
        raise NoLayerTagsError("the model carries no layer tags")
    return roots


def layer_report(model: FeatureModel, *, cap: int | None = None
                 ) -> dict[tuple[Level, Layer], LayerMetrics]:
    """Metrics for every tagged (level, layer) subtree, in level-major order."""
    roots = layer_roots(model)
    ordered: dict[tuple[Level, Layer], LayerMetrics] = {}
    for level in LEVEL_ORDER:
        for layer in LAYER_ORDER:
            fid = roots.get((level, layer))
            if fid is not None:
                ordered[(level, layer)] = layer_metrics(model, fid, cap=cap)
    for key, fid in roots.items():    # tagged pairs outside the usual grid
        if key not in ordered:
            ordered[key] = layer_metrics(model, fid, cap=cap)
    return ordered

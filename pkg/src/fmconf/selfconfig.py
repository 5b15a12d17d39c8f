"""Requirement-driven configuration selection and minimal reconfiguration.

Both operations search the enumerated configuration space of a scope
exactly, so results are optimal and deterministic: selection returns the
cheapest valid configuration meeting the requirements, reconfiguration the
valid target closest to the current selection. At equal distance, plans
that keep deployed features win over plans that drop them, which is what
the removal-weighted plan cost expresses.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .engine import enumerate_configurations
from .errors import (
    InvalidRequirementError,
    NoValidConfigurationError,
    UnknownFeatureError,
)
from .model import Configuration, FeatureId, FeatureModel


@dataclass(frozen=True)
class RequirementSet:
    """Feature-level requirements: must-haves, must-nots, and weights.

    Weights price features for selection cost and removal cost; a feature
    without an entry weighs 1.
    """

    required: frozenset[FeatureId] = frozenset()
    excluded: frozenset[FeatureId] = frozenset()
    weights: Mapping[FeatureId, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        overlap = self.required & self.excluded
        if overlap:
            tokens = ", ".join(sorted(f.token for f in overlap))
            raise InvalidRequirementError(f"required and excluded overlap: {tokens}")
        for fid, w in self.weights.items():
            if w < 0:
                raise InvalidRequirementError(f"negative weight for {fid.token!r}")

    @classmethod
    def of(cls, required: Iterable[FeatureId] = (),
           excluded: Iterable[FeatureId] = (),
           weights: Mapping[FeatureId, Fraction] | None = None) -> "RequirementSet":
        return cls(frozenset(required), frozenset(excluded), dict(weights or {}))

    def satisfied_by(self, config: Configuration) -> bool:
        return (self.required <= config.selected
                and not (self.excluded & config.selected))

    def weight_of(self, features: Iterable[FeatureId]) -> Fraction:
        total = Fraction(0)
        for fid in features:
            total += self.weights.get(fid, Fraction(1))
        return total


@dataclass(frozen=True)
class ReconfigurationPlan:
    """Delta turning a current selection into the target configuration.

    ``delta_size`` is ``|add| + |remove|``; ``cost`` is the summed weight
    of the removed features.
    """

    target: Configuration
    add: frozenset[FeatureId]
    remove: frozenset[FeatureId]
    cost: Fraction
    delta_size: int


def _check_in_scope(model: FeatureModel, scope, req: RequirementSet) -> None:
    keep = model.subtree_tokens(scope)
    for fid in sorted(req.required | req.excluded, key=lambda f: f.token):
        model.feature(fid)
        if fid.token not in keep:
            raise UnknownFeatureError(
                f"{fid.token!r} is not in scope {model.feature(scope).token!r}")


def select_configuration(model: FeatureModel, scope: str | FeatureId,
                         req: RequirementSet, *, cap: int | None = None,
                         allow_large: bool = False) -> Configuration:
    """The cheapest valid configuration of the scope meeting ``req``.

    Ties go to the configuration that comes first in canonical enumeration
    order. Raises :class:`NoValidConfigurationError` when the requirements
    are unsatisfiable against the model.
    """
    _check_in_scope(model, scope, req)
    best: tuple[Fraction, Configuration] | None = None
    for config in enumerate_configurations(model, scope, cap=cap,
                                           allow_large=allow_large):
        if not req.satisfied_by(config):
            continue
        weight = req.weight_of(config.selected)
        if best is None or weight < best[0]:
            best = (weight, config)
    if best is None:
        raise NoValidConfigurationError(
            f"no configuration of {model.feature(scope).token!r} satisfies the requirements")
    return best[1]


def reconfigure(model: FeatureModel, scope: str | FeatureId,
                current: Configuration, req: RequirementSet,
                *, cap: int | None = None,
                allow_large: bool = False) -> ReconfigurationPlan:
    """Plan the smallest change from ``current`` to a valid target.

    ``current`` need not be valid; repair is in scope. Minimizes the delta
    size, then the cost of removals, then canonical order. Requirement
    features must exist in the model; a required feature outside the scope
    simply makes the requirements unsatisfiable.
    """
    for fid in current.selected:
        model.feature(fid)
    for fid in req.required | req.excluded:
        model.feature(fid)
    cur = current.selected
    best: tuple[int, Fraction, Configuration] | None = None
    for config in enumerate_configurations(model, scope, cap=cap,
                                           allow_large=allow_large):
        if not req.satisfied_by(config):
            continue
        added = config.selected - cur
        removed = cur - config.selected
        delta = len(added) + len(removed)
        cost = req.weight_of(removed)
        if best is None or (delta, cost) < (best[0], best[1]):
            best = (delta, cost, config)
    if best is None:
        raise NoValidConfigurationError(
            f"no configuration of {model.feature(scope).token!r} satisfies the requirements")
    delta, cost, target = best
    return ReconfigurationPlan(
        target=target,
        add=target.selected - cur,
        remove=cur - target.selected,
        cost=cost,
        delta_size=delta,
    )

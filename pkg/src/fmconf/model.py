"""Core domain types: features, multiplicity-annotated hyper-arcs, models.

A feature model is a rooted tree of features plus a list of directed
hyper-arcs. Each arc runs from one tail feature to an ordered set of head
features and carries a multiplicity ``[min..max]`` bounding how many heads
may be selected whenever the tail is selected. Tree arcs define the parent
relation; cross arcs are additional constraints and never define parenthood.

All types are immutable values after construction and safe to share across
threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import (
    BadMultiplicityError,
    CycleError,
    DisconnectedFeatureError,
    DuplicateFeatureNameError,
    DuplicateHeadError,
    DuplicateIndexError,
    EmptyHeadSetError,
    InvalidTokenError,
    MultipleParentsError,
    UnknownFeatureError,
)


class Level(Enum):
    """Management level a feature belongs to."""

    PROVIDER = "provider"
    TENANT = "tenant"
    USER = "user"
    NONE = "none"


class Layer(Enum):
    """Application layer a feature belongs to."""

    GUI = "GUI"
    BP = "BP"
    S = "S"
    DB = "DB"
    NONE = "none"


class ArcKind(Enum):
    """Classification of a valid (multiplicity, head count) combination."""

    MANDATORY = "mandatory"
    OPTIONAL = "optional"
    XOR_GROUP = "xor"
    MUTEX_GROUP = "mutex"
    OR_GROUP = "or"


@dataclass(frozen=True)
class FeatureId:
    """Reference to a feature. Identity is the token alone.

    ``index`` carries the numeric node index used by table-style inputs; it
    is ordering metadata and does not participate in equality.
    """

    token: str
    index: int | None = field(default=None, compare=False)

    def __str__(self) -> str:
        return self.token

    def sort_key(self):
        """Canonical index-then-token ordering key."""
        if self.index is not None:
            return (0, self.index, "")
        return (1, 0, self.token)


@dataclass(frozen=True)
class Multiplicity:
    """Selection bounds ``[min..max]`` for an arc's head set."""

    min: int
    max: int

    def __str__(self) -> str:
        return f"[{self.min},{self.max}]"


@dataclass(frozen=True)
class HyperArc:
    """Directed hyper-arc from ``tail`` to the ordered ``heads``.

    ``cross`` marks a cross-tree constraint; such arcs restrict
    configurations exactly like tree arcs while the tail is selected but do
    not define the parent relation and impose nothing when the tail is
    deselected.
    """

    tail: FeatureId
    heads: tuple[FeatureId, ...]
    mult: Multiplicity
    cross: bool = False

    def kind(self) -> ArcKind:
        return classify_arc(self.mult, len(self.heads))

    def __str__(self) -> str:
        heads = ",".join(h.token for h in self.heads)
        mark = " (cross)" if self.cross else ""
        return f"{self.tail.token} {self.mult} {{{heads}}}{mark}"

    def sort_key(self):
        return (
            self.cross,
            self.tail.sort_key(),
            tuple(h.sort_key() for h in self.heads),
            self.mult.min,
            self.mult.max,
        )


@dataclass(frozen=True)
class Feature:
    """A named node of the feature tree with its tags."""

    id: FeatureId
    name: str = ""
    abstract: bool = False
    level: Level = Level.NONE
    layer: Layer = Layer.NONE

    def __post_init__(self):
        if not self.name:
            object.__setattr__(self, "name", self.id.token)

    @property
    def token(self) -> str:
        return self.id.token


@dataclass(frozen=True)
class Configuration:
    """A set of selected features, the unit of validity checking."""

    selected: frozenset[FeatureId]

    @classmethod
    def of(cls, ids: Iterable[FeatureId]) -> "Configuration":
        return cls(frozenset(ids))

    @classmethod
    def from_tokens(cls, model: "FeatureModel", tokens: Iterable[str]) -> "Configuration":
        """Build a configuration from tokens, validating membership."""
        return cls(frozenset(model.feature(t).id for t in tokens))

    def tokens(self) -> frozenset[str]:
        return frozenset(f.token for f in self.selected)

    def as_line(self) -> str:
        """Canonical text form: sorted comma-separated tokens."""
        return ",".join(sorted(f.token for f in self.selected))

    def __contains__(self, item) -> bool:
        if isinstance(item, FeatureId):
            return item in self.selected
        return any(f.token == item for f in self.selected)

    def __len__(self) -> int:
        return len(self.selected)

    def __iter__(self) -> Iterator[FeatureId]:
        return iter(self.selected)


def classify_arc(mult: Multiplicity, head_count: int) -> ArcKind:
    """Classify a multiplicity against a head count.

    The five kinds partition the valid combinations:

    ==============  =========  ====================
    kind            heads      multiplicity
    ==============  =========  ====================
    MANDATORY       1          [1,1]
    OPTIONAL        1          [0,1]
    XOR_GROUP       > 1        [1,1]
    MUTEX_GROUP     > 1        [0,1]
    OR_GROUP        > 1        [min,max], min >= 1
    ==============  =========  ====================

    Anything else (for example [0,2] over three heads) has no defined
    meaning and raises :class:`BadMultiplicityError`.
    """
    if head_count < 1:
        raise EmptyHeadSetError("an arc must have at least one head")
    lo, hi = mult.min, mult.max
    if lo < 0 or hi < 0:
        raise BadMultiplicityError(f"negative multiplicity {mult}")
    if lo > hi:
        raise BadMultiplicityError(f"multiplicity {mult} has min > max")
    if hi > head_count:
        raise BadMultiplicityError(
            f"multiplicity {mult} exceeds the {head_count} available heads")
    if head_count == 1:
        if (lo, hi) == (1, 1):
            return ArcKind.MANDATORY
        if (lo, hi) == (0, 1):
            return ArcKind.OPTIONAL
        raise BadMultiplicityError(
            f"multiplicity {mult} over a single head is neither mandatory nor optional")
    if (lo, hi) == (1, 1):
        return ArcKind.XOR_GROUP
    if (lo, hi) == (0, 1):
        return ArcKind.MUTEX_GROUP
    if lo >= 1:
        return ArcKind.OR_GROUP
    raise BadMultiplicityError(
        f"multiplicity {mult} over {head_count} heads has no group reading")


class FeatureModel:
    """A validated feature model. Construction performs full validation.

    Exposes read-only views only; instances never mutate after ``__init__``.
    Equality compares the feature set and the arc multiset, ignoring
    declaration order.
    """

    def __init__(self, features: Iterable[Feature], arcs: Iterable[HyperArc],
                 root: FeatureId):
        feats = list(features)
        arc_list = list(arcs)

        by_token: dict[str, Feature] = {}
        indices: dict[int, str] = {}
        for f in feats:
            tok = f.id.token
            if not tok or any(c.isspace() for c in tok):
                raise InvalidTokenError(f"invalid feature token {tok!r}")
            if tok in by_token:
                raise DuplicateFeatureNameError(f"duplicate feature {tok!r}")
            by_token[tok] = f
            if f.id.index is not None:
                if f.id.index < 0:
                    raise InvalidTokenError(f"negative index on {tok!r}")
                if f.id.index in indices:
                    raise DuplicateIndexError(
                        f"index {f.id.index} used by both {indices[f.id.index]!r} and {tok!r}")
                indices[f.id.index] = tok

        if root.token not in by_token:
            raise UnknownFeatureError(f"root {root.token!r} is not a declared feature")

        parent: dict[str, str] = {}
        for arc in arc_list:
            if not arc.heads:
                raise EmptyHeadSetError(
                    f"arc from {arc.tail.token!r} has an empty head set")
            if arc.tail.token not in by_token:
                raise UnknownFeatureError(f"arc tail {arc.tail.token!r} is unknown")
            seen_heads = set()
            for h in arc.heads:
                if h.token not in by_token:
                    raise UnknownFeatureError(f"arc head {h.token!r} is unknown")
                if h.token == arc.tail.token:
                    raise CycleError(f"arc from {arc.tail.token!r} targets its own tail")
                if h.token in seen_heads:
                    raise DuplicateHeadError(
                        f"arc from {arc.tail.token!r} lists head {h.token!r} twice")
                seen_heads.add(h.token)
            classify_arc(arc.mult, len(arc.heads))
            if not arc.cross:
                for h in arc.heads:
                    if h.token == root.token:
                        raise CycleError("a tree arc targets the root")
                    if h.token in parent:
                        raise MultipleParentsError(
                            f"{h.token!r} has parents {parent[h.token]!r} and {arc.tail.token!r}")
                    parent[h.token] = arc.tail.token

        for tok in by_token:
            if tok != root.token and tok not in parent:
                raise DisconnectedFeatureError(
                    f"{tok!r} is not attached to the tree")

        children: dict[str, list[str]] = {tok: [] for tok in by_token}
        for child, par in parent.items():
            children[par].append(child)
        reached = set()
        stack = [root.token]
        while stack:
            tok = stack.pop()
            reached.add(tok)
            stack.extend(children[tok])
        if len(reached) != len(by_token):
            stray = sorted(set(by_token) - reached)
            raise CycleError(f"features not reachable from the root: {', '.join(stray)}")

        order = sorted(feats, key=lambda f: f.id.sort_key())
        self._features: tuple[Feature, ...] = tuple(order)
        self._arcs: tuple[HyperArc, ...] = tuple(arc_list)
        self._root: FeatureId = by_token[root.token].id
        self._by_token = by_token
        self._parent = parent
        self._children = {
            tok: tuple(sorted(kids, key=lambda t: by_token[t].id.sort_key()))
            for tok, kids in children.items()
        }
        # Lazy memo tables; contents are derived and idempotent.
        self._subtree_cache: dict[str, frozenset[str]] = {}
        self._scope_arcs_cache: dict[str, tuple[HyperArc, ...]] = {}

    # -- views ------------------------------------------------------------

    @property
    def root(self) -> FeatureId:
        return self._root

    @property
    def features(self) -> tuple[Feature, ...]:
        """All features in canonical index-then-token order."""
        return self._features

    @property
    def arcs(self) -> tuple[HyperArc, ...]:
        return self._arcs

    @property
    def tree_arcs(self) -> tuple[HyperArc, ...]:
        return tuple(a for a in self._arcs if not a.cross)

    @property
    def cross_arcs(self) -> tuple[HyperArc, ...]:
        return tuple(a for a in self._arcs if a.cross)

    def has(self, token: str) -> bool:
        return token in self._by_token

    def feature(self, ref: str | FeatureId) -> Feature:
        token = ref.token if isinstance(ref, FeatureId) else ref
        try:
            return self._by_token[token]
        except KeyError:
            raise UnknownFeatureError(f"unknown feature {token!r}") from None

    def parent(self, ref: str | FeatureId) -> FeatureId | None:
        token = self.feature(ref).token
        par = self._parent.get(token)
        return self._by_token[par].id if par is not None else None

    def children(self, ref: str | FeatureId) -> tuple[FeatureId, ...]:
        token = self.feature(ref).token
        return tuple(self._by_token[t].id for t in self._children[token])

    def subtree_tokens(self, ref: str | FeatureId) -> frozenset[str]:
        """Tokens of the tree descendants of ``ref``, inclusive."""
        start = self.feature(ref).token
        cached = self._subtree_cache.get(start)
        if cached is None:
            out = set()
            stack = [start]
            while stack:
                tok = stack.pop()
                out.add(tok)
                stack.extend(self._children[tok])
            cached = frozenset(out)
            self._subtree_cache[start] = cached
        return cached

    def arcs_within(self, ref: str | FeatureId) -> tuple[HyperArc, ...]:
        """Arcs whose endpoints all lie inside the subtree of ``ref``."""
        start = self.feature(ref).token
        cached = self._scope_arcs_cache.get(start)
        if cached is None:
            keep = self.subtree_tokens(start)
            cached = tuple(
                a for a in self._arcs
                if a.tail.token in keep and all(h.token in keep for h in a.heads))
            self._scope_arcs_cache[start] = cached
        return cached

    # -- equality ----------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, FeatureModel):
            return NotImplemented
        return (
            self._root == other._root
            and set(self._features) == set(other._features)
            and sorted(self._arcs, key=HyperArc.sort_key)
            == sorted(other._arcs, key=HyperArc.sort_key)
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return (f"<FeatureModel root={self._root.token!r} "
                f"features={len(self._features)} arcs={len(self._arcs)}>")


def build_model(features: Iterable[Feature], arcs: Iterable[HyperArc],
                root: FeatureId) -> FeatureModel:
    """Validate and assemble a feature model.

    Raises a :class:`~fmconf.errors.ModelError` subclass naming the first
    violated invariant; on success every structural invariant holds.
    """
    return FeatureModel(features, arcs, root)


def scope_subtree(model: FeatureModel, scope: str | FeatureId) -> FeatureModel:
    """The sub-model induced by ``scope`` and its tree descendants.

    Keeps every tree arc among the retained features and every cross arc
    whose endpoints all lie inside. Level and layer tags are preserved.
    Scoping at the model root returns an equal model; the operation is
    idempotent.
    """
    keep = model.subtree_tokens(scope)
    feats = [f for f in model.features if f.token in keep]
    return FeatureModel(feats, model.arcs_within(scope), model.feature(scope).id)

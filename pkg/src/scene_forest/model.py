"""Core domain types: objects, attributes, triplets, trees, tasks, and plans.

All types are immutable values after construction and safe to share between
concurrent workers.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from enum import Enum

from .errors import DomainError, InvalidLabel

FRAGILITY_LEVELS = ("low", "medium", "high")
TRANSPARENCY_LEVELS = ("opaque", "translucent", "transparent")
MATERIALS = ("wood", "metal", "glass", "plastic", "ceramic", "paper", "fabric", "other")

_ID_RE = re.compile(r"[a-z][a-z0-9_]*\Z")


def fragility_rank(level: str) -> int:
    """Ordinal position of a fragility level (low < medium < high)."""
    return FRAGILITY_LEVELS.index(level)


def canonicalize_id(label: str, ordinal: int) -> str:
    """Derive the deterministic object id `<lowercased-label>_<ordinal>`.

    Idempotent for identical inputs; raises InvalidLabel when the label
    cannot be reduced to a well-formed id token.
    """
    if ordinal < 1:
        raise InvalidLabel(f"ordinal must be positive, got {ordinal}")
    token = re.sub(r"[^a-z0-9]+", "_", label.strip().lower()).strip("_")
    candidate = f"{token}_{ordinal}"
    if not token or not _ID_RE.match(candidate):
        raise InvalidLabel(f"label {label!r} yields no valid id")
    return candidate


@dataclass(frozen=True)
class AttributeSet:
    fragility: str
    mass_grams: float
    material: str
    transparency: str

    def __post_init__(self):
        if self.fragility not in FRAGILITY_LEVELS:
            raise DomainError(f"fragility {self.fragility!r} not in {FRAGILITY_LEVELS}")
        if self.material not in MATERIALS:
            raise DomainError(f"material {self.material!r} not in {MATERIALS}")
        if self.transparency not in TRANSPARENCY_LEVELS:
            raise DomainError(
                f"transparency {self.transparency!r} not in {TRANSPARENCY_LEVELS}"
            )
        mass = self.mass_grams
        if not isinstance(mass, (int, float)) or not math.isfinite(mass) or mass <= 0:
            raise DomainError(f"mass_grams must be positive and finite, got {mass!r}")


@dataclass(frozen=True)
class ObjectInstance:
    id: str
    label: str
    attributes: AttributeSet

    def __post_init__(self):
        if not _ID_RE.match(self.id):
            raise DomainError(f"malformed object id {self.id!r}")
        if not self.label:
            raise DomainError("object label must be non-empty")


class SpatialPredicate(Enum):
    ON = "on"
    ON_TOP_OF = "on_top_of"

    @classmethod
    def from_token(cls, token: str) -> "SpatialPredicate":
        for member in cls:
            if member.value == token:
                return member
        raise DomainError(f"unknown predicate token {token!r}")


@dataclass(frozen=True)
class SpatialTriplet:
    subject: str
    predicate: SpatialPredicate
    support: str

    def __post_init__(self):
        if self.subject == self.support:
            raise DomainError(f"object {self.subject!r} cannot support itself")


@dataclass(frozen=True)
class SceneTree:
    """Validated support hierarchy: root surface plus a single-parent map.

    `parent` maps every non-root id to the id it rests on. Children are
    derived, ordered lexicographically for deterministic traversal.
    """

    root: str
    nodes: dict[str, ObjectInstance]
    parent: dict[str, str]

    def children_of(self, node_id: str) -> list[str]:
        return sorted(c for c, p in self.parent.items() if p == node_id)

    def ids(self) -> set[str]:
        return set(self.nodes)

    def preorder(self) -> list[str]:
        out: list[str] = []
        stack = [self.root]
        while stack:
            node = stack.pop()
            out.append(node)
            stack.extend(reversed(self.children_of(node)))
        return out

    def with_parent(self, node_id: str, new_parent: str) -> "SceneTree":
        updated = dict(self.parent)
        updated[node_id] = new_parent
        return SceneTree(root=self.root, nodes=self.nodes, parent=updated)


class TaskKind(Enum):
    STACK_ALL = "stack_all"
    STACK_OBJECT = "stack_object"
    UNSTACK_ALL = "unstack_all"
    GROUP_BY_MATERIAL = "group_by_material"
    FREE_TEXT = "free_text"


@dataclass(frozen=True)
class TaskSpec:
    kind: TaskKind
    raw_prompt: str
    target: str | None = None

    def __post_init__(self):
        if self.kind is TaskKind.STACK_OBJECT and not self.target:
            raise DomainError("stack-object task requires a target id")


@dataclass(frozen=True)
class MoveAction:
    object: str
    destination: str

    def __post_init__(self):
        if self.object == self.destination:
            raise DomainError(f"move of {self.object!r} onto itself")


@dataclass(frozen=True)
class Plan:
    moves: tuple[MoveAction, ...]

    def __len__(self) -> int:
        return len(self.moves)

    def to_text(self) -> str:
        return "".join(f"MOVE {m.object} ONTO {m.destination}\n" for m in self.moves)


@dataclass(frozen=True)
class SceneRecord:
    scene_id: str
    objects: tuple[ObjectInstance, ...]
    captions: tuple[str, ...]
    triplets: tuple[SpatialTriplet, ...] | None = None

    def __post_init__(self):
        ids = [o.id for o in self.objects]
        if len(ids) != len(set(ids)):
            raise DomainError(f"duplicate object ids in scene {self.scene_id!r}")
        if self.triplets is not None:
            known = set(ids)
            for t in self.triplets:
                if t.subject not in known or t.support not in known:
                    raise DomainError(
                        f"triplet ({t.subject}, {t.support}) references undeclared id"
                    )

    def registry(self) -> list[ObjectInstance]:
        return list(self.objects)

import random

import pytest

from scene_forest.model import (
    AttributeSet,
    FRAGILITY_LEVELS,
    MATERIALS,
    ObjectInstance,
    SceneTree,
    TRANSPARENCY_LEVELS,
)

TABLE_ATTRS = AttributeSet(
    fragility="low", mass_grams=12000, material="wood", transparency="opaque"
)


def make_object(obj_id, label=None, fragility="low", mass=100.0, material="wood",
                transparency="opaque"):
    if label is None:
        label = obj_id.rsplit("_", 1)[0]
    return ObjectInstance(
        id=obj_id,
        label=label,
        attributes=AttributeSet(
            fragility=fragility,
            mass_grams=mass,
            material=material,
            transparency=transparency,
        ),
    )


def make_table():
    return ObjectInstance(id="table_1", label="table", attributes=TABLE_ATTRS)


def chain_tree(*ids):
    """table_1 <- ids[0] <- ids[1] <- ... as a single stack."""
    objects = [make_table()] + [make_object(i) for i in ids]
    parent = {}
    below = "table_1"
    for i in ids:
        parent[i] = below
        below = i
    return SceneTree(root="table_1", nodes={o.id: o for o in objects}, parent=parent)


def random_tree(rng: random.Random, n: int, distinct_labels: bool = True) -> SceneTree:
    """Random valid tree with n movable objects on a table root."""
    labels = ["book", "cup", "plate", "bowl", "box", "pen", "jar", "mug", "tray", "can"]
    objects = [make_table()]
    for i in range(n):
        if distinct_labels:
            label = labels[i % len(labels)]
            ordinal = i // len(labels) + 1
        else:
            label = rng.choice(labels[:3])
            ordinal = sum(1 for o in objects if o.label == label) + 1
        objects.append(
            ObjectInstance(
                id=f"{label}_{ordinal}",
                label=label,
                attributes=AttributeSet(
                    fragility=rng.choice(FRAGILITY_LEVELS),
                    mass_grams=round(rng.uniform(10, 3000), 1),
                    material=rng.choice(MATERIALS),
                    transparency=rng.choice(TRANSPARENCY_LEVELS),
                ),
            )
        )
    parent = {}
    placed = ["table_1"]
    for obj in objects[1:]:
        parent[obj.id] = rng.choice(placed)
        placed.append(obj.id)
    return SceneTree(root="table_1", nodes={o.id: o for o in objects}, parent=parent)


def random_parent_map(rng: random.Random, tree: SceneTree) -> SceneTree:
    """Another random arrangement over the same objects (for goal trees)."""
    ids = sorted(n for n in tree.nodes if n != tree.root)
    rng.shuffle(ids)
    parent = {}
    placed = [tree.root]
    for obj_id in ids:
        parent[obj_id] = rng.choice(placed)
        placed.append(obj_id)
    return SceneTree(root=tree.root, nodes=tree.nodes, parent=parent)


@pytest.fixture
def rng():
    return random.Random(20240824)

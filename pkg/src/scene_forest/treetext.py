"""Bit-exact text serialization of scene trees (`TREE` ... `END` blocks).

One line per node in pre-order, children in lexicographic id order,
indentation of two spaces per depth level. Node lines carry the attribute
summary; parsing only needs the ids and indentation, attributes are
recovered from the object registry.
"""
from __future__ import annotations

from .errors import (
    DuplicateObject,
    MalformedIndentation,
    MissingObject,
    NoTreeBlock,
    UnknownId,
)
from .model import ObjectInstance, SceneTree


def format_mass(mass_grams: float) -> str:
    """Decimal integer when integral, else shortest round-trip decimal."""
    if float(mass_grams) == int(mass_grams):
        return str(int(mass_grams))
    return repr(float(mass_grams))


def serialize_tree(tree: SceneTree) -> str:
    """Render the tree block, deterministic and byte-stable."""
    lines = ["TREE"]
    depths = {tree.root: 0}
    for node_id in tree.preorder():
        if node_id != tree.root:
            depths[node_id] = depths[tree.parent[node_id]] + 1
        a = tree.nodes[node_id].attributes
        lines.append(
            "  " * depths[node_id]
            + f"{node_id} [material={a.material}, mass={format_mass(a.mass_grams)}, "
            + f"fragility={a.fragility}, transparency={a.transparency}]"
        )
    lines.append("END")
    return "\n".join(lines) + "\n"


def parse_tree_block(text: str, registry: list[ObjectInstance]) -> SceneTree:
    """Parse the first TREE...END block in `text` into a validated tree.

    Enforces conservation against the registry: every registry id exactly
    once, no extras.
    """
    lines = text.splitlines()
    try:
        start = next(i for i, line in enumerate(lines) if line.strip() == "TREE")
    except StopIteration:
        raise NoTreeBlock("no TREE line found") from None
    try:
        end = next(i for i in range(start + 1, len(lines)) if lines[i].strip() == "END")
    except StopIteration:
        raise NoTreeBlock("TREE block not terminated by END") from None

    by_id = {o.id: o for o in registry}
    parent: dict[str, str] = {}
    root: str | None = None
    stack: list[str] = []  # stack[d] = most recent node at depth d
    seen: set[str] = set()
    for line in lines[start + 1:end]:
        if not line.strip():
            continue
        indent = len(line) - len(line.lstrip(" "))
        if indent % 2:
            raise MalformedIndentation(f"odd indentation on line {line!r}")
        node_depth = indent // 2
        node_id = line.strip().split()[0]
        if node_id in seen:
            raise DuplicateObject(f"object {node_id} listed twice")
        seen.add(node_id)
        if node_id not in by_id:
            raise UnknownId(f"object {node_id} not in registry")
        if node_depth == 0:
            if root is not None:
                raise MalformedIndentation(f"second root-level node {node_id}")
            root = node_id
            stack = [node_id]
            continue
        if root is None or node_depth > len(stack):
            raise MalformedIndentation(
                f"{node_id} at depth {node_depth} has no parent at depth {node_depth - 1}"
            )
        parent[node_id] = stack[node_depth - 1]
        del stack[node_depth:]
        stack.append(node_id)

    if root is None:
        raise NoTreeBlock("TREE block contains no nodes")
    missing = sorted(set(by_id) - seen)
    if missing:
        raise MissingObject(f"objects omitted from tree: {', '.join(missing)}")
    return SceneTree(root=root, nodes=dict(by_id), parent=parent)

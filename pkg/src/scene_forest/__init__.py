"""Tabletop scene trees: caption parsing, task reorganization, and planning."""

from .model import (
    AttributeSet,
    MoveAction,
    ObjectInstance,
    Plan,
    SceneRecord,
    SceneTree,
    SpatialPredicate,
    SpatialTriplet,
    TaskKind,
    TaskSpec,
    canonicalize_id,
)
from .captions import parse_caption, resolve_reference, grammar_productions
from .treebuild import build_tree, validate_tree, detect_cycle, depth, clear_objects, to_dot
from .reorganize import (
    Backend,
    BackendConfig,
    check_physical_constraints,
    parse_goal_response,
    reorganize,
    rule_group_by_material,
    rule_stack_all,
    rule_stack_object,
    rule_unstack_all,
    serialize_tree_prompt,
)
from .planner import diff_trees, execute_plan, optimal_plan_bfs, plan_moves
from .dataset import (
    GeneratorConfig,
    generate_synthetic_scene,
    load_scene_record,
    render_caption,
    save_scene_record,
)

__all__ = [
    "AttributeSet",
    "Backend",
    "BackendConfig",
    "GeneratorConfig",
    "MoveAction",
    "ObjectInstance",
    "Plan",
    "SceneRecord",
    "SceneTree",
    "SpatialPredicate",
    "SpatialTriplet",
    "TaskKind",
    "TaskSpec",
    "build_tree",
    "canonicalize_id",
    "check_physical_constraints",
    "clear_objects",
    "depth",
    "detect_cycle",
    "diff_trees",
    "execute_plan",
    "generate_synthetic_scene",
    "grammar_productions",
    "load_scene_record",
    "optimal_plan_bfs",
    "parse_caption",
    "parse_goal_response",
    "plan_moves",
    "render_caption",
    "reorganize",
    "resolve_reference",
    "rule_group_by_material",
    "rule_stack_all",
    "rule_stack_object",
    "rule_unstack_all",
    "save_scene_record",
    "serialize_tree_prompt",
    "to_dot",
    "validate_tree",
]

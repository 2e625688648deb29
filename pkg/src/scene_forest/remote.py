"""HTTP client for a chat-completion-style reorganization backend.

Sends the serialized tree plus task as a chat request, validates the
returned tree block, and re-prompts with the violation text when the model
breaks conservation or tree validity, up to the configured retry budget.
"""
from __future__ import annotations

import os

import requests

from .errors import GoalParseError, InvalidGoal, UnknownId, BackendError
from .model import ObjectInstance, SceneTree, TaskSpec
from .treetext import serialize_tree

API_KEY_ENV = "SCENE_FOREST_API_KEY"


def build_messages(tree: SceneTree, task: TaskSpec) -> list[dict]:
    from .reorganize import PROMPT_PREAMBLE

    user = f"{serialize_tree(tree)}\nTASK: {task.raw_prompt}\n"
    return [
        {"role": "system", "content": PROMPT_PREAMBLE},
        {"role": "user", "content": user},
    ]


def _post_chat(config, messages: list[dict]) -> str:
    body = {"model": config.model_name, "messages": messages, "temperature": 0}
    headers = {"Content-Type": "application/json"}
    api_key = os.environ.get(API_KEY_ENV)
    if api_key:
        headers["Authorization"] = f"Bearer {api_key}"
    resp = requests.post(
        config.endpoint_url, json=body, headers=headers, timeout=config.timeout_seconds
    )
    resp.raise_for_status()
    payload = resp.json()
    try:
        return payload["choices"][0]["message"]["content"]
    except (KeyError, IndexError, TypeError) as exc:
        raise BackendError(f"malformed chat response: {exc}") from exc


def request_goal_tree(tree: SceneTree, task: TaskSpec, config) -> SceneTree:
    """One reorganization round-trip, with validation-driven re-prompting."""
    from .reorganize import check_goal, parse_goal_response

    registry: list[ObjectInstance] = list(tree.nodes.values())
    messages = build_messages(tree, task)
    last_error: Exception | None = None
    for _ in range(config.max_retries + 1):
        try:
            content = _post_chat(config, messages)
        except (requests.RequestException, BackendError) as exc:
            last_error = exc
            continue
        try:
            goal = parse_goal_response(content, registry)
            check_goal(tree, goal)
            return goal
        except (GoalParseError, InvalidGoal, UnknownId) as exc:
            last_error = InvalidGoal(str(exc))
            messages = messages + [
                {"role": "assistant", "content": content},
                {
                    "role": "user",
                    "content": (
                        f"That arrangement is invalid: {exc}. Reply again with a "
                        "corrected TREE ... END block using every listed object "
                        "exactly once."
                    ),
                },
            ]
    if isinstance(last_error, InvalidGoal):
        raise last_error
    raise BackendError(f"remote backend failed after retries: {last_error}")

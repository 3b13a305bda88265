"""Human-facing renderings: DOT graphs of trees and registry documentation."""

from __future__ import annotations

import json

from .registry import Registry
from .tree import ArgumentTreeNode, validate_tree
from .violations import NodePath, ViolationCode

_REQ_NODE_CODES = {
    ViolationCode.COUNT_VIOLATION,
    ViolationCode.KIND_MISMATCH,
    ViolationCode.TAG_MISMATCH,
}


def _dot_id(prefix: str, path: NodePath, extra: str = "") -> str:
    parts = [f"{key}_{index}" for key, index in path]
    if extra:
        parts.append(extra)
    return prefix + "__".join(parts) if parts else prefix + "root"


def _quote(label: str) -> str:
    return '"' + label.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(root: ArgumentTreeNode, include_violations: bool = False) -> str:
    """Graphviz digraph: class boxes joined through requirement nodes.

    With ``include_violations``, requirement nodes whose subtree breaches
    count/kind/tag rules are colored red.
    """
    flagged: set[tuple[NodePath, str]] = set()
    if include_violations:
        for violation in validate_tree(root):
            if violation.code not in _REQ_NODE_CODES:
                continue
            if violation.code is ViolationCode.COUNT_VIOLATION:
                # count details start with the requirement key; path is the parent
                flagged.add((violation.path, violation.detail.split(" ", 1)[0]))
            elif violation.path:
                flagged.add((violation.path[:-1], violation.path[-1][0]))

    lines = ["digraph argtree {", "  rankdir=LR;", '  node [fontname="sans-serif"];']

    def emit(node: ArgumentTreeNode, path: NodePath) -> None:
        node_id = _dot_id("c_", path)
        lines.append(f"  {node_id} [shape=box, style=filled, fillcolor=lightcyan, "
                     f"label={_quote(node.name)}];")
        for req in node.descriptor.child_requirements:
            req_id = _dot_id("r_", path, req.key)
            attrs = f"shape=ellipse, label={_quote(f'{req.key} ({req.count_text()})')}"
            if (path, req.key) in flagged:
                attrs += ", color=red, fontcolor=red"
            lines.append(f"  {req_id} [{attrs}];")
            lines.append(f"  {node_id} -> {req_id};")
            for child in node.children.get(req.key, ()):
                child_path = path + ((req.key, child.index),)
                emit(child, child_path)
                lines.append(f"  {req_id} -> {_dot_id('c_', child_path)};")

    emit(root, ())
    lines.append("}")
    return "\n".join(lines) + "\n"


def docgen(registry: Registry) -> str:
    """Exhaustive listing of every registered module, argument, and requirement.

    Deterministic: kinds and names sort lexicographically, arguments and
    requirements keep declaration order. Missing modules get their own
    section with the recorded reason.
    """
    lines = [
        "Registered modules",
        "==================",
        "",
    ]
    for kind in registry.kinds():
        lines.append(f"[{kind}]")
        for descriptor in registry.filter(kind):
            origin = f"  (from {descriptor.source})" if descriptor.source else ""
            lines.append(f"  {descriptor.name}{origin}")
            if descriptor.help:
                lines.append(f"    {descriptor.help}")
            for arg in descriptor.arguments:
                text = (
                    f"    Argument: {arg.name} "
                    f"({arg.value_kind.value}, default={json.dumps(arg.default)})"
                )
                if arg.choices:
                    text += f" choices={list(arg.choices)}"
                if arg.help:
                    text += f"  {arg.help}"
                lines.append(text)
            for req in descriptor.child_requirements:
                text = f"    Requirement: {req.key} -> {req.allowed_kind} [{req.count_text()}]"
                if req.tag_filter:
                    text += f" tags={req.tag_filter}"
                lines.append(text)
        lines.append("")
    missing = registry.missing()
    if missing:
        lines.append("[MISSING]")
        for name in sorted(missing):
            lines.append(f"  {name}: {missing[name]}")
        lines.append("")
    return "\n".join(lines)

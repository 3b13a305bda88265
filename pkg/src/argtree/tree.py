"""Building, validating, and regenerating argument trees.

``build_tree`` turns (registry, flat document) into a tree of
:class:`ArgumentTreeNode`, resolving every argument value and every child
selection recursively. It gathers *all* violations it can find instead of
stopping at the first, then fails with the complete list; a passing build
guarantees the document was fully consumed (no key nothing asked for).

``generate_config`` is the inverse: a violation-free tree emits a canonical
flat document (complete, sparse, indexed-wildcard keys only) that rebuilds
the identical tree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional

from .config import ConfigDocument, default_env, expand_placeholders
from .errors import (
    AmbiguousValueError,
    BuildError,
    CoercionError,
    InvalidTreeError,
    MissingModuleError,
    UnknownModuleError,
    UnknownPlaceholderError,
)
from .registry import Registry
from .schema import ChildRequirementSpec, ModuleDescriptor, Scalar, ValueKind
from .violations import NodePath, Violation, ViolationCode

DEFAULT_ENTRY_REQ = "cls_task"
DEFAULT_ENTRY_KIND = "task"


@dataclass
class ArgumentTreeNode:
    """One resolved module: descriptor, position, values, children."""

    descriptor: ModuleDescriptor
    req_key: str
    index: int
    values: dict[str, Scalar] = field(default_factory=dict)
    children: dict[str, list["ArgumentTreeNode"]] = field(default_factory=dict)

    @property
    def name(self) -> str:
        return self.descriptor.name

    def child_at(self, path: NodePath) -> "ArgumentTreeNode":
        """Follow (req_key, index) steps from this node; KeyError/IndexError on miss."""
        node = self
        for req_key, index in path:
            siblings = node.children[req_key]
            if index < 0 or index >= len(siblings):
                raise IndexError(f"no child {req_key}#{index}")
            node = siblings[index]
        return node

    def walk(self, path: NodePath = ()) -> Iterator[tuple[NodePath, "ArgumentTreeNode"]]:
        """Depth-first (node path, node) pairs, children in declaration order."""
        yield path, self
        for req in self.descriptor.child_requirements:
            for child in self.children.get(req.key, ()):
                yield from child.walk(path + ((req.key, child.index),))

    def node_count(self) -> int:
        return sum(1 for _ in self.walk())


def _count_detail(req: ChildRequirementSpec, found: int) -> str:
    if req.count_max is not None and req.count_min == req.count_max:
        need = f"exactly {req.count_min}"
    elif req.count_max is None:
        need = f"at least {req.count_min}"
    else:
        need = f"between {req.count_min} and {req.count_max}"
    return f"{req.key} requires {need}, found {found}"


def entry_kind_for(entry_req: str) -> str:
    """Conventional kind for an entry requirement: strip the ``cls_`` prefix."""
    return entry_req[4:] if entry_req.startswith("cls_") else entry_req


class _TreeBuilder:
    def __init__(self, registry: Registry, doc: ConfigDocument, env: dict[str, str]):
        self.registry = registry
        self.doc = doc
        self.env = env
        self.violations: list[Violation] = []
        # requirement key -> name of the descriptor that declared it; the
        # flat format cannot address the same key from two different classes.
        self.declared_by: dict[str, str] = {}

    def report(self, code: ViolationCode, detail: str, path: NodePath) -> None:
        self.violations.append(Violation(code, detail, path))

    def build(self, entry_req: str, entry_kind: str) -> Optional[ArgumentTreeNode]:
        names = self.doc.get_used_classes(entry_req)
        if len(names) != 1:
            stub = ChildRequirementSpec(entry_req, entry_kind)
            self.report(ViolationCode.COUNT_VIOLATION, _count_detail(stub, len(names)), ())
            return None
        return self.parse(names[0], entry_req, entry_kind, {}, 0, ())

    def parse(
        self,
        class_name: str,
        req_key: str,
        expected_kind: str,
        tag_filter: dict,
        index: int,
        parent_path: NodePath,
    ) -> Optional[ArgumentTreeNode]:
        path = parent_path + ((req_key, index),)
        try:
            descriptor = self.registry.lookup(class_name)
        except MissingModuleError as err:
            self.report(ViolationCode.MISSING_MODULE, str(err), path)
            return None
        except UnknownModuleError:
            self.report(ViolationCode.UNKNOWN_MODULE, f"no module named '{class_name}'", path)
            return None

        if descriptor.kind != expected_kind:
            self.report(
                ViolationCode.KIND_MISMATCH,
                f"'{descriptor.name}' has kind '{descriptor.kind}', {req_key} needs '{expected_kind}'",
                path,
            )
            return None
        if not descriptor.matches(expected_kind, tag_filter):
            self.report(
                ViolationCode.TAG_MISMATCH,
                f"'{descriptor.name}' tags {descriptor.tags} do not satisfy {tag_filter}",
                path,
            )
            return None

        values: dict[str, Scalar] = {}
        for arg in descriptor.arguments:
            try:
                value = self.doc.get_used_value(req_key, index, descriptor.name, arg)
                if isinstance(value, str) and "{" in value:
                    value = expand_placeholders(value, self.env)
            except AmbiguousValueError as err:
                self.report(ViolationCode.AMBIGUOUS_VALUE, str(err), path)
                value = arg.default
            except CoercionError as err:
                self.report(ViolationCode.COERCION_ERROR, str(err), path)
                value = arg.default
            except UnknownPlaceholderError as err:
                self.report(ViolationCode.UNKNOWN_PLACEHOLDER, str(err), path)
                value = arg.default
            values[arg.name] = value

        children: dict[str, list[ArgumentTreeNode]] = {}
        for req in descriptor.child_requirements:
            declarer = self.declared_by.get(req.key)
            if declarer is not None and declarer != descriptor.name:
                self.report(
                    ViolationCode.DUPLICATE_REQUIREMENT_KEY,
                    f"requirement key '{req.key}' already declared by '{declarer}'",
                    path,
                )
                children[req.key] = []
                continue
            self.declared_by[req.key] = descriptor.name
            names = self.doc.get_used_classes(req.key)
            if not req.accepts_count(len(names)):
                self.report(ViolationCode.COUNT_VIOLATION, _count_detail(req, len(names)), path)
            built = []
            for i, name in enumerate(names):
                child = self.parse(name, req.key, req.allowed_kind, req.tag_filter, i, path)
                if child is not None:
                    built.append(child)
            children[req.key] = built
        return ArgumentTreeNode(descriptor, req_key, index, values, children)


def build_tree(
    registry: Registry,
    doc: ConfigDocument,
    env: Optional[dict[str, str]] = None,
    entry_req: str = DEFAULT_ENTRY_REQ,
    entry_kind: str = DEFAULT_ENTRY_KIND,
) -> ArgumentTreeNode:
    """Build the argument tree a document describes, or fail with every violation.

    A successful build consumed every document key; leftover keys are
    reported as UnparsedKey (suppressed while other violations explain why
    whole branches went unread).
    """
    merged_env = default_env()
    if env:
        merged_env.update(env)
    doc.reset_consumed()
    builder = _TreeBuilder(registry, doc, merged_env)
    root = builder.build(entry_req, entry_kind)
    if not builder.violations:
        for key in doc.unconsumed():
            builder.report(ViolationCode.UNPARSED_KEY, f"nothing asked for key '{key}'", ())
    if builder.violations:
        raise BuildError(builder.violations)
    assert root is not None
    return root


def _value_matches(kind: ValueKind, value: Scalar) -> bool:
    if kind is ValueKind.BOOLEAN:
        return isinstance(value, bool)
    if kind is ValueKind.INTEGER:
        return isinstance(value, int) and not isinstance(value, bool)
    if kind is ValueKind.REAL:
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    return isinstance(value, str)


def validate_tree(root: ArgumentTreeNode) -> list[Violation]:
    """Every invariant breach of a tree, with node paths; [] iff runnable.

    Accepts partially built trees (GUI sessions), where required children
    may still be absent.
    """
    violations: list[Violation] = []
    declared_by: dict[str, str] = {}

    def check(node: ArgumentTreeNode, path: NodePath) -> None:
        descriptor = node.descriptor
        declared = {a.name for a in descriptor.arguments}
        for name in sorted(declared - set(node.values)):
            violations.append(
                Violation(ViolationCode.MISSING_VALUE, f"argument '{name}' has no value", path)
            )
        for name in sorted(set(node.values) - declared):
            violations.append(
                Violation(ViolationCode.EXTRA_VALUE, f"value for undeclared argument '{name}'", path)
            )
        for arg in descriptor.arguments:
            if arg.name not in node.values:
                continue
            value = node.values[arg.name]
            if not _value_matches(arg.value_kind, value):
                violations.append(
                    Violation(
                        ViolationCode.COERCION_ERROR,
                        f"argument '{arg.name}' holds {value!r}, not a {arg.value_kind.value}",
                        path,
                    )
                )
            elif arg.choices and value not in arg.choices:
                violations.append(
                    Violation(
                        ViolationCode.COERCION_ERROR,
                        f"argument '{arg.name}' value {value!r} not one of {list(arg.choices)}",
                        path,
                    )
                )

        known_keys = {r.key for r in descriptor.child_requirements}
        for key in sorted(set(node.children) - known_keys):
            violations.append(
                Violation(
                    ViolationCode.UNKNOWN_REQUIREMENT,
                    f"children under undeclared requirement '{key}'",
                    path,
                )
            )
        for req in descriptor.child_requirements:
            declarer = declared_by.setdefault(req.key, descriptor.name)
            if declarer != descriptor.name:
                violations.append(
                    Violation(
                        ViolationCode.DUPLICATE_REQUIREMENT_KEY,
                        f"requirement key '{req.key}' already declared by '{declarer}'",
                        path,
                    )
                )
                continue
            kids = node.children.get(req.key, [])
            if not req.accepts_count(len(kids)):
                violations.append(
                    Violation(ViolationCode.COUNT_VIOLATION, _count_detail(req, len(kids)), path)
                )
            for i, child in enumerate(kids):
                child_path = path + ((req.key, child.index),)
                if child.index != i:
                    violations.append(
                        Violation(
                            ViolationCode.INDEX_MISMATCH,
                            f"child of {req.key} at position {i} carries index {child.index}",
                            path,
                        )
                    )
                if child.descriptor.kind != req.allowed_kind:
                    violations.append(
                        Violation(
                            ViolationCode.KIND_MISMATCH,
                            f"'{child.name}' has kind '{child.descriptor.kind}', "
                            f"{req.key} needs '{req.allowed_kind}'",
                            child_path,
                        )
                    )
                elif not child.descriptor.matches(req.allowed_kind, req.tag_filter):
                    violations.append(
                        Violation(
                            ViolationCode.TAG_MISMATCH,
                            f"'{child.name}' tags {child.descriptor.tags} "
                            f"do not satisfy {req.tag_filter}",
                            child_path,
                        )
                    )
                check(child, child_path)

    check(root, ())
    return violations


def generate_config(root: ArgumentTreeNode) -> ConfigDocument:
    """Canonical flat document for a violation-free tree.

    Complete (every argument of every present module appears), sparse (no
    key mentions an absent module), unambiguous (indexed wildcard keys
    only). Rebuilding the result yields a structurally identical tree.
    """
    violations = validate_tree(root)
    if violations:
        raise InvalidTreeError(violations, "cannot generate config")

    entries: dict[str, Scalar] = {}

    def put(key: str, value: Scalar, context: NodePath) -> None:
        if key in entries and not (type(entries[key]) is type(value) and entries[key] == value):
            # Two same-named nodes disagree; the flat format cannot express that.
            raise InvalidTreeError(
                [],
                f"key '{key}' would need both {entries[key]!r} and {value!r} "
                f"(conflicting duplicate of '{root.name}' subtree at {context})",
            )
        entries[key] = value

    def emit(node: ArgumentTreeNode, path: NodePath) -> None:
        for arg in node.descriptor.arguments:
            put(f"{{{node.req_key}#{node.index}}}.{arg.name}", node.values[arg.name], path)
        for req in node.descriptor.child_requirements:
            kids = node.children.get(req.key, [])
            put(req.key, ", ".join(k.name for k in kids), path)
            for kid in kids:
                emit(kid, path + ((req.key, kid.index),))

    put(root.req_key, root.name, ())
    emit(root, ())
    return ConfigDocument(entries)


def trees_equal(a: ArgumentTreeNode, b: ArgumentTreeNode) -> bool:
    """Structural equality: descriptor names, positions, values, child order."""
    if (a.name, a.req_key, a.index) != (b.name, b.req_key, b.index):
        return False
    if set(a.values) != set(b.values) or set(a.children) != set(b.children):
        return False
    for key, value in a.values.items():
        other = b.values[key]
        # bool == int would hide kind drift; require matching types too.
        if type(value) is not type(other) or value != other:
            return False
    for key, kids in a.children.items():
        others = b.children[key]
        if len(kids) != len(others):
            return False
        if not all(trees_equal(x, y) for x, y in zip(kids, others)):
            return False
    return True

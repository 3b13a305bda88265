"""One editing session: a mutable argument tree under a mutation lock.

The tree may be violating at any point (that is the normal editing state);
every successful mutation bumps the revision and recomputes the violation
list, so clients always see consistent (revision, tree, violations) triples.
Mutations carry the revision the client last saw and are rejected when it
is stale, which serializes concurrent editors without partial updates.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Optional

from ..config import ConfigDocument, default_env, expand_placeholders
from ..errors import (
    ArgTreeError,
    BuildError,
    CoercionError,
    MissingModuleError,
    UnknownModuleError,
    UnknownPlaceholderError,
)
from ..registry import Registry
from ..schema import ChildRequirementSpec, ModuleDescriptor, Scalar, coerce_value
from ..tree import (
    ArgumentTreeNode,
    build_tree,
    entry_kind_for,
    generate_config,
    validate_tree,
)
from ..violations import NodePath, Violation, ViolationCode


class SessionError(ArgTreeError):
    """A session operation failed; carries the HTTP status it maps to."""

    def __init__(self, status: int, detail: str, violations: Optional[list[Violation]] = None):
        self.status = status
        self.detail = detail
        self.violations = violations or []
        super().__init__(detail)


@dataclass
class SearchMatch:
    node_path: NodePath
    field: str  # module_name | arg_name | arg_value
    matched_text: str


class EditorSession:
    """Holds the tree being edited plus its revision and violation cache."""

    def __init__(
        self,
        registry: Registry,
        env: Optional[dict[str, str]] = None,
        entry_req: str = "cls_task",
        entry_kind: Optional[str] = None,
    ):
        self.registry = registry
        self.env = default_env()
        if env:
            self.env.update(env)
        self.entry_req = entry_req
        self.entry_kind = entry_kind or entry_kind_for(entry_req)
        self.root: Optional[ArgumentTreeNode] = None
        self.revision = 0
        self.last_violations: list[Violation] = []
        self.lock = threading.RLock()
        self._refresh_violations()

    # -- internals ------------------------------------------------------------

    def _entry_requirement(self) -> ChildRequirementSpec:
        return ChildRequirementSpec(self.entry_req, self.entry_kind)

    def _refresh_violations(self) -> None:
        if self.root is None:
            stub = self._entry_requirement()
            self.last_violations = [
                Violation(
                    ViolationCode.COUNT_VIOLATION,
                    f"{self.entry_req} requires exactly 1, found 0",
                    (),
                )
            ]
        else:
            self.last_violations = validate_tree(self.root)

    def _commit(self) -> None:
        self.revision += 1
        self._refresh_violations()

    def revalidate(self) -> None:
        with self.lock:
            self._refresh_violations()

    def _check_revision(self, expected: Optional[int]) -> None:
        if expected is not None and expected != self.revision:
            raise SessionError(
                409, f"stale revision {expected}; session is at {self.revision}"
            )

    def _node_at(self, path: NodePath) -> ArgumentTreeNode:
        if self.root is None:
            raise SessionError(404, "session has no root node yet")
        try:
            return self.root.child_at(tuple(path))
        except (KeyError, IndexError):
            raise SessionError(404, f"no node at path {list(path)}") from None

    def _default_values(self, descriptor: ModuleDescriptor) -> dict[str, Scalar]:
        values: dict[str, Scalar] = {}
        for arg in descriptor.arguments:
            value = coerce_value(arg, arg.default)
            if isinstance(value, str) and "{" in value:
                value = expand_placeholders(value, self.env)
            values[arg.name] = value
        return values

    def _fresh_node(self, descriptor: ModuleDescriptor, req_key: str, index: int) -> ArgumentTreeNode:
        return ArgumentTreeNode(
            descriptor,
            req_key,
            index,
            self._default_values(descriptor),
            {req.key: [] for req in descriptor.child_requirements},
        )

    def _checked_descriptor(self, class_name: str, req: ChildRequirementSpec) -> ModuleDescriptor:
        try:
            descriptor = self.registry.lookup(class_name)
        except MissingModuleError as err:
            raise SessionError(409, str(err)) from None
        except UnknownModuleError as err:
            raise SessionError(409, str(err)) from None
        if descriptor.kind != req.allowed_kind:
            raise SessionError(
                409,
                f"KindMismatch: '{descriptor.name}' has kind '{descriptor.kind}', "
                f"{req.key} needs '{req.allowed_kind}'",
            )
        if not descriptor.matches(req.allowed_kind, req.tag_filter):
            raise SessionError(
                409,
                f"TagMismatch: '{descriptor.name}' tags {descriptor.tags} "
                f"do not satisfy {req.tag_filter}",
            )
        return descriptor

    # -- mutations ------------------------------------------------------------

    def add_child(self, path: NodePath, req_key: str, class_name: str, revision=None) -> None:
        with self.lock:
            self._check_revision(revision)
            if self.root is None:
                if tuple(path):
                    raise SessionError(404, "session has no root node yet")
                if req_key != self.entry_req:
                    raise SessionError(
                        409, f"the first node must fill '{self.entry_req}', not '{req_key}'"
                    )
                descriptor = self._checked_descriptor(class_name, self._entry_requirement())
                self.root = self._fresh_node(descriptor, self.entry_req, 0)
                self._commit()
                return
            parent = self._node_at(path)
            try:
                req = parent.descriptor.requirement(req_key)
            except KeyError:
                if not tuple(path) and req_key == self.entry_req:
                    raise SessionError(
                        409, f"{self.entry_req} requires exactly 1, found 1"
                    ) from None
                raise SessionError(
                    404, f"'{parent.name}' declares no requirement '{req_key}'"
                ) from None
            siblings = parent.children.setdefault(req_key, [])
            if req.count_max is not None and len(siblings) >= req.count_max:
                raise SessionError(
                    409,
                    f"CountViolation: {req_key} allows at most {req.count_max}, "
                    f"already has {len(siblings)}",
                )
            descriptor = self._checked_descriptor(class_name, req)
            siblings.append(self._fresh_node(descriptor, req_key, len(siblings)))
            self._commit()

    def remove_child(self, path: NodePath, revision=None) -> None:
        with self.lock:
            self._check_revision(revision)
            path = tuple(path)
            if not path:
                if self.root is None:
                    raise SessionError(404, "session has no root node yet")
                self.root = None
                self._commit()
                return
            parent = self._node_at(path[:-1])
            req_key, index = path[-1]
            siblings = parent.children.get(req_key, [])
            if index < 0 or index >= len(siblings):
                raise SessionError(404, f"no node at path {list(path)}")
            del siblings[index]
            for i, node in enumerate(siblings):
                node.index = i
            self._commit()

    def set_arg(self, path: NodePath, arg_name: str, raw: Scalar, revision=None) -> None:
        with self.lock:
            self._check_revision(revision)
            node = self._node_at(path)
            try:
                spec = node.descriptor.argument(arg_name)
            except KeyError:
                raise SessionError(
                    404, f"'{node.name}' declares no argument '{arg_name}'"
                ) from None
            try:
                value = coerce_value(spec, raw)
                if isinstance(value, str) and "{" in value:
                    value = expand_placeholders(value, self.env)
            except (CoercionError, UnknownPlaceholderError) as err:
                raise SessionError(422, str(err)) from None
            node.values[arg_name] = value
            self._commit()

    def reset(self, revision=None) -> None:
        with self.lock:
            self._check_revision(revision)
            self.root = None
            self._commit()

    def load(self, config: dict, graft_path=None, revision=None) -> None:
        """Replace the whole tree, or the subtree at ``graft_path``, from a config."""
        with self.lock:
            self._check_revision(revision)
            graft = tuple(graft_path) if graft_path else ()
            if graft:
                target = self._node_at(graft)
                parent = self._node_at(graft[:-1])
                req = parent.descriptor.requirement(target.req_key)
                entry_req, entry_kind = target.req_key, req.allowed_kind
                self._check_graft_compatibility(dict(config), req)
            else:
                entry_req, entry_kind = self.entry_req, self.entry_kind
            doc = ConfigDocument(dict(config))
            try:
                new_root = build_tree(
                    self.registry, doc, self.env, entry_req=entry_req, entry_kind=entry_kind
                )
            except BuildError as err:
                raise SessionError(422, "config does not build", err.violations) from None
            if graft:
                parent = self._node_at(graft[:-1])
                req_key, index = graft[-1]
                new_root.index = index
                parent.children[req_key][index] = new_root
            else:
                new_root.index = 0
                self.root = new_root
            self._commit()

    def _check_graft_compatibility(self, config: dict, req: ChildRequirementSpec) -> None:
        # Incompatible grafts are invariant breaches (409), not value errors.
        names = ConfigDocument(dict(config)).get_used_classes(req.key)
        if len(names) != 1:
            return  # count problems surface as build violations
        try:
            descriptor = self.registry.lookup(names[0])
        except ArgTreeError:
            return  # unknown/missing surfaces as a build violation
        if descriptor.kind != req.allowed_kind or not descriptor.matches(
            req.allowed_kind, req.tag_filter
        ):
            raise SessionError(
                409,
                f"cannot graft '{descriptor.name}' (kind '{descriptor.kind}', "
                f"tags {descriptor.tags}) into {req.key}",
            )

    # -- reads ----------------------------------------------------------------

    def save(self, scope_path=None) -> ConfigDocument:
        """Serialize the tree (or the subtree at ``scope_path``) as a config."""
        with self.lock:
            if self.root is None and not scope_path:
                raise SessionError(
                    409, "tree has violations; fix them before saving", self.last_violations
                )
            node = self._node_at(tuple(scope_path or ()))
            subtree_violations = validate_tree(node)
            if subtree_violations:
                raise SessionError(
                    409, "subtree has violations; fix them before saving", subtree_violations
                )
            return generate_config(node)

    def search(self, query: str) -> list[SearchMatch]:
        """Case-insensitive substring search over names, keys, and values."""
        matches: list[SearchMatch] = []
        needle = query.lower()
        if not needle or self.root is None:
            return matches
        with self.lock:
            for path, node in self.root.walk():
                if needle in node.name.lower():
                    matches.append(SearchMatch(path, "module_name", node.name))
                if not path and needle in node.req_key.lower():
                    # the root's selecting key has no declaring node in the tree
                    matches.append(SearchMatch(path, "arg_name", node.req_key))
                for req in node.descriptor.child_requirements:
                    if needle in req.key.lower():
                        matches.append(SearchMatch(path, "arg_name", req.key))
                for arg in node.descriptor.arguments:
                    if needle in arg.name.lower():
                        matches.append(SearchMatch(path, "arg_name", arg.name))
                    text = str(node.values.get(arg.name, ""))
                    if needle in text.lower():
                        matches.append(SearchMatch(path, "arg_value", text))
        return matches

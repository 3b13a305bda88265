"""Request/response models for the editor API (JSON over HTTP, /api/v1)."""

from __future__ import annotations

from typing import Optional, Union

from pydantic import BaseModel, Field

from ..registry import Registry
from ..schema import ModuleDescriptor
from ..tree import ArgumentTreeNode
from ..violations import Violation

Scalar = Union[bool, int, float, str]
# Node addresses travel as arrays of [requirement key, index] pairs.
Path = list[tuple[str, int]]


class ArgumentModel(BaseModel):
    name: str
    kind: str
    default: Scalar
    help: str = ""
    choices: list[str] = Field(default_factory=list)


class RequirementModel(BaseModel):
    key: str
    kind: str
    tags: dict[str, Union[bool, str]] = Field(default_factory=dict)
    count_min: int
    count_max: Optional[int] = None  # None: unbounded


class DescriptorModel(BaseModel):
    name: str
    kind: str
    tags: dict[str, Union[bool, str]] = Field(default_factory=dict)
    help: str = ""
    source: str = ""
    arguments: list[ArgumentModel] = Field(default_factory=list)
    child_requirements: list[RequirementModel] = Field(default_factory=list)

    @classmethod
    def from_descriptor(cls, d: ModuleDescriptor) -> "DescriptorModel":
        return cls(
            name=d.name,
            kind=d.kind,
            tags=dict(d.tags),
            help=d.help,
            source=d.source,
            arguments=[
                ArgumentModel(
                    name=a.name,
                    kind=a.value_kind.value,
                    default=a.default,
                    help=a.help,
                    choices=list(a.choices),
                )
                for a in d.arguments
            ],
            child_requirements=[
                RequirementModel(
                    key=r.key,
                    kind=r.allowed_kind,
                    tags=dict(r.tag_filter),
                    count_min=r.count_min,
                    count_max=r.count_max,
                )
                for r in d.child_requirements
            ],
        )


class RegistryModel(BaseModel):
    descriptors: list[DescriptorModel]
    missing: dict[str, str]

    @classmethod
    def from_registry(cls, registry: Registry) -> "RegistryModel":
        return cls(
            descriptors=[DescriptorModel.from_descriptor(d) for d in registry.descriptors()],
            missing=registry.missing(),
        )


class ViolationModel(BaseModel):
    code: str
    path: Path
    detail: str

    @classmethod
    def from_violation(cls, v: Violation) -> "ViolationModel":
        return cls(code=v.code.value, path=[list(step) for step in v.path], detail=v.detail)


class TreeNodeModel(BaseModel):
    name: str
    kind: str
    req_key: str
    index: int
    values: dict[str, Scalar]
    requirements: list[RequirementModel]
    children: dict[str, list["TreeNodeModel"]]

    @classmethod
    def from_node(cls, node: ArgumentTreeNode) -> "TreeNodeModel":
        return cls(
            name=node.name,
            kind=node.descriptor.kind,
            req_key=node.req_key,
            index=node.index,
            values=dict(node.values),
            requirements=[
                RequirementModel(
                    key=r.key,
                    kind=r.allowed_kind,
                    tags=dict(r.tag_filter),
                    count_min=r.count_min,
                    count_max=r.count_max,
                )
                for r in node.descriptor.child_requirements
            ],
            children={
                key: [cls.from_node(child) for child in kids]
                for key, kids in node.children.items()
            },
        )


class SessionStateModel(BaseModel):
    revision: int
    entry_req: str
    entry_kind: str
    root: Optional[TreeNodeModel]
    violations: list[ViolationModel]


class SearchMatchModel(BaseModel):
    node_path: Path
    field: str
    matched_text: str


class SearchResponse(BaseModel):
    query: str
    matches: list[SearchMatchModel]


class ConfigResponse(BaseModel):
    config: dict[str, Scalar]


class ErrorResponse(BaseModel):
    detail: str
    violations: list[ViolationModel] = Field(default_factory=list)


# -- mutation requests (all carry the revision the client last saw) ----------


class AddChildRequest(BaseModel):
    path: Path = Field(default_factory=list)
    req_key: str
    class_name: str
    revision: Optional[int] = None


class RemoveChildRequest(BaseModel):
    path: Path
    revision: Optional[int] = None


class SetArgRequest(BaseModel):
    path: Path = Field(default_factory=list)
    arg_name: str
    value: Scalar
    revision: Optional[int] = None


class SaveRequest(BaseModel):
    scope_path: Optional[Path] = None


class LoadRequest(BaseModel):
    config: dict[str, Scalar]
    graft_path: Optional[Path] = None
    revision: Optional[int] = None


class ResetRequest(BaseModel):
    revision: Optional[int] = None

"""Structural demo modules: cells and candidate operations.

These exist to exercise hierarchical state export/import and finalization:
cells wrap operations, a candidate group holds several interchangeable
operations until a selection picks the survivors, and a stabilized skip
substitutes a plain skip connection when finalized.
"""

from __future__ import annotations

from ..schema import ValueKind
from ..state import (
    EMPTY_SELECTION,
    BuildableModule,
    ModuleState,
    SelectionProvider,
)
from .modules import arg, demo_module, req

STRUCTURE_KINDS = ("cell", "op")


@demo_module(
    kind="cell",
    args=[
        arg("features_mult", ValueKind.INTEGER, 1, "channel multiplier"),
        arg("features_fixed", ValueKind.INTEGER, -1, "fixed channel count (-1: keep input)"),
    ],
    requires=[req("cls_op", "op")],
)
class SingleLayerCell(BuildableModule):
    """A cell holding exactly one operation."""

    def __init__(self, features_mult: int = 1, features_fixed: int = -1, op=None):
        super().__init__(features_mult=features_mult, features_fixed=features_fixed)
        if op is None:
            raise ValueError("SingleLayerCell needs an op")
        self.op = op

    def submodules(self):
        return {"op": self.op}


@demo_module(
    kind="op",
    args=[
        arg("kernel_size", ValueKind.INTEGER, 3),
        arg("kernel_size_in", ValueKind.INTEGER, 1),
        arg("kernel_size_out", ValueKind.INTEGER, 1),
        arg("stride", ValueKind.INTEGER, 1),
        arg("expansion", ValueKind.REAL, 6.0, "hidden width factor"),
        arg("padding", ValueKind.STRING, "same", "", ("same", "valid")),
        arg("dilation", ValueKind.INTEGER, 1),
        arg("bn_affine", ValueKind.BOOLEAN, "True"),
        arg("act_fun", ValueKind.STRING, "relu6", "", ("relu", "relu6", "swish")),
        arg("act_inplace", ValueKind.BOOLEAN, "True"),
        arg("fused", ValueKind.BOOLEAN, "False"),
    ],
)
class MobileInvConvLayer(BuildableModule):
    """Inverted-bottleneck style operation (parameters only, no tensors)."""

    def __init__(
        self,
        kernel_size: int = 3,
        kernel_size_in: int = 1,
        kernel_size_out: int = 1,
        stride: int = 1,
        expansion: float = 6.0,
        padding: str = "same",
        dilation: int = 1,
        bn_affine: bool = True,
        act_fun: str = "relu6",
        act_inplace: bool = True,
        fused: bool = False,
    ):
        super().__init__(
            kernel_size=kernel_size,
            kernel_size_in=kernel_size_in,
            kernel_size_out=kernel_size_out,
            stride=stride,
            expansion=expansion,
            padding=padding,
            dilation=dilation,
            bn_affine=bn_affine,
            act_fun=act_fun,
            act_inplace=act_inplace,
            fused=fused,
        )


@demo_module(kind="op")
class SkipConnection(BuildableModule):
    """Pass the input through unchanged."""

    def __init__(self):
        super().__init__()


@demo_module(
    kind="op",
    args=[arg("features", ValueKind.INTEGER, 16, "width of the stabilizing linear map")],
)
class LinearSkip(BuildableModule):
    """A skip stabilized by a linear map while over-complete.

    Finalization exports a plain :class:`SkipConnection` instead of itself,
    so the stabilizer disappears from the finalized structure.
    """

    def __init__(self, features: int = 16):
        super().__init__(features=features)
        self.features = features

    def finalize_substitute(self, selections: SelectionProvider):
        return SkipConnection().state_config()


@demo_module(
    kind="op",
    args=[arg("name", ValueKind.STRING, "choice", "selection key for finalization")],
)
class CandidateChoice(BuildableModule):
    """Holds several interchangeable candidate operations.

    While over-complete the full candidate list is exported; a finalizing
    export keeps only the selected indices, and a single survivor replaces
    the group entirely.
    """

    def __init__(self, name: str = "choice", candidates=()):
        super().__init__(name=name)
        self.choice_name = name
        self.candidates = list(candidates)

    def submodules(self):
        return {"candidates": self.candidates}

    def state_config(
        self, finalize: bool = False, selections: SelectionProvider = EMPTY_SELECTION
    ) -> ModuleState:
        if not finalize:
            return super().state_config(finalize, selections)
        indices = selections.indices_for(self.choice_name, len(self.candidates))
        chosen = [self.candidates[i] for i in indices]
        if len(chosen) == 1:
            return chosen[0].state_config(finalize, selections)
        return ModuleState(
            self.module_name,
            dict(self._kwargs),
            {"candidates": [m.state_config(finalize, selections) for m in chosen]},
        )

"""argtree: compose experiments from self-describing modules.

Modules declare their hyper-parameters and the child module kinds they
need; a flat JSON configuration selects and parameterizes them; a recursive
builder validates everything and produces an argument tree that can be
instantiated, documented, serialized, regenerated, and edited interactively
through a web service.
"""

from .config import (
    ConfigDocument,
    default_env,
    expand_placeholders,
    parse_document,
    parse_overrides,
)
from .errors import (
    AmbiguousValueError,
    ArgTreeError,
    BuildError,
    CoercionError,
    ConfigSyntaxError,
    ConstructionError,
    DuplicateNameError,
    InvalidDescriptorError,
    InvalidTreeError,
    MalformedKeyError,
    MissingModuleError,
    MissingSelectionError,
    NonScalarValueError,
    RuntimeFailure,
    SelectionIndexError,
    UnknownModuleError,
    UnknownPlaceholderError,
)
from .registry import Registry
from .render import docgen, to_dot
from .schema import (
    UNBOUNDED,
    ArgumentSpec,
    ChildRequirementSpec,
    ModuleDescriptor,
    ValueKind,
    coerce_value,
    validate_descriptor,
)
from .state import (
    BuildableModule,
    ModuleState,
    SelectionProvider,
    canonical_serialize,
    export_state,
    import_state,
    parse_state,
)
from .tree import (
    ArgumentTreeNode,
    build_tree,
    entry_kind_for,
    generate_config,
    trees_equal,
    validate_tree,
)
from .violations import Violation, ViolationCode

__version__ = "0.1.0"

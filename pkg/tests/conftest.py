import os
from pathlib import Path

import pytest

from argtree import parse_document
from argtree.demo import build_demo_registry

# tests assume the optional plugin is absent unless they opt in via monkeypatch
os.environ.pop("ARGTREE_ENABLE_EXTRAS", None)

REPO_ROOT = Path(__file__).resolve().parent.parent
CONFIG_DIR = REPO_ROOT / "configs"
DATA_DIR = Path(__file__).resolve().parent / "data"


def load_config(name: str):
    return parse_document((CONFIG_DIR / name).read_bytes())


@pytest.fixture(scope="session")
def registry():
    # frozen and immutable, safe to share across the whole test session
    return build_demo_registry()


@pytest.fixture
def env(tmp_path):
    return {"path_tmp": str(tmp_path)}

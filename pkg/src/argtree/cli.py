"""Command-line entry point.

Exit codes are a stable scripting contract: 0 success, 1 environment or
I/O trouble, 2 validation or build failure. Human-facing output goes to
stderr; machine-readable artifacts go to files or stdout.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .config import load_document, parse_overrides
from .demo import build_demo_registry, run_tree
from .errors import ArgTreeError, BuildError
from .registry import Registry
from .render import docgen, to_dot
from .tree import build_tree, entry_kind_for, generate_config

EXIT_OK = 0
EXIT_IO = 1
EXIT_INVALID = 2


def say(text: str) -> None:
    click.echo(text, err=True)


def _parse_env(pairs: tuple[str, ...]) -> dict[str, str]:
    env = {}
    for pair in pairs:
        name, sep, value = pair.partition("=")
        if not sep or not name:
            raise click.BadParameter(f"expected name=value, got '{pair}'")
        env[name] = value
    return env


def _parse_tags(pairs: tuple[str, ...]) -> dict:
    tags = {}
    for pair in pairs:
        name, sep, value = pair.partition("=")
        if not sep:
            tags[pair] = True
        elif value in ("true", "True"):
            tags[name] = True
        elif value in ("false", "False"):
            tags[name] = False
        else:
            tags[name] = value
    return tags


def _build_from_file(registry: Registry, config_path: str, overrides, env, entry):
    doc = load_document(config_path, parse_overrides(overrides))
    return build_tree(registry, doc, env, entry_req=entry, entry_kind=entry_kind_for(entry))


def _write_or_stdout(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
        say(f"wrote {out}")
    else:
        click.echo(text, nl=False)


set_option = click.option(
    "--set", "overrides", multiple=True, metavar="KEY=VALUE",
    help="Override one config entry (repeatable, later wins).",
)
env_option = click.option(
    "--env", "env_pairs", multiple=True, metavar="NAME=VALUE",
    help="Add a value-placeholder binding (repeatable).",
)
entry_option = click.option(
    "--entry", default="cls_task", show_default=True,
    help="Entry requirement key; its kind is the key minus 'cls_'.",
)


@click.group()
def main() -> None:
    """Compose, validate, run, and document module-tree experiments."""


@main.command("validate")
@click.argument("config_path", type=click.Path())
@set_option
@env_option
@entry_option
def cmd_validate(config_path, overrides, env_pairs, entry) -> None:
    """Build the tree a config describes and report every violation."""
    registry = build_demo_registry()
    try:
        root = _build_from_file(registry, config_path, overrides, _parse_env(env_pairs), entry)
    except BuildError as err:
        for violation in err.violations:
            say(violation.render())
        sys.exit(EXIT_INVALID)
    except (OSError, ArgTreeError) as err:
        say(f"error: {err}")
        sys.exit(EXIT_IO)
    say(f"OK: {root.node_count()} nodes")
    sys.exit(EXIT_OK)


@main.command("run")
@click.argument("config_path", type=click.Path())
@set_option
@env_option
@entry_option
def cmd_run(config_path, overrides, env_pairs, entry) -> None:
    """Build, instantiate, and execute; artifacts land in the task's save_dir."""
    registry = build_demo_registry()
    try:
        root = _build_from_file(registry, config_path, overrides, _parse_env(env_pairs), entry)
    except BuildError as err:
        for violation in err.violations:
            say(violation.render())
        sys.exit(EXIT_INVALID)
    except (OSError, ArgTreeError) as err:
        say(f"error: {err}")
        sys.exit(EXIT_IO)
    try:
        report, _ = run_tree(registry, root, line_callback=say)
    except ArgTreeError as err:
        say(f"run failed: {err}")
        sys.exit(EXIT_INVALID)
    say(f"epochs run: {report.epochs_run}, final loss: {report.final_loss:.6g}")
    if report.checkpoint_path:
        say(f"best checkpoint: {report.checkpoint_path}")
    sys.exit(EXIT_OK)


@main.command("list")
@click.option("--kind", default=None, help="Only this module kind.")
@click.option("--tag", "tags", multiple=True, metavar="NAME[=VALUE]",
              help="Require a descriptor tag (repeatable).")
def cmd_list(kind, tags) -> None:
    """List registered modules (stdout, one per line)."""
    registry = build_demo_registry()
    tag_filter = _parse_tags(tags)
    kinds = [kind] if kind else registry.kinds()
    for k in kinds:
        for descriptor in registry.filter(k, tag_filter):
            tag_text = f" tags={descriptor.tags}" if descriptor.tags else ""
            click.echo(f"{descriptor.name}  ({descriptor.kind}){tag_text}")
    missing = registry.missing()
    if not kind and not tags and missing:
        for name in sorted(missing):
            say(f"missing: {name}  ({missing[name]})")
    sys.exit(EXIT_OK)


@main.command("docgen")
@click.option("--out", default=None, type=click.Path(), help="Write to a file instead of stdout.")
def cmd_docgen(out) -> None:
    """Emit the exhaustive module/argument listing."""
    try:
        _write_or_stdout(docgen(build_demo_registry()), out)
    except OSError as err:
        say(f"error: {err}")
        sys.exit(EXIT_IO)
    sys.exit(EXIT_OK)


@main.command("tree")
@click.argument("config_path", type=click.Path())
@click.option("--dot", "dot_path", default=None, type=click.Path(),
              help="Write Graphviz DOT here instead of stdout.")
@set_option
@env_option
@entry_option
def cmd_tree(config_path, dot_path, overrides, env_pairs, entry) -> None:
    """Render the tree a config describes as Graphviz DOT."""
    registry = build_demo_registry()
    try:
        root = _build_from_file(registry, config_path, overrides, _parse_env(env_pairs), entry)
    except BuildError as err:
        for violation in err.violations:
            say(violation.render())
        sys.exit(EXIT_INVALID)
    except (OSError, ArgTreeError) as err:
        say(f"error: {err}")
        sys.exit(EXIT_IO)
    try:
        _write_or_stdout(to_dot(root), dot_path)
    except OSError as err:
        say(f"error: {err}")
        sys.exit(EXIT_IO)
    sys.exit(EXIT_OK)


@main.command("generate")
@click.argument("config_path", type=click.Path())
@click.option("--out", default=None, type=click.Path(), help="Write to a file instead of stdout.")
@set_option
@env_option
@entry_option
def cmd_generate(config_path, out, overrides, env_pairs, entry) -> None:
    """Regenerate the canonical (complete, sparse) config for a valid tree."""
    registry = build_demo_registry()
    try:
        root = _build_from_file(registry, config_path, overrides, _parse_env(env_pairs), entry)
        canonical = generate_config(root)
    except BuildError as err:
        for violation in err.violations:
            say(violation.render())
        sys.exit(EXIT_INVALID)
    except (OSError, ArgTreeError) as err:
        say(f"error: {err}")
        sys.exit(EXIT_IO)
    try:
        _write_or_stdout(canonical.to_json_text(), out)
    except OSError as err:
        say(f"error: {err}")
        sys.exit(EXIT_IO)
    sys.exit(EXIT_OK)


@main.command("serve")
@click.option("--port", default=8765, show_default=True, type=int)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--frontend", "frontend_dir", default=None, type=click.Path(),
              help="Directory of built frontend assets (default: ./frontend/dist).")
@env_option
@entry_option
def cmd_serve(port, host, frontend_dir, env_pairs, entry) -> None:
    """Start the web editor backend (and frontend, when built)."""
    import uvicorn

    from .server import create_app

    app = create_app(env=_parse_env(env_pairs), entry_req=entry, frontend_dir=frontend_dir)
    say(f"serving editor on http://{host}:{port}/")
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()

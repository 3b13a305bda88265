"""Turning validated trees into running tasks and reports."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

from ..config import ConfigDocument
from ..errors import ArgTreeError, ConstructionError, InvalidTreeError, RuntimeFailure
from ..registry import Registry
from ..schema import REQUIREMENT_PREFIX
from ..tree import ArgumentTreeNode, generate_config, validate_tree
from ..violations import NodePath, path_text
from .modules import CheckpointCallback, SingleSearchTask


@dataclass
class RunReport:
    """What one task execution produced."""

    epochs_run: int
    final_loss: float
    checkpoint_path: str
    log_lines: list[str]
    structure_overview: str


class Logbook:
    """Collects run log lines, mirrors them to a file and an optional callback."""

    def __init__(self, path: Path, line_callback: Optional[Callable[[str], None]] = None):
        self.lines: list[str] = []
        self._callback = line_callback
        self._fh = open(path, "w", encoding="utf-8")

    def log(self, text: str) -> None:
        line = f"[{time.strftime('%H:%M:%S')}] {text}"
        self.lines.append(line)
        self._fh.write(line + "\n")
        self._fh.flush()
        if self._callback is not None:
            self._callback(line)

    def close(self) -> None:
        self._fh.close()


@dataclass
class RunContext:
    """Shared handles passed to loggers and callbacks during a run."""

    save_dir: Path
    logbook: Logbook
    seed: int
    is_test_run: bool
    overview_lines: list[str] = field(default_factory=list)
    stop_reason: Optional[str] = None

    def log(self, text: str) -> None:
        self.logbook.log(text)

    def request_stop(self, reason: str) -> None:
        self.stop_reason = reason


def instantiate(registry: Registry, root: ArgumentTreeNode):
    """Construct the module graph a tree describes, children before parents.

    Child modules are injected into their parent's constructor under the
    requirement key minus its prefix (``cls_callbacks`` -> ``callbacks``);
    single-slot requirements pass the instance (or None), unbounded ones a
    list. Fails without partial construction if the tree has violations.
    """
    violations = validate_tree(root)
    if violations:
        raise InvalidTreeError(violations, "cannot instantiate")

    def build(node: ArgumentTreeNode, path: NodePath):
        params = dict(node.values)
        for req in node.descriptor.child_requirements:
            kids = [
                build(child, path + ((req.key, child.index),))
                for child in node.children.get(req.key, ())
            ]
            name = req.key[len(REQUIREMENT_PREFIX):]
            if req.count_max == 1:
                params[name] = kids[0] if kids else None
            else:
                params[name] = kids
        try:
            constructor = registry.constructor(node.name)
            module = constructor(**params)
        except ArgTreeError:
            raise
        except Exception as err:
            raise ConstructionError(node.name, str(err), path_text(path)) from err
        module.path_name = path_text(path)
        return module

    return build(root, ((root.req_key, root.index),))


def execute_task(task: SingleSearchTask, line_callback=None) -> RunReport:
    """Run an instantiated task and assemble its report."""
    save_dir = Path(task.save_dir)
    save_dir.mkdir(parents=True, exist_ok=True)
    logbook = Logbook(save_dir / "log.txt", line_callback)
    ctx = RunContext(save_dir, logbook, task.seed, task.is_test_run)
    ctx.overview_lines = task.structure_lines()
    try:
        logbook.log(f"task: {type(task).__name__} (seed={task.seed}, test_run={task.is_test_run})")
        if task.note:
            logbook.log(f"note: {task.note}")
        logbook.log(f"device: {task.device.describe()}")
        if task.method is None:
            logbook.log("no method selected; epochs run idle")
        epochs_run, last_metrics = task.trainer.train(ctx, task.method)

        if "train/loss" in last_metrics:
            final_loss = float(last_metrics["train/loss"])
        elif task.method is not None:
            final_loss = task.method.current_loss()
        else:
            final_loss = 0.0
        checkpoint_path = ""
        for callback in task.trainer.callbacks:
            if isinstance(callback, CheckpointCallback) and callback.best_checkpoint():
                checkpoint_path = callback.best_checkpoint()
                break
        logbook.log(f"done: {epochs_run} epoch(s), final loss {final_loss:.6g}")
        return RunReport(
            epochs_run=epochs_run,
            final_loss=final_loss,
            checkpoint_path=checkpoint_path,
            log_lines=list(logbook.lines),
            structure_overview="\n".join(ctx.overview_lines),
        )
    except RuntimeFailure:
        raise
    except ArgTreeError:
        raise
    except Exception as err:
        raise RuntimeFailure(task.path_name or "cls_task#0", err) from err
    finally:
        logbook.close()


def run(task: SingleSearchTask) -> RunReport:
    return task.run()


def run_tree(
    registry: Registry,
    root: ArgumentTreeNode,
    line_callback=None,
) -> tuple[RunReport, ConfigDocument]:
    """Full pipeline: canonical config into save_dir, instantiate, run."""
    doc = generate_config(root)
    task = instantiate(registry, root)
    if not callable(getattr(task, "run", None)):
        raise ConstructionError(root.name, "root module is not runnable (it exposes no run())")
    save_dir = Path(task.save_dir)
    save_dir.mkdir(parents=True, exist_ok=True)
    (save_dir / "config.json").write_text(doc.to_json_text(), encoding="utf-8")
    report = task.run(line_callback)
    return report, doc

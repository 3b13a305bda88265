"""Demo experiment modules: a runnable toy domain.

The module set mirrors a small training stack (task -> device/trainer/method,
trainer -> callbacks/loggers, method -> optimizer/scheduler/objective) but the
"training" is scalar minimization of an analytic objective, so instantiation,
callbacks, logging, and checkpointing are exercised for real without any
heavy machinery.
"""

from __future__ import annotations

import math
import random
import tempfile
from typing import Optional

from ..schema import (
    ArgumentSpec,
    ChildRequirementSpec,
    ModuleDescriptor,
    UNBOUNDED,
    ValueKind,
)
from ..state import STATE_FILE_SUFFIX, BuildableModule, canonical_json_bytes, export_state

DEMO_MODULES: list[tuple[ModuleDescriptor, type]] = []


def arg(name: str, kind: ValueKind, default, help: str = "", choices=()) -> ArgumentSpec:
    return ArgumentSpec(name, kind, default, help, tuple(choices))


def req(key: str, kind: str, count_min: int = 1, count_max=1, tags=None) -> ChildRequirementSpec:
    return ChildRequirementSpec(key, kind, dict(tags or {}), count_min, count_max)


def demo_module(kind: str, tags=None, args=(), requires=()):
    """Register the decorated class in the demo module list."""

    def wrap(cls):
        doc = (cls.__doc__ or "").strip()
        descriptor = ModuleDescriptor(
            name=cls.__name__,
            kind=kind,
            tags=dict(tags or {}),
            arguments=tuple(args),
            child_requirements=tuple(requires),
            source=cls.__module__,
            help=doc.splitlines()[0] if doc else "",
        )
        DEMO_MODULES.append((descriptor, cls))
        return cls

    return wrap


# ---------------------------------------------------------------------------
# objectives (kind "data": stands in for a data set)
# ---------------------------------------------------------------------------


@demo_module(
    kind="data",
    args=[arg("target", ValueKind.REAL, 3.0, "minimum location of (x - target)^2")],
)
class QuadraticObjective(BuildableModule):
    """Convex scalar objective with a known minimum."""

    def __init__(self, target: float = 3.0):
        super().__init__(target=target)
        self.target = target

    def loss(self, x: float) -> float:
        return (x - self.target) ** 2

    def grad(self, x: float) -> float:
        return 2.0 * (x - self.target)


# ---------------------------------------------------------------------------
# optimizers and schedulers
# ---------------------------------------------------------------------------


@demo_module(
    kind="optimizer",
    args=[
        arg("lr", ValueKind.REAL, 0.01, "step size"),
        arg("momentum", ValueKind.REAL, 0.0, "velocity retention per step"),
    ],
)
class SGDOptimizer(BuildableModule):
    """Plain gradient descent with optional momentum."""

    def __init__(self, lr: float = 0.01, momentum: float = 0.0):
        super().__init__(lr=lr, momentum=momentum)
        self.lr = lr
        self.momentum = momentum
        self._velocity = 0.0

    def step(self, x: float, grad: float, scale: float = 1.0) -> float:
        self._velocity = self.momentum * self._velocity + grad
        return x - self.lr * scale * self._velocity


@demo_module(
    kind="optimizer",
    args=[
        arg("lr", ValueKind.REAL, 0.001, "step size"),
        arg("beta1", ValueKind.REAL, 0.9, "first-moment decay"),
        arg("beta2", ValueKind.REAL, 0.999, "second-moment decay"),
    ],
)
class AdamOptimizer(BuildableModule):
    """Scalar Adam with bias correction."""

    def __init__(self, lr: float = 0.001, beta1: float = 0.9, beta2: float = 0.999):
        super().__init__(lr=lr, beta1=beta1, beta2=beta2)
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self._m = 0.0
        self._v = 0.0
        self._t = 0

    def step(self, x: float, grad: float, scale: float = 1.0) -> float:
        self._t += 1
        self._m = self.beta1 * self._m + (1 - self.beta1) * grad
        self._v = self.beta2 * self._v + (1 - self.beta2) * grad * grad
        m_hat = self._m / (1 - self.beta1 ** self._t)
        v_hat = self._v / (1 - self.beta2 ** self._t)
        return x - self.lr * scale * m_hat / (math.sqrt(v_hat) + 1e-8)


@demo_module(
    kind="scheduler",
    args=[arg("min_factor", ValueKind.REAL, 0.0, "final fraction of the base step size")],
)
class CosineScheduler(BuildableModule):
    """Cosine decay of the step-size factor from 1 to min_factor."""

    def __init__(self, min_factor: float = 0.0):
        super().__init__(min_factor=min_factor)
        self.min_factor = min_factor

    def factor(self, step: int, total: int) -> float:
        progress = min(max(step / max(total, 1), 0.0), 1.0)
        return self.min_factor + 0.5 * (1 - self.min_factor) * (1 + math.cos(math.pi * progress))


@demo_module(
    kind="scheduler",
    args=[
        arg("step_size", ValueKind.INTEGER, 30, "steps between decays"),
        arg("gamma", ValueKind.REAL, 0.1, "multiplicative decay per stage"),
    ],
)
class StepScheduler(BuildableModule):
    """Staircase decay of the step-size factor."""

    def __init__(self, step_size: int = 30, gamma: float = 0.1):
        super().__init__(step_size=step_size, gamma=gamma)
        self.step_size = step_size
        self.gamma = gamma

    def factor(self, step: int, total: int) -> float:
        return self.gamma ** (step // max(self.step_size, 1))


# ---------------------------------------------------------------------------
# search methods
# ---------------------------------------------------------------------------


class _Method(BuildableModule):
    """Shared scaffolding: every method exposes prepare/run_epoch/current state."""

    def __init__(self, data=None, **kwargs):
        super().__init__(**kwargs)
        self.data = data
        self.objective = data if data is not None else QuadraticObjective()
        self.current_x = 0.0

    def submodules(self):
        subs = {}
        if self.data is not None:
            subs["data"] = self.data
        return subs

    def prepare(self, seed: int, planned_epochs: int) -> None:
        raise NotImplementedError

    def run_epoch(self, epoch: int) -> dict[str, float]:
        raise NotImplementedError

    def current_loss(self) -> float:
        return self.objective.loss(self.current_x)

    def param_state(self) -> dict[str, float]:
        return {"x": self.current_x}


@demo_module(
    kind="method",
    tags={"search": True},
    args=[
        arg("x0", ValueKind.REAL, 0.0, "starting point"),
        arg("steps_per_epoch", ValueKind.INTEGER, 1, "optimizer steps per epoch"),
    ],
    requires=[
        req("cls_optimizer", "optimizer"),
        req("cls_scheduler", "scheduler", 0, 1),
        req("cls_data", "data", 0, 1),
    ],
)
class GradientDescentMethod(_Method):
    """Minimize the objective by following its gradient."""

    def __init__(self, x0=0.0, steps_per_epoch=1, optimizer=None, scheduler=None, data=None):
        super().__init__(data=data, x0=x0, steps_per_epoch=steps_per_epoch)
        if optimizer is None:
            raise ValueError("GradientDescentMethod needs an optimizer")
        self.x0 = x0
        self.steps_per_epoch = steps_per_epoch
        self.optimizer = optimizer
        self.scheduler = scheduler

    def submodules(self):
        subs = {"optimizer": self.optimizer}
        if self.scheduler is not None:
            subs["scheduler"] = self.scheduler
        subs.update(super().submodules())
        return subs

    def prepare(self, seed: int, planned_epochs: int) -> None:
        self.current_x = self.x0
        self._step_no = 0
        self._total_steps = max(planned_epochs * max(self.steps_per_epoch, 1), 1)

    def run_epoch(self, epoch: int) -> dict[str, float]:
        for _ in range(self.steps_per_epoch):
            self._step_no += 1
            scale = 1.0
            if self.scheduler is not None:
                scale = self.scheduler.factor(self._step_no, self._total_steps)
            grad = self.objective.grad(self.current_x)
            self.current_x = self.optimizer.step(self.current_x, grad, scale)
        return {"train/loss": self.current_loss(), "train/x": self.current_x}


@demo_module(
    kind="method",
    tags={"search": True},
    args=[
        arg("low", ValueKind.REAL, -10.0, "lower bound of the sampled interval"),
        arg("high", ValueKind.REAL, 10.0, "upper bound of the sampled interval"),
        arg("samples_per_epoch", ValueKind.INTEGER, 8, "uniform draws per epoch"),
    ],
    requires=[req("cls_data", "data", 0, 1)],
)
class UniformRandomMethod(_Method):
    """Uniform random search over an interval, keeping the best point."""

    def __init__(self, low=-10.0, high=10.0, samples_per_epoch=8, data=None):
        super().__init__(data=data, low=low, high=high, samples_per_epoch=samples_per_epoch)
        self.low = low
        self.high = high
        self.samples_per_epoch = samples_per_epoch

    def prepare(self, seed: int, planned_epochs: int) -> None:
        self._rng = random.Random(seed)
        self.current_x = self.low
        self._best_loss = self.current_loss()

    def run_epoch(self, epoch: int) -> dict[str, float]:
        for _ in range(self.samples_per_epoch):
            x = self._rng.uniform(self.low, self.high)
            loss = self.objective.loss(x)
            if loss < self._best_loss:
                self._best_loss = loss
                self.current_x = x
        return {"train/loss": self._best_loss, "train/x": self.current_x}


@demo_module(
    kind="method",
    args=[arg("x", ValueKind.REAL, 0.0, "fixed point to evaluate")],
    requires=[req("cls_data", "data", 0, 1)],
)
class StaticEvalMethod(_Method):
    """Evaluate the objective at one fixed point; no search capability."""

    def __init__(self, x=0.0, data=None):
        super().__init__(data=data, x=x)
        self.x = x

    def prepare(self, seed: int, planned_epochs: int) -> None:
        self.current_x = self.x

    def run_epoch(self, epoch: int) -> dict[str, float]:
        return {"train/loss": self.current_loss(), "train/x": self.current_x}


# ---------------------------------------------------------------------------
# devices
# ---------------------------------------------------------------------------


@demo_module(
    kind="device",
    args=[arg("num_devices", ValueKind.INTEGER, 1, "worker count to simulate")],
)
class CpuDevicesManager(BuildableModule):
    """Run on local CPU workers."""

    def __init__(self, num_devices: int = 1):
        super().__init__(num_devices=num_devices)
        if num_devices < 1:
            raise ValueError("num_devices must be >= 1")
        self.num_devices = num_devices

    def describe(self) -> str:
        return f"cpu x{self.num_devices}"


@demo_module(
    kind="device",
    args=[
        arg("num_devices", ValueKind.INTEGER, 1, "accelerator count to simulate"),
        arg("use_cudnn", ValueKind.BOOLEAN, "True", "pretend cudnn is enabled"),
        arg("use_cudnn_benchmark", ValueKind.BOOLEAN, "True", "pretend benchmark mode is on"),
    ],
)
class CudaDevicesManager(BuildableModule):
    """Simulated accelerator manager; validates settings, touches no GPU."""

    def __init__(self, num_devices: int = 1, use_cudnn: bool = True, use_cudnn_benchmark: bool = True):
        super().__init__(
            num_devices=num_devices,
            use_cudnn=use_cudnn,
            use_cudnn_benchmark=use_cudnn_benchmark,
        )
        if num_devices < 1:
            raise ValueError("num_devices must be >= 1")
        self.num_devices = num_devices
        self.use_cudnn = use_cudnn
        self.use_cudnn_benchmark = use_cudnn_benchmark

    def describe(self) -> str:
        return (
            f"cuda[simulated] x{self.num_devices} "
            f"(cudnn={self.use_cudnn}, benchmark={self.use_cudnn_benchmark})"
        )


# ---------------------------------------------------------------------------
# loggers and callbacks
# ---------------------------------------------------------------------------


@demo_module(
    kind="logger",
    args=[arg("log_graph", ValueKind.BOOLEAN, "False", "also log the module structure table")],
)
class FileExpLogger(BuildableModule):
    """Write every epoch's metrics into the run log."""

    def __init__(self, log_graph: bool = False):
        super().__init__(log_graph=log_graph)
        self.log_graph = log_graph

    def on_run_start(self, ctx) -> None:
        if self.log_graph:
            for line in ctx.overview_lines:
                ctx.log(f"[structure] {line}")

    def on_metrics(self, ctx, epoch: int, metrics: dict) -> None:
        parts = " ".join(f"{key}={value:.6g}" for key, value in metrics.items())
        ctx.log(f"epoch {epoch}: {parts}")


@demo_module(
    kind="callback",
    args=[
        arg("top_n", ValueKind.INTEGER, 1, "how many checkpoints to keep"),
        arg("key", ValueKind.STRING, "train/loss", "metric that ranks checkpoints"),
        arg("minimize_key", ValueKind.BOOLEAN, "True", "smaller metric is better"),
    ],
)
class CheckpointCallback(BuildableModule):
    """Persist the best-ranked method states, pruning the rest."""

    def __init__(self, top_n: int = 1, key: str = "train/loss", minimize_key: bool = True):
        super().__init__(top_n=top_n, key=key, minimize_key=minimize_key)
        self.top_n = top_n
        self.key = key
        self.minimize_key = minimize_key
        self._kept: list[tuple[float, int, object]] = []

    def on_run_start(self, ctx) -> None:
        self._kept = []
        self._dir = ctx.save_dir / "checkpoints"
        self._dir.mkdir(parents=True, exist_ok=True)

    def on_epoch_end(self, ctx, epoch: int, metrics: dict, method) -> None:
        if self.key not in metrics or method is None:
            return
        value = float(metrics[self.key])
        path = self._dir / f"epoch_{epoch:03d}{STATE_FILE_SUFFIX}"
        payload = {
            "epoch": epoch,
            "metrics": dict(metrics),
            "params": method.param_state(),
            "state": export_state(method).to_obj(),
        }
        path.write_bytes(canonical_json_bytes(payload) + b"\n")
        rank = value if self.minimize_key else -value
        self._kept.append((rank, epoch, path))
        self._kept.sort(key=lambda item: (item[0], item[1]))
        while len(self._kept) > self.top_n:
            _, dropped_epoch, dropped_path = self._kept.pop()
            dropped_path.unlink(missing_ok=True)
            ctx.log(f"checkpoint: dropped epoch {dropped_epoch}")
        ctx.log(f"checkpoint: wrote epoch {epoch} ({self.key}={value:.6g})")

    def best_checkpoint(self) -> str:
        return str(self._kept[0][2]) if self._kept else ""


@demo_module(
    kind="callback",
    args=[
        arg("patience", ValueKind.INTEGER, 3, "epochs without improvement before stopping"),
        arg("key", ValueKind.STRING, "train/loss", "metric watched for improvement"),
        arg("minimize_key", ValueKind.BOOLEAN, "True", "smaller metric is better"),
    ],
)
class EarlyStopCallback(BuildableModule):
    """Request a stop when the watched metric stops improving."""

    def __init__(self, patience: int = 3, key: str = "train/loss", minimize_key: bool = True):
        super().__init__(patience=patience, key=key, minimize_key=minimize_key)
        self.patience = patience
        self.key = key
        self.minimize_key = minimize_key

    def on_run_start(self, ctx) -> None:
        self._best: Optional[float] = None
        self._stale = 0

    def on_epoch_end(self, ctx, epoch: int, metrics: dict, method) -> None:
        if self.key not in metrics:
            return
        value = float(metrics[self.key])
        improved = (
            self._best is None
            or (value < self._best if self.minimize_key else value > self._best)
        )
        if improved:
            self._best = value
            self._stale = 0
        else:
            self._stale += 1
            if self._stale >= self.patience:
                ctx.request_stop(f"no {self.key} improvement for {self.patience} epochs")


# ---------------------------------------------------------------------------
# trainer and task
# ---------------------------------------------------------------------------


@demo_module(
    kind="trainer",
    args=[
        arg("max_epochs", ValueKind.INTEGER, 10, "training epochs"),
        arg("ema_decay", ValueKind.REAL, 0.0, "track an exponential moving average of x when > 0"),
        arg("ema_device", ValueKind.STRING, "cpu", "where the moving average is kept", ("cpu", "none")),
    ],
    requires=[
        req("cls_exp_loggers", "logger", 0, UNBOUNDED),
        req("cls_callbacks", "callback", 0, UNBOUNDED),
    ],
)
class SimpleTrainer(BuildableModule):
    """Epoch loop driving the method, loggers, and callbacks."""

    def __init__(self, max_epochs=10, ema_decay=0.0, ema_device="cpu", exp_loggers=None, callbacks=None):
        super().__init__(max_epochs=max_epochs, ema_decay=ema_decay, ema_device=ema_device)
        self.max_epochs = max_epochs
        self.ema_decay = ema_decay
        self.ema_device = ema_device
        self.exp_loggers = list(exp_loggers or [])
        self.callbacks = list(callbacks or [])

    def submodules(self):
        return {"exp_loggers": self.exp_loggers, "callbacks": self.callbacks}

    def planned_epochs(self, is_test_run: bool) -> int:
        epochs = max(self.max_epochs, 0)
        return min(epochs, 1) if is_test_run else epochs

    def train(self, ctx, method) -> tuple[int, dict]:
        from ..errors import RuntimeFailure

        epochs = self.planned_epochs(ctx.is_test_run)
        if method is not None:
            method.prepare(ctx.seed, epochs)
        for logger in self.exp_loggers:
            logger.on_run_start(ctx)
        for callback in self.callbacks:
            callback.on_run_start(ctx)

        ema = None
        epochs_run = 0
        last_metrics: dict = {}
        for epoch in range(1, epochs + 1):
            if method is not None:
                try:
                    metrics = method.run_epoch(epoch)
                except Exception as err:
                    raise RuntimeFailure(method.path_name or "cls_method#0", err) from err
                if self.ema_decay > 0 and self.ema_device != "none":
                    x = method.current_x
                    ema = x if ema is None else self.ema_decay * ema + (1 - self.ema_decay) * x
                    metrics["train/x_ema"] = ema
            else:
                metrics = {}
            epochs_run = epoch
            for logger in self.exp_loggers:
                try:
                    logger.on_metrics(ctx, epoch, metrics)
                except Exception as err:
                    raise RuntimeFailure(logger.path_name or "cls_exp_loggers", err) from err
            for callback in self.callbacks:
                try:
                    callback.on_epoch_end(ctx, epoch, metrics, method)
                except Exception as err:
                    raise RuntimeFailure(callback.path_name or "cls_callbacks", err) from err
            last_metrics = metrics
            if ctx.stop_reason is not None:
                ctx.log(f"stopping early: {ctx.stop_reason}")
                break
        return epochs_run, last_metrics


@demo_module(
    kind="task",
    tags={"search": True},
    args=[
        arg("is_test_run", ValueKind.BOOLEAN, "False", "stop after one epoch for a quick smoke test"),
        arg("seed", ValueKind.INTEGER, 0, "random seed for the run"),
        arg("save_dir", ValueKind.STRING, "{path_tmp}", "output directory (placeholders expand)"),
        arg("note", ValueKind.STRING, "", "free-form text stored with the run"),
    ],
    requires=[
        req("cls_device", "device"),
        req("cls_trainer", "trainer"),
        req("cls_method", "method", 0, 1, {"search": True}),
    ],
)
class SingleSearchTask(BuildableModule):
    """Run one search method under one trainer on one device."""

    def __init__(self, is_test_run=False, seed=0, save_dir=None, note="", device=None, trainer=None, method=None):
        if save_dir is None or save_dir == "":
            save_dir = tempfile.gettempdir()
        super().__init__(is_test_run=is_test_run, seed=seed, save_dir=save_dir, note=note)
        if device is None or trainer is None:
            raise ValueError("SingleSearchTask needs a device and a trainer")
        self.is_test_run = is_test_run
        self.seed = seed
        self.save_dir = save_dir
        self.note = note
        self.device = device
        self.trainer = trainer
        self.method = method

    def submodules(self):
        subs = {"device": self.device, "trainer": self.trainer}
        if self.method is not None:
            subs["method"] = self.method
        return subs

    def run(self, line_callback=None):
        from .runtime import execute_task

        return execute_task(self, line_callback)

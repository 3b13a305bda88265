"""Deterministic random generators for property and acceptance tests.

Trees are drawn from the demo registry's requirement graph; documents are
perturbed with exactly one mutation each. Everything is driven by a seeded
``random.Random`` so failures reproduce.
"""

from __future__ import annotations

import random

from argtree import ArgumentTreeNode, ValueKind
from argtree.demo.structure import (
    CandidateChoice,
    LinearSkip,
    MobileInvConvLayer,
    SingleLayerCell,
    SkipConnection,
)

_WORDS = ("alpha", "bravo", "delta", "echo", "lima", "oscar", "tango", "zulu")


def random_value(rng: random.Random, arg):
    if arg.choices:
        return rng.choice(arg.choices)
    kind = arg.value_kind
    if kind is ValueKind.BOOLEAN:
        return rng.choice((True, False))
    if kind is ValueKind.INTEGER:
        return rng.randint(-3, 99)
    if kind is ValueKind.REAL:
        return round(rng.uniform(-8.0, 8.0), 6)
    return f"{rng.choice(_WORDS)}-{rng.randrange(1000)}"


def random_tree(
    registry,
    rng: random.Random,
    entry_req: str = "cls_task",
    entry_kind: str = "task",
    max_depth: int = 6,
) -> ArgumentTreeNode:
    """A random valid tree over the registry's requirement graph."""
    claimed: dict[str, str] = {}

    def eligible(req, depth):
        options = []
        for descriptor in registry.filter(req.allowed_kind, req.tag_filter):
            keys = {r.key for r in descriptor.child_requirements}
            if any(claimed.get(k, descriptor.name) != descriptor.name for k in keys):
                continue  # would re-declare a key another class already owns
            if depth >= max_depth and descriptor.child_requirements:
                continue
            options.append(descriptor)
        return options

    def grow(descriptor, req_key, index, depth) -> ArgumentTreeNode:
        values = {a.name: random_value(rng, a) for a in descriptor.arguments}
        children = {}
        for req in descriptor.child_requirements:
            claimed[req.key] = descriptor.name
            options = eligible(req, depth + 1)
            if options:
                upper = req.count_max if req.count_max is not None else req.count_min + 3
                count = rng.randint(req.count_min, max(upper, req.count_min))
            else:
                assert req.count_min == 0, f"no eligible classes for {req.key}"
                count = 0
            kids = []
            for i in range(count):
                kids.append(grow(rng.choice(options), req.key, i, depth + 1))
            children[req.key] = kids
        return ArgumentTreeNode(descriptor, req_key, index, values, children)

    root_descriptor = rng.choice(registry.filter(entry_kind))
    return grow(root_descriptor, entry_req, 0, 1)


def perturb_document(rng: random.Random, entries: dict) -> tuple[dict, str]:
    """Apply exactly one breaking mutation; returns (mutated entries, kind)."""
    entries = dict(entries)
    mutation = rng.choice(("typo", "extra", "count"))
    if mutation == "typo":
        key = rng.choice(list(entries))
        value = entries.pop(key)
        # appending keeps the grammar, but nothing will ever ask for the key
        entries[key + "x"] = value
    elif mutation == "extra":
        selections = [k for k in entries if not k.startswith("{") and "." not in k]
        target = rng.choice(selections)
        entries[f"{{{target}}}.bogus_{rng.randrange(100)}"] = 1
    else:  # count breach: duplicate a single-slot selection or drop a required one
        singles = [k for k in ("cls_device", "cls_trainer", "cls_op") if k in entries]
        target = rng.choice(singles)
        if rng.random() < 0.5:
            entries[target] = f"{entries[target]}, {entries[target]}"
        else:
            del entries[target]
    return entries, mutation


def random_structure_module(rng: random.Random, depth: int = 5, _counter=None):
    """A random composed structural module (cells, ops, candidate groups)."""
    if _counter is None:
        _counter = [0]
    _counter[0] += 1
    tag = _counter[0]
    leaf_makers = [
        lambda: MobileInvConvLayer(
            kernel_size=rng.choice((1, 3, 5, 7)),
            stride=rng.choice((1, 2)),
            expansion=round(rng.uniform(1.0, 8.0), 3),
            padding=rng.choice(("same", "valid")),
            act_fun=rng.choice(("relu", "relu6", "swish")),
            bn_affine=rng.choice((True, False)),
            act_inplace=rng.choice((True, False)),
            fused=rng.choice((True, False)),
        ),
        lambda: SkipConnection(),
        lambda: LinearSkip(features=rng.choice((8, 16, 32))),
    ]
    if depth <= 1:
        return rng.choice(leaf_makers)()
    roll = rng.random()
    if roll < 0.4:
        return rng.choice(leaf_makers)()
    if roll < 0.7:
        return SingleLayerCell(
            features_mult=rng.randint(1, 4),
            features_fixed=rng.choice((-1, 16, 32)),
            op=random_structure_module(rng, depth - 1, _counter),
        )
    return CandidateChoice(
        name=f"n/block-{tag}/op-{rng.randrange(10)}",
        candidates=[
            random_structure_module(rng, depth - 1, _counter)
            for _ in range(rng.randint(2, 4))
        ],
    )

"""
Named example instances shared by the tests, the corpus file and the
`fixtures` command.
"""

from __future__ import annotations

import os
import random
from dataclasses import replace
from itertools import permutations
from typing import Any

import yaml

from modules.ElementMap import Arrow, ElementMap
from modules.Errors import UnknownIdentifierError
from modules.GroupoidMorphismSet import GroupoidMorphismSet
from modules.MultiSortedStructure import FiberMap, MultiSortedStructure, Relation
from modules.SimplicialGroupoid import (
    ObjectSpec,
    SimplicialGroupoid,
    fibered_simplicial_groupoid,
    nonempty_subsets,
    relabeled_copy,
    simplicial_from_reference,
    subset_label,
)

SG_TOY_ELEMENTS = {
    ("a", "x1"): "p1",
    ("a", "x2"): "p2",
    ("b", "y1"): "q1",
    ("b", "y2"): "q2",
    ("a,b", "x1"): "r1",
    ("a,b", "x2"): "r2",
    ("a,b", "y1"): "r3",
    ("a,b", "y2"): "r4",
}


def sg_toy() -> SimplicialGroupoid:
    """A = {a, b}; Pa = {p1, p2}, Pb = {q1, q2}, Pab = {r1..r4}; fiberwise swaps."""
    return fibered_simplicial_groupoid(
        ["a", "b"],
        {"a": ["x1", "x2"], "b": ["y1", "y2"]},
        generators=[{"x1": "x2", "x2": "x1"}, {"y1": "y2", "y2": "y1"}],
        object_names={"a": "Pa", "b": "Pb", "a,b": "Pab"},
        element_names=SG_TOY_ELEMENTS,
    )


def sg_toy3() -> SimplicialGroupoid:
    """Three points, two-element fibers, all fiberwise swaps. Elements read `P<label>.<point><index>`."""
    points = ["a", "b", "c"]
    names = {label: "P" + label.replace(",", "") for label in ["a", "b", "c", "a,b", "a,c", "b,c", "a,b,c"]}
    return fibered_simplicial_groupoid(
        points,
        {point: [f"{point}1", f"{point}2"] for point in points},
        generators=[{f"{p}1": f"{p}2", f"{p}2": f"{p}1"} for p in points],
        object_names=names,
    )


def sg_diagonal() -> SimplicialGroupoid:
    """Like SG_toy, but the only nontrivial symmetry swaps both fibers at once."""
    return fibered_simplicial_groupoid(
        ["a", "b"],
        {"a": ["x1", "x2"], "b": ["y1", "y2"]},
        generators=[{"x1": "x2", "x2": "x1", "y1": "y2", "y2": "y1"}],
        object_names={"a": "Pa", "b": "Pb", "a,b": "Pab"},
        element_names=SG_TOY_ELEMENTS,
    )


def sg_trivial(points: tuple[str, ...] = ("a", "b")) -> SimplicialGroupoid:
    """One object per component, one element per point, trivial automorphism groups."""
    return fibered_simplicial_groupoid(
        list(points),
        {point: [f"{point}1"] for point in points},
        object_names={label: "T" + label.replace(",", "") for label in _labels(points)},
    )


def sg_single_point() -> SimplicialGroupoid:
    return fibered_simplicial_groupoid(
        ["a"], {"a": ["x1", "x2"]}, generators=[{"x1": "x2", "x2": "x1"}], object_names={"a": "Pa"}
    )


def sg_oversized_top() -> SimplicialGroupoid:
    """Degree-2 object of size 5 over {a, b} with two-element degree-1 objects."""
    reference = {"a": ["a1", "a2"], "b": ["b1", "b2"], "a,b": ["a1", "a2", "b1", "b2", "z"]}
    groups = {label: [ElementMap.identity(tokens)] for label, tokens in reference.items()}
    objects = [
        ObjectSpec("Pa", "a", ElementMap.from_dict({"a1": "p1", "a2": "p2"})),
        ObjectSpec("Pb", "b", ElementMap.from_dict({"b1": "q1", "b2": "q2"})),
        ObjectSpec("Pab", "a,b", ElementMap.from_dict({"a1": "r1", "a2": "r2", "b1": "r3", "b2": "r4", "z": "r5"})),
    ]
    return simplicial_from_reference(["a", "b"], reference, groups, objects)


def sg_toy_with_second_object() -> SimplicialGroupoid:
    """SG_toy with an extra copy Pa~1 of Pa in the component {a}."""
    return fibered_simplicial_groupoid(
        ["a", "b"],
        {"a": ["x1", "x2"], "b": ["y1", "y2"]},
        generators=[{"x1": "x2", "x2": "x1"}, {"y1": "y2", "y2": "y1"}],
        object_names={"a": "Pa", "b": "Pb", "a,b": "Pab"},
        element_names=SG_TOY_ELEMENTS,
        extra_objects={"a": 1},
    )


def sg_toy_with_noninjective_inclusion() -> SimplicialGroupoid:
    """SG_toy whose ι_{1,2} carries a map collapsing Pa onto r1."""
    sg = sg_toy()
    inclusion = sg.inclusions[(1, 2)]
    collapsed = Arrow("Pa", "Pab", ElementMap.from_dict({"p1": "r1", "p2": "r1"}))
    maps = frozenset(a for a in inclusion.maps if a.source != "Pa") | {collapsed}
    return replace(sg, inclusions={(1, 2): GroupoidMorphismSet(inclusion.source, inclusion.target, maps)})


def random_simplicial_groupoid(rng: random.Random, max_points: int = 4, max_object_size: int = 4) -> SimplicialGroupoid:
    """
    A random valid simplicial groupoid: fibers over at most `max_points`
    points with at most `max_object_size` tokens in total, a random
    fiber-preserving permutation group and up to three objects per component.
    """
    point_count = rng.randint(1, max_points)
    points = [f"a{i}" for i in range(point_count)]
    size = max(max_object_size, point_count)
    sizes = [1] * point_count
    for _ in range(size - point_count):
        if rng.random() < 0.5:
            sizes[rng.randrange(point_count)] += 1
    fibers = {point: [f"{point}t{k}" for k in range(size)] for point, size in zip(points, sizes)}
    generators = []
    for _ in range(rng.randint(0, 2)):
        permutation = {}
        for point in points:
            tokens = list(fibers[point])
            shuffled = tokens[:]
            rng.shuffle(shuffled)
            permutation.update(zip(tokens, shuffled))
        generators.append(permutation)
    labels = _labels(points)
    extra = {label: rng.randint(0, 2) for label in labels if rng.random() < 0.3}
    return fibered_simplicial_groupoid(
        points,
        fibers,
        generators=generators,
        object_names={label: "O" + label.replace(",", "") for label in labels},
        extra_objects=extra,
    )


def random_corpus(seed: int, count: int, max_points: int = 4) -> list[SimplicialGroupoid]:
    """`count` random simplicial groupoids drawn from one seeded generator."""
    rng = random.Random(seed)
    return [random_simplicial_groupoid(rng, max_points) for _ in range(count)]


def _labels(points) -> list[str]:
    return [subset_label(s) for s in nonempty_subsets(list(points), len(points))]


def structure_free_pair() -> MultiSortedStructure:
    """U = {u}, S = {s1, s2} over u, no relations."""
    fiber = FiberMap("S", ("u",), ElementMap.from_dict({"s1": "u", "s2": "u"}))
    return MultiSortedStructure({"U": ("u",), "S": ("s1", "s2")}, {}, ("U",), fiber)


def structure_marked_pair() -> MultiSortedStructure:
    """Two-element S with a unary relation naming s1, so the swap is not an automorphism."""
    return MultiSortedStructure({"S": ("s1", "s2")}, {"marked": Relation.of(("S",), [("s1",)])}, ())


def structure_two_points() -> MultiSortedStructure:
    """
    U = {a, b}, S_a = {x1, x2}, S_b = {y1, y2} and a relation E pairing
    x_i with y_i, so an automorphism over U swaps both fibers or neither.
    """
    assignment = {"x1": "a", "x2": "a", "y1": "b", "y2": "b"}
    return MultiSortedStructure(
        {"U": ("a", "b"), "S": ("x1", "x2", "y1", "y2")},
        {"E": Relation.of(("S", "S"), [("x1", "y1"), ("x2", "y2")])},
        ("U",),
        FiberMap("S", ("a", "b"), ElementMap.from_dict(assignment)),
    )


def structure_alternating() -> MultiSortedStructure:
    """
    S_a = {p1..p4}, S_b = {t}; a 4-ary relation through t makes the group
    over U act on S_a as A4. Seen from S_a alone with binary orbit
    relations the group is all of Sym(4), so odd permutations do not lift.
    """
    fiber_a = ("p1", "p2", "p3", "p4")
    even = []
    for image in permutations(fiber_a):
        inversions = sum(1 for i in range(4) for j in range(i + 1, 4) if image[i] > image[j])
        if inversions % 2 == 0:
            even.append((image[0], image[1], image[2], "t"))
    assignment = {x: "a" for x in fiber_a} | {"t": "b"}
    return MultiSortedStructure(
        {"U": ("a", "b"), "S": fiber_a + ("t",)},
        {"R": Relation.of(("S", "S", "S", "S"), even)},
        ("U",),
        FiberMap("S", ("a", "b"), ElementMap.from_dict(assignment)),
    )


def structure_z4(n: int) -> MultiSortedStructure:
    from modules.Z4Cover import build_z4_example

    return build_z4_example(n).structure


CORPUS_FILE = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "data", "corpus.yaml")


def load_corpus(path: str | None = None) -> dict[str, Any]:
    with open(path or CORPUS_FILE, "r") as file:
        corpus = yaml.safe_load(file) or {}
    names = [entry["name"] for entry in corpus.get("fixtures", [])]
    for group in corpus.get("laws", {}).values():
        for name in group:
            if name not in names:
                raise UnknownIdentifierError(name, "fixture")
    return corpus


def build_fixture(name: str, corpus: dict[str, Any] | None = None):
    corpus = corpus if corpus is not None else load_corpus()
    for entry in corpus.get("fixtures", []):
        if entry["name"] == name:
            factory = globals().get(entry["factory"])
            if factory is None:
                raise UnknownIdentifierError(entry["factory"], "fixture factory")
            return factory(*entry.get("args", []))
    raise UnknownIdentifierError(name, "fixture")

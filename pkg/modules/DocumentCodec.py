"""
JSON documents for every value the command line reads or writes.

A document is an envelope `{"format_version", "kind", "payload"}`. Payloads
are pydantic models; `build()` turns a validated payload into the domain
value and reports dangling identifiers, `from_value()` goes the other way.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
from dataclasses import dataclass
from typing import Any, Literal

from pydantic import BaseModel, Field, ValidationError

from modules.CoherentFamily import CoherentFamily
from modules.ConcreteGroupoid import ConcreteGroupoid
from modules.CoverMorphism import CoverMorphism
from modules.ElementMap import Arrow, ElementMap
from modules.Errors import SchemaError, UnknownIdentifierError, VersionMismatchError
from modules.GroupoidMorphismSet import GroupoidMorphismSet
from modules.InclusionSystem import InclusionSystem, map_key, parse_map_key
from modules.MultiSortedStructure import FiberMap, MultiSortedStructure, Relation
from modules.ProjectiveGroupoidSystem import LevelProjection, ProjectiveGroupoidSystem
from modules.SimplicialGroupoid import SimplicialGroupoid
from modules.SimplicialMorphism import SimplicialMorphism

logger = logging.getLogger(__name__)

FORMAT_VERSION = "1.0"

Kind = Literal[
    "groupoid",
    "simplicial-groupoid",
    "structure",
    "morphism",
    "inclusion-system",
    "coherent-family",
    "projective-system",
    "report",
]


class DocumentEnvelope(BaseModel):
    format_version: str = Field(description="Document format version")
    kind: Kind = Field(description="Payload kind")
    payload: dict[str, Any] = Field(description="Kind-specific body")


class ArrowModel(BaseModel):
    source: str
    target: str
    mapping: dict[str, str]

    @classmethod
    def from_value(cls, arrow: Arrow) -> ArrowModel:
        return cls(source=arrow.source, target=arrow.target, mapping=dict(arrow.mapping.pairs))

    def build(self) -> Arrow:
        return Arrow(self.source, self.target, ElementMap.from_dict(self.mapping))


def _require_objects(arrow: Arrow, sources, targets) -> Arrow:
    if arrow.source not in sources:
        raise UnknownIdentifierError(arrow.source, "object")
    if arrow.target not in targets:
        raise UnknownIdentifierError(arrow.target, "object")
    return arrow


class GroupoidPayload(BaseModel):
    objects: dict[str, list[str]]
    component_of: dict[str, str]
    component_label: dict[str, list[str]]
    morphisms: list[ArrowModel]

    @classmethod
    def from_value(cls, groupoid: ConcreteGroupoid) -> GroupoidPayload:
        return cls(
            objects={name: sorted(groupoid.objects[name]) for name in groupoid.object_ids},
            component_of=dict(sorted(groupoid.component_of.items())),
            component_label={c: sorted(label) for c, label in sorted(groupoid.component_label.items())},
            morphisms=[ArrowModel.from_value(a) for a in sorted(groupoid.morphisms)],
        )

    def build(self) -> ConcreteGroupoid:
        for name in self.component_of:
            if name not in self.objects:
                raise UnknownIdentifierError(name, "object")
        arrows = [_require_objects(m.build(), self.objects, self.objects) for m in self.morphisms]
        return ConcreteGroupoid(
            objects={name: frozenset(elements) for name, elements in self.objects.items()},
            component_of=dict(self.component_of),
            component_label={c: frozenset(label) for c, label in self.component_label.items()},
            morphisms=frozenset(arrows),
        )


class InclusionSetModel(BaseModel):
    source_degree: int
    target_degree: int
    maps: list[ArrowModel]
    relation: list[tuple[str, str]] | None = None


class SimplicialGroupoidPayload(BaseModel):
    base_set: list[str]
    degrees: dict[int, GroupoidPayload]
    inclusions: list[InclusionSetModel] = Field(default_factory=list)

    @classmethod
    def from_value(cls, groupoid: SimplicialGroupoid) -> SimplicialGroupoidPayload:
        return cls(
            base_set=list(groupoid.base_set),
            degrees={n: GroupoidPayload.from_value(level) for n, level in sorted(groupoid.degree_groupoids.items())},
            inclusions=[
                InclusionSetModel(
                    source_degree=n,
                    target_degree=m,
                    maps=[ArrowModel.from_value(a) for a in inclusion.sorted_maps],
                    relation=None if inclusion.relation is None else sorted(inclusion.relation),
                )
                for (n, m), inclusion in sorted(groupoid.inclusions.items())
            ],
        )

    def build(self) -> SimplicialGroupoid:
        levels = {n: payload.build() for n, payload in self.degrees.items()}
        inclusions = {}
        for entry in self.inclusions:
            for n in (entry.source_degree, entry.target_degree):
                if n not in levels:
                    raise UnknownIdentifierError(str(n), "degree")
            source, target = levels[entry.source_degree], levels[entry.target_degree]
            maps = frozenset(_require_objects(m.build(), source.objects, target.objects) for m in entry.maps)
            relation = None if entry.relation is None else frozenset(tuple(pair) for pair in entry.relation)
            inclusions[(entry.source_degree, entry.target_degree)] = GroupoidMorphismSet(source, target, maps, relation)
        return SimplicialGroupoid(tuple(self.base_set), levels, inclusions)


class RelationModel(BaseModel):
    signature: list[str]
    tuples: list[list[str]]


class FiberMapModel(BaseModel):
    fiber_sort: str
    base_set: list[str]
    assignment: dict[str, str]


class StructurePayload(BaseModel):
    sorts: dict[str, list[str]]
    relations: dict[str, RelationModel] = Field(default_factory=dict)
    base_sorts: list[str] = Field(default_factory=list)
    fiber_map: FiberMapModel | None = None
    supports: dict[str, list[str]] = Field(default_factory=dict)

    @classmethod
    def from_value(cls, structure: MultiSortedStructure) -> StructurePayload:
        return cls.model_validate(structure.to_dict())

    def build(self) -> MultiSortedStructure:
        known = {x for elements in self.sorts.values() for x in elements}

        def require(x: str) -> str:
            if x not in known:
                raise UnknownIdentifierError(x, "element")
            return x

        for sort in self.base_sorts:
            if sort not in self.sorts:
                raise UnknownIdentifierError(sort, "sort")
        relations = {}
        for name, relation in self.relations.items():
            for sort in relation.signature:
                if sort not in self.sorts:
                    raise UnknownIdentifierError(sort, "sort")
            relations[name] = Relation.of(relation.signature, [[require(x) for x in t] for t in relation.tuples])
        fiber_map = None
        if self.fiber_map is not None:
            if self.fiber_map.fiber_sort not in self.sorts:
                raise UnknownIdentifierError(self.fiber_map.fiber_sort, "sort")
            assignment = {require(x): require(a) for x, a in self.fiber_map.assignment.items()}
            fiber_map = FiberMap(self.fiber_map.fiber_sort, tuple(self.fiber_map.base_set), ElementMap.from_dict(assignment))
        supports = {require(x): frozenset(points) for x, points in self.supports.items()}
        return MultiSortedStructure(
            {sort: tuple(elements) for sort, elements in self.sorts.items()},
            relations,
            tuple(self.base_sorts),
            fiber_map,
            supports,
        )


class MorphismPayload(BaseModel):
    variant: Literal["cover", "simplicial"]
    first: StructurePayload | None = None
    second: StructurePayload | None = None
    mapping: dict[str, str] = Field(default_factory=dict)
    source: SimplicialGroupoidPayload | None = None
    target: SimplicialGroupoidPayload | None = None
    maps: dict[int, list[ArrowModel]] = Field(default_factory=dict)

    @classmethod
    def from_value(cls, morphism: CoverMorphism | SimplicialMorphism) -> MorphismPayload:
        if isinstance(morphism, CoverMorphism):
            return cls(
                variant="cover",
                first=StructurePayload.from_value(morphism.first),
                second=StructurePayload.from_value(morphism.second),
                mapping=dict(morphism.mapping.pairs),
            )
        return cls(
            variant="simplicial",
            source=SimplicialGroupoidPayload.from_value(morphism.source),
            target=SimplicialGroupoidPayload.from_value(morphism.target),
            maps={
                n: [ArrowModel.from_value(a) for a in h.sorted_maps]
                for n, h in sorted(morphism.degree_morphisms.items())
            },
        )

    def build(self) -> CoverMorphism | SimplicialMorphism:
        if self.variant == "cover":
            if self.first is None or self.second is None:
                raise SchemaError("A cover morphism needs 'first' and 'second'", "$.payload")
            first, second = self.first.build(), self.second.build()
            for x, y in self.mapping.items():
                first.require_element(x)
                second.require_element(y)
            return CoverMorphism(first, second, ElementMap.from_dict(self.mapping))
        if self.source is None or self.target is None:
            raise SchemaError("A simplicial morphism needs 'source' and 'target'", "$.payload")
        source, target = self.source.build(), self.target.build()
        degree_morphisms = {}
        for n, arrows in self.maps.items():
            if n not in source.degree_groupoids or n not in target.degree_groupoids:
                raise UnknownIdentifierError(str(n), "degree")
            first_level, second_level = source.degree_groupoids[n], target.degree_groupoids[n]
            maps = frozenset(_require_objects(a.build(), first_level.objects, second_level.objects) for a in arrows)
            degree_morphisms[n] = GroupoidMorphismSet(first_level, second_level, maps)
        return SimplicialMorphism(source, target, degree_morphisms)


class InclusionSystemPayload(BaseModel):
    points: list[str]
    chosen_object: dict[str, str]
    maps: dict[str, ArrowModel] = Field(default_factory=dict)

    @classmethod
    def from_value(cls, system: InclusionSystem) -> InclusionSystemPayload:
        return cls(
            points=list(system.points),
            chosen_object=dict(sorted(system.chosen_object.items())),
            maps={map_key(c, d): ArrowModel.from_value(a) for (c, d), a in sorted(system.maps.items())},
        )

    def build(self) -> InclusionSystem:
        maps = {}
        for key, arrow in self.maps.items():
            small, big = parse_map_key(key)
            for label in (small, big):
                if label not in self.chosen_object:
                    raise UnknownIdentifierError(label, "component")
            maps[(small, big)] = arrow.build()
        return InclusionSystem(tuple(self.points), dict(self.chosen_object), maps)


class CoherentFamilyPayload(BaseModel):
    maps: dict[str, ArrowModel]
    witnesses: dict[str, ArrowModel] = Field(default_factory=dict)

    @classmethod
    def from_value(cls, family: CoherentFamily) -> CoherentFamilyPayload:
        return cls(
            maps={a: ArrowModel.from_value(m) for a, m in sorted(family.maps.items())},
            witnesses={label: ArrowModel.from_value(h) for label, h in sorted(family.witnesses.items())},
        )

    def build(self) -> CoherentFamily:
        return CoherentFamily(
            {a: m.build() for a, m in self.maps.items()},
            {label: h.build() for label, h in self.witnesses.items()},
        )


class ProjectionModel(BaseModel):
    lower: str
    upper: str
    object_map: dict[str, str]
    element_map: dict[str, str]


class ProjectiveSystemPayload(BaseModel):
    indices: list[str]
    order: list[tuple[str, str]] = Field(default_factory=list)
    levels: dict[str, GroupoidPayload]
    projections: list[ProjectionModel] = Field(default_factory=list)

    @classmethod
    def from_value(cls, system: ProjectiveGroupoidSystem) -> ProjectiveSystemPayload:
        return cls(
            indices=list(system.indices),
            order=sorted(system.order),
            levels={index: GroupoidPayload.from_value(system.levels[index]) for index in system.indices},
            projections=[
                ProjectionModel(
                    lower=lower,
                    upper=upper,
                    object_map=dict(sorted(p.object_map.items())),
                    element_map=dict(p.element_map.pairs),
                )
                for (lower, upper), p in sorted(system.projections.items())
            ],
        )

    def build(self) -> ProjectiveGroupoidSystem:
        levels = {index: self.levels[index].build() for index in self.indices if index in self.levels}
        for index in self.indices:
            if index not in levels:
                raise UnknownIdentifierError(index, "index")
        for pair in self.order:
            for index in pair:
                if index not in levels:
                    raise UnknownIdentifierError(index, "index")
        projections = {}
        for p in self.projections:
            for index in (p.lower, p.upper):
                if index not in levels:
                    raise UnknownIdentifierError(index, "index")
            projections[(p.lower, p.upper)] = LevelProjection(dict(p.object_map), ElementMap.from_dict(p.element_map))
        return ProjectiveGroupoidSystem(
            tuple(self.indices), frozenset(tuple(pair) for pair in self.order), levels, projections
        )


class ReportPayload(BaseModel):
    """Outcome of one command: which verb ran, on which inputs, and what it found."""

    verb: str
    status: Literal["ok", "failed", "error"]
    inputs: dict[str, str] = Field(default_factory=dict, description="Input path -> sha256 digest")
    results: dict[str, Any] = Field(default_factory=dict)

    @classmethod
    def from_value(cls, report: ReportPayload) -> ReportPayload:
        return report

    def build(self) -> ReportPayload:
        return self


PAYLOADS: dict[str, type[BaseModel]] = {
    "groupoid": GroupoidPayload,
    "simplicial-groupoid": SimplicialGroupoidPayload,
    "structure": StructurePayload,
    "morphism": MorphismPayload,
    "inclusion-system": InclusionSystemPayload,
    "coherent-family": CoherentFamilyPayload,
    "projective-system": ProjectiveSystemPayload,
    "report": ReportPayload,
}


def kind_of(value: Any) -> str:
    for kind, types in (
        ("groupoid", ConcreteGroupoid),
        ("simplicial-groupoid", SimplicialGroupoid),
        ("structure", MultiSortedStructure),
        ("morphism", (CoverMorphism, SimplicialMorphism)),
        ("inclusion-system", InclusionSystem),
        ("coherent-family", CoherentFamily),
        ("projective-system", ProjectiveGroupoidSystem),
        ("report", ReportPayload),
    ):
        if isinstance(value, types):
            return kind
    raise SchemaError(f"No document kind for {type(value).__name__}")


@dataclass(frozen=True)
class Document:
    kind: str
    value: Any
    digest: str


def digest(text: str) -> str:
    return "sha256:" + hashlib.sha256(text.encode("utf-8")).hexdigest()


def _path(prefix: str, location: tuple) -> str:
    return prefix + "".join(f"[{part}]" if isinstance(part, int) else f".{part}" for part in location)


def _validate(model: type[BaseModel], data: Any, prefix: str) -> BaseModel:
    try:
        return model.model_validate(data)
    except ValidationError as error:
        first = error.errors()[0]
        raise SchemaError(first["msg"], _path(prefix, first["loc"])) from None


def parse_document(text: str) -> Document:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as error:
        raise SchemaError(f"Not JSON: {error.msg}") from None
    if isinstance(data, dict) and "format_version" in data and data["format_version"] != FORMAT_VERSION:
        raise VersionMismatchError(
            f"Format version {data['format_version']!r} is not {FORMAT_VERSION!r}", "$.format_version"
        )
    envelope = _validate(DocumentEnvelope, data, "$")
    payload = _validate(PAYLOADS[envelope.kind], envelope.payload, "$.payload")
    return Document(envelope.kind, payload.build(), digest(text))


def serialize_document(value: Any, indent: int | None = 2) -> str:
    kind = kind_of(value)
    payload = PAYLOADS[kind].from_value(value)
    envelope = DocumentEnvelope(format_version=FORMAT_VERSION, kind=kind, payload=payload.model_dump(mode="json"))
    return json.dumps(envelope.model_dump(mode="json"), indent=indent) + "\n"


def read_document(path: str, expected: str | tuple[str, ...] | None = None) -> Document:
    with open(path, "r", encoding="utf-8") as file:
        document = parse_document(file.read())
    allowed = (expected,) if isinstance(expected, str) else expected
    if allowed is not None and document.kind not in allowed:
        raise SchemaError(f"Expected a {' or '.join(allowed)} document, got {document.kind}", "$.kind")
    return document


def write_atomic(path: str, text: str) -> None:
    """Write to a temporary file beside `path`, then rename over it."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    handle, temporary = tempfile.mkstemp(dir=directory, prefix=".gcover-", suffix=".tmp")
    try:
        with os.fdopen(handle, "w", encoding="utf-8") as file:
            file.write(text)
            file.flush()
            os.fsync(file.fileno())
        os.replace(temporary, path)
    except BaseException:
        if os.path.exists(temporary):
            os.remove(temporary)
        raise
    logger.debug("Wrote %s", path)


def write_document(path: str, value: Any, indent: int | None = 2) -> str:
    text = serialize_document(value, indent)
    write_atomic(path, text)
    return digest(text)


def document_schema(kind: str | None = None) -> dict[str, Any]:
    if kind is None:
        return DocumentEnvelope.model_json_schema()
    if kind not in PAYLOADS:
        raise UnknownIdentifierError(kind, "document kind")
    return PAYLOADS[kind].model_json_schema()

"""
The functors between covers and simplicial groupoids on isomorphisms, the
natural isomorphisms η and ε, and executable checks of the functor laws.

G sends a cover morphism h to the map sets φ₂ γ₂ h γ₁ φ₁⁻¹ between the
extracted groupoids. C sends a groupoid isomorphism H to ⋃ g_a m_a f_a⁻¹ for a
coherent family (m_a) of H between the two covers' inclusion systems.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from modules.BindingExtraction import BindingExtraction, copy_object, extract_binding_simplicial_groupoid
from modules.CoherentFamily import find_coherent_family
from modules.CoverConstruction import CoverConstruction, build_cover_from_simplicial
from modules.CoverMorphism import CoverMorphism, fiber_automorphisms, find_morphism_equivalence, maps_equivalent
from modules.ElementMap import Arrow, ElementMap
from modules.Errors import InvariantBreachError, PreconditionError
from modules.GroupoidMorphismSet import GroupoidMorphismSet
from modules.InclusionSystem import InclusionSystem
from modules.MultiSortedStructure import MultiSortedStructure
from modules.SimplicialGroupoid import SimplicialGroupoid, label_subset
from modules.SimplicialMorphism import SimplicialMorphism, compose_simplicial, relabeling_corpus
from modules.StructureAnalyzer import StructureAnalyzer
from modules.UniverseEncoding import base_part, encode_many, expand_base
from modules.ValidationReport import CheckResult

logger = logging.getLogger(__name__)


def _require_valid(morphism: SimplicialMorphism, what: str) -> SimplicialMorphism:
    report = morphism.validate()
    if not report.is_valid:
        raise InvariantBreachError(f"{what} is not a simplicial morphism: {report.violations[0].message}")
    return morphism


def functor_G_on_morphism(
    morphism: CoverMorphism, first: BindingExtraction, second: BindingExtraction, verify: bool = True
) -> SimplicialMorphism:
    """G(h)_n = {φ₂ γ₂ h_c̄ γ₁ φ₁⁻¹ : γᵢ ∈ Γᵢ_c̄} for every c̄ of size n."""
    if set(first.cover.sorts[first.cover.fiber_map.fiber_sort]) != set(morphism.source_fiber):
        raise PreconditionError("First extraction does not belong to the source cover")
    if set(second.cover.sorts[second.cover.fiber_map.fiber_sort]) != set(morphism.target_fiber):
        raise PreconditionError("Second extraction does not belong to the target cover")
    if first.labels != second.labels:
        raise PreconditionError("Extractions cover different components")
    source, target = first.groupoid_in_U, second.groupoid_in_U
    maps_by_degree: dict[int, set[Arrow]] = {n: set() for n in source.degrees}
    for label in first.labels:
        h = morphism.mapping.restrict(first.fiber_sets[label])
        if h.image != frozenset(second.fiber_sets[label]):
            raise PreconditionError(f"h does not map S over {{{label}}} onto its counterpart")
        phi_in = first.copy_maps[label].inverse()
        phi_out = second.copy_maps[label]
        middle = {gamma2.after(h) for gamma2 in second.fiber_groups[label]}
        composites = {m.after(gamma1) for m in middle for gamma1 in first.fiber_groups[label]}
        obj = copy_object(label)
        maps_by_degree[len(label_subset(label))].update(
            Arrow(obj, obj, phi_out.after(c).after(phi_in)) for c in composites
        )
    result = SimplicialMorphism(
        source,
        target,
        {
            n: GroupoidMorphismSet(source.degree_groupoids[n], target.degree_groupoids[n], frozenset(maps))
            for n, maps in maps_by_degree.items()
        },
    )
    return _require_valid(result, "G(h)") if verify else result


def functor_C_on_morphism(
    morphism: SimplicialMorphism,
    first: CoverConstruction,
    second: CoverConstruction,
    verify: bool = True,
    analyzer: StructureAnalyzer | None = None,
) -> CoverMorphism:
    """C(H) with h = ⋃_a g_a m_a f_a⁻¹; f, g the copy maps of the two constructions."""
    if not morphism.is_bijective():
        raise PreconditionError("C is defined on isomorphisms of simplicial groupoids only")
    if morphism.source != first.source_groupoid or morphism.target != second.source_groupoid:
        raise PreconditionError("Morphism does not join the groupoids of the two constructions")
    family = find_coherent_family(morphism, first.inclusion_system, second.inclusion_system)
    graph = {}
    for a in morphism.source.base_set:
        f_inverse = first.copy_map(a).inverse()
        g = second.copy_map(a)
        graph.update(g.after(family.maps[a].mapping).after(f_inverse).pairs)
    result = CoverMorphism(first.result, second.result, ElementMap.from_dict(graph))
    if verify:
        report = result.validate(analyzer)
        if not report.is_valid:
            raise InvariantBreachError(f"C(H) is not a morphism of covers: {report.violations[0].message}")
    return result


@dataclass(frozen=True)
class RoundTrip:
    """A cover M with its extraction E and the cover C built from E, all over one universe."""

    cover: MultiSortedStructure
    extraction: BindingExtraction
    construction: CoverConstruction


def round_trip_covers(
    covers: list[MultiSortedStructure],
    analyzer: StructureAnalyzer | None = None,
    max_degree: int = 0,
) -> list[RoundTrip]:
    """
    Extract every cover, then rebuild a cover from each extraction. The
    encodings of the extracted groupoids are added to the shared universe,
    so the originals are re-based onto it as well.
    """
    if not covers:
        return []
    extractions = [extract_binding_simplicial_groupoid(cover, analyzer, max_degree) for cover in covers]
    encodings = encode_many(
        [(e.groupoid_in_U, f"E{i}:") for i, e in enumerate(extractions, start=1)], base=base_part(covers[0])
    )
    trips = []
    for i, (cover, extraction, encoding) in enumerate(zip(covers, extractions, encodings), start=1):
        construction = build_cover_from_simplicial(extraction.groupoid_in_U, encoding, tag=f"*{i}")
        trips.append(RoundTrip(expand_base(cover, encoding.structure), extraction, construction))
    return trips


def copy_inclusion_system(extraction: BindingExtraction) -> InclusionSystem:
    """The inclusions of the formal copies induced by the set inclusions S_c̄ ⊆ S_d̄."""
    labels = extraction.labels
    maps = {}
    for small in labels:
        for big in labels:
            if label_subset(small) < label_subset(big):
                phi_small = extraction.copy_maps[small]
                phi_big = extraction.copy_maps[big].restrict(extraction.fiber_sets[small])
                maps[(small, big)] = Arrow(copy_object(small), copy_object(big), phi_big.after(phi_small.inverse()))
    return InclusionSystem(extraction.points, {label: copy_object(label) for label in labels}, maps)


def build_eta(trip: RoundTrip, analyzer: StructureAnalyzer | None = None, verify: bool = True) -> CoverMorphism:
    """η: M -> C(G(M)), with h|S_a = f_a ρ_a φ_a for a coherent family ρ of the identity."""
    extraction, construction = trip.extraction, trip.construction
    copies = copy_inclusion_system(extraction)
    identity = SimplicialMorphism.identity(extraction.groupoid_in_U)
    family = find_coherent_family(identity, copies, construction.inclusion_system)
    graph = {}
    for a in extraction.points:
        graph.update(construction.copy_map(a).after(family.maps[a].mapping).after(extraction.copy_maps[a]).pairs)
    eta = CoverMorphism(trip.cover, construction.result, ElementMap.from_dict(graph))
    if verify:
        if not eta.is_isomorphism():
            raise InvariantBreachError("η is not bijective")
        report = eta.validate(analyzer)
        if not report.is_valid:
            raise InvariantBreachError(f"η is not a morphism of covers: {report.violations[0].message}")
    return eta


def build_epsilon(
    groupoid: SimplicialGroupoid, construction: CoverConstruction, extraction: BindingExtraction, verify: bool = True
) -> SimplicialMorphism:
    """ε_n = {φ_c̄ γ f_c̄ g : γ ∈ Γ_c̄, g ∈ Hom(O, chosen object over c̄)} into the extracted groupoid."""
    target = extraction.groupoid_in_U
    if construction.source_groupoid != groupoid:
        raise PreconditionError("Construction was not built from this groupoid")
    system = construction.inclusion_system
    degree_morphisms = {}
    for n, level in groupoid.degree_groupoids.items():
        maps = set()
        for name in level.object_ids:
            label = level.component_of[name]
            chosen = system.chosen_object[label]
            f = construction.copy_map(label)
            phi = extraction.copy_maps[label]
            for g in groupoid.arrows(name, chosen):
                base = f.after(g.mapping)
                for gamma in extraction.fiber_groups[label]:
                    maps.add(Arrow(name, copy_object(label), phi.after(gamma).after(base)))
        degree_morphisms[n] = GroupoidMorphismSet(level, target.degree_groupoids[n], frozenset(maps))
    epsilon = SimplicialMorphism(groupoid, target, degree_morphisms)
    if verify:
        _require_valid(epsilon, "ε")
        if not epsilon.is_bijective():
            raise InvariantBreachError("ε is not bijective")
    return epsilon


def _same_maps(first: SimplicialMorphism, second: SimplicialMorphism) -> bool:
    return all(first.maps(n) == second.maps(n) for n in first.source.degrees)


def check_epsilon_naturality(
    morphism: SimplicialMorphism, analyzer: StructureAnalyzer | None = None
) -> CheckResult:
    """ε₂ ∘ H and G(C(H)) ∘ ε₁ have the same map sets."""
    first_encoding, second_encoding = encode_many([(morphism.source, "1:"), (morphism.target, "2:")])
    first = build_cover_from_simplicial(morphism.source, first_encoding, tag="*1")
    second = build_cover_from_simplicial(morphism.target, second_encoding, tag="*2")
    first_extraction = extract_binding_simplicial_groupoid(first.result, analyzer)
    second_extraction = extract_binding_simplicial_groupoid(second.result, analyzer)
    epsilon1 = build_epsilon(morphism.source, first, first_extraction)
    epsilon2 = build_epsilon(morphism.target, second, second_extraction)
    c_of_h = functor_C_on_morphism(morphism, first, second, verify=False)
    g_of_c = functor_G_on_morphism(c_of_h, first_extraction, second_extraction)
    left = compose_simplicial(epsilon2, morphism)
    right = compose_simplicial(g_of_c, epsilon1)
    holds = _same_maps(left, right)
    counterexample = None
    if not holds:
        degree = next(n for n in left.source.degrees if left.maps(n) != right.maps(n))
        counterexample = {"degree": degree}
    return CheckResult(holds, counterexample)


def check_eta_naturality(morphism: CoverMorphism, analyzer: StructureAnalyzer | None = None) -> CheckResult:
    """η₂ ∘ h and C(G(h)) ∘ η₁ agree up to automorphisms of the covers over 𝕌."""
    first, second = round_trip_covers([morphism.first, morphism.second], analyzer)
    eta1 = build_eta(first, analyzer, verify=False)
    eta2 = build_eta(second, analyzer, verify=False)
    g_of_h = functor_G_on_morphism(morphism, first.extraction, second.extraction)
    c_of_g = functor_C_on_morphism(g_of_h, first.construction, second.construction, verify=False)
    lifted = CoverMorphism(first.cover, second.cover, morphism.mapping)
    left = lifted.compose(eta2)
    right = eta1.compose(c_of_g)
    equivalence = maps_equivalent(left, right)
    if equivalence is None:
        return CheckResult(False, {"left": left.mapping.signature, "right": right.mapping.signature})
    return CheckResult(True, None, {"witness": dict(equivalence.witness.pairs)})


def check_identity_law_C(groupoid: SimplicialGroupoid, analyzer: StructureAnalyzer | None = None) -> CheckResult:
    """C(id) is equivalent to the identity of the cover, found as an isomorphism over 𝕌."""
    (encoding,) = encode_many([(groupoid, "")])
    first = build_cover_from_simplicial(groupoid, encoding, tag="*1")
    second = build_cover_from_simplicial(groupoid, encoding, tag="*2")
    c_of_id = functor_C_on_morphism(SimplicialMorphism.identity(groupoid), first, second, analyzer=analyzer)
    identity = CoverMorphism.identity(first.result, tag="'")
    equivalence = find_morphism_equivalence(c_of_id, identity)
    if equivalence is None:
        return CheckResult(False, {"law": "C(id)"})
    return CheckResult(True, None, {"witness_size": len(equivalence.witness)})


def check_identity_law_G(cover: MultiSortedStructure, analyzer: StructureAnalyzer | None = None) -> CheckResult:
    """G(id) is exactly the identity morphism of the extracted groupoid."""
    identity = CoverMorphism.identity(cover, tag="'")
    first = extract_binding_simplicial_groupoid(identity.first, analyzer)
    second = extract_binding_simplicial_groupoid(identity.second, analyzer)
    image = functor_G_on_morphism(identity, first, second)
    expected = SimplicialMorphism.identity(first.groupoid_in_U)
    return CheckResult(_same_maps(image, expected), None if _same_maps(image, expected) else {"law": "G(id)"})


def check_functor_laws(
    groupoid: SimplicialGroupoid,
    cover: MultiSortedStructure,
    analyzer: StructureAnalyzer | None = None,
) -> dict:
    """
    Identity laws for C and G, C composition over every composable pair of
    relabeling isomorphisms between three copies of the groupoid (up to
    automorphisms of the covers over 𝕌, as in maps_equivalent), G composition over all
    pairs of automorphisms of the cover, and η naturality on those
    automorphisms. Returns per-law counts of passes and failures.
    """
    analyzer = analyzer or StructureAnalyzer()
    results: dict[str, dict[str, int]] = {}

    def record(law: str, holds: bool) -> None:
        entry = results.setdefault(law, {"passed": 0, "failed": 0})
        entry["passed" if holds else "failed"] += 1
        if not holds:
            logger.info("Law %s failed", law)

    record("C-identity", bool(check_identity_law_C(groupoid, analyzer)))
    record("G-identity", bool(check_identity_law_G(cover, analyzer)))

    groupoids, isomorphisms = relabeling_corpus(groupoid)
    encodings = encode_many([(g, f"{i}:") for i, g in enumerate(groupoids)])
    constructions = [build_cover_from_simplicial(g, e, tag=f"*{i}") for i, (g, e) in enumerate(zip(groupoids, encodings))]
    for (i, j), first in isomorphisms.items():
        for (k, l), second in isomorphisms.items():
            if j != k:
                continue
            composite = functor_C_on_morphism(
                compose_simplicial(second, first), constructions[i], constructions[l], verify=False
            )
            stepwise = functor_C_on_morphism(first, constructions[i], constructions[j], verify=False).compose(
                functor_C_on_morphism(second, constructions[j], constructions[l], verify=False)
            )
            # Up to Aut(cover / 𝕌) on both sides: C(H) depends on the coherent family found.
            # Cover morphisms fix every fiber, so the base part adds nothing to compare.
            record("C-composition", maps_equivalent(composite, stepwise) is not None)

    copies = [cover] + [CoverMorphism.identity(cover, tag=tag).second for tag in ("'", "''")]
    extractions = [extract_binding_simplicial_groupoid(c, analyzer) for c in copies]
    renamings = [ElementMap.from_dict({x: f"{tag}{x}" for x in _fiber(cover)}) for tag in ("", "'", "''")]
    automorphisms = fiber_automorphisms(cover)
    for tau1 in automorphisms:
        for tau2 in automorphisms:
            h1 = CoverMorphism(copies[0], copies[1], renamings[1].after(tau1))
            h2 = CoverMorphism(copies[1], copies[2], renamings[2].after(tau2).after(renamings[1].inverse()))
            composite = functor_G_on_morphism(h1.compose(h2), extractions[0], extractions[2], verify=False)
            stepwise = compose_simplicial(
                functor_G_on_morphism(h2, extractions[1], extractions[2], verify=False),
                functor_G_on_morphism(h1, extractions[0], extractions[1], verify=False),
            )
            record("G-composition", _same_maps(composite, stepwise))
    for tau in automorphisms:
        translation = CoverMorphism(copies[0], copies[1], renamings[1].after(tau))
        record("eta-naturality", bool(check_eta_naturality(translation, analyzer)))
    for (i, j), isomorphism in isomorphisms.items():
        if i == 0:
            record("epsilon-naturality", bool(check_epsilon_naturality(isomorphism, analyzer)))
    return results


def _fiber(cover: MultiSortedStructure) -> tuple[str, ...]:
    return cover.sorts[cover.fiber_map.fiber_sort]

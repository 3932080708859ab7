import json
import logging
import sys

from modules.BindingExtraction import (
    extract_binding_simplicial_groupoid,
    global_fiber_group,
    projective_limit_aut,
)
from modules.CanonicalDcfGroupoid import canonical_dcf_groupoid, dcf_bound_system
from modules.CoherentFamily import find_coherent_family
from modules.ConcreteGroupoid import ConcreteGroupoid
from modules.CoverConstruction import (
    build_cover_from_simplicial,
    groupoid_as_simplicial,
    verify_binding_statement,
    verify_cover,
)
from modules.CoverMorphism import CoverMorphism
from modules.DocumentCodec import (
    ReportPayload,
    digest,
    document_schema,
    kind_of,
    read_document,
    serialize_document,
    write_document,
)
from modules.Errors import GcoverError, LocalStableEmbeddednessError, NotCoherentError, PreconditionError, SchemaError
from modules.Fixtures import build_fixture, load_corpus, random_corpus
from modules.Functors import (
    build_epsilon,
    build_eta,
    check_functor_laws,
    functor_C_on_morphism,
    functor_G_on_morphism,
    round_trip_covers,
)
from modules.InclusionSystem import ChoiceLog, build_inclusion_system
from modules.IsomorphismSearch import automorphism_group
from modules.RelationLattice import bounded_relation_lattice
from modules.SectionExtension import AbelianPresentation, SectionValue, extend_section, morphism_extension_check
from modules.SimplicialGroupoid import label_subset
from modules.SimplicialMorphism import SimplicialMorphism
from modules.StructureAnalyzer import StructureAnalyzer
from modules.UniverseEncoding import encode_many
from modules.Z4Cover import build_z4_example, z4_depth3_determinacy

logger = logging.getLogger(__name__)

EXIT_CODES = {"ok": 0, "failed": 1, "error": 2}


class CommandHandler:
    """Runs one verb on parsed command-line arguments and writes its report."""

    def __init__(self, config):
        self.config = config
        self.analyzer = StructureAnalyzer(orbit_arity=config.get("orbit_arity"))
        self.inputs: dict[str, str] = {}
        self.handlers = {
            "validate": self.handle_validate,
            "aut": self.handle_aut,
            "restrict": self.handle_restrict,
            "stab-embed": self.handle_stab_embed,
            "extract": self.handle_extract,
            "build-cover": self.handle_build_cover,
            "verify-binding": self.handle_verify_binding,
            "projective-limit": self.handle_projective_limit,
            "inclusion-system": self.handle_inclusion_system,
            "coherent-family": self.handle_coherent_family,
            "functor-g": self.handle_functor_g,
            "functor-c": self.handle_functor_c,
            "eta": self.handle_eta,
            "epsilon": self.handle_epsilon,
            "laws": self.handle_laws,
            "z4": self.handle_z4,
            "ext-check": self.handle_ext_check,
            "rel-lattice": self.handle_rel_lattice,
            "dcf-level": self.handle_dcf_level,
            "extend-section": self.handle_extend_section,
            "fixtures": self.handle_fixtures,
            "schema": self.handle_schema,
        }

    def handle_command(self, args) -> int:
        handler = self.handlers.get(args.verb)
        if handler is None:
            print(f"Error: unknown command '{args.verb}'", file=sys.stderr)
            return EXIT_CODES["error"]
        self.inputs = {}
        try:
            holds, results = handler(args)
            status = "ok" if holds else "failed"
        except (GcoverError, OSError) as error:
            print(f"Error: {error}", file=sys.stderr)
            status = "error"
            results = {"error": type(error).__name__, "message": str(error)}
            if isinstance(error, SchemaError):
                results["path"] = error.path
        report = ReportPayload(verb=args.verb, status=status, inputs=dict(self.inputs), results=results)
        self.write_report(args, report)
        return EXIT_CODES[status]

    def write_report(self, args, report: ReportPayload) -> None:
        indent = self.config.get("report_indent")
        if args.out:
            write_document(args.out, report, indent)
            print(f"Wrote report {args.out}", file=sys.stderr)
        else:
            sys.stdout.write(serialize_document(report, indent))

    # Inputs and outputs

    def read_input(self, args, index: int = 0, expected=None):
        paths = args.inputs or []
        if index >= len(paths):
            raise PreconditionError(f"'{args.verb}' needs at least {index + 1} --in document(s)")
        document = read_document(paths[index], expected)
        self.inputs[paths[index]] = document.digest
        return document.value

    def read_choices(self, args) -> ChoiceLog | None:
        path = getattr(args, "seed_choices", None)
        if not path:
            return None
        with open(path, "r", encoding="utf-8") as file:
            text = file.read()
        self.inputs[path] = digest(text)
        try:
            return ChoiceLog.from_dict(json.loads(text))
        except (json.JSONDecodeError, AttributeError) as error:
            raise SchemaError(f"Not a choice log: {error}") from None

    def emit(self, args, value, results: dict) -> None:
        path = getattr(args, "emit", None)
        if not path:
            return
        written = write_document(path, value, self.config.get("report_indent"))
        results["emitted"] = {"path": path, "kind": kind_of(value), "digest": written}
        print(f"Wrote {kind_of(value)} document {path}", file=sys.stderr)

    def max_degree(self, args) -> int:
        value = getattr(args, "max_degree", None)
        return self.config.get("max_degree") if value is None else value

    @staticmethod
    def json_argument(text: str, flag: str):
        try:
            return json.loads(text)
        except json.JSONDecodeError as error:
            raise SchemaError(f"{flag} is not JSON: {error.msg}", flag) from None

    @staticmethod
    def split(text: str | None) -> list[str] | None:
        return None if text is None else [part for part in text.split(",") if part]

    # Verbs

    def handle_validate(self, args):
        value = self.read_input(args)
        kind = kind_of(value)
        results = {"kind": kind}
        if kind == "report" or kind == "coherent-family":
            return True, results
        if kind == "projective-system":
            report = value.validate_system()
        elif isinstance(value, CoverMorphism):
            report = value.validate(self.analyzer)
        else:
            report = value.validate()
        results["report"] = report.to_dict()
        holds = report.is_valid
        if holds and kind == "groupoid":
            faithful = value.is_finitely_faithful()
            results["finitely_faithful"] = faithful.to_dict()
            results["canonical"] = value.is_canonical()
        if holds and kind == "simplicial-groupoid":
            union_property = value.check_disjoint_union_property()
            results["disjoint_union_property"] = union_property.to_dict()
            holds = union_property.holds
        return holds, results

    def handle_aut(self, args):
        structure = self.read_input(args, expected="structure")
        fixed = structure.base_elements if args.fix_base else ()
        group = automorphism_group(structure, fixed_elements=fixed)
        return True, {"order": len(group), "automorphisms": [g.signature for g in group]}

    def _restriction(self, args, structure):
        return self.analyzer.restrict_structure(
            structure,
            sorts=self.split(args.sorts),
            parameters=self.split(args.parameters) or (),
            fiber_subset=None if args.component is None else label_subset(args.component),
            fix_base=args.fix_base,
        )

    def handle_restrict(self, args):
        structure = self.read_input(args, expected="structure")
        restricted = self._restriction(args, structure)
        results = {
            "sorts": {sort: len(elements) for sort, elements in restricted.sorts.items()},
            "relations": sorted(restricted.relations),
        }
        self.emit(args, restricted, results)
        return True, results

    def handle_stab_embed(self, args):
        structure = self.read_input(args, expected="structure")
        sub = self._restriction(args, structure)
        check = self.analyzer.check_stable_embedding(structure, sub, fix_base=args.fix_base)
        return check.holds, check.to_dict()

    def handle_extract(self, args):
        cover = self.read_input(args, expected="structure")
        try:
            extraction = extract_binding_simplicial_groupoid(cover, self.analyzer, self.max_degree(args))
        except LocalStableEmbeddednessError as error:
            return False, {"message": str(error), "witness": error.witness}
        results = {"summary": extraction.summary(), "labels": extraction.labels}
        self.emit(args, extraction.groupoid_in_U, results)
        return True, results

    def read_groupoid(self, args):
        """A simplicial groupoid, or a plain groupoid read as its degree-1 part."""
        value = self.read_input(args, expected=("simplicial-groupoid", "groupoid"))
        return groupoid_as_simplicial(value) if isinstance(value, ConcreteGroupoid) else value

    def _construction(self, args, groupoid):
        log = ChoiceLog()
        system = build_inclusion_system(groupoid, replay=self.read_choices(args), log=log)
        return build_cover_from_simplicial(groupoid, system=system), log

    def handle_build_cover(self, args):
        groupoid = self.read_groupoid(args)
        construction, log = self._construction(args, groupoid)
        result = construction.result
        results = {
            "sorts": {sort: len(elements) for sort, elements in result.sorts.items()},
            "choices": log.to_dict(),
        }
        holds = True
        if args.verify:
            check = verify_cover(construction)
            results["verify_cover"] = check.to_dict()
            holds = check.holds
        self.emit(args, result, results)
        return holds, results

    def handle_verify_binding(self, args):
        groupoid = self.read_groupoid(args)
        construction, log = self._construction(args, groupoid)
        labels = [args.component] if args.component else list(construction.inclusion_system.labels)
        checks = {label: verify_binding_statement(construction, label) for label in labels}
        results = {"components": {label: check.to_dict() for label, check in checks.items()}, "choices": log.to_dict()}
        return all(checks.values()), results

    def handle_projective_limit(self, args):
        cover = self.read_input(args, expected="structure")
        depth = self.max_degree(args) or len(cover.fiber_map.base_set)
        extraction = extract_binding_simplicial_groupoid(cover, self.analyzer, depth)
        families = projective_limit_aut(extraction, depth)
        global_group = global_fiber_group(cover)
        return True, {
            "depth": depth,
            "order": len(families),
            "global_order": len(global_group),
            "matches": families == global_group,
        }

    def handle_inclusion_system(self, args):
        groupoid = self.read_input(args, expected="simplicial-groupoid")
        log = ChoiceLog()
        system = build_inclusion_system(groupoid, replay=self.read_choices(args), log=log)
        report = system.validate(groupoid)
        results = {"labels": list(system.labels), "choices": log.to_dict(), "report": report.to_dict()}
        self.emit(args, system, results)
        return report.is_valid, results

    def handle_coherent_family(self, args):
        morphism = self.read_input(args, expected="morphism")
        if not isinstance(morphism, SimplicialMorphism):
            raise PreconditionError("coherent-family needs a simplicial morphism")
        if args.inputs and len(args.inputs) >= 3:
            first = self.read_input(args, 1, "inclusion-system")
            second = self.read_input(args, 2, "inclusion-system")
        else:
            first = build_inclusion_system(morphism.source, replay=self.read_choices(args))
            second = build_inclusion_system(morphism.target)
        try:
            family = find_coherent_family(morphism, first, second)
        except NotCoherentError as error:
            return False, {"message": str(error), "subset": error.subset}
        results = {"family": family.to_dict()}
        self.emit(args, family, results)
        return True, results

    def handle_functor_g(self, args):
        morphism = self.read_input(args, expected="morphism")
        if not isinstance(morphism, CoverMorphism):
            raise PreconditionError("functor-g needs a morphism of covers")
        first = extract_binding_simplicial_groupoid(morphism.first, self.analyzer, self.max_degree(args))
        second = extract_binding_simplicial_groupoid(morphism.second, self.analyzer, self.max_degree(args))
        image = functor_G_on_morphism(morphism, first, second)
        results = {
            "maps": {str(n): len(image.maps(n)) for n in image.source.degrees},
            "isomorphism": image.is_isomorphism(),
        }
        self.emit(args, image, results)
        return True, results

    def handle_functor_c(self, args):
        morphism = self.read_input(args, expected="morphism")
        if not isinstance(morphism, SimplicialMorphism):
            raise PreconditionError("functor-c needs a morphism of simplicial groupoids")
        first_encoding, second_encoding = encode_many([(morphism.source, "1:"), (morphism.target, "2:")])
        first = build_cover_from_simplicial(morphism.source, first_encoding, tag="*1")
        second = build_cover_from_simplicial(morphism.target, second_encoding, tag="*2")
        image = functor_C_on_morphism(morphism, first, second, analyzer=self.analyzer)
        results = {"isomorphism": image.is_isomorphism(), "mapping": image.mapping.as_dict}
        self.emit(args, image, results)
        return True, results

    def handle_eta(self, args):
        cover = self.read_input(args, expected="structure")
        (trip,) = round_trip_covers([cover], self.analyzer, self.max_degree(args))
        eta = build_eta(trip, self.analyzer)
        results = {"isomorphism": eta.is_isomorphism(), "mapping": eta.mapping.as_dict}
        self.emit(args, eta, results)
        return True, results

    def handle_epsilon(self, args):
        groupoid = self.read_input(args, expected="simplicial-groupoid")
        construction, log = self._construction(args, groupoid)
        extraction = extract_binding_simplicial_groupoid(construction.result, self.analyzer)
        epsilon = build_epsilon(groupoid, construction, extraction)
        results = {"bijective": epsilon.is_bijective(), "summary": extraction.summary(), "choices": log.to_dict()}
        self.emit(args, epsilon, results)
        return True, results

    def handle_laws(self, args):
        if args.inputs:
            pairs = [("input", self.read_input(args, 0, "simplicial-groupoid"), self.read_input(args, 1, "structure"))]
        else:
            corpus = load_corpus(self.config.get("corpus_file") or None)
            laws = corpus["laws"]
            pairs = [
                (f"{g}+{c}", build_fixture(g, corpus), build_fixture(c, corpus))
                for g, c in zip(laws["groupoids"], laws["covers"])
            ]
        results = {}
        for name, groupoid, cover in pairs:
            logger.info("Checking functor laws on %s", name)
            results[name] = check_functor_laws(groupoid, cover, self.analyzer)
        holds = all(entry["failed"] == 0 for laws in results.values() for entry in laws.values())
        return holds, {"laws": results}

    def handle_z4(self, args):
        cover = build_z4_example(args.n, self.config.get("z4_max_n"))
        structure = cover.structure
        results = {
            "n": args.n,
            "sorts": {sort: len(elements) for sort, elements in structure.sorts.items()},
            "aut_count": cover.aut_count(),
            "exactness": cover.verify_exactness().to_dict(),
        }
        holds = True
        if args.depth is not None:
            determinacy = z4_depth3_determinacy(cover, args.depth, self.analyzer)
            results["determinacy"] = determinacy.to_dict()
            holds = determinacy.holds
        self.emit(args, structure, results)
        return holds, results

    def handle_ext_check(self, args):
        torsion = tuple(int(t) for t in self.split(args.torsion) or ())
        presentation = AbelianPresentation(args.rank, args.free_rank, torsion)
        elements = self.json_argument(args.elements, "--elements")
        values = self.json_argument(args.values, "--values")
        check = morphism_extension_check(presentation, elements, values)
        return check.extends, check.to_dict()

    def handle_rel_lattice(self, args):
        generators = self.json_argument(args.generators, "--generators")
        bounded = bounded_relation_lattice(generators, args.bound, args.max_modulus)
        return True, bounded.to_dict()

    def handle_dcf_level(self, args):
        generators = self.json_argument(args.generators, "--generators")
        bounds = self.split(args.bounds)
        if bounds:
            system = dcf_bound_system(generators, [int(b) for b in bounds], args.modulus)
            report = system.validate_system()
            results = {"levels": list(system.indices), "report": report.to_dict()}
            self.emit(args, system, results)
            return report.is_valid, results
        groupoid = canonical_dcf_groupoid(generators, args.bound, args.modulus)
        (name,) = groupoid.object_ids
        results = {"object": name, "translations": len(groupoid.aut_group(name))}
        self.emit(args, groupoid, results)
        return True, results

    def handle_extend_section(self, args):
        generators = self.json_argument(args.generators, "--generators")
        names = self.split(args.names) or [f"h{i}" for i in range(1, len(generators) + 1)]
        values = [SectionValue.of(name, g) for name, g in zip(names, generators)]
        twists = self.json_argument(args.twists, "--twists") if args.twists else {}
        roots = {tuple(int(part) for part in key.split("/")): value for key, value in twists.items()}
        section = extend_section(AbelianPresentation(args.rank), generators, values, roots)
        samples = self.json_argument(args.samples, "--samples") if args.samples else []
        laws = section.check_laws(samples)
        points = self.json_argument(args.points, "--points") if args.points else []
        return laws.holds, {
            "section": section.to_dict(),
            "laws": laws.to_dict(),
            "root_forms": [
                {"point": [str(q) for q in point], "roots": section.root_form(section(point))} for point in points
            ],
        }

    def random_sweep(self):
        """Validate every groupoid of the seeded random corpus and build an inclusion system for it."""
        seed, count = self.config.get("fuzz_seed"), self.config.get("fuzz_instances")
        failures = []
        for index, groupoid in enumerate(random_corpus(seed, count)):
            report = groupoid.validate()
            if report.is_valid:
                union_property = groupoid.check_disjoint_union_property()
                if not union_property:
                    failures.append({"index": index, "disjoint_union_property": union_property.to_dict()})
                    continue
                report = build_inclusion_system(groupoid).validate(groupoid)
            if not report.is_valid:
                failures.append({"index": index, "report": report.to_dict()})
        logger.info("Random sweep: %d of %d instances failed", len(failures), count)
        return not failures, {"seed": seed, "instances": count, "failures": failures[:5], "failed": len(failures)}

    def handle_fixtures(self, args):
        if args.random:
            return self.random_sweep()
        corpus = load_corpus(self.config.get("corpus_file") or None)
        if not args.name:
            return True, {
                "fixtures": [
                    {"name": entry["name"], "kind": entry["kind"], "description": entry.get("description", "")}
                    for entry in corpus["fixtures"]
                ]
            }
        value = build_fixture(args.name, corpus)
        results = {"name": args.name, "kind": kind_of(value), "digest": digest(serialize_document(value, None))}
        self.emit(args, value, results)
        return True, results

    def handle_schema(self, args):
        return True, {"kind": args.kind, "schema": document_schema(args.kind)}

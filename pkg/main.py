#!/usr/bin/env python
# /// script
# requires-python = ">=3.12"
# dependencies = [
#     "pydantic>=2.9.1",
#     "toml>=0.10.2",
#     "PyYAML>=6.0.2",
#     "sympy>=1.14",
# ]
# ///

"""
main.py - Command-line front end for gcover: covers, binding groupoids and the
simplicial groupoids that classify them.

Every verb reads JSON documents, runs one construction or check, and writes a
report document (to --out, or to stdout). Exit status is 0 when the check
holds, 1 when it fails with a report, 2 on usage or document errors.

Usage:
    python main.py VERB [options]

Verbs:
    validate, aut, restrict, stab-embed            documents and structures
    extract, build-cover, verify-binding,
    projective-limit                               covers <-> simplicial groupoids
    inclusion-system, coherent-family              free choices and their replay
    functor-g, functor-c, eta, epsilon, laws       the functors and their laws
    z4, ext-check, rel-lattice, dcf-level,
    extend-section                                 exact-sequence examples
    fixtures, schema                               bundled fixtures and schemas

Common options:
    --in PATH                 Input document (repeat for verbs taking several).
    --out PATH                Write the report here instead of stdout.
    --emit PATH               Write the constructed document (cover, groupoid, ...).
    --seed-choices PATH       Replay a free-choice log when building inclusion systems.
    --max-degree N            Degree cap for extraction and projective limits.
    --orbit-arity N           Arity bound for orbit relations.
    -d, --data-directory DIR  Directory holding config.toml (default is ~/.gcover)
    --create-config           Create a default configuration file if one does not exist.
    --verbose                 Log progress to stderr.

Environment Variables:
    GCOVER_ORBIT_ARITY        Orbit arity if not given on the command line.
    GCOVER_MAX_DEGREE         Degree cap if not given on the command line.
"""

import argparse
import logging
import sys

from modules.CommandHandler import CommandHandler
from modules.Config import Config
from modules.Version import VERSION


def add_common_arguments(parser):
    parser.add_argument("--in", dest="inputs", action="append", metavar="PATH", help="Input document (repeatable)")
    parser.add_argument("--out", type=str, help="Report file (default: stdout)")
    parser.add_argument("--emit", type=str, help="File for the constructed document")
    parser.add_argument("--seed-choices", type=str, help="Free-choice log to replay")
    parser.add_argument("--max-degree", type=int, help="Degree cap (0 = all degrees)")
    parser.add_argument("--orbit-arity", type=int, help="Arity bound for orbit relations")
    parser.add_argument("-d", "--data-directory", type=str, help="Data directory for the configuration file")
    parser.add_argument("--verbose", action="store_true", help="Log progress to stderr")


def add_restriction_arguments(parser):
    parser.add_argument("--sorts", type=str, help="Comma-separated sorts to keep")
    parser.add_argument("--parameters", type=str, help="Comma-separated elements to name")
    parser.add_argument("--component", type=str, help="Fiber subset, e.g. a,b")
    parser.add_argument("--fix-base", action="store_true", help="Fix the base sorts pointwise")


def build_parser():
    parser = argparse.ArgumentParser(description="Covers, binding groupoids and simplicial groupoids")
    parser.add_argument("-v", "--version", action="version", version=f"%(prog)s {VERSION}")
    parser.add_argument("--create-config", action="store_true", help="Create a default configuration file")
    parser.add_argument("-d", "--data-directory", dest="root_data_directory", type=str, help=argparse.SUPPRESS)
    subparsers = parser.add_subparsers(dest="verb", metavar="VERB")

    def verb(name, help_text):
        subparser = subparsers.add_parser(name, help=help_text)
        add_common_arguments(subparser)
        return subparser

    verb("validate", "Validate any document")
    add_restriction_arguments(verb("restrict", "Restrict a structure to sorts or fibers"))
    add_restriction_arguments(verb("stab-embed", "Check that a restriction is stably embedded"))
    aut = verb("aut", "Automorphism group of a structure")
    aut.add_argument("--fix-base", action="store_true", help="Only automorphisms over the base sorts")
    verb("extract", "Binding simplicial groupoid of a cover")
    build_cover = verb("build-cover", "Cover built from a simplicial groupoid or a plain groupoid")
    build_cover.add_argument("--verify", action="store_true", help="Also lift every automorphism of the base")
    verify_binding = verb("verify-binding", "Compare binding groups with groupoid automorphisms")
    verify_binding.add_argument("--component", type=str, help="Component label, e.g. a,b (default: all)")
    verb("projective-limit", "Compatible families of binding automorphisms")
    verb("inclusion-system", "Commuting system of inclusions, with its choice log")
    verb("coherent-family", "Coherent family for a simplicial morphism")
    verb("functor-g", "Image of a cover morphism under G")
    verb("functor-c", "Image of a simplicial isomorphism under C")
    verb("eta", "Unit isomorphism M -> C(G(M))")
    verb("epsilon", "Counit isomorphism SG -> G(C(SG))")
    verb("laws", "Functor laws on the given inputs or on the bundled corpus")
    z4 = verb("z4", "The 0 -> (Z/2)^n -> (Z/4)^n -> (Z/2)^n -> 0 example")
    z4.add_argument("--n", type=int, required=True, help="Exponent n")
    z4.add_argument("--depth", type=int, help="Also check determinacy by families of this depth")
    ext_check = verb("ext-check", "Does a map on generators extend to a morphism?")
    ext_check.add_argument("--rank", type=int, required=True, help="Rank of the base group Z^m")
    ext_check.add_argument("--free-rank", type=int, default=0, help="Free rank of the kernel")
    ext_check.add_argument("--torsion", type=str, help="Comma-separated torsion orders of the kernel")
    ext_check.add_argument("--elements", type=str, required=True, help="JSON list of base elements")
    ext_check.add_argument("--values", type=str, required=True, help="JSON list of kernel values")
    rel_lattice = verb("rel-lattice", "Relation lattice with a coefficient bound")
    rel_lattice.add_argument("--generators", type=str, required=True, help="JSON list of generators")
    rel_lattice.add_argument("--bound", type=int, required=True, help="Coefficient bound N")
    rel_lattice.add_argument("--max-modulus", type=int, default=32, help="Largest modulus tried for witnesses")
    dcf_level = verb("dcf-level", "Canonical DCF groupoid at one level, or a system of levels")
    dcf_level.add_argument("--generators", type=str, required=True, help="JSON list of generators")
    dcf_level.add_argument("--bound", type=int, default=1, help="Coefficient bound N")
    dcf_level.add_argument("--bounds", type=str, help="Comma-separated bounds for a projective system")
    dcf_level.add_argument("--modulus", type=int, required=True, help="Order q of K = Z/q")
    extend = verb("extend-section", "Extend a section to the rational span")
    extend.add_argument("--rank", type=int, required=True, help="Dimension m of Q^m")
    extend.add_argument("--generators", type=str, required=True, help="JSON list of generators")
    extend.add_argument("--names", type=str, help="Comma-separated names of the section values")
    extend.add_argument("--samples", type=str, help="JSON list of coordinate pairs [x, y]")
    extend.add_argument("--points", type=str, help="JSON list of points to evaluate")
    extend.add_argument("--twists", type=str, help='JSON map "i/n": t making h_{i,1/n} carry the root of unity exp(2πi t)')
    fixtures = verb("fixtures", "List bundled fixtures, or write one")
    fixtures.add_argument("--name", type=str, help="Fixture name")
    fixtures.add_argument("--random", action="store_true", help="Validate the seeded random corpus instead")
    schema = verb("schema", "JSON schema of the envelope or of a payload kind")
    schema.add_argument("--kind", type=str, help="Payload kind")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)

    if getattr(args, "verbose", False):
        logging.basicConfig(level=logging.INFO, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")

    data_directory = getattr(args, "data_directory", None) or args.root_data_directory
    config_overrides = {
        "orbit_arity": getattr(args, "orbit_arity", None),
        "max_degree": getattr(args, "max_degree", None),
    }
    config = Config(data_directory=data_directory, overrides=config_overrides, create_config=args.create_config)

    if args.verb is None:
        if not args.create_config:
            parser.print_help()
            return 2
        return 0  # Exit after creating the config file

    return CommandHandler(config).handle_command(args)


if __name__ == "__main__":
    sys.exit(main())

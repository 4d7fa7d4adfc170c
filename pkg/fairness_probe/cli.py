"""Command line front end.

Subcommands:
    group     group discrimination score of a subject with respect to --chars
    causal    causal discrimination score with respect to --chars
    search    every minimal subset whose group or causal score reaches --threshold
    apparent  apparent score over a test suite (--suite) or an operational profile (--profile)
    fixture   run a built-in fixture as a wire-protocol subject on standard input and output
    oracle    exact scores (or an exact search) by enumerating the whole domain

Exit codes: 0 success, 1 usage or configuration error, 2 subject or protocol error, 3 schema, suite or profile parse
error, 4 bound exceeded.

"""

import argparse
import io
import logging
import os
import sys
from dataclasses import replace
from logging.handlers import RotatingFileHandler

from scrapy.settings import Settings
from scrapy.utils.log import configure_logging

from . import settings as defaults
from .cache import EvalCache, load_cache, save_cache
from .engine import (GroupFrequency, ScoreResult, group_score, causal_score, apparent_group_score,
                     apparent_causal_score, GROUP, CAUSAL)
from .exceptions import FairnessProbeError, SchemaError, SubjectError, UsageError
from .oracle import exhaustive_group, exhaustive_causal, exhaustive_search
from .pipelines import ReportExportPipeline
from .processors import ScoreReport, SearchReport
from .sampler import SamplingConfig
from .schema import load_schema
from .search import SearchConfig, SearchResult, discrimination_search, exact_result
from .subjects.fixtures import FixtureSubject, parse_fixture, serve_fixture
from .subjects.process import ExternalProcessSubject
from .suites import load_suite, load_profile, generate_suite, write_suite

logger = logging.getLogger(__name__)

# Command line flag destination -> setting name. Flags left unset keep the settings module value.
SETTING_FLAGS = {
    'conf': 'CONFIDENCE',
    'eps': 'EPSILON',
    'seed': 'SEED',
    'max_samples': 'MAX_SAMPLES',
    'sampling_threshold': 'SAMPLING_THRESHOLD',
    'exhaustive_limit': 'EXHAUSTIVE_LIMIT',
    'inner_cap': 'CAUSAL_INNER_CAP',
    'timeout': 'SUBJECT_TIMEOUT',
    'verify_determinism': 'VERIFY_DETERMINISM',
    'parallel': 'PARALLEL_WORKERS',
    'threshold': 'THRESHOLD',
    'group_shortcut': 'GROUP_SHORTCUT',
    'prune': 'PRUNE',
    'suite_size': 'SUITE_SIZE',
    'log_level': 'LOG_LEVEL',
    'log_file': 'LOG_ROTATING_FILE',
}


class _ArgumentParser(argparse.ArgumentParser):

    """Argument parser that raises UsageError instead of exiting with status 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _common(parser, subject=True):
    parser.add_argument('--schema', required=True, help="schema document (JSON)")
    parser.add_argument('--log-level', help=f"log level (default: {defaults.LOG_LEVEL})")
    parser.add_argument('--log-file', help="also log to this rotating file")
    if not subject:
        return
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument('--subject', help="command line of the subject, shell-split")
    source.add_argument('--fixture', help="built-in fixture spec, for example echo-char:0")
    parser.add_argument('--reentrant', action='store_true', help="start one subject process per worker")
    parser.add_argument('--timeout', type=float, help=f"seconds per response (default: {defaults.SUBJECT_TIMEOUT})")
    parser.add_argument('--conf', type=float, help=f"confidence level (default: {defaults.CONFIDENCE})")
    parser.add_argument('--eps', type=float, help=f"error margin (default: {defaults.EPSILON})")
    parser.add_argument('--seed', type=int, help=f"run seed (default: {defaults.SEED})")
    parser.add_argument('--max-samples', type=int, help=f"samples per estimate (default: {defaults.MAX_SAMPLES})")
    parser.add_argument('--sampling-threshold', type=int,
                        help=f"samples before the margin test (default: {defaults.SAMPLING_THRESHOLD})")
    parser.add_argument('--exhaustive-limit', type=int,
                        help=f"enumerate domains up to this size (default: {defaults.EXHAUSTIVE_LIMIT})")
    parser.add_argument('--inner-cap', type=int,
                        help=f"perturbations per base input (default: {defaults.CAUSAL_INNER_CAP})")
    parser.add_argument('--parallel', type=int, metavar='WORKERS',
                        help=f"engine workers (default: {defaults.PARALLEL_WORKERS})")
    parser.add_argument('--verify-determinism', action='store_const', const=True,
                        help=f"re-evaluate {defaults.VERIFY_FRACTION:.0%}% of cache hits (default: off)")
    parser.add_argument('--no-cache', action='store_true', help="evaluate every test, even repeated ones")
    parser.add_argument('--cache-file', help="load cached decisions from, and save them to, this record file")
    parser.add_argument('--report', help="report destination (default: standard output)")


def build_parser():
    parser = _ArgumentParser(prog='fairness_probe', description="Black-box discrimination testing.")
    commands = parser.add_subparsers(dest='command', required=True)

    for name, description in ((GROUP, "group discrimination score"), (CAUSAL, "causal discrimination score")):
        command = commands.add_parser(name, help=description)
        _common(command)
        command.add_argument('--chars', required=True, help="comma-separated characteristic names")
        command.add_argument('--export-suite', help="write the generated test suite to this CSV file")

    command = commands.add_parser('search', help="minimal discriminating subsets")
    _common(command)
    command.add_argument('--kind', choices=(GROUP, CAUSAL), help=f"score kind (default: {defaults.SEARCH_KIND})")
    command.add_argument('--threshold', type=float, help=f"threshold theta (default: {defaults.THRESHOLD})")
    command.add_argument('--max-subset-size', type=int, help="largest subset visited (default: all characteristics)")
    command.add_argument('--group-shortcut', action='store_const', const=True,
                         help="accept a subset whose group score reaches the threshold (default: off)")
    command.add_argument('--no-prune', dest='prune', action='store_const', const=False,
                         help="score every subset instead of skipping supersets of discriminating ones")

    command = commands.add_parser('apparent', help="apparent discrimination over a suite or profile")
    _common(command)
    command.add_argument('--chars', required=True, help="comma-separated characteristic names")
    command.add_argument('--kind', choices=(GROUP, CAUSAL), default=GROUP, help="score kind (default: group)")
    partial = command.add_mutually_exclusive_group(required=True)
    partial.add_argument('--suite', help="test suite (CSV)")
    partial.add_argument('--profile', help="operational profile (JSON)")
    command.add_argument('--suite-size', type=int,
                         help=f"inputs drawn from the profile for group scores (default: {defaults.SUITE_SIZE})")

    command = commands.add_parser('fixture', help="serve a fixture over the wire protocol")
    command.add_argument('spec', help="fixture spec, for example xor:0:1")
    _common(command, subject=False)

    command = commands.add_parser('oracle', help="exact scores by enumeration")
    _common(command)
    command.add_argument('--kind', choices=(GROUP, CAUSAL), default=GROUP, help="score kind (default: group)")
    command.add_argument('--chars', help="comma-separated characteristic names (omit with --search)")
    command.add_argument('--search', action='store_true', help="exact discrimination search")
    command.add_argument('--threshold', type=float, help=f"threshold theta (default: {defaults.THRESHOLD})")
    return parser


def get_settings(args):
    """Settings from the settings module, overridden by the flags given on the command line."""
    settings = Settings()
    settings.setmodule(defaults, priority='project')
    for dest, name in SETTING_FLAGS.items():
        value = getattr(args, dest, None)
        if value is not None:
            settings.set(name, value, priority='cmdline')
    if getattr(args, 'command', None) == 'search' and args.kind:
        settings.set('SEARCH_KIND', args.kind, priority='cmdline')
    return settings


def _configure_logging(settings):
    configure_logging(settings)
    path = settings.get('LOG_ROTATING_FILE')
    if path:
        directory = os.path.dirname(path)
        if directory and not os.path.exists(directory):
            os.makedirs(directory)
        handler = RotatingFileHandler(path, maxBytes=settings.getint('LOG_ROTATING_MAX_BYTES'),
                                      backupCount=settings.getint('LOG_ROTATING_BACKUPS'))
        handler.setFormatter(logging.Formatter(settings.get('LOG_FORMAT')))
        logging.getLogger().addHandler(handler)


def _subset(args, schema):
    try:
        return schema.subset_of(name.strip() for name in args.chars.split(','))
    except SchemaError as error:
        raise UsageError(f"--chars: {error}") from None


def _subject(args, schema, settings):
    if args.fixture:
        return FixtureSubject(parse_fixture(args.fixture), schema)
    return ExternalProcessSubject(args.subject, timeout=settings.getfloat('SUBJECT_TIMEOUT'), reentrant=args.reentrant)


def _cache(args, schema, settings):
    verify = settings.getfloat('VERIFY_FRACTION') if settings.getbool('VERIFY_DETERMINISM') else 0.0
    cache = EvalCache(enabled=not args.no_cache, verify_fraction=verify, seed=settings.getint('SEED'))
    if args.cache_file and os.path.exists(args.cache_file):
        load_cache(cache, args.cache_file, schema)
    return cache


def write_report(result, destination, schema, settings, cfg=None, mode=None, cache_hits=None, partial=False):
    """Write the report of a ScoreResult or SearchResult.

    Args:
        result (ScoreResult or SearchResult): A complete or, with partial set, interrupted measurement.
        destination (str): Report path, or None for standard output.
        schema (Schema): The input type, for names and labels.
        settings (scrapy.settings.Settings): Report version and indentation.
        cfg (SearchConfig): Configuration of the search, for search results.
        mode (str): Report mode; defaults to the result's kind, or search.
        cache_hits (int): Cache hits of the whole search, for search results.
        partial (bool): Mark the report as partial.

    """
    version = settings.getint('REPORT_VERSION')
    if isinstance(result, SearchResult):
        item = SearchReport(schema, version, mode or 'search')(result, cfg, cache_hits, partial)
    else:
        item = ScoreReport(schema, version, mode)(result, partial)
    with ReportExportPipeline.from_settings(settings, destination) as pipeline:
        pipeline.process_item(item)


def _measure(args, schema, subject, cache, settings):
    cfg = SamplingConfig.from_settings(settings)
    subset = _subset(args, schema)
    if args.command == GROUP:
        result, suite = group_score(subject, schema, subset, cfg, cache, workers=settings.getint('PARALLEL_WORKERS'))
    else:
        result, suite = causal_score(subject, schema, subset, cfg, cache)
    if args.export_suite:
        with open(args.export_suite, 'wb') as f:
            write_suite(suite, schema, f)
    return result, {}


def _search(args, schema, subject, cache, settings):
    cfg = SearchConfig.from_settings(settings, max_subset_size=args.max_subset_size)
    try:
        result = discrimination_search(subject, schema, cfg, cache)
    except SubjectError as error:
        error.report = {'cfg': cfg, 'cache_hits': cache.hits}
        raise
    return result, {'cfg': cfg, 'cache_hits': cache.hits}


def _apparent(args, schema, subject, cache, settings):
    subset = _subset(args, schema)
    cfg = SamplingConfig.from_settings(settings)
    source = load_suite(args.suite, schema) if args.suite else load_profile(args.profile, schema)
    if args.kind == CAUSAL:
        return apparent_causal_score(subject, schema, subset, source, cfg, cache), {}
    if args.suite:
        return apparent_group_score(subject, schema, subset, source, cache), {}
    suite = generate_suite(schema, source, settings.getint('SUITE_SIZE'), cfg.seed)
    return replace(apparent_group_score(subject, schema, subset, suite, cache), source='profile', seed=cfg.seed), {}


def _oracle(args, schema, subject, cache, settings):
    bound = settings.getint('ORACLE_DOMAIN_BOUND')
    if args.search:
        cfg = SearchConfig(theta=settings.getfloat('THRESHOLD'), kind=args.kind)
        result = exhaustive_search(subject, schema, cfg.theta, cfg.kind, cache, bound,
                                   settings.getint('ORACLE_SUBSET_BOUND'))
        return result, {'cfg': cfg, 'mode': 'oracle-search'}
    if not args.chars:
        raise UsageError("oracle needs --chars or --search")
    subset = _subset(args, schema)
    if args.kind == GROUP:
        score, frequencies = exhaustive_group(subject, schema, subset, cache, bound)
        size = schema.domain_size // len(frequencies)
        rows = tuple(GroupFrequency(a, p, size, 0.0, exhaustive=True) for a, p in frequencies.items())
        result = ScoreResult(GROUP, subset, score, margin=0.0, group_frequencies=rows, exact=True,
                             tests_generated=schema.domain_size)
    else:
        result = replace(exact_result(CAUSAL, subset, exhaustive_causal(subject, schema, subset, cache, bound)),
                         tests_generated=schema.domain_size)
    return result, {'mode': f"oracle-{args.kind}"}


MEASURES = {GROUP: _measure, CAUSAL: _measure, 'search': _search, 'apparent': _apparent, 'oracle': _oracle}


def _run_measure(args, settings):
    schema = load_schema(args.schema)
    cache = _cache(args, schema, settings)
    try:
        with _subject(args, schema, settings) as subject:
            result, options = MEASURES[args.command](args, schema, subject, cache, settings)
    except SubjectError as error:
        if error.partial is not None:
            write_report(error.partial, args.report, schema, settings, partial=True,
                         **getattr(error, 'report', {}))
        raise
    finally:
        if args.cache_file:
            save_cache(cache, args.cache_file)
    write_report(result, args.report, schema, settings, **options)
    return 0


def _run_fixture(args, settings):
    schema = load_schema(args.schema)
    stdin = io.TextIOWrapper(sys.stdin.buffer, encoding='utf-8', newline='\n')
    stdout = io.TextIOWrapper(sys.stdout.buffer, encoding='utf-8', newline='\n')
    return serve_fixture(parse_fixture(args.spec), schema, stdin, stdout)


def run_cli(argv=None):
    """Run one command and return its exit code.

    Args:
        argv (list): Arguments without the program name; defaults to sys.argv[1:].

    Returns:
        code (int): 0 on success, otherwise the exit code of the error.

    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as error:
        sys.stderr.write(f"{error}\n")
        return error.exit_code
    except SystemExit as exit:
        return exit.code or 0

    settings = get_settings(args)
    _configure_logging(settings)
    try:
        if args.command == 'fixture':
            return _run_fixture(args, settings)
        return _run_measure(args, settings)
    except FairnessProbeError as error:
        logger.error(str(error))
        return error.exit_code


def main():
    sys.exit(run_cli())

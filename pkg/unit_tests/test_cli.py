import io
import json
import os
import shlex
import sys
import tempfile
import unittest
from unittest import mock

from fairness_probe.cli import build_parser, get_settings, run_cli
from fairness_probe.schema import serialize_schema
from unit_tests.helpers import REPO_ROOT, make_schema


class TestSettings(unittest.TestCase):

    def test_defaults(self):
        settings = get_settings(build_parser().parse_args(['search', '--schema', 's.json', '--fixture', 'xor:0:1']))
        self.assertEqual(settings.getfloat('CONFIDENCE'), 0.99)
        self.assertEqual(settings.getfloat('THRESHOLD'), 0.5)
        self.assertEqual(settings.get('SEARCH_KIND'), 'causal')
        self.assertTrue(settings.getbool('PRUNE'))

    def test_overrides(self):
        args = build_parser().parse_args(['search', '--schema', 's.json', '--fixture', 'xor:0:1', '--conf', '0.95',
                                          '--threshold', '0.3', '--kind', 'group', '--no-prune', '--seed', '9'])
        settings = get_settings(args)
        self.assertEqual(settings.getfloat('CONFIDENCE'), 0.95)
        self.assertEqual(settings.getfloat('THRESHOLD'), 0.3)
        self.assertEqual(settings.get('SEARCH_KIND'), 'group')
        self.assertFalse(settings.getbool('PRUNE'))
        self.assertEqual(settings.getint('SEED'), 9)


class TestRunCli(unittest.TestCase):

    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.schema = self.write('schema.json', serialize_schema(make_schema(2, 100, names=['group', 'aux'])))
        self.report = os.path.join(self.directory.name, 'report.json')

    def tearDown(self):
        self.directory.cleanup()

    def write(self, name, text):
        path = os.path.join(self.directory.name, name)
        with open(path, 'w', encoding='utf-8') as f:
            f.write(text)
        return path

    def run_report(self, *argv):
        code = run_cli(list(argv) + ['--schema', self.schema, '--report', self.report, '--log-level', 'WARNING'])
        with open(self.report, encoding='utf-8') as f:
            return code, json.load(f)

    def test_group(self):
        code, report = self.run_report('group', '--fixture', 'fraction:0:1:0.30,0.40', '--chars', 'group')
        self.assertEqual(code, 0)
        self.assertEqual(report['mode'], 'group')
        self.assertEqual(report['subset'], ['group'])
        self.assertAlmostEqual(report['score'], 0.1, places=12)
        self.assertTrue(report['exact'])
        self.assertEqual(report['version'], 1)
        self.assertEqual([row['assignment'] for row in report['groups']], [{'group': 'v0'}, {'group': 'v1'}])

    def test_sampled_group(self):
        code, report = self.run_report('group', '--fixture', 'fraction:0:1:0.23,0.65', '--chars', 'group',
                                       '--exhaustive-limit', '0', '--seed', '5')
        self.assertEqual(code, 0)
        self.assertFalse(report['exact'])
        self.assertLessEqual(abs(report['score'] - 0.42), 0.15)
        self.assertEqual(report['seed'], 5)
        self.assertEqual(report['confidence'], 0.99)

    def test_causal_exports_suite(self):
        suite = os.path.join(self.directory.name, 'suite.csv')
        code, report = self.run_report('causal', '--fixture', 'echo-char:0', '--chars', 'group',
                                       '--export-suite', suite)
        self.assertEqual(code, 0)
        self.assertEqual(report['score'], 1.0)
        with open(suite, encoding='utf-8') as f:
            lines = f.read().splitlines()
        self.assertEqual(lines[0], 'group,aux')
        self.assertEqual(len(lines), 201)

    def test_search(self):
        code, report = self.run_report('search', '--fixture', 'echo-char:0', '--threshold', '0.5')
        self.assertEqual(code, 0)
        self.assertEqual(report['mode'], 'search')
        self.assertEqual([row['subset'] for row in report['minimal_sets']], [['group']])
        self.assertEqual(report['stats']['subsets_evaluated'], 2)
        self.assertEqual(report['stats']['pruned'], [['group', 'aux']])

    def test_search_without_pruning(self):
        _, pruned = self.run_report('search', '--fixture', 'xor:0:1', '--kind', 'group')
        _, exhaustive = self.run_report('search', '--fixture', 'xor:0:1', '--kind', 'group', '--no-prune')
        self.assertEqual(pruned['minimal_sets'], exhaustive['minimal_sets'])
        self.assertEqual(exhaustive['stats']['subsets_evaluated'], 3)
        self.assertEqual(pruned['stats']['subsets_evaluated'], 2)
        self.assertEqual(exhaustive['stats']['pruned'], [])

    def test_apparent_suite(self):
        suite = self.write('suite.csv', 'group,aux\nv0,v0\nv0,v50\nv1,v0\nv1,v60\n')
        code, report = self.run_report('apparent', '--fixture', 'fraction:0:1:0.30,0.40', '--chars', 'group',
                                       '--suite', suite)
        self.assertEqual(code, 0)
        self.assertEqual(report['mode'], 'apparent-group')
        self.assertEqual(report['score'], 0.0)
        self.assertNotIn('confidence', report)

    def test_apparent_profile(self):
        profile = self.write('profile.json', json.dumps({'aux': {'v10': 1}}))
        code, report = self.run_report('apparent', '--fixture', 'fraction:0:1:0.30,0.40', '--chars', 'group',
                                       '--kind', 'causal', '--profile', profile)
        self.assertEqual(code, 0)
        self.assertEqual(report['mode'], 'apparent-causal')
        self.assertEqual(report['score'], 0.0)
        self.assertEqual(report['stats']['source'], 'profile')

    def test_oracle(self):
        code, report = self.run_report('oracle', '--fixture', 'fraction:0:1:0.30,0.40', '--chars', 'group')
        self.assertEqual(code, 0)
        self.assertEqual(report['mode'], 'oracle-group')
        self.assertAlmostEqual(report['score'], 0.1, places=12)
        code, report = self.run_report('oracle', '--fixture', 'echo-char:0', '--search', '--kind', 'causal')
        self.assertEqual(report['mode'], 'oracle-search')
        self.assertEqual([row['subset'] for row in report['minimal_sets']], [['group']])

    def test_oracle_bound(self):
        with mock.patch('fairness_probe.settings.ORACLE_DOMAIN_BOUND', 100):
            code = run_cli(['oracle', '--fixture', 'echo-char:0', '--chars', 'group', '--schema', self.schema,
                            '--report', self.report])
        self.assertEqual(code, 4)

    def test_usage_errors(self):
        self.assertEqual(run_cli(['group', '--fixture', 'echo-char:0', '--chars', 'group']), 1)
        self.assertEqual(run_cli(['group', '--schema', self.schema, '--fixture', 'echo-char:0', '--chars', 'age']), 1)
        self.assertEqual(run_cli(['search', '--schema', self.schema, '--fixture', 'echo-char:0', '--eps', '2']), 1)
        self.assertEqual(run_cli(['group', '--schema', self.schema, '--fixture', 'echo-char:9', '--chars', 'group']), 1)
        self.assertEqual(run_cli(['group', '--schema', self.schema, '--fixture', 'echo-char:0', '--chars', 'group',
                                  '--sampling-threshold', '0']), 1)
        self.assertEqual(run_cli(['frobnicate']), 1)

    def test_help(self):
        with mock.patch('sys.stdout', new_callable=io.StringIO) as stdout:
            self.assertEqual(run_cli(['search', '--help']), 0)
        self.assertIn('(default: 0.5)', stdout.getvalue())

    def test_schema_errors(self):
        broken = self.write('broken.json', '{"characteristics":[{"name":"a","values":["x","x"]}]}')
        self.assertEqual(run_cli(['group', '--schema', broken, '--fixture', 'const:true', '--chars', 'a']), 3)
        missing = os.path.join(self.directory.name, 'missing.json')
        self.assertEqual(run_cli(['group', '--schema', missing, '--fixture', 'const:true', '--chars', 'a']), 3)

    def test_cache_file(self):
        cache = os.path.join(self.directory.name, 'cache.tsv')
        first = self.run_report('group', '--fixture', 'echo-char:0', '--chars', 'group', '--cache-file', cache)[1]
        with open(cache, encoding='utf-8') as f:
            self.assertEqual(len(f.read().splitlines()), 200)
        second = self.run_report('group', '--fixture', 'echo-char:0', '--chars', 'group', '--cache-file', cache)[1]
        self.assertEqual(first['stats']['cache_hits'], 0)
        self.assertEqual(second['stats']['cache_hits'], 200)
        self.assertEqual(first['score'], second['score'])


class TestExternalSubject(unittest.TestCase):

    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.schema = os.path.join(self.directory.name, 'schema.json')
        with open(self.schema, 'w', encoding='utf-8') as f:
            f.write(serialize_schema(make_schema(2, 3, 2, 2, names=['race', 'age', 'income', 'region'])))
        self.environ = mock.patch.dict(os.environ, {'PYTHONPATH': REPO_ROOT})
        self.environ.start()

    def tearDown(self):
        self.environ.stop()
        self.directory.cleanup()

    def subject(self, fixture):
        return shlex.join([sys.executable, '-m', 'fairness_probe', 'fixture', fixture, '--schema', self.schema,
                           '--log-level', 'WARNING'])

    def report(self, name, *argv):
        path = os.path.join(self.directory.name, name)
        code = run_cli(list(argv) + ['--schema', self.schema, '--report', path, '--log-level', 'WARNING'])
        with open(path, 'rb') as f:
            return code, f.read()

    def test_reports_are_byte_identical(self):
        argv = ['search', '--subject', self.subject('table:3'), '--threshold', '0.3', '--exhaustive-limit', '0',
                '--seed', '21']
        first_code, first = self.report('first.json', *argv)
        second_code, second = self.report('second.json', *argv)
        self.assertEqual((first_code, second_code), (0, 0))
        self.assertEqual(first, second)
        self.assertIn(b'"minimal_sets"', first)

    def test_matches_in_process_fixture(self):
        argv = ['causal', '--chars', 'race,income', '--exhaustive-limit', '0', '--seed', '4']
        _, external = self.report('external.json', *(argv + ['--subject', self.subject('xor:0:1')]))
        _, internal = self.report('internal.json', *(argv + ['--fixture', 'xor:0:1']))
        self.assertEqual(json.loads(external), json.loads(internal))

    def test_malformed_subject_writes_partial_report(self):
        script = "import sys\nfor line in sys.stdin:\n    print('maybe', flush=True)\n"
        code, report = self.report('partial.json', 'group', '--chars', 'race',
                                   '--subject', shlex.join([sys.executable, '-c', script]))
        self.assertEqual(code, 2)
        self.assertTrue(json.loads(report)['stats']['partial'])

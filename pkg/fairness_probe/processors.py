"""Processors that turn scores and search results into report items.

Each processor is a callable configured with the schema, so characteristic positions and label indices become names
and label texts only here, at the report boundary.

"""

from .items import ReportItem
from .schema import schema_digest


def _set(item, **fields):
    for name, value in fields.items():
        if value is not None:
            item[name] = value
    return item


class SubsetNames(object):

    """Maps a CharSubset to the list of its characteristic names."""

    def __init__(self, schema):
        self.schema = schema

    def __call__(self, subset):
        return [self.schema.characteristics[i].name for i in subset]


class GroupRows(object):

    """Maps group frequencies to report rows.

    Each row names the group by its labels, then gives p, r and, for sampled frequencies, the margin and the
    sampling flags.

    """

    def __init__(self, schema):
        self.schema = schema

    def __call__(self, subset, frequencies):
        rows = []
        for frequency in frequencies:
            assignment = {self.schema.characteristics[i].name: self.schema.characteristics[i].labels[v]
                          for i, v in zip(subset, frequency.assignment)}
            row = {'assignment': assignment, 'p': frequency.p, 'r': frequency.r}
            if frequency.margin is not None:
                row['margin'] = frequency.margin
                row['exhaustive'] = frequency.exhaustive
                row['max_samples_hit'] = frequency.max_samples_hit
            rows.append(row)
        return rows


class ScoreReport(object):

    """Builds the report item of one ScoreResult.

    Attributes:
        mode (str): Report mode; defaults to the result's kind.

    """

    def __init__(self, schema, version, mode=None):
        self.schema = schema
        self.version = version
        self.mode = mode
        self.subset_names = SubsetNames(schema)
        self.group_rows = GroupRows(schema)

    def __call__(self, result, partial=False):
        stats = {'tests_generated': result.tests_generated, 'cache_hits': result.cache_hits}
        _set(stats, epsilon=result.epsilon, source=result.source, partial=partial or None)
        return _set(
            ReportItem(),
            version=self.version,
            mode=self.mode or result.kind,
            schema_digest=schema_digest(self.schema),
            subset=self.subset_names(result.subset),
            score=result.score,
            margin=result.margin,
            confidence=result.confidence,
            exact=result.exact,
            lower_bound=result.lower_bound,
            groups=self.group_rows(result.subset, result.group_frequencies) or None,
            stats=stats,
            seed=result.seed,
        )


class SearchReport(object):

    """Builds the report item of one SearchResult."""

    def __init__(self, schema, version, mode='search'):
        self.schema = schema
        self.version = version
        self.mode = mode
        self.subset_names = SubsetNames(schema)

    def __call__(self, result, cfg, cache_hits=None, partial=False):
        minimal_sets = []
        for subset, score in result.minimal_sets:
            row = {'subset': self.subset_names(subset), 'kind': score.kind, 'score': score.score}
            _set(row, margin=score.margin, exact=score.exact, lower_bound=score.lower_bound or None)
            minimal_sets.append(row)
        stats = {
            'kind': cfg.kind,
            'theta': cfg.theta,
            'tests_generated': result.tests_total,
            'subsets_evaluated': result.subsets_evaluated,
            'subsets_pruned': result.subsets_pruned,
        }
        _set(stats, cache_hits=cache_hits, reduction_factor=result.reduction_factor, partial=partial or None)
        stats['pruned'] = [self.subset_names(subset) for subset in result.pruned]
        return _set(
            ReportItem(),
            version=self.version,
            mode=self.mode,
            schema_digest=schema_digest(self.schema),
            confidence=cfg.sampling.confidence if self.mode == 'search' else None,
            minimal_sets=minimal_sets,
            stats=stats,
            seed=cfg.sampling.seed if self.mode == 'search' else None,
        )

"""items.py contains the Scrapy item every report is written from.

A report is a flat document whose keys always appear in REPORT_FIELDS order. Fields that do not apply to a report are
left unset, so the exporter omits them instead of writing null.

More Info:
    https://docs.scrapy.org/en/latest/topics/items.html

"""

import scrapy

REPORT_FIELDS = ['version', 'mode', 'schema_digest', 'subset', 'score', 'margin', 'confidence', 'exact',
                 'lower_bound', 'groups', 'minimal_sets', 'stats', 'seed']


class ReportItem(scrapy.Item):

    """Scrapy item holding one report.

    Attributes:
        version (scrapy.Field): Int report format version.
        mode (scrapy.Field): Str naming what was measured, for example: group, causal, apparent-group, search.
        schema_digest (scrapy.Field): Str SHA-256 of the canonical schema document.
        subset (scrapy.Field): List of the characteristic names the score is about.
        score (scrapy.Field): Float discrimination score.
        margin (scrapy.Field): Float margin of error of the score.
        confidence (scrapy.Field): Float confidence level of the margin.
        exact (scrapy.Field): Bool, true when every value was computed by enumeration.
        lower_bound (scrapy.Field): Bool, true when a causal score may undercount.
        groups (scrapy.Field): List of per-group frequencies.
        minimal_sets (scrapy.Field): List of minimal discriminating sets with their scores.
        stats (scrapy.Field): Dict of test counts and search statistics.
        seed (scrapy.Field): Int seed of the run.

    """

    version = scrapy.Field()
    mode = scrapy.Field()
    schema_digest = scrapy.Field()
    subset = scrapy.Field()
    score = scrapy.Field()
    margin = scrapy.Field()
    confidence = scrapy.Field()
    exact = scrapy.Field()
    lower_bound = scrapy.Field()
    groups = scrapy.Field()
    minimal_sets = scrapy.Field()
    stats = scrapy.Field()
    seed = scrapy.Field()

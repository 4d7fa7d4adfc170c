"""Default settings for fairness_probe.

For simplicity, this file contains only settings considered important or commonly used. They are loaded into a
scrapy.settings.Settings object at project priority and can be overridden from the command line:
    https://docs.scrapy.org/en/latest/topics/settings.html

"""

# Confidence level of every adaptive estimate (the command line default, matching 99% confidence).
CONFIDENCE = 0.99

# Error margin each estimate must reach before sampling stops.
EPSILON = 0.05

# Minimum number of samples before the margin of error is checked (normal approximation rule of thumb).
SAMPLING_THRESHOLD = 30

# Hard cap on samples per estimator. Estimates that hit it are flagged in the report.
MAX_SAMPLES = 100000

# A group (or the full domain for causal scores) with at most this many inputs is enumerated instead of sampled.
EXHAUSTIVE_LIMIT = 1024

# Perturbations examined per base input when computing causal scores. Larger subsets are sampled and the score is
# flagged as a lower bound.
CAUSAL_INNER_CAP = 256

# Perturbation streams up to this size are shuffled with a full permutation, larger ones use an index permutation.
PERMUTATION_ENUMERATION_LIMIT = 65536

# Log a warning when a group score has to estimate more groups than this.
GROUP_COUNT_WARNING = 10000

# Largest input domain (and largest number of subsets) the exhaustive oracle agrees to enumerate.
ORACLE_DOMAIN_BOUND = 65536
ORACLE_SUBSET_BOUND = 65536

# Seconds to wait for one response line from an external subject.
SUBJECT_TIMEOUT = 10.0

# Re-evaluate a fraction of cache hits to check that the subject is deterministic.
VERIFY_DETERMINISM = False
VERIFY_FRACTION = 0.01

# Seed of every pseudorandom stream in a run.
SEED = 0

# Number of worker threads used to score groups (or subsets of one search tier). 1 means fully sequential.
PARALLEL_WORKERS = 1

# Discrimination search defaults.
THRESHOLD = 0.5
SEARCH_KIND = 'causal'
GROUP_SHORTCUT = False
PRUNE = True

# Number of inputs drawn from an operational profile for apparent group scores.
SUITE_SIZE = 1000

# Scrapy logging settings, consumed by scrapy.utils.log.configure_logging.
LOG_LEVEL = 'INFO'
LOG_FORMAT = '%(asctime)s [%(name)s] %(levelname)s: %(message)s'

# Optional rotating log file. Disabled when None.
LOG_ROTATING_FILE = None
LOG_ROTATING_MAX_BYTES = 1024000
LOG_ROTATING_BACKUPS = 100

# Version written at the top of every report, and the indentation of the report document.
REPORT_VERSION = 1
REPORT_INDENT = 2

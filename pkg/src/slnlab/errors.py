"""Exception types shared across the package."""


class SlnLabError(Exception):
    """Base class for all package errors."""


class SingularMatrix(SlnLabError):
    """Numerical rank fell below n; the input cannot be a unimodular matrix."""


class RankDeficient(SlnLabError):
    """A frame-producing input had numerical rank < n."""


class NotLoxodromic(SlnLabError):
    """Eigenvalue moduli are not separated; there is no attracting flag.

    Carries ``index`` when raised while certifying a generator list.
    """

    def __init__(self, msg="element is not loxodromic", index=None):
        super().__init__(msg if index is None else f"{msg} (generator index {index})")
        self.index = index


class InsufficientBudget(SlnLabError):
    """Rejection sampling could not populate the admissible region."""


class HypothesisViolated(SlnLabError):
    """A hypothesis of the sufficient-condition contraction check failed.

    ``which`` is one of 'separation', 'image', 'lipschitz'.
    """

    def __init__(self, which, detail=""):
        super().__init__(f"hypothesis violated: {which}" + (f" ({detail})" if detail else ""))
        self.which = which


class NotCertified(SlnLabError):
    """An operation required a passing contraction certificate and none was found."""


class ExactEntriesMissing(SlnLabError):
    """Exact rational entries were required but not present."""


class BudgetExceeded(SlnLabError):
    """An enumeration or sampling budget cap was hit."""


class DedupUnavailable(SlnLabError):
    """Exact deduplication requested without exact entries."""


class TooFewRecords(SlnLabError):
    """An estimator refused to run below its sample-size floor."""


class DegenerateFit(SlnLabError):
    """A regression had too few usable points to produce a slope."""


class MembershipUnverified(SlnLabError):
    """A shadow-membership precondition could not be verified."""


class ConfigError(SlnLabError):
    """Invalid pipeline configuration or input file."""


class SearchExhausted(SlnLabError):
    """The annulus search ended without a certified generating set."""

"""cantorapprox: exact arithmetic and experiments for the rational points of
the middle-thirds Cantor set.

Submodules:

* ``ternary_words``: words over {0, 2}, subword statistics, cylinders, and
  certified Cantor-measure bounds;
* ``cantor_rationals``: canonical periodic base-3 expansions, reduced and
  intrinsic fractions, membership testing;
* ``census``: exhaustive counts of expansion levels, denominator brackets,
  and purely periodic members, with two cross-validated strategies;
* ``spacing``: well-spaced rational families, separation certificates, radius
  flooring, and correlation-ratio brackets;
* ``approx_lab``: the digit-pattern hit model, dichotomy series, Monte Carlo
  dichotomy experiments, Dirichlet-type witness searches, and best
  approximations by intrinsic height;
* ``cli``: batch front-end writing CSV/JSON artifacts with manifests.
"""

from ._meta import CODE_VERSION as __version__

from .ternary_words import (
    Cylinder,
    DigitWord,
    MeasureBound,
    census_fn,
    complexity,
    distinct_subword_positions,
    expected_pair_statistic,
    fn_membership,
    measure_interval,
    pair_statistic,
    subword_length,
)
from .cantor_rationals import (
    CantorRational,
    PeriodicExpansion,
    canonicalize,
    expansion_of,
    in_cantor_set,
    intrinsic_height,
    to_rational,
    verify_gcd_identities,
)
from .census import (
    CensusRecord,
    conjecture_table,
    count_A,
    count_Nn,
    count_Pm,
    count_Tn,
    enumerate_by_denominator,
    enumerate_expansions,
    verify_member_bounds,
)
from .approx_lab import (
    ApproximationHit,
    ConstantPsi,
    PowerLogPsi,
    PsiFamily,
    TablePsi,
    best_approximations,
    dichotomy_series,
    dirichlet_check,
    hit_scan,
    khintchine_experiment,
    sample_point,
)
from .spacing import (
    BallFamily,
    RationalFamily,
    build_family,
    chung_erdos_ratio,
    psi_floor,
    verify_observations,
)
from .errors import (
    DegenerateInput,
    InvariantViolation,
    NotInCantorSet,
    ResourceCapExceeded,
)

__all__ = [name for name in dir() if not name.startswith("_")]

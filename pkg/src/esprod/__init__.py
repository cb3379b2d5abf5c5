"""Toolkit for M(S) = max_{|z|=1} prod_{a in S} |1 - z^a| and related certificates."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    AllocationCap,
    CapOverflow,
    DegreeCap,
    EmptySample,
    ESProdError,
    GapNotReached,
    InvalidInput,
    NonFinite,
    SetNotInRange,
    SingularPoint,
    SumCap,
)
from .product import (  # noqa: E402
    FrequencySet,
    SupNormEstimate,
    certified_sup,
    eval_F,
    exact_coefficients,
    read_set_file,
    sup_norm,
    write_set_file,
)
from .bounds import dense_lower_cert, truncation_upper_bound  # noqa: E402
from .dissociated import is_dissociated, max_dissociated_greedy  # noqa: E402
from .spectra import ghat_bound, ghat_exact, mobius_inverted_coeff  # noqa: E402
from .constructions import best_of, fejer_selector_sample, interval_set, lacunary_set  # noqa: E402

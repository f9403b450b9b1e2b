"""galelab: finite-state gamblers, s-gales and block-entropy dimension estimates."""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    BINARY,
    Alphabet,
    CapitalLedger,
    Distribution,
    Word,
    conditional_bet,
    marginal,
    uniform_distribution,
    validate_distribution,
)
from .construct import (  # noqa: E402
    SmoothingPolicy,
    build_disjoint_gambler,
    build_gambler,
    build_sliding_gambler,
    empirical_block_distribution,
    extend_phase,
    rationalize_distribution,
    replicate_bets,
)
from .dimension import (  # noqa: E402
    equivalence_experiment,
    estimate_fs_dimension,
    gale_win_certificate,
    success_diagnostic,
)
from .entropy import (  # noqa: E402
    block_entropy,
    count_blocks,
    count_disjoint,
    count_sliding,
    entropy_profile,
    entropy_rate_estimate,
)
from .gale import (  # noqa: E402
    PrefixSet,
    check_gale_condition,
    check_kraft_inequality,
    check_root_supergale,
    enumerate_prefix_sets,
    extract_cover,
    product_oracle,
)
from .gambler import (  # noqa: E402
    GamblerSpec,
    cumulative_block_bet,
    induced_oracle,
    load_gambler,
    run,
    run_log2,
    validate_gambler,
)
from .seqgen import GeneratorConfig, SymbolStream, generate, ingest  # noqa: E402

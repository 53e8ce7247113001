"""Causal vector autoregression (CVAR) fitting via block LDL decomposition."""
from .acf import (
    AutocovSet,
    Dataset,
    Divisor,
    assemble_block_toeplitz,
    autocovariances,
    conditional_covariance,
    lagged_moments,
)
from .blockmat import BlockLdlFactors, block_ldl, cvar_partition, spd_inverse
from .covsel import CovselResult, covsel_decomposable, covsel_lagged, ips_covsel
from .errors import CvarError
from .graphs import (
    JunctionTree,
    UndirectedGraph,
    build_undirected_graph,
    check_rzp,
    junction_tree,
    mcs_perfect_order,
    partial_correlations,
    triangulate_fill_in,
)
from .model import (
    CvarModel,
    check_stability,
    fit_restricted,
    fit_unrestricted,
    residuals_and_loglik,
    simulate,
    theoretical_autocovariances,
    to_reduced_form,
)
from .select import CriteriaTable, information_criteria, n_params, order_selection

__version__ = "0.1.0"

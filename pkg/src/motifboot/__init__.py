"""Multiplier bootstraps for network count statistics under sparse graphon models."""

__version__ = "0.1.0"

from .bootstrap import (BootstrapRun, MultiplierSpec, baseline_eg,  # noqa: F401,E402
                        baseline_ss, ecdf, mb_linear, mb_multiplicative,
                        mb_quadratic)
from .counts import LocalStats, count_bruteforce, count_exact  # noqa: F401,E402
from .expansion import (EdgeworthCoefficients, empirical_coefficients,  # noqa: F401,E402
                        gn_hat, population_coefficients, population_theta)
from .graphs import (Graph, GraphonSpec, ingest_edge_list,  # noqa: F401,E402
                     ingest_rollcall, sample_graph, sbm_g, sm_g)
from .harness import ExperimentConfig, run_experiment  # noqa: F401,E402
from .interval import bonferroni, corrected_ci, percentile_ci  # noqa: F401,E402
from .motifs import (EDGE, FOURCYCLE, TRIANGLE, TWOSTAR, Motif,  # noqa: F401,E402
                     from_bitstring, from_name)
from .sketch import SketchPlan, sketch_local  # noqa: F401,E402
from .smooth import BUILTIN_FUNCTIONALS, bootstrap_smooth  # noqa: F401,E402

"""Interference-region characterization and power/admission control for
underlay secondary networks sharing spectrum with a primary tier."""

from .network import (InfeasibleSinr, NetworkInstance, cognitive_interference,
                      is_sinr_feasible, powers_from_sinr, sinr_of,
                      spectral_radius, total_interference)
from .regions import (FcirPolyhedron, InfeasibilityReport, PrimaryInfeasible,
                      baseline_itl, box_inside_fcir, build_fcir, build_ftir,
                      build_h_matrix, fcir_contains, infeasibility_report,
                      pu_powers_from_interference)
from .tpc import TpcResult, run_tpc, tpc_step
from .jpac import (JpacOutcome, NoCandidate, run_jpac, run_jpac_box,
                   select_removal_case1, select_removal_case2)
from .throughput import (BOX_ANCHOR_ALPHAS, DegenerateGamma,
                         FeasibilityRequired, GpIterate, GpProblem, GpResult,
                         InfeasibleProblem, build_gp_problem, condense,
                         pu_to_su_interference, run_algorithm2, solve_inner)
from .scenarios import (ConfigError, ScenarioConfig, build_instance,
                        generate_snapshot, load_config)
from .experiments import (ALGORITHMS, ResultRow, SnapshotMetrics,
                          outage_ratio, run_algorithm_once, run_experiment,
                          summarize, write_rows_csv, write_summary_csv)

__all__ = [name for name in dir() if not name.startswith("_")]

__version__ = "0.1.0"

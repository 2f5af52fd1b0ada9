"""Toolkit for degree invariants of labelings and covers, balanced-set
detection, colored-KKM solving and rental-harmony division."""

from .balanced import (BalancedCertificate, enumerate_balanced, is_balanced,
                       kkms_config, minimal_balanced, simplex_config,
                       tucker_config)
from .complexes import (Labeling, Triangulation, antipodal_ball_triangulation,
                        canonical_sperner_labeling, kuhn_triangulation)
from .degrees import (DegreeReport, check_sperner, degree_labeling,
                      degree_labeling_V, find_bl_simplices,
                      find_complementary_edges, find_fully_labeled)
from .covers import (Cover, CoverSet, Halfspace, common_point_search,
                     induced_labeling, mu_cover, partition_of_unity,
                     star_cover, validate_kkm, voronoi_kkm_cover)
from .gale import (GaleInstance, GaleSolution, averaged_map,
                   extract_permutation, find_barycenter_preimage, gale_solve,
                   verify_solution)
from .geometry import (DEGENERATE, PointConfig, convex_combination,
                       point_config, ray_crossing_sign, rvec)
from .harmony import (DivisionCertificate, InteractiveOracle, NeedAnswer,
                      Session, SessionStore, SimulatedOracle, solve_rental,
                      solve_rental_constrained, validate_conditions)

__all__ = [name for name in dir() if not name.startswith("_")]

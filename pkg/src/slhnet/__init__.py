"""Composition and reduction of quantum input-output networks.

Components are ``(S, L, H)`` triples over a common finite-dimensional system
space.  Networks of components joined by internal channels are reduced, in
the zero time-delay limit, to a single triple.
"""
from .components import (ComponentSpec, beam_splitter, cascade_cavities, cavity, custom,
                         embed_slh, fifty_fifty, figure2_network, figure6_network,
                         figure7_network, passthrough, perfect_mirror, rotation,
                         series_network, static_hamiltonian)
from .dynamics import (EvansHudsonMaps, OutputCoefficients, Superoperator, check_eh_series,
                       evans_hudson, galilean_output_map, lindblad, lindblad_apply,
                       output_coeffs, unvec, vec)
from .errors import (DimensionError, DivergentPathSum, InvariantError, NetlistError, NetworkError,
                     NonConvergent, SingularLoop, SingularMatrix, SLHError)
from .netlist import (NetlistDocument, ReductionReport, load_netlist, parse_netlist,
                      parse_report, serialize_netlist, serialize_report)
from .network import (AdjacencyMatrix, Component, Edge, Network, Violation, adjacency,
                      build_network_V, make_adjacency, validate)
from .ops import (DEFAULT_TOL, annihilator, as_op, condition_number, creator, dagger, embed,
                  identity, im_op, inv_checked, is_hermitian, is_unitary, kron, matmul, maxabs,
                  re_op, unitarity_residual)
from .reduction import (DelayIgnoredWarning, EdgeRef, PathSumResult, PathTerm, SiegelResiduals,
                        eliminate_all, eliminate_edge, eliminate_sequence, enumerate_paths,
                        feedback_reduce, loop_sigma_min, mobius, path_sum_expansion,
                        path_sum_reduce, redheffer_star, reduce_network, reduced_params,
                        reduced_params_edge, siegel_check, spectral_radius)
from .slh import (SLH, AugmentedMatrix, GalileanMatrix, ItoMatrix, ModelMatrix, PortSpec,
                  aug_mul, augmented, build_G, build_M, build_V, check_ito, concat, concat_slh,
                  conjugate_G, extract_slh, galilean, galilean_inv, galilean_mul,
                  galilean_pi_residual, model_residuals, passthrough_slh, pi_matrix, series, series_G,
                  slh_from_augmented, slh_from_G, star, star_unitarity_residual)

__version__ = "0.1.0"

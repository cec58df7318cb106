"""Optimal and GMD-based lattice precoders from perfect quadratic forms."""
from .bounds import (BoundCertificate, certificate, gram_trace_bound,
                     lower_bound_energy, upper_bound_energy, z_trace_bound)
from .channel import (ChannelSpectrum, complexify_vector, realify_matrix,
                      realify_vector, spectrum_of)
from .codebook import (Codebook, CodebookEntry, build_codebook,
                       enumerate_unimodular_from, enumerate_unimodular_in_sphere,
                       optimal_precoder, repro_4d, select_precoder)
from .cone import RayDirection, extreme_rays, minimal_cone_inequalities
from .errors import *  # noqa: F401,F403
from .lattice import (GeneratorMatrix, IsometryWitness, MinVecSet, QuadraticForm,
                      UnimodularMatrix, brute_force_min, generator_of, gram_of,
                      is_isometric, min_distance, permutation_equivalent,
                      quadratic_eval, shortest_vectors, successive_minimum_2,
                      volume)
from .perfect import (PerfectFormRecord, enumerate_perfect_forms, is_perfect,
                      neighbor_form, root_lattice_form, voronoi_neighbors)
from .precoder import (PrecoderResult, build_precoder, evaluate_precoder,
                       gmd_precoder, objective, suboptimal_precoder)
from .reduction import (MinkowskiFactorization, factorize_ULZ,
                        is_minkowski_reduced, minkowski_reduce)

__version__ = "0.1.0"

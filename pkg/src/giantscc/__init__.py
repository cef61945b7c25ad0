"""Giant strongly connected components in inhomogeneous random digraphs."""

from .branching import (ConvergenceError, SurvivalResult, extinction_fixed_point, giant_fraction, simulate_survival,
                        spectral_radius, survival, type_digraph)
from .exploration import ExplorationOutcome, big_fraction, default_omega, explore_backward, explore_forward
from .generator import Digraph, sample_block, sample_digraph
from .model import (KernelFunction, KernelMatrix, Model, ModelError, ModelSpec, TypeDistribution, TypeMeasure,
                    constant_kernel, discretize_kernel, mean_matrices, piecewise_kernel, product_kernel,
                    type_counts, validate_model)
from .scc import SccSummary, compute_scc, scc_oracle

__version__ = "0.1.0"

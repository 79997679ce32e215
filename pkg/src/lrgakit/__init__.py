"""Low-rank global attention and 2-FWL tooling with brute-force oracles."""

from importlib.metadata import PackageNotFoundError, version

from .attention import (
    DegenerateNormalization,
    LrgaParams,
    RowMap,
    augment_layer,
    dense_attention_oracle,
    eta,
    lrga_forward,
    multi_head_forward,
)
from .fwl_matrix import EncodedTensor, fwl2_update_matrix, pmp_encode, tensor_power
from .graph6 import Graph6Error, encode_graph6, parse_graph6
from .graphs import Graph, PairTensor, Permutation, apply_permutation, build_iso_type_tensor, random_graph
from .kernels import FeatureMapSpec, NodeFactorization, factorized_fwl_head, phi_homogeneous, phi_product
from .mlp import MonomialTask, TrainConfig, TwoLayerMlp, sample_complexity_experiment, train_monomial
from .multiindex import enumerate_multi_indices
from .rgnn import (
    RandomFeatureConfig,
    expectation_equivariance_check,
    extended_factorization,
    factorization_error,
    message_passing_layer,
    required_dimension,
    sample_features,
)
from .vandermonde import VandermondeSystem, build_vandermonde, sample_complexity_bound, solve_monomial_coeffs
from .wl import Coloring, IsoVerdict, PairColoring, Verdict, fwl2_refine, iso_test, wl1_refine

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"

"""Structurally smoothed graphlet kernels.

Graphlet catalogs and the delete-one-node DAG, subgraph counting and
sampling, MLE / Laplace / Kneser-Ney / structural Kneser-Ney / hierarchical
Pitman-Yor estimators, and an SVM evaluation harness.
"""

from .catalog import (GraphletCatalog, GraphletDag, base_distribution, build_catalog, build_dag,
                      get_catalog, load_catalog, push_forward, save_catalog)
from .canonical import CanonicalCode, are_isomorphic, canonical_form
from .errors import (ChainStateError, EstimationError, GraphFormatError, IngestionError,
                     SamplingError, SsgkError, TrainingError)
from .evaluation import EvalReport, cross_validate, discount_sweep, t_test
from .graph import Graph, GraphCollection, parse_edge_list, parse_tu_dataset
from .kernel import FeatureConfig, KernelMatrix, export_precomputed_kernel, feature_vector, \
    gram_matrix, import_precomputed_kernel
from .pyp import HpypChain, delete_customer, gibbs_fit, insert_customer, predictive_distribution
from .sampling import (count_collection, enumerate_all_subgraphs, enumerate_connected_subgraphs,
                       powerlaw_table, sample_connected_subgraphs)
from .smoothing import SmoothingConfig, kneser_ney, laplace, mle, structural_kneser_ney
from .svm import SvmModel, svm_train
from .vectors import CountVector, Distribution

__version__ = "0.1.0"

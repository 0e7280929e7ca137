"""Graph-level anomaly detection with Isolation-Kernel WL embeddings and
point-set-kernel prototypes."""

from .datasets import DataError, load_dataset, parse_tudataset, prepare_glad, save_dataset
from .detect import (Cluster, DetectionResult, ZeroClusterError, auto_tau, detect,
                     find_prototype, grow_cluster, point_set_kernel)
from .embed import (EmbeddedDataset, GraphEmbedding, NodeEmbeddings, embed_dataset,
                    graph_embedding, graph_similarity, wl_propagate)
from .experiment import EvalReport, Params, run_detection, run_experiment
from .explain import Explanation, explain_pair, node_scores
from .export import export_scored_graph
from .graph import AttributedGraph, GraphDataset, derive_attributes, make_graph, validate_graph
from .ik import IkModel, fit_ik, ik_kernel, ik_map
from .metrics import auc
from .synthetic import SyntheticConfig, gen_synthetic

__version__ = "0.1.0"

"""Incremental fuzzy bounded twin SVM with random Fourier features."""
from .binary import BinaryModel, Hyperparams, classify_binary, decision, train_binary
from .dag import DagModel, MetricsReport, UnknownClassError, evaluate, predict, train_dag, update_dag
from .data import BatchPlan, DataError, Dataset, batches, gen_blobs, gen_hyper, gen_sea, load
from .fuzzy import FuzzyParams
from .incremental import ClassCollapseError, decrement, increment, update
from .persistence import CorruptModelError, NotAModelError, VersionError
from .persistence import load as load_model
from .persistence import save as save_model
from .rff import FourierMap, IdentityMap, feature_map, sample_map
from .solver import SolverConfig, solve

__version__ = "0.1.0"

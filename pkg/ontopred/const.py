from enum import Enum

DOMAIN: str = "ontopred"
TOOL_VERSION: str = "0.1.0"

NAMESPACE_MFO = "molecular_function"
NAMESPACE_BPO = "biological_process"
NAMESPACE_CCO = "cellular_component"


class Namespace(Enum):
    MFO = "MFO"
    BPO = "BPO"
    CCO = "CCO"


# OBO namespace string -> Namespace
NAMESPACES = {
    NAMESPACE_MFO: Namespace.MFO,
    NAMESPACE_BPO: Namespace.BPO,
    NAMESPACE_CCO: Namespace.CCO,
}
NAMESPACE_NAMES = {v: k for k, v in NAMESPACES.items()}

ACCESSION_PREFIX = "GO:"
ACCESSION_DIGITS = 7

# CAFA3 experimental evidence codes
EXPERIMENTAL_EVIDENCE_CODES = frozenset(
    {"EXP", "IDA", "IPI", "IMP", "IGI", "IEP", "TAS", "IC"}
)
# Marks a row inferred by true-path propagation in written annotation files.
PROPAGATED_EVIDENCE = "PROP"

DEFAULT_EPOCHS = 10
DEFAULT_BATCH_SIZE = 32
DEFAULT_LR = 1e-3
DEFAULT_LAYERS = 2
MAX_LAYERS = 4
DEFAULT_SEQ_DIM = 1024
DEFAULT_DEPTH_CAP = 80
DEFAULT_SEED = 0
DEFAULT_SCORE_FLOOR = 0.01

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPSILON = 1e-8

THRESHOLD_STEPS = 100  # 0.00, 0.01, ..., 1.00

LOG_BASE = "e"

CHECKPOINT_MAGIC = "ONTOPRED"
CHECKPOINT_VERSION = "v1"
EMBEDDING_MAGIC = b"PEMB"

# Artifacts written into a build-graph / train output directory.
TERMS_FILE = "terms.tsv"
ADJACENCY_FILE = "adjacency.tsv"
IC_FILE = "ic.tsv"
MANIFEST_FILE = "manifest.txt"
CONFIG_FILE = "config.txt"
LOSS_FILE = "loss.tsv"
MODEL_FILE = "model.txt"

THREADS_ENV = "ONTOPRED_THREADS"

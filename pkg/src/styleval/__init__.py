"""Style-transfer evaluation harness.

Runs prompting pipelines for authorship style transfer against any
chat-completions endpoint and scores the rewrites with a self-contained
metric suite built around a multidimensional register analysis.
"""

__version__ = "0.1.0"

from .distances import away_towards
from .errors import StylevalError
from .features import extract_features, load_catalog
from .mda import MdaFitConfig, MdaModel, fit_mda, load_model, project, save_model
from .overlap import bleu, meteor, overlap_rouge, rouge_l, rouge_n, sari
from .readability import ari, fkgl
from .scores import ScoreVector
from .textproc import Document, tokenize

__all__ = [
    "__version__",
    "Document",
    "MdaFitConfig",
    "MdaModel",
    "ScoreVector",
    "StylevalError",
    "ari",
    "away_towards",
    "bleu",
    "extract_features",
    "fit_mda",
    "fkgl",
    "load_catalog",
    "load_model",
    "meteor",
    "overlap_rouge",
    "project",
    "rouge_l",
    "rouge_n",
    "sari",
    "save_model",
    "tokenize",
]

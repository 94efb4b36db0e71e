"""HTTP sidecar serving multilingual sentence embeddings."""

from .app import create_app
from .backends import DEFAULT_MODEL_ID, HashBackend, SentenceTransformerBackend, load_backend

__version__ = "0.1.0"

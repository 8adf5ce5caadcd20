from .embedder import DIM_FACE, DIM_GLOBAL, detect_faces, embed_image

__all__ = ["DIM_GLOBAL", "DIM_FACE", "embed_image", "detect_faces"]

__version__ = "0.1.0"

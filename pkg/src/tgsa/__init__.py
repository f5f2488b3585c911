"""Tree-like graphs for overlapping structural annotations, with a pre/post index."""

from .doc_model import Token, TokenKind, TokenStream, ValidationReport, tokenize, validate_stream
from .graph import Arc, ArcLabel, TgsaGraph, Vertex, VertexKind, construct, path_exists, to_dot, validate_tgsa
from .index import ElementEntry, ElementIndex, TextIndex, build_indexes, is_ancestor, is_parent, overlaps

__version__ = "0.1.0"

__all__ = [
    "Arc", "ArcLabel", "ElementEntry", "ElementIndex", "TextIndex", "TgsaGraph", "Token",
    "TokenKind", "TokenStream", "ValidationReport", "Vertex", "VertexKind", "build_indexes",
    "construct", "is_ancestor", "is_parent", "overlaps", "path_exists", "to_dot", "tokenize",
    "validate_stream", "validate_tgsa",
]

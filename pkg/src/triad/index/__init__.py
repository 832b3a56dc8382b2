from .candidate import LLM_SELECTED, TEXT_FILTER, TRAVERSAL, UriCandidate, rerank
from .mention_index import DEFAULT_POOL, ENTITY, RELATION, MentionIndex, build, search
from .text import normalize, normalize_tokens

__all__ = [
    "LLM_SELECTED", "TEXT_FILTER", "TRAVERSAL", "UriCandidate", "rerank", "DEFAULT_POOL",
    "ENTITY", "RELATION", "MentionIndex", "build", "search", "normalize", "normalize_tokens",
]

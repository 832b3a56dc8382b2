"""The three agent roles as typed operations over the gateway, store and index."""

from .types import (ABSTAIN, KB, LLM_FALLBACK, Answer, AnswerMismatchError, AnswerType,
                    ExtractionError, Linking, Mention, NoFeasibleQueryError, PipelineError,
                    RetryableError, StarvedMentionError, TemplateError, TripleMention)
from .generalist import classify_answer_type, extract_triplets, generate_template, parse_triplets
from .decision import (QueryCandidate, QuerySelection, parse_selection, relation_pool,
                       select_entities, select_query, select_relations)
from .advisor import answer, answer_from_result, fallback_answer, parse_boolean

__all__ = [
    "ABSTAIN", "KB", "LLM_FALLBACK", "Answer", "AnswerMismatchError", "AnswerType",
    "ExtractionError", "Linking", "Mention", "NoFeasibleQueryError", "PipelineError",
    "RetryableError", "StarvedMentionError", "TemplateError", "TripleMention",
    "classify_answer_type", "extract_triplets", "generate_template", "parse_triplets",
    "QueryCandidate", "QuerySelection", "parse_selection", "relation_pool", "select_entities",
    "select_query", "select_relations", "answer", "answer_from_result", "fallback_answer",
    "parse_boolean",
]

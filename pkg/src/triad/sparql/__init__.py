from .ast import (ASK, COUNT, ENTITY, RELATION, SELECT, Feature, MentionSlot, SparqlQuery,
                  SparqlTemplate, render)
from .parser import SparqlSyntaxError, extract_query_text, parse
from .candidates import MissingSlotError, StarvedSlotError, enumerate_candidates, instantiate

__all__ = [
    "ASK", "COUNT", "ENTITY", "RELATION", "SELECT", "Feature", "MentionSlot", "SparqlQuery",
    "SparqlTemplate", "render", "SparqlSyntaxError", "extract_query_text", "parse",
    "MissingSlotError", "StarvedSlotError", "enumerate_candidates", "instantiate",
]

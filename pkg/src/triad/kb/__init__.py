from .terms import RDF_TYPE, RDFS_LABEL, Literal, Term, Triple, Var, local_name, term_key, term_value
from .ntriples import NTriplesError, ParseStats, iter_triples, read_ntriples, write_ntriples
from .store import INCOMING, OUTGOING, KbStore, TriplePattern, load_ntriples, match, neighbors

# the executor lives in triad.kb.execute; it depends on triad.sparql, which depends on this package

__all__ = [
    "RDF_TYPE", "RDFS_LABEL", "Literal", "Term", "Triple", "Var", "local_name", "term_key",
    "term_value", "NTriplesError", "ParseStats", "iter_triples", "read_ntriples",
    "write_ntriples", "INCOMING", "OUTGOING", "KbStore", "TriplePattern", "load_ntriples",
    "match", "neighbors",
]

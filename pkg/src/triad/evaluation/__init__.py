"""Benchmark loading, answer scoring and batch evaluation."""

from .benchmark import BenchmarkError, BenchmarkItem, load_benchmark, parse_benchmark
from .harness import MACRO, MICRO, EvalReport, ItemResult, evaluate
from .metrics import PERFECT, ZERO, Prf, canonical, linking_recall, macro, micro, normalize_text, score, set_prf

__all__ = ["BenchmarkError", "BenchmarkItem", "load_benchmark", "parse_benchmark", "MACRO", "MICRO",
           "EvalReport", "ItemResult", "evaluate", "PERFECT", "ZERO", "Prf", "canonical",
           "linking_recall", "macro", "micro", "normalize_text", "score", "set_prf"]

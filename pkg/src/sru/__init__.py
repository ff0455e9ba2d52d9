"""Sequential recurrence-based universal coding of d-dimensional arrays."""

from .baseline import decode_baseline, encode_baseline
from .codec import SRUEncoder, code_rate, decode, encode
from .errors import CorruptStreamError, UsageError
from .grid import Alphabet, GridArray, Word, extract, leading_subword, shell
from .parser import ParseState, Threshold, advance, flush, parse, recurrence_ratio
from .stats import choose_k, empirical_distribution, entropy, per_site_entropy

__all__ = [
    "Alphabet", "CorruptStreamError", "GridArray", "ParseState", "SRUEncoder", "Threshold",
    "UsageError", "Word", "advance", "choose_k", "code_rate", "decode", "decode_baseline",
    "empirical_distribution", "encode", "encode_baseline", "entropy", "extract", "flush",
    "leading_subword", "parse", "per_site_entropy", "recurrence_ratio", "shell",
]

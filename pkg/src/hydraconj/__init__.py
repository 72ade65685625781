"""Conjugacy machinery for the hydra groups H_m = F(a_1..a_m) x| <s>."""

from .words import Word, S, WordError, concat, free_reduce, invert, parse_word, format_word
from .automorphism import apply_phi_power, is_fixed, letter_image_length, phi_letter_closed_form
from .pieces import Piece, PieceDecomposition, PieceType, decompose, piece_count, rank, shared_prefix_shape
from .group import HElem, check_conjugation, h_equal, h_inv, h_mul, normal_form, short_subword_word
from .free_conjugacy import conjugate_in_f, max_root
from .twisted import (
    BoundPolicy,
    ChunkForm,
    TwistedSolution,
    compress_conjugator,
    linearize_conjugator,
    solve_0_twisted,
    solve_h_twisted,
    solve_i_twisted,
)
from .engine import Certificate, decide_conjugacy
from .hnn import collins_decide, hnn_reduce
from .oracle import oracle_conjugate, oracle_twisted

__all__ = [
    "Word", "S", "WordError", "concat", "free_reduce", "invert", "parse_word", "format_word",
    "apply_phi_power", "is_fixed", "letter_image_length", "phi_letter_closed_form",
    "Piece", "PieceDecomposition", "PieceType", "decompose", "piece_count", "rank",
    "shared_prefix_shape",
    "HElem", "check_conjugation", "h_equal", "h_inv", "h_mul", "normal_form",
    "short_subword_word",
    "conjugate_in_f", "max_root",
    "BoundPolicy", "ChunkForm", "TwistedSolution", "compress_conjugator",
    "linearize_conjugator", "solve_0_twisted", "solve_h_twisted", "solve_i_twisted",
    "Certificate", "decide_conjugacy",
    "collins_decide", "hnn_reduce",
    "oracle_conjugate", "oracle_twisted",
]

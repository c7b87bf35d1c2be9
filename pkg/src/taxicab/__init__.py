"""Counting sums of k-th powers and the tails of Taxicab(k, j, m) columns."""

from .partition_core import CountTable, PartitionQuery, brute_force, count, count_row, series_counts
from .square_representability import (
    is_sum_of_j_squares,
    pigeonhole_lower_bound,
    search_bound_squares,
    five_square_tail_threshold,
)
from .taxicab_solver import (
    BoundPolicy,
    TailCertificate,
    TaxicabOutcome,
    certify_tail_increment,
    certify_tail_nonexistence,
    classify_column,
    decide_squares,
    mi_sequence,
    taxicab,
    taxicab_at_least,
)
from .grid_reporting import build_grid, emit_csv, emit_pbm, extract_boundary, fit

__version__ = "0.1.0"

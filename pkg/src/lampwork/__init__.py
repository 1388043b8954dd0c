"""Mealy automata, the groups they generate, and a four-state automaton
whose group is the lamplighter group (Z_2 x Z_2) wr Z."""

from .algebra import BinPoly, LaurentBinPoly, TruncSeries, parse_poly, parse_series
from .mealy import (MealyAutomaton, builtin, dual_automaton, inverse_automaton,
                    is_bireversible, is_invertible, is_reversible, parse_automaton)
from .treeact import GroupWord, act, equal, is_trivial, order_probe, parse_word, section

__version__ = "0.1.0"

"""
Utility functions and helpers.
"""

import re
from itertools import chain, combinations
from typing import Iterable, Iterator, List, Sequence, Tuple, TypeVar

from ..models import GroundTuple, Interpretation, PredicateSymbol

T = TypeVar("T")

_VARIABLE_RE = re.compile(r"^[A-Z_]")


def is_variable_name(text: str) -> bool:
    """Variables start with an uppercase letter or underscore."""
    return bool(_VARIABLE_RE.match(text))


def symbol_key(pred) -> Tuple[str, int]:
    """Canonical sort key for predicate symbols and variables."""
    return (pred.name, pred.arity)


def sorted_symbols(symbols: Iterable[PredicateSymbol]) -> List[PredicateSymbol]:
    return sorted(symbols, key=symbol_key)


def format_symbols(symbols: Iterable[PredicateSymbol]) -> str:
    return ", ".join(str(p) for p in sorted_symbols(symbols))


def format_ground_atom(pred: PredicateSymbol, args: GroundTuple) -> str:
    """
    Format a ground atom the way answers are printed.

    Args:
        pred: Predicate symbol
        args: Constant names

    Returns:
        Text such as ``in(a,b)`` or ``p`` for a nullary symbol
    """
    if not args:
        return pred.name
    return f"{pred.name}({','.join(args)})"


def interpretation_atoms(interpretation: Interpretation) -> List[str]:
    """True atoms of an interpretation as text, in canonical order."""
    return [format_ground_atom(pred, args) for pred, args in interpretation.atoms()]


def interpretation_key(interpretation: Interpretation) -> Tuple[str, ...]:
    """Sort key ordering interpretations by their canonical atom-list text."""
    return tuple(interpretation_atoms(interpretation))


def powerset(items: Sequence[T]) -> Iterator[Tuple[T, ...]]:
    """All subsets, smallest first."""
    return chain.from_iterable(combinations(items, k) for k in range(len(items) + 1))


def gray_code_subsets(items: Sequence[T]) -> Iterator[frozenset]:
    """
    All subsets of items in reflected Gray-code order.

    Consecutive subsets differ in exactly one element, starting from the
    empty set.
    """
    current = set()
    yield frozenset()
    for step in range(1, 1 << len(items)):
        # index of the lowest set bit flips
        bit = (step & -step).bit_length() - 1
        element = items[bit]
        if element in current:
            current.remove(element)
        else:
            current.add(element)
        yield frozenset(current)

"""Independent oracles shared by the test modules.

Everything here computes from first principles (definitions, enumeration,
per-factor tables) so the library paths under test are checked against a
different route, not against themselves.
"""

import numpy as np

from charshift.errors import NotSquareFree
from charshift.finite_field import element_from_index, element_to_index, ff_arith
from charshift.number_theory import factor_trial

_legendre_tables: dict = {}


def legendre_table(p: int) -> np.ndarray:
    # Built by enumerating squares, not via the library symbol, so the
    # product-side oracle is independent of the reciprocity code path.
    if p not in _legendre_tables:
        tab = np.full(p, -1, dtype=np.int8)
        tab[0] = 0
        tab[np.unique((np.arange(1, p, dtype=np.int64) ** 2) % p)] = 1
        _legendre_tables[p] = tab
    return _legendre_tables[p]


def jacobi_row_by_product(n: int) -> np.ndarray:
    """Definition-side Jacobi values over Z_n: the per-factor symbol product."""
    moduli = factor_trial(n)
    xs = np.arange(n)
    row = np.ones(n, dtype=np.int64)
    for p in moduli.factors:
        row *= legendre_table(p)[xs % p]
    return row


def odd_squarefree_up_to(limit: int) -> list[int]:
    out = []
    for n in range(3, limit + 1, 2):
        try:
            factor_trial(n)
        except NotSquareFree:
            continue
        out.append(n)
    return out


def squares_mod(p: int) -> set[int]:
    return {x * x % p for x in range(1, p)}


def char_by_enumeration(spec) -> list[int]:
    """The quadratic character from its definition: +1 exactly on nonzero squares."""
    squares = set()
    for i in range(1, spec.q):
        e = element_from_index(spec, i)
        squares.add(element_to_index(spec, ff_arith(spec, e, e, "mul")))
    return [0] + [1 if i in squares else -1 for i in range(1, spec.q)]

"""Ready-made Boolean languages: 2-clauses, constants, unary and cut costs.

Everything here is a plain WeightedRelation over domain {0, 1} (constants
generalize to larger domains).  These are the building blocks used by the
demos and the test suite; nothing in the solver depends on them.
"""

from .core import crisp_relation, make_relation
from .rationals import INF

__all__ = [
    "or_relation",
    "nand_relation",
    "impl_relation",
    "neq_relation",
    "eq_relation",
    "const_relation",
    "nu01",
    "nu10",
    "cut_cost",
    "soft_xor",
    "unary_cost",
    "binary_cost",
    "two_sat_language",
]


def or_relation():
    """Crisp (x OR y)."""
    return crisp_relation(2, 2, [(0, 1), (1, 0), (1, 1)])


def nand_relation():
    """Crisp (NOT x OR NOT y)."""
    return crisp_relation(2, 2, [(0, 0), (0, 1), (1, 0)])


def impl_relation():
    """Crisp (x -> y)."""
    return crisp_relation(2, 2, [(0, 0), (0, 1), (1, 1)])


def neq_relation():
    """Crisp (x != y)."""
    return crisp_relation(2, 2, [(0, 1), (1, 0)])


def eq_relation():
    """Crisp (x = y)."""
    return crisp_relation(2, 2, [(0, 0), (1, 1)])


def const_relation(domain_size, value):
    """Crisp unary singleton {value}."""
    return crisp_relation(1, domain_size, [(value,)])


def nu01():
    """Unary cost 0 at label 0, 1 at label 1 (charges for ones)."""
    return unary_cost([0, 1])


def nu10():
    """Unary cost 1 at label 0, 0 at label 1 (charges for zeros)."""
    return unary_cost([1, 0])


def cut_cost():
    """Binary cost 1 when the endpoints differ: the submodular cut function."""
    return make_relation(2, 2, {(0, 0): 0, (1, 1): 0, (0, 1): 1, (1, 0): 1})


def soft_xor():
    """Binary cost 1 when the endpoints agree: a penalized x XOR y = 1."""
    return make_relation(2, 2, {(0, 0): 1, (1, 1): 1, (0, 1): 0, (1, 0): 0})


def unary_cost(values):
    """Unary cost function from a per-label list (ints, fractions, or None=inf)."""
    table = {(i,): (INF if v is None else v) for i, v in enumerate(values)}
    return make_relation(1, len(values), table)


def binary_cost(rows):
    """Binary cost function from a row-major nested list over {0..D-1}."""
    table = {
        (i, j): (INF if v is None else v)
        for i, row in enumerate(rows)
        for j, v in enumerate(row)
    }
    return make_relation(2, len(rows), table)


def two_sat_language(with_constants=False):
    """The crisp binary-clause language as an ordered {name: relation} dict."""
    lang = {
        "or": or_relation(),
        "nand": nand_relation(),
        "impl": impl_relation(),
        "neq": neq_relation(),
        "eq": eq_relation(),
    }
    if with_constants:
        lang["c0"] = const_relation(2, 0)
        lang["c1"] = const_relation(2, 1)
    return lang

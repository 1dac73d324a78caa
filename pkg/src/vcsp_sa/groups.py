"""Finite Abelian groups given by validated addition tables."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InputError


@dataclass(frozen=True)
class AbelianGroup:
    """A finite Abelian group on the elements {0, ..., order-1}.

    ``table[a][b]`` is a+b, ``zero`` is the identity, and ``g`` is a
    designated non-zero element (the offset used by the torus instances).
    Closure, commutativity, associativity, the identity law, and the
    existence of inverses are all checked on construction.
    """

    order: int
    table: tuple
    zero: int = 0
    g: int = 1
    name: str = ""

    def __post_init__(self):
        n = self.order
        if n < 2:
            raise InputError("group must be non-trivial (order >= 2)")
        if len(self.table) != n or any(len(row) != n for row in self.table):
            raise InputError("addition table must be order x order")
        t = self.table
        for row in t:
            for v in row:
                if not (isinstance(v, int) and 0 <= v < n):
                    raise InputError("addition table entry out of range")
        if not 0 <= self.zero < n:
            raise InputError("zero element out of range")
        z = self.zero
        for a in range(n):
            if t[a][z] != a or t[z][a] != a:
                raise InputError("zero is not an identity element")
        for a in range(n):
            for b in range(a + 1, n):
                if t[a][b] != t[b][a]:
                    raise InputError("addition table is not commutative")
        negs = []
        for a in range(n):
            try:
                negs.append(t[a].index(z))
            except ValueError:
                raise InputError(f"element {a} has no inverse") from None
        for a in range(n):
            for b in range(n):
                row = t[t[a][b]]
                trow = t[b]
                for c in range(n):
                    if row[c] != t[a][trow[c]]:
                        raise InputError("addition table is not associative")
        if self.g == z or not 0 <= self.g < n:
            raise InputError("designated element g must be non-zero")
        object.__setattr__(self, "_negs", tuple(negs))

    def add(self, a, b):
        return self.table[a][b]

    def neg(self, a):
        return self._negs[a]

    def sub(self, a, b):
        return self.table[a][self._negs[b]]

    def sum(self, elems):
        total = self.zero
        table = self.table
        for e in elems:
            total = table[total][e]
        return total

    def elements(self):
        return range(self.order)


def cyclic_group(m, g=1):
    """Z_m with addition modulo m; the designated element defaults to 1."""
    if m < 2:
        raise InputError("cyclic group must have order >= 2")
    table = tuple(tuple((a + b) % m for b in range(m)) for a in range(m))
    return AbelianGroup(m, table, 0, g % m, f"Z{m}")


def direct_product(left, right, g=None):
    """The componentwise product; (a, b) is encoded as a*right.order + b.

    The designated element defaults to (left.g, right.zero).
    """
    lo, ro = left.order, right.order
    lt, rt = left.table, right.table
    table = []
    for e1 in range(lo * ro):
        a1, b1 = divmod(e1, ro)
        table.append(
            tuple(
                lt[a1][e2 // ro] * ro + rt[b1][e2 % ro] for e2 in range(lo * ro)
            )
        )
    zero = left.zero * ro + right.zero
    if g is None:
        g = left.g * ro + right.zero
    name = f"{left.name}x{right.name}" if left.name and right.name else ""
    return AbelianGroup(lo * ro, tuple(table), zero, g, name)


def group_from_name(name):
    """Parse group names like ``Z2``, ``Z6``, or products like ``Z2xZ4``."""
    parts = str(name).strip().split("x")
    factors = []
    for part in parts:
        part = part.strip()
        if len(part) < 2 or part[0] != "Z" or not part[1:].isdigit():
            raise InputError(f"cannot parse group name {name!r}")
        factors.append(cyclic_group(int(part[1:])))
    group = factors[0]
    for nxt in factors[1:]:
        group = direct_product(group, nxt)
    return group

"""Finite groups given by an element list and a multiplication table."""

from __future__ import annotations

from itertools import product
from typing import Sequence


class GroupError(ValueError):
    pass


class FiniteGroup:
    """Elements are indexed ``0..n-1``; ``table[a][b]`` is the index of ``a*b``."""

    def __init__(self, names: Sequence[str], table: Sequence[Sequence[int]], name: str | None = None):
        names = [str(x) for x in names]
        n = len(names)
        if n == 0:
            raise GroupError("empty group")
        if len(set(names)) != n:
            raise GroupError("duplicate element names")
        table = [tuple(int(x) for x in row) for row in table]
        if len(table) != n or any(len(row) != n for row in table):
            raise GroupError(f"multiplication table must be {n}x{n}")
        if any(not 0 <= x < n for row in table for x in row):
            raise GroupError("table entry out of range")
        ident = [e for e in range(n) if all(table[e][a] == a and table[a][e] == a for a in range(n))]
        if not ident:
            raise GroupError("no identity element")
        self.identity = ident[0]
        for a, b, c in product(range(n), repeat=3):
            if table[table[a][b]][c] != table[a][table[b][c]]:
                raise GroupError(f"table is not associative at ({names[a]}, {names[b]}, {names[c]})")
        inverse = []
        for a in range(n):
            inv = [b for b in range(n) if table[a][b] == self.identity]
            if not inv:
                raise GroupError(f"{names[a]} has no inverse")
            inverse.append(inv[0])
        self.names = names
        self.table = table
        self.inverse = inverse
        self.name = name or f"G{n}"

    def __len__(self) -> int:
        return len(self.names)

    def __repr__(self) -> str:
        return f"FiniteGroup({self.name}, order={len(self)})"

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def index(self, name: str) -> int:
        try:
            return self.names.index(str(name))
        except ValueError:
            raise GroupError(f"unknown group element {name!r}") from None

    def is_trivial(self) -> bool:
        return len(self) == 1

    @classmethod
    def from_names_table(cls, names: Sequence[str], table: Sequence[Sequence[str]], name: str | None = None) -> FiniteGroup:
        pos = {str(x): i for i, x in enumerate(names)}
        try:
            idx = [[pos[str(x)] for x in row] for row in table]
        except KeyError as exc:
            raise GroupError(f"unknown element {exc.args[0]!r} in table") from None
        return cls(names, idx, name=name)


def cyclic(n: int) -> FiniteGroup:
    if n < 1:
        raise GroupError("order must be positive")
    names = ["e"] + (["g"] if n > 1 else []) + [f"g{i}" for i in range(2, n)]
    table = [[(a + b) % n for b in range(n)] for a in range(n)]
    return FiniteGroup(names, table, name=f"z{n}")


def trivial() -> FiniteGroup:
    return cyclic(1)


def klein() -> FiniteGroup:
    names = ["e", "a", "b", "ab"]
    table = [[a ^ b for b in range(4)] for a in range(4)]
    return FiniteGroup(names, table, name="z2xz2")


BUILTIN = {
    "z1": trivial,
    "z2": lambda: cyclic(2),
    "z3": lambda: cyclic(3),
    "z2xz2": klein,
}


def builtin(name: str) -> FiniteGroup:
    try:
        return BUILTIN[name.lower()]()
    except KeyError:
        raise GroupError(f"unknown built-in group {name!r}; choose from {sorted(BUILTIN)}") from None

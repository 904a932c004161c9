"""Runtime values for OCL evaluation and system states."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass


class _Undefined:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "Undefined"

    def __bool__(self):
        raise TypeError("undefined has no truth value")


UNDEFINED = _Undefined()


@dataclass(frozen=True)
class ObjRef:
    name: str

    def __repr__(self):
        return f"@{self.name}"


def value_key(v):
    """Total order over scalar values, for canonical collection layout."""
    if isinstance(v, bool):
        return (0, v)
    if isinstance(v, int):
        return (1, v)
    if isinstance(v, float):
        return (2, v)
    if isinstance(v, str):
        return (3, v)
    if isinstance(v, ObjRef):
        return (4, v.name)
    if v is UNDEFINED:
        return (5, 0)
    raise TypeError(f"no ordering for {v!r}")


@dataclass(frozen=True)
class SetVal:
    elems: frozenset

    @staticmethod
    def of(iterable):
        return SetVal(frozenset(iterable))

    def sorted(self):
        return sorted(self.elems, key=value_key)

    def __len__(self):
        return len(self.elems)

    def __iter__(self):
        return iter(self.sorted())

    def __repr__(self):
        return "Set{" + ", ".join(repr(e) for e in self) + "}"


@dataclass(frozen=True)
class BagVal:
    """Multiset; stored as canonically sorted (element, count) pairs."""

    counts: tuple

    @staticmethod
    def of(iterable):
        c = Counter(iterable)
        return BagVal(tuple(sorted(c.items(), key=lambda kv: value_key(kv[0]))))

    def sorted(self):
        out = []
        for e, n in self.counts:
            out.extend([e] * n)
        return out

    def __len__(self):
        return sum(n for _, n in self.counts)

    def __iter__(self):
        return iter(self.sorted())

    def __repr__(self):
        return "Bag{" + ", ".join(repr(e) for e in self) + "}"


def is_collection(v):
    return isinstance(v, (SetVal, BagVal))


def as_set(v):
    """Bag-to-Set collapse; scalars become singletons, undefined the empty set."""
    if isinstance(v, SetVal):
        return v
    if isinstance(v, BagVal):
        return SetVal(frozenset(e for e, _ in v.counts))
    if v is UNDEFINED:
        return SetVal(frozenset())
    return SetVal(frozenset([v]))

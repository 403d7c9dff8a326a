"""Laurent polynomials over F2 in the lattice variables x, y, z and a sublattice marker s.

A polynomial is a finite set of monomials ``x^i y^j z^k s^m``; a monomial is
present iff its coefficient is 1.  Addition is the symmetric difference of the
term sets and multiplication adds exponents and reduces coefficients mod 2.

The marker ``s`` labels the second sublattice.  It squares to one, so ``m`` is
always 0 or 1 and ``conj`` leaves it alone.  With that convention the constant
coefficient of ``a * conj(b)`` counts same-site overlaps of ``a`` and ``b``
(sites on different sublattices never overlap).

Text form is a sum of monomials such as ``"1 + x*y + x^-1*s"``; ``parse`` and
``str`` round-trip exactly.
"""

from __future__ import annotations

import re
from collections.abc import Iterable
from typing import Optional

Monomial = tuple[int, int, int, int]

_VARS = ("x", "y", "z", "s")
_FACTOR_RE = re.compile(r"^([xyzs])(?:\^(-?\d+))?$")


def _sort_key(mono: Monomial):
    i, j, k, m = mono
    return (m, k, j, i)


class F2LaurentPoly:
    """Immutable Laurent polynomial over F2 (see module docstring)."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Iterable[Monomial] = ()):
        acc: set[Monomial] = set()
        for t in terms:
            i, j, k, m = t
            if m not in (0, 1):
                raise ValueError(f"sublattice exponent must be 0 or 1, got {m}")
            mono = (int(i), int(j), int(k), int(m))
            # XOR semantics: a repeated monomial cancels
            if mono in acc:
                acc.remove(mono)
            else:
                acc.add(mono)
        self._terms = frozenset(acc)
        self._hash = hash(self._terms)

    @classmethod
    def _from_frozen(cls, terms: frozenset) -> "F2LaurentPoly":
        # trusted path: terms already deduplicated
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._hash = hash(terms)
        return obj

    # -- constructors -------------------------------------------------------
    @classmethod
    def zero(cls) -> "F2LaurentPoly":
        return cls()

    @classmethod
    def one(cls) -> "F2LaurentPoly":
        return cls([(0, 0, 0, 0)])

    @classmethod
    def monomial(cls, i: int = 0, j: int = 0, k: int = 0, m: int = 0) -> "F2LaurentPoly":
        return cls([(i, j, k, m)])

    @classmethod
    def from_x_exponents(cls, exponents: Iterable[int]) -> "F2LaurentPoly":
        """Polynomial in x alone, e.g. ``from_x_exponents([0, 1])`` is ``1 + x``."""
        return cls((e, 0, 0, 0) for e in exponents)

    # -- basic protocol -----------------------------------------------------
    @property
    def terms(self) -> frozenset:
        return self._terms

    def sorted_terms(self) -> list[Monomial]:
        return sorted(self._terms, key=_sort_key)

    def __iter__(self):
        return iter(self.sorted_terms())

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __contains__(self, mono) -> bool:
        return tuple(mono) in self._terms

    def __eq__(self, other) -> bool:
        if isinstance(other, int) and other in (0, 1):
            other = F2LaurentPoly.one() if other else F2LaurentPoly()
        if not isinstance(other, F2LaurentPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"F2LaurentPoly({str(self)!r})"

    def __str__(self) -> str:
        return format_poly(self)

    def __add__(self, other: "F2LaurentPoly") -> "F2LaurentPoly":
        return add(self, other)

    __sub__ = __add__
    __radd__ = __add__

    def __mul__(self, other: "F2LaurentPoly") -> "F2LaurentPoly":
        return mul(self, other)

    def __pow__(self, n: int) -> "F2LaurentPoly":
        if n < 0:
            raise ValueError("negative powers are only defined for monomials; use conj")
        result = F2LaurentPoly.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- queries ------------------------------------------------------------
    def conj(self) -> "F2LaurentPoly":
        return conj(self)

    def coeff(self, i: int = 0, j: int = 0, k: int = 0, m: int = 0) -> int:
        return coeff(self, i, j, k, m)

    def is_x_only(self) -> bool:
        return all(j == 0 and k == 0 and m == 0 for (_, j, k, m) in self._terms)

    def x_exponents(self) -> list[int]:
        if not self.is_x_only():
            raise ValueError(f"{self} is not a polynomial in x alone")
        return sorted(i for (i, _, _, _) in self._terms)

    def shift(self, i: int = 0, j: int = 0, k: int = 0) -> "F2LaurentPoly":
        """Multiply by the monomial ``x^i y^j z^k``."""
        return F2LaurentPoly((a + i, b + j, c + k, m) for (a, b, c, m) in self._terms)

    def wrap(self, period_x: Optional[int] = None, period_y: Optional[int] = None) -> "F2LaurentPoly":
        """Reduce x (and optionally y) exponents modulo a lattice period."""
        if period_x is None and period_y is None:
            return self
        out = []
        for i, j, k, m in self._terms:
            if period_x is not None:
                i %= period_x
            if period_y is not None:
                j %= period_y
            out.append((i, j, k, m))
        return F2LaurentPoly(out)


def add(p: F2LaurentPoly, q: F2LaurentPoly) -> F2LaurentPoly:
    return F2LaurentPoly._from_frozen(p.terms ^ q.terms)


def mul(p: F2LaurentPoly, q: F2LaurentPoly) -> F2LaurentPoly:
    if len(p) > len(q):
        p, q = q, p
    acc: set[Monomial] = set()
    for (a, b, c, m) in p.terms:
        for (d, e, f, n) in q.terms:
            mono = (a + d, b + e, c + f, m ^ n)
            if mono in acc:
                acc.remove(mono)
            else:
                acc.add(mono)
    return F2LaurentPoly._from_frozen(frozenset(acc))


def conj(p: F2LaurentPoly) -> F2LaurentPoly:
    return F2LaurentPoly._from_frozen(frozenset((-i, -j, -k, m) for (i, j, k, m) in p.terms))


def commutation_poly(a: F2LaurentPoly, b: F2LaurentPoly) -> F2LaurentPoly:
    """``a * conj(b)``.

    The coefficient at ``x^i y^j z^k`` is 1 exactly when ``X(a)`` anticommutes
    with ``Z(x^i y^j z^k b)``.
    """
    return mul(a, conj(b))


def coeff(p: F2LaurentPoly, i: int = 0, j: int = 0, k: int = 0, m: int = 0) -> int:
    return int((i, j, k, m) in p.terms)


def _check_x_only(f: F2LaurentPoly, name: str) -> None:
    if not f.is_x_only():
        raise ValueError(f"{name} must be a polynomial in x alone, got {f}")


def ca_expand(f: F2LaurentPoly, rows: int, period_x: Optional[int] = None) -> F2LaurentPoly:
    """Sum of ``f(x)^t y^t`` for t = 0..rows: the light cone of the cellular automaton ``f``."""
    _check_x_only(f, "update rule f")
    if rows < 0:
        raise ValueError("rows must be non-negative")
    out: set[Monomial] = set()
    row = F2LaurentPoly.one()
    for t in range(rows + 1):
        out.update((i, t, 0, 0) for (i, _, _, _) in row.terms)
        row = (row * f).wrap(period_x)
    return F2LaurentPoly._from_frozen(frozenset(out))


def symmetry_support(
    q: F2LaurentPoly, f: F2LaurentPoly, rows: int, period_x: Optional[int] = None
) -> F2LaurentPoly:
    """X-support of the fractal symmetry generated by first row ``q``: ``q * ca_expand(f, rows)``."""
    _check_x_only(q, "first row q")
    return (q * ca_expand(f, rows, period_x)).wrap(period_x)


# -- text format -------------------------------------------------------------

def _format_monomial(mono: Monomial) -> str:
    factors = []
    for name, e in zip(_VARS, mono):
        if e == 0:
            continue
        factors.append(name if e == 1 else f"{name}^{e}")
    return "*".join(factors) if factors else "1"


def format_poly(p: F2LaurentPoly) -> str:
    if not p:
        return "0"
    return " + ".join(_format_monomial(t) for t in p.sorted_terms())


def parse(text: str) -> F2LaurentPoly:
    """Parse ``"1 + x*y + x^-1*s"``-style text (whitespace-insensitive)."""
    compact = re.sub(r"\s+", "", text)
    if not compact:
        raise ValueError("empty polynomial string")
    if compact == "0":
        return F2LaurentPoly()
    monos = []
    for term in compact.split("+"):
        if not term:
            raise ValueError(f"malformed polynomial {text!r}")
        exps = [0, 0, 0, 0]
        for factor in term.split("*"):
            if factor == "1":
                continue
            match = _FACTOR_RE.match(factor)
            if match is None:
                raise ValueError(f"cannot parse factor {factor!r} in {text!r}")
            idx = _VARS.index(match.group(1))
            exps[idx] += int(match.group(2)) if match.group(2) is not None else 1
        if exps[3] not in (0, 1):
            exps[3] %= 2
        monos.append(tuple(exps))
    return F2LaurentPoly(monos)


ONE = F2LaurentPoly.one()
ZERO = F2LaurentPoly.zero()
X = F2LaurentPoly.monomial(1, 0, 0, 0)
Y = F2LaurentPoly.monomial(0, 1, 0, 0)
Z = F2LaurentPoly.monomial(0, 0, 1, 0)
S = F2LaurentPoly.monomial(0, 0, 0, 1)

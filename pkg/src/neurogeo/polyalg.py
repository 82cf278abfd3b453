"""Exact sparse multivariate polynomials over Q or F_p.

Coefficients are Python ``int``/``Fraction`` (rational mode, ``modulus=None``)
or residues in ``[0, p)`` (prime-field mode). Terms are stored in a dict keyed
by exponent tuples and are canonical after every operation: no zero
coefficients, rationals in lowest terms, integral rationals stored as ``int``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from . import kernels

__all__ = [
    "Activation",
    "MultiPoly",
    "PolyMap",
    "grlex_key",
    "lex_key",
    "monomials_of_degree",
    "normalize",
    "parse_poly",
    "parse_scalar",
    "scalar_to_str",
    "to_mod",
    "to_sympy",
]


def normalize(c):
    """Canonical exact scalar: ``Fraction`` with denominator 1 becomes ``int``."""
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else c
    if isinstance(c, int):
        return c
    if isinstance(c, str):
        return parse_scalar(c)
    raise TypeError(f"not an exact scalar: {c!r}")


def to_mod(c, p: int) -> int:
    """Reduce an exact rational into F_p. Raises ZeroDivisionError if p divides the denominator."""
    if isinstance(c, Fraction):
        den = c.denominator % p
        if den == 0:
            raise ZeroDivisionError(f"prime {p} divides denominator {c.denominator}")
        return c.numerator * pow(den, -1, p) % p
    return int(c) % p


def parse_scalar(s) -> int | Fraction:
    if isinstance(s, (int, Fraction)):
        return normalize(s)
    return normalize(Fraction(str(s).strip()))


def scalar_to_str(c) -> str:
    c = Fraction(c)
    return f"{c.numerator}/{c.denominator}"


def grlex_key(exps: Sequence[int]):
    """Sort key for graded-lex order; use with ``reverse=True`` for descending."""
    return (sum(exps), tuple(exps))


def lex_key(exps: Sequence[int]):
    return tuple(exps)


def monomials_of_degree(nvars: int, degree: int) -> list[tuple[int, ...]]:
    """All exponent vectors of the given total degree, in descending lex order."""
    if nvars == 0:
        return [()] if degree == 0 else []
    if nvars == 1:
        return [(degree,)]
    out = []
    for e in range(degree, -1, -1):
        for rest in monomials_of_degree(nvars - 1, degree - e):
            out.append((e,) + rest)
    return out


def _pack_layout(nvars: int, maxexp: int):
    bits = max(1, maxexp.bit_length())
    if bits * nvars > 63:
        return None
    return bits


def _pack(exps, bits):
    k = 0
    for e in exps:
        k = (k << bits) | e
    return k


def _unpacker(nvars, bits):
    mask = (1 << bits) - 1
    shifts = [bits * (nvars - 1 - i) for i in range(nvars)]

    def unpack(k):
        return tuple((k >> s) & mask for s in shifts)

    return unpack


class MultiPoly:
    """Immutable sparse polynomial in ``nvars`` variables.

    >>> x, y = MultiPoly.variable(0, 2), MultiPoly.variable(1, 2)
    >>> (x + y) * (x - y) == x**2 - y**2
    True
    """

    __slots__ = ("nvars", "terms", "modulus", "_hash")

    def __init__(self, nvars: int, terms=None, modulus: int | None = None):
        if nvars < 0:
            raise ValueError("nvars must be non-negative")
        self.nvars = nvars
        self.modulus = modulus
        self._hash = None
        clean = {}
        if terms:
            for exps, c in dict(terms).items():
                exps = tuple(int(e) for e in exps)
                if len(exps) != nvars:
                    raise ValueError(f"monomial {exps} has wrong length for {nvars} variables")
                if any(e < 0 for e in exps):
                    raise ValueError("negative exponent")
                c = to_mod(normalize(c), modulus) if modulus else normalize(c)
                if c:
                    clean[exps] = (clean.get(exps, 0) + c) % modulus if modulus else normalize(clean.get(exps, 0) + c)
                    if not clean[exps]:
                        del clean[exps]
        self.terms = clean

    @classmethod
    def _raw(cls, nvars, terms, modulus):
        obj = cls.__new__(cls)
        obj.nvars = nvars
        obj.terms = terms
        obj.modulus = modulus
        obj._hash = None
        return obj

    # constructors
    @classmethod
    def zero(cls, nvars: int, modulus: int | None = None) -> "MultiPoly":
        return cls._raw(nvars, {}, modulus)

    @classmethod
    def constant(cls, c, nvars: int, modulus: int | None = None) -> "MultiPoly":
        c = to_mod(normalize(c), modulus) if modulus else normalize(c)
        return cls._raw(nvars, {(0,) * nvars: c} if c else {}, modulus)

    @classmethod
    def variable(cls, index: int, nvars: int, modulus: int | None = None) -> "MultiPoly":
        if not 0 <= index < nvars:
            raise IndexError(f"variable index {index} out of range for {nvars} variables")
        exps = [0] * nvars
        exps[index] = 1
        return cls._raw(nvars, {tuple(exps): 1}, modulus)

    @classmethod
    def variables(cls, nvars: int, modulus: int | None = None) -> list["MultiPoly"]:
        return [cls.variable(i, nvars, modulus) for i in range(nvars)]

    # basic queries
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def degrees(self) -> set[int]:
        return {sum(e) for e in self.terms}

    def coefficient(self, exps) -> int | Fraction:
        return self.terms.get(tuple(exps), 0)

    def constant_term(self):
        return self.terms.get((0,) * self.nvars, 0)

    def sorted_terms(self, key=grlex_key):
        return sorted(self.terms.items(), key=lambda kv: key(kv[0]), reverse=True)

    # arithmetic
    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            if other.nvars != self.nvars:
                raise ValueError(f"mismatched numVars: {self.nvars} vs {other.nvars}")
            if other.modulus != self.modulus:
                raise ValueError("mismatched coefficient fields")
            return other
        if isinstance(other, (int, Fraction)):
            return MultiPoly.constant(other, self.nvars, self.modulus)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if len(other.terms) > len(self.terms):
            big, small = other.terms, self.terms
        else:
            big, small = self.terms, other.terms
        out = dict(big)
        p = self.modulus
        for e, c in small.items():
            v = out.get(e, 0) + c
            if p:
                v %= p
            elif isinstance(v, Fraction):
                v = normalize(v)
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return MultiPoly._raw(self.nvars, out, p)

    __radd__ = __add__

    def __neg__(self):
        p = self.modulus
        if p:
            return MultiPoly._raw(self.nvars, {e: (p - c) % p for e, c in self.terms.items()}, p)
        return MultiPoly._raw(self.nvars, {e: -c for e, c in self.terms.items()}, p)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "MultiPoly":
        p = self.modulus
        c = to_mod(normalize(c), p) if p else normalize(c)
        if not c:
            return MultiPoly.zero(self.nvars, p)
        if p:
            return MultiPoly._raw(self.nvars, {e: v * c % p for e, v in self.terms.items()}, p)
        if c == 1:
            return self
        return MultiPoly._raw(self.nvars, {e: normalize(v * c) for e, v in self.terms.items()}, p)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self.mul(other)

    __rmul__ = __mul__

    def mul(self, other: "MultiPoly", max_degree: int | None = None) -> "MultiPoly":
        """Product, optionally truncated to total degree ``<= max_degree``."""
        other = self._coerce(other)
        n, p = self.nvars, self.modulus
        if not self.terms or not other.terms:
            return MultiPoly.zero(n, p)
        if n == 0:
            v = self.terms[()] * other.terms[()]
            v = v % p if p else normalize(v)
            return MultiPoly._raw(0, {(): v} if v else {}, p)
        maxexp = max(max(e) for e in self.terms) + max(max(e) for e in other.terms)
        bits = _pack_layout(n, maxexp)
        if bits is None:
            out = self._mul_tuples(other)
        else:
            ka = [_pack(e, bits) for e in self.terms]
            kb = [_pack(e, bits) for e in other.terms]
            if p and p < (1 << 63):
                keys, coefs = kernels.mul_packed(ka, list(self.terms.values()), kb,
                                                 list(other.terms.values()), p)
                acc = zip(keys, coefs)
            else:
                acc = _mul_packed_exact(ka, list(self.terms.values()), kb,
                                        list(other.terms.values()), p).items()
            unpack = _unpacker(n, bits)
            out = {unpack(k): c for k, c in acc}
        if max_degree is not None:
            out = {e: c for e, c in out.items() if sum(e) <= max_degree}
        return MultiPoly._raw(n, out, p)

    def _mul_tuples(self, other):
        p = self.modulus
        acc: dict = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                acc[e] = acc.get(e, 0) + ca * cb
        out = {}
        for e, c in acc.items():
            c = c % p if p else normalize(c)
            if c:
                out[e] = c
        return out

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = MultiPoly.constant(1, self.nvars, self.modulus)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = MultiPoly.constant(other, self.nvars, self.modulus)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return (self.nvars == other.nvars and self.modulus == other.modulus
                and self.terms == other.terms)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, self.modulus, frozenset(self.terms.items())))
        return self._hash

    # calculus and evaluation
    def evaluate(self, point: Sequence):
        if len(point) != self.nvars:
            raise ValueError(f"point has length {len(point)}, expected {self.nvars}")
        p = self.modulus
        if p:
            pt = [to_mod(normalize(x), p) for x in point]
            total = 0
            for e, c in self.terms.items():
                v = c
                for x, k in zip(pt, e):
                    if k:
                        v = v * pow(x, k, p) % p
                total += v
            return total % p
        pt = [normalize(x) for x in point]
        total = 0
        for e, c in self.terms.items():
            v = c
            for x, k in zip(pt, e):
                if k:
                    v *= x ** k
            total += v
        return normalize(Fraction(total))

    def partial(self, index: int) -> "MultiPoly":
        if not 0 <= index < self.nvars:
            raise IndexError(f"variable index {index} out of range")
        p = self.modulus
        out = {}
        for e, c in self.terms.items():
            k = e[index]
            if k:
                ne = e[:index] + (k - 1,) + e[index + 1:]
                v = c * k % p if p else c * k
                if v:
                    out[ne] = v
        return MultiPoly._raw(self.nvars, out, p)

    def gradient(self) -> list["MultiPoly"]:
        return [self.partial(i) for i in range(self.nvars)]

    def homogeneous_component(self, degree: int) -> "MultiPoly":
        if degree < 0:
            raise ValueError("degree must be non-negative")
        return MultiPoly._raw(self.nvars, {e: c for e, c in self.terms.items() if sum(e) == degree},
                              self.modulus)

    def truncate(self, max_degree: int) -> "MultiPoly":
        return MultiPoly._raw(self.nvars, {e: c for e, c in self.terms.items() if sum(e) <= max_degree},
                              self.modulus)

    def substitute(self, values: dict[int, object]) -> "MultiPoly":
        """Partially evaluate: fix the variables in ``values`` (index -> scalar).

        The variable count is unchanged; fixed variables simply no longer occur.
        """
        p = self.modulus
        vals = {i: (to_mod(normalize(v), p) if p else normalize(v)) for i, v in values.items()}
        out: dict = {}
        for e, c in self.terms.items():
            v = c
            ne = list(e)
            for i, x in vals.items():
                k = e[i]
                if k:
                    v = v * pow(x, k, p) % p if p else v * x ** k
                    ne[i] = 0
            if v:
                ne = tuple(ne)
                out[ne] = out.get(ne, 0) + v
        clean = {}
        for e, c in out.items():
            c = c % p if p else normalize(c)
            if c:
                clean[e] = c
        return MultiPoly._raw(self.nvars, clean, p)

    def compose(self, substitutions: Sequence["MultiPoly"]) -> "MultiPoly":
        """Substitute polynomial ``substitutions[i]`` for variable ``i``."""
        if len(substitutions) != self.nvars:
            raise ValueError("need one substitution per variable")
        if not substitutions:
            return self
        target = substitutions[0]
        m, p = target.nvars, target.modulus
        cache: dict = {}

        def power(i, k):
            key = (i, k)
            if key not in cache:
                cache[key] = substitutions[i] ** k
            return cache[key]

        total = MultiPoly.zero(m, p)
        for e, c in self.terms.items():
            term = MultiPoly.constant(c, m, p)
            for i, k in enumerate(e):
                if k:
                    term = term * power(i, k)
            total = total + term
        return total

    def reduce_mod(self, p: int) -> "MultiPoly":
        if self.modulus is not None:
            if self.modulus == p:
                return self
            raise ValueError("polynomial already lives in a different prime field")
        out = {}
        for e, c in self.terms.items():
            v = to_mod(c, p)
            if v:
                out[e] = v
        return MultiPoly._raw(self.nvars, out, p)

    def lift(self, nvars: int, positions: Sequence[int]) -> "MultiPoly":
        """Re-index into ``nvars`` variables; variable ``i`` goes to ``positions[i]``."""
        out = {}
        for e, c in self.terms.items():
            ne = [0] * nvars
            for i, k in enumerate(e):
                ne[positions[i]] += k
            out[tuple(ne)] = c
        return MultiPoly._raw(nvars, out, self.modulus)

    # serialization
    def to_text(self, names: Sequence[str] | None = None) -> str:
        if not self.terms:
            return "0"
        names = names or [f"x{i + 1}" for i in range(self.nvars)]
        parts = []
        for e, c in self.sorted_terms():
            cs = str(c) if self.modulus else scalar_to_str(c)
            factors = [cs]
            for nm, k in zip(names, e):
                if k == 1:
                    factors.append(nm)
                elif k:
                    factors.append(f"{nm}^{k}")
            parts.append("*".join(factors))
        return " + ".join(parts)

    def to_json(self) -> list[dict]:
        return [
            {"exp": list(e), "coef": str(c) if self.modulus else scalar_to_str(c)}
            for e, c in self.sorted_terms()
        ]

    @classmethod
    def from_json(cls, data, nvars: int | None = None, modulus: int | None = None) -> "MultiPoly":
        if isinstance(data, str):
            data = json.loads(data)
        if nvars is None:
            if not data:
                raise ValueError("cannot infer numVars from an empty term list")
            nvars = len(data[0]["exp"])
        return cls(nvars, {tuple(t["exp"]): parse_scalar(t["coef"]) for t in data}, modulus)

    def __repr__(self):
        field = f", mod {self.modulus}" if self.modulus else ""
        return f"MultiPoly({self.to_text()}{field})"


def _mul_packed_exact(ka, ca, kb, cb, p):
    acc: dict = {}
    get = acc.get
    for a, x in zip(ka, ca):
        for b, y in zip(kb, cb):
            k = a + b
            acc[k] = get(k, 0) + x * y
    out = {}
    for k, c in acc.items():
        c = c % p if p else normalize(c)
        if c:
            out[k] = c
    return out


def horner(coeffs: Sequence, p: MultiPoly, max_degree: int | None = None) -> MultiPoly:
    """Evaluate ``sum(coeffs[i] * p**i)`` by Horner's scheme."""
    n, mod = p.nvars, p.modulus
    result = MultiPoly.zero(n, mod)
    for c in reversed(coeffs):
        result = result.mul(p, max_degree) if result.terms else result
        if c:
            result = result + MultiPoly.constant(c, n, mod)
    return result


@dataclass(frozen=True)
class Activation:
    """Polynomial activation ``sum(coeffs[i] * x**i)``, coefficients low-to-high."""

    coeffs: tuple

    def __post_init__(self):
        cs = tuple(normalize(parse_scalar(c)) for c in self.coeffs)
        if len(cs) < 2 or cs[-1] == 0:
            raise ValueError("activation needs degree >= 1 and a nonzero leading coefficient")
        object.__setattr__(self, "coeffs", cs)

    @classmethod
    def monomial(cls, r: int) -> "Activation":
        return cls((0,) * r + (1,))

    @classmethod
    def from_exponents(cls, exponents: Iterable[int]) -> "Activation":
        exps = sorted(set(exponents))
        cs = [0] * (exps[-1] + 1)
        for e in exps:
            cs[e] = 1
        return cls(tuple(cs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(i for i, c in enumerate(self.coeffs) if c)

    def nonzero_count(self) -> int:
        return len(self.support)

    def vanishes_at_zero(self) -> bool:
        return self.coeffs[0] == 0

    def derivative_coeffs(self) -> tuple:
        return tuple(normalize(i * c) for i, c in enumerate(self.coeffs))[1:] or (0,)

    def __call__(self, x):
        if isinstance(x, MultiPoly):
            return self.compose(x)
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return normalize(Fraction(acc)) if not isinstance(acc, int) else acc

    def compose(self, p: MultiPoly, max_degree: int | None = None) -> MultiPoly:
        return horner(self.coeffs, p, max_degree)

    def derivative_compose(self, p: MultiPoly, max_degree: int | None = None) -> MultiPoly:
        return horner(self.derivative_coeffs(), p, max_degree)

    def to_json(self) -> list[str]:
        return [scalar_to_str(c) for c in self.coeffs]


class PolyMap:
    """A vector of polynomials sharing one variable set."""

    __slots__ = ("components",)

    def __init__(self, components: Sequence[MultiPoly]):
        comps = tuple(components)
        if comps and len({c.nvars for c in comps}) != 1:
            raise ValueError("all components must agree on numVars")
        self.components = comps

    @property
    def nvars(self) -> int:
        return self.components[0].nvars if self.components else 0

    def __len__(self):
        return len(self.components)

    def __getitem__(self, i):
        return self.components[i]

    def __iter__(self):
        return iter(self.components)

    def __eq__(self, other):
        return isinstance(other, PolyMap) and self.components == other.components

    def __hash__(self):
        return hash(self.components)

    def evaluate(self, point: Sequence) -> tuple:
        return tuple(c.evaluate(point) for c in self.components)

    def degree(self) -> int:
        return max((c.degree() for c in self.components), default=-1)

    def __repr__(self):
        return "PolyMap(" + ", ".join(c.to_text() for c in self.components) + ")"


# ---- text and sympy interop ----------------------------------------------------

def parse_poly(text: str, names: Sequence[str]) -> MultiPoly:
    """Parse an expression such as ``"3*a^2*e + c^3*f"`` over the given variable names."""
    import sympy

    syms = sympy.symbols(list(names))
    expr = sympy.sympify(text.replace("^", "**"), locals={n: s for n, s in zip(names, syms)})
    poly = sympy.Poly(sympy.expand(expr), *syms, domain="QQ")
    terms = {}
    for exps, c in poly.terms():
        terms[tuple(exps)] = Fraction(int(c.p), int(c.q))
    return MultiPoly(len(names), terms)


def to_sympy(poly: MultiPoly, symbols: Sequence):
    import sympy

    out = sympy.Integer(0)
    for e, c in poly.terms.items():
        c = Fraction(c)
        term = sympy.Rational(c.numerator, c.denominator)
        for s, k in zip(symbols, e):
            if k:
                term *= s ** k
        out += term
    return out

"""Exact dense linear algebra over Q, F_p and Z.

Matrices are plain lists of row lists. Rational routines use fraction-free
(Bareiss) elimination where only the rank or determinant is needed; modular
routines dispatch to the compiled kernels when available.
"""
from __future__ import annotations

import math
import random
from fractions import Fraction
from typing import Sequence

from sympy import isprime

from . import kernels
from .polyalg import MultiPoly, normalize, to_mod

DEFAULT_PRIME_BITS = 62


class BadPrimeError(ZeroDivisionError):
    """The chosen prime divides a denominator of the input."""


def shape(m) -> tuple[int, int]:
    return len(m), (len(m[0]) if m else 0)


def transpose(m):
    return [list(col) for col in zip(*m)] if m else []


def matmul(a, b):
    bt = transpose(b)
    return [[normalize(sum((x * y for x, y in zip(row, col)), 0)) for col in bt] for row in a]


def identity(n: int):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def random_prime(rng: random.Random, bits: int = DEFAULT_PRIME_BITS) -> int:
    """A random prime with exactly ``bits`` bits drawn from ``rng``."""
    while True:
        c = rng.getrandbits(bits) | (1 << (bits - 1)) | 1
        if isprime(c):
            return c


def primes_from_seed(seed: int, count: int = 2, bits: int = DEFAULT_PRIME_BITS) -> list[int]:
    rng = random.Random(f"primes:{seed}")
    out: list[int] = []
    while len(out) < count:
        q = random_prime(rng, bits)
        if q not in out:
            out.append(q)
    return out


def mod_matrix(m, p: int):
    try:
        return [[to_mod(x, p) for x in row] for row in m]
    except ZeroDivisionError as exc:
        raise BadPrimeError(str(exc)) from exc


# ---- prime field ---------------------------------------------------------

def rank_mod_p(m, p: int, ncols: int | None = None) -> int:
    if not m:
        return 0
    ncols = len(m[0]) if ncols is None else ncols
    return kernels.rank_mod_p(mod_matrix(m, p), ncols, p)


def rref_mod_p(m, p: int, ncols: int | None = None):
    if not m:
        return 0, [], []
    ncols = len(m[0]) if ncols is None else ncols
    return kernels.rref_mod_p(mod_matrix(m, p), ncols, p)


def nullspace_mod_p(m, p: int, ncols: int | None = None) -> list[list[int]]:
    """Basis of the right kernel over F_p, one vector per free column."""
    ncols = (len(m[0]) if m else 0) if ncols is None else ncols
    rank, pivots, red = rref_mod_p(m, p, ncols)
    pivset = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivset:
            continue
        v = [0] * ncols
        v[free] = 1
        for r, pc in enumerate(pivots):
            v[pc] = (-red[r][free]) % p
        basis.append(v)
    return basis


# ---- rationals -----------------------------------------------------------

def _integer_rows(m):
    out = []
    for row in m:
        den = 1
        for x in row:
            if isinstance(x, Fraction):
                den = den * x.denominator // math.gcd(den, x.denominator)
        out.append([int(x * den) for x in row])
    return out


def rank_rational(m) -> int:
    """Exact rank over Q by fraction-free elimination."""
    if not m:
        return 0
    a = _integer_rows(m)
    nrows, ncols = len(a), len(a[0])
    rank, prev = 0, 1
    for c in range(ncols):
        if rank == nrows:
            break
        piv = next((i for i in range(rank, nrows) if a[i][c]), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        pr = a[rank]
        pv = pr[c]
        for i in range(rank + 1, nrows):
            row = a[i]
            f = row[c]
            a[i] = [(pv * x - f * y) // prev for x, y in zip(row, pr)]
        prev = pv
        rank += 1
    return rank


def det_rational(m) -> int | Fraction:
    """Determinant of a square matrix over Q (Bareiss)."""
    n = len(m)
    if n == 0:
        return 1
    if any(len(r) != n for r in m):
        raise ValueError("determinant needs a square matrix")
    dens = [1] * n
    for i, row in enumerate(m):
        for x in row:
            if isinstance(x, Fraction):
                dens[i] = dens[i] * x.denominator // math.gcd(dens[i], x.denominator)
    a = [[int(x * d) for x in row] for row, d in zip(m, dens)]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k]), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    total_den = math.prod(dens)
    return normalize(Fraction(sign * a[n - 1][n - 1], total_den))


def rref_rational(m):
    """Reduced row echelon form over Q; returns ``(rank, pivots, rows)``."""
    a = [[Fraction(x) for x in row] for row in m]
    nrows = len(a)
    ncols = len(a[0]) if a else 0
    pivots = []
    rank = 0
    for c in range(ncols):
        if rank == nrows:
            break
        piv = next((i for i in range(rank, nrows) if a[i][c]), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        pv = a[rank][c]
        a[rank] = [x / pv for x in a[rank]]
        pr = a[rank]
        for i in range(nrows):
            if i != rank and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], pr)]
        pivots.append(c)
        rank += 1
    return rank, pivots, [[normalize(x) for x in row] for row in a[:rank]]


def nullspace_rational(m, ncols: int | None = None) -> list[list]:
    ncols = (len(m[0]) if m else 0) if ncols is None else ncols
    if not m:
        return [[1 if i == j else 0 for i in range(ncols)] for j in range(ncols)]
    rank, pivots, red = rref_rational(m)
    pivset = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivset:
            continue
        v = [0] * ncols
        v[free] = 1
        for r, pc in enumerate(pivots):
            v[pc] = normalize(-red[r][free])
        basis.append(v)
    return basis


def solve_rational(a, b) -> list | None:
    """Solve ``a x = b`` for a square nonsingular ``a``; None if singular."""
    n = len(a)
    aug = [list(row) + [bv] for row, bv in zip(a, b)]
    rank, pivots, red = rref_rational(aug)
    if rank < n or pivots[:n] != list(range(n)):
        return None
    return [red[i][n] for i in range(n)]


# ---- symbolic ------------------------------------------------------------

def det_poly(m: Sequence[Sequence[MultiPoly]]) -> MultiPoly:
    """Determinant of a small matrix of polynomials by Laplace expansion."""
    n = len(m)
    if n == 1:
        return m[0][0]
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    total = None
    for j in range(n):
        if m[0][j].is_zero():
            continue
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = m[0][j] * det_poly(minor)
        term = term if j % 2 == 0 else -term
        total = term if total is None else total + term
    if total is None:
        return MultiPoly.zero(m[0][0].nvars, m[0][0].modulus)
    return total


def evaluate_matrix(m, point, modulus: int | None = None):
    """Evaluate a matrix of polynomials at ``point`` (over Q, or F_p when given)."""
    out = []
    for row in m:
        vals = []
        for e in row:
            v = e.evaluate(point)
            vals.append(to_mod(v, modulus) if modulus else v)
        out.append(vals)
    return out


# ---- reconstruction --------------------------------------------------------

def crt_pair(r1: int, m1: int, r2: int, m2: int) -> tuple[int, int]:
    inv = pow(m1, -1, m2)
    x = (r1 + m1 * ((r2 - r1) * inv % m2)) % (m1 * m2)
    return x, m1 * m2


def rational_reconstruct(a: int, m: int) -> Fraction | None:
    """Find n/d == a (mod m) with |n|, d <= sqrt(m/2), or None."""
    a %= m
    bound = math.isqrt(m // 2)
    r0, r1 = m, a
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound:
        return None
    frac = Fraction(r1, s1)
    if math.gcd(frac.denominator, m) != 1:
        return None
    return frac


def primitive_integer_vector(v: Sequence) -> list[int]:
    """Scale a rational vector to coprime integers (sign untouched)."""
    fr = [Fraction(x) for x in v]
    den = 1
    for x in fr:
        den = den * x.denominator // math.gcd(den, x.denominator)
    ints = [int(x * den) for x in fr]
    g = 0
    for x in ints:
        g = math.gcd(g, x)
    if g == 0:
        return ints
    return [x // g for x in ints]

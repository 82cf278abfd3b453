"""Squared-error loss as a quadric, critical points, exposedness counts, CNN singularities."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import linalg
from .geometry import generic_rank, jacobian_at
from .netparam import (
    AmbientBasis,
    CnnSpec,
    CnnWeights,
    CoeffVector,
    MlpSpec,
    MlpWeights,
    SubnetCnnSpec,
    SubnetMlpSpec,
    apply_cnn_subnetwork,
    embed,
    family_map,
    shift_subnetwork_weights,
    tilde_profile,
)
from .polyalg import normalize, scalar_to_str


class MissingCenterError(ValueError):
    """The quadric is degenerate, so the loss has no center u."""


# ---- quadric losses ---------------------------------------------------------

@dataclass
class QuadricLoss:
    """L(c) = c^T G c - 2 b^T c + constant on ambient coordinates c.

    When G is nondegenerate this is Q(c - u) + const' with u = G^-1 b.
    """
    basis: AmbientBasis
    gram: list
    b: list
    constant: object = 0
    center: CoeffVector | None = None

    @classmethod
    def standard(cls, basis: AmbientBasis, u: CoeffVector | Sequence) -> "QuadricLoss":
        """Euclidean distance to ``u`` in the ambient coordinates (G = identity)."""
        coords = tuple(u.coords if isinstance(u, CoeffVector) else (normalize(Fraction(x)) for x in u))
        u = CoeffVector(basis, coords)
        const = normalize(sum((Fraction(x) ** 2 for x in coords), Fraction(0)))
        return cls(basis, linalg.identity(len(basis)), list(coords), const, u)

    @classmethod
    def with_gram(cls, basis: AmbientBasis, gram, u: CoeffVector) -> "QuadricLoss":
        gu = [normalize(sum((Fraction(g) * c for g, c in zip(row, u.coords)), Fraction(0))) for row in gram]
        const = normalize(sum((Fraction(a) * c for a, c in zip(gu, u.coords)), Fraction(0)))
        return cls(basis, [list(r) for r in gram], gu, const, u)

    @property
    def degenerate(self) -> bool:
        return self.center is None

    def value(self, c: Sequence):
        c = [Fraction(x) for x in c]
        quad = sum(ci * sum(Fraction(g) * cj for g, cj in zip(row, c)) for ci, row in zip(c, self.gram))
        lin = sum(Fraction(bi) * ci for bi, ci in zip(self.b, c))
        return normalize(quad - 2 * lin + Fraction(self.constant))

    def residual(self, c: Sequence) -> list:
        """G c - b, i.e. G (c - u) when the center exists."""
        return [normalize(sum((Fraction(g) * Fraction(x) for g, x in zip(row, c)), Fraction(0)) - Fraction(bi))
                for row, bi in zip(self.gram, self.b)]

    def to_json(self) -> dict:
        return {"gram": [[scalar_to_str(x) for x in r] for r in self.gram],
                "b": [scalar_to_str(x) for x in self.b], "constant": scalar_to_str(self.constant),
                "center": self.center.to_json() if self.center else None}


@dataclass
class Dataset:
    pairs: list

    def __post_init__(self):
        self.pairs = [(tuple(normalize(Fraction(v)) for v in x), tuple(normalize(Fraction(v)) for v in y))
                      for x, y in self.pairs]
        if self.pairs:
            dx, dy = len(self.pairs[0][0]), len(self.pairs[0][1])
            if any(len(x) != dx or len(y) != dy for x, y in self.pairs):
                raise ValueError("inconsistent sample dimensions")

    def squared_error(self, f: CoeffVector):
        total = Fraction(0)
        for x, y in self.pairs:
            total += sum((Fraction(a) - Fraction(b)) ** 2 for a, b in zip(f.evaluate(x), y))
        return normalize(total)


def _monomial_value(x, exps):
    v = Fraction(1)
    for xi, k in zip(x, exps):
        if k:
            v *= Fraction(xi) ** k
    return v


def dataset_to_quadric(data: Dataset, basis: AmbientBasis) -> QuadricLoss:
    """Sum of squared errors over ``data`` as a quadric in the ambient coordinates."""
    n = len(basis)
    if n == 0:
        raise ValueError("empty basis")
    G = [[Fraction(0)] * n for _ in range(n)]
    b = [Fraction(0)] * n
    const = Fraction(0)
    for x, y in data.pairs:
        vals = [_monomial_value(x, m) for _, m in basis.monomials]
        outs = [o for o, _ in basis.monomials]
        for i in range(n):
            b[i] += vals[i] * y[outs[i]]
            for j in range(n):
                if outs[i] == outs[j]:
                    G[i][j] += vals[i] * vals[j]
        const += sum(Fraction(v) ** 2 for v in y)
    G = [[normalize(v) for v in row] for row in G]
    b = [normalize(v) for v in b]
    u = linalg.solve_rational(G, b) if data.pairs else None
    center = CoeffVector(basis, tuple(u)) if u is not None else None
    return QuadricLoss(basis, G, b, normalize(const), center)


# ---- gradients and witnesses ------------------------------------------------------

def gradient_of_loss(spec, W, loss: QuadricLoss) -> list:
    """Exact gradient of W -> L(phi(W)): 2 J^T G (phi(W) - u)."""
    if loss.center is None:
        raise MissingCenterError("degenerate quadric has no center")
    basis = loss.basis
    J = jacobian_at(spec, W, basis)
    r = loss.residual(embed(spec.forward(W), basis).coords)
    return [normalize(2 * sum((Fraction(j) * x for j, x in zip(col, r)), Fraction(0)))
            for col in linalg.transpose(J)] if J else []


@dataclass
class CriticalWitness:
    u: CoeffVector
    phi: CoeffVector
    kernel_dim: int
    gradient: list
    mixing: list = field(default_factory=list)

    @property
    def gradient_zero(self) -> bool:
        return not any(self.gradient)

    def to_json(self) -> dict:
        return {"u": self.u.to_json(), "phi": self.phi.to_json(), "kernelDim": self.kernel_dim,
                "gradientZero": self.gradient_zero, "mixing": self.mixing}


def critical_witness(spec, W, seed: int = 0, gram=None, bound: int = 5) -> CriticalWitness:
    """A target u != phi(W) (when possible) for which W is a critical point of L_u o phi.

    u = phi(W) + v with v a random integer combination of a basis of ker(J^T G).
    """
    basis = spec.basis()
    n = len(basis)
    G = gram or linalg.identity(n)
    phi = embed(spec.forward(W), basis)
    J = jacobian_at(spec, W, basis)
    M = linalg.matmul(linalg.transpose(J), G)
    K = linalg.nullspace_rational(M, n)
    rng = random.Random(f"witness:{seed}")
    mix = [rng.choice([v for v in range(-bound, bound + 1) if v]) for _ in K]
    v = [normalize(sum((Fraction(r) * Fraction(k[i]) for r, k in zip(mix, K)), Fraction(0))) for i in range(n)]
    u = CoeffVector(basis, tuple(normalize(Fraction(a) + b) for a, b in zip(phi.coords, v)))
    loss = QuadricLoss.with_gram(basis, G, u)
    return CriticalWitness(u, phi, len(K), gradient_of_loss(spec, W, loss), mix)


def reduced_network(spec: MlpSpec, W: MlpWeights, subnet: SubnetMlpSpec):
    """Drop the removed neurons of a strict subnetwork.

    Returns the smaller spec, its weights, and for each weight of the reduced
    network its index among the weights of the full one.
    """
    subnet.check(spec)
    keep = [list(range(spec.widths[0]))]
    keep += [[j for j in range(d) if j not in a] for d, a in zip(spec.widths[1:-1], subnet.index_sets)]
    keep.append(list(range(spec.widths[-1])))
    widths = tuple(len(k) for k in keep)
    mats, positions = [], []
    for l, M in enumerate(W.matrices):
        rows, cols = keep[l + 1], keep[l]
        mats.append(tuple(tuple(M[i][j] for j in cols) for i in rows))
        positions.extend(spec.param_index(l, i, j) for i in rows for j in cols)
    return MlpSpec(widths, spec.activation), MlpWeights(tuple(mats)), positions


# ---- exposedness ----------------------------------------------------------------------

@dataclass
class ExposednessReport:
    family_dim: int
    normal_dim: int
    total_dim: int
    ambient_dim: int
    upper_bound: int
    free_params: int
    verdict: str
    normal_mode: str
    seeds: list
    primes: list
    columns: list | None = None

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "familyDim": self.family_dim, "normalDim": self.normal_dim,
                "totalDim": self.total_dim, "ambientDim": self.ambient_dim, "upperBound": self.upper_bound,
                "freeParams": self.free_params, "normalMode": self.normal_mode, "seeds": self.seeds,
                "primes": self.primes, "columns": self.columns}


def exposedness_dimension(spec, family, seed: int = 0, trials: int = 3, normal: str = "full",
                          columns: Sequence[int] | None = None) -> ExposednessReport:
    """Dimension count for the union of translated normal spaces over a parameter family.

    familyDim is the generic rank of the Jacobian restricted to the family's
    free directions (or to ``columns``). normalDim is dim V minus the rank of
    the full Jacobian on the family (``normal="full"``) or minus familyDim
    (``normal="family"``, valid when the removed columns vanish on the family).
    familyDim + normalDim is a lower bound for the union's dimension and
    (#free parameters) + normalDim an upper bound.
    """
    if normal not in ("full", "family"):
        raise ValueError("normal must be 'full' or 'family'")
    fmap = family_map(spec, family)
    nfree = len({q for q in fmap if q is not None})
    fam = generic_rank(spec, trials=trials, seed=seed, family=family, columns=columns)
    ambient = len(spec.basis())
    if normal == "full":
        full = generic_rank(spec, trials=trials, seed=seed, family=family, columns=range(spec.num_params))
        rank_full = full.rank
        certified = fam.certified == full.certified == "probabilistic"
        seeds = fam.point_seeds + full.point_seeds
    else:
        rank_full = fam.rank
        certified = fam.certified == "probabilistic"
        seeds = fam.point_seeds
    normal_dim = ambient - rank_full
    total = fam.rank + normal_dim
    upper = min(ambient, (len(columns) if columns is not None else nfree) + normal_dim)
    if not certified:
        verdict = "inconclusive"
    elif total >= ambient:
        verdict = "exposed"
    elif upper < ambient:
        verdict = "notExposed"
    else:
        verdict = "inconclusive"
    return ExposednessReport(fam.rank, normal_dim, total, ambient, upper, nfree, verdict, normal,
                             seeds, fam.primes, list(columns) if columns is not None else None)


# ---- CNN singularities ------------------------------------------------------------------

@dataclass(frozen=True)
class TildeProfile:
    values: tuple

    @property
    def integral(self) -> bool:
        return all(Fraction(v).denominator == 1 for v in self.values)

    @property
    def terminal_zero(self) -> bool:
        return self.values[-1] == 0

    def pairs(self) -> tuple:
        """(t~_1, ..., t~_L), dropping the leading zero."""
        return tuple(normalize(v) for v in self.values[1:])

    def to_json(self) -> list[str]:
        return [scalar_to_str(v) for v in self.values[1:]]


@dataclass
class CnnSingularity:
    singular: bool
    proper: bool
    profile: TildeProfile

    def to_json(self) -> dict:
        return {"singular": self.singular, "proper": self.proper, "profile": self.profile.to_json()}


def cnn_singularity_classify(spec: CnnSpec, subnet: SubnetCnnSpec) -> CnnSingularity:
    prof = TildeProfile(tilde_profile(spec, subnet))
    proper = subnet.is_proper()
    return CnnSingularity(proper and prof.integral and prof.terminal_zero, proper, prof)


@dataclass
class CnnFiberWitness:
    w: CnnWeights
    w_prime: CnnWeights
    equal: bool

    def to_json(self) -> dict:
        return {"w": self.w.to_json(), "wPrime": self.w_prime.to_json(), "equal": self.equal}


def cnn_fiber_witness(spec: CnnSpec, w: CnnWeights, subnet: SubnetCnnSpec) -> CnnFiberWitness:
    """Second preimage of a singular subnetwork function, built by shifting filters."""
    w = apply_cnn_subnetwork(w, subnet)
    if not subnet.is_proper():
        return CnnFiberWitness(w, w, True)
    if not cnn_singularity_classify(spec, subnet).singular:
        raise ValueError("subnetwork is not classified singular; no shifted preimage exists")
    w2 = shift_subnetwork_weights(spec, w, subnet)
    basis = spec.basis()
    equal = embed(spec.forward(w), basis) == embed(spec.forward(w2), basis)
    if not equal:
        raise RuntimeError("shifted filters changed the network function")
    return CnnFiberWitness(w, w2, equal)


def random_proper_cnn_families(spec: CnnSpec, count: int, seed: int = 0) -> list[SubnetCnnSpec]:
    """Distinct proper padding patterns that keep every filter nonzero."""
    rng = random.Random(f"cnn-families:{seed}")
    pool = [()]
    for k in spec.filters:
        pool = [p + (t,) for p in pool for t in range(-(k - 1), k)]
    pool = [SubnetCnnSpec(p) for p in pool if any(p)]
    rng.shuffle(pool)
    return pool[:count]

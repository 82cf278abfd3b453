"""Identifiability tools: sparse activations, Smith normal form, fiber counts, rigidity."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .linalg import det_rational, identity, matmul
from .netparam import CnnSpec, CnnWeights, MlpSpec, MlpWeights, embed, mlp_forward
from .polyalg import Activation, normalize, scalar_to_str

DEFAULT_SLOT_BUDGET = 10 ** 7


def degree_bound(widths: Sequence[int]) -> int:
    """Activation degree above which the dimension result is guaranteed: (6m)^(2(L-1)^(L-1))."""
    L = len(widths) - 1
    if L < 2:
        raise ValueError("need at least one hidden layer")
    m = 2 * max(widths[1:-1])
    return (6 * m) ** (2 * (L - 1) ** (L - 1))


# ---- sparse activations ------------------------------------------------------------

@dataclass(frozen=True)
class SparseActivationSpec:
    """Exponents of sigma(x) = sum_j x^beta_j, growing fast enough to separate degrees."""
    exponents: tuple
    depth: int | None = None

    def __post_init__(self):
        b = tuple(int(x) for x in self.exponents)
        object.__setattr__(self, "exponents", b)
        if not b:
            raise ValueError("need at least one exponent")
        if self.depth is None:
            object.__setattr__(self, "depth", len(b))
        if b[0] <= 1:
            raise ValueError("smallest exponent must exceed 1")
        for prev, cur in zip(b, b[1:]):
            if cur <= prev ** (self.depth - 1):
                raise ValueError(f"exponent {cur} must exceed {prev}^{self.depth - 1}")

    @property
    def activation(self) -> Activation:
        return Activation.from_exponents(self.exponents)

    def component_degrees(self) -> list[int]:
        return [b ** (self.depth - 1) for b in self.exponents]


def expansion_slots(input_dim: int, degree: int) -> int:
    """Cost estimate for a truncated expansion: (#monomials of degree <= D)^2."""
    return math.comb(degree + input_dim, input_dim) ** 2


@dataclass
class DecompositionReport:
    ok: bool
    components: list
    remainder_clean: bool
    remainder_zero: bool
    truncation_degree: int
    budget: int

    def __bool__(self):
        return self.ok

    def to_json(self) -> dict:
        return dict(self.__dict__)


def sparse_decomposition_check(spec: MlpSpec, sparse: SparseActivationSpec, seed: int = 0,
                               weights: MlpWeights | None = None,
                               budget: int = DEFAULT_SLOT_BUDGET) -> DecompositionReport:
    """Compare homogeneous components of f_W with monomial-activation networks.

    For each exponent beta_j the component of degree beta_j^(L-1) must equal
    the same network with sigma(x) = x^beta_j. Components whose expansion
    would exceed ``budget`` slots are skipped and reported.
    """
    if spec.activation != sparse.activation:
        raise ValueError("network activation differs from the sparse activation")
    if sparse.depth != spec.depth:
        raise ValueError(f"exponent growth was validated for depth {sparse.depth}, network has {spec.depth}")
    W = weights or spec.random_weights(random.Random(f"sparse:{seed}"))
    comps, tracked = [], []
    for b, deg in zip(sparse.exponents, sparse.component_degrees()):
        slots = expansion_slots(spec.input_dim, deg)
        entry = {"exponent": b, "degree": deg, "slots": slots}
        if slots > budget:
            entry["status"] = "skipped"
        else:
            tracked.append((b, deg))
        comps.append(entry)
    if not tracked:
        return DecompositionReport(False, comps, False, False, 0, budget)
    top = max(d for _, d in tracked)
    full_degree = max(sparse.component_degrees())
    trunc = None if top >= full_degree else top
    f = mlp_forward(spec, W, max_degree=trunc)
    remainder = list(f)
    ok = True
    for entry in comps:
        if entry.get("status") == "skipped":
            continue
        mono = mlp_forward(MlpSpec(spec.widths, Activation.monomial(entry["exponent"])), W)
        match = all(fo.homogeneous_component(entry["degree"]) == mo for fo, mo in zip(f, mono))
        entry["status"] = "match" if match else "mismatch"
        ok &= match
        remainder = [r - mo for r, mo in zip(remainder, mono)]
    degs = {d for _, d in tracked}
    clean = all(sum(e) not in degs for r in remainder for e in r.terms)
    zero = trunc is None and all(r.is_zero() for r in remainder)
    return DecompositionReport(ok and clean, comps, clean, zero, trunc or full_degree, budget)


# ---- Smith normal form ------------------------------------------------------------

@dataclass
class SnfResult:
    U: list
    D: list
    V: list
    invariants: list
    matrix: list = field(default_factory=list)

    def verify(self) -> bool:
        m, n = len(self.matrix), len(self.matrix[0]) if self.matrix else 0
        if matmul(matmul(self.U, self.matrix), self.V) != self.D:
            return False
        if abs(det_rational(self.U)) != 1 or abs(det_rational(self.V)) != 1:
            return False
        for i in range(m):
            for j in range(n):
                if i != j and self.D[i][j]:
                    return False
        inv = self.invariants
        return all(b % a == 0 if a else b == 0 for a, b in zip(inv, inv[1:]))

    def to_json(self) -> dict:
        return {"matrix": self.matrix, "U": self.U, "D": self.D, "V": self.V, "invariants": self.invariants}


def _swap_rows(M, i, j):
    M[i], M[j] = M[j], M[i]


def _swap_cols(M, i, j):
    for row in M:
        row[i], row[j] = row[j], row[i]


def smith_normal_form(A: Sequence[Sequence[int]]) -> SnfResult:
    """U*A*V = D with U, V unimodular and the diagonal forming a divisibility chain.

    Pivots are the smallest nonzero absolute values, ties broken row-major.
    """
    A = [[int(x) for x in row] for row in A]
    m = len(A)
    n = len(A[0]) if A else 0
    D = [row[:] for row in A]
    U, V = identity(m), identity(n)

    def row_op(dst, src, q):  # row dst -= q * row src
        D[dst] = [a - q * b for a, b in zip(D[dst], D[src])]
        U[dst] = [a - q * b for a, b in zip(U[dst], U[src])]

    def col_op(dst, src, q):  # col dst -= q * col src
        for M in (D, V):
            for row in M:
                row[dst] -= q * row[src]

    def place(i, j, t):
        if i != t:
            _swap_rows(D, i, t)
            _swap_rows(U, i, t)
        if j != t:
            _swap_cols(D, j, t)
            _swap_cols(V, j, t)

    for t in range(min(m, n)):
        cands = [(abs(D[i][j]), i, j) for i in range(t, m) for j in range(t, n) if D[i][j]]
        if not cands:
            break
        _, i, j = min(cands)
        place(i, j, t)
        while True:
            for i in range(t + 1, m):
                if D[i][t]:
                    row_op(i, t, D[i][t] // D[t][t])
            for j in range(t + 1, n):
                if D[t][j]:
                    col_op(j, t, D[t][j] // D[t][t])
            rest = [(abs(D[i][t]), i, t) for i in range(t + 1, m) if D[i][t]]
            rest += [(abs(D[t][j]), t, j) for j in range(t + 1, n) if D[t][j]]
            if rest:
                _, i, j = min(rest)
                place(i, j, t)
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if D[i][j] % D[t][t]), None)
            if bad is None:
                break
            # pull the offending row up so its residue appears in row t
            row_op(t, bad[0], -1)
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]
    inv = [D[i][i] for i in range(min(m, n))]
    return SnfResult(U, D, V, inv, A)


# ---- scaling-fiber count ------------------------------------------------------------

@dataclass
class FiberCountReport:
    count: int | None
    matrix: list
    snf: SnfResult
    parity: dict
    label: str = "complex scaling-fiber count"

    def to_json(self) -> dict:
        return {"count": self.count, "label": self.label, "matrix": self.matrix,
                "snf": self.snf.to_json(), "parity": self.parity}


def scaling_exponent_matrix(betas: Sequence[int]) -> list[list[int]]:
    L = len(betas)
    return [[betas[L - i - 2] ** (L - 2 - j) for j in range(L - 1)] for i in range(L - 1)]


def parity_report(betas: Sequence[int]) -> dict:
    pairs = [[a, b, (a - b) % 2 == 1] for a, b in combinations(sorted(betas), 2)]
    return {"pairs": pairs, "opposite_pair_exists": any(p[2] for p in pairs)}


def fiber_scaling_count(betas: Sequence[int] | SparseActivationSpec) -> FiberCountReport:
    """Number of solutions in the complex torus of the layerwise scaling system.

    Equal to the product of the invariant factors of the exponent matrix
    A[i][j] = beta_(L-i)^(L-1-j) (1-based), i.e. |det A|. ``count`` is None
    if A is singular (infinitely many solutions).
    """
    if isinstance(betas, SparseActivationSpec):
        betas = betas.exponents
    betas = [int(b) for b in betas]
    if len(betas) < 2:
        raise ValueError("need L >= 2 exponents")
    A = scaling_exponent_matrix(betas)
    snf = smith_normal_form(A)
    count = math.prod(snf.invariants) if all(snf.invariants) else None
    return FiberCountReport(count, A, snf, parity_report(betas))


# ---- monomial fibers ------------------------------------------------------------------

@dataclass(frozen=True)
class MonomialFiberElement:
    """Hidden-layer permutations and invertible diagonal scalings, one pair per hidden layer.

    ``perms[k][i]`` is the old index of new neuron i in hidden layer k+1.
    """
    perms: tuple
    diags: tuple

    def __post_init__(self):
        object.__setattr__(self, "perms", tuple(tuple(p) for p in self.perms))
        object.__setattr__(self, "diags", tuple(tuple(normalize(Fraction(x)) for x in d) for d in self.diags))
        if len(self.perms) != len(self.diags):
            raise ValueError("one permutation per diagonal")
        for p, d in zip(self.perms, self.diags):
            if sorted(p) != list(range(len(p))) or len(p) != len(d):
                raise ValueError("invalid permutation")
            if any(x == 0 for x in d):
                raise ValueError("singular diagonal scaling")

    @classmethod
    def identity(cls, widths: Sequence[int]) -> "MonomialFiberElement":
        hidden = widths[1:-1]
        return cls(tuple(tuple(range(w)) for w in hidden), tuple((1,) * w for w in hidden))

    def inverse(self) -> "MonomialFiberElement":
        perms, diags = [], []
        for p, d in zip(self.perms, self.diags):
            inv = [0] * len(p)
            for i, q in enumerate(p):
                inv[q] = i
            perms.append(tuple(inv))
            diags.append(tuple(normalize(1 / Fraction(d[q])) for q in p))
        return MonomialFiberElement(tuple(perms), tuple(diags))


def monomial_fiber_action(W: MlpWeights, elt: MonomialFiberElement, r: int) -> MlpWeights:
    """(P1 D1 W1, P2 D2 W2 D1^-r P1^T, ..., WL D_{L-1}^-r P_{L-1}^T)."""
    mats = [[list(row) for row in m] for m in W.matrices]
    L = len(mats)
    if len(elt.perms) != L - 1:
        raise ValueError("fiber element has the wrong number of hidden layers")
    out = []
    for k, M in enumerate(mats):
        if k > 0:
            p, d = elt.perms[k - 1], elt.diags[k - 1]
            if len(p) != len(M[0]):
                raise ValueError("shape mismatch")
            M = [[row[p[i]] * Fraction(d[p[i]]) ** (-r) for i in range(len(p))] for row in M]
        if k < L - 1:
            p, d = elt.perms[k], elt.diags[k]
            if len(p) != len(M):
                raise ValueError("shape mismatch")
            M = [[d[p[i]] * x for x in M[p[i]]] for i in range(len(p))]
        out.append(tuple(tuple(normalize(Fraction(x)) for x in row) for row in M))
    return MlpWeights(tuple(out))


# ---- layerwise scaling rigidity ----------------------------------------------------------

@dataclass
class RigidityReport:
    equal: bool
    hypotheses_ok: bool
    violations: list
    scalings: list

    def __bool__(self):
        return self.equal

    def to_json(self) -> dict:
        d = dict(self.__dict__)
        d["scalings"] = [scalar_to_str(x) for x in self.scalings]
        return d


def rigidity_hypotheses(spec: CnnSpec, w: CnnWeights) -> list[str]:
    c = spec.activation.coeffs
    r = spec.activation.degree
    out = []
    if r <= 2:
        out.append("activation degree must exceed 2")
    if c[0] != 0:
        out.append("activation must vanish at 0")
    if r >= 1 and c[r - 1] == 0:
        out.append("subleading activation coefficient must be nonzero")
    if any(not any(f) for f in w.filters):
        out.append("all filters must be nonzero")
    return out


def scaling_rigidity_check(spec: CnnSpec, w: CnnWeights, scalings: Sequence) -> RigidityReport:
    """Whether scaling filter i by lambda_i leaves the network function unchanged."""
    lam = [normalize(Fraction(x)) for x in scalings]
    if len(lam) != spec.depth:
        raise ValueError("one scaling per layer")
    if any(x == 0 for x in lam):
        raise ValueError("scalings must be nonzero")
    scaled = CnnWeights(tuple(tuple(normalize(l * Fraction(x)) for x in f) for l, f in zip(lam, w.filters)))
    basis = spec.basis()
    equal = embed(spec.forward(scaled), basis) == embed(spec.forward(w), basis)
    viol = rigidity_hypotheses(spec, w)
    return RigidityReport(equal, not viol, viol, lam)


def chain_spec(activation: Activation, depth: int = 2) -> CnnSpec:
    """Depth-L CNN with 1-tap filters on a 1-dimensional input (a scalar chain)."""
    return CnnSpec((1,) * depth, (1,) * depth, (1,) * (depth + 1), activation)

"""Jacobians of the parametrization map, ranks, singularity tests, implicitization."""
from __future__ import annotations

import random
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Sequence

from . import linalg
from .netparam import (
    AmbientBasis,
    CnnSpec,
    MlpSpec,
    SubnetMlpSpec,
    apply_subnetwork,
    embed,
    embed_symbolic,
    family_map,
)
from .polyalg import MultiPoly, PolyMap, grlex_key, monomials_of_degree, normalize

__all__ = [
    "ImplicitSurface",
    "ImplicitizationError",
    "RankReport",
    "TangentExcessReport",
    "cnn_kernel_check",
    "critical_parameters",
    "family_point",
    "generic_rank",
    "implicitize",
    "implicitize_network",
    "jacobian",
    "jacobian_at",
    "param_derivatives",
    "rank_at",
    "singular_locus_membership",
    "singular_points",
    "tangent_excess_test",
]


class ImplicitizationError(RuntimeError):
    pass


# ---- Jacobians -----------------------------------------------------------

def jacobian(spec, basis: AmbientBasis | None = None) -> list[list[MultiPoly]]:
    """Symbolic Jacobian: rows are ambient coordinates, columns are weights.

    Entry ``(alpha, theta)`` is the derivative of the coefficient polynomial of
    basis element ``alpha`` with respect to weight ``theta``.
    """
    basis = basis or spec.basis()
    coeffs = embed_symbolic(spec.forward(spec.symbolic_weights()), basis)
    return [[c.partial(t) for t in range(spec.num_params)] for c in coeffs]


def param_derivatives(spec, weights, modulus: int | None = None) -> list[PolyMap]:
    """``d f_W / d theta`` for every weight ``theta``, as PolyMaps in the inputs.

    Computed by back-propagating polynomial sensitivities through the layers,
    independently of the symbolic-weight expansion.
    """
    if isinstance(spec, MlpSpec):
        return _mlp_derivatives(spec, weights, modulus)
    if isinstance(spec, CnnSpec):
        return _cnn_derivatives(spec, weights, modulus)
    raise TypeError(f"unsupported architecture {type(spec).__name__}")


def _mlp_derivatives(spec: MlpSpec, weights, modulus):
    weights.check(spec)
    n = spec.input_dim
    act = spec.activation
    zs = [[MultiPoly.variable(j, n, modulus) for j in range(n)]]
    hs = []
    for k, mat in enumerate(weights.matrices):
        h = []
        for row in mat:
            acc = MultiPoly.zero(n, modulus)
            for w, z in zip(row, zs[-1]):
                if w:
                    acc = acc + z.scale(w)
            h.append(acc)
        hs.append(h)
        if k < spec.depth - 1:
            zs.append([act.compose(x) for x in h])
    dact = [[act.derivative_compose(x) for x in h] for h in hs[:-1]]
    zero = MultiPoly.zero(n, modulus)
    cols = [[zero] * spec.output_dim for _ in range(spec.num_params)]
    for o in range(spec.output_dim):
        delta = [MultiPoly.constant(1 if i == o else 0, n, modulus) for i in range(spec.output_dim)]
        for k in range(spec.depth - 1, -1, -1):
            mat = weights.matrices[k]
            for i, di in enumerate(delta):
                if not di:
                    continue
                for j, z in enumerate(zs[k]):
                    cols[spec.param_index(k, i, j)][o] = di * z
            if k == 0:
                break
            prev = []
            for j in range(len(zs[k])):
                acc = MultiPoly.zero(n, modulus)
                for i, di in enumerate(delta):
                    w = mat[i][j]
                    if w and di:
                        acc = acc + di.scale(w)
                prev.append(dact[k - 1][j] * acc if acc else acc)
            delta = prev
    return [PolyMap(c) for c in cols]


def _cnn_derivatives(spec: CnnSpec, weights, modulus):
    weights.check(spec)
    n = spec.input_dim
    act = spec.activation
    ys = [[MultiPoly.variable(j, n, modulus) for j in range(n)]]
    hs = []
    for i, (w, s) in enumerate(zip(weights.filters, spec.strides)):
        prev = ys[-1]
        h = []
        for m in range(spec.dims[i + 1]):
            acc = MultiPoly.zero(n, modulus)
            for j, wj in enumerate(w):
                if wj:
                    acc = acc + prev[s * m + j].scale(wj)
            h.append(acc)
        hs.append(h)
        if i < spec.depth - 1:
            ys.append([act.compose(x) for x in h])
    dact = [[act.derivative_compose(x) for x in h] for h in hs[:-1]]
    zero = MultiPoly.zero(n, modulus)
    cols = [[zero] * spec.output_dim for _ in range(spec.num_params)]
    for o in range(spec.output_dim):
        delta = [MultiPoly.constant(1 if m == o else 0, n, modulus) for m in range(spec.output_dim)]
        for i in range(spec.depth - 1, -1, -1):
            s, w = spec.strides[i], weights.filters[i]
            inp = ys[i]
            for j in range(spec.filters[i]):
                acc = MultiPoly.zero(n, modulus)
                for m, dm in enumerate(delta):
                    if dm:
                        acc = acc + dm * inp[s * m + j]
                cols[spec.param_index(i, j)][o] = acc
            if i == 0:
                break
            g = [MultiPoly.zero(n, modulus) for _ in range(spec.dims[i])]
            for m, dm in enumerate(delta):
                if not dm:
                    continue
                for j, wj in enumerate(w):
                    if wj:
                        g[s * m + j] = g[s * m + j] + dm.scale(wj)
            delta = [dact[i - 1][q] * g[q] if g[q] else g[q] for q in range(spec.dims[i])]
    return [PolyMap(c) for c in cols]


def jacobian_at(spec, weights, basis: AmbientBasis | None = None,
                modulus: int | None = None) -> list[list]:
    """Numeric Jacobian at ``weights`` (rows: ambient basis, columns: weights)."""
    basis = basis or spec.basis()
    cols = [embed(d, basis).coords for d in param_derivatives(spec, weights, modulus)]
    return linalg.transpose(cols) if cols else []


# ---- ranks ---------------------------------------------------------------

@dataclass
class RankReport:
    rank: int
    field: str
    trials: int
    point_seeds: list = field(default_factory=list)
    certified: str = "probabilistic"
    primes: list = field(default_factory=list)
    per_trial: list = field(default_factory=list)
    shape: tuple = (0, 0)

    def to_json(self) -> dict:
        d = asdict(self)
        d["shape"] = list(self.shape)
        return d


def rank_at(J: Sequence[Sequence[MultiPoly]], point: Sequence, prime: int | None = None) -> RankReport:
    """Exact rank of a symbolic matrix at ``point``, over Q or F_prime."""
    try:
        m = linalg.evaluate_matrix(J, point, prime)
    except ZeroDivisionError as exc:
        raise linalg.BadPrimeError(str(exc)) from exc
    r = linalg.rank_mod_p(m, prime) if prime else linalg.rank_rational(m)
    return RankReport(rank=r, field=f"F_{prime}" if prime else "rational", trials=1,
                      certified="exactSymbolic" if not prime else "probabilistic",
                      primes=[prime] if prime else [], shape=linalg.shape(m))


def family_point(spec, fmap, rng: random.Random, bound: int = 10):
    """Random weights on a linear family: weight i equals free value fmap[i], or 0."""
    nfree = 1 + max((q for q in fmap if q is not None), default=-1)
    free = [rng.choice([v for v in range(-bound, bound + 1) if v]) for _ in range(nfree)]
    return spec.weights_from_flat([free[q] if q is not None else 0 for q in fmap]), free


def _grouped_columns(J, groups):
    cols = linalg.transpose(J)
    out = []
    for g in groups:
        if not g:
            continue
        col = list(cols[g[0]])
        for i in g[1:]:
            col = [a + b for a, b in zip(col, cols[i])]
        out.append(col)
    return out


def _groups_from_fmap(fmap):
    groups: dict = {}
    for i, q in enumerate(fmap):
        if q is not None:
            groups.setdefault(q, []).append(i)
    return [groups[q] for q in sorted(groups)]


def generic_rank(spec, trials: int = 3, seed: int = 0, primes: Sequence[int] | None = None,
                 retries: int = 5, bound: int = 10, family=None,
                 columns: Sequence[int] | None = None) -> RankReport:
    """Maximum Jacobian rank over random (family) points, each checked modulo two primes.

    ``family`` is an optional subnetwork spec restricting the parameter points;
    ``columns`` optionally restricts the Jacobian to the listed weight indices
    (otherwise the family's free directions are used).
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    primes = list(primes) if primes else linalg.primes_from_seed(seed, 2)
    basis = spec.basis()
    fmap = family_map(spec, family)
    groups = [[c] for c in columns] if columns is not None else _groups_from_fmap(fmap)
    per_trial, seeds = [], []
    consistent = True
    for t in range(trials):
        for attempt in range(retries):
            pseed = f"{seed}:{t}:{attempt}"
            w, _ = family_point(spec, fmap, random.Random(pseed), bound)
            ranks = []
            for p in primes:
                J = jacobian_at(spec, w, basis, modulus=p)
                cols = _grouped_columns(J, groups)
                ranks.append(linalg.rank_mod_p(cols, p) if cols else 0)
            if len(set(ranks)) == 1:
                break
        else:
            consistent = False
        per_trial.append(ranks)
        seeds.append(pseed)
    rank = max(max(r) for r in per_trial)
    return RankReport(rank=rank, field="F_p", trials=trials, point_seeds=seeds,
                      certified="probabilistic" if consistent else "inconclusive",
                      primes=primes, per_trial=per_trial, shape=(len(basis), len(groups)))


# ---- singularities of MLP subnetworks ----------------------------------------

@dataclass
class TangentExcessReport:
    singular: bool
    span_dim: int
    generic_rank: int
    verdict: str
    hypotheses: dict
    warnings: list
    fiber_samples: int
    primes: list
    seed: int
    span_by_prime: list

    def to_json(self) -> dict:
        return asdict(self)


def _width_condition(spec: MlpSpec, subnet: SubnetMlpSpec) -> bool:
    sizes = [0] + [len(a) for a in subnet.index_sets] + [0]
    for i in range(spec.depth - 1):
        if not sizes[i + 1]:
            continue
        if all(spec.widths[i] - sizes[i] <= spec.widths[j] - sizes[j] for j in range(i + 1)):
            return True
    return False


def tangent_excess_test(spec: MlpSpec, subnet: SubnetMlpSpec, fiber_samples: int | None = None,
                        seed: int = 0, primes: Sequence[int] | None = None,
                        generic: int | None = None, bound: int = 10) -> TangentExcessReport:
    """Stack Jacobian columns over points of one fiber and compare with the generic rank.

    The fiber of a subnetwork point is sampled by redrawing the incoming rows
    of disconnected neurons. ``spanDim > genericRank`` certifies an excess
    tangent space, hence a singular point; equality is reported as "not detected".
    """
    subnet.check(spec)
    primes = list(primes) if primes else linalg.primes_from_seed(seed, 2)
    if generic is None:
        generic = generic_rank(spec, trials=3, seed=seed, primes=primes, bound=bound).rank
    hyp = {
        "nonzero_coefficients": spec.activation.nonzero_count(),
        "coefficients_ok": spec.activation.nonzero_count() >= generic + 1,
        "width_ok": _width_condition(spec, subnet),
        "proper_subsets": all(len(a) < d for a, d in zip(subnet.index_sets, spec.widths[1:-1])),
    }
    warnings = [f"hypothesis {k} not satisfied" for k in ("coefficients_ok", "width_ok", "proper_subsets")
                if not hyp[k]]
    fiber_samples = fiber_samples or 2 * spec.num_params
    rng = random.Random(f"tangent:{seed}")
    base = apply_subnetwork(spec.random_weights(rng, bound), subnet, spec)
    free = [spec.param_index(k, j, c) for k, a in enumerate(subnet.index_sets)
            for j in a for c in range(spec.widths[k])]
    basis = spec.basis()
    points = [base]
    seen = {tuple(base.flat())}
    budget = 50 * fiber_samples
    while free and len(points) < fiber_samples and budget:
        budget -= 1
        flat = base.flat()
        for idx in free:
            flat[idx] = rng.choice([v for v in range(-bound, bound + 1) if v])
        if tuple(flat) not in seen:  # distinct samples only
            seen.add(tuple(flat))
            points.append(spec.weights_from_flat(flat))
    spans = []
    for p in primes:
        target = embed(spec.forward(base, modulus=p), basis)
        stacked = []
        for w in points:
            if embed(spec.forward(w, modulus=p), basis) != target:
                raise AssertionError("fiber sample left the fiber")
            stacked.extend(linalg.transpose(jacobian_at(spec, w, basis, modulus=p)))
        spans.append(linalg.rank_mod_p(stacked, p))
    if len(set(spans)) != 1:
        warnings.append("span dimension differs between primes")
    span = max(spans)
    singular = span > generic
    return TangentExcessReport(
        singular=singular, span_dim=span, generic_rank=generic,
        verdict="singular" if singular else "not detected", hypotheses=hyp, warnings=warnings,
        fiber_samples=fiber_samples, primes=primes, seed=seed, span_by_prime=spans)


# ---- implicitization -----------------------------------------------------------

@dataclass
class ImplicitSurface:
    nvars: int
    F: MultiPoly
    degree: int
    kernel_dim: int
    primes: list
    samples: int
    verified: bool

    def to_json(self, names: Sequence[str] | None = None) -> dict:
        names = names or [f"t{i + 1}" for i in range(self.nvars)]
        return {"nvars": self.nvars, "degree": self.degree, "kernel_dim": self.kernel_dim,
                "F": self.F.to_json(), "F_text": self.F.to_text(names), "primes": self.primes,
                "samples": self.samples, "verified": self.verified}


def _monomial_rows(points, monos, p):
    rows = []
    for pt in points:
        row = []
        for e in monos:
            v = 1
            for x, k in zip(pt, e):
                if k:
                    v = v * pow(x, k, p) % p
            row.append(v)
        rows.append(row)
    return rows


def _kernel_vector_mod_p(comps, monos, nsamples, p, rng):
    reduced = [c.reduce_mod(p) for c in comps]
    m = comps[0].nvars
    pts = []
    for _ in range(nsamples):
        params = [rng.randrange(p) for _ in range(m)]
        pts.append([c.evaluate(params) for c in reduced])
    K = linalg.nullspace_mod_p(_monomial_rows(pts, monos, p), p, len(monos))
    if not K:
        return None, 0
    v = K[0]
    lead = next(i for i, x in enumerate(v) if x)
    inv = pow(v[lead], -1, p)
    return [x * inv % p for x in v], len(K)


def implicitize(param, degree_cap: int = 4, sample_count: int | None = None, seed: int = 0,
                max_primes: int = 8) -> ImplicitSurface:
    """Least-degree polynomial relation among the components of ``param``.

    Relations are found as the kernel of a monomial evaluation matrix at
    random image points modulo a prime, lifted to Q by rational
    reconstruction (adding primes until stable), and accepted only after the
    symbolic check ``F o param == 0``.
    """
    comps = list(param)
    if not comps:
        raise ValueError("empty parametrization")
    n = len(comps)
    prime_rng = random.Random(f"implicitize-primes:{seed}")
    for d in range(1, degree_cap + 1):
        monos = [e for k in range(d, -1, -1) for e in monomials_of_degree(n, k)]
        monos.sort(key=grlex_key, reverse=True)
        nsamples = max(sample_count or 0, len(monos) + 10)
        rng = random.Random(f"implicitize:{seed}:{d}")
        p = linalg.random_prime(prime_rng)
        vec, kdim = _kernel_vector_mod_p(comps, monos, nsamples, p, rng)
        if vec is None:
            continue
        residues, modulus, primes = vec, p, [p]
        for _ in range(max_primes):
            cand = [linalg.rational_reconstruct(x, modulus) for x in residues]
            if all(c is not None for c in cand):
                ints = linalg.primitive_integer_vector(cand)
                lead = next(x for x in ints if x)
                if lead < 0:
                    ints = [-x for x in ints]
                F = MultiPoly(n, {e: c for e, c in zip(monos, ints) if c})
                if F.compose(comps).is_zero():
                    return ImplicitSurface(n, F, d, kdim, primes, nsamples, True)
            q = linalg.random_prime(prime_rng)
            vq, _ = _kernel_vector_mod_p(comps, monos, nsamples, q, rng)
            if vq is None:
                break
            residues = [linalg.crt_pair(a, modulus, b, q)[0] for a, b in zip(residues, vq)]
            modulus *= q
            primes.append(q)
        raise ImplicitizationError(
            f"degree-{d} kernel found but no candidate passed the symbolic check (increase samples)")
    raise ImplicitizationError(f"no relation found up to degree {degree_cap}")


def implicitize_network(spec, degree_cap: int = 4, sample_count: int | None = None,
                        seed: int = 0) -> ImplicitSurface:
    coeffs = embed_symbolic(spec.forward(spec.symbolic_weights()), spec.basis())
    return implicitize(coeffs, degree_cap, sample_count, seed)


def singular_locus_membership(F, point: Sequence) -> bool:
    """True iff F and its whole gradient vanish exactly at ``point``."""
    F = F.F if isinstance(F, ImplicitSurface) else F
    if F.evaluate(point) != 0:
        return False
    return all(g.evaluate(point) == 0 for g in F.gradient())


# ---- CNN kernels ----------------------------------------------------------------

def cnn_kernel_check(spec: CnnSpec, weights) -> list[list]:
    """Exact rational kernel of the Jacobian at ``weights``; rejects the zero function."""
    basis = spec.basis()
    if embed(spec.forward(weights), basis).is_zero():
        raise ValueError("weights parametrize the zero function (excluded fiber)")
    J = jacobian_at(spec, weights, basis)
    return linalg.nullspace_rational(J, spec.num_params)



# ---- plane curves ------------------------------------------------------------------

def singular_points(F: MultiPoly) -> list[tuple]:
    """All complex solutions of F = dF/dx = dF/dy = 0 for a plane curve (exact, via sympy)."""
    import sympy

    from .polyalg import to_sympy

    F = F.F if isinstance(F, ImplicitSurface) else F
    if F.nvars != 2:
        raise ValueError("plane curves only")
    x, y = sympy.symbols("x y")
    eqs = [to_sympy(p, (x, y)) for p in [F] + F.gradient()]
    eqs = [e for e in eqs if e != 0]
    sols = sympy.solve_poly_system(eqs, x, y) or []
    return sorted({tuple(normalize(Fraction(int(v.p), int(v.q))) if v.is_Rational else v for v in s)
                   for s in sols}, key=str)


def critical_parameters(param: Sequence[MultiPoly]) -> list:
    """Parameter values where every component of a curve parametrization has zero derivative."""
    import sympy

    from .polyalg import to_sympy

    if any(p.nvars != 1 for p in param):
        raise ValueError("univariate parametrizations only")
    t = sympy.symbols("t")
    g = sympy.Integer(0)
    for p in param:
        g = sympy.gcd(g, to_sympy(p.partial(0), (t,)))
    if g == 0:
        raise ValueError("constant parametrization")
    roots = sympy.roots(sympy.Poly(g, t))
    return sorted((normalize(Fraction(int(r.p), int(r.q))) if r.is_Rational else r for r in roots), key=str)

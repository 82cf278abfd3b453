"""End-to-end reproduction of the worked examples, diffed against stored constants."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from . import fixtures as fx
from . import linalg
from .critpoints import critical_witness, cnn_fiber_witness, cnn_singularity_classify, exposedness_dimension
from .geometry import (
    ImplicitizationError,
    critical_parameters,
    generic_rank,
    implicitize,
    implicitize_network,
    jacobian,
    singular_locus_membership,
    singular_points,
)
from .netparam import (
    CnnWeights,
    SubnetCnnSpec,
    SubnetMlpSpec,
    embed,
    embed_symbolic,
    load_config,
)
from .polyalg import MultiPoly, parse_poly, scalar_to_str

TARGETS = ("D1", "D2", "cubics")
ALIASES = {"mlp": "D1", "cnn": "D2", "d1": "D1", "d2": "D2"}


@dataclass
class Reproduction:
    target: str
    items: list = field(default_factory=list)

    def check(self, name: str, expected, got, match: bool | None = None):
        ok = (expected == got) if match is None else bool(match)
        self.items.append({"item": name, "expected": _jsonable(expected), "got": _jsonable(got), "match": ok})
        return ok

    @property
    def ok(self) -> bool:
        return all(i["match"] for i in self.items)

    def mismatches(self) -> list:
        return [i for i in self.items if not i["match"]]

    def to_json(self) -> dict:
        return {"target": self.target, "allMatch": self.ok, "items": self.items}


def _jsonable(x):
    if isinstance(x, MultiPoly):
        return x.to_json()
    if isinstance(x, Fraction):
        return scalar_to_str(x)
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    return x


def proportional(p: MultiPoly, q: MultiPoly) -> bool:
    """p == lambda * q for some nonzero rational lambda."""
    if p.is_zero() or q.is_zero() or set(p.terms) != set(q.terms):
        return False
    e = next(iter(q.terms))
    ratio = Fraction(p.terms[e]) / Fraction(q.terms[e])
    return p == q.scale(ratio)


def reproduce_d1(seed: int = 0, samples: int = 10, degree_cap: int = 4) -> Reproduction:
    rep = Reproduction("D1")
    spec = load_config(fx.D1_CONFIG)
    basis = spec.basis()
    rep.check("basis", list(fx.D1_BASIS_LABELS), basis.labels())
    coeffs = embed_symbolic(spec.forward(spec.symbolic_weights()), basis)
    expected = fx.d1_coefficients()
    rep.check("expansion", [c.to_text(fx.D1_WEIGHT_NAMES) for c in expected],
              [c.to_text(fx.D1_WEIGHT_NAMES) for c in coeffs])
    J = jacobian(spec)
    rep.check("jacobian", [[e.to_text(fx.D1_WEIGHT_NAMES) for e in r] for r in fx.d1_jacobian()],
              [[e.to_text(fx.D1_WEIGHT_NAMES) for e in r] for r in J])

    F = fx.d1_hypersurface()
    try:
        surf = implicitize_network(spec, degree_cap=degree_cap, seed=seed)
        rep.check("hypersurface", F.to_text(fx.D1_AMBIENT_NAMES), surf.F.to_text(fx.D1_AMBIENT_NAMES),
                  match=surf.verified and proportional(surf.F, F))
    except ImplicitizationError as exc:
        rep.check("hypersurface", F.to_text(fx.D1_AMBIENT_NAMES), str(exc), match=False)

    gens = fx.d1_singular_generators()
    rng = random.Random(f"d1-singular:{seed}")
    families = {
        "e=0": lambda w: w[:4] + [0, w[5]],
        "f=0": lambda w: w[:5] + [0],
        "rows equal": lambda w: w[:2] + w[:2] + w[4:],
    }
    for name, make in families.items():
        ok = True
        for _ in range(samples):
            w = make([Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(6)])
            t = embed(spec.forward(spec.weights_from_flat(w)), basis).coords
            ok &= all(g.evaluate(t) == 0 for g in gens) and singular_locus_membership(F, t)
        rep.check(f"singular locus ({name})", True, ok)

    gr = generic_rank(spec, seed=seed)
    rep.check("generic rank", fx.D1_GENERIC_RANK, gr.rank)

    f0 = [[e.substitute({5: 0}) for e in row] for row in J]
    minor = linalg.det_poly([[f0[i][j] for j in fx.D1_SUBNET_COLUMNS] for i in range(3)])
    rep.check("minor", fx.D1_MINOR, minor.to_text(fx.D1_WEIGHT_NAMES),
              match=minor == parse_poly(fx.D1_MINOR, fx.D1_WEIGHT_NAMES))

    fam = SubnetMlpSpec(((1,),))
    ex = exposedness_dimension(spec, fam, seed=seed, normal="family", columns=fx.D1_SUBNET_COLUMNS)
    got = {"familyDim": ex.family_dim, "normalDim": ex.normal_dim, "ambientDim": ex.ambient_dim}
    rep.check("exposedness count", fx.D1_EXPOSEDNESS, got)
    strict = exposedness_dimension(spec, SubnetMlpSpec(((1,),), mode="strict"), seed=seed)
    rep.check("strict exposedness", "exposed", strict.verdict)
    W = spec.weights_from_flat([1, 2, 0, 0, 1, 0])
    wit = critical_witness(spec, W, seed=seed)
    rep.check("strict witness", {"gradientZero": True, "uDiffers": True},
              {"gradientZero": wit.gradient_zero, "uDiffers": wit.u != wit.phi})
    return rep


def reproduce_d2(seed: int = 0) -> Reproduction:
    rep = Reproduction("D2")
    spec = load_config(fx.D2_CONFIG)
    rep.check("ambient dimension", fx.D2_AMBIENT_DIM, len(spec.basis()))
    gr = generic_rank(spec, seed=seed)
    agree = all(len(set(r)) == 1 for r in gr.per_trial)
    rep.check("generic rank", fx.D2_GENERIC_RANK, gr.rank, match=gr.rank == fx.D2_GENERIC_RANK and agree)
    for name, t, profile, singular in fx.D2_TILDE_TABLE:
        cls = cnn_singularity_classify(spec, SubnetCnnSpec(t))
        rep.check(f"profile {name}", [scalar_to_str(v) for v in profile], cls.profile.to_json())
        rep.check(f"singular {name}", singular, cls.singular)
    # the two displayed embeddings, compared symbolically in c and d
    sym = spec.symbolic_weights().filters
    names = dict(zip(fx.D2_WEIGHT_NAMES, sym[0] + sym[1]))

    def filt(entries):
        return tuple(names[e] if e != "0" else 0 for e in entries)

    left, right = (CnnWeights(tuple(filt(f) for f in pair)) for pair in fx.D2_SHIFTED_PAIR)
    basis = spec.basis()
    el = embed_symbolic(spec.forward(left), basis)
    er = embed_symbolic(spec.forward(right), basis)
    rep.check("displayed embeddings equal", True, el == er)
    sing = SubnetCnnSpec(fx.D2_TILDE_TABLE[-1][1])
    rng = random.Random(f"d2-shift:{seed}")
    w = spec.random_weights(rng)
    rep.check("shift witness", True, cnn_fiber_witness(spec, w, sing).equal)
    return rep


def reproduce_cubics(seed: int = 0, degree_cap: int = 4) -> Reproduction:
    rep = Reproduction("cubics")
    for name, param, curve, crit in (
        ("nodal", fx.NODAL_PARAM, fx.NODAL_CURVE, fx.NODAL_CRITICAL_PARAMS),
        ("cuspidal", fx.CUSP_PARAM, fx.CUSP_CURVE, fx.CUSP_CRITICAL_PARAMS),
    ):
        comps = [parse_poly(p, ("t",)) for p in param]
        F = parse_poly(curve, fx.CUBIC_NAMES)
        try:
            surf = implicitize(comps, degree_cap=degree_cap, seed=seed)
        except ImplicitizationError as exc:
            rep.check(f"{name} curve", F.to_text(fx.CUBIC_NAMES), str(exc), match=False)
            continue
        rep.check(f"{name} curve", F.to_text(fx.CUBIC_NAMES), surf.F.to_text(fx.CUBIC_NAMES),
                  match=surf.verified and (surf.F == F or surf.F == -F))
        rep.check(f"{name} singular points", [list(p) for p in fx.CUBIC_SINGULAR_POINTS],
                  [list(p) for p in singular_points(surf)])
        rep.check(f"{name} stationary parameters", list(crit), critical_parameters(comps))
    return rep


def reproduce(target: str, seed: int = 0, degree_cap: int = 4) -> Reproduction:
    key = ALIASES.get(target.lower(), target)
    if key == "D1":
        return reproduce_d1(seed, degree_cap=degree_cap)
    if key == "D2":
        return reproduce_d2(seed)
    if key == "cubics":
        return reproduce_cubics(seed, degree_cap=degree_cap)
    raise ValueError(f"unknown target {target!r}; choose from {TARGETS}")

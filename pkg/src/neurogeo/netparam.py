"""Architectures, weights, subnetworks and the parametrization map.

Neuron and weight indices are 0-based throughout. Flattened weight order is
layer by layer, row-major within each MLP matrix, and filter by filter for
CNNs; symbolic weight variables follow the input variables in that order.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .polyalg import (
    Activation,
    MultiPoly,
    PolyMap,
    lex_key,
    monomials_of_degree,
    normalize,
    parse_scalar,
    scalar_to_str,
)

__all__ = [
    "AmbientBasis",
    "CnnSpec",
    "CnnWeights",
    "CoeffVector",
    "ConfigError",
    "DegreeOverflowError",
    "MlpSpec",
    "MlpWeights",
    "SubnetCnnSpec",
    "SubnetMlpSpec",
    "apply_cnn_subnetwork",
    "apply_subnetwork",
    "attainable_degrees",
    "cnn_conv",
    "cnn_forward",
    "embed",
    "embed_symbolic",
    "load_config",
    "load_subnet",
    "load_weights",
    "mlp_forward",
    "random_nonzero_int",
    "shift_subnetwork_weights",
    "spec_to_config",
    "tilde_profile",
]

DEFAULT_WEIGHT_BOUND = 10


class ConfigError(ValueError):
    pass


class DegreeOverflowError(ValueError):
    pass


def random_nonzero_int(rng: random.Random, bound: int = DEFAULT_WEIGHT_BOUND) -> int:
    v = rng.randint(1, bound)
    return v if rng.random() < 0.5 else -v


def _is_poly(x) -> bool:
    return isinstance(x, MultiPoly)


def _lincomb(coefs, vecs, nvars, modulus):
    acc = MultiPoly.zero(nvars, modulus)
    for w, v in zip(coefs, vecs):
        if _is_poly(w):
            if w:
                acc = acc + w * v
        elif w:
            acc = acc + v.scale(w)
    return acc


def _infer_nvars(entries, default):
    for e in entries:
        if _is_poly(e):
            return e.nvars, e.modulus
    return default, None


# ---- MLPs ----------------------------------------------------------------

@dataclass(frozen=True)
class MlpSpec:
    widths: tuple[int, ...]
    activation: Activation

    def __post_init__(self):
        widths = tuple(int(d) for d in self.widths)
        if len(widths) < 3:
            raise ConfigError("an MLP needs at least one hidden layer (L >= 2)")
        if any(d < 1 for d in widths):
            raise ConfigError("widths must be positive")
        object.__setattr__(self, "widths", widths)
        if not isinstance(self.activation, Activation):
            object.__setattr__(self, "activation", Activation(tuple(self.activation)))

    kind = "mlp"

    @property
    def depth(self) -> int:
        return len(self.widths) - 1

    @property
    def input_dim(self) -> int:
        return self.widths[0]

    @property
    def output_dim(self) -> int:
        return self.widths[-1]

    @property
    def shapes(self) -> list[tuple[int, int]]:
        return [(self.widths[i], self.widths[i - 1]) for i in range(1, len(self.widths))]

    @property
    def num_params(self) -> int:
        return sum(r * c for r, c in self.shapes)

    def param_index(self, layer: int, row: int, col: int) -> int:
        """Flat index of ``W_{layer+1}[row, col]`` (all 0-based)."""
        offset = sum(r * c for r, c in self.shapes[:layer])
        return offset + row * self.shapes[layer][1] + col

    def param_names(self) -> list[str]:
        return [f"W{k + 1}[{i},{j}]" for k, (r, c) in enumerate(self.shapes)
                for i in range(r) for j in range(c)]

    def weights_from_flat(self, values: Sequence) -> "MlpWeights":
        values = list(values)
        if len(values) != self.num_params:
            raise ValueError(f"expected {self.num_params} weights, got {len(values)}")
        mats, pos = [], 0
        for r, c in self.shapes:
            mats.append(tuple(tuple(values[pos + i * c: pos + (i + 1) * c]) for i in range(r)))
            pos += r * c
        return MlpWeights(tuple(mats))

    def random_weights(self, rng: random.Random, bound: int = DEFAULT_WEIGHT_BOUND) -> "MlpWeights":
        return self.weights_from_flat([random_nonzero_int(rng, bound) for _ in range(self.num_params)])

    def symbolic_weights(self, modulus: int | None = None) -> "MlpWeights":
        n = self.input_dim + self.num_params
        return self.weights_from_flat(
            [MultiPoly.variable(self.input_dim + i, n, modulus) for i in range(self.num_params)])

    def forward(self, weights, modulus=None, max_degree=None) -> PolyMap:
        return mlp_forward(self, weights, modulus, max_degree)

    def basis(self) -> "AmbientBasis":
        return AmbientBasis.from_degrees(self.input_dim, self.output_dim,
                                         attainable_degrees(self.activation, self.depth - 1))


@dataclass(frozen=True)
class MlpWeights:
    matrices: tuple

    def __post_init__(self):
        mats = tuple(tuple(tuple(_norm_entry(x) for x in row) for row in m) for m in self.matrices)
        object.__setattr__(self, "matrices", mats)

    def flat(self) -> list:
        return [x for m in self.matrices for row in m for x in row]

    def check(self, spec: MlpSpec):
        if len(self.matrices) != spec.depth:
            raise ValueError("number of weight matrices does not match the architecture")
        for k, (m, (r, c)) in enumerate(zip(self.matrices, spec.shapes)):
            if len(m) != r or any(len(row) != c for row in m):
                raise ValueError(f"W{k + 1} must have shape {r}x{c}")

    def replace(self, layer: int, row: int, col: int, value) -> "MlpWeights":
        mats = [list(list(r) for r in m) for m in self.matrices]
        mats[layer][row][col] = value
        return MlpWeights(tuple(tuple(tuple(r) for r in m) for m in mats))

    def to_json(self):
        return [[[_entry_to_json(x) for x in row] for row in m] for m in self.matrices]


def _norm_entry(x):
    if _is_poly(x):
        return x
    return normalize(parse_scalar(x))


def _entry_to_json(x):
    if _is_poly(x):
        return x.to_json()
    return scalar_to_str(x)


def mlp_forward(spec: MlpSpec, weights: MlpWeights, modulus: int | None = None,
                max_degree: int | None = None) -> PolyMap:
    """The network function ``W_L o s o ... o s o W_1`` as an exact PolyMap.

    With symbolic (MultiPoly) weights, the result lives in the weights'
    variable set, whose first ``d_0`` variables are the inputs.
    """
    weights.check(spec)
    nvars, wmod = _infer_nvars(weights.flat(), spec.input_dim)
    if wmod is not None:
        modulus = wmod
    if nvars < spec.input_dim:
        raise ValueError("symbolic weights must reserve the first d_0 variables for inputs")
    z = [MultiPoly.variable(j, nvars, modulus) for j in range(spec.input_dim)]
    last = spec.depth - 1
    for k, mat in enumerate(weights.matrices):
        h = [_lincomb(row, z, nvars, modulus) for row in mat]
        if k < last:
            z = [spec.activation.compose(hi, max_degree) for hi in h]
        else:
            z = h if max_degree is None else [hi.truncate(max_degree) for hi in h]
    return PolyMap(z)


# ---- CNNs ----------------------------------------------------------------

@dataclass(frozen=True)
class CnnSpec:
    filters: tuple[int, ...]
    strides: tuple[int, ...]
    dims: tuple[int, ...]
    activation: Activation

    kind = "cnn"

    def __post_init__(self):
        k = tuple(int(x) for x in self.filters)
        s = tuple(int(x) for x in self.strides)
        d = tuple(int(x) for x in self.dims)
        if not (len(k) == len(s) == len(d) - 1) or not k:
            raise ConfigError("need L filters, L strides and L+1 dims")
        if any(x < 1 for x in k + s + d):
            raise ConfigError("filter sizes, strides and dims must be positive")
        for i in range(len(k)):
            if d[i] != s[i] * (d[i + 1] - 1) + k[i]:
                raise ConfigError(
                    f"layer {i + 1}: d_{i} = {d[i]} but s(d' - 1) + k = {s[i] * (d[i + 1] - 1) + k[i]}")
        object.__setattr__(self, "filters", k)
        object.__setattr__(self, "strides", s)
        object.__setattr__(self, "dims", d)
        if not isinstance(self.activation, Activation):
            object.__setattr__(self, "activation", Activation(tuple(self.activation)))

    @property
    def depth(self) -> int:
        return len(self.filters)

    @property
    def input_dim(self) -> int:
        return self.dims[0]

    @property
    def output_dim(self) -> int:
        return self.dims[-1]

    @property
    def num_params(self) -> int:
        return sum(self.filters)

    def param_index(self, layer: int, j: int) -> int:
        return sum(self.filters[:layer]) + j

    def param_names(self) -> list[str]:
        return [f"w{i + 1}[{j}]" for i, k in enumerate(self.filters) for j in range(k)]

    def weights_from_flat(self, values: Sequence) -> "CnnWeights":
        values = list(values)
        if len(values) != self.num_params:
            raise ValueError(f"expected {self.num_params} weights, got {len(values)}")
        out, pos = [], 0
        for k in self.filters:
            out.append(tuple(values[pos:pos + k]))
            pos += k
        return CnnWeights(tuple(out))

    def random_weights(self, rng: random.Random, bound: int = DEFAULT_WEIGHT_BOUND) -> "CnnWeights":
        return self.weights_from_flat([random_nonzero_int(rng, bound) for _ in range(self.num_params)])

    def symbolic_weights(self, modulus: int | None = None) -> "CnnWeights":
        n = self.input_dim + self.num_params
        return self.weights_from_flat(
            [MultiPoly.variable(self.input_dim + i, n, modulus) for i in range(self.num_params)])

    def forward(self, weights, modulus=None, max_degree=None) -> PolyMap:
        return cnn_forward(self, weights, modulus, max_degree)

    def basis(self) -> "AmbientBasis":
        return AmbientBasis.from_degrees(self.input_dim, self.output_dim,
                                         attainable_degrees(self.activation, self.depth - 1))


@dataclass(frozen=True)
class CnnWeights:
    filters: tuple

    def __post_init__(self):
        object.__setattr__(self, "filters", tuple(tuple(_norm_entry(x) for x in f) for f in self.filters))

    def flat(self) -> list:
        return [x for f in self.filters for x in f]

    def check(self, spec: CnnSpec):
        if tuple(len(f) for f in self.filters) != spec.filters:
            raise ValueError("filter lengths do not match the architecture")

    def to_json(self):
        return [[_entry_to_json(x) for x in f] for f in self.filters]


def cnn_conv(w: Sequence, x: Sequence, s: int) -> list:
    """Strided 1-D convolution ``out[i] = sum_j w[j] * x[s*i + j]``."""
    k, n = len(w), len(x)
    if k < 1 or s < 1 or n < k or (n - k) % s:
        raise ValueError(f"input length {n} is not s(d'-1)+k for k={k}, s={s}")
    out = []
    for i in range((n - k) // s + 1):
        acc = None
        for j in range(k):
            wj = w[j]
            if not _is_poly(wj) and wj == 0:
                continue
            term = wj * x[s * i + j]
            acc = term if acc is None else acc + term
        if acc is None:
            acc = 0 * x[s * i]
        out.append(acc)
    return out


def cnn_forward(spec: CnnSpec, weights: CnnWeights, modulus: int | None = None,
                max_degree: int | None = None) -> PolyMap:
    weights.check(spec)
    nvars, wmod = _infer_nvars(weights.flat(), spec.input_dim)
    if wmod is not None:
        modulus = wmod
    y = [MultiPoly.variable(j, nvars, modulus) for j in range(spec.input_dim)]
    for i, (w, s) in enumerate(zip(weights.filters, spec.strides)):
        y = cnn_conv(w, y, s)
        if i < spec.depth - 1:
            y = [spec.activation.compose(v, max_degree) for v in y]
    if max_degree is not None:
        y = [v.truncate(max_degree) for v in y]
    return PolyMap(y)


# ---- ambient space -------------------------------------------------------

def attainable_degrees(activation: Activation, hidden_layers: int) -> tuple[int, ...]:
    """Total degrees that can occur in a network output with this many activations."""
    degs = {1}
    support = activation.support
    for _ in range(hidden_layers):
        sums = {0}
        new = set()
        for i in range(max(support) + 1):
            if i in support:
                new |= sums
            sums = {a + b for a in sums for b in degs}
        degs = new
    return tuple(sorted(degs))


@dataclass(frozen=True)
class AmbientBasis:
    """Ordered basis of the ambient function space.

    Within each output coordinate, monomials are listed in descending lex
    order with x1 > x2 > ...; output coordinates are concatenated in order.
    """

    input_dim: int
    output_dim: int
    degrees: tuple[int, ...]
    monomials: tuple = field(init=False, repr=False)
    index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        degs = tuple(sorted(set(int(d) for d in self.degrees)))
        object.__setattr__(self, "degrees", degs)
        mons = []
        for d in degs:
            mons.extend(monomials_of_degree(self.input_dim, d))
        mons.sort(key=lex_key, reverse=True)
        entries = tuple((o, m) for o in range(self.output_dim) for m in mons)
        object.__setattr__(self, "monomials", entries)
        object.__setattr__(self, "index", {e: i for i, e in enumerate(entries)})

    @classmethod
    def from_degrees(cls, input_dim, output_dim, degrees) -> "AmbientBasis":
        return cls(input_dim, output_dim, tuple(degrees))

    @classmethod
    def full(cls, input_dim, output_dim, max_degree, include_constant=True) -> "AmbientBasis":
        return cls(input_dim, output_dim, tuple(range(0 if include_constant else 1, max_degree + 1)))

    @property
    def max_degree(self) -> int:
        return max(self.degrees)

    @property
    def include_constant(self) -> bool:
        return 0 in self.degrees

    def __len__(self):
        return len(self.monomials)

    def labels(self) -> list[str]:
        out = []
        for o, m in self.monomials:
            mon = "*".join(f"x{i + 1}" + (f"^{k}" if k > 1 else "") for i, k in enumerate(m) if k) or "1"
            out.append(mon if self.output_dim == 1 else f"y{o + 1}:{mon}")
        return out


@dataclass(frozen=True)
class CoeffVector:
    basis: AmbientBasis
    coords: tuple

    def __post_init__(self):
        if len(self.coords) != len(self.basis):
            raise ValueError("coordinate count does not match the basis size")

    def evaluate(self, x: Sequence) -> tuple:
        outs = [0] * self.basis.output_dim
        for c, (o, m) in zip(self.coords, self.basis.monomials):
            if c:
                v = c
                for xi, k in zip(x, m):
                    if k:
                        v *= xi ** k
                outs[o] += v
        return tuple(normalize(Fraction(v)) for v in outs)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __sub__(self, other: "CoeffVector") -> "CoeffVector":
        return CoeffVector(self.basis, tuple(normalize(a - b) for a, b in zip(self.coords, other.coords)))

    def __add__(self, other: "CoeffVector") -> "CoeffVector":
        return CoeffVector(self.basis, tuple(normalize(a + b) for a, b in zip(self.coords, other.coords)))

    def to_json(self) -> list[str]:
        return [scalar_to_str(c) for c in self.coords]


def _split_terms(poly: MultiPoly, n_inputs: int):
    """Group terms by their input-variable part."""
    groups: dict = {}
    for e, c in poly.terms.items():
        groups.setdefault(e[:n_inputs], {})[e[n_inputs:]] = c
    return groups


def embed(f: PolyMap, basis: AmbientBasis) -> CoeffVector:
    """Coordinates of a numeric network function in ``basis``."""
    if len(f) != basis.output_dim:
        raise ValueError("output dimension does not match the basis")
    coords = [0] * len(basis)
    for o, comp in enumerate(f):
        if comp.nvars != basis.input_dim:
            raise ValueError("polynomial has extra (symbolic) variables; use embed_symbolic")
        for e, c in comp.terms.items():
            idx = basis.index.get((o, e))
            if idx is None:
                raise DegreeOverflowError(f"monomial {e} (degree {sum(e)}) not in the ambient basis")
            coords[idx] = c
    return CoeffVector(basis, tuple(coords))


def embed_symbolic(f: PolyMap, basis: AmbientBasis) -> list[MultiPoly]:
    """Coefficient polynomials (in the weight variables) of a symbolic network function."""
    n_in = basis.input_dim
    nw = f.nvars - n_in
    mod = f[0].modulus if len(f) else None
    coords = [MultiPoly.zero(nw, mod) for _ in range(len(basis))]
    for o, comp in enumerate(f):
        for mono, terms in _split_terms(comp, n_in).items():
            idx = basis.index.get((o, mono))
            if idx is None:
                raise DegreeOverflowError(f"monomial {mono} not in the ambient basis")
            coords[idx] = MultiPoly._raw(nw, terms, mod)
    return coords


# ---- subnetworks ---------------------------------------------------------

MODES = ("plain", "strict", "repeatedRows")


@dataclass(frozen=True)
class SubnetMlpSpec:
    """Neurons ``index_sets[i]`` of hidden layer ``i + 1`` are disconnected.

    ``sources`` (repeatedRows mode only) maps each removed neuron to the
    surviving neuron whose incoming row it copies.
    """

    index_sets: tuple
    mode: str = "plain"
    sources: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "index_sets", tuple(frozenset(int(j) for j in a) for a in self.index_sets))
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}")
        if self.mode == "repeatedRows":
            if self.sources is None:
                raise ConfigError("repeatedRows mode needs a source row for every removed neuron")
            srcs = tuple({int(j): int(k) for j, k in dict(s).items()} for s in self.sources)
            object.__setattr__(self, "sources", srcs)

    def check(self, spec: MlpSpec):
        if len(self.index_sets) != spec.depth - 1:
            raise ConfigError(f"need {spec.depth - 1} index sets (one per hidden layer)")
        for i, a in enumerate(self.index_sets):
            d = spec.widths[i + 1]
            if any(not 0 <= j < d for j in a):
                raise ConfigError(f"index out of range in hidden layer {i + 1}")
            if self.mode == "repeatedRows":
                src = self.sources[i]
                for j in a:
                    if j not in src:
                        raise ConfigError(f"no source row for neuron {j} in layer {i + 1}")
                    if src[j] in a or not 0 <= src[j] < d:
                        raise ConfigError("repeatedRows source must be a surviving neuron")

    def is_empty(self) -> bool:
        return not any(self.index_sets)

    def to_json(self):
        out = {"index_sets": [sorted(a) for a in self.index_sets], "mode": self.mode}
        if self.sources is not None:
            out["sources"] = [{str(j): k for j, k in sorted(s.items())} for s in self.sources]
        return out


def apply_subnetwork(weights: MlpWeights, subnet: SubnetMlpSpec, spec: MlpSpec | None = None) -> MlpWeights:
    """Zero the outgoing columns of removed neurons (and rows, per mode)."""
    if spec is not None:
        subnet.check(spec)
    mats = [[list(r) for r in m] for m in weights.matrices]
    if len(subnet.index_sets) != len(mats) - 1:
        raise ConfigError("one index set per hidden layer required")
    for i, a in enumerate(subnet.index_sets):
        nxt, cur = mats[i + 1], mats[i]
        for j in a:
            if j >= len(cur):
                raise ConfigError(f"neuron {j} out of range in hidden layer {i + 1}")
            for row in nxt:
                row[j] = 0
            if subnet.mode == "strict":
                cur[j] = [0] * len(cur[j])
            elif subnet.mode == "repeatedRows":
                k = subnet.sources[i][j]
                if k in a:
                    raise ConfigError("repeatedRows source must be a surviving neuron")
                cur[j] = list(cur[k])
    return MlpWeights(tuple(tuple(tuple(r) for r in m) for m in mats))


def family_map(spec, subnet=None) -> list[int | None]:
    """For each weight, the index of the free family parameter it equals, or None if forced to 0.

    Without a subnetwork every weight is free.
    """
    n = spec.num_params
    if subnet is None:
        return list(range(n))
    if isinstance(spec, MlpSpec):
        subnet.check(spec)
        target: list = list(range(n))
        for i, a in enumerate(subnet.index_sets):
            for j in a:
                for r in range(spec.widths[i + 2]):
                    target[spec.param_index(i + 1, r, j)] = None
                for c in range(spec.widths[i]):
                    idx = spec.param_index(i, j, c)
                    if subnet.mode == "strict":
                        target[idx] = None
                    elif subnet.mode == "repeatedRows":
                        target[idx] = ("tie", spec.param_index(i, subnet.sources[i][j], c))
        # resolve ties and renumber free parameters
        free = {}
        out: list = []
        for idx, t in enumerate(target):
            if t is None:
                out.append(None)
            elif isinstance(t, tuple):
                out.append(t)
            else:
                free[idx] = len(free)
                out.append(free[idx])
        return [free[t[1]] if isinstance(t, tuple) else t for t in out]
    zeros = set(_cnn_zero_positions(spec, subnet))
    out, nfree = [], 0
    for idx in range(n):
        if idx in zeros:
            out.append(None)
        else:
            out.append(nfree)
            nfree += 1
    return out


@dataclass(frozen=True)
class SubnetCnnSpec:
    """Signed zero paddings: ``t_i > 0`` zeros the first ``t_i`` entries of filter i, ``t_i < 0`` the last ``|t_i|``."""

    paddings: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "paddings", tuple(int(t) for t in self.paddings))

    def check(self, spec: CnnSpec):
        if len(self.paddings) != spec.depth:
            raise ConfigError(f"need {spec.depth} paddings")
        for t, k in zip(self.paddings, spec.filters):
            if abs(t) > k:
                raise ConfigError(f"|t| = {abs(t)} exceeds filter size {k}")

    def is_proper(self) -> bool:
        return any(self.paddings)

    def to_json(self):
        return {"paddings": list(self.paddings)}


def _cnn_zero_positions(spec: CnnSpec, subnet: SubnetCnnSpec):
    subnet.check(spec)
    for i, (t, k) in enumerate(zip(subnet.paddings, spec.filters)):
        js = range(t) if t >= 0 else range(k + t, k)
        for j in js:
            yield spec.param_index(i, j)


def apply_cnn_subnetwork(weights: CnnWeights, subnet: SubnetCnnSpec) -> CnnWeights:
    out = []
    for f, t in zip(weights.filters, subnet.paddings):
        k = len(f)
        if abs(t) > k:
            raise ConfigError(f"|t| = {abs(t)} exceeds filter size {k}")
        f = list(f)
        if t > 0:
            f[:t] = [0] * t
        elif t < 0:
            f[k + t:] = [0] * (-t)
        out.append(tuple(f))
    return CnnWeights(tuple(out))


def tilde_profile(spec: CnnSpec, subnet: SubnetCnnSpec) -> tuple[Fraction, ...]:
    """Accumulated shifts ``(t~_0 = 0, t~_1, ..., t~_L)``; ``t~_i = t_i + t~_{i-1} / s_{i-1}``."""
    subnet.check(spec)
    prof = [Fraction(0)]
    for i, t in enumerate(subnet.paddings):
        prev = prof[-1] / spec.strides[i - 1] if i > 0 else Fraction(0)
        prof.append(t + prev)
    return tuple(prof)


def shift_subnetwork_weights(spec: CnnSpec, weights: CnnWeights, subnet: SubnetCnnSpec) -> CnnWeights:
    """Shift every filter by its padding so that the network function is unchanged.

    Requires integral accumulated shifts with a vanishing final one.
    """
    prof = tilde_profile(spec, subnet)
    if any(x.denominator != 1 for x in prof) or prof[-1] != 0:
        raise ValueError(f"shift condition violated: profile {tuple(str(x) for x in prof[1:])}")
    out = []
    for f, t in zip(weights.filters, subnet.paddings):
        k = len(f)
        if t >= 0:
            out.append(tuple(f[t:]) + (0,) * t)
        else:
            out.append((0,) * (-t) + tuple(f[:k + t]))
    return CnnWeights(tuple(out))


# ---- configuration -------------------------------------------------------

def load_config(source) -> MlpSpec | CnnSpec:
    """Architecture from a JSON path, JSON string or already-parsed dict."""
    if isinstance(source, (str, Path)) and not str(source).lstrip().startswith("{"):
        try:
            data = json.loads(Path(source).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {source}: {exc}") from exc
    elif isinstance(source, str):
        try:
            data = json.loads(source)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON config: {exc}") from exc
    else:
        data = dict(source)
    try:
        act = Activation(tuple(data["activation"]))
        if data["type"] == "mlp":
            return MlpSpec(tuple(data["widths"]), act)
        if data["type"] == "cnn":
            return CnnSpec(tuple(data["filters"]), tuple(data["strides"]), tuple(data["dims"]), act)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid architecture config: {exc}") from exc
    raise ConfigError(f"unknown architecture type {data.get('type')!r}")


def load_subnet(spec, source) -> SubnetMlpSpec | SubnetCnnSpec | None:
    """Subnetwork from JSON: ``{"index_sets": [[1]], "mode": "strict"}`` or ``{"paddings": [2, -1]}``.

    ``None`` or ``{}`` means the whole parameter space.
    """
    if source is None:
        return None
    if isinstance(source, (str, Path)) and not str(source).lstrip().startswith("{"):
        try:
            data = json.loads(Path(source).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read subnetwork spec {source}: {exc}") from exc
    elif isinstance(source, str):
        try:
            data = json.loads(source)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid subnetwork JSON: {exc}") from exc
    else:
        data = dict(source)
    if not data:
        return None
    try:
        if isinstance(spec, MlpSpec):
            srcs = data.get("sources")
            if srcs is not None:
                srcs = tuple({int(k): int(v) for k, v in s.items()} for s in srcs)
            sub = SubnetMlpSpec(tuple(tuple(a) for a in data["index_sets"]), data.get("mode", "plain"), srcs)
        else:
            sub = SubnetCnnSpec(tuple(data["paddings"]))
        sub.check(spec)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid subnetwork spec: {exc}") from exc
    return sub


def spec_to_config(spec) -> dict:
    act = spec.activation.to_json()
    if isinstance(spec, MlpSpec):
        return {"type": "mlp", "widths": list(spec.widths), "activation": act}
    return {"type": "cnn", "filters": list(spec.filters), "strides": list(spec.strides),
            "dims": list(spec.dims), "activation": act}


def load_weights(spec, source) -> MlpWeights | CnnWeights:
    """Weights from JSON arrays of ``num/den`` strings (nested like the matrices/filters)."""
    if isinstance(source, (str, Path)) and not str(source).lstrip().startswith("["):
        data = json.loads(Path(source).read_text())
    elif isinstance(source, str):
        data = json.loads(source)
    else:
        data = source
    if isinstance(spec, MlpSpec):
        w = MlpWeights(tuple(tuple(tuple(parse_scalar(x) for x in row) for row in m) for m in data))
    else:
        w = CnnWeights(tuple(tuple(parse_scalar(x) for x in f) for f in data))
    w.check(spec)
    return w

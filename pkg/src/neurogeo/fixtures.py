"""Reference constants for the worked examples reproduced by ``neurogeo reproduce``.

Polynomials are stored as text over named variables and parsed on demand.
"""
from __future__ import annotations

from fractions import Fraction

from .polyalg import MultiPoly, parse_poly

# Shallow MLP, widths (2,2,1), sigma(x) = x^3 + x^2.
# Weights W1 = [[a, b], [c, d]], W2 = [e, f].
D1_CONFIG = {"type": "mlp", "widths": [2, 2, 1], "activation": [0, 0, 1, 1]}
D1_WEIGHT_NAMES = ("a", "b", "c", "d", "e", "f")
D1_AMBIENT_NAMES = tuple(f"t{i}" for i in range(1, 8))
D1_BASIS_LABELS = ("x1^3", "x1^2*x2", "x1^2", "x1*x2^2", "x1*x2", "x2^3", "x2^2")

D1_COEFFICIENTS = (
    "a^3*e + c^3*f",
    "3*a^2*b*e + 3*c^2*d*f",
    "a^2*e + c^2*f",
    "3*a*b^2*e + 3*c*d^2*f",
    "2*a*b*e + 2*c*d*f",
    "b^3*e + d^3*f",
    "b^2*e + d^2*f",
)

D1_JACOBIAN = (
    ("3*a^2*e", "0", "3*c^2*f", "0", "a^3", "c^3"),
    ("6*a*b*e", "3*a^2*e", "6*c*d*f", "3*c^2*f", "3*a^2*b", "3*c^2*d"),
    ("2*a*e", "0", "2*c*f", "0", "a^2", "c^2"),
    ("3*b^2*e", "6*a*b*e", "3*d^2*f", "6*c*d*f", "3*a*b^2", "3*c*d^2"),
    ("2*b*e", "2*a*e", "2*d*f", "2*c*f", "2*a*b", "2*c*d"),
    ("0", "3*b^2*e", "0", "3*d^2*f", "b^3", "d^3"),
    ("0", "2*b*e", "0", "2*d*f", "b^2", "d^2"),
)

D1_HYPERSURFACE = "2*t3*t4^2 - t2*t4*t5 - 6*t2*t3*t6 + 9*t1*t5*t6 + 2*t2^2*t7 - 6*t1*t4*t7"

D1_SINGULAR_GENERATORS = (
    "3*t5*t6 - 2*t4*t7",
    "3*t3*t6 - t2*t7",
    "t4*t5 - 2*t2*t7",
    "t2*t5 - 6*t1*t7",
    "t4^2 - 3*t2*t6",
    "t3*t4 - 3*t1*t7",
    "t2*t4 - 9*t1*t6",
    "2*t2*t3 - 3*t1*t5",
    "t2^2 - 3*t1*t4",
)

# Subnetwork f = 0: tangent directions (a, b, e) and the 3x3 minor on rows 1-3.
D1_SUBNET_COLUMNS = (0, 1, 4)
D1_MINOR = "3*a^6*e^2"
D1_EXPOSEDNESS = {"familyDim": 3, "normalDim": 4, "ambientDim": 7}
D1_GENERIC_RANK = 6

# CNN with filters w1 = [a, b, c] (stride 2), w2 = [d, e], sigma(y) = y^2 + y.
D2_CONFIG = {"type": "cnn", "filters": [3, 2], "strides": [2, 1], "dims": [5, 2, 1], "activation": [0, 1, 1]}
D2_WEIGHT_NAMES = ("a", "b", "c", "d", "e")
D2_GENERIC_RANK = 5
D2_AMBIENT_DIM = 20
# zeroed entries -> signed paddings, accumulated shift profile, singular?
D2_TILDE_TABLE = (
    ("a=0", (1, 0), (Fraction(1), Fraction(1, 2)), False),
    ("a=b=0", (2, 0), (Fraction(2), Fraction(1)), False),
    ("e=0", (0, -1), (Fraction(0), Fraction(-1)), False),
    ("a=b=e=0", (2, -1), (Fraction(2), Fraction(0)), True),
)
# the function x -> d*sigma(c*x3), embedded two ways
D2_SHIFTED_PAIR = ((("0", "0", "c"), ("d", "0")), (("c", "0", "0"), ("0", "d")))

# Plane cubics: nodal t -> (t^2 - 1, t(t^2 - 1)) and cuspidal t -> (t^2, t^3).
CUBIC_NAMES = ("x", "y")
NODAL_PARAM = ("t^2 - 1", "t^3 - t")
NODAL_CURVE = "x^2*(x + 1) - y^2"
CUSP_PARAM = ("t^2", "t^3")
CUSP_CURVE = "x^3 - y^2"
CUBIC_SINGULAR_POINTS = ((0, 0),)
NODAL_CRITICAL_PARAMS = ()
CUSP_CRITICAL_PARAMS = (0,)


def poly(text: str, names) -> MultiPoly:
    return parse_poly(text, names)


def d1_coefficients() -> list[MultiPoly]:
    return [parse_poly(t, D1_WEIGHT_NAMES) for t in D1_COEFFICIENTS]


def d1_jacobian() -> list[list[MultiPoly]]:
    return [[parse_poly(t, D1_WEIGHT_NAMES) for t in row] for row in D1_JACOBIAN]


def d1_hypersurface() -> MultiPoly:
    return parse_poly(D1_HYPERSURFACE, D1_AMBIENT_NAMES)


def d1_singular_generators() -> list[MultiPoly]:
    return [parse_poly(t, D1_AMBIENT_NAMES) for t in D1_SINGULAR_GENERATORS]

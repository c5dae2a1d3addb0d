"""Strip geometry and symbolic generators of subharmonic almost periodic functions.

Every generator is a frozen dataclass that evaluates vectorized over complex
arrays.  Values are extended reals: ``-inf`` is the sentinel for the polar set
of a ``LogAbs`` node, ``+inf`` never occurs.

The JSON tree format used by :func:`to_json` / :func:`from_json`::

    {"logabs": {"terms": [{"freq": 1.0, "coef": [1.0, 0.0]},
                          {"freq": 0.0, "coef": [-1.0, 0.0]}]}}

is ``log|e^{iz} - 1|``.  Other node keys are ``expsum``, ``holo``, ``exp``,
``sum``, ``max``, ``scale`` and ``shift``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np
from scipy.interpolate import CubicSpline


class DomainError(ValueError):
    """Argument outside the domain where an operation is defined."""


class SpecError(ValueError):
    """Malformed function specification."""


# ---------------------------------------------------------------------------
# strip geometry


@dataclass(frozen=True)
class StripSpec:
    """Open horizontal strip ``y_low < Im z < y_high``."""

    y_low: float
    y_high: float

    def __post_init__(self):
        if not self.y_low < self.y_high:
            raise DomainError(f"empty strip ({self.y_low}, {self.y_high})")

    @property
    def width(self) -> float:
        return self.y_high - self.y_low

    def contains(self, y) -> bool:
        y = np.asarray(y, dtype=float)
        return bool(np.all((y > self.y_low) & (y < self.y_high)))

    def check_substrip(self, alpha: float, beta: float) -> None:
        if not (self.y_low < alpha <= beta < self.y_high):
            raise DomainError(
                f"[{alpha}, {beta}] is not a closed substrip of ({self.y_low}, {self.y_high})"
            )


# ---------------------------------------------------------------------------
# coefficient profiles a(y)


class Profile:
    """Complex-valued continuous function of ``y``."""

    def __call__(self, y):
        raise NotImplementedError

    def __add__(self, other: "Profile") -> "Profile":
        return ProfileSum((self, other))


@dataclass(frozen=True)
class ConstProfile(Profile):
    c: complex

    def __call__(self, y):
        return np.full(np.shape(y), complex(self.c))


@dataclass(frozen=True)
class PolyProfile(Profile):
    """``sum_k coeffs[k] * y**k``."""

    coeffs: tuple

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        out = np.zeros(y.shape, dtype=complex)
        for c in reversed(self.coeffs):
            out = out * y + c
        return out


@dataclass(frozen=True)
class ExpProfile(Profile):
    """``c * exp(k * y)``."""

    c: complex
    k: float

    def __call__(self, y):
        return complex(self.c) * np.exp(self.k * np.asarray(y, dtype=float))


@dataclass(frozen=True)
class InterpProfile(Profile):
    """Interpolated samples on an increasing y-grid.

    ``kind='linear'`` clamps outside the grid; ``kind='spline'`` is a
    not-a-knot cubic spline and extrapolates with its end cubics.
    """

    ys: tuple
    values: tuple
    kind: str = "linear"
    _spline: Any = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        ys = np.asarray(self.ys, dtype=float)
        if ys.ndim != 1 or len(ys) != len(self.values) or len(ys) < 1:
            raise SpecError("interpolation grid and values differ in length")
        if np.any(np.diff(ys) <= 0):
            raise SpecError("interpolation grid must be strictly increasing")
        if self.kind not in ("linear", "spline"):
            raise SpecError(f"unknown interpolation kind {self.kind!r}")
        if self.kind == "spline":
            if len(ys) < 4:
                raise SpecError("spline profile needs at least 4 samples")
            object.__setattr__(
                self, "_spline", CubicSpline(ys, np.asarray(self.values, dtype=complex))
            )

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        if self.kind == "spline":
            return self._spline(y)
        v = np.asarray(self.values, dtype=complex)
        return np.interp(y, self.ys, v.real) + 1j * np.interp(y, self.ys, v.imag)


@dataclass(frozen=True)
class ProfileSum(Profile):
    parts: tuple

    def __call__(self, y):
        out = np.zeros(np.shape(y), dtype=complex)
        for p in self.parts:
            out = out + p(y)
        return out


# ---------------------------------------------------------------------------
# function expressions


class FunctionExpr:
    """Base class of generator trees; ``expr(z)`` evaluates on complex arrays."""

    def __call__(self, z):
        raise NotImplementedError

    def __add__(self, other):
        return Sum((self, other))


def _as_complex(z):
    return np.asarray(z, dtype=complex)


@dataclass(frozen=True)
class ExpSum(FunctionExpr):
    """Real part of ``sum_n a_n(y) exp(i lam_n x)``.

    Callers keep the term list closed under ``lam -> -lam`` with conjugate
    profiles when they want a genuinely real function; the real part is
    taken regardless.
    """

    terms: tuple  # of (freq, Profile)

    def __post_init__(self):
        freqs = [float(f) for f, _ in self.terms]
        if len(set(freqs)) != len(freqs):
            raise SpecError("ExpSum frequencies must be pairwise distinct")

    @property
    def freqs(self) -> list[float]:
        return [float(f) for f, _ in self.terms]

    def __call__(self, z):
        z = _as_complex(z)
        x, y = z.real, z.imag
        out = np.zeros(z.shape, dtype=complex)
        for lam, prof in self.terms:
            if lam == 0:
                out += prof(y)
            else:
                out += prof(y) * np.exp(1j * lam * x)
        return out.real


@dataclass(frozen=True)
class HoloPoly(FunctionExpr):
    """Exponential polynomial ``f(z) = sum c_n exp(i mu_n z)``.

    As a function expression it stands for the harmonic function ``Re f``;
    :meth:`holo` returns the complex values.
    """

    terms: tuple  # of (freq, complex coef)

    def __post_init__(self):
        freqs = [float(f) for f, _ in self.terms]
        if len(set(freqs)) != len(freqs):
            raise SpecError("HoloPoly frequencies must be pairwise distinct")

    @property
    def freqs(self) -> list[float]:
        return [float(f) for f, _ in self.terms]

    def holo(self, z):
        z = _as_complex(z)
        out = np.zeros(z.shape, dtype=complex)
        for mu, c in self.terms:
            out += complex(c) * np.exp(1j * mu * z)
        return out

    def __call__(self, z):
        return self.holo(z).real


@dataclass(frozen=True)
class LogAbs(FunctionExpr):
    """``log|f(z)|``; exactly ``-inf`` on zeros of ``f``."""

    f: HoloPoly

    def __call__(self, z):
        with np.errstate(divide="ignore"):
            return np.log(np.abs(self.f.holo(z)))


@dataclass(frozen=True)
class Exp(FunctionExpr):
    arg: FunctionExpr

    def __call__(self, z):
        if isinstance(self.arg, LogAbs):
            # exact modulus, no log/exp round trip
            return np.abs(self.arg.f.holo(z))
        return np.exp(self.arg(z))


@dataclass(frozen=True)
class Sum(FunctionExpr):
    args: tuple

    def __post_init__(self):
        if len(self.args) < 1:
            raise SpecError("sum needs at least one argument")

    def __call__(self, z):
        out = self.args[0](z)
        for a in self.args[1:]:
            out = out + a(z)
        return out


@dataclass(frozen=True)
class Max(FunctionExpr):
    args: tuple

    def __post_init__(self):
        if len(self.args) < 1:
            raise SpecError("max needs at least one argument")

    def __call__(self, z):
        out = self.args[0](z)
        for a in self.args[1:]:
            out = np.maximum(out, a(z))
        return out


@dataclass(frozen=True)
class Scale(FunctionExpr):
    c: float
    arg: FunctionExpr

    def __post_init__(self):
        if not self.c >= 0:
            raise SpecError("scale factor must be nonnegative")

    def __call__(self, z):
        if self.c == 0:
            return np.zeros(np.shape(z))
        return self.c * self.arg(z)


@dataclass(frozen=True)
class HShift(FunctionExpr):
    """``arg(z + t)`` for real ``t``."""

    t: float
    arg: FunctionExpr

    def __call__(self, z):
        return self.arg(_as_complex(z) + self.t)


# ---------------------------------------------------------------------------
# operations


def evaluate(expr: FunctionExpr, z, strip: StripSpec | None = None):
    """Evaluate ``expr`` at ``z`` (scalar or array).

    Returns a float for scalar input.  With ``strip`` given, raises
    :class:`DomainError` if any ``Im z`` falls outside it.
    """
    zz = _as_complex(z)
    if strip is not None and not strip.contains(zz.imag):
        raise DomainError(f"Im z outside strip ({strip.y_low}, {strip.y_high})")
    out = np.asarray(expr(zz), dtype=float)
    if np.ndim(z) == 0:
        return float(out)
    return out


def horizontal_shift(expr: FunctionExpr, t: float) -> FunctionExpr:
    """Return the expression ``z -> expr(z + t)``."""
    return HShift(float(t), expr)


@dataclass
class GridField:
    """Samples ``values[i, j] = f(x0 + i*hx + 1j*(y0 + j*hy))``."""

    x0: float
    y0: float
    hx: float
    hy: float
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2:
            raise DomainError("grid values must be a matrix")
        if not (self.hx > 0 and self.hy > 0):
            raise DomainError("grid spacings must be positive")
        if np.any(self.values == np.inf):
            raise DomainError("+inf is not an admissible grid value")

    @property
    def shape(self):
        return self.values.shape

    @property
    def xs(self) -> np.ndarray:
        return self.x0 + np.arange(self.values.shape[0]) * self.hx

    @property
    def ys(self) -> np.ndarray:
        return self.y0 + np.arange(self.values.shape[1]) * self.hy

    @property
    def x1(self) -> float:
        return float(self.xs[-1])

    @property
    def y1(self) -> float:
        return float(self.ys[-1])

    def points(self) -> np.ndarray:
        X, Y = np.meshgrid(self.xs, self.ys, indexing="ij")
        return X + 1j * Y

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "y", "value"])
        xs, ys = self.xs, self.ys
        for i, x in enumerate(xs):
            for j, y in enumerate(ys):
                w.writerow([fmt(x), fmt(y), fmt(self.values[i, j])])
        return buf.getvalue()


def fmt(v: float) -> str:
    """Round-trippable float text; ``-inf`` for the sentinel."""
    v = float(v)
    if math.isinf(v):
        return "-inf" if v < 0 else "inf"
    return repr(v)


def _count(a: float, b: float, h: float) -> int:
    return int(math.floor((b - a) / h + 1e-9)) + 1


def sample_grid(expr: FunctionExpr, rect: Sequence[float], hx: float, hy: float,
                strip: StripSpec | None = None) -> GridField:
    """Sample ``expr`` on ``rect = (x0, x1, y0, y1)`` with steps ``hx``, ``hy``."""
    x0, x1, y0, y1 = map(float, rect)
    if x1 < x0 or y1 < y0:
        raise DomainError(f"empty rectangle {rect}")
    if not (hx > 0 and hy > 0):
        raise DomainError("grid spacings must be positive")
    nx, ny = _count(x0, x1, hx), _count(y0, y1, hy)
    xs = x0 + np.arange(nx) * hx
    ys = y0 + np.arange(ny) * hy
    if strip is not None and not strip.contains(ys):
        raise DomainError("rectangle leaves the strip")
    Z = xs[:, None] + 1j * ys[None, :]
    return GridField(x0, y0, hx, hy, expr(Z))


# ---------------------------------------------------------------------------
# convenience constructors


def const(c: float) -> ExpSum:
    return ExpSum(((0.0, ConstProfile(complex(c))),))


def minus_y() -> ExpSum:
    return ExpSum(((0.0, PolyProfile((0j, -1 + 0j))),))


def cosine(freq: float = 1.0, amp: float = 1.0) -> ExpSum:
    """``amp * cos(freq * x)``, constant in ``y``."""
    half = ConstProfile(complex(amp / 2))
    return ExpSum(((float(freq), half), (-float(freq), half)))


def harmonic_cosine(freq: float = 1.0, amp: float = 1.0) -> ExpSum:
    """``amp * exp(-freq*y) * cos(freq*x) = Re(amp * exp(i freq z))``, harmonic."""
    if not freq > 0:
        raise DomainError("harmonic_cosine needs a positive frequency")
    half = ExpProfile(complex(amp / 2), -float(freq))
    return ExpSum(((float(freq), half), (-float(freq), half)))


def holo(*terms) -> HoloPoly:
    """``holo((mu, c), ...)``."""
    return HoloPoly(tuple((float(mu), complex(c)) for mu, c in terms))


# ---------------------------------------------------------------------------
# JSON


def _cpair(c) -> list:
    c = complex(c)
    return [c.real, c.imag]


def profile_to_json(p: Profile) -> dict:
    if isinstance(p, ConstProfile):
        return {"const": _cpair(p.c)}
    if isinstance(p, PolyProfile):
        return {"poly": [_cpair(c) for c in p.coeffs]}
    if isinstance(p, ExpProfile):
        return {"exp": {"c": _cpair(p.c), "k": float(p.k)}}
    if isinstance(p, InterpProfile):
        return {"interp": {"y": [float(y) for y in p.ys],
                           "values": [_cpair(v) for v in p.values],
                           "kind": p.kind}}
    if isinstance(p, ProfileSum):
        return {"sum": [profile_to_json(q) for q in p.parts]}
    raise TypeError(f"cannot serialize profile {type(p).__name__}")


def to_json(expr: FunctionExpr) -> dict:
    """JSON-ready tree for ``expr``."""
    if isinstance(expr, ExpSum):
        return {"expsum": {"terms": [{"freq": float(f), "profile": profile_to_json(p)}
                                     for f, p in expr.terms]}}
    if isinstance(expr, HoloPoly):
        return {"holo": _holo_terms(expr)}
    if isinstance(expr, LogAbs):
        return {"logabs": _holo_terms(expr.f)}
    if isinstance(expr, Exp):
        return {"exp": to_json(expr.arg)}
    if isinstance(expr, Sum):
        return {"sum": [to_json(a) for a in expr.args]}
    if isinstance(expr, Max):
        return {"max": [to_json(a) for a in expr.args]}
    if isinstance(expr, Scale):
        return {"scale": {"c": float(expr.c), "expr": to_json(expr.arg)}}
    if isinstance(expr, HShift):
        return {"shift": {"t": float(expr.t), "expr": to_json(expr.arg)}}
    raise TypeError(f"cannot serialize {type(expr).__name__}")


def _holo_terms(f: HoloPoly) -> dict:
    return {"terms": [{"freq": float(mu), "coef": _cpair(c)} for mu, c in f.terms]}


def dumps(expr: FunctionExpr) -> str:
    return json.dumps(to_json(expr))


def _need(obj, key, path):
    if not isinstance(obj, dict) or key not in obj:
        raise SpecError(f"{path}: missing field {key!r}")
    return obj[key]


def _num(v, path) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SpecError(f"{path}: expected a number, got {v!r}")
    return float(v)


def _cnum(v, path) -> complex:
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(v)
    if isinstance(v, list) and len(v) == 2:
        return complex(_num(v[0], path + "[0]"), _num(v[1], path + "[1]"))
    raise SpecError(f"{path}: expected a number or [re, im], got {v!r}")


def _single_key(obj, path):
    if not isinstance(obj, dict) or len(obj) != 1:
        raise SpecError(f"{path}: expected an object with exactly one node key")
    return next(iter(obj.items()))


def profile_from_json(obj, path="$") -> Profile:
    key, val = _single_key(obj, path)
    p = f"{path}.{key}"
    if key == "const":
        return ConstProfile(_cnum(val, p))
    if key == "poly":
        if not isinstance(val, list) or not val:
            raise SpecError(f"{p}: expected a nonempty list")
        return PolyProfile(tuple(_cnum(c, f"{p}[{i}]") for i, c in enumerate(val)))
    if key == "exp":
        return ExpProfile(_cnum(_need(val, "c", p), p + ".c"), _num(_need(val, "k", p), p + ".k"))
    if key == "interp":
        ys = _need(val, "y", p)
        vs = _need(val, "values", p)
        if not isinstance(ys, list) or not isinstance(vs, list):
            raise SpecError(f"{p}: y and values must be lists")
        return InterpProfile(tuple(_num(y, f"{p}.y[{i}]") for i, y in enumerate(ys)),
                             tuple(_cnum(v, f"{p}.values[{i}]") for i, v in enumerate(vs)),
                             val.get("kind", "linear"))
    if key == "sum":
        if not isinstance(val, list) or not val:
            raise SpecError(f"{p}: expected a nonempty list")
        return ProfileSum(tuple(profile_from_json(q, f"{p}[{i}]") for i, q in enumerate(val)))
    raise SpecError(f"{path}: unknown profile kind {key!r}")


def _holo_from(val, p) -> HoloPoly:
    terms = _need(val, "terms", p)
    if not isinstance(terms, list) or not terms:
        raise SpecError(f"{p}.terms: expected a nonempty list")
    out = []
    for i, t in enumerate(terms):
        q = f"{p}.terms[{i}]"
        out.append((_num(_need(t, "freq", q), q + ".freq"), _cnum(_need(t, "coef", q), q + ".coef")))
    return HoloPoly(tuple(out))


def from_json(obj, path="$") -> FunctionExpr:
    """Build an expression from its JSON tree; errors name the offending field."""
    key, val = _single_key(obj, path)
    p = f"{path}.{key}"
    if key == "expsum":
        terms = _need(val, "terms", p)
        if not isinstance(terms, list) or not terms:
            raise SpecError(f"{p}.terms: expected a nonempty list")
        out = []
        for i, t in enumerate(terms):
            q = f"{p}.terms[{i}]"
            freq = _num(_need(t, "freq", q), q + ".freq")
            if "profile" in t:
                prof = profile_from_json(t["profile"], q + ".profile")
            else:
                prof = ConstProfile(_cnum(_need(t, "coef", q), q + ".coef"))
            out.append((freq, prof))
        return ExpSum(tuple(out))
    if key == "holo":
        return _holo_from(val, p)
    if key == "logabs":
        return LogAbs(_holo_from(val, p))
    if key == "exp":
        return Exp(from_json(val, p))
    if key in ("sum", "max"):
        if not isinstance(val, list) or not val:
            raise SpecError(f"{p}: expected a nonempty list")
        args = tuple(from_json(a, f"{p}[{i}]") for i, a in enumerate(val))
        return Sum(args) if key == "sum" else Max(args)
    if key == "scale":
        return Scale(_num(_need(val, "c", p), p + ".c"), from_json(_need(val, "expr", p), p + ".expr"))
    if key == "shift":
        return HShift(_num(_need(val, "t", p), p + ".t"), from_json(_need(val, "expr", p), p + ".expr"))
    raise SpecError(f"{path}: unknown node kind {key!r}")


def loads(text: str) -> tuple[FunctionExpr, StripSpec | None]:
    """Parse a spec document: a bare tree or ``{"expr": tree, "strip": [lo, hi]}``."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise SpecError(f"line {e.lineno} column {e.colno}: {e.msg}") from None
    strip = None
    if isinstance(obj, dict) and "expr" in obj:
        if "strip" in obj:
            s = obj["strip"]
            if not isinstance(s, list) or len(s) != 2:
                raise SpecError("$.strip: expected [y_low, y_high]")
            try:
                strip = StripSpec(_num(s[0], "$.strip[0]"), _num(s[1], "$.strip[1]"))
            except DomainError as e:
                raise SpecError(f"$.strip: {e}") from None
        return from_json(obj["expr"], "$.expr"), strip
    return from_json(obj), strip


def frequency_hints(expr: FunctionExpr) -> list[float]:
    """Frequencies generating the spectrum of ``expr`` as an additive group.

    ``log|f|`` contributes the pairwise differences of the exponents of ``f``;
    ``exp``, ``max`` and sums keep the group generated by their arguments.
    """
    out: set[float] = set()

    def walk(e):
        if isinstance(e, ExpSum):
            out.update(abs(f) for f in e.freqs if f != 0)
        elif isinstance(e, HoloPoly):
            out.update(abs(f) for f in e.freqs if f != 0)
        elif isinstance(e, LogAbs):
            mus = e.f.freqs
            out.update(abs(a - b) for a in mus for b in mus if a != b)
        elif isinstance(e, (Exp, Scale, HShift)):
            walk(e.arg)
        elif isinstance(e, (Sum, Max)):
            for a in e.args:
                walk(a)
        else:
            raise TypeError(f"unknown node {type(e).__name__}")

    walk(expr)
    return sorted(out)

"""Small semi-stable chart rings, their level-n perfectoid extension and Gamma-action.

R+ = O<T_0..T_r, T_{r+1}^{+-1}..T_d^{+-1}> / (T_0 ... T_r - p^a) with O modeled by
W(n, e).  Monomials are kept in the normal form min(J_0..J_r) = 0.  The level-n
extension adjoins T_i^(1/p^lvl); an element is a finite sum of components
R+ . T^alpha indexed by alpha in J_r (some alpha_i with i <= r vanishes).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import FractionalPowerUnsupported, InvalidInput
from .ring import CyclotomicRing, RingElt, TwistTag


@dataclass(frozen=True)
class ChartParams:
    d: int = 1
    r: int = 0
    a: int = 1
    lvl: int = 1

    def __post_init__(self):
        if not isinstance(self.d, int) or self.d < 1:
            raise InvalidInput(f"relative dimension d must be >= 1, got {self.d!r}")
        if not isinstance(self.r, int) or not 0 <= self.r <= self.d:
            raise InvalidInput(f"need 0 <= r <= d, got r={self.r!r}, d={self.d}")
        if not isinstance(self.a, int) or self.a < 1:
            raise InvalidInput(f"chart exponent a must be an integer >= 1, got {self.a!r}")
        if not isinstance(self.lvl, int) or self.lvl < 1:
            raise InvalidInput(f"perfectoid level must be >= 1, got {self.lvl!r}")

    def to_json(self) -> dict:
        return {"d": self.d, "r": self.r, "a": self.a, "lvl": self.lvl}

    @classmethod
    def from_json(cls, obj: dict) -> "ChartParams":
        try:
            return cls(int(obj["d"]), int(obj.get("r", 0)), int(obj.get("a", 1)), int(obj.get("lvl", 1)))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInput(f"bad chart parameters: {obj!r}") from exc


def normalize(J: Sequence[int], r: int) -> tuple[tuple[int, ...], int]:
    """Apply T_0...T_r = p^a until min(J_0..J_r) = 0; returns (J', k), scale p^(a k)."""
    k = min(J[: r + 1])
    if k < 0:
        raise InvalidInput(f"negative exponent among T_0..T_r: {tuple(J)}")
    if k == 0:
        return tuple(J), 0
    return tuple(x - k if i <= r else x for i, x in enumerate(J)), k


class Chart:
    """Context binding chart parameters to a coefficient ring."""

    def __init__(self, params: ChartParams, ring: CyclotomicRing):
        if params.lvl > ring.n:
            raise InvalidInput(f"perfectoid level {params.lvl} exceeds cyclotomic level {ring.n}")
        self.params = params
        self.ring = ring
        self.d, self.r, self.a, self.lvl = params.d, params.r, params.a, params.lvl
        self.den = ring.p**params.lvl

    def normalize(self, J: Sequence[int]) -> tuple[tuple[int, ...], RingElt]:
        J2, k = normalize(J, self.r)
        return J2, self.ring.from_int(self.ring.p ** (self.a * k)) if self.a * k < self.ring.e else self.ring.zero

    def zero(self) -> "SemistableElt":
        return SemistableElt(self, {})

    def one(self) -> "SemistableElt":
        return self.const(self.ring.one)

    def const(self, x: RingElt | int) -> "SemistableElt":
        return self.monomial((0,) * (self.d + 1), x)

    def monomial(self, J: Sequence[int], coeff: RingElt | int = 1) -> "SemistableElt":
        if len(J) != self.d + 1:
            raise InvalidInput(f"exponent vector must have length d+1 = {self.d + 1}")
        J2, scale = self.normalize(tuple(int(x) for x in J))
        c = self.ring.coerce(coeff) * scale
        return SemistableElt(self, {J2: c})

    def T(self, i: int) -> "SemistableElt":
        J = [0] * (self.d + 1)
        J[i] = 1
        return self.monomial(J)

    def perf_index(self, alpha: Sequence[int]) -> tuple[int, ...]:
        """Validate a numerator vector alpha (denominator p^lvl) as an element of J_r."""
        alpha = tuple(int(x) for x in alpha)
        if len(alpha) != self.d + 1:
            raise InvalidInput("perfectoid index must have length d+1")
        if any(not 0 <= x < self.den for x in alpha):
            raise InvalidInput(f"perfectoid index entries must lie in [0, {self.den})")
        if all(alpha[: self.r + 1]):
            raise InvalidInput(f"index {alpha} violates prod_(i<=r) alpha_i = 0")
        return alpha

    def perf(self, alpha: Sequence[int], x: "SemistableElt | RingElt | int" = 1) -> "PerfElt":
        alpha = self.perf_index(alpha)
        if not isinstance(x, SemistableElt):
            x = self.const(x)
        return PerfElt(self, {alpha: x} if not x.is_zero() else {})

    def gamma(self, exps: Sequence[int]) -> "GammaElement":
        return GammaElement.from_delta(self.params, exps)

    def gamma_gen(self, i: int) -> "GammaElement":
        m = [0] * self.d
        m[i - 1] = 1
        return GammaElement.from_gamma(self.params, m)


class SemistableElt:
    """Finite sum of normal-form monomials with W(n,e) coefficients."""

    __slots__ = ("chart", "terms")

    def __init__(self, chart: Chart, terms: dict):
        self.chart = chart
        self.terms = {J: c for J, c in terms.items() if not c.is_zero()}

    def _coerce(self, other) -> "SemistableElt":
        if isinstance(other, SemistableElt):
            return other
        if isinstance(other, (RingElt, int)):
            return self.chart.const(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        terms = dict(self.terms)
        for J, c in o.terms.items():
            terms[J] = terms[J] + c if J in terms else c
        return SemistableElt(self.chart, terms)

    __radd__ = __add__

    def __neg__(self):
        return SemistableElt(self.chart, {J: -c for J, c in self.terms.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (RingElt, int)):
            return SemistableElt(self.chart, {J: c * other for J, c in self.terms.items()})
        if not isinstance(other, SemistableElt):
            return NotImplemented
        chart = self.chart
        terms: dict = {}
        for J1, c1 in self.terms.items():
            for J2, c2 in other.terms.items():
                J, scale = chart.normalize(tuple(x + y for x, y in zip(J1, J2)))
                c = c1 * c2 * scale
                terms[J] = terms[J] + c if J in terms else c
        return SemistableElt(chart, terms)

    __rmul__ = __mul__

    def __pow__(self, m: int):
        out = self.chart.one()
        for _ in range(m):
            out = out * self
        return out

    def is_zero(self) -> bool:
        return not self.terms

    def eq_mod(self, other, k: int | None = None) -> bool:
        diff = self - other
        return all(c.eq_mod(0, k) for c in diff.terms.values())

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.eq_mod(o)

    __hash__ = None

    def coefficients(self) -> list[RingElt]:
        return list(self.terms.values())

    def min_val(self):
        from .ring import PRECISION_ZERO

        vals = [c.val() for c in self.terms.values()]
        vals = [v for v in vals if v is not PRECISION_ZERO]
        return min(vals) if vals else PRECISION_ZERO

    def exact_div(self, y: RingElt) -> "SemistableElt":
        return SemistableElt(self.chart, {J: c.exact_div(y) for J, c in self.terms.items()})

    def gamma(self, delta: "GammaElement") -> "SemistableElt":
        return self

    def to_json(self) -> list:
        return [{"exps": list(J), "coeff": c.to_json()} for J, c in sorted(self.terms.items())]

    @classmethod
    def from_json(cls, chart: Chart, obj) -> "SemistableElt":
        if isinstance(obj, dict) and "coeffs" in obj:
            return chart.const(RingElt.from_json(chart.ring, obj))
        if not isinstance(obj, list):
            raise InvalidInput(f"bad chart-ring element {obj!r}")
        out = chart.zero()
        for t in obj:
            if not isinstance(t, dict) or "exps" not in t or "coeff" not in t:
                raise InvalidInput(f"bad monomial {t!r}")
            out = out + chart.monomial(t["exps"], RingElt.from_json(chart.ring, t["coeff"]))
        return out

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"{c!r}*T^{list(J)}" for J, c in sorted(self.terms.items()))


class PerfElt:
    """Element of the level-lvl extension: map from alpha numerators to R+ components."""

    __slots__ = ("chart", "comps")

    def __init__(self, chart: Chart, comps: dict):
        self.chart = chart
        self.comps = {a: x for a, x in comps.items() if not x.is_zero()}

    @classmethod
    def embed(cls, x: SemistableElt) -> "PerfElt":
        return cls(x.chart, {(0,) * (x.chart.d + 1): x})

    def _coerce(self, other) -> "PerfElt":
        if isinstance(other, PerfElt):
            return other
        if isinstance(other, SemistableElt):
            return PerfElt.embed(other)
        if isinstance(other, (RingElt, int)):
            return PerfElt.embed(self.chart.const(other))
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        comps = dict(self.comps)
        for a, x in o.comps.items():
            comps[a] = comps[a] + x if a in comps else x
        return PerfElt(self.chart, comps)

    __radd__ = __add__

    def __neg__(self):
        return PerfElt(self.chart, {a: -x for a, x in self.comps.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def _mul_index(self, a1, a2) -> tuple[tuple[int, ...], SemistableElt]:
        chart = self.chart
        den, r = chart.den, chart.r
        total = [x + y for x, y in zip(a1, a2)]
        carry = [t // den for t in total]
        frac = [t % den for t in total]
        factor = chart.monomial(carry) if any(carry) else chart.one()
        if all(frac[: r + 1]):
            mu = min(frac[: r + 1])
            if (chart.a * mu) % den:
                raise FractionalPowerUnsupported(
                    f"T_0..T_r share the fractional exponent {Fraction(mu, den)}; p^{Fraction(chart.a * mu, den)} is not modeled")
            frac = [f - mu if i <= r else f for i, f in enumerate(frac)]
            factor = factor * chart.ring.from_int(chart.ring.p ** (chart.a * mu // den))
        return tuple(frac), factor

    def __mul__(self, other):
        if isinstance(other, (RingElt, int, SemistableElt)):
            return PerfElt(self.chart, {a: x * other for a, x in self.comps.items()})
        if not isinstance(other, PerfElt):
            return NotImplemented
        comps: dict = {}
        for a1, x1 in self.comps.items():
            for a2, x2 in other.comps.items():
                a, factor = self._mul_index(a1, a2)
                y = x1 * x2 * factor
                comps[a] = comps[a] + y if a in comps else y
        return PerfElt(self.chart, comps)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not self.comps

    def eq_mod(self, other, k: int | None = None) -> bool:
        diff = self - other
        return all(x.eq_mod(self.chart.zero(), k) for x in diff.comps.values())

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.eq_mod(o)

    __hash__ = None

    def decompose(self) -> dict:
        return dict(self.comps)

    def gamma(self, delta: "GammaElement") -> "PerfElt":
        return gamma_act(delta, self)

    def coefficients(self) -> list[RingElt]:
        return [c for x in self.comps.values() for c in x.coefficients()]

    def min_val(self):
        from .ring import PRECISION_ZERO

        vals = [x.min_val() for x in self.comps.values()]
        vals = [v for v in vals if v is not PRECISION_ZERO]
        return min(vals) if vals else PRECISION_ZERO

    def exact_div(self, y: RingElt) -> "PerfElt":
        return PerfElt(self.chart, {a: x.exact_div(y) for a, x in self.comps.items()})

    def to_json(self) -> dict:
        return {"den": self.chart.den,
                "comps": [{"alpha": list(a), "elt": x.to_json()} for a, x in sorted(self.comps.items())]}

    @classmethod
    def from_json(cls, chart: Chart, obj) -> "PerfElt":
        if not isinstance(obj, dict) or obj.get("den") != chart.den or "comps" not in obj:
            raise InvalidInput(f"bad perfectoid element {obj!r}")
        out = PerfElt(chart, {})
        for comp in obj["comps"]:
            out = out + chart.perf(comp["alpha"], SemistableElt.from_json(chart, comp["elt"]))
        return out

    def __repr__(self) -> str:
        if not self.comps:
            return "0"
        return " + ".join(f"({x!r})*T^{list(a)}/{self.chart.den}" for a, x in sorted(self.comps.items()))


@dataclass(frozen=True)
class GammaElement:
    """delta_0^n_0 ... delta_d^n_d with n_0 + ... + n_r = 0 (Gamma truncated to Z^d)."""

    params: ChartParams
    exps: tuple[int, ...]

    def __post_init__(self):
        if len(self.exps) != self.params.d + 1:
            raise InvalidInput("Gamma element needs d+1 exponents")
        if sum(self.exps[: self.params.r + 1]) != 0:
            raise InvalidInput(f"exponents {self.exps} violate n_0 + ... + n_r = 0")

    @classmethod
    def from_delta(cls, params: ChartParams, exps: Sequence[int]) -> "GammaElement":
        return cls(params, tuple(int(x) for x in exps))

    @classmethod
    def from_gamma(cls, params: ChartParams, m: Sequence[int]) -> "GammaElement":
        """gamma_1^m_1 ... gamma_d^m_d with gamma_i = delta_0^-1 delta_i for i <= r."""
        m = tuple(int(x) for x in m)
        if len(m) != params.d:
            raise InvalidInput("gamma-form needs d exponents")
        n0 = -sum(m[: params.r])
        return cls(params, (n0,) + m)

    @classmethod
    def identity(cls, params: ChartParams) -> "GammaElement":
        return cls(params, (0,) * (params.d + 1))

    def gamma_form(self) -> tuple[int, ...]:
        return self.exps[1:]

    def __mul__(self, other: "GammaElement") -> "GammaElement":
        return GammaElement(self.params, tuple(x + y for x, y in zip(self.exps, other.exps)))

    def inverse(self) -> "GammaElement":
        return GammaElement(self.params, tuple(-x for x in self.exps))


def gamma_act(delta: GammaElement, x: PerfElt) -> PerfElt:
    """delta acts on the alpha-component by zeta^(sum n_i alpha_i)."""
    chart = x.chart
    ring = chart.ring
    shift = ring.p ** (ring.n - chart.lvl)
    comps = {}
    for alpha, comp in x.comps.items():
        s = sum(n * m for n, m in zip(delta.exps, alpha))
        comps[alpha] = comp * ring.zeta_power(s * shift) if s % chart.den else comp
    return PerfElt(chart, comps)


class LogDiffVector:
    """Coefficients (c_0..c_d) modulo c.(e_0 + ... + e_r), with a twist tag.

    Coefficients may be any ring-like values supporting + and - (chart elements,
    pd-elements); reduction eliminates e_0 = -(e_1 + ... + e_r).
    """

    __slots__ = ("coeffs", "r", "twist")

    def __init__(self, coeffs: Sequence, r: int, twist: TwistTag = TwistTag(0)):
        self.coeffs = tuple(coeffs)
        self.r = r
        self.twist = twist

    @property
    def d(self) -> int:
        return len(self.coeffs) - 1

    def __add__(self, other: "LogDiffVector") -> "LogDiffVector":
        self.twist.require_same(other.twist)
        return LogDiffVector([a + b for a, b in zip(self.coeffs, other.coeffs)], self.r, self.twist)

    def __sub__(self, other: "LogDiffVector") -> "LogDiffVector":
        self.twist.require_same(other.twist)
        return LogDiffVector([a - b for a, b in zip(self.coeffs, other.coeffs)], self.r, self.twist)

    def scale(self, s) -> "LogDiffVector":
        return LogDiffVector([c * s for c in self.coeffs], self.r, self.twist)

    def map(self, f) -> "LogDiffVector":
        return LogDiffVector([f(c) for c in self.coeffs], self.r, self.twist)

    def reduced(self) -> "LogDiffVector":
        return reduce_logdiff(self)

    def eq_mod(self, other: "LogDiffVector", k: int | None = None) -> bool:
        a, b = reduce_logdiff(self), reduce_logdiff(other)
        return a.twist == b.twist and all(x.eq_mod(y, k) for x, y in zip(a.coeffs, b.coeffs))

    def __repr__(self) -> str:
        return f"LogDiffVector({list(self.coeffs)!r}, twist={self.twist.grade})"


def reduce_logdiff(v: LogDiffVector) -> LogDiffVector:
    c0 = v.coeffs[0]
    zero = c0 - c0
    out = [zero]
    for i, c in enumerate(v.coeffs[1:], start=1):
        out.append(c - c0 if i <= v.r else c)
    return LogDiffVector(out, v.r, v.twist)


def basis_logdiff(chart: Chart, i: int, twist: int = 0, coeff=None) -> LogDiffVector:
    one = chart.one() if coeff is None else coeff
    zero = one - one
    return LogDiffVector([one if j == i else zero for j in range(chart.d + 1)], chart.r, TwistTag(twist))


def perf_indices(chart: Chart) -> Iterable[tuple[int, ...]]:
    """All indices in J_r at the chart level."""
    import itertools

    for alpha in itertools.product(range(chart.den), repeat=chart.d + 1):
        if not all(alpha[: chart.r + 1]):
            yield alpha

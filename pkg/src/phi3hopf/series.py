"""Truncated formal power series and their groups.

Two group structures are implemented exactly, with coefficients in the
polynomial ring of :mod:`phi3hopf.ring`:

* invertible series ``f = 1 + f_1 z + f_2 z^2 + ...`` under the Cauchy
  product (kind ``"inv"``, coefficient ``coeffs[n]`` multiplies ``z^n``);
* formal diffeomorphisms ``f = z + f_1 z^2 + f_2 z^3 + ...`` under
  composition (kind ``"diff"``, coefficient ``coeffs[n]`` multiplies
  ``z^{n+1}`` and ``coeffs[0] == 1``).

Series that satisfy neither normalization (for instance a two-point function
``G_0 + O(lambda)``) use kind ``"plain"``: same coefficient layout as
``"inv"`` but without the unit constraint, and without group operations.

Every series carries an explicit truncation order; binary operations demand
matching orders.  The semidirect product pairs a diffeomorphism with an
invertible series under ``(f, F) . (g, G) = (f o g, (F o g) G)``, which is the
convention that turns the Dyson renormalization transform into a group
action: substitute the bare coupling, then multiply by the wave-function
factor.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .ring import Poly, Rat, parse_poly

Coeff = Poly | Rat

KINDS = ("inv", "diff", "plain")


class TruncatedSeries:
    """A formal series truncated at a fixed order, with exact coefficients."""

    __slots__ = ("order", "coeffs", "kind")

    def __init__(self, order: int, coeffs: Sequence[Coeff], kind: str = "inv"):
        if order < 0:
            raise ValueError("order must be non-negative")
        if kind not in KINDS:
            raise ValueError(f"unknown series kind {kind!r}")
        if len(coeffs) != order + 1:
            raise ValueError(f"need {order + 1} coefficients for order {order}, got {len(coeffs)}")
        cs = [Poly.coerce(c) for c in coeffs]
        if kind in ("inv", "diff") and cs[0] != Poly.one():
            raise ValueError(f"kind {kind!r} requires leading coefficient 1, got {cs[0]}")
        self.order = order
        self.coeffs = cs
        self.kind = kind

    # -- constructors ---------------------------------------------------

    @staticmethod
    def one(order: int) -> "TruncatedSeries":
        """The unit series 1(z) = 1 of the invertible group."""
        return TruncatedSeries(order, [1] + [0] * order, "inv")

    @staticmethod
    def identity(order: int) -> "TruncatedSeries":
        """The identity diffeomorphism id(z) = z."""
        return TruncatedSeries(order, [1] + [0] * order, "diff")

    @staticmethod
    def from_coeff_map(order: int, kind: str, entries: dict[int, Coeff]) -> "TruncatedSeries":
        coeffs: list[Coeff] = [0] * (order + 1)
        if kind in ("inv", "diff"):
            coeffs[0] = 1
        for idx, val in entries.items():
            if 0 <= idx <= order:
                coeffs[idx] = val
        return TruncatedSeries(order, coeffs, kind)

    # -- plumbing ---------------------------------------------------------

    def _require(self, other: "TruncatedSeries", kinds: tuple[str, ...]) -> None:
        if self.kind not in kinds or other.kind not in kinds:
            raise ValueError(f"kind mismatch: {self.kind!r} vs {other.kind!r}, expected {kinds}")
        if self.order != other.order:
            raise ValueError(f"order mismatch: {self.order} vs {other.order}")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.kind == other.kind and self.order == other.order and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.kind, self.order, tuple(self.coeffs)))

    def powers_of_z(self) -> list[Poly]:
        """Coefficients indexed by the actual power of z, up to z^order.

        For kind ``"diff"`` the layout shifts by one, so the constant entry is
        zero and information at z^{order+1} is dropped; use the raw ``coeffs``
        for diffeomorphism arithmetic.
        """
        if self.kind == "diff":
            return [Poly.zero()] + self.coeffs[: self.order]
        return list(self.coeffs)

    def __str__(self) -> str:
        var = "z"
        parts = []
        shift = 1 if self.kind == "diff" else 0
        for n, c in enumerate(self.coeffs):
            if not c and not (n == 0 and self.kind != "diff"):
                continue
            power = n + shift
            if power == 0:
                parts.append(f"({c})")
            elif power == 1:
                parts.append(f"({c})*{var}")
            else:
                parts.append(f"({c})*{var}^{power}")
        return " + ".join(parts) if parts else "0"

    def __repr__(self) -> str:
        return f"TruncatedSeries({self.kind!r}, order={self.order}, {self})"

    # -- serialization ------------------------------------------------------

    def to_json(self) -> str:
        return json.dumps(
            {"kind": self.kind, "order": self.order, "coeffs": [str(c) for c in self.coeffs]}
        )

    @staticmethod
    def from_json(text: str) -> "TruncatedSeries":
        data = json.loads(text)
        coeffs = [parse_poly(c) for c in data["coeffs"]]
        return TruncatedSeries(data["order"], coeffs, data["kind"])


# -- convolution helpers ----------------------------------------------------


def _cauchy(a: Sequence[Poly], b: Sequence[Poly], upto: int) -> list[Poly]:
    out = [Poly.zero() for _ in range(upto + 1)]
    for i, ai in enumerate(a):
        if i > upto or not ai:
            continue
        for j, bj in enumerate(b):
            if i + j > upto:
                break
            if bj:
                out[i + j] = out[i + j] + ai * bj
    return out


def series_mul(f: TruncatedSeries, g: TruncatedSeries) -> TruncatedSeries:
    """Cauchy product of invertible series: coefficient sum over p+q=n."""
    f._require(g, ("inv",))
    return TruncatedSeries(f.order, _cauchy(f.coeffs, g.coeffs, f.order), "inv")


def plain_mul(f: TruncatedSeries, g: TruncatedSeries) -> TruncatedSeries:
    """Cauchy product without the unit-leading-term requirement."""
    if f.kind == "diff" or g.kind == "diff":
        raise ValueError("plain_mul expects z^n-indexed series")
    if f.order != g.order:
        raise ValueError(f"order mismatch: {f.order} vs {g.order}")
    return TruncatedSeries(f.order, _cauchy(f.coeffs, g.coeffs, f.order), "plain")


def plain_add(f: TruncatedSeries, g: TruncatedSeries) -> TruncatedSeries:
    if f.kind == "diff" or g.kind == "diff":
        raise ValueError("plain_add expects z^n-indexed series")
    if f.order != g.order:
        raise ValueError(f"order mismatch: {f.order} vs {g.order}")
    return TruncatedSeries(f.order, [a + b for a, b in zip(f.coeffs, g.coeffs)], "plain")


def scale(f: TruncatedSeries, factor: Coeff) -> TruncatedSeries:
    if f.kind == "diff":
        raise ValueError("scale expects z^n-indexed series")
    factor = Poly.coerce(factor)
    return TruncatedSeries(f.order, [factor * c for c in f.coeffs], "plain")


def series_recip(f: TruncatedSeries) -> TruncatedSeries:
    """Multiplicative inverse, by recursion: (f^-1)_n = -sum f_k (f^-1)_{n-k}."""
    if f.kind != "inv":
        raise ValueError(f"series_recip needs an invertible series, got kind {f.kind!r}")
    inv = [Poly.one()] + [Poly.zero()] * f.order
    for n in range(1, f.order + 1):
        acc = Poly.zero()
        for k in range(1, n + 1):
            acc = acc + f.coeffs[k] * inv[n - k]
        inv[n] = -acc
    return TruncatedSeries(f.order, inv, "inv")


def pow_binomial(f: TruncatedSeries, exponent: Fraction | int) -> TruncatedSeries:
    """Generalized power f^a of an invertible series via the binomial series.

    With f = 1 + x, computes sum_r C(a, r) x^r truncated; C(a, r) is the
    falling-factorial binomial with exact rational arithmetic, so half-integer
    exponents such as -3/2 are available in the same coefficient ring.
    """
    if f.kind != "inv":
        raise ValueError("pow_binomial needs an invertible series")
    a = Fraction(exponent)
    x = [Poly.zero()] + f.coeffs[1:]
    result = [Poly.one()] + [Poly.zero()] * f.order
    power = [Poly.one()] + [Poly.zero()] * f.order  # x^r, truncated
    binom = Fraction(1)
    for r in range(1, f.order + 1):
        power = _cauchy(power, x, f.order)
        binom *= Fraction(a - (r - 1), r)
        if binom == 0:
            break
        for n in range(f.order + 1):
            if power[n]:
                result[n] = result[n] + binom * power[n]
    return TruncatedSeries(f.order, result, "inv")


# -- diffeomorphisms ----------------------------------------------------------


def _compose_into(outer: Sequence[Poly], inner: TruncatedSeries, start_power: int, upto: int) -> list[Poly]:
    """Coefficients (by power of z) of sum_n outer[n] * inner(z)^{n+start_power}."""
    if inner.kind != "diff":
        raise ValueError("inner series must be a diffeomorphism")
    inner_z = [Poly.zero()] + list(inner.coeffs)  # exact through z^{order+1}
    acc = [Poly.zero()] * (upto + 1)
    power = [Poly.one()] + [Poly.zero()] * upto
    for _ in range(start_power):
        power = _cauchy(power, inner_z, upto)
    for n, coeff in enumerate(outer):
        if coeff:
            for k in range(upto + 1):
                if power[k]:
                    acc[k] = acc[k] + coeff * power[k]
        if n + 1 < len(outer):
            power = _cauchy(power, inner_z, upto)
    return acc


def diff_compose(f: TruncatedSeries, g: TruncatedSeries) -> TruncatedSeries:
    """Composition (f o g)(z) = f(g(z)) of formal diffeomorphisms."""
    f._require(g, ("diff",))
    upto = f.order + 1  # powers of z run from z^1 to z^{order+1}
    by_power = _compose_into(f.coeffs, g, 1, upto)
    return TruncatedSeries(f.order, by_power[1:], "diff")


def diff_inverse(f: TruncatedSeries) -> TruncatedSeries:
    """Compositional inverse, solved order by order from f(g(z)) = z."""
    if f.kind != "diff":
        raise ValueError("diff_inverse needs a diffeomorphism")
    g = TruncatedSeries.identity(f.order)
    coeffs = list(g.coeffs)
    for n in range(1, f.order + 1):
        # residual at z^{n+1} depends linearly on g_n with unit coefficient
        g = TruncatedSeries(f.order, coeffs, "diff")
        residual = diff_compose(f, g).coeffs[n]
        coeffs[n] = coeffs[n] - residual
    return TruncatedSeries(f.order, coeffs, "diff")


def compose_inv_diff(F: TruncatedSeries, g: TruncatedSeries) -> TruncatedSeries:
    """Substitution (F o g)(z) = F(g(z)) of a diffeomorphism into an invertible series."""
    if F.kind not in ("inv", "plain"):
        raise ValueError("outer series must be z^n-indexed")
    if g.kind != "diff":
        raise ValueError("inner series must be a diffeomorphism")
    if F.order != g.order:
        raise ValueError(f"order mismatch: {F.order} vs {g.order}")
    by_power = _compose_into(F.coeffs, g, 0, F.order)
    return TruncatedSeries(F.order, by_power, F.kind if by_power[0] == Poly.one() else "plain")


# -- semidirect product -------------------------------------------------------


@dataclass(frozen=True)
class SemidirectPair:
    """A pair (diffeomorphism, invertible series) of equal truncation order."""

    diff: TruncatedSeries
    inv: TruncatedSeries

    def __post_init__(self) -> None:
        if self.diff.kind != "diff" or self.inv.kind != "inv":
            raise ValueError("SemidirectPair needs (diff-kind, inv-kind) components")
        if self.diff.order != self.inv.order:
            raise ValueError("SemidirectPair components must share the truncation order")

    @staticmethod
    def unit(order: int) -> "SemidirectPair":
        return SemidirectPair(TruncatedSeries.identity(order), TruncatedSeries.one(order))


def semidirect_mul(a: SemidirectPair, b: SemidirectPair) -> SemidirectPair:
    """(f, F) . (g, G) = (f o g, (F o g) G): substitute, then multiply."""
    if a.diff.order != b.diff.order:
        raise ValueError(f"order mismatch: {a.diff.order} vs {b.diff.order}")
    comp = diff_compose(a.diff, b.diff)
    acted = compose_inv_diff(a.inv, b.diff)
    return SemidirectPair(comp, series_mul(acted, b.inv))


def semidirect_inverse(a: SemidirectPair) -> SemidirectPair:
    f_inv = diff_inverse(a.diff)
    acted = compose_inv_diff(a.inv, f_inv)
    return SemidirectPair(f_inv, series_recip(acted))


# -- renormalization transforms ----------------------------------------------


def bare_coupling_series(Z1: TruncatedSeries, Z3: TruncatedSeries) -> TruncatedSeries:
    """lambda_b = lambda Z1(lambda) Z3(lambda)^{-3/2} as a formal diffeomorphism."""
    Z1._require(Z3, ("inv",))
    s = series_mul(Z1, pow_binomial(Z3, Fraction(-3, 2)))
    return TruncatedSeries(s.order, s.coeffs, "diff")


def bare_mass_series(Zm: TruncatedSeries, Z3: TruncatedSeries) -> TruncatedSeries:
    """m_b / m = Zm^{1/2} Z3^{-1/2} as an invertible series in lambda."""
    Zm._require(Z3, ("inv",))
    return series_mul(pow_binomial(Zm, Fraction(1, 2)), pow_binomial(Z3, Fraction(-1, 2)))


def dyson_transform(
    G_bare: TruncatedSeries,
    Z3: TruncatedSeries,
    Zm: TruncatedSeries,
    Z1: TruncatedSeries,
    k: int,
    m_symbol: str = "m",
    mb_symbol: str = "m_b",
) -> TruncatedSeries:
    """Renormalized Green's function Z3^{-k/2} G_bare(m_b, lambda_b).

    ``G_bare`` is a series in the bare coupling whose coefficients may be
    polynomial in the bare-mass symbol ``mb_symbol``.  The bare parameters are
    eliminated through their series: lambda_b = lambda Z1 Z3^{-3/2}
    (substituted into the series variable) and m_b = m Zm^{1/2} Z3^{-1/2}
    (substituted into the coefficients, with ``m_symbol`` for the effective
    mass).  Half-integer powers of Z-factors use the exact binomial series;
    the wave-function factor Z3^{-k/2} multiplies the result once per
    external leg.
    """
    if G_bare.kind == "diff":
        raise ValueError("G_bare must be a z^n-indexed series")
    order = G_bare.order
    for z in (Z3, Zm, Z1):
        if z.kind != "inv" or z.order != order:
            raise ValueError("Z-factors must be invertible series of matching order")

    lam_b = bare_coupling_series(Z1, Z3)
    mass_ratio = bare_mass_series(Zm, Z3)  # m_b = m * mass_ratio(lambda)
    m = Poly.symbol(m_symbol)

    # substitute m_b into each coefficient, then lambda_b into the series
    mass_powers: list[list[Poly]] = [[Poly.one()] + [Poly.zero()] * order]
    substituted: list[list[Poly]] = []
    for coeff in G_bare.coeffs:
        expanded = [Poly.zero()] * (order + 1)
        for j in range(coeff.degree_in(mb_symbol) + 1):
            cj = _coefficient_of_power(coeff, mb_symbol, j)
            if not cj:
                continue
            while len(mass_powers) <= j:
                mass_powers.append(_cauchy(mass_powers[-1], mass_ratio.coeffs, order))
            factor = cj * m**j
            for n in range(order + 1):
                if mass_powers[j][n]:
                    expanded[n] = expanded[n] + factor * mass_powers[j][n]
        substituted.append(expanded)

    # G(lambda_b) = sum_n coeff_n(lambda) * lambda_b(lambda)^n
    lam_b_z = [Poly.zero()] + list(lam_b.coeffs)  # by power of z
    power = [Poly.one()] + [Poly.zero()] * order
    total = [Poly.zero()] * (order + 1)
    for n, coeff_series in enumerate(substituted):
        term = _cauchy(coeff_series, power, order)
        for i in range(order + 1):
            total[i] = total[i] + term[i]
        if n < order:
            power = _cauchy(power, lam_b_z, order)

    z3_factor = pow_binomial(Z3, Fraction(-k, 2))
    total = _cauchy(total, z3_factor.coeffs, order)
    kind = "inv" if total[0] == Poly.one() else "plain"
    return TruncatedSeries(order, total, kind)


def _coefficient_of_power(p: Poly, symbol: str, power: int) -> Poly:
    out: dict = {}
    for mono, coeff in p.terms.items():
        exps = dict(mono)
        if exps.get(symbol, 0) == power:
            rest = tuple(sorted((s, e) for s, e in exps.items() if s != symbol))
            out[rest] = out.get(rest, 0) + coeff
    return Poly(out)


def two_point_from_1pi(Sigma: TruncatedSeries, G0: Coeff) -> TruncatedSeries:
    """Resum the 1PI self-energy: G = G0 (1 - Sigma G0)^{-1}, truncated.

    ``Sigma`` must have zero constant term (it starts at order lambda);
    the returned series is plain-kind with leading coefficient G0.
    """
    if Sigma.kind == "diff":
        raise ValueError("Sigma must be a z^n-indexed series")
    if Sigma.coeffs[0]:
        raise ValueError("Sigma must have zero constant term")
    G0 = Poly.coerce(G0)
    order = Sigma.order
    sigma_g0 = [c * G0 for c in Sigma.coeffs]
    # geometric series sum_k (Sigma G0)^k
    geom = [Poly.one()] + [Poly.zero()] * order
    power = [Poly.one()] + [Poly.zero()] * order
    for _ in range(order):
        power = _cauchy(power, sigma_g0, order)
        if not any(power):
            break
        for n in range(order + 1):
            geom[n] = geom[n] + power[n]
    return TruncatedSeries(order, [G0 * c for c in geom], "plain")


# -- parsing (CLI helper) -----------------------------------------------------


def parse_series(text: str, order: int, kind: str, var: str = "z") -> TruncatedSeries:
    """Build a series from a polynomial expression in ``var``, e.g. ``"z+z^2"``.

    Coefficients beyond the truncation order are discarded.  The expression
    must satisfy the kind's normalization (constant term 1 for ``"inv"``,
    leading ``z`` for ``"diff"``).
    """
    p = parse_poly(text)
    by_power: dict[int, Poly] = {}
    for mono, coeff in p.terms.items():
        exps = dict(mono)
        zexp = exps.get(var, 0)
        rest = tuple(sorted((s, e) for s, e in exps.items() if s != var))
        by_power[zexp] = by_power.get(zexp, Poly.zero()) + Poly({rest: coeff})
    shift = 1 if kind == "diff" else 0
    coeffs: list[Poly] = []
    for n in range(order + 1):
        coeffs.append(by_power.get(n + shift, Poly.zero()))
    return TruncatedSeries(order, coeffs, kind)

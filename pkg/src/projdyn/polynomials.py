"""Exact multivariate polynomials and a small square-root extension ring.

`Poly` stores terms as a map from exponent tuples to rationals.  It is the
carrier for everything the package decides symbolically: time derivatives of
candidate first integrals, shear/scaling invariances, polar forms, screen
compatibility identities.

`SqrtElem` represents (P + Q*s)/D where P, Q, D are polynomials and s is a
formal square root with s**2 = S for a fixed base polynomial S.  It is what
makes inverse-square-type force fields exactly differentiable: zero testing
reduces to P = 0 and Q = 0, because s is irrational over the rational
function field whenever S is not a perfect square.
"""

from __future__ import annotations

from fractions import Fraction

from projdyn.exactlin import FormatError, format_rational, parse_rational, rat


class NotPolynomialError(ArithmeticError):
    """An exact computation that must produce a polynomial did not."""


class Poly:
    """Polynomial in a fixed number of variables, exact rational coefficients."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms=None):
        self.nvars = nvars
        clean = {}
        for exps, coef in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != nvars:
                raise ValueError(f"exponent tuple {exps} has length {len(exps)}, expected {nvars}")
            if any(e < 0 for e in exps):
                raise ValueError("negative exponent")
            c = rat(coef)
            if c:
                s = clean.get(exps, Fraction(0)) + c
                if s:
                    clean[exps] = s
                else:
                    del clean[exps]
        self.terms = clean

    # -- constructors --------------------------------------------------------

    @classmethod
    def zero(cls, nvars):
        return cls(nvars, {})

    @classmethod
    def const(cls, nvars, c):
        c = rat(c)
        return cls(nvars, {(0,) * nvars: c} if c else {})

    @classmethod
    def variable(cls, i, nvars):
        exps = [0] * nvars
        exps[i] = 1
        return cls(nvars, {tuple(exps): Fraction(1)})

    @classmethod
    def monomial(cls, exps, coef=1):
        return cls(len(exps), {tuple(exps): rat(coef)})

    # -- ring operations -------------------------------------------------------

    def _check(self, other):
        if self.nvars != other.nvars:
            raise ValueError("variable count mismatch")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.const(self.nvars, other)
        self._check(other)
        out = dict(self.terms)
        for exps, coef in other.terms.items():
            s = out.get(exps, Fraction(0)) + coef
            if s:
                out[exps] = s
            else:
                out.pop(exps, None)
        return Poly(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.const(self.nvars, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        self._check(other)
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                key = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(key, Fraction(0)) + c1 * c2
                if s:
                    out[key] = s
                else:
                    del out[key]
        return Poly(self.nvars, out)

    __rmul__ = __mul__

    def scale(self, c):
        c = rat(c)
        if not c:
            return Poly.zero(self.nvars)
        return Poly(self.nvars, {e: v * c for e, v in self.terms.items()})

    def __pow__(self, k):
        if k < 0:
            raise ValueError("negative power")
        out = Poly.const(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.const(self.nvars, other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    # -- calculus and structure ---------------------------------------------------

    def diff(self, i: int) -> "Poly":
        out = {}
        for exps, coef in self.terms.items():
            e = exps[i]
            if e == 0:
                continue
            key = exps[:i] + (e - 1,) + exps[i + 1:]
            s = out.get(key, Fraction(0)) + coef * e
            if s:
                out[key] = s
            else:
                del out[key]
        return Poly(self.nvars, out)

    def degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def degree_in(self, var_indices) -> int:
        """Max total exponent over a set of variable indices (-1 if zero)."""
        if not self.terms:
            return -1
        return max(sum(e[i] for i in var_indices) for e in self.terms)

    def is_homogeneous_in(self, var_indices, degree=None) -> bool:
        degs = {sum(e[i] for i in var_indices) for e in self.terms}
        if not degs:
            return True
        if len(degs) > 1:
            return False
        return True if degree is None else degs == {degree}

    def components_by(self, key):
        """Split into {key(exps): Poly} by any function of the exponent tuple."""
        buckets = {}
        for exps, coef in self.terms.items():
            buckets.setdefault(key(exps), {})[exps] = coef
        return {k: Poly(self.nvars, v) for k, v in buckets.items()}

    def evaluate(self, point):
        point = [rat(x) for x in point]
        total = Fraction(0)
        for exps, coef in self.terms.items():
            term = coef
            for x, e in zip(point, exps):
                if e:
                    if not x:
                        term = Fraction(0)
                        break
                    term *= x ** e
            total += term
        return total

    def evaluate_float(self, point) -> float:
        total = 0.0
        for exps, coef in self.terms.items():
            term = float(coef)
            for x, e in zip(point, exps):
                if e:
                    term *= float(x) ** e
            total += term
        return total

    def substitute(self, images):
        """Full substitution: variable i is replaced by images[i] (a Poly).

        All images must share one variable space, which becomes the result's.
        """
        if len(images) != self.nvars:
            raise ValueError("need one image per variable")
        nv = images[0].nvars
        out = Poly.zero(nv)
        cache = {}
        for exps, coef in self.terms.items():
            term = Poly.const(nv, coef)
            for i, e in enumerate(exps):
                if e:
                    if (i, e) not in cache:
                        cache[(i, e)] = images[i] ** e
                    term = term * cache[(i, e)]
            out = out + term
        return out

    def extend(self, new_nvars, offset=0):
        """Embed into a larger variable space, shifting variables by offset."""
        out = {}
        for exps, coef in self.terms.items():
            key = (0,) * offset + exps + (0,) * (new_nvars - offset - self.nvars)
            out[key] = coef
        return Poly(new_nvars, out)

    def exact_div(self, divisor: "Poly") -> "Poly":
        """Exact quotient self / divisor; raises NotPolynomialError otherwise.

        Single-divisor long division under the graded-lex order; for a true
        multiple the remainder vanishes, for anything else it does not.
        """
        self._check(divisor)
        if divisor.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        if self.is_zero():
            return Poly.zero(self.nvars)

        def order_key(exps):
            return (sum(exps), exps)

        lead_d = max(divisor.terms, key=order_key)
        cd = divisor.terms[lead_d]
        rem = dict(self.terms)
        quot = {}
        while rem:
            lead_r = max(rem, key=order_key)
            diff = tuple(a - b for a, b in zip(lead_r, lead_d))
            if any(d < 0 for d in diff):
                raise NotPolynomialError("division left a remainder")
            c = rem[lead_r] / cd
            quot[diff] = quot.get(diff, Fraction(0)) + c
            for e2, c2 in divisor.terms.items():
                key = tuple(a + b for a, b in zip(diff, e2))
                s = rem.get(key, Fraction(0)) - c * c2
                if s:
                    rem[key] = s
                else:
                    rem.pop(key, None)
        return Poly(self.nvars, quot)

    # -- presentation -------------------------------------------------------------

    def __repr__(self):
        if not self.terms:
            return "Poly(0)"
        bits = []
        for exps, coef in sorted(self.terms.items()):
            mono = "*".join(f"x{i}^{e}" if e > 1 else f"x{i}" for i, e in enumerate(exps) if e)
            bits.append(f"{coef}" + (f"*{mono}" if mono else ""))
        return "Poly(" + " + ".join(bits) + ")"

    def to_json(self, var_names=None):
        names = var_names or [f"x{i}" for i in range(self.nvars)]
        if len(names) != self.nvars:
            raise ValueError("need one name per variable")
        terms = [
            {"exps": list(exps), "coef": format_rational(coef)}
            for exps, coef in sorted(self.terms.items())
        ]
        return {"vars": list(names), "terms": terms}

    @classmethod
    def from_json(cls, obj):
        if not isinstance(obj, dict) or "vars" not in obj or "terms" not in obj:
            raise FormatError("polynomial: expected {'vars': [...], 'terms': [...]}")
        nvars = len(obj["vars"])
        terms = {}
        for item in obj["terms"]:
            exps = tuple(item["exps"])
            if len(exps) != nvars:
                raise FormatError(f"polynomial: exps {list(exps)} has wrong length")
            if exps in terms:
                raise FormatError(f"polynomial: duplicate exps {list(exps)}")
            terms[exps] = parse_rational(item["coef"])
        return cls(nvars, terms)


# ---------------------------------------------------------------------------
# rational functions with one adjoined square root

class SqrtElem:
    """(P + Q*s)/D with s**2 = base, over a fixed polynomial base.

    D is a nonzero polynomial; the base is shared by all elements entering an
    arithmetic operation.  No gcd normalization is performed: zero testing
    never needs it, and sizes stay small at this package's scale.
    """

    __slots__ = ("P", "Q", "D", "base")

    def __init__(self, P: Poly, Q: Poly, D: Poly, base: Poly):
        if D.is_zero():
            raise ZeroDivisionError("zero denominator")
        self.P, self.Q, self.D, self.base = P, Q, D, base

    @classmethod
    def from_poly(cls, p: Poly, base: Poly):
        nv = p.nvars
        return cls(p, Poly.zero(nv), Poly.const(nv, 1), base)

    @classmethod
    def sqrt(cls, base: Poly):
        nv = base.nvars
        return cls(Poly.zero(nv), Poly.const(nv, 1), Poly.const(nv, 1), base)

    def _coerce(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.const(self.P.nvars, other)
        if isinstance(other, Poly):
            other = SqrtElem.from_poly(other, self.base)
        if self.base != other.base:
            raise ValueError("square-root base mismatch")
        return other

    def __add__(self, other):
        other = self._coerce(other)
        return SqrtElem(
            self.P * other.D + other.P * self.D,
            self.Q * other.D + other.Q * self.D,
            self.D * other.D,
            self.base,
        )

    def __neg__(self):
        return SqrtElem(-self.P, -self.Q, self.D, self.base)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __mul__(self, other):
        other = self._coerce(other)
        return SqrtElem(
            self.P * other.P + self.Q * other.Q * self.base,
            self.P * other.Q + self.Q * other.P,
            self.D * other.D,
            self.base,
        )

    def div_poly(self, d: Poly):
        return SqrtElem(self.P, self.Q, self.D * d, self.base)

    def diff(self, i: int) -> "SqrtElem":
        """Partial derivative; ds/dx_i = (d base/dx_i) / (2 s)."""
        S = self.base
        Si = S.diff(i)
        # d(P + Q s) = (2 S P_i + (2 S Q_i + Q Si) s) / (2 S), then the quotient rule
        numP = S.scale(2) * self.P.diff(i)
        numQ = S.scale(2) * self.Q.diff(i) + self.Q * Si
        P_out = numP * self.D - S.scale(2) * self.P * self.D.diff(i)
        Q_out = numQ * self.D - S.scale(2) * self.Q * self.D.diff(i)
        D_out = S.scale(2) * self.D * self.D
        return SqrtElem(P_out, Q_out, D_out, self.base)

    def is_zero(self) -> bool:
        return self.P.is_zero() and self.Q.is_zero()

    def as_poly(self) -> Poly:
        """Exact polynomial value, when the element is one."""
        if not self.Q.is_zero():
            raise NotPolynomialError("value has an irrational part")
        return self.P.exact_div(self.D)

    def evaluate_float(self, point) -> float:
        import math

        s = math.sqrt(self.base.evaluate_float(point))
        return (self.P.evaluate_float(point) + self.Q.evaluate_float(point) * s) / self.D.evaluate_float(point)

    def __repr__(self):
        return f"SqrtElem(P={self.P!r}, Q={self.Q!r}, D={self.D!r})"

"""Screens, projective force fields, and motion with radial reaction.

A screen is the level set {h = 1} of a positively homogeneous degree-1
function on a semi-conic open set.  Dynamics on a screen follows
q'' = f(q) + lambda q, the radial reaction lambda being recomputed from
(q, q') at every right-hand-side evaluation so the motion stays on the
screen; an adaptive embedded Runge-Kutta pair integrates the system in
double precision with the constraint re-imposed after every accepted step.

The extended central projection maps states between screens while
preserving the impulsion bivector q ^ q'.  All exact algebra lives in the
sibling modules; this module is deliberately floating point and talks to
them only through tolerance-tagged comparisons.

Screens and force fields are immutable and shareable; each integration run
owns its stepper state, so independent runs may proceed concurrently.
"""

from __future__ import annotations

import io
import math
from fractions import Fraction

import numpy as np

from projdyn.exactlin import FormatError, format_rational, parse_rational
from projdyn.polynomials import Poly, SqrtElem


class DomainExitError(RuntimeError):
    """The trajectory left the screen's validity domain; carries the exit time."""

    def __init__(self, message, t_exit):
        super().__init__(message)
        self.t_exit = t_exit


class StepUnderflowError(RuntimeError):
    """Adaptive stepping shrank below the representable scale (typically a
    force-field singularity)."""

    def __init__(self, message, t_fail):
        super().__init__(message)
        self.t_fail = t_fail


class VisibilityError(ValueError):
    """A point is not visible on the target screen (k(q) <= 0)."""


# ---------------------------------------------------------------------------
# screens

class Screen:
    kind = "abstract"

    def value(self, q) -> float:
        raise NotImplementedError

    def gradient(self, q) -> np.ndarray:
        raise NotImplementedError

    def hessian(self, q) -> np.ndarray:
        raise NotImplementedError

    def in_domain(self, q) -> bool:
        raise NotImplementedError

    def project_state(self, q, v):
        """Renormalize a nearby state onto {h = 1, dh(v) = 0}."""
        q = np.asarray(q, dtype=float) / self.value(q)
        g = self.gradient(q)
        v = np.asarray(v, dtype=float)
        v = v - (g @ v) / (g @ q) * q
        return q, v

    def on_screen(self, q, v, tol) -> bool:
        return abs(self.value(q) - 1.0) <= tol and abs(self.gradient(q) @ v) <= tol


class LinearFormScreen(Screen):
    """h(q) = <phi, q> on the half space phi > 0 (an affine chart)."""

    kind = "linear"

    def __init__(self, phi):
        self.phi_exact = tuple(Fraction(x) if not isinstance(x, float) else Fraction(x).limit_denominator(10**12) for x in phi)
        self.phi = np.array([float(x) for x in phi], dtype=float)
        self.dim = len(self.phi)
        self._hess = np.zeros((self.dim, self.dim))

    def value(self, q):
        return float(self.phi @ np.asarray(q, dtype=float))

    def gradient(self, q):
        return self.phi.copy()

    def hessian(self, q):
        return self._hess

    def in_domain(self, q):
        q = np.asarray(q, dtype=float)
        return bool(np.all(np.isfinite(q))) and self.value(q) > 0.0

    def to_json(self):
        return {"kind": "linear", "dim": self.dim, "phi": [format_rational(x) for x in self.phi_exact]}


class QuadraticRootScreen(Screen):
    """h(q) = sqrt(q^T G q) on the cone {g > 0}, G symmetric.

    An optional sheet covector restricts the domain to one side (for the
    two-sheeted hyperboloid, where {g > 0} is disconnected).
    """

    kind = "quadratic_root"

    def __init__(self, gmat, sheet=None):
        self.gmat_exact = tuple(
            tuple(Fraction(x) if not isinstance(x, float) else Fraction(x).limit_denominator(10**12) for x in row)
            for row in gmat
        )
        self.gmat = np.array([[float(x) for x in row] for row in gmat], dtype=float)
        if not np.array_equal(self.gmat, self.gmat.T):
            raise ValueError("screen quadratic form must be symmetric")
        self.dim = self.gmat.shape[0]
        self.sheet = None if sheet is None else np.array([float(x) for x in sheet], dtype=float)

    def value(self, q):
        q = np.asarray(q, dtype=float)
        return math.sqrt(q @ self.gmat @ q)

    def gradient(self, q):
        q = np.asarray(q, dtype=float)
        return (self.gmat @ q) / self.value(q)

    def hessian(self, q):
        q = np.asarray(q, dtype=float)
        h = self.value(q)
        gq = self.gmat @ q
        return self.gmat / h - np.outer(gq, gq) / h**3

    def in_domain(self, q):
        q = np.asarray(q, dtype=float)
        if not np.all(np.isfinite(q)):
            return False
        if q @ self.gmat @ q <= 0.0:
            return False
        if self.sheet is not None and self.sheet @ q <= 0.0:
            return False
        return True

    def to_json(self):
        return {
            "kind": "quadratic_root",
            "dim": self.dim,
            "g": [[format_rational(x) for x in row] for row in self.gmat_exact],
            "sheet": None if self.sheet is None else [float(x) for x in self.sheet],
        }


class CustomScreen(Screen):
    """Screen from callables; homogeneity and the Euler relation are
    spot-checked at use sites rather than assumed."""

    kind = "custom"

    def __init__(self, dim, h, grad, hess, domain=None):
        self.dim = dim
        self._h, self._grad, self._hess = h, grad, hess
        self._domain = domain or (lambda q: True)

    def value(self, q):
        return float(self._h(np.asarray(q, dtype=float)))

    def gradient(self, q):
        return np.asarray(self._grad(np.asarray(q, dtype=float)), dtype=float)

    def hessian(self, q):
        return np.asarray(self._hess(np.asarray(q, dtype=float)), dtype=float)

    def in_domain(self, q):
        q = np.asarray(q, dtype=float)
        return bool(np.all(np.isfinite(q))) and bool(self._domain(q))

    def validate_at(self, q, tol=1e-7):
        """Numerical sanity: h(lam q) = lam h(q) and dh|_q(q) = h(q)."""
        q = np.asarray(q, dtype=float)
        for lam in (0.5, 2.0):
            if abs(self.value(lam * q) - lam * self.value(q)) > tol * max(1.0, abs(self.value(q))):
                raise ValueError("custom screen is not positively homogeneous of degree 1")
        if abs(self.gradient(q) @ q - self.value(q)) > tol * max(1.0, abs(self.value(q))):
            raise ValueError("custom screen violates the Euler relation")

    def to_json(self):
        raise FormatError("custom screens are not serializable")


def flat_screen(dim, axis=None):
    axis = dim - 1 if axis is None else axis
    phi = [Fraction(0)] * dim
    phi[axis] = Fraction(1)
    return LinearFormScreen(phi)


def sphere_screen(dim):
    return QuadraticRootScreen([[Fraction(int(i == j)) for j in range(dim)] for i in range(dim)])


def hyperboloid_screen(dim):
    g = [[Fraction(0)] * dim for _ in range(dim)]
    for i in range(dim - 1):
        g[i][i] = Fraction(-1)
    g[dim - 1][dim - 1] = Fraction(1)
    sheet = [0.0] * dim
    sheet[dim - 1] = 1.0
    return QuadraticRootScreen(g, sheet=sheet)


def screen_from_json(obj):
    if not isinstance(obj, dict) or "kind" not in obj:
        raise FormatError("screen: expected an object with 'kind'")
    kind = obj["kind"]
    if kind == "linear":
        return LinearFormScreen([parse_rational(x) for x in obj["phi"]])
    if kind == "quadratic_root":
        return QuadraticRootScreen(
            [[parse_rational(x) for x in row] for row in obj["g"]],
            sheet=obj.get("sheet"),
        )
    if kind == "flat":
        return flat_screen(int(obj["dim"]))
    if kind == "sphere":
        return sphere_screen(int(obj["dim"]))
    if kind == "hyperboloid":
        return hyperboloid_screen(int(obj["dim"]))
    raise FormatError(f"screen: unknown kind {kind!r}")


# ---------------------------------------------------------------------------
# projective force fields

class ProjectiveForceField:
    """Vector field on the semi-cone, positively homogeneous of degree -3.

    ``func`` is the double-precision evaluation; ``exact`` optionally carries
    per-component SqrtElem/Poly expressions (in the 2*dim q,v-variable space,
    v-free) for the exact modules; fields are defined up to a radial term.
    """

    def __init__(self, dim, func, exact=None, name="custom", params=None):
        self.dim = dim
        self._func = func
        self.exact = exact
        self.name = name
        self.params = params or {}

    def __call__(self, q):
        return np.asarray(self._func(np.asarray(q, dtype=float)), dtype=float)

    def check_homogeneity(self, q, tol=1e-8):
        q = np.asarray(q, dtype=float)
        f1 = self(q)
        scale = max(1.0, float(np.max(np.abs(f1))))
        for lam in (0.5, 2.0, 3.0):
            if np.max(np.abs(self(lam * q) - lam**-3 * f1)) > tol * scale * lam**-3:
                return False
        return True

    def to_json(self):
        return {"kind": self.name, **self.params}


def zero_force(dim):
    exact = [Poly.zero(2 * dim) for _ in range(dim)]
    return ProjectiveForceField(dim, lambda q: np.zeros(dim), exact=exact, name="zero")


def homogenize_force(f_H, screen, name="homogenized", exact=None, params=None):
    """Extend a screen-level field to the cone: f(q) = h(q)^-3 f_H(q / h(q)).

    The result has homogeneity degree -3 and restricts to f_H on the screen.
    """

    def func(q):
        h = screen.value(q)
        if h <= 0.0:
            raise DomainExitError("homogenized force evaluated at h(q) <= 0", None)
        return np.asarray(f_H(q / h), dtype=float) / h**3

    return ProjectiveForceField(screen.dim, func, exact=exact, name=name, params=params)


def kepler_force(mu, center, reference_screen=None):
    """Attraction toward a center sitting on a reference screen.

    ``center`` is an ambient point with h(center) = 1 on the reference screen
    (default: the flat screen on the last axis).  The projective field is the
    homogenization of the screen-level inverse-square field.
    """
    center = np.asarray(center, dtype=float)
    dim = len(center)
    screen = reference_screen or flat_screen(dim)

    def f_H(x):
        delta = x - center
        r = np.linalg.norm(delta)
        return -mu * delta / r**3

    exact = None
    if screen.kind == "linear":
        # f_i = -mu (q_i - c_i h) * s / (h * S^2) with S = |q - c h|^2, h = <phi, q>
        nv = 2 * dim
        phi = [Fraction(x) for x in screen.phi_exact]
        cen = [Fraction(x).limit_denominator(10**12) for x in center]
        h = Poly(nv, {tuple(1 if k == i else 0 for k in range(nv)): phi[i] for i in range(dim) if phi[i]})
        deltas = [Poly.variable(i, nv) - h.scale(cen[i]) for i in range(dim)]
        S = Poly.zero(nv)
        for dlt in deltas:
            S = S + dlt * dlt
        mu_r = Fraction(mu).limit_denominator(10**12)
        exact = [
            SqrtElem(Poly.zero(nv), dlt.scale(-mu_r), h * S * S, S)
            for dlt in deltas
        ]
    return homogenize_force(
        f_H, screen, name="kepler", exact=exact,
        params={"mu": mu, "center": [float(c) for c in center]},
    )


def oscillator_force(dim, axis=None):
    """Homogenized linear restoring force on the flat screen (chart form
    x'' = -x); exact rational components -q_i / h^4."""
    axis = dim - 1 if axis is None else axis
    nv = 2 * dim
    h = Poly.variable(axis, nv)
    h4 = h ** 4
    exact = [
        SqrtElem(-Poly.variable(i, nv), Poly.zero(nv), h4, Poly.const(nv, 1)) if i != axis else
        SqrtElem(Poly.zero(nv), Poly.zero(nv), h4, Poly.const(nv, 1))
        for i in range(dim)
    ]

    def func(q):
        out = -q / q[axis] ** 4
        out[axis] = 0.0
        return out

    return ProjectiveForceField(dim, func, exact=exact, name="oscillator", params={"axis": axis})


def inverse_cube_force(dim, mu=1.0):
    """Central inverse-cube attraction f = -mu q / |q|^4 (exactly rational)."""
    nv = 2 * dim
    mu_r = Fraction(mu).limit_denominator(10**12)
    norm2 = Poly.zero(nv)
    for i in range(dim):
        norm2 = norm2 + Poly.variable(i, nv) * Poly.variable(i, nv)
    D = norm2 * norm2
    exact = [
        SqrtElem(Poly.variable(i, nv).scale(-mu_r), Poly.zero(nv), D, Poly.const(nv, 1))
        for i in range(dim)
    ]
    return ProjectiveForceField(
        dim, lambda q: -mu * q / float(q @ q) ** 2, exact=exact,
        name="inverse_cube", params={"mu": mu},
    )


def force_from_json(obj, dim):
    if not isinstance(obj, dict) or "kind" not in obj:
        raise FormatError("force: expected an object with 'kind'")
    kind = obj["kind"]
    if kind == "zero":
        return zero_force(dim)
    if kind == "kepler":
        reference = screen_from_json(obj["reference"]) if "reference" in obj else None
        return kepler_force(float(obj["mu"]), obj["center"], reference)
    if kind == "oscillator":
        return oscillator_force(dim, obj.get("axis"))
    if kind == "inverse_cube":
        return inverse_cube_force(dim, float(obj.get("mu", 1.0)))
    raise FormatError(f"force: unknown kind {kind!r}")


# ---------------------------------------------------------------------------
# the equation of motion

def radial_reaction(screen, q, v, fval):
    """lambda(q, v) = -(hess h(v,v) + dh(f)) / dh(q); with q'' = f + lambda q
    the second derivative of h along the motion vanishes."""
    q = np.asarray(q, dtype=float)
    v = np.asarray(v, dtype=float)
    g = screen.gradient(q)
    return -(v @ screen.hessian(q) @ v + g @ np.asarray(fval, dtype=float)) / (g @ q)


def restrict_force(force, screen, q):
    """Tangential part f - dh(f) q of the force at a screen point."""
    q = np.asarray(q, dtype=float)
    fval = force(q) if callable(force) else np.asarray(force, dtype=float)
    g = screen.gradient(q)
    return fval - (g @ fval) * q


def change_time_factor(b):
    """Time-change rate a = b**2 tying parametrizations across screens."""
    if b <= 0:
        raise ValueError("screen ratio must be positive")
    return b * b


# ---------------------------------------------------------------------------
# adaptive Runge-Kutta (Dormand-Prince 5(4)) with constraint projection

_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_DP_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_DP_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])


class TrajectorySample:
    """Sampled trajectory on a screen: times plus (q, v) states, with the
    stored derivatives enabling cubic Hermite interpolation between nodes."""

    def __init__(self, screen, times, qs, vs, derivs=None, tol=1e-10):
        self.screen = screen
        self.times = np.asarray(times, dtype=float)
        self.qs = np.asarray(qs, dtype=float)
        self.vs = np.asarray(vs, dtype=float)
        self.derivs = None if derivs is None else np.asarray(derivs, dtype=float)
        self.tol = tol

    def __len__(self):
        return len(self.times)

    def state(self, i):
        return self.qs[i], self.vs[i]

    def drift(self):
        """Max |h(q) - 1| and |dh(v)| over all samples."""
        dh = 0.0
        dv = 0.0
        for q, v in zip(self.qs, self.vs):
            dh = max(dh, abs(self.screen.value(q) - 1.0))
            dv = max(dv, abs(self.screen.gradient(q) @ v))
        return dh, dv

    def check_on_screen(self, tol):
        dh, dv = self.drift()
        if dh > tol or dv > tol:
            raise ValueError(f"trajectory drift {max(dh, dv):.3e} exceeds {tol:.3e}")

    def interpolate(self, t):
        """Cubic Hermite state at time t (requires stored derivatives)."""
        if self.derivs is None:
            raise ValueError("no derivatives stored; cannot interpolate")
        ts = self.times
        if not ts[0] <= t <= ts[-1]:
            raise ValueError(f"time {t} outside [{ts[0]}, {ts[-1]}]")
        i = int(np.searchsorted(ts, t, side="right") - 1)
        i = min(max(i, 0), len(ts) - 2)
        h = ts[i + 1] - ts[i]
        if h == 0.0:
            return np.concatenate([self.qs[i], self.vs[i]])
        s = (t - ts[i]) / h
        y0 = np.concatenate([self.qs[i], self.vs[i]])
        y1 = np.concatenate([self.qs[i + 1], self.vs[i + 1]])
        d0, d1 = self.derivs[i], self.derivs[i + 1]
        h00 = 2 * s**3 - 3 * s**2 + 1
        h10 = s**3 - 2 * s**2 + s
        h01 = -2 * s**3 + 3 * s**2
        h11 = s**3 - s**2
        return h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1

    def dense_states(self, n):
        ts = np.linspace(self.times[0], self.times[-1], n)
        return ts, np.array([self.interpolate(t) for t in ts])

    # -- CSV ----------------------------------------------------------------

    def to_csv(self) -> str:
        d = self.qs.shape[1]
        buf = io.StringIO()
        meta = self.screen.to_json()
        kind = meta.pop("kind")
        params = ";".join(f"{k}={v}" for k, v in sorted(meta.items()))
        buf.write(f"# screen={kind} {params}\n")
        cols = ["t"] + [f"q_{i}" for i in range(d)] + [f"v_{i}" for i in range(d)]
        buf.write(",".join(cols) + "\n")
        for t, q, v in zip(self.times, self.qs, self.vs):
            row = [t] + list(q) + list(v)
            buf.write(",".join(f"{x:.17g}" for x in row) + "\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text, screen=None):
        lines = [ln for ln in text.strip().splitlines() if ln]
        if len(lines) < 2 or not lines[0].startswith("# screen="):
            raise FormatError("trajectory csv: missing screen header line")
        header = lines[1].split(",")
        if header[0] != "t" or (len(header) - 1) % 2 != 0:
            raise FormatError("trajectory csv: bad column header")
        d = (len(header) - 1) // 2
        times, qs, vs = [], [], []
        for ln in lines[2:]:
            parts = [float(x) for x in ln.split(",")]
            if len(parts) != 1 + 2 * d:
                raise FormatError("trajectory csv: ragged row")
            times.append(parts[0])
            qs.append(parts[1:1 + d])
            vs.append(parts[1 + d:])
        if screen is None:
            kind = lines[0].split()[1].split("=", 1)[1]
            if kind == "linear":
                # reconstructible only for the builtin flat screens
                screen = flat_screen(d)
            elif kind == "quadratic_root":
                screen = sphere_screen(d)
            else:
                raise FormatError("trajectory csv: pass the screen explicitly")
        return cls(screen, times, qs, vs)


def integrate(screen, force, q0, v0, t_span, tol=1e-10, max_step=np.inf):
    """Integrate q'' = f(q) + lambda(q, q') q on the screen.

    The initial state is renormalized onto {h = 1, dh(v) = 0}; each accepted
    step is projected back as well, so the constraint drift stays at the
    tolerance scale.  Raises DomainExitError when the trajectory leaves the
    screen's validity domain and StepUnderflowError near force singularities.
    """
    q0 = np.asarray(q0, dtype=float)
    v0 = np.asarray(v0, dtype=float)
    if not screen.in_domain(q0):
        raise DomainExitError("initial point outside the validity domain", t_span[0])
    if isinstance(screen, CustomScreen):
        screen.validate_at(q0)
    if not screen.on_screen(q0, v0, 1e-6):
        raise ValueError("initial state too far from the screen's tangent bundle")
    q0, v0 = screen.project_state(q0, v0)
    d = screen.dim

    def rhs(t, y):
        q, v = y[:d], y[d:]
        if not screen.in_domain(q):
            raise DomainExitError("trajectory left the validity domain", t)
        fval = force(q)
        lam = radial_reaction(screen, q, v, fval)
        return np.concatenate([v, fval + lam * q])

    t0, t1 = float(t_span[0]), float(t_span[1])
    y = np.concatenate([q0, v0])
    t = t0
    k0 = rhs(t, y)
    # deterministic initial step from the standard scale heuristic
    scale = tol + tol * np.abs(y)
    d0 = math.sqrt(float(np.mean((y / scale) ** 2)))
    d1 = math.sqrt(float(np.mean((k0 / scale) ** 2)))
    h = 0.01 * d0 / d1 if d0 > 1e-5 and d1 > 1e-5 else 1e-6
    h = min(h, (t1 - t0) * 0.1, max_step)

    times = [t]
    qs = [y[:d].copy()]
    vs = [y[d:].copy()]
    derivs = [k0]
    min_h = max(abs(t1 - t0), 1.0) * 1e-14

    while t < t1:
        h = min(h, t1 - t)
        if h < min_h:
            raise StepUnderflowError(f"step size underflow at t = {t}", t)
        ks = [k0]
        try:
            for i in range(1, 7):
                yi = y + h * sum(a * k for a, k in zip(_DP_A[i], ks))
                ks.append(rhs(t + _DP_C[i] * h, yi))
        except DomainExitError:
            # retry with a shorter step; report only if hopeless
            h *= 0.5
            if h < min_h:
                raise
            continue
        y5 = y + h * sum(b * k for b, k in zip(_DP_B5, ks))
        y4 = y + h * sum(b * k for b, k in zip(_DP_B4, ks))
        scale = tol + tol * np.maximum(np.abs(y), np.abs(y5))
        err = math.sqrt(float(np.mean(((y5 - y4) / scale) ** 2)))
        if not math.isfinite(err) or not np.all(np.isfinite(y5)):
            # a stage hit a singularity; shrink hard instead of trusting err
            h *= 0.2
            if h < min_h:
                raise StepUnderflowError(f"state became non-finite at t = {t}", t)
            continue
        if err <= 1.0:
            t = t + h
            q, v = screen.project_state(y5[:d], y5[d:])
            y = np.concatenate([q, v])
            k0 = rhs(t, y)
            times.append(t)
            qs.append(q.copy())
            vs.append(v.copy())
            derivs.append(k0)
        factor = 0.9 * err ** -0.2 if err > 0.0 else 5.0
        h = min(h * min(5.0, max(0.2, factor)), max_step)

    traj = TrajectorySample(screen, times, qs, vs, derivs, tol=tol)
    traj.check_on_screen(10 * tol + 1e-14)
    return traj


# ---------------------------------------------------------------------------
# central projection between screens

def central_project_state(from_screen, to_screen, q, v):
    """Send (q, v) on the source screen to (Q, Q') on the target screen with
    Q = q / k(q) and Q' = k(q) v - dk(v) q, preserving q ^ v exactly."""
    q = np.asarray(q, dtype=float)
    v = np.asarray(v, dtype=float)
    k = to_screen.value(q)
    if not np.isfinite(k) or k <= 0.0 or not to_screen.in_domain(q):
        raise VisibilityError(f"point is not visible on the target screen (k = {k:.3e})")
    dk = to_screen.gradient(q)
    return q / k, k * v - (dk @ v) * q


def bivector_coords(q, v):
    """Upper-triangular coordinates of q ^ v."""
    q = np.asarray(q, dtype=float)
    v = np.asarray(v, dtype=float)
    d = len(q)
    return np.array([q[i] * v[j] - q[j] * v[i] for i in range(d) for j in range(i + 1, d)])


class ProjectionReport:
    def __init__(self, max_deviation, tol, compared, total, exit_time=None, target=None):
        self.max_deviation = max_deviation
        self.tol = tol
        self.compared = compared
        self.total = total
        self.exit_time = exit_time
        self.target = target

    @property
    def passed(self):
        return self.compared > 0 and self.max_deviation <= self.tol

    def to_json(self):
        return {
            "passed": bool(self.passed),
            "max_deviation": float(self.max_deviation),
            "tol": float(self.tol),
            "compared_samples": int(self.compared),
            "total_samples": int(self.total),
            "visibility_exit_time": None if self.exit_time is None else float(self.exit_time),
        }


def _distance_to_trajectory(point, traj, n_dense=2048):
    """Time-free distance from a point to the interpolated position curve.

    The coarse scan can have several local minima (closed orbits pass near
    themselves), so every coarse local minimum is refined and the best wins.
    """
    ts = np.linspace(traj.times[0], traj.times[-1], n_dense)
    d = traj.qs.shape[1]
    states = np.array([traj.interpolate(t)[:d] for t in ts])
    dist = np.linalg.norm(states - point, axis=1)
    candidates = {0, n_dense - 1}
    for k in range(1, n_dense - 1):
        if dist[k] <= dist[k - 1] and dist[k] <= dist[k + 1]:
            candidates.add(k)

    def f(t):
        return float(np.linalg.norm(traj.interpolate(t)[:d] - point))

    best = math.inf
    for k in sorted(candidates):
        lo = ts[max(k - 1, 0)]
        hi = ts[min(k + 1, n_dense - 1)]
        for _ in range(80):  # ternary search on the bracket
            m1 = lo + (hi - lo) / 3
            m2 = hi - (hi - lo) / 3
            if f(m1) <= f(m2):
                hi = m2
            else:
                lo = m1
        best = min(best, f(0.5 * (lo + hi)))
    return best


def verify_projection(traj, to_screen, force, tol=1e-6, time_margin=0.05):
    """Project every sample to the target screen, re-integrate there from the
    projected initial state, and measure the worst time-free distance from
    projected samples to the re-integrated curve.

    The target time span comes from quadrature of the time-change rate
    b^2 = k(q)^-2 along the source samples.  Visibility loss mid-trajectory
    truncates the comparison and is reported.
    """
    projected = []
    exit_time = None
    for t, (q, v) in zip(traj.times, zip(traj.qs, traj.vs)):
        try:
            projected.append(central_project_state(traj.screen, to_screen, q, v))
        except VisibilityError:
            exit_time = t
            break
    total = len(traj.times)
    if not projected:
        return ProjectionReport(math.inf, tol, 0, total, exit_time)
    n_ok = len(projected)
    rates = np.array([to_screen.value(q) ** -2 for q in traj.qs[:n_ok]])
    trapezoid = getattr(np, "trapezoid", np.trapz)
    span = float(trapezoid(rates, traj.times[:n_ok])) * (1.0 + time_margin) + 1e-12
    Q0, V0 = projected[0]
    target = integrate(to_screen, force, Q0, V0, (0.0, span), tol=min(traj.tol, 1e-11))
    worst = 0.0
    for Q, _ in projected:
        worst = max(worst, _distance_to_trajectory(np.asarray(Q), target))
    return ProjectionReport(worst, tol, n_ok, total, exit_time, target=target)


# ---------------------------------------------------------------------------
# scenarios

def scenario_from_json(obj):
    """{"screen": {...}, "force": {...}, "q0": [...], "v0": [...],
    "t_span": [t0, t1], "tol": 1e-10} -> dict of constructed pieces."""
    for key in ("screen", "force", "q0", "v0", "t_span"):
        if key not in obj:
            raise FormatError(f"scenario: missing key {key!r}")
    screen = screen_from_json(obj["screen"])
    force = force_from_json(obj["force"], screen.dim)
    q0 = [float(x) for x in obj["q0"]]
    v0 = [float(x) for x in obj["v0"]]
    if len(q0) != screen.dim or len(v0) != screen.dim:
        raise FormatError("scenario: q0/v0 length does not match the screen dimension")
    t_span = (float(obj["t_span"][0]), float(obj["t_span"][1]))
    tol = float(obj.get("tol", 1e-10))
    return {"screen": screen, "force": force, "q0": q0, "v0": v0, "t_span": t_span, "tol": tol}

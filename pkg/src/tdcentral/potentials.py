"""The two integrable families of time-dependent central potentials.

Family with a linear first integral (profile g2(t) != 0, free g(t)):

    V(t,r) = -(g2''/2g2) r^2 + (g'/g2) r - L3^2/(2r^2)

Family with a quadratic first integral (profile g1(t) > 0, g2(t), shape F):

    V(t,r) = [ (g1'/g1)^2/8 - g1''/(4g1) ] r^2
             + (1/2g1) (g2' - g2 g1'/(2g1)) r
             + (1/2g1) F(s) - L3^2/(2r^2),
    s(t,r) = g1^{-1/2} r + (1/2) int_{t0}^{t} g1^{-3/2} g2 dtau.

Both expose the effective potential U = V + L3^2/(2r^2) (the centrifugal
term cancels exactly for these families) and the exact partial derivatives
that the residual checks and the integrator need, plus the auxiliary
function K(t,r) entering the quadratic invariant.  All time profiles are
ScalarFn trees, so every partial is evaluated from an exact derivative
tree rather than finite differences.

A one-dimensional companion system (LewisLeach1d) with

    U(t,q) = (1/2) Omega^2 q^2 - F1 q + rho^{-2} Gt((q - alpha)/rho)

is included; its profiles must satisfy the Ermakov-Pinney pair checked by
`ermakov_residuals`.

`preset(name, ...)` builds the named physical instances (oscillator,
generalized Kepler, shrinking/expanding Kepler orbit family, variable-mass
binary, screened Coulomb, pair potential, ...) on top of the two families.
"""

from __future__ import annotations

import inspect
import math
from dataclasses import dataclass

import numpy as np

from . import scalarfn as sf
from .errors import DomainError, InvalidParameters, UnknownPreset
from .scalarfn import ScalarFn, as_fn

__all__ = [
    "FamilyA", "FamilyB", "LewisLeach1d", "Preset",
    "potential_A", "potential_B", "dV_dr", "d2V_dr2", "d2V_dtdr",
    "effective_potential_U", "preset", "catalog", "ermakov_residuals",
    "mass_profile", "classify_mass_profile", "omega_profile",
    "oscillator_shape", "kepler_shape", "scaled_kepler_shape",
    "yukawa_shape", "interatomic_shape",
]

_U = sf.T  # shape functions are trees over their own single argument


def _check_radius(r):
    bad = (r <= 0.0) if isinstance(r, (int, float)) else bool(np.any(np.asarray(r) <= 0.0))
    if bad:
        raise DomainError("radius must be positive")


class _CentralFamily:
    """Shared V/U wiring: V = U - L3^2/(2 r^2), partials accordingly."""

    radial = True  # coordinate restricted to r > 0

    def _guard(self, r):
        if self.radial:
            _check_radius(r)

    def V(self, t, r):
        self._guard(r)
        c = 0.5 * self.L3**2
        return self.U(t, r) - c * r**-2 if c else self.U(t, r)

    def dV_dr(self, t, r):
        self._guard(r)
        c = self.L3**2
        return self.dU_dr(t, r) + c * r**-3 if c else self.dU_dr(t, r)

    def d2V_dr2(self, t, r):
        self._guard(r)
        c = 3.0 * self.L3**2
        return self.d2U_dr2(t, r) - c * r**-4 if c else self.d2U_dr2(t, r)

    def d2V_dtdr(self, t, r):
        self._guard(r)
        return self.d2U_dtdr(t, r)


class FamilyA(_CentralFamily):
    """Potential admitting a linear invariant g2*rdot - g2'*r + g.

    g2 must not vanish on the working interval; evaluation raises
    DomainError at a zero of g2 whenever a division by g2 survives in the
    coefficient trees (a zero numerator folds to the exact zero limit).
    """

    kind = "linear-invariant"

    def __init__(self, g2, g=0.0, L3: float = 0.0, label: str = "family-a"):
        self.g2 = as_fn(g2)
        self.g = as_fn(g)
        self.L3 = float(L3)
        self.label = label
        # uniform protocol with the quadratic family: g1 identically zero
        self.g1 = sf.const(0.0)
        self.g1_d = sf.const(0.0)
        self.g1_dd = sf.const(0.0)
        self.g1_ddd = sf.const(0.0)
        self.g2_d = self.g2.d()
        self.g2_dd = self.g2_d.d()
        self.g_d = self.g.d()
        # U = a2(t) r^2 + a1(t) r
        self._a2 = sf.mul(-0.5, sf.div(self.g2_dd, self.g2))
        self._a1 = sf.div(self.g_d, self.g2)
        self._a2_d = self._a2.d()
        self._a1_d = self._a1.d()

    def U(self, t, r):
        self._guard(r)
        return self._a2(t) * r * r + self._a1(t) * r

    def dU_dr(self, t, r):
        self._guard(r)
        return 2.0 * self._a2(t) * r + self._a1(t)

    def d2U_dr2(self, t, r):
        self._guard(r)
        return 2.0 * self._a2(t) + 0.0 * r

    def d2U_dtdr(self, t, r):
        self._guard(r)
        return 2.0 * self._a2_d(t) * r + self._a1_d(t)

    def K(self, t, r):
        return -self.g2_d(t) * r + self.g(t)

    def dK_dr(self, t, r):
        return -self.g2_d(t) + 0.0 * r

    def dK_dt(self, t, r):
        return -self.g2_dd(t) * r + self.g_d(t)


class FamilyB(_CentralFamily):
    """Potential admitting a quadratic invariant, built from g1 > 0, g2, F.

    t0 fixes the lower limit of the profile integral entering the shape
    argument s(t,r); shifting t0 shifts s by a constant absorbable into F.
    """

    kind = "quadratic-invariant"

    def __init__(self, g1, g2=0.0, F=0.0, L3: float = 0.0, t0: float = 0.0,
                 quad: sf.QuadratureConfig | None = None, label: str = "family-b"):
        self.g1 = as_fn(g1)
        self.g2 = as_fn(g2)
        self.F = as_fn(F)
        self.L3 = float(L3)
        self.t0 = float(t0)
        self.label = label
        self.g1_d = self.g1.d()
        self.g1_dd = self.g1_d.d()
        self.g1_ddd = self.g1_dd.d()
        self.g2_d = self.g2.d()
        self.g2_dd = self.g2_d.d()
        self.F_d = self.F.d()
        self.F_dd = self.F_d.d()
        # U = A(t) r^2 + B(t) r + C(t) F(s),  s = P(t) r + Q(t)
        ratio = sf.div(self.g1_d, self.g1)
        self._A = sf.sub(sf.mul(0.125, sf.power(ratio, 2)),
                         sf.div(self.g1_dd, sf.mul(4.0, self.g1)))
        self._B = sf.div(sf.sub(self.g2_d,
                                sf.div(sf.mul(self.g2, self.g1_d), sf.mul(2.0, self.g1))),
                         sf.mul(2.0, self.g1))
        self._C = sf.div(1.0, sf.mul(2.0, self.g1))
        self._P = sf.power(self.g1, -0.5)
        self._Q = sf.antiderivative(
            sf.mul(0.5, sf.power(self.g1, -1.5), self.g2), self.t0, quad)
        self._A_d = self._A.d()
        self._B_d = self._B.d()
        self._C_d = self._C.d()
        self._P_d = self._P.d()
        self._Q_d = self._Q.d()

    def arg(self, t, r):
        """Shape-function argument s(t,r)."""
        return self._P(t) * r + self._Q(t)

    def U(self, t, r):
        self._guard(r)
        return self._A(t) * r * r + self._B(t) * r + self._C(t) * self.F(self.arg(t, r))

    def dU_dr(self, t, r):
        self._guard(r)
        return 2.0 * self._A(t) * r + self._B(t) \
            + self._C(t) * self.F_d(self.arg(t, r)) * self._P(t)

    def d2U_dr2(self, t, r):
        self._guard(r)
        return 2.0 * self._A(t) + self._C(t) * self.F_dd(self.arg(t, r)) * self._P(t)**2

    def d2U_dtdr(self, t, r):
        self._guard(r)
        s = self.arg(t, r)
        st = self._P_d(t) * r + self._Q_d(t)  # ds/dt at fixed r
        return (2.0 * self._A_d(t) * r + self._B_d(t)
                + self._C_d(t) * self.F_d(s) * self._P(t)
                + self._C(t) * self.F_dd(s) * st * self._P(t)
                + self._C(t) * self.F_d(s) * self._P_d(t))

    def K(self, t, r):
        w = self.g1_d(t) * r - self.g2(t)
        return self.F(self.arg(t, r)) + w * w / (4.0 * self.g1(t))

    def dK_dr(self, t, r):
        w = self.g1_d(t) * r - self.g2(t)
        return self.F_d(self.arg(t, r)) * self._P(t) + w * self.g1_d(t) / (2.0 * self.g1(t))

    def dK_dt(self, t, r):
        g1 = self.g1(t)
        w = self.g1_d(t) * r - self.g2(t)
        st = self._P_d(t) * r + self._Q_d(t)
        return (self.F_d(self.arg(t, r)) * st
                + w * (self.g1_dd(t) * r - self.g2_d(t)) / (2.0 * g1)
                - w * w * self.g1_d(t) / (4.0 * g1 * g1))


class LewisLeach1d(_CentralFamily):
    """One-dimensional oscillator-type system with a quadratic invariant.

    U(t,q) = (1/2) Omega^2 q^2 - F1 q + rho^{-2} G((q-alpha)/rho); the
    profiles must satisfy the Ermakov-Pinney conditions (see
    ermakov_residuals) for the invariant to be conserved.  The bracket in
    the invariant is sometimes written with the profile rate rho' where
    only the coordinate rate q' keeps it conserved; `fi` uses the
    conserved q' reading and `fi_profile_rate` keeps the profile-rate
    variant for comparison.
    """

    kind = "lewis-leach-1d"
    radial = False

    def __init__(self, rho, alpha=0.0, Omega=0.0, F1=0.0, G=0.0, k: float = 0.0,
                 label: str = "lewis-leach"):
        self.rho = as_fn(rho)
        self.alpha = as_fn(alpha)
        self.Omega = as_fn(Omega)
        self.F1 = as_fn(F1)
        self.G = as_fn(G)
        self.k = float(k)
        self.L3 = 0.0
        self.label = label
        self.rho_d = self.rho.d()
        self.alpha_d = self.alpha.d()
        self.G_d = self.G.d()
        self.G_dd = self.G_d.d()
        self._om2 = sf.power(self.Omega, 2)
        self._om2_d = self._om2.d()
        self._inv_rho = sf.div(1.0, self.rho)
        self._inv_rho2 = sf.power(self.rho, -2)
        self._inv_rho3 = sf.power(self.rho, -3)
        self._inv_rho3_d = self._inv_rho3.d()
        self._woff = sf.neg(sf.div(self.alpha, self.rho))  # w = q/rho + woff
        self._inv_rho_d = self._inv_rho.d()
        self._woff_d = self._woff.d()

    def warg(self, t, q):
        return self._inv_rho(t) * q + self._woff(t)

    def U(self, t, q):
        return (0.5 * self._om2(t) * q * q - self.F1(t) * q
                + self._inv_rho2(t) * self.G(self.warg(t, q)))

    def dU_dr(self, t, q):
        return self._om2(t) * q - self.F1(t) + self._inv_rho3(t) * self.G_d(self.warg(t, q))

    def d2U_dr2(self, t, q):
        return self._om2(t) + self._inv_rho3(t) * self.G_dd(self.warg(t, q)) * self._inv_rho(t)

    def d2U_dtdr(self, t, q):
        w = self.warg(t, q)
        wt = self._inv_rho_d(t) * q + self._woff_d(t)
        return (self._om2_d(t) * q - self.F1.d()(t)
                + self._inv_rho3_d(t) * self.G_d(w)
                + self._inv_rho3(t) * self.G_dd(w) * wt)

    def fi(self, t, q, qdot):
        """Conserved invariant (coordinate-rate reading of the bracket)."""
        w = self.warg(t, q)
        bracket = self.rho(t) * (qdot - self.alpha_d(t)) - self.rho_d(t) * (q - self.alpha(t))
        return 0.5 * bracket**2 + 0.5 * self.k * w * w + self.G(w)

    def fi_profile_rate(self, t, q, qdot):
        """Literal variant with the profile rate in the bracket; not conserved."""
        w = self.warg(t, q)
        bracket = self.rho(t) * (self.rho_d(t) - self.alpha_d(t)) \
            - self.rho_d(t) * (q - self.alpha(t))
        return 0.5 * bracket**2 + 0.5 * self.k * w * w + self.G(w)


def ermakov_residuals(rho, alpha, Omega, F1, k: float, t):
    """Residuals of the two profile conditions of the 1d system.

    Returns (rho'' + Omega^2 rho - k/rho^3, alpha'' + Omega^2 alpha - F1)
    at time t; both vanish for admissible profiles.
    """
    rho = as_fn(rho)
    alpha = as_fn(alpha)
    Omega = as_fn(Omega)
    F1 = as_fn(F1)
    rv = rho(t)
    bad = (rv == 0.0) if isinstance(rv, float) else bool(np.any(rv == 0.0))
    if bad:
        raise DomainError("rho vanishes at the requested time")
    om2 = Omega(t) ** 2
    res1 = rho.d().d()(t) + om2 * rv - k / rv**3
    res2 = alpha.d().d()(t) + om2 * alpha(t) - F1(t)
    return res1, res2


# ---------------------------------------------------------------------------
# module-level operations (thin, type-checked views of the family methods)
# ---------------------------------------------------------------------------

def potential_A(fam: FamilyA, t, r):
    if not isinstance(fam, FamilyA):
        raise TypeError("potential_A expects a linear-invariant family")
    return fam.V(t, r)


def potential_B(fam: FamilyB, t, r):
    if not isinstance(fam, FamilyB):
        raise TypeError("potential_B expects a quadratic-invariant family")
    return fam.V(t, r)


def dV_dr(fam, t, r):
    return fam.dV_dr(t, r)


def d2V_dr2(fam, t, r):
    return fam.d2V_dr2(t, r)


def d2V_dtdr(fam, t, r):
    return fam.d2V_dtdr(t, r)


def effective_potential_U(fam, t, r):
    return fam.U(t, r)


# ---------------------------------------------------------------------------
# shape functions (single-argument trees over u)
# ---------------------------------------------------------------------------

_POS = (0.0, math.inf)


def _inv_power(p: float) -> ScalarFn:
    return sf.power(_U, -float(p), _POS)


def oscillator_shape(c0: float, L3: float) -> ScalarFn:
    """F(u) = (c0/2) u^2 + L3^2 u^{-2}."""
    return sf.add(sf.mul(0.5 * c0, sf.power(_U, 2)), sf.mul(L3**2, _inv_power(2)))


def kepler_shape(nu: float, k: float, b0: float, b1: float, b2: float,
                 L3: float) -> ScalarFn:
    """Shape reproducing -omega_nu(t)/r^nu with quadratic profile g1 = G/2."""
    k1 = 0.5 * b0 * b2 - b1**2 / 8.0
    return sf.add(sf.mul(0.5 * k1, sf.power(_U, 2)),
                  sf.mul(-k * 2.0 ** (0.5 * nu), _inv_power(nu)),
                  sf.mul(L3**2, _inv_power(2)))


def scaled_kepler_shape(k: float) -> ScalarFn:
    """F(u) = -k sqrt(2)/u; the orbit family's shape (no centrifugal part)."""
    return sf.mul(-k * math.sqrt(2.0), _inv_power(1))


def yukawa_shape(k: float, c1: float, L3: float) -> ScalarFn:
    """F(u) = -(c1/4) u^2 + L3^2 u^{-2} + 2k e^{-u}/u."""
    return sf.add(sf.mul(-0.25 * c1, sf.power(_U, 2)),
                  sf.mul(L3**2, _inv_power(2)),
                  sf.div(sf.mul(2.0 * k, sf.exp(sf.neg(_U))), _U, _POS))


def interatomic_shape(k1: float, k2: float, m: float, n: float, c1: float,
                      L3: float) -> ScalarFn:
    """F(u) = -(c1/4) u^2 + L3^2 u^{-2} + 2 k1 u^{-m} - 2 k2 u^{-n}."""
    return sf.add(sf.mul(-0.25 * c1, sf.power(_U, 2)),
                  sf.mul(L3**2, _inv_power(2)),
                  sf.mul(2.0 * k1, _inv_power(m)),
                  sf.mul(-2.0 * k2, _inv_power(n)))


# ---------------------------------------------------------------------------
# profile helpers for the variable-mass binary
# ---------------------------------------------------------------------------

def omega_profile(nu: float, k: float, b0: float, b1: float, b2: float) -> ScalarFn:
    """omega_nu(t) = k (b0 + b1 t + b2 t^2)^{(nu-2)/2}."""
    quad = sf.poly(b0, b1, b2)
    return sf.mul(k, sf.power(quad, 0.5 * (nu - 2.0)))


def mass_profile(b0: float, b1: float, b2: float) -> ScalarFn:
    """m(t) = (b0 + b1 t + b2 t^2)^{-1/2}."""
    return sf.power(sf.poly(b0, b1, b2), -0.5)


def classify_mass_profile(b0: float, b1: float, b2: float, tol: float = 1e-12) -> str:
    """Which degenerate form the mass law takes."""
    if abs(b2) <= tol and abs(b1) <= tol:
        return "constant"
    disc = b1 * b1 - 4.0 * b0 * b2
    if abs(b2) <= tol:
        return "inverse-sqrt-linear"
    if abs(disc) <= tol:
        return "inverse-linear"
    return "inverse-sqrt-quadratic"


# ---------------------------------------------------------------------------
# presets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Preset:
    name: str
    family: object
    params: dict
    description: str


def _positive_quadratic(b0, b1, b2, interval, what):
    """Exact positivity check of b0 + b1 t + b2 t^2 on [lo, hi]."""
    lo, hi = interval
    q = lambda t: b0 + b1 * t + b2 * t * t
    worst = min(q(lo), q(hi))
    if b2 != 0.0:
        tv = -b1 / (2.0 * b2)
        if lo <= tv <= hi and b2 > 0.0:
            worst = min(worst, q(tv))
        if b2 < 0.0:
            # concave: endpoints are the minimum, already covered
            pass
    if worst <= 0.0:
        raise InvalidParameters(
            f"{what}: b0 + b1 t + b2 t^2 must stay positive on {interval}")


def _positive_fn(f: ScalarFn, interval, what, n=65):
    lo, hi = interval
    ts = np.linspace(lo, hi, n)
    try:
        vals = f(ts)
    except DomainError as e:
        raise InvalidParameters(f"{what}: profile invalid on {interval}: {e}") from e
    if np.any(np.asarray(vals) <= 0.0):
        raise InvalidParameters(f"{what}: profile must stay positive on {interval}")


def _nonzero_fn(f: ScalarFn, interval, what, n=65):
    lo, hi = interval
    ts = np.linspace(lo, hi, n)
    try:
        vals = np.asarray(f(ts))
    except DomainError as e:
        raise InvalidParameters(f"{what}: profile invalid on {interval}: {e}") from e
    if np.any(vals == 0.0) or np.any(vals[:-1] * vals[1:] < 0.0):
        raise InvalidParameters(f"{what}: profile must not vanish on {interval}")


def _build_free_particle(L3=0.0, **_):
    return FamilyA(1.0, 0.0, L3, label="free-particle")


def _build_linear_lfi(g2="(poly 1 0 0.1)", g="0", L3=0.0, interval=(0.0, 10.0)):
    fam = FamilyA(g2, g, L3, label="linear-lfi")
    _nonzero_fn(fam.g2, interval, "linear-lfi")
    return fam


def _build_oscillator(g1="(poly 1 0 1)", c0=0.0, L3=0.0, interval=(0.0, 10.0)):
    g1 = as_fn(g1)
    _positive_fn(g1, interval, "oscillator")
    return FamilyB(g1, 0.0, oscillator_shape(c0, L3), L3, label="oscillator")


def _build_generalized_kepler(nu=1.0, k=1.0, b0=1.0, b1=0.0, b2=0.0, L3=0.0,
                              interval=(0.0, 10.0), label="generalized-kepler"):
    _positive_quadratic(b0, b1, b2, interval, label)
    g1 = sf.poly(0.5 * b0, 0.5 * b1, 0.5 * b2)
    return FamilyB(g1, 0.0, kepler_shape(nu, k, b0, b1, b2, L3), L3, label=label)


def _build_scaled_kepler(phi="(sqrt (poly 1 0 1))", k=1.0, L3=0.0,
                         interval=(0.0, 10.0)):
    phi = as_fn(phi)
    _positive_fn(phi, interval, "scaled-kepler")
    g1 = sf.mul(0.5, sf.power(phi, 2))
    return FamilyB(g1, 0.0, scaled_kepler_shape(k), L3, label="scaled-kepler")


def _build_binary(G=1.0, b0=1.0, b1=0.0, b2=0.0, L3=0.0, interval=(0.0, 10.0)):
    return _build_generalized_kepler(1.0, G, b0, b1, b2, L3, interval, label="binary")


def _build_yukawa(k=1.0, b0=1.0, b1=0.0, b2=0.0, L3=0.0, interval=(0.0, 10.0)):
    _positive_quadratic(b0, b1, b2, interval, "yukawa")
    c1 = b1 * b1 - 4.0 * b2 * b0
    g1 = sf.poly(b0, b1, b2)
    return FamilyB(g1, 0.0, yukawa_shape(k, c1, L3), L3, label="yukawa")


def _build_interatomic(k1=1.0, k2=1.0, m=12.0, n=6.0, b0=1.0, b1=0.0, b2=0.0,
                       L3=0.0, interval=(0.0, 10.0)):
    if m <= 0 or n <= 0:
        raise InvalidParameters("interatomic: exponents m, n must be positive")
    _positive_quadratic(b0, b1, b2, interval, "interatomic")
    c1 = b1 * b1 - 4.0 * b2 * b0
    g1 = sf.poly(b0, b1, b2)
    return FamilyB(g1, 0.0, interatomic_shape(k1, k2, m, n, c1, L3), L3,
                   label="interatomic")


def _build_lewis_leach(rho="(sqrt (poly 1 0 1))", alpha="0", Omega="0", F1="0",
                       G="(* 0.5 (pow t -2 0 inf))", k=1.0, interval=(0.0, 10.0)):
    fam = LewisLeach1d(rho, alpha, Omega, F1, G, k)
    _positive_fn(fam.rho, interval, "lewis-leach")
    return fam


_REGISTRY = {
    "free-particle": (
        _build_free_particle,
        "no force; pure centrifugal V = -L3^2/(2r^2) with a conserved radial momentum",
    ),
    "linear-lfi": (
        _build_linear_lfi,
        "general linear-invariant family: V = -(g2''/2g2) r^2 + (g'/g2) r - L3^2/(2r^2)",
    ),
    "oscillator": (
        _build_oscillator,
        "time-dependent harmonic r^2 potential driven by a positive profile g1(t)",
    ),
    "generalized-kepler": (
        _build_generalized_kepler,
        "power-law potential -omega(t)/r^nu with omega = k (b0+b1 t+b2 t^2)^{(nu-2)/2}",
    ),
    "scaled-kepler": (
        _build_scaled_kepler,
        "Kepler potential -k/(phi r) plus an r^2 term from the scale profile phi(t)",
    ),
    "binary": (
        _build_binary,
        "two-body problem with variable mass m(t) = (b0+b1 t+b2 t^2)^{-1/2}, V = -G m(t)/r",
    ),
    "yukawa": (
        _build_yukawa,
        "screened Coulomb potential k e^{-r/sqrt(g1)}/(sqrt(g1) r) with quadratic g1(t)",
    ),
    "interatomic": (
        _build_interatomic,
        "pair potential k1 g1^{(m-2)/2}/r^m - k2 g1^{(n-2)/2}/r^n (Lennard-Jones at 12,6)",
    ),
    "lewis-leach": (
        _build_lewis_leach,
        "1d oscillator-type system with Ermakov-Pinney profiles and a quadratic invariant",
    ),
}


def preset(name: str, **params) -> Preset:
    """Instantiate a named preset; raises UnknownPreset / InvalidParameters."""
    try:
        builder, description = _REGISTRY[name]
    except KeyError:
        raise UnknownPreset(name) from None
    sig = inspect.signature(builder)
    accepts_any = any(p.kind == p.VAR_KEYWORD for p in sig.parameters.values())
    if not accepts_any:
        unknown = set(params) - set(sig.parameters)
        if unknown:
            raise InvalidParameters(f"{name}: unknown parameters {sorted(unknown)}")
    family = builder(**params)
    echo = dict(params)
    return Preset(name, family, echo, description)


def catalog() -> list[tuple[str, str]]:
    """(name, description) pairs for every registered preset."""
    return [(name, desc) for name, (_, desc) in sorted(_REGISTRY.items())]

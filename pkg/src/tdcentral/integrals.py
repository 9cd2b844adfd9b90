"""First-integral evaluators on the extended phase space.

Each family carries a conserved quantity along its own dynamics:

    linear:     I = g2 rdot - g2' r + g
    quadratic:  I = g1 rdot^2 + (g2 - g1' r) rdot + F(s) + (g1' r - g2)^2/(4 g1)
    power-law:  J = G [ (rdot^2 + r^2 thdot^2)/2 - omega/r^nu ]
                    - (G'/2) r rdot + (b2/2) r^2,  G = b0 + b1 t + b2 t^2
    scale-oscillator: I = (phi rdot - phi' r)^2/2 + r^2 phi^2 thdot^2/2
                    + K r^2/(2 phi^2)
    1d (Lewis-Leach type): I = [rho(qdot - alpha') - rho'(q - alpha)]^2/2
                    + (k/2) w^2 + G(w),  w = (q - alpha)/rho

plus the angular momentum L3 = r^2 thdot and the reduced energy
rdot^2/2 + U(t,r).  Polar forms take thetadot explicitly; reduced forms
bind L3 and eliminate thetadot via thetadot = L3/r^2.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .errors import DomainError
from .potentials import FamilyA, FamilyB, LewisLeach1d, omega_profile
from .scalarfn import as_fn

__all__ = [
    "lfi_A", "qfi_B", "j_nu", "j_nu_reduced", "scale_oscillator",
    "scale_oscillator_reduced", "lewis_leach", "angular_momentum",
    "reduced_energy", "FirstIntegral", "first_integral",
    "j_nu_integral", "scale_oscillator_integral", "angular_momentum_integral",
    "reduced_energy_integral",
]


def lfi_A(fam: FamilyA, t, r, rdot):
    """Linear invariant of the g2/g family."""
    return fam.g2(t) * rdot - fam.g2_d(t) * r + fam.g(t)


def qfi_B(fam: FamilyB, t, r, rdot):
    """Quadratic invariant of the g1/g2/F family (same s(t,r) as the potential)."""
    g1 = fam.g1(t)
    w = fam.g1_d(t) * r - fam.g2(t)
    return (g1 * rdot * rdot + (fam.g2(t) - fam.g1_d(t) * r) * rdot
            + fam.F(fam.arg(t, r)) + w * w / (4.0 * g1))


def j_nu(nu: float, k: float, b0: float, b1: float, b2: float,
         t, r, rdot, thetadot):
    """Power-law-family invariant, polar form (takes thetadot)."""
    G = b0 + b1 * t + b2 * t * t
    omega = omega_profile(nu, k, b0, b1, b2)(t)
    return (G * (0.5 * (rdot * rdot + r * r * thetadot * thetadot)
                 - omega * r ** (-float(nu)))
            - 0.5 * (b1 + 2.0 * b2 * t) * r * rdot + 0.5 * b2 * r * r)


def j_nu_reduced(nu: float, k: float, b0: float, b1: float, b2: float,
                 L3: float, t, r, rdot):
    """Power-law-family invariant with thetadot eliminated via L3 = r^2 thetadot."""
    G = b0 + b1 * t + b2 * t * t
    omega = omega_profile(nu, k, b0, b1, b2)(t)
    return (G * (0.5 * (rdot * rdot + L3 * L3 * r**-2)
                 - omega * r ** (-float(nu)))
            - 0.5 * (b1 + 2.0 * b2 * t) * r * rdot + 0.5 * b2 * r * r)


def scale_oscillator(phi, K: float, t, r, rdot, thetadot):
    """Oscillator invariant built from a scale profile, polar form."""
    phi = as_fn(phi)
    pv = phi(t)
    if (pv == 0.0) if isinstance(pv, float) else bool((pv == 0.0).any()):
        raise DomainError("scale profile vanishes at the requested time")
    pd = phi.d()(t)
    return (0.5 * (pv * rdot - pd * r) ** 2
            + 0.5 * r * r * pv * pv * thetadot * thetadot
            + 0.5 * K * r * r / (pv * pv))


def scale_oscillator_reduced(phi, K: float, L3: float, t, r, rdot):
    """Oscillator invariant with thetadot eliminated via L3."""
    phi = as_fn(phi)
    pv = phi(t)
    if (pv == 0.0) if isinstance(pv, float) else bool((pv == 0.0).any()):
        raise DomainError("scale profile vanishes at the requested time")
    pd = phi.d()(t)
    return (0.5 * (pv * rdot - pd * r) ** 2
            + 0.5 * pv * pv * L3 * L3 * r**-2
            + 0.5 * K * r * r / (pv * pv))


def lewis_leach(fam: LewisLeach1d, t, q, qdot):
    """Invariant of the 1d system (conserved coordinate-rate reading)."""
    return fam.fi(t, q, qdot)


def angular_momentum(r, thetadot):
    """L3 = r^2 thetadot."""
    return r * r * thetadot


def reduced_energy(fam, t, r, rdot):
    """rdot^2/2 + U(t,r); conserved only for autonomous instances."""
    return 0.5 * rdot * rdot + fam.U(t, r)


@dataclass(frozen=True)
class FirstIntegral:
    """A bound, pure evaluator. `arity` documents the expected arguments:
    "t-r-rdot" for radial-state integrals, "r-thetadot" for angular momentum.
    """

    kind: str
    label: str
    fn: Callable
    arity: str = "t-r-rdot"

    def __call__(self, *state):
        return self.fn(*state)


def first_integral(fam) -> FirstIntegral:
    """The invariant that the family's own dynamics conserves.

    Dispatch is on the `kind` protocol string so that wrappers which
    delegate the underlying profiles (negative controls) evaluate the base
    family's candidate invariant along their own dynamics.
    """
    kind = getattr(fam, "kind", None)
    if kind == "linear-invariant":
        return FirstIntegral("linear-invariant", fam.label,
                             lambda t, r, rd: lfi_A(fam, t, r, rd))
    if kind == "quadratic-invariant":
        return FirstIntegral("quadratic-invariant", fam.label,
                             lambda t, r, rd: qfi_B(fam, t, r, rd))
    if kind == "lewis-leach-1d":
        return FirstIntegral("lewis-leach-invariant", fam.label, fam.fi)
    raise TypeError(f"no first integral known for {type(fam).__name__}")


def j_nu_integral(nu, k, b0, b1, b2, L3) -> FirstIntegral:
    return FirstIntegral(
        "power-law-invariant", f"j_nu(nu={nu})",
        lambda t, r, rd: j_nu_reduced(nu, k, b0, b1, b2, L3, t, r, rd))


def scale_oscillator_integral(phi, K, L3) -> FirstIntegral:
    phi = as_fn(phi)
    return FirstIntegral(
        "scale-oscillator-invariant", "scale-oscillator",
        lambda t, r, rd: scale_oscillator_reduced(phi, K, L3, t, r, rd))


def angular_momentum_integral() -> FirstIntegral:
    return FirstIntegral("angular-momentum", "angular-momentum",
                         angular_momentum, arity="r-thetadot")


def reduced_energy_integral(fam) -> FirstIntegral:
    return FirstIntegral("reduced-energy", fam.label,
                         lambda t, r, rd: reduced_energy(fam, t, r, rd))

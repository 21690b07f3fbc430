"""Dirichlet-energy gradient flow for torus-to-torus maps in a Fourier family.

Maps are ``z + sum c_{jk} exp(2 pi i (j x + k y))`` on the square torus.
The L^2 gradient of the energy is ``-tau(f)``; steps follow ``tau`` with
Armijo backtracking.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .constructions import torus_fourier_map
from .errors import StiffnessError, UnsupportedClassError
from .operators import bosonic_action, tension
from .quadrature import torus_rule

ARMIJO = 1e-4
MAX_BACKTRACKS = 30


@dataclass
class FlowState:
    coeffs: dict
    energy: float
    step: int
    grad_norm: float
    time: float = 0.0

    @property
    def map(self):
        return torus_fourier_map(self.coeffs)


@dataclass
class FlowResult:
    states: list
    accepted: int
    backtracks: int
    monotone: bool
    decay_rate: float | None = None
    meta: dict = field(default_factory=dict)

    @property
    def final(self):
        return self.states[-1]


def _modes(coeffs):
    return sorted(coeffs)


def _grid(coeffs):
    kmax = max([max(abs(j), abs(k)) for j, k in coeffs] + [1])
    return 8 * kmax + 8


def energy(f, n=None):
    """(1/2) int |df|^2 dvol on the torus with a periodic rule resolving the map's modes."""
    coeffs = f.meta.get("coeffs", {})
    return bosonic_action(f, torus_rule(f.source, n or _grid(coeffs)))


def tension_coeffs(coeffs, n=None):
    """Fourier coefficients of tau(f) on the family's modes, and its L^2 norm."""
    f = torus_fourier_map(coeffs)
    n = n or _grid(coeffs)
    rule = torus_rule(f.source, n)
    z = rule.points
    tau = tension(f, z)[0]
    x, y = z.real, z.imag
    out = {}
    for j, k in _modes(coeffs):
        out[(j, k)] = complex(np.mean(tau * np.exp(-2j * np.pi * (j * x + k * y))))
    # |tau|_g^2 = |zeta|^2 for the flat metric with M = 1/2
    norm = float(np.sqrt(rule.integrate(np.abs(tau) ** 2)))
    return out, norm


def flow_run(coeffs: dict, steps=200, tol=1e-10, dt0=None, target_energy=None) -> FlowResult:
    """Explicit gradient steps c <- c + dt tau(c) with Armijo backtracking."""
    coeffs = {tuple(k): complex(v) for k, v in coeffs.items()}
    if any(k == (0, 0) for k in coeffs):
        raise UnsupportedClassError("the constant mode is a translation; leave it out of the family")
    kmax2 = max([j * j + k * k for j, k in coeffs] + [1])
    if dt0 is None:
        dt0 = 0.1 / (4 * np.pi**2 * kmax2)
    f = torus_fourier_map(coeffs)
    E = energy(f)
    tau, gn = tension_coeffs(coeffs)
    states = [FlowState(dict(coeffs), E, 0, gn, 0.0)]
    accepted = back = 0
    t = 0.0
    monotone = True
    for it in range(steps):
        if gn <= tol:
            break
        dt = dt0
        for _ in range(MAX_BACKTRACKS + 1):
            trial = {m: coeffs[m] + dt * tau[m] for m in coeffs}
            Et = energy(torus_fourier_map(trial))
            if Et <= E - ARMIJO * dt * gn**2:
                break
            dt *= 0.5
            back += 1
        else:
            raise StiffnessError(f"step rejected after {MAX_BACKTRACKS} backtracks at iteration {it}")
        monotone &= Et <= E + 1e-15
        coeffs, E, t = trial, Et, t + dt
        tau, gn = tension_coeffs(coeffs)
        accepted += 1
        states.append(FlowState(dict(coeffs), E, accepted, gn, t))
        if target_energy is not None and E - target_energy < 1e-9:
            break
    return FlowResult(states, accepted, back, bool(monotone), decay_rate(states))


def decay_rate(states):
    """Least-squares rate of the largest coefficient amplitude, per unit flow time."""
    if len(states) < 3:
        return None
    t = np.array([s.time for s in states])
    amp = np.array([max(abs(c) for c in s.coeffs.values()) for s in states])
    ok = amp > 1e-12
    if ok.sum() < 3:
        return None
    slope = np.polyfit(t[ok], np.log(amp[ok]), 1)[0]
    return float(-slope)


def energy_directional_check(coeffs, direction, h=1e-5):
    """Central difference of the energy along a coefficient direction versus -int g(tau, X)."""
    plus = {m: coeffs.get(m, 0) + h * direction.get(m, 0) for m in set(coeffs) | set(direction)}
    minus = {m: coeffs.get(m, 0) - h * direction.get(m, 0) for m in set(coeffs) | set(direction)}
    fd = (energy(torus_fourier_map(plus)) - energy(torus_fourier_map(minus))) / (2 * h)
    f = torus_fourier_map(coeffs)
    rule = torus_rule(f.source, _grid({**coeffs, **direction}))
    z = rule.points
    tau = tension(f, z)[0]
    X = sum(c * np.exp(2j * np.pi * (j * z.real + k * z.imag)) for (j, k), c in direction.items())
    pred = -rule.integrate(np.real(np.conj(tau) * X))
    return float(fd), float(pred)


def sine_perturbation(eps):
    """Coefficients of z + eps sin(2 pi y)."""
    return {(0, 1): eps / 2j, (0, -1): -eps / 2j}

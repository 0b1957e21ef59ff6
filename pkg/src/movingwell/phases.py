"""Phase anatomy of the exact mode solutions over a wall cycle.

Each mode carries an explicit phase clock exp(-i mu(t)) with

    mu(t) = hbar pi^2 nu^2 tau(t) / (2 m),

while the dynamical phase a mode accumulates is

    delta = -(1/hbar) integral_0^T <H(t)> dt,

with <H> taken in the instantaneous state (kinetic term plus the
compensating quadratic potential of an accelerating wall).  The two do not
cancel: over a cycle of the wall (L and L' both returned to their initial
values) the mode's wave function is restored, so the leftover

    gamma = -(mu + delta) = (1/hbar) integral <H> dt  -  mu

is the cycle's geometric phase.  It has the closed form

    gamma = (m / (24 hbar)) (1 - 6/(pi^2 nu^2)) integral_0^T (L'^2 - L L'') dt,

whose trajectory factor is exposed as ``wall_action_integral``.  The
dynamical phase is deliberately computed by quadrature of <H(t)> rather
than from the closed form, so the decomposition cross-validates it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from .basis import BasisIndex, _solution_and_second_derivative
from .core import (
    ConvergenceError,
    DomainError,
    LinearWall,
    PhysicalConstants,
    ReversingLinearWall,
    ScaledWall,
    SmoothPeriodicWall,
    WallTrajectory,
)


@dataclass(frozen=True)
class PhaseDecomposition:
    """Cycle phases of one mode: clock mu, dynamical delta, geometric gamma.

    gamma = -(mu + delta); gamma_mod_2pi folds it into [0, 2 pi).
    """

    mu: float
    delta: float
    gamma: float
    gamma_mod_2pi: float


@lru_cache(maxsize=8)
def _gl_nodes(n: int):
    return np.polynomial.legendre.leggauss(n)


def total_phase(
    idx: BasisIndex,
    traj: WallTrajectory,
    constants: PhysicalConstants,
    T: float,
) -> float:
    """Phase clock reading mu(T) = hbar pi^2 nu^2 tau(T) / (2 m).

    The mode's explicit time dependence is the factor exp(-i mu(t)).
    """
    return (
        constants.hbar
        * math.pi**2
        * idx.nu**2
        * traj.tau(T)
        / (2.0 * constants.mass)
    )


def energy_expectation(
    idx: BasisIndex,
    traj: WallTrajectory,
    constants: PhysicalConstants,
    t: float,
) -> float:
    """<H(t)> in mode idx: box level plus the wall-motion corrections.

    <H> = (pi nu hbar)^2 / (2 m L^2)
        + (m/24) (1 - 6/(pi^2 nu^2)) (L'^2 - L L'').

    The L'^2 piece is kinetic energy carried by the chirp; the L L'' piece
    is the expectation of the compensating quadratic potential.
    """
    hbar, m = constants.hbar, constants.mass
    L = traj.length(t)
    Lp = traj.velocity(t)
    Lpp = traj.acceleration(t)
    level = (math.pi * idx.nu * hbar) ** 2 / (2.0 * m * L**2)
    shape = 1.0 - 6.0 / (math.pi**2 * idx.nu**2)
    return level + (m / 24.0) * shape * (Lp**2 - L * Lpp)


def _h_expectation_quadrature(idx, traj, constants, t, space_nodes):
    """<H(t)> by Gauss-Legendre quadrature of psi* H psi (independent of
    the closed form above)."""
    hbar, m = constants.hbar, constants.mass
    L = traj.length(t)
    base, w = _gl_nodes(space_nodes)
    if idx.sector == "single_wall":
        x = 0.5 * L * (base + 1.0)
        scale = 0.5 * L
    else:
        x = 0.5 * L * base
        scale = 0.5 * L
    psi, psi_xx = _solution_and_second_derivative(idx, traj, constants, t, x)
    v = 0.5 * m * traj.omega_squared(t) * x**2
    integrand = np.conj(psi) * (-(hbar**2) / (2.0 * m) * psi_xx + v * psi)
    val = scale * float(np.sum(w * integrand.real))
    return val


def dynamical_phase(
    idx: BasisIndex,
    traj: WallTrajectory,
    constants: PhysicalConstants,
    T: float | None = None,
    time_nodes: int = 256,
    space_nodes: int = 512,
    check: bool = True,
) -> float:
    """delta = -(1/hbar) integral_0^T <H(t)> dt by nested quadrature.

    Gauss-Legendre in both time and space; with ``check`` the computation
    repeats at doubled resolution and a relative disagreement above 1e-9
    raises ConvergenceError.  The integrand is evaluated pointwise, so an
    impulsive velocity reversal (kink in L') contributes only through the
    smooth pieces on either side.
    """
    if T is None:
        T = traj.period
        if T is None:
            raise DomainError("trajectory has no period; pass T explicitly")
    if T <= 0:
        raise DomainError("T must be positive")
    if time_nodes < 2 or space_nodes < 2:
        raise DomainError("need at least 2 quadrature nodes in each direction")

    def run(nt, nx):
        base, w = _gl_nodes(nt)
        ts = 0.5 * T * (base + 1.0)
        vals = np.array(
            [_h_expectation_quadrature(idx, traj, constants, t, nx) for t in ts]
        )
        return -0.5 * T * float(np.sum(w * vals)) / constants.hbar

    delta = run(time_nodes, space_nodes)
    if check:
        refined = run(2 * time_nodes, 2 * space_nodes)
        scale = max(abs(delta), abs(refined), 1e-30)
        if abs(delta - refined) / scale > 1e-9:
            raise ConvergenceError(
                f"dynamical phase did not converge: {delta!r} vs {refined!r} "
                "at doubled resolution; raise time_nodes/space_nodes"
            )
        delta = refined
    return delta


def wall_action_integral(traj: WallTrajectory, T: float | None = None) -> float:
    """integral_0^T (L'^2 - L L'') dt, the trajectory factor of gamma.

    Closed forms: a breathing wall over whole periods gives
    pi q^2 omega L0^2 (1+q) / (2 (1-q^2)^{3/2}) per period; rescaling all
    lengths by k multiplies the integral by k^2; a constant-speed wall
    gives q^2 T.  A reversing wall's velocity jump at T/2 contributes the
    impulsive term 2 q L(T/2) on top of q^2 T.  Anything else goes to
    adaptive quadrature.
    """
    if T is None:
        T = traj.period
        if T is None:
            raise DomainError("trajectory has no period; pass T explicitly")
    if T <= 0:
        raise DomainError("T must be positive")
    traj._check(T)
    if isinstance(traj, ScaledWall):
        return traj.k**2 * wall_action_integral(traj.inner, T)
    if isinstance(traj, LinearWall):
        return traj.q**2 * T
    if isinstance(traj, ReversingLinearWall):
        base = traj.q**2 * T
        if T >= traj.T / 2:
            base += 2.0 * traj.q * traj.half_length
        return base
    if isinstance(traj, SmoothPeriodicWall):
        cycles = T / traj.period
        if abs(cycles - round(cycles)) < 1e-12 and round(cycles) >= 1:
            q, w, L0 = traj.q, traj.omega, traj.L0
            per_cycle = (
                math.pi * q**2 * w * L0**2 * (1.0 + q) / (2.0 * (1.0 - q**2) ** 1.5)
            )
            return round(cycles) * per_cycle
    val, _ = quad(
        lambda s: traj.velocity(s) ** 2 - traj.length(s) * traj.acceleration(s),
        0.0,
        T,
        limit=200,
    )
    return val


def geometric_phase(
    idx: BasisIndex,
    traj: WallTrajectory,
    constants: PhysicalConstants,
    T: float | None = None,
) -> float:
    """Closed-form geometric phase of mode idx over a wall cycle.

    gamma = (m / (24 hbar)) (1 - 6/(pi^2 nu^2)) integral_0^T (L'^2 - L L'') dt.

    Requires the trajectory to be cyclic over [0, T] (L and L' both
    restored), otherwise the split of the total phase into dynamical and
    geometric parts is not meaningful and DomainError is raised.
    """
    if T is None:
        T = traj.period
        if T is None:
            raise DomainError("trajectory has no period; pass T explicitly")
    if not traj.is_cyclic(T):
        raise DomainError(
            f"trajectory is not cyclic over [0, {T}]; geometric phase undefined"
        )
    shape = 1.0 - 6.0 / (math.pi**2 * idx.nu**2)
    return (
        constants.mass
        / (24.0 * constants.hbar)
        * shape
        * wall_action_integral(traj, T)
    )


def phase_decomposition(
    idx: BasisIndex,
    traj: WallTrajectory,
    constants: PhysicalConstants,
    T: float | None = None,
    time_nodes: int = 256,
    space_nodes: int = 512,
    check: bool = True,
) -> PhaseDecomposition:
    """Split a mode's cycle phase into clock, dynamical and geometric parts.

    mu comes from the closed-form clock, delta from quadrature of <H>, and
    gamma = -(mu + delta).  For a cyclic trajectory gamma reproduces
    ``geometric_phase`` to quadrature accuracy; the redundancy is the
    point, as the two routes share no code.
    """
    if T is None:
        T = traj.period
        if T is None:
            raise DomainError("trajectory has no period; pass T explicitly")
    if not traj.is_cyclic(T):
        raise DomainError(
            f"trajectory is not cyclic over [0, {T}]; decomposition undefined"
        )
    mu = total_phase(idx, traj, constants, T)
    delta = dynamical_phase(
        idx, traj, constants, T, time_nodes=time_nodes,
        space_nodes=space_nodes, check=check,
    )
    gamma = -(mu + delta)
    return PhaseDecomposition(
        mu=mu, delta=delta, gamma=gamma, gamma_mod_2pi=gamma % (2.0 * math.pi)
    )


def _level_index(nu: int) -> BasisIndex:
    """Box level nu of the symmetric box as a BasisIndex."""
    if nu % 2 == 1:
        return BasisIndex("even", (nu - 1) // 2)
    return BasisIndex("odd", nu // 2)


def fig_mode_phases(
    constants: PhysicalConstants,
    Lbar0_values=(100.0, 400.0, 800.0, 1000.0),
    n_max: int = 30,
    q: float = 0.1,
    omega: float = 1.0,
):
    """Geometric phase per mode for a family of breathing-wall sizes.

    For each mean box size in ``Lbar0_values`` a breathing wall with the
    given modulation q and frequency omega runs one full period; rows are
    mode indices n = 0..n_max labelling box levels nu = n + 1.  Returns a
    dict with keys "Lbar0", "n", "nu", "gamma", "gamma_mod_2pi"; the phase
    arrays have shape (len(Lbar0_values), n_max + 1).

    gamma grows with the square of the box size, so the folded values wrap
    many times for the larger boxes.
    """
    if n_max < 0:
        raise DomainError("n_max must be non-negative")
    sizes = [float(v) for v in Lbar0_values]
    if any(v <= 0 for v in sizes):
        raise DomainError("box sizes must be positive")
    ns = np.arange(n_max + 1)
    nus = ns + 1
    gamma = np.empty((len(sizes), n_max + 1), dtype=float)
    for i, L0 in enumerate(sizes):
        traj = SmoothPeriodicWall(L0=L0, q=q, omega=omega)
        for j, nu in enumerate(nus):
            gamma[i, j] = geometric_phase(_level_index(int(nu)), traj, constants)
    return {
        "Lbar0": np.asarray(sizes),
        "n": ns,
        "nu": nus,
        "gamma": gamma,
        "gamma_mod_2pi": np.mod(gamma, 2.0 * math.pi),
    }

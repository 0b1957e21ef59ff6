"""Propagation of Gaussian packets in moving-wall boxes.

A normalized Gaussian

    psi_0(x) = (2 pi)^{-1/4} d^{-1/2} exp(-(x - x0)^2/(4 d^2) + i p0 x / hbar)

expanded in the exact mode solutions of ``basis`` evolves in closed form.
The expansion coefficients are Gaussian integrals; resumming the mode
series turns the evolved packet into Jacobi theta functions of the complex
nome parameter

    kappa(t) = i pi / (a L0^2) - 2 pi hbar tau(t) / m,
    a = 1/(4 d^2) + i m L'(0) / (2 hbar L0),

whose imaginary part is positive for every trajectory and time.  Both
routes (truncated mode sum, theta closed form) are provided and should
agree to near machine precision; keeping them separate is the point, since
each validates the other.

All propagators require the initial packet to sit well inside the box:
the Gaussian mass beyond the walls must not exceed 1e-6 (DomainError), and
a width above a tenth of the box earns a LocalizationWarning.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

from .basis import BasisIndex, basis_solution
from .core import (
    ConvergenceError,
    DomainError,
    GaussianParams,
    LinearWall,
    LocalizationWarning,
    PhysicalConstants,
    ReversingLinearWall,
    ScaledWall,
    TruncationWarning,
    WallTrajectory,
    WaveFunctionGrid,
    ComparisonReport,
    localization_diagnostic,
)
from .theta import theta

#: hard limit on initial probability mass outside the walls
TAIL_GATE = 1e-6
#: packet width / box size ratio above which wall effects are imminent
WIDTH_WARN = 0.1
#: coefficients below this fraction of the largest one are negligible
_COEFF_FLOOR = 1e-13
#: how many consecutive negligible coefficients end the expansion
_COEFF_RUN = 3

_SECTORS = ("symmetric", "single_wall")


@dataclass(frozen=True)
class SpectralExpansion:
    """Mode coefficients of a packet in one solution family.

    For the ``symmetric`` sector, ``even_coeffs[n]`` multiplies mode
    ("even", n) and ``odd_coeffs[n]`` multiplies ("odd", n); entry 0 of
    ``odd_coeffs`` is structurally zero.  For ``single_wall`` only
    ``odd_coeffs`` is used, indexed by ("single_wall", n).  ``family`` is
    "initial" for expansions anchored at t = 0 and "contraction" for
    coefficients in the post-turn family of a reversing wall.
    """

    sector: str
    even_coeffs: np.ndarray | None
    odd_coeffs: np.ndarray
    n_max: int
    captured_norm: float
    tail_tol: float
    family: str = "initial"

    def modes(self):
        """Yield (BasisIndex, coefficient) for every retained mode."""
        if self.sector == "symmetric":
            for n in range(self.n_max + 1):
                c = self.even_coeffs[n]
                if c != 0.0:
                    yield BasisIndex("even", n), c
            for n in range(1, self.n_max + 1):
                c = self.odd_coeffs[n]
                if c != 0.0:
                    yield BasisIndex("odd", n), c
        else:
            for n in range(1, self.n_max + 1):
                c = self.odd_coeffs[n]
                if c != 0.0:
                    yield BasisIndex("single_wall", n), c


def initial_gaussian(gauss: GaussianParams, constants: PhysicalConstants, x):
    """The packet at t = 0 on the full line (no box truncation)."""
    xa = np.asarray(x, dtype=float)
    out = (
        (2.0 * math.pi) ** -0.25
        * gauss.d**-0.5
        * np.exp(
            -((xa - gauss.x0) ** 2) / (4.0 * gauss.d**2)
            + 1j * gauss.p0 * xa / constants.hbar
        )
    )
    return complex(out) if np.ndim(x) == 0 else out


def _tail_mass(gauss: GaussianParams, L0: float, sector: str) -> float:
    root2d = math.sqrt(2.0) * gauss.d
    if sector == "single_wall":
        return 0.5 * (erfc(gauss.x0 / root2d) + erfc((L0 - gauss.x0) / root2d))
    return 0.5 * (
        erfc((L0 / 2 - gauss.x0) / root2d) + erfc((L0 / 2 + gauss.x0) / root2d)
    )


def _initial_gate(gauss: GaussianParams, L0: float, sector: str) -> None:
    if sector not in _SECTORS:
        raise DomainError(f"sector must be one of {_SECTORS}, got {sector!r}")
    tail = _tail_mass(gauss, L0, sector)
    if tail > TAIL_GATE:
        raise DomainError(
            f"initial packet leaks {tail:.3e} of its mass past the walls "
            f"(limit {TAIL_GATE:.0e}); it cannot be represented in the box"
        )
    if gauss.d / L0 > WIDTH_WARN:
        warnings.warn(
            f"packet width d = {gauss.d} is {gauss.d / L0:.2f} of the box; "
            "wall effects set in early",
            LocalizationWarning,
            stacklevel=3,
        )


def _gaussian_machinery(gauss, traj, constants):
    """Shared quantities of every coefficient formula."""
    hbar, m = constants.hbar, constants.mass
    L0 = traj.length(0.0)
    v0 = traj.velocity(0.0)
    a = 1.0 / (4.0 * gauss.d**2) + 1j * m * v0 / (2.0 * hbar * L0)
    beta = gauss.x0 / (2.0 * gauss.d**2) + 1j * gauss.p0 / constants.hbar
    # e_pre = beta^2/(4 a) - x0^2/(4 d^2), written so the two ~x0^2/(4 d^2)
    # blocks cancel symbolically instead of numerically (they reach ~625
    # for x0 = 50, d = 1)
    a_r = 1.0 / (4.0 * gauss.d**2)
    a_i = a.imag
    p_h = gauss.p0 / hbar
    e_pre = (4j * a_r * gauss.x0 * (p_h - a_i * gauss.x0) - p_h**2) / (4.0 * a)
    w0 = (
        math.sqrt(2.0 / L0)
        * (2.0 * math.pi) ** -0.25
        * gauss.d**-0.5
        * 0.5
        * cmath.sqrt(math.pi / a)
    )
    return L0, a, beta, e_pre, w0


def theta_nome(
    gauss: GaussianParams,
    traj: WallTrajectory,
    constants: PhysicalConstants,
    t: float,
) -> complex:
    """The nome parameter kappa(t) entering every theta-form propagator.

    Im kappa > 0 for all t: the packet's finite width keeps the series
    convergent, though Im kappa shrinks as tau grows.
    """
    L0, a, _, _, _ = _gaussian_machinery(gauss, traj, constants)
    return 1j * math.pi / (a * L0**2) - (
        2.0 * math.pi * constants.hbar * traj.tau(t) / constants.mass
    )


def expansion_coefficients(
    gauss: GaussianParams,
    traj: WallTrajectory,
    constants: PhysicalConstants,
    sector: str = "symmetric",
    tail_tol: float = 1e-14,
    n_limit: int = 20000,
) -> SpectralExpansion:
    """Project the initial Gaussian onto the t = 0 mode solutions.

    The projections are exact Gaussian integrals extended over the full
    line, legitimate because the wall-tail gate has already bounded the
    mass outside the box.  The expansion grows until each coefficient
    family produces three consecutive terms below 1e-13 of the largest.
    Emits TruncationWarning when the retained modes capture less than
    1 - tail_tol of the packet's norm.
    """
    _initial_gate(gauss, traj.length(0.0), sector)
    L0, a, beta, e_pre, w0 = _gaussian_machinery(gauss, traj, constants)

    def even_c(n: int) -> complex:
        k = math.pi * (2 * n + 1) / L0
        g = 1j * beta * k / (2.0 * a)
        decay = -(k**2) / (4.0 * a)
        return w0 * (cmath.exp(e_pre + g + decay) + cmath.exp(e_pre - g + decay))

    def odd_c(n: int) -> complex:
        k = 2.0 * math.pi * n / L0
        g = 1j * beta * k / (2.0 * a)
        decay = -(k**2) / (4.0 * a)
        return (w0 / 1j) * (cmath.exp(e_pre + g + decay) - cmath.exp(e_pre - g + decay))

    def single_c(n: int) -> complex:
        k = math.pi * n / L0
        g = 1j * beta * k / (2.0 * a)
        decay = -(k**2) / (4.0 * a)
        return (w0 / 1j) * (cmath.exp(e_pre + g + decay) - cmath.exp(e_pre - g + decay))

    if sector == "symmetric":
        families = [("even", even_c, 0), ("odd", odd_c, 1)]
    else:
        families = [("single", single_c, 1)]

    coeffs = {name: [] for name, _, _ in families}
    biggest = 0.0
    runs = {name: 0 for name, _, _ in families}
    done = {name: False for name, _, _ in families}
    n = 0
    while not all(done.values()):
        if n > n_limit:
            raise ConvergenceError(
                f"mode expansion did not truncate within {n_limit} modes"
            )
        for name, func, start in families:
            if done[name]:
                continue
            c = func(n) if n >= start else 0.0
            coeffs[name].append(c)
            mag = abs(c)
            biggest = max(biggest, mag)
            if n >= start and mag < _COEFF_FLOOR * max(biggest, 1e-300):
                runs[name] += 1
                if runs[name] >= _COEFF_RUN and n >= start + _COEFF_RUN:
                    done[name] = True
            else:
                runs[name] = 0
        n += 1

    n_max = max(len(v) for v in coeffs.values()) - 1
    for name in coeffs:
        coeffs[name] += [0.0] * (n_max + 1 - len(coeffs[name]))

    if sector == "symmetric":
        even = np.asarray(coeffs["even"], dtype=complex)
        odd = np.asarray(coeffs["odd"], dtype=complex)
        captured = float(np.sum(np.abs(even) ** 2) + np.sum(np.abs(odd) ** 2))
    else:
        even = None
        odd = np.asarray(coeffs["single"], dtype=complex)
        captured = float(np.sum(np.abs(odd) ** 2))

    if 1.0 - captured > tail_tol:
        warnings.warn(
            f"retained modes capture {captured:.16f} of unit norm "
            f"(deficit above tail_tol = {tail_tol:.1e})",
            TruncationWarning,
            stacklevel=2,
        )
    return SpectralExpansion(
        sector=sector,
        even_coeffs=even,
        odd_coeffs=odd,
        n_max=n_max,
        captured_norm=captured,
        tail_tol=tail_tol,
    )


def _sum_modes(expansion, traj, constants, t, x):
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    total = np.zeros(xa.shape, dtype=complex)
    for idx, c in expansion.modes():
        total = total + c * basis_solution(idx, traj, constants, t, xa)
    return complex(total[0]) if np.ndim(x) == 0 else total


def evolve_sum(
    expansion: SpectralExpansion,
    traj: WallTrajectory,
    constants: PhysicalConstants,
    t: float,
    x,
):
    """Evolve by summing the retained modes of one solution family.

    An "initial"-family expansion on a reversing wall is only valid up to
    the turning point; past it the walls move in the other family, so this
    raises DomainError and defers to ``evolve_cycle_reversing``.
    """
    reversing = isinstance(traj, ReversingLinearWall)
    if expansion.family == "contraction":
        if not reversing or t < traj.T / 2:
            raise DomainError(
                "contraction-family coefficients only apply to a reversing "
                "wall at or after its turning point"
            )
    elif reversing and t >= traj.T / 2:
        raise DomainError(
            "initial-family coefficients stop being valid at the turning "
            "point; use evolve_cycle_reversing"
        )
    return _sum_modes(expansion, traj, constants, t, x)


def _box_mask(xa: np.ndarray, L: float, sector: str) -> np.ndarray:
    if sector == "single_wall":
        return (xa >= 0.0) & (xa <= L)
    return np.abs(xa) <= L / 2


def _forbid_post_turn(traj: WallTrajectory, t: float) -> None:
    if isinstance(traj, ReversingLinearWall) and t >= traj.T / 2:
        raise DomainError(
            "theta-form propagators follow the pre-turn family; use "
            "evolve_cycle_reversing beyond the turning point"
        )


def evolve_theta_centered(
    gauss: GaussianParams,
    traj: WallTrajectory,
    constants: PhysicalConstants,
    t: float,
    x,
    tol: float = 1e-15,
):
    """Closed form for a centred packet (x0 = p0 = 0) in the symmetric box.

    psi(x, t) = (2 pi)^{-1/4} d^{-1/2} sqrt(pi/a) e^{i m x^2 L'/(2 hbar L)}
                theta_2(pi x / L, kappa(t)) / sqrt(L0 L)
    """
    if gauss.x0 != 0.0 or gauss.p0 != 0.0:
        raise DomainError("evolve_theta_centered needs x0 = p0 = 0")
    _forbid_post_turn(traj, t)
    _initial_gate(gauss, traj.length(0.0), "symmetric")
    hbar, m = constants.hbar, constants.mass
    L0, a, _, _, _ = _gaussian_machinery(gauss, traj, constants)
    L = traj.length(t)
    Lp = traj.velocity(t)
    kappa = theta_nome(gauss, traj, constants, t)
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    chirp = np.exp(1j * m * Lp * xa**2 / (2.0 * hbar * L))
    th = theta(2, math.pi * xa / L, kappa, tol=tol)
    pre = (
        (2.0 * math.pi) ** -0.25
        * gauss.d**-0.5
        * cmath.sqrt(math.pi / a)
        / math.sqrt(L0 * L)
    )
    out = np.where(_box_mask(xa, L, "symmetric"), pre * chirp * th, 0.0)
    return complex(out[0]) if np.ndim(x) == 0 else out


def evolve_theta_general(
    gauss: GaussianParams,
    traj: WallTrajectory,
    constants: PhysicalConstants,
    t: float,
    x,
    sector: str = "symmetric",
    tol: float = 1e-15,
):
    """Closed form for an arbitrarily placed and boosted packet.

    Resumming both parity families gives, with z = pi x / L and
    C = pi beta / (2 a L0),

      psi = W sqrt(2/L) e^{i m x^2 L'/(2 hbar L)} e^{E}
            (1/2) [ theta_2(z+C) + theta_2(z-C) + theta_3(z-C) - theta_3(z+C) ]

    (all at nome parameter kappa(t)), where E merges the packet-offset
    exponents beta^2/(4a) - x0^2/(4 d^2) that would otherwise overflow
    separately.  The single-wall sector resums to

      psi = W sqrt(2/L) e^{chirp} e^{E}
            (1/2) [ theta_3((z-C)/2, kappa/4) - theta_3((z+C)/2, kappa/4) ].
    """
    _forbid_post_turn(traj, t)
    _initial_gate(gauss, traj.length(0.0), sector)
    hbar, m = constants.hbar, constants.mass
    L0, a, beta, e_pre, w0 = _gaussian_machinery(gauss, traj, constants)
    L = traj.length(t)
    Lp = traj.velocity(t)
    kappa = theta_nome(gauss, traj, constants, t)
    c_off = math.pi * beta / (2.0 * a * L0)
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    z = math.pi * xa / L
    chirp = np.exp(1j * m * Lp * xa**2 / (2.0 * hbar * L) + e_pre)
    if sector == "symmetric":
        combo = 0.5 * (
            theta(2, z + c_off, kappa, tol=tol)
            + theta(2, z - c_off, kappa, tol=tol)
            + theta(3, z - c_off, kappa, tol=tol)
            - theta(3, z + c_off, kappa, tol=tol)
        )
    else:
        combo = 0.5 * (
            theta(3, (z - c_off) / 2.0, kappa / 4.0, tol=tol)
            - theta(3, (z + c_off) / 2.0, kappa / 4.0, tol=tol)
        )
    out = w0 * math.sqrt(2.0 / L) * chirp * combo
    out = np.where(_box_mask(xa, L, sector), out, 0.0)
    return complex(out[0]) if np.ndim(x) == 0 else out


def evolve_unconfined_approx(
    gauss: GaussianParams,
    traj: WallTrajectory,
    constants: PhysicalConstants,
    t: float,
    x,
):
    """Wall-free limit of the centred theta form.

    Replacing theta_2 by its modular image with theta_4 -> 1 (the tail
    terms are exponentially small while the packet is far from the walls)
    gives

        psi = (2 pi)^{-1/4} d^{-1/2} sqrt(pi/a) e^{i m x^2 L'/(2 hbar L)}
              (-i kappa)^{-1/2} e^{-i z^2/(pi kappa)} / sqrt(L0 L).

    For a wall moving at constant speed this expression collapses to the
    free-space Gaussian exactly, independent of the speed.  Emits
    LocalizationWarning once the free spread reaches a tenth of the box,
    where dropping theta_4 starts to cost accuracy.
    """
    if gauss.x0 != 0.0 or gauss.p0 != 0.0:
        raise DomainError("evolve_unconfined_approx needs x0 = p0 = 0")
    _forbid_post_turn(traj, t)
    L0 = traj.length(0.0)
    _initial_gate(gauss, L0, "symmetric")
    ratio = localization_diagnostic(gauss, constants, t, L0)
    if ratio > WIDTH_WARN:
        warnings.warn(
            f"free spread is {ratio:.3f} of the box at t = {t}; the "
            "wall-free approximation is breaking down",
            LocalizationWarning,
            stacklevel=2,
        )
    hbar, m = constants.hbar, constants.mass
    _, a, _, _, _ = _gaussian_machinery(gauss, traj, constants)
    L = traj.length(t)
    Lp = traj.velocity(t)
    kappa = theta_nome(gauss, traj, constants, t)
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    z = math.pi * xa / L
    chirp = np.exp(1j * m * Lp * xa**2 / (2.0 * hbar * L))
    tail = (-1j * kappa) ** -0.5 * np.exp(-1j * z**2 / (math.pi * kappa))
    pre = (
        (2.0 * math.pi) ** -0.25
        * gauss.d**-0.5
        * cmath.sqrt(math.pi / a)
        / math.sqrt(L0 * L)
    )
    out = pre * chirp * tail
    return complex(out[0]) if np.ndim(x) == 0 else out


def contraction_coefficients(
    gauss: GaussianParams,
    traj: ReversingLinearWall,
    constants: PhysicalConstants,
    route: str = "closed",
    tail_tol: float = 1e-14,
    n_limit: int = 20000,
    grid_points: int = 2**15,
) -> SpectralExpansion:
    """Coefficients of the packet in the post-turn family at t = T/2.

    route "closed": treats the packet at the turn as the freely spread
    Gaussian (exact up to the same exponentially small wall tails as the
    unconfined form) and projects analytically; centred packets only.

    route "reexpansion": evolves the initial-family mode sum to the turn
    and projects numerically on a fine grid; works for any packet the
    initial gate admits.
    """
    if not isinstance(traj, ReversingLinearWall):
        raise DomainError("contraction_coefficients needs a ReversingLinearWall")
    if route not in ("closed", "reexpansion"):
        raise DomainError(f"route must be 'closed' or 'reexpansion', got {route!r}")
    hbar, m = constants.hbar, constants.mass
    L_h = traj.half_length
    t_half = traj.T / 2

    if route == "closed":
        if gauss.x0 != 0.0 or gauss.p0 != 0.0:
            raise DomainError("the closed contraction route needs x0 = p0 = 0")
        _initial_gate(gauss, traj.L0, "symmetric")
        s_h = 1.0 + 1j * hbar * t_half / (2.0 * m * gauss.d**2)
        n_f = (2.0 * math.pi) ** -0.25 * (gauss.d * s_h) ** -0.5
        a_f = 1.0 / (4.0 * gauss.d**2 * s_h)
        a_tot = a_f - 1j * m * traj.q / (2.0 * hbar * L_h)
        front = math.sqrt(2.0 / L_h) * n_f * cmath.sqrt(math.pi / a_tot)

        even = []
        biggest, run, n = 0.0, 0, 0
        while True:
            if n > n_limit:
                raise ConvergenceError(
                    f"contraction expansion did not truncate within {n_limit} modes"
                )
            k = math.pi * (2 * n + 1) / L_h
            c = front * cmath.exp(-(k**2) / (4.0 * a_tot))
            even.append(c)
            biggest = max(biggest, abs(c))
            if abs(c) < _COEFF_FLOOR * max(biggest, 1e-300):
                run += 1
                if run >= _COEFF_RUN and n >= _COEFF_RUN:
                    break
            else:
                run = 0
            n += 1
        even = np.asarray(even, dtype=complex)
        odd = np.zeros_like(even)
        n_max = len(even) - 1
    else:
        start = expansion_coefficients(
            gauss, traj, constants, sector="symmetric", tail_tol=tail_tol
        )
        xg = np.linspace(-L_h / 2, L_h / 2, grid_points + 1)
        # the initial family evaluated AT the turn: basis_solution has
        # already switched there, so assemble the pre-turn form explicitly
        psi_turn = np.zeros(xg.shape, dtype=complex)
        chirp = np.exp(1j * m * traj.q * xg**2 / (2.0 * hbar * L_h))
        tau_h = traj.tau(t_half)
        root = math.sqrt(2.0 / L_h)
        for idx, c in start.modes():
            phase = hbar * math.pi**2 * idx.nu**2 * tau_h / (2.0 * m)
            kx = math.pi * idx.nu * xg / L_h
            trig = np.sin(kx) if idx.is_sine else np.cos(kx)
            psi_turn += c * root * cmath.exp(-1j * phase) * chirp * trig
        # project on the contraction family at the same instant
        anti_chirp = np.exp(1j * m * traj.q * xg**2 / (2.0 * hbar * L_h))
        n_fit = max(2 * start.n_max + 8, 16)
        even = np.zeros(n_fit + 1, dtype=complex)
        odd = np.zeros(n_fit + 1, dtype=complex)
        for n in range(n_fit + 1):
            ke = math.pi * (2 * n + 1) * xg / L_h
            even[n] = np.trapezoid(psi_turn * anti_chirp * root * np.cos(ke), xg)
            if n >= 1:
                ko = 2.0 * math.pi * n * xg / L_h
                odd[n] = np.trapezoid(psi_turn * anti_chirp * root * np.sin(ko), xg)
        # trim with the usual floor
        biggest = max(float(np.max(np.abs(even))), float(np.max(np.abs(odd))), 1e-300)
        keep = max(
            [0]
            + [
                n
                for n in range(n_fit + 1)
                if abs(even[n]) >= _COEFF_FLOOR * biggest
                or abs(odd[n]) >= _COEFF_FLOOR * biggest
            ]
        )
        n_max = keep
        even, odd = even[: n_max + 1], odd[: n_max + 1]

    captured = float(np.sum(np.abs(even) ** 2) + np.sum(np.abs(odd) ** 2))
    if 1.0 - captured > max(tail_tol, 1e-10):
        warnings.warn(
            f"contraction-family modes capture {captured:.12f} of unit norm",
            TruncationWarning,
            stacklevel=2,
        )
    return SpectralExpansion(
        sector="symmetric",
        even_coeffs=even,
        odd_coeffs=odd,
        n_max=n_max,
        captured_norm=captured,
        tail_tol=tail_tol,
        family="contraction",
    )


def evolve_cycle_reversing(
    gauss: GaussianParams,
    traj: ReversingLinearWall,
    constants: PhysicalConstants,
    t: float,
    x,
    route: str = "closed",
    tol: float = 1e-15,
):
    """Evolve through a full expand-reverse-contract cycle.

    Before the turn both routes use the exact pre-turn evolution.  From the
    turn on, route "closed" resums the analytically projected contraction
    coefficients into a theta_2 at the nome parameter

        kappa_c(t) = i pi / (a_tot L_h^2) - 2 pi hbar (tau(t) - tau(T/2)) / m,

    while route "reexpansion" sums the numerically projected modes.
    """
    if not isinstance(traj, ReversingLinearWall):
        raise DomainError("evolve_cycle_reversing needs a ReversingLinearWall")
    if route not in ("closed", "reexpansion"):
        raise DomainError(f"route must be 'closed' or 'reexpansion', got {route!r}")
    hbar, m = constants.hbar, constants.mass
    t_half = traj.T / 2
    if t < t_half:
        if route == "closed":
            return evolve_theta_centered(gauss, traj, constants, t, x, tol=tol)
        expansion = expansion_coefficients(gauss, traj, constants)
        return evolve_sum(expansion, traj, constants, t, x)

    if route == "reexpansion":
        contraction = contraction_coefficients(gauss, traj, constants, route=route)
        return evolve_sum(contraction, traj, constants, t, x)

    if gauss.x0 != 0.0 or gauss.p0 != 0.0:
        raise DomainError("the closed cycle route needs x0 = p0 = 0")
    _initial_gate(gauss, traj.L0, "symmetric")
    L_h = traj.half_length
    L = traj.length(t)
    s_h = 1.0 + 1j * hbar * t_half / (2.0 * m * gauss.d**2)
    n_f = (2.0 * math.pi) ** -0.25 * (gauss.d * s_h) ** -0.5
    a_f = 1.0 / (4.0 * gauss.d**2 * s_h)
    a_tot = a_f - 1j * m * traj.q / (2.0 * hbar * L_h)
    tau_c = traj.tau(t) - traj.tau(t_half)
    kappa_c = 1j * math.pi / (a_tot * L_h**2) - 2.0 * math.pi * hbar * tau_c / m
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    chirp = np.exp(-1j * m * traj.q * xa**2 / (2.0 * hbar * L))
    th = theta(2, math.pi * xa / L, kappa_c, tol=tol)
    pre = n_f * cmath.sqrt(math.pi / a_tot) / math.sqrt(L * L_h)
    out = np.where(_box_mask(xa, L, "symmetric"), pre * chirp * th, 0.0)
    return complex(out[0]) if np.ndim(x) == 0 else out


def locality_compare(
    gauss: GaussianParams,
    constants: PhysicalConstants,
    traj_a: WallTrajectory,
    traj_b: WallTrajectory,
    t: float,
    x,
    threshold: float = WIDTH_WARN,
    tol: float = 1e-10,
    sector: str = "symmetric",
) -> ComparisonReport:
    """Compare the same packet evolved under two different wall motions.

    While the packet cannot feel the walls, the evolutions must agree; the
    verdict is "warn" when the free spread exceeds ``threshold`` of the
    smaller box (agreement is then not expected), "pass" when the sup
    difference is within ``tol`` and "fail" otherwise.

    The trajectories must start from the same box, except when one is the
    other rescaled (ScaledWall), which is precisely a locality statement:
    the packet cannot know the box size either.  ``sector`` selects the
    symmetric box or the single moving wall on [0, L].

    Bear in mind that an accelerating wall drags the compensating
    quadratic potential -(m/2)(L''/L) x^2 through the whole box, and that
    term acts on the packet no matter how far the walls are.  Agreement is
    therefore only expected between trajectories with identical L''/L
    histories: constant-speed walls of any speed (both zero), or a
    trajectory against its rescaled self (L''/L is scale invariant).  A
    "fail" between, say, a uniformly moving and a breathing wall reports a
    real dynamical difference, not a locality violation.
    """
    la, lb = traj_a.length(0.0), traj_b.length(0.0)
    scaled_pair = (isinstance(traj_a, ScaledWall) and traj_a.inner == traj_b) or (
        isinstance(traj_b, ScaledWall) and traj_b.inner == traj_a
    )
    if not scaled_pair and abs(la - lb) > 1e-9 * max(la, lb):
        raise DomainError(
            "trajectories start from different boxes; only a scaled pair may do that"
        )
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    for traj, L in ((traj_a, traj_a.length(t)), (traj_b, traj_b.length(t))):
        outside = (xa < 0) | (xa > L) if sector == "single_wall" else np.abs(xa) > L / 2
        if np.any(outside):
            raise DomainError("comparison grid leaves the box of one trajectory")
    psi_a = evolve_theta_general(gauss, traj_a, constants, t, xa, sector=sector)
    psi_b = evolve_theta_general(gauss, traj_b, constants, t, xa, sector=sector)
    diff = psi_a - psi_b
    sup = float(np.max(np.abs(diff)))
    if xa.size > 1:
        l2 = float(np.sqrt(np.trapezoid(np.abs(diff) ** 2, xa)))
    else:
        l2 = sup
    ratio = localization_diagnostic(gauss, constants, t, min(la, lb))
    if ratio > threshold:
        verdict = "warn"
    elif sup <= tol:
        verdict = "pass"
    else:
        verdict = "fail"
    return ComparisonReport(
        sup_error=sup, l2_error=l2, localization_ratio=ratio, verdict=verdict
    )

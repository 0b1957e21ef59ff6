import math

import numpy as np
import pytest
from scipy.integrate import quad

from movingwell.core import (
    DomainError,
    GaussianParams,
    LinearWall,
    PhysicalConstants,
    ReversingLinearWall,
    ScaledWall,
    SmoothPeriodicWall,
    WaveFunctionGrid,
    localization_diagnostic,
)

RNG = np.random.default_rng(20240613)


def central_diff(f, t, h):
    return (f(t + h) - f(t - h)) / (2 * h)


def all_trajectories():
    return [
        LinearWall(L0=100.0, q=2.0),
        LinearWall(L0=100.0, q=0.0),
        LinearWall(L0=50.0, q=-1.0),
        ReversingLinearWall(L0=100.0, q=2.0, T=4.0),
        SmoothPeriodicWall(L0=100.0, q=0.1, omega=1.0),
        SmoothPeriodicWall(L0=30.0, q=-0.4, omega=2.5),
        ScaledWall(inner=SmoothPeriodicWall(L0=100.0, q=0.1, omega=1.0), k=3.0),
    ]


def sample_times(traj, n=25):
    hi = traj.t_max if traj.t_max is not None else 10.0
    # stay away from the window edges so finite differences fit inside
    return RNG.uniform(0.02 * hi, 0.98 * hi, size=n)


@pytest.mark.parametrize("traj", all_trajectories(), ids=lambda tr: type(tr).__name__)
def test_velocity_is_length_derivative(traj):
    for t in sample_times(traj):
        h = 1e-6 * max(1.0, t)
        if isinstance(traj, ReversingLinearWall):
            # skip the kink where L' is discontinuous
            if abs(t - traj.T / 2) < 2 * h:
                continue
        fd = central_diff(traj.length, t, h)
        assert fd == pytest.approx(traj.velocity(t), abs=1e-5 * (1 + abs(fd)))


@pytest.mark.parametrize("traj", all_trajectories(), ids=lambda tr: type(tr).__name__)
def test_acceleration_is_velocity_derivative(traj):
    for t in sample_times(traj):
        h = 1e-5 * max(1.0, t)
        if isinstance(traj, ReversingLinearWall):
            if abs(t - traj.T / 2) < 2 * h:
                continue
        fd = central_diff(traj.velocity, t, h)
        assert fd == pytest.approx(traj.acceleration(t), abs=2e-4 * (1 + abs(fd)))


@pytest.mark.parametrize("traj", all_trajectories(), ids=lambda tr: type(tr).__name__)
def test_tau_matches_quadrature(traj):
    for t in sorted(sample_times(traj, n=8)):
        # tell quad where the integrand has a kink
        pts = [traj.T / 2] if isinstance(traj, ReversingLinearWall) else None
        pts = [p for p in (pts or []) if p < t] or None
        val, err = quad(lambda s: traj.length(s) ** -2, 0.0, t, limit=200, points=pts)
        assert traj.tau(t) == pytest.approx(val, rel=1e-9, abs=1e-15)


@pytest.mark.parametrize("traj", all_trajectories(), ids=lambda tr: type(tr).__name__)
def test_omega_squared_consistent_with_generic_form(traj):
    for t in sample_times(traj, n=10):
        generic = -traj.acceleration(t) / traj.length(t)
        assert traj.omega_squared(t) == pytest.approx(generic, rel=1e-12, abs=1e-15)


def test_smooth_periodic_frozen_values():
    traj = SmoothPeriodicWall(L0=100.0, q=0.1, omega=1.0)
    # over one full period the sine term vanishes: tau = T / (L0^2 (1+q))
    T = traj.period
    assert T == pytest.approx(2 * math.pi)
    assert traj.tau(T) == pytest.approx(2 * math.pi / 11000.0, rel=1e-14)
    # t=0: u = 1+q, L''(0) = L0 sqrt(1+q) q w^2 / (2 (1+q)^{3/2}) = L0 q w^2/(2(1+q))
    assert traj.omega_squared(0.0) == pytest.approx(-0.1 / 2.2, rel=1e-12)
    assert traj.length(0.0) == pytest.approx(100.0, rel=1e-15)
    assert traj.velocity(0.0) == 0.0


def test_linear_tau_closed_form():
    traj = LinearWall(L0=100.0, q=2.0)
    assert traj.tau(4.0) == pytest.approx(4.0 / (100.0 * 108.0), rel=1e-14)
    still = LinearWall(L0=7.0, q=0.0)
    assert still.tau(3.0) == pytest.approx(3.0 / 49.0, rel=1e-14)


def test_linear_contracting_window():
    traj = LinearWall(L0=50.0, q=-1.0)
    assert traj.t_max == pytest.approx(49.5)
    traj.length(49.0)
    with pytest.raises(DomainError):
        traj.length(49.9)


def test_reversing_wall_geometry():
    traj = ReversingLinearWall(L0=100.0, q=2.0, T=4.0)
    assert traj.length(0.0) == 100.0
    assert traj.length(2.0) == 104.0  # turning point
    assert traj.length(4.0) == 100.0
    assert traj.velocity(1.0) == 2.0
    assert traj.velocity(3.0) == -2.0
    # the switch instant belongs to the contraction leg
    assert traj.velocity(2.0) == -2.0
    assert traj.half_length == 104.0
    assert not traj.is_cyclic(4.0)  # L returns but L' flips sign


def test_reversing_wall_tau_continuity():
    traj = ReversingLinearWall(L0=100.0, q=2.0, T=4.0)
    eps = 1e-9
    assert traj.tau(2.0 - eps) == pytest.approx(traj.tau(2.0), rel=1e-7)
    tau_half = 4.0 / (100.0 * 208.0)  # T / (L0 (2 L0 + q T))
    assert traj.tau(2.0) == pytest.approx(tau_half, rel=1e-13)


def test_scaled_wall_relations():
    inner = SmoothPeriodicWall(L0=100.0, q=0.1, omega=1.0)
    k = 4.0
    traj = ScaledWall(inner=inner, k=k)
    for t in [0.0, 1.3, 5.9]:
        assert traj.length(t) == pytest.approx(k * inner.length(t), rel=1e-15)
        assert traj.velocity(t) == pytest.approx(k * inner.velocity(t), rel=1e-15)
        assert traj.tau(t) == pytest.approx(inner.tau(t) / k**2, rel=1e-15)
        assert traj.omega_squared(t) == pytest.approx(
            inner.omega_squared(t), rel=1e-15
        )
    assert traj.L0 == pytest.approx(400.0)
    assert traj.period == inner.period


def test_smooth_periodic_is_cyclic():
    traj = SmoothPeriodicWall(L0=100.0, q=0.1, omega=1.0)
    assert traj.is_cyclic(traj.period)
    assert not traj.is_cyclic(0.37 * traj.period)
    # static wall is cyclic over any horizon
    assert LinearWall(L0=10.0, q=0.0).is_cyclic(5.0)


def test_validation_errors():
    with pytest.raises(DomainError):
        LinearWall(L0=-1.0, q=0.0)
    with pytest.raises(DomainError):
        SmoothPeriodicWall(L0=10.0, q=1.0, omega=1.0)
    with pytest.raises(DomainError):
        SmoothPeriodicWall(L0=10.0, q=0.5, omega=-1.0)
    with pytest.raises(DomainError):
        ReversingLinearWall(L0=10.0, q=-6.0, T=4.0)  # collapses before T/2
    with pytest.raises(DomainError):
        ScaledWall(inner=LinearWall(L0=10.0, q=0.0), k=0.0)
    with pytest.raises(DomainError):
        GaussianParams(d=0.0)
    with pytest.raises(DomainError):
        PhysicalConstants(hbar=0.0)
    with pytest.raises(DomainError):
        LinearWall(L0=10.0, q=1.0).length(-0.5)


def test_wavefunction_grid_norm_and_immutability():
    x = np.linspace(-8.0, 8.0, 3201)
    psi = (2 * math.pi) ** -0.25 * np.exp(-(x**2) / 4.0)
    grid = WaveFunctionGrid(positions=x, values=psi, time=0.0)
    assert grid.norm == pytest.approx(1.0, abs=1e-9)
    assert grid.spacing == pytest.approx(0.005)
    with pytest.raises(ValueError):
        grid.values[3] = 0.0
    with pytest.raises(DomainError):
        WaveFunctionGrid(positions=np.array([0.0, 1.0, 3.0]), values=np.zeros(3), time=0.0)


def test_localization_diagnostic_values():
    c = PhysicalConstants()
    g = GaussianParams(d=1.0)
    assert localization_diagnostic(g, c, 0.0, 100.0) == pytest.approx(0.01)
    # at t=5: sigma^2 = 1 + (5/2)^2 = 7.25
    assert localization_diagnostic(g, c, 5.0, 100.0) == pytest.approx(
        math.sqrt(7.25) / 100.0, rel=1e-12
    )
    with pytest.raises(DomainError):
        localization_diagnostic(g, c, -1.0, 100.0)

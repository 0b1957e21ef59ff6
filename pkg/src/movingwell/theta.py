"""Jacobi theta functions of a complex nome parameter, tuned for wave packets.

Conventions (kind k, argument z, nome parameter kappa with Im kappa > 0):

    theta_2(z, kappa) = 2 sum_{n>=0} e^{i pi kappa (n+1/2)^2} cos((2n+1) z)
    theta_3(z, kappa) = 1 + 2 sum_{n>=1} e^{i pi kappa n^2} cos(2 n z)
    theta_4(z, kappa) = 1 + 2 sum_{n>=1} (-1)^n e^{i pi kappa n^2} cos(2 n z)

Propagation drives kappa toward the real axis (Im kappa -> 0), where the
direct series converges slowly; the modular transformation to the dual
parameter -1/kappa then converges fast.  ``theta`` picks the better route
automatically.

Two numerical hazards are handled explicitly.  First, overflow: all
exponential factors of a term (Gaussian prefactor included) are merged into
a single exponent before exponentiating, so intermediate under/overflow
cannot poison a finite result.  Second, phase conditioning: term phases
grow like pi n^2 Re(kappa), reaching 1e5 radians in transformed sums, where
double-precision assembly alone would cost ~1e-11 of relative accuracy;
exponents are therefore accumulated in extended precision and reduced
mod 2 pi before the final exp/cos/sin in doubles.
"""

from __future__ import annotations

import math

import numpy as np

from .core import ConvergenceError, DomainError

_VALID_KINDS = (2, 3, 4)
#: direct summation is comfortable above this Im kappa
_DIRECT_CUT = 0.05

_LD = np.longdouble
_PI_LD = _LD("3.14159265358979323846264338327950288")
_TWO_PI_LD = _LD(2) * _PI_LD


def _validate(kind: int, kappa: complex, tol: float, cap: int) -> complex:
    if kind not in _VALID_KINDS:
        raise DomainError(f"kind must be one of {_VALID_KINDS}, got {kind!r}")
    kappa = complex(kappa)
    if not math.isfinite(kappa.real) or not math.isfinite(kappa.imag):
        raise DomainError("kappa must be finite")
    if kappa.imag <= 0:
        raise DomainError(f"Im kappa must be positive, got {kappa.imag}")
    if not 0 < tol < 1:
        raise DomainError("tol must lie in (0, 1)")
    if cap < 1:
        raise DomainError("cap must be at least 1")
    return kappa


def truncation_bound(kappa: complex, z=0.0, tol: float = 1e-15, cap: int = 10**6) -> int:
    """Smallest index N >= 1 beyond which all series terms are below tol.

    Term n of any of the three series is bounded by
    2 exp(-pi Im(kappa) n^2 + 2 n |Im z|), so N is the larger root of the
    exponent crossing ln(tol), rounded up.  Raises ConvergenceError when N
    would exceed ``cap``.
    """
    kappa = _validate(2, kappa, tol, cap)
    b = kappa.imag
    zi = float(np.max(np.abs(np.asarray(z, dtype=complex).imag), initial=0.0))
    log_tol = math.log(tol)
    # larger root of  pi b n^2 - 2 zi n + log_tol = 0
    disc = zi * zi - math.pi * b * log_tol
    n_star = (zi + math.sqrt(disc)) / (math.pi * b)
    n = max(1, math.ceil(n_star))
    if n > cap:
        raise ConvergenceError(
            f"series needs {n} terms, above the cap of {cap}; "
            "Im kappa is too small for direct summation"
        )
    return n


def _kahan_add(total, comp, term):
    y = term - comp
    t = total + y
    return t, (t - total) - y


def _exp_reduced(re_part, im_part):
    """exp(re + i*im) with the phase reduced mod 2 pi in extended precision."""
    im = np.asarray(np.mod(np.asarray(im_part, dtype=_LD), _TWO_PI_LD), dtype=float)
    mag = np.exp(np.asarray(re_part, dtype=float))
    return mag * (np.cos(im) + 1j * np.sin(im))


def _sum_engine(kind, kappa_re, kappa_im, w_re, w_im, e0_re, e0_im, n_max):
    """Sum the ``kind`` series at parameter kappa, argument w, with every
    term multiplied by exp(e0).  All exponent pieces arrive as extended
    floats; Kahan compensation handles the final double accumulation."""
    shape = np.broadcast(w_re, w_im).shape
    total = np.zeros(shape, dtype=complex)
    comp = np.zeros_like(total)
    pk_re = _PI_LD * kappa_re
    pk_im = _PI_LD * kappa_im
    if kind == 2:
        for n in range(n_max + 1):
            c2 = _LD(2 * n + 1) ** 2 / 4  # (n + 1/2)^2, exactly
            a = 2 * n + 1
            re_base = e0_re - pk_im * c2
            im_base = e0_im + pk_re * c2
            term = _exp_reduced(re_base - a * w_im, im_base + a * w_re)
            term = term + _exp_reduced(re_base + a * w_im, im_base - a * w_re)
            total, comp = _kahan_add(total, comp, term)
    else:
        sign_flip = kind == 4
        total += _exp_reduced(e0_re, e0_im)
        for n in range(1, n_max + 1):
            c2 = _LD(n) ** 2
            a = 2 * n
            re_base = e0_re - pk_im * c2
            im_base = e0_im + pk_re * c2
            term = _exp_reduced(re_base - a * w_im, im_base + a * w_re)
            term = term + _exp_reduced(re_base + a * w_im, im_base - a * w_re)
            if sign_flip and n % 2 == 1:
                term = -term
            total, comp = _kahan_add(total, comp, term)
    return total


def _sum_direct(kind: int, z: np.ndarray, kappa: complex, tol: float, cap: int):
    """Direct series at the given parameter."""
    n_max = truncation_bound(kappa, z, tol, cap)
    return _sum_engine(
        kind,
        _LD(kappa.real),
        _LD(kappa.imag),
        np.asarray(z.real, dtype=_LD),
        np.asarray(z.imag, dtype=_LD),
        _LD(0.0),
        _LD(0.0),
        n_max,
    )


def _sum_transformed(kind: int, z: np.ndarray, kappa: complex, tol: float, cap: int):
    """Series at the dual parameter -1/kappa, prefactor folded into each term.

    theta_2(z, kappa) = (-i kappa)^{-1/2} e^{-i z^2/(pi kappa)} theta_4(z/kappa, -1/kappa)
    theta_3           =            "                            theta_3(   "        "   )
    theta_4           =            "                            theta_2(   "        "   )

    With Im kappa > 0 the factor -i kappa has positive real part, so the
    principal square root is the right branch.  The dual parameter, the
    rotated argument z/kappa and the prefactor exponent -i z^2/(pi kappa)
    are all computed in extended precision from the original kappa.
    """
    dual = {2: 4, 3: 3, 4: 2}[kind]
    kr, ki = _LD(kappa.real), _LD(kappa.imag)
    denom = kr * kr + ki * ki
    kd_re, kd_im = -kr / denom, ki / denom  # -1/kappa
    zr = np.asarray(z.real, dtype=_LD)
    zi = np.asarray(z.imag, dtype=_LD)
    # w = z / kappa
    w_re = (zr * kr + zi * ki) / denom
    w_im = (zi * kr - zr * ki) / denom
    # e0 = -i z^2 / (pi kappa) = -i (z^2 conj(kappa)) / (pi |kappa|^2)
    z2_re = zr * zr - zi * zi
    z2_im = 2 * zr * zi
    u_re = (z2_re * kr + z2_im * ki) / (_PI_LD * denom)
    u_im = (z2_im * kr - z2_re * ki) / (_PI_LD * denom)
    e0_re, e0_im = u_im, -u_re
    front = (-1j * kappa) ** -0.5
    # absolute tolerance on the final value -> tolerance on the dual series
    tol_d = min(max(tol / abs(front), 1e-300), 0.5)
    kappa_d = complex(float(kd_re), float(kd_im))
    w_probe = 1j * float(np.max(np.abs(w_im), initial=0.0))
    n_max = truncation_bound(kappa_d, w_probe, tol_d, cap)
    return front * _sum_engine(dual, kd_re, kd_im, w_re, w_im, e0_re, e0_im, n_max)


def theta(kind: int, z, kappa: complex, tol: float = 1e-15, cap: int = 10**6):
    """Evaluate theta_kind(z, kappa) for scalar or array z.

    Routing: direct summation when Im kappa >= 0.05; otherwise the modular
    transform when it improves the decay rate (Im(-1/kappa) > Im kappa);
    otherwise direct summation, which may hit the term cap and raise
    ConvergenceError for hopeless parameters.
    """
    kappa = _validate(kind, kappa, tol, cap)
    z_in = np.asarray(z, dtype=complex)
    scalar = z_in.ndim == 0
    z_arr = np.atleast_1d(z_in)
    b = kappa.imag
    if b >= _DIRECT_CUT:
        out = _sum_direct(kind, z_arr, kappa, tol, cap)
    elif b / abs(kappa) ** 2 > b:
        out = _sum_transformed(kind, z_arr, kappa, tol, cap)
    else:
        out = _sum_direct(kind, z_arr, kappa, tol, cap)
    return complex(out[0]) if scalar else out


def jacobi_transform(kind: int, z, kappa: complex, tol: float = 1e-15, cap: int = 10**6):
    """Right-hand side of the modular identity, built from the direct series.

    For kind 2:  (-i kappa)^{-1/2} e^{-i z^2/(pi kappa)} theta_4(z/kappa, -1/kappa)
    For kind 3:  same prefactor with theta_3 at the dual parameter.

    The dual series is summed directly (never re-routed) and the prefactor
    is applied as an ordinary product, so comparing against ``theta``
    exercises a genuinely different evaluation path.
    """
    if kind not in (2, 3):
        raise DomainError(f"kind must be 2 or 3, got {kind!r}")
    kappa = _validate(kind, kappa, tol, cap)
    dual = 4 if kind == 2 else 3
    z_in = np.asarray(z, dtype=complex)
    scalar = z_in.ndim == 0
    z_arr = np.atleast_1d(z_in)
    kappa_d = -1.0 / kappa
    w = z_arr / kappa
    front = (-1j * kappa) ** -0.5 * np.exp(-1j * z_arr * z_arr / (math.pi * kappa))
    out = front * _sum_direct(dual, w, kappa_d, tol, cap)
    return complex(out[0]) if scalar else out

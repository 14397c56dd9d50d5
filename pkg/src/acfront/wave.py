"""Travelling-wave profiles of the lattice Allen-Cahn equation.

A horizontal front ``u_{i,j}(t) = Phi(i - c t)`` solves the lattice equation
iff ``(Phi, c)`` satisfies the mixed functional differential equation

    -c Phi'(xi) = Phi(xi+1) + Phi(xi-1) - 2 Phi(xi) + g(Phi(xi)),

with ``Phi(-inf) = 0``, ``Phi(+inf) = 1`` and the phase fixed by
``Phi(0) = 1/2``.  The equation is discretized by collocation on a uniform
grid over ``[-L, L]`` whose spacing divides 1, so the unit shifts are exact
index offsets, and the joint system in ``(Phi, c)`` is solved by damped
Newton.  ``Phi'`` uses central differences.

Reads beyond the grid are closed with the linearized tail recurrence: a ghost
at distance ``m`` past an edge reads ``equilibrium + (edge - equilibrium) *
rho^m``, where ``rho`` is the decay ratio of the dominant tail mode at the
current speed.  The closure is affine in the edge unknowns, keeps the system
square, and avoids the lattice-scale boundary wiggles a hard equilibrium
clamp would inject at the tail amplitude; with it the discrete profile is
strictly monotone.

On top of the profile the module computes:

* ``psi``, the positive kernel element of the adjoint linearization
  ``-c psi' + psi(.+1) + psi(.-1) - 2 psi + g'(Phi) psi = 0``, discretized
  with the same stencils and its own tail closure and resolved as the
  smallest singular vector, normalized so ``<psi, Phi'> = 1``;
* the drift coefficient ``d = -<Phi'', psi>`` governing the curvature
  response of the front;
* the corrector ``r`` solving ``L r + d Phi' = -Phi''`` with ``<psi, r> = 0``;
* oblique speeds ``c_theta`` for propagation directions tilted by ``theta``
  (off-grid shifts by cubic interpolation) and the normal-speed map
  ``dispersion(theta) = c_theta / cos(theta)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from .core import BistableNonlinearity
from .errors import (
    DegenerateKernel,
    NewtonDiverged,
    OutOfRange,
    PinningDetected,
    SolveFailed,
)

__all__ = [
    "WaveProfile",
    "solve_wave",
    "mfde_residual",
    "adjoint_matrix",
    "adjoint_solve",
    "compute_d",
    "solve_r",
    "c_theta",
    "dispersion",
    "phi_inverse",
    "save_wave",
    "load_wave",
]

THETA_MAX = 0.3

# 6th-order central first derivative, 4th-order central second derivative
_D1_COEF = (45.0 / 60.0, -9.0 / 60.0, 1.0 / 60.0)
_D2_COEF = (16.0 / 12.0, -1.0 / 12.0)
_D2_DIAG = -30.0 / 12.0


def _as_nonlinearity(f: Union[BistableNonlinearity, float]) -> BistableNonlinearity:
    if isinstance(f, BistableNonlinearity):
        return f
    return BistableNonlinearity(a=float(f))


def _check_grid(L: float, h: float) -> tuple[int, int]:
    """Return (points per unit shift, half-width in cells)."""
    s = 1.0 / h
    if abs(s - round(s)) > 1e-9:
        raise ValueError(f"1/h must be an integer, got h={h}")
    n_half = L / h
    if abs(n_half - round(n_half)) > 1e-9:
        raise ValueError(f"L must be a multiple of h, got L={L}, h={h}")
    if L < 2.0:
        raise ValueError("half-width L must be at least 2")
    return int(round(s)), int(round(n_half))


def _deriv_pieces(h: float) -> list[tuple[int, float]]:
    pieces = []
    for off, coef in enumerate(_D1_COEF, start=1):
        pieces.append((off, coef / h))
        pieces.append((-off, -coef / h))
    return pieces


def _second_deriv_pieces(h: float) -> list[tuple[int, float]]:
    pieces = [(0, _D2_DIAG / (h * h))]
    for off, coef in enumerate(_D2_COEF, start=1):
        pieces.append((off, coef / (h * h)))
        pieces.append((-off, coef / (h * h)))
    return pieces


def _interp_pieces(offset: float, h: float) -> list[tuple[int, float]]:
    """Grid-index pieces sampling ``x -> Phi(x + offset)``.

    Integer offsets (in grid units) are exact index shifts; fractional ones
    use 4-point cubic Lagrange interpolation.
    """
    p = offset / h
    m = math.floor(p + 0.5)
    if abs(p - m) < 1e-12:
        return [(m, 1.0)]
    m = math.floor(p)
    f = p - m
    return [
        (m - 1, -f * (f - 1.0) * (f - 2.0) / 6.0),
        (m, (f + 1.0) * (f - 1.0) * (f - 2.0) / 2.0),
        (m + 1, -f * (f + 1.0) * (f - 2.0) / 2.0),
        (m + 2, f * (f + 1.0) * (f - 1.0) / 6.0),
    ]


def _stencil_affine(n: int, pieces: Sequence[tuple[int, float]],
                    rho_l: float, rho_r: float,
                    right_target: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Matrix and constant part of an affine stencil with tail closure.

    A read at column ``-m`` (left ghost) resolves to ``Phi_0 * rho_l^m``; a
    read at ``n-1+m`` resolves to ``e + (Phi_{n-1} - e) * rho_r^m`` where
    ``e`` is the right equilibrium (1 for the profile, 0 for the adjoint).
    """
    M = np.zeros((n, n))
    b = np.zeros(n)
    rows = np.arange(n)
    for off, wgt in pieces:
        cols = rows + off
        inside = (cols >= 0) & (cols < n)
        M[rows[inside], cols[inside]] += wgt
        left = cols < 0
        if np.any(left):
            M[rows[left], 0] += wgt * rho_l ** (-cols[left])
        right = cols > n - 1
        if np.any(right):
            decay = rho_r ** (cols[right] - (n - 1))
            M[rows[right], n - 1] += wgt * decay
            b[rows[right]] += wgt * right_target * (1.0 - decay)
    return M, b


def _tail_rate(f: BistableNonlinearity, c: float, shifts: Sequence[float],
               h: float, side: str) -> float:
    """Per-index decay ratio ``rho = exp(-lambda h)`` of the dominant tail mode.

    ``lambda`` is the smallest positive root of the linearized characteristic
    equation at the approached equilibrium (0 on the left, 1 on the right).
    Falls back to a hard clamp (``rho = 0``) if no root is bracketed.
    """
    gp = f.dg(0.0) if side == "left" else f.dg(1.0)
    sgn = 1.0 if side == "left" else -1.0

    def chi(lam: float) -> float:
        mu = sgn * lam
        deriv = sum(coef * (math.exp(mu * h * off) - math.exp(-mu * h * off))
                    for off, coef in enumerate(_D1_COEF, start=1)) * c / h
        shift = sum(math.exp(mu * alpha) for alpha in shifts) - len(shifts)
        return deriv + shift + gp

    lo = 1e-8
    if chi(lo) >= 0.0:
        return 0.0
    hi = 0.25
    while chi(hi) < 0.0:
        hi *= 2.0
        if hi > 64.0:
            return 0.0
    lam = brentq(chi, lo, hi, xtol=1e-14, rtol=1e-14)
    return math.exp(-lam * h)


class _System:
    """Discretized travelling-wave system for a fixed shift set."""

    def __init__(self, f: BistableNonlinearity, n: int, h: float,
                 shifts: Sequence[float]):
        self.f = f
        self.n = n
        self.h = h
        self.shifts = tuple(shifts)
        self.shift_pieces = []
        for alpha in self.shifts:
            self.shift_pieces.extend(_interp_pieces(alpha, h))
        self.shift_pieces.append((0, -float(len(self.shifts))))
        self._built_for = None
        self.rho = (0.0, 0.0)
        self.D = self.bD = self.S = self.bS = None

    def build(self, c: float, rho: Optional[tuple[float, float]] = None):
        if rho is None:
            rho = (_tail_rate(self.f, c, self.shifts, self.h, "left"),
                   _tail_rate(self.f, c, self.shifts, self.h, "right"))
        if self._built_for == rho:
            return
        self.rho = rho
        self.D, self.bD = _stencil_affine(self.n, _deriv_pieces(self.h), *rho)
        self.S, self.bS = _stencil_affine(self.n, self.shift_pieces, *rho)
        self._built_for = rho

    def residual(self, phi: np.ndarray, c: float) -> np.ndarray:
        return c * (self.D @ phi + self.bD) + self.S @ phi + self.bS + self.f(phi)

    def jacobian(self, phi: np.ndarray, c: float) -> np.ndarray:
        J = self.c_part(c)
        J[np.diag_indices(self.n)] += self.f.dg(phi)
        return J

    def c_part(self, c: float) -> np.ndarray:
        return c * self.D + self.S


def _newton(sys: _System, k0: int, phi0: np.ndarray, c0: float,
            tol: float = 1e-11, max_iter: int = 60):
    """Damped Newton on the joint system (collocation rows + phase row).

    The tail-closure rates are refreshed from the current speed while the
    iteration is far from convergence and frozen afterwards, so the final
    iterations solve a fixed square system exactly.
    """
    phi = phi0.copy()
    c = float(c0)
    n = phi.size
    freeze = False
    sys.build(c)
    F = sys.residual(phi, c)
    phase = phi[k0] - 0.5
    norm = max(np.max(np.abs(F)), abs(phase))
    for _ in range(max_iter):
        if norm < tol:
            break
        J = np.empty((n + 1, n + 1))
        J[:n, :n] = sys.jacobian(phi, c)
        J[:n, n] = sys.D @ phi + sys.bD
        J[n, :] = 0.0
        J[n, k0] = 1.0
        rhs = np.empty(n + 1)
        rhs[:n] = -F
        rhs[n] = -phase
        try:
            step = np.linalg.solve(J, rhs)
        except np.linalg.LinAlgError:
            raise NewtonDiverged("singular Newton system") from None
        lam = 1.0
        improved = False
        while lam >= 1.0 / 1024.0:
            trial_phi = phi + lam * step[:n]
            trial_c = c + lam * step[n]
            if not freeze:
                sys.build(trial_c)
            Ft = sys.residual(trial_phi, trial_c)
            pt = trial_phi[k0] - 0.5
            nt = max(np.max(np.abs(Ft)), abs(pt)) if np.all(np.isfinite(Ft)) else np.inf
            if nt < (1.0 - 0.25 * lam) * norm or nt < tol:
                phi, c, F, phase, norm = trial_phi, trial_c, Ft, pt, nt
                improved = True
                break
            lam *= 0.5
        if not improved:
            break
        if not freeze and norm < 1e-6:
            freeze = True
            sys.build(c)
            F = sys.residual(phi, c)
            norm = max(np.max(np.abs(F)), abs(phase))
    return phi, c, norm


@dataclass
class WaveProfile:
    """A solved travelling-wave profile and the objects derived from it."""

    f: BistableNonlinearity
    L: float
    h: float
    xi: np.ndarray
    phi: np.ndarray
    c: float
    rho: tuple[float, float]
    psi: Optional[np.ndarray] = None
    d: Optional[float] = None
    r: Optional[np.ndarray] = None
    _phi_spline: CubicSpline = field(default=None, repr=False, compare=False)
    _r_spline: CubicSpline = field(default=None, repr=False, compare=False)
    _c_theta_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self.xi = np.asarray(self.xi, dtype=float)
        self.phi = np.asarray(self.phi, dtype=float)
        if self._phi_spline is None:
            self._phi_spline = CubicSpline(self.xi, self.phi, bc_type="clamped")
        if self.r is not None and self._r_spline is None:
            self._r_spline = CubicSpline(self.xi, self.r, bc_type="clamped")

    @property
    def a(self) -> float:
        return self.f.a

    @property
    def n(self) -> int:
        return self.xi.size

    def _system(self) -> _System:
        sys = _System(self.f, self.n, self.h, (1.0, -1.0))
        sys.build(self.c, self.rho)
        return sys

    def phi_prime_grid(self) -> np.ndarray:
        sys = self._system()
        return sys.D @ self.phi + sys.bD

    def phi_second_grid(self) -> np.ndarray:
        D2, b2 = _stencil_affine(self.n, _second_deriv_pieces(self.h), *self.rho)
        return D2 @ self.phi + b2

    def linearization(self) -> np.ndarray:
        """Forward linearization around the profile (tail closure included)."""
        return self._system().jacobian(self.phi, self.c)

    def pairing(self, u: np.ndarray, v: np.ndarray) -> float:
        """Trapezoid pairing ``<u, v>`` on the collocation grid."""
        w = u * v
        return float(self.h * (np.sum(w) - 0.5 * w[0] - 0.5 * w[-1]))

    def phi_at(self, x):
        """Profile value at arbitrary points.

        Inside the grid this is the cubic-spline interpolant; outside it
        follows the exponential tail model continuously into the equilibria.
        """
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        x = np.atleast_1d(x).astype(float)
        out = np.empty_like(x)
        left = x < self.xi[0]
        right = x > self.xi[-1]
        mid = ~(left | right)
        if np.any(left):
            lam = -math.log(self.rho[0]) / self.h if self.rho[0] > 0.0 else math.inf
            out[left] = self.phi[0] * np.exp(-lam * (self.xi[0] - x[left]))
        if np.any(right):
            lam = -math.log(self.rho[1]) / self.h if self.rho[1] > 0.0 else math.inf
            out[right] = 1.0 + (self.phi[-1] - 1.0) * np.exp(-lam * (x[right] - self.xi[-1]))
        out[mid] = self._phi_spline(x[mid])
        return float(out[0]) if scalar else out

    def phi_prime_at(self, x):
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        x = np.atleast_1d(x).astype(float)
        out = np.empty_like(x)
        left = x < self.xi[0]
        right = x > self.xi[-1]
        mid = ~(left | right)
        if np.any(left):
            lam = -math.log(self.rho[0]) / self.h if self.rho[0] > 0.0 else math.inf
            out[left] = lam * self.phi[0] * np.exp(-lam * (self.xi[0] - x[left]))
        if np.any(right):
            lam = -math.log(self.rho[1]) / self.h if self.rho[1] > 0.0 else math.inf
            out[right] = -lam * (self.phi[-1] - 1.0) * np.exp(-lam * (x[right] - self.xi[-1]))
        out[mid] = self._phi_spline(x[mid], 1)
        return float(out[0]) if scalar else out

    def r_at(self, x):
        if self.r is None:
            raise SolveFailed("corrector r has not been solved")
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        x = np.atleast_1d(x).astype(float)
        out = np.zeros_like(x)
        mid = (x >= self.xi[0]) & (x <= self.xi[-1])
        out[mid] = self._r_spline(x[mid])
        return float(out[0]) if scalar else out

    def r_prime_at(self, x):
        if self.r is None:
            raise SolveFailed("corrector r has not been solved")
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        x = np.atleast_1d(x).astype(float)
        out = np.zeros_like(x)
        mid = (x >= self.xi[0]) & (x <= self.xi[-1])
        out[mid] = self._r_spline(x[mid], 1)
        return float(out[0]) if scalar else out


def solve_wave(f: Union[BistableNonlinearity, float], L: float = 20.0,
               h: float = 1.0 / 16.0, c0: Optional[float] = None,
               phi0: Optional[np.ndarray] = None, *,
               pinning_threshold: float = 1e-4,
               boundary_tol: float = 1e-3) -> WaveProfile:
    """Solve the travelling-wave system for ``(Phi, c)``.

    Raises :class:`PinningDetected` when the converged speed falls below the
    pinning threshold (the front fails to propagate, so no wave with
    ``c != 0`` exists) and :class:`NewtonDiverged` when damped Newton stalls.
    """
    f = _as_nonlinearity(f)
    _, n_half = _check_grid(L, h)
    n = 2 * n_half + 1
    xi = (np.arange(n) - n_half) * h
    k0 = n_half

    if phi0 is None:
        phi0 = 1.0 / (1.0 + np.exp(-xi / math.sqrt(2.0)))
    if c0 is None:
        c0 = math.sqrt(2.0) * (f.a - 0.5)

    sys = _System(f, n, h, (1.0, -1.0))
    phi, c, norm = _newton(sys, k0, phi0, c0)
    if not norm < 1e-9:
        if abs(c) < pinning_threshold:
            raise PinningDetected(
                f"Newton stalled with |c|={abs(c):.2e} below the pinning threshold")
        raise NewtonDiverged(f"residual stalled at {norm:.3e}")
    if abs(c) < pinning_threshold:
        raise PinningDetected(
            f"converged speed |c|={abs(c):.2e} below threshold {pinning_threshold:g}; "
            "the front is pinned")
    if np.any(np.diff(phi) <= 0.0):
        raise NewtonDiverged("converged profile is not strictly increasing")
    if abs(phi[0]) > boundary_tol or abs(phi[-1] - 1.0) > boundary_tol:
        raise NewtonDiverged(
            "profile does not reach the equilibria at the grid ends; increase L")
    return WaveProfile(f=f, L=float(L), h=float(h), xi=xi, phi=phi, c=c, rho=sys.rho)


def mfde_residual(w: WaveProfile, phi: Optional[np.ndarray] = None,
                  c: Optional[float] = None) -> np.ndarray:
    """Residual of the travelling-wave equation on the collocation grid,
    using the same derivative stencil and tail closure as the solver."""
    phi = w.phi if phi is None else np.asarray(phi, dtype=float)
    c = w.c if c is None else float(c)
    return w._system().residual(phi, c)


def adjoint_matrix(w: WaveProfile) -> np.ndarray:
    """Discretization of the adjoint linearization around the profile.

    The adjoint of ``L u = c u' + u(.+1) + u(.-1) - 2 u + g'(Phi) u`` flips
    the sign of the derivative term.  The same stencils are used, with tail
    closure rates taken from the adjoint characteristic equation; the adjoint
    kernel decays to 0 on both sides, so the closure has no affine part.
    """
    shifts = (1.0, -1.0)
    rho = (_tail_rate(w.f, -w.c, shifts, w.h, "left"),
           _tail_rate(w.f, -w.c, shifts, w.h, "right"))
    D, _ = _stencil_affine(w.n, _deriv_pieces(w.h), *rho, right_target=0.0)
    sys = _System(w.f, w.n, w.h, shifts)
    S, _ = _stencil_affine(w.n, sys.shift_pieces, *rho, right_target=0.0)
    A = -w.c * D + S
    A[np.diag_indices(w.n)] += w.f.dg(w.phi)
    return A


def adjoint_solve(w: WaveProfile, *, separation: float = 10.0) -> np.ndarray:
    """Kernel element of the adjoint linearization, positive and normalized.

    ``psi`` is the smallest right singular vector of the discretized adjoint,
    sign-fixed to be positive and scaled so that the trapezoid pairing
    ``<psi, Phi'> = 1``.  Raises :class:`DegenerateKernel` unless the
    smallest singular value is separated from the second smallest by the
    given factor or the kernel element fails strict positivity.
    """
    A = adjoint_matrix(w)
    sv, Vh = np.linalg.svd(A)[1:]
    if not sv[-2] >= separation * sv[-1]:
        raise DegenerateKernel(
            f"singular values {sv[-1]:.3e}, {sv[-2]:.3e} are not separated")
    psi = Vh[-1].copy()
    if psi.sum() < 0.0:
        psi = -psi
    scale = w.pairing(psi, w.phi_prime_grid())
    if scale <= 0.0:
        raise DegenerateKernel("kernel element is not transverse to Phi'")
    psi = psi / scale
    if not np.all(psi > 0.0):
        raise DegenerateKernel("adjoint kernel element is not strictly positive")
    w.psi = psi
    return psi


def compute_d(w: WaveProfile) -> float:
    """Drift coefficient ``d = -<Phi'', psi>`` (trapezoid pairing)."""
    if w.psi is None:
        adjoint_solve(w)
    w.d = -w.pairing(w.phi_second_grid(), w.psi)
    return w.d


def solve_r(w: WaveProfile, *, residual_tol: float = 1e-7) -> np.ndarray:
    """Corrector ``r`` with ``L r = -Phi'' - d Phi'`` and ``<psi, r> = 0``.

    Minimum-norm least squares on the forward linearization (rank-revealing
    SVD) followed by a shift along the kernel direction to meet the
    orthogonality constraint exactly.  The right-hand side is solvable by
    construction of ``d``, which the residual check enforces a posteriori.
    """
    if w.d is None:
        compute_d(w)
    A = w.linearization()
    rhs = -w.phi_second_grid() - w.d * w.phi_prime_grid()
    U, sv, Vh = np.linalg.svd(A)
    cutoff = w.n * np.finfo(float).eps * sv[0]
    inv = np.where(sv > cutoff, 1.0 / np.where(sv > cutoff, sv, 1.0), 0.0)
    r0 = Vh.T @ (inv * (U.T @ rhs))
    kd = Vh[-1]
    denom = w.pairing(w.psi, kd)
    if abs(denom) < 1e-12:
        raise SolveFailed("kernel direction is orthogonal to psi")
    r = r0 - (w.pairing(w.psi, r0) / denom) * kd
    res = np.max(np.abs(A @ r - rhs))
    if not res < residual_tol:
        raise SolveFailed(f"corrector residual {res:.3e} above {residual_tol:g}")
    w.r = r
    w._r_spline = CubicSpline(w.xi, r, bc_type="clamped")
    return r


def c_theta(w: WaveProfile, theta: float) -> float:
    """Wave speed for propagation direction tilted by ``theta`` (radians).

    Off-grid shifts ``cos(theta)``, ``sin(theta)`` are applied by cubic
    interpolation on the collocation grid.  Only small tilts are supported.
    """
    if abs(theta) > THETA_MAX + 1e-12:
        raise OutOfRange(f"|theta| must be <= {THETA_MAX}, got {theta}")
    key = round(float(theta), 15)
    if key in w._c_theta_cache:
        return w._c_theta_cache[key]
    shifts = (math.cos(theta), math.sin(theta), -math.cos(theta), -math.sin(theta))
    sys = _System(w.f, w.n, w.h, shifts)
    _, c, norm = _newton(sys, w.n // 2, w.phi, w.c)
    if not norm < 1e-7:
        raise NewtonDiverged(f"tilted-wave residual stalled at {norm:.3e}")
    w._c_theta_cache[key] = c
    return c


def dispersion(w: WaveProfile, theta: float) -> float:
    """Normal speed of a planar interface tilted by ``theta``:
    ``D(theta) = c_theta / cos(theta)``."""
    return c_theta(w, theta) / math.cos(theta)


def phi_inverse(w: WaveProfile, v):
    """Inverse of the profile: the ``xi`` with ``phi(xi) = v``.

    Bracketing bisection on the profile interpolant; the result satisfies
    ``|phi(xi) - v| < 1e-12``.  Raises :class:`OutOfRange` unless ``v`` lies
    strictly inside the represented range ``(phi(-L), phi(L))``.
    """
    v = np.asarray(v, dtype=float)
    scalar = v.ndim == 0
    v = np.atleast_1d(v)
    if np.any(v <= w.phi[0]) or np.any(v >= w.phi[-1]):
        raise OutOfRange("value outside the represented profile range")
    hi_idx = np.searchsorted(w.phi, v)
    lo = w.xi[hi_idx - 1].astype(float).copy()
    hi = w.xi[hi_idx].astype(float).copy()
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        below = w._phi_spline(mid) < v
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    out = 0.5 * (lo + hi)
    return float(out[0]) if scalar else out


def _fmt(values) -> str:
    return "[" + ", ".join(format(float(v), ".17g") for v in np.atleast_1d(values)) + "]"


def save_wave(w: WaveProfile, path: str) -> None:
    """Write the profile as NDJSON: one metadata record, then one record per
    array, with values rendered at 17 significant digits (round-trip exact)."""
    meta = {
        "type": "wave_profile",
        "kind": w.f.kind,
        "a": format(w.a, ".17g"),
        "L": format(w.L, ".17g"),
        "h": format(w.h, ".17g"),
        "c": format(w.c, ".17g"),
        "rho_l": format(w.rho[0], ".17g"),
        "rho_r": format(w.rho[1], ".17g"),
    }
    if w.d is not None:
        meta["d"] = format(w.d, ".17g")
    lines = [json.dumps(meta)]
    if w.f.kind == "table":
        lines.append('{"type": "array", "name": "table_u", "values": %s}' % _fmt(w.f.table_u))
        lines.append('{"type": "array", "name": "table_g", "values": %s}' % _fmt(w.f.table_g))
    lines.append('{"type": "array", "name": "phi", "values": %s}' % _fmt(w.phi))
    if w.psi is not None:
        lines.append('{"type": "array", "name": "psi", "values": %s}' % _fmt(w.psi))
    if w.r is not None:
        lines.append('{"type": "array", "name": "r", "values": %s}' % _fmt(w.r))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_wave(path: str) -> WaveProfile:
    """Read a profile written by :func:`save_wave`."""
    arrays = {}
    meta = None
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            if rec.get("type") == "wave_profile":
                meta = rec
            elif rec.get("type") == "array":
                arrays[rec["name"]] = np.asarray(rec["values"], dtype=float)
    if meta is None or "phi" not in arrays:
        raise ValueError(f"{path} does not contain a wave profile")
    if meta.get("kind", "cubic") == "table":
        f = BistableNonlinearity(a=float(meta["a"]), kind="table",
                                 table_u=arrays["table_u"], table_g=arrays["table_g"])
    else:
        f = BistableNonlinearity(a=float(meta["a"]))
    L = float(meta["L"])
    h = float(meta["h"])
    _, n_half = _check_grid(L, h)
    xi = (np.arange(2 * n_half + 1) - n_half) * h
    w = WaveProfile(f=f, L=L, h=h, xi=xi, phi=arrays["phi"], c=float(meta["c"]),
                    rho=(float(meta["rho_l"]), float(meta["rho_r"])))
    if "psi" in arrays:
        w.psi = arrays["psi"]
    if "d" in meta:
        w.d = float(meta["d"])
    if "r" in arrays:
        w.r = arrays["r"]
        w._r_spline = CubicSpline(w.xi, w.r, bc_type="clamped")
    return w

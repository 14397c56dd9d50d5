"""Lattice containers, bistable nonlinearities and discrete difference operators.

Everything here is binary64 and side-effect free: operators return fresh
arrays and never mutate their inputs.  Two boundary policies appear throughout
the package and are fixed at this level:

* in the horizontal (``i``) direction fields always use ``dirichlet_equilibria``
  ghosts: reads left of the window give the equilibrium 0, reads right of it
  give 1;
* in the vertical (``j``) direction either ``periodic`` (indices wrap) or
  ``reflect`` (the ghost equals the edge value, i.e. zero discrete flux).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.interpolate import CubicSpline

__all__ = [
    "BistableNonlinearity",
    "LatticeField",
    "PhaseSequence",
    "discrete_laplacian",
    "d_plus",
    "d_minus",
    "d2",
    "beta",
    "alpha",
    "deviation_seminorm",
]

BOUNDARY_J = ("periodic", "reflect")


@dataclass(frozen=True)
class BistableNonlinearity:
    """Bistable reaction term ``g`` with stable zeros 0, 1 and unstable zero ``a``.

    The default is the cubic ``g(u) = u (1 - u) (u - a)``.  A sampled table
    ``(table_u, table_g)`` may be supplied instead; it is interpolated with a
    cubic spline and validated against the bistability hypotheses on
    construction (zeros at 0, ``a``, 1 with the correct sign pattern and
    negative slopes at 0 and 1).
    """

    a: float
    kind: str = "cubic"
    table_u: Optional[np.ndarray] = None
    table_g: Optional[np.ndarray] = None
    _spline: CubicSpline = field(init=False, repr=False, compare=False, default=None)

    def __post_init__(self):
        if not 0.0 < self.a < 1.0:
            raise ValueError(f"detuning a must lie in (0, 1), got {self.a}")
        if self.kind == "cubic":
            return
        if self.kind != "table":
            raise ValueError(f"unknown nonlinearity kind {self.kind!r}")
        if self.table_u is None or self.table_g is None:
            raise ValueError("table nonlinearity needs table_u and table_g")
        u = np.asarray(self.table_u, dtype=float)
        g = np.asarray(self.table_g, dtype=float)
        if u.ndim != 1 or u.shape != g.shape or u.size < 8:
            raise ValueError("table_u/table_g must be equal-length 1d arrays")
        if np.any(np.diff(u) <= 0):
            raise ValueError("table_u must be strictly increasing")
        if u[0] > -0.5 or u[-1] < 1.5:
            raise ValueError("table must cover at least [-0.5, 1.5]")
        object.__setattr__(self, "table_u", u)
        object.__setattr__(self, "table_g", g)
        object.__setattr__(self, "_spline", CubicSpline(u, g))
        self._validate_table()

    def _validate_table(self):
        tol = 1e-8
        for root in (0.0, self.a, 1.0):
            if abs(float(self._spline(root))) > tol:
                raise ValueError(f"table nonlinearity must vanish at u={root}")
        if self.dg(0.0) >= 0.0 or self.dg(1.0) >= 0.0:
            raise ValueError("table nonlinearity must have negative slope at 0 and 1")
        lo, hi = float(self.table_u[0]), float(self.table_u[-1])
        margin = 1e-4
        for a_, b_, sign in (
            (lo, -margin, +1.0),
            (margin, self.a - margin, -1.0),
            (self.a + margin, 1.0 - margin, +1.0),
            (1.0 + margin, hi, -1.0),
        ):
            if a_ >= b_:
                continue
            s = np.linspace(a_, b_, 257)
            if np.any(sign * self._spline(s) <= 0.0):
                raise ValueError("table nonlinearity violates the bistable sign pattern")

    def __call__(self, u):
        """Evaluate ``g(u)`` elementwise."""
        if self.kind == "cubic":
            u = np.asarray(u, dtype=float)
            out = u * (1.0 - u) * (u - self.a)
            return float(out) if out.ndim == 0 else out
        out = self._spline(u)
        return float(out) if np.ndim(u) == 0 else np.asarray(out, dtype=float)

    def dg(self, u):
        """Evaluate ``g'(u)`` elementwise."""
        if self.kind == "cubic":
            u = np.asarray(u, dtype=float)
            out = -3.0 * u * u + 2.0 * (1.0 + self.a) * u - self.a
            return float(out) if out.ndim == 0 else out
        out = self._spline(u, 1)
        return float(out) if np.ndim(u) == 0 else np.asarray(out, dtype=float)

    def dg_sup(self, lo: float = -1.0, hi: float = 2.0) -> float:
        """Supremum of ``|g'|`` over ``[lo, hi]``, used by step-size bounds."""
        if self.kind == "cubic":
            # quadratic in u: extremum at the vertex plus the endpoints
            cand = [lo, hi]
            vertex = (1.0 + self.a) / 3.0
            if lo < vertex < hi:
                cand.append(vertex)
            return max(abs(self.dg(u)) for u in cand)
        s = np.linspace(lo, hi, 4097)
        return float(np.max(np.abs(self.dg(s))))


def _wrap_j(idx: np.ndarray, height: int, boundary_j: str) -> np.ndarray:
    if boundary_j == "periodic":
        return np.mod(idx, height)
    return np.clip(idx, 0, height - 1)


@dataclass
class LatticeField:
    """A rectangular window of lattice values ``u[i, j]``.

    ``values`` has shape ``(width, height)`` (row-major, binary64) and the
    first axis carries lattice coordinates ``i = i_offset + row``.  Reads past
    the horizontal edges give the pinned equilibria (0 left, 1 right); reads
    past the vertical edges follow ``boundary_j``.
    """

    values: np.ndarray
    i_offset: int = 0
    boundary_j: str = "periodic"

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2:
            raise ValueError("values must be a 2d array (width, height)")
        if self.boundary_j not in BOUNDARY_J:
            raise ValueError(f"boundary_j must be one of {BOUNDARY_J}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field values must be finite")

    @property
    def width(self) -> int:
        return self.values.shape[0]

    @property
    def height(self) -> int:
        return self.values.shape[1]

    def lattice_i(self) -> np.ndarray:
        """Lattice coordinates of the rows, ``i_offset .. i_offset+width-1``."""
        return self.i_offset + np.arange(self.width)

    def at(self, i: int, j: int) -> float:
        """Value at lattice site ``(i, j)`` honouring both boundary policies."""
        row = i - self.i_offset
        if row < 0:
            return 0.0
        if row >= self.width:
            return 1.0
        col = int(_wrap_j(np.asarray(j), self.height, self.boundary_j))
        return float(self.values[row, col])

    def padded(self) -> np.ndarray:
        """Values with one ghost layer on every side, shape (W+2, H+2)."""
        w, h = self.values.shape
        out = np.empty((w + 2, h + 2), dtype=float)
        out[1:-1, 1:-1] = self.values
        out[0, 1:-1] = 0.0
        out[-1, 1:-1] = 1.0
        if self.boundary_j == "periodic":
            out[1:-1, 0] = self.values[:, -1]
            out[1:-1, -1] = self.values[:, 0]
        else:
            out[1:-1, 0] = self.values[:, 0]
            out[1:-1, -1] = self.values[:, -1]
        # corners never enter the 5-point stencil; fill for definiteness
        out[0, 0] = out[0, 1]
        out[0, -1] = out[0, -2]
        out[-1, 0] = out[-1, 1]
        out[-1, -1] = out[-1, -2]
        return out

    def copy(self) -> "LatticeField":
        return LatticeField(self.values.copy(), self.i_offset, self.boundary_j)


def discrete_laplacian(u: LatticeField, i: Optional[int] = None, j: Optional[int] = None):
    """Five-point lattice Laplacian ``u_{i+1,j}+u_{i,j+1}+u_{i-1,j}+u_{i,j-1}-4u_{i,j}``.

    With no indices, returns the full array over the window using ghost
    values; with ``(i, j)`` returns the scalar at that site.
    """
    if i is None and j is None:
        p = u.padded()
        return (p[2:, 1:-1] + p[:-2, 1:-1] + p[1:-1, 2:] + p[1:-1, :-2]
                - 4.0 * p[1:-1, 1:-1])
    if i is None or j is None:
        raise ValueError("pass both i and j, or neither")
    return (u.at(i + 1, j) + u.at(i - 1, j) + u.at(i, j + 1) + u.at(i, j - 1)
            - 4.0 * u.at(i, j))


@dataclass
class PhaseSequence:
    """A sequence indexed by the vertical coordinate ``j`` (one value per row)."""

    values: np.ndarray
    boundary_j: str = "periodic"

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1 or self.values.size < 1:
            raise ValueError("values must be a non-empty 1d array")
        if self.boundary_j not in BOUNDARY_J:
            raise ValueError(f"boundary_j must be one of {BOUNDARY_J}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("sequence values must be finite")

    def __len__(self) -> int:
        return self.values.size

    def shifted(self, offset: int) -> np.ndarray:
        """Values of ``s_{j+offset}`` for every ``j`` under the boundary policy."""
        idx = np.arange(len(self)) + offset
        return self.values[_wrap_j(idx, len(self), self.boundary_j)]

    def replace(self, values: np.ndarray) -> "PhaseSequence":
        return PhaseSequence(np.asarray(values, dtype=float), self.boundary_j)


def _maybe_at(arr: np.ndarray, j):
    return arr if j is None else float(arr[j])


def d_plus(s: PhaseSequence, j: Optional[int] = None):
    """Forward difference ``s_{j+1} - s_j``."""
    return _maybe_at(s.shifted(+1) - s.values, j)


def d_minus(s: PhaseSequence, j: Optional[int] = None):
    """Backward difference ``s_j - s_{j-1}``."""
    return _maybe_at(s.values - s.shifted(-1), j)


def d2(s: PhaseSequence, j: Optional[int] = None):
    """Second difference ``s_{j+1} - 2 s_j + s_{j-1}``."""
    return _maybe_at(s.shifted(+1) - 2.0 * s.values + s.shifted(-1), j)


def beta(s: PhaseSequence, j: Optional[int] = None):
    """Discrete slope factor ``sqrt(1 + (|d_plus|^2 + |d_minus|^2)/2) >= 1``."""
    dp = s.shifted(+1) - s.values
    dm = s.values - s.shifted(-1)
    return _maybe_at(np.sqrt(1.0 + 0.5 * (dp * dp + dm * dm)), j)


def alpha(s: PhaseSequence, j: Optional[int] = None):
    """``beta^2 - 1 = (|d_plus|^2 + |d_minus|^2)/2 >= 0``."""
    dp = s.shifted(+1) - s.values
    dm = s.values - s.shifted(-1)
    return _maybe_at(0.5 * (dp * dp + dm * dm), j)


def deviation_seminorm(s: PhaseSequence) -> float:
    """``sup_j |s_j - s_{j0}|`` anchored at the first entry."""
    return float(np.max(np.abs(s.values - s.values[0])))

"""Explicit upwind discretisation of diagonal 2x2 transport with feedback.

Cells j = 1..J cover [0, 1] with centres x_j = (j - 1/2) dx; index 0 and
J+1 are ghost cells closed by the feedback matrix K.  Two steppers are
provided: the plain first order upwind update and the same update with the
modified-equation diffusion eps+- added back as a centred second
difference.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .models import SystemSpec, cell_centers, initial_profiles


class ClosureError(ArithmeticError):
    """The gradient half of the feedback condition cannot be solved."""


@dataclass(frozen=True)
class Discretization:
    J: int
    dx: float
    cfl: float
    dt: float
    mu: float

    @property
    def x(self) -> np.ndarray:
        return cell_centers(self.J)

    @property
    def x_all(self) -> np.ndarray:
        return cell_centers(self.J, include_ghosts=True)


@dataclass(frozen=True)
class ViscosityCoeffs:
    eps_plus: float
    eps_minus: float

    @property
    def eps_max(self) -> float:
        return max(self.eps_plus, self.eps_minus)


@dataclass
class StateField:
    """Both invariants on J+2 points; 0 and J+1 are ghosts."""

    u_plus: np.ndarray
    u_minus: np.ndarray
    time_index: int = 0

    @property
    def J(self) -> int:
        return self.u_plus.size - 2

    @property
    def interior(self):
        return self.u_plus[1:-1], self.u_minus[1:-1]

    def copy(self) -> "StateField":
        return StateField(self.u_plus.copy(), self.u_minus.copy(), self.time_index)


@dataclass(frozen=True)
class FeedbackMatrix:
    k: np.ndarray = field(default_factory=lambda: np.eye(2))

    def __post_init__(self):
        k = np.array(self.k, dtype=float)
        if k.shape != (2, 2):
            raise ValueError(f"feedback matrix must be 2x2, got shape {k.shape}")
        k.setflags(write=False)
        object.__setattr__(self, "k", k)

    @classmethod
    def exponential(cls, mu: float, scale: float = 1.0) -> "FeedbackMatrix":
        """K = scale * diag(e^{-mu/2}, e^{-mu/2})."""
        return cls(scale * np.exp(-0.5 * mu) * np.eye(2))


def build_discretization(spec: SystemSpec, J: int, cfl: float, mu: float) -> Discretization:
    if int(J) != J or J < 2:
        raise ValueError(f"need an integer J >= 2, got {J}")
    if not 0.0 < cfl <= 1.0:
        raise ValueError(f"CFL condition violated: need 0 < cfl <= 1, got {cfl}")
    if not mu > 0.0:
        raise ValueError(f"mu must be positive, got {mu}")
    dx = 1.0 / J
    return Discretization(int(J), dx, float(cfl), cfl * dx / spec.max_speed, float(mu))


def diffusion_coefficients(spec: SystemSpec, d: Discretization) -> ViscosityCoeffs:
    """eps = a dx (1 - a dt/dx) / 2 for each component's own speed."""
    lam = d.dt / d.dx
    ap, am = spec.a_plus, abs(spec.a_minus)
    return ViscosityCoeffs(0.5 * ap * d.dx * (1.0 - ap * lam),
                           0.5 * am * d.dx * (1.0 - am * lam))


def initial_data(model: str, J: int, grid: Discretization | None = None,
                 variant: str = "model-default", spec: SystemSpec | None = None,
                 steady=None, center: bool = False) -> StateField:
    if J < 1:
        raise ValueError(f"need J >= 1, got {J}")
    if grid is not None and grid.J != J:
        raise ValueError(f"grid has J={grid.J}, asked for J={J}")
    up = np.zeros(J + 2)
    um = np.zeros(J + 2)
    up[1:-1], um[1:-1] = initial_profiles(model, cell_centers(J), variant,
                                          spec=spec, steady=steady, center=center)
    return StateField(up, um, 0)


def _closure_inverse(K: FeedbackMatrix) -> np.ndarray:
    k = K.k
    det = k[0, 0] * k[1, 1] - k[0, 1] * k[1, 0]
    if abs(det) < 1e-14 * max(np.sum(k * k), 1e-300):
        raise ClosureError(f"feedback matrix is singular (det={det:g}); gradient ghosts undefined")
    return np.array([[k[1, 1], -k[0, 1]], [-k[1, 0], k[0, 0]]]) / det


def _close_inplace(up: np.ndarray, um: np.ndarray, k: np.ndarray, kinv: np.ndarray | None):
    J = up.size - 2
    out_p = up[J]
    in_m = um[1]
    up[0] = k[0, 0] * out_p + k[0, 1] * in_m
    um[J + 1] = k[1, 0] * out_p + k[1, 1] * in_m
    if kinv is None:
        return
    # K (U+_{J+1} - U+_J, U-_1 - U-_0) = (U+_1 - U+_0, U-_{J+1} - U-_J)
    r0 = up[1] - up[0]
    r1 = um[J + 1] - um[J]
    g0 = kinv[0, 0] * r0 + kinv[0, 1] * r1
    g1 = kinv[1, 0] * r0 + kinv[1, 1] * r1
    up[J + 1] = out_p + g0
    um[0] = in_m - g1


def close_boundaries(state: StateField, K: FeedbackMatrix, gradient: bool = True) -> StateField:
    """Return a copy of ``state`` with all four ghost values set.

    The value condition fixes U+_0 and U-_{J+1} from the outgoing traces;
    the gradient condition is then a 2x2 system for U+_{J+1} and U-_0.
    With ``gradient=False`` only the value condition is applied and the
    remaining ghosts are left untouched.
    """
    out = state.copy()
    _close_inplace(out.u_plus, out.u_minus, K.k, _closure_inverse(K) if gradient else None)
    return out


@dataclass(frozen=True)
class _Stencil:
    """Three-point weights for both components."""

    cp: float  # U+_j
    lp: float  # U+_{j-1}
    rp: float  # U+_{j+1}
    cm: float  # U-_j
    lm: float  # U-_{j-1}
    rm: float  # U-_{j+1}


def _stencil(spec: SystemSpec, d: Discretization, v: ViscosityCoeffs | None) -> _Stencil:
    lam = d.dt / d.dx
    nu_p = spec.a_plus * lam
    nu_m = abs(spec.a_minus) * lam
    if v is None:
        dp = dm = 0.0
    else:
        dp = v.eps_plus * d.dt / d.dx**2
        dm = v.eps_minus * d.dt / d.dx**2
    # written as convex-like weights so that nu = 1, eps = 0 is an exact shift
    return _Stencil(1.0 - nu_p - 2.0 * dp, nu_p + dp, dp,
                    1.0 - nu_m - 2.0 * dm, dm, nu_m + dm)


def _advance(up, um, new_p, new_m, s: _Stencil):
    np.multiply(up[1:-1], s.cp, out=new_p[1:-1])
    new_p[1:-1] += s.lp * up[:-2]
    if s.rp:
        new_p[1:-1] += s.rp * up[2:]
    np.multiply(um[1:-1], s.cm, out=new_m[1:-1])
    new_m[1:-1] += s.rm * um[2:]
    if s.lm:
        new_m[1:-1] += s.lm * um[:-2]


def step_viscous_upwind(state: StateField, spec: SystemSpec, d: Discretization,
                        v: ViscosityCoeffs, K: FeedbackMatrix) -> StateField:
    closed = close_boundaries(state, K)
    new = StateField(closed.u_plus.copy(), closed.u_minus.copy(), state.time_index + 1)
    _advance(closed.u_plus, closed.u_minus, new.u_plus, new.u_minus, _stencil(spec, d, v))
    return new


def step_plain_upwind(state: StateField, spec: SystemSpec, d: Discretization,
                      K: FeedbackMatrix) -> StateField:
    closed = close_boundaries(state, K, gradient=False)
    new = StateField(closed.u_plus.copy(), closed.u_minus.copy(), state.time_index + 1)
    _advance(closed.u_plus, closed.u_minus, new.u_plus, new.u_minus, _stencil(spec, d, None))
    return new


class Stepper:
    """Reusable two-buffer integrator used for long runs.

    ``current`` always holds closed ghosts after construction and after
    every call to :meth:`step`.
    """

    def __init__(self, state: StateField, spec: SystemSpec, d: Discretization,
                 K: FeedbackMatrix, scheme: str = "viscous"):
        if scheme not in ("viscous", "plain"):
            raise ValueError(f"unknown scheme {scheme!r}; expected 'viscous' or 'plain'")
        v = diffusion_coefficients(spec, d) if scheme == "viscous" else None
        self.stencil = _stencil(spec, d, v)
        self.k = K.k
        try:
            self.kinv = _closure_inverse(K)
        except ClosureError:
            # the plain update never reads U+_{J+1} or U-_0
            if scheme == "viscous":
                raise
            self.kinv = None
        self.current = state.copy()
        self._next = state.copy()
        self._close()

    def _close(self):
        _close_inplace(self.current.u_plus, self.current.u_minus, self.k, self.kinv)

    def step(self) -> StateField:
        cur, nxt = self.current, self._next
        _advance(cur.u_plus, cur.u_minus, nxt.u_plus, nxt.u_minus, self.stencil)
        nxt.time_index = cur.time_index + 1
        self.current, self._next = nxt, cur
        self._close()
        return self.current


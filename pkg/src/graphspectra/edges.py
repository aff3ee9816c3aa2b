"""Closed-form boundary data for the operators living on single edges.

Three edge operators are supported: the free Laplacian -d^2/dx^2 on a
finite interval, the free Dirac operator with mass term c^2/2 on a finite
interval, and the Laplacian on a half-line.  For each one this module
evaluates the boundary response matrix M(lambda) (the matrix that maps
prescribed trace data to the complementary trace data of the solution of
the edge eigenvalue equation), its derivative, the defect solutions
themselves, and the spectrum of the decoupled (trace-zero) edge operator.

All interval formulas are written as ratios of the entire functions

    S(w) = sin(sqrt(w)) / sqrt(w),    C(w) = cos(sqrt(w)),

evaluated at w = (length * wavenumber)^2, which is a polynomial in the
spectral parameter.  This removes every branch-cut and removable-
singularity issue: the same expression is valid above threshold, inside
spectral gaps and at complex spectral parameters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

__all__ = [
    "Laplacian",
    "Dirac",
    "HalfLineLaplacian",
    "EdgeModel",
    "EdgeModelError",
    "PoleOfWeylError",
    "DefectElement",
    "DIRAC_GRAPH_FROM_HAT",
    "boundary_dim",
    "weyl",
    "weyl_derivative",
    "weyl_norm_prime",
    "default_lambda0",
    "transform_triplet",
    "defect_element",
    "green_identity_residual",
    "decoupled_eigenvalues",
    "pole_distance",
]


class EdgeModelError(ValueError):
    """Invalid edge-model parameters or inadmissible spectral point."""


class PoleOfWeylError(EdgeModelError):
    """The spectral parameter sits (numerically) on a decoupled eigenvalue."""

    def __init__(self, lam, nearest_pole):
        self.lam = lam
        self.nearest_pole = nearest_pole
        super().__init__(
            f"lambda={lam} too close to decoupled eigenvalue {nearest_pole}"
        )


@dataclass(frozen=True)
class Laplacian:
    """Free Laplacian -d^2/dx^2 on finite interval edges."""

    kind = "laplacian"


@dataclass(frozen=True)
class Dirac:
    """Free Dirac operator on finite interval edges; ``c`` is the speed of light."""

    c: float
    kind = "dirac"

    def __post_init__(self):
        if not self.c > 0:
            raise EdgeModelError(f"Dirac speed of light must be positive, got {self.c}")


@dataclass(frozen=True)
class HalfLineLaplacian:
    """Free Laplacian on a half-line edge (one boundary point, d = 1)."""

    kind = "half_line_laplacian"


EdgeModel = Union[Laplacian, Dirac, HalfLineLaplacian]

#: Unitary turning the Dirac "hat" trace maps into the graph trace maps
#: (first-component values / scaled second-component values), written as a
#: 2x2 block matrix of 2x2 blocks acting on (Gamma0_hat, Gamma1_hat).
DIRAC_GRAPH_FROM_HAT = np.array(
    [
        [1, 0, 0, 0],
        [0, 0, 0, 1j],
        [0, 0, 1, 0],
        [0, -1j, 0, 0],
    ],
    dtype=complex,
)

_SERIES_CUTOFF = 1e-3

# Taylor coefficients around w = 0 (w = z^2):
#   S(w) = sin(z)/z, C(w) = cos(z), S'(w) = dS/dw,
#   D1(w) = -d/dw (C/S), E1(w) = d/dw (1/S).
_S_COEF = [1.0, -1 / 6, 1 / 120, -1 / 5040, 1 / 362880, -1 / 39916800]
_C_COEF = [1.0, -1 / 2, 1 / 24, -1 / 720, 1 / 40320, -1 / 3628800]
_SP_COEF = [-1 / 6, 1 / 60, -1 / 1680, 1 / 90720, -1 / 7983360]
_D1_COEF = [1 / 3, 2 / 45, 2 / 315, 4 / 4725, 10 / 93555]
_E1_COEF = [1 / 6, 7 / 180, 31 / 5040, 127 / 151200]


def _poly(coef, w):
    acc = 0.0
    for a in reversed(coef):
        acc = acc * w + a
    return acc


def _sc(w):
    """Return (S(w), C(w)); exact real output for real w."""
    if abs(w) < _SERIES_CUTOFF:
        return _poly(_S_COEF, w), _poly(_C_COEF, w)
    if isinstance(w, complex) and w.imag != 0.0:
        z = np.sqrt(complex(w))
        return complex(np.sin(z) / z), complex(np.cos(z))
    w = float(np.real(w))
    if w > 0:
        z = math.sqrt(w)
        return math.sin(z) / z, math.cos(z)
    y = math.sqrt(-w)
    if y > 700.0:
        raise EdgeModelError(
            f"hyperbolic overflow at w={w}; use the dedicated stable paths"
        )
    return math.sinh(y) / y, math.cosh(y)


def _sc_prime(w):
    """dS/dw, with the removable singularity at w = 0 resolved by series."""
    if abs(w) < _SERIES_CUTOFF:
        return _poly(_SP_COEF, w)
    s, c = _sc(w)
    return (c - s) / (2 * w)


def _csch(y):
    # 1/sinh for y > 0 without overflow; underflows cleanly to 0.0.
    if y < 20.0:
        return 1.0 / math.sinh(y)
    e = math.exp(-y)
    return 2.0 * e / (1.0 - e * e)


def _is_real(lam) -> bool:
    return np.imag(lam) == 0.0


def boundary_dim(model: EdgeModel) -> int:
    """Dimension of the per-edge boundary space (2 on intervals, 1 on a half-line)."""
    return 1 if isinstance(model, HalfLineLaplacian) else 2


def _check_triplet(model: EdgeModel, triplet: str):
    if triplet not in ("graph", "hat"):
        raise EdgeModelError(f"unknown triplet {triplet!r}")
    if triplet == "hat" and not isinstance(model, Dirac):
        raise EdgeModelError("the 'hat' trace maps exist only for the Dirac model")


def _check_length(model: EdgeModel, ell: float):
    if isinstance(model, HalfLineLaplacian):
        if not math.isinf(ell):
            raise EdgeModelError("half-line model requires length = inf")
        return
    if not (ell > 0 and math.isfinite(ell)):
        raise EdgeModelError(f"interval edge needs finite positive length, got {ell}")


def pole_distance(model: EdgeModel, ell: float, lam, triplet: str = "graph"):
    """Distance from ``lam`` to the decoupled edge spectrum and the nearest point.

    For interval models the decoupled spectrum is the closed-form pole set of
    the boundary response matrix; for the half-line it is the ray [0, inf).
    """
    _check_triplet(model, triplet)
    _check_length(model, ell)
    lam = complex(lam)
    if isinstance(model, HalfLineLaplacian):
        if lam.real <= 0:
            return abs(lam), 0.0
        return abs(lam.imag), lam.real
    if isinstance(model, Laplacian):
        candidates = _laplacian_pole_candidates(ell, lam)
    else:
        candidates = _dirac_pole_candidates(model.c, ell, lam, triplet)
    dists = [abs(lam - p) for p in candidates]
    i = int(np.argmin(dists))
    return dists[i], candidates[i]


def _laplacian_pole_candidates(ell, lam):
    n_guess = ell * math.sqrt(max(lam.real, 0.0)) / math.pi
    lo = max(1, int(n_guess) - 2)
    return [(n * math.pi / ell) ** 2 for n in range(lo, lo + 5)]


def _dirac_pole_candidates(c, ell, lam, triplet):
    # Graph triplet poles: sin(ell*k)=0 (k != 0) plus the gap edge -c^2/2;
    # hat triplet poles: cos(ell*k)=0.
    ck2 = max(abs(lam) ** 2 - (c * c / 2) ** 2, 0.0)
    n_guess = ell * math.sqrt(ck2) / (c * math.pi)
    out = []
    if triplet == "graph":
        out.append(-c * c / 2)
        offsets = [n for n in range(max(1, int(n_guess) - 2), int(n_guess) + 4)]
    else:
        offsets = [n + 0.5 for n in range(max(0, int(n_guess) - 2), int(n_guess) + 4)]
    for n in offsets:
        root = math.sqrt((c * n * math.pi / ell) ** 2 + c ** 4 / 4)
        out.extend([root, -root])
    return out


def _guard_pole(model, ell, lam, triplet):
    dist, pole = pole_distance(model, ell, lam, triplet)
    if dist < 1e-9 * max(1.0, abs(pole)):
        raise PoleOfWeylError(lam, pole)


def weyl(model: EdgeModel, ell: float, lam, triplet: str = "graph") -> np.ndarray:
    """Boundary response matrix M(lambda) of one edge.

    ``triplet="hat"`` selects the alternative Dirac trace maps (first
    component at the left endpoint paired with the scaled second component
    at the right endpoint); ``"graph"`` is the convention used for vertex
    couplings throughout the package.
    """
    _check_triplet(model, triplet)
    _check_length(model, ell)
    _guard_pole(model, ell, lam, triplet)
    if isinstance(model, Laplacian):
        return _weyl_laplacian(ell, lam)
    if isinstance(model, HalfLineLaplacian):
        return np.array([[_halfline_m(lam)]], dtype=complex)
    return _weyl_dirac(model.c, ell, lam, triplet)


def _weyl_laplacian(ell, lam):
    w = ell * ell * lam
    if _is_real(lam) and np.real(w) < -1.0:
        kappa = math.sqrt(-np.real(lam))
        y = kappa * ell
        m11 = -kappa / math.tanh(y)
        m12 = kappa * _csch(y)
    else:
        s, c = _sc(w)
        m11 = -c / (ell * s)
        m12 = 1.0 / (ell * s)
    return np.array([[m11, m12], [m12, m11]], dtype=complex)


def _weyl_dirac(c, ell, lam, triplet):
    half_gap = c * c / 2
    w = ell * ell * (lam * lam - half_gap ** 2) / (c * c)
    s, cw = _sc(w)
    if triplet == "hat":
        m11 = (lam - half_gap) * ell * s / cw
        m12 = 1.0 / cw
        m22 = (lam + half_gap) * ell * s / (c * c * cw)
        return np.array([[m11, m12], [m12, m22]], dtype=complex)
    g = c * c / (ell * (lam + half_gap) * s)
    gc = g * cw
    return np.array([[-gc, -1j * g], [1j * g, -gc]], dtype=complex)


def _halfline_m(lam):
    # Herglotz branch of i*sqrt(lambda): continues -sqrt(-lambda) from the
    # negative half-axis, with m(conj(lam)) = conj(m(lam)).
    lam = complex(lam)
    if lam.imag == 0.0 and lam.real >= 0.0:
        raise EdgeModelError(
            "half-line boundary response undefined on the ray [0, inf)"
        )
    z = np.sqrt(lam)
    if z.imag < 0:
        z = -z
    return complex(1j * z)


def weyl_derivative(model: EdgeModel, ell: float, lam, triplet: str = "graph") -> np.ndarray:
    """d/dlambda of :func:`weyl`, from the differentiated closed forms."""
    _check_triplet(model, triplet)
    _check_length(model, ell)
    _guard_pole(model, ell, lam, triplet)
    if isinstance(model, Laplacian):
        return _weyl_laplacian_deriv(ell, lam)
    if isinstance(model, HalfLineLaplacian):
        lam = complex(lam)
        z = np.sqrt(lam)
        if z.imag < 0:
            z = -z
        if lam.imag == 0.0 and lam.real >= 0.0:
            raise EdgeModelError(
                "half-line boundary response undefined on the ray [0, inf)"
            )
        return np.array([[1j / (2 * z)]], dtype=complex)
    return _weyl_dirac_deriv(model.c, ell, lam, triplet)


def _weyl_laplacian_deriv(ell, lam):
    w = ell * ell * lam
    if _is_real(lam) and np.real(w) < -1.0:
        kappa = math.sqrt(-np.real(lam))
        y = kappa * ell
        coth = 1.0 / math.tanh(y)
        csch = _csch(y)
        d11 = (coth - y * (coth * coth - 1.0)) / (2 * kappa)
        d12 = csch * (y * coth - 1.0) / (2 * kappa)
    elif abs(w) < _SERIES_CUTOFF:
        d11 = ell * _poly(_D1_COEF, w)
        d12 = ell * _poly(_E1_COEF, w)
    else:
        s, c = _sc(w)
        sp = (c - s) / (2 * w)
        d11 = ell * (s * s / 2 + c * (c - s) / (2 * w)) / (s * s)
        d12 = ell * (-sp / (s * s))
    return np.array([[d11, d12], [d12, d11]], dtype=complex)


def _weyl_dirac_deriv(c, ell, lam, triplet):
    half_gap = c * c / 2
    w = ell * ell * (lam * lam - half_gap ** 2) / (c * c)
    wp = 2 * ell * ell * lam / (c * c)
    s, cw = _sc(w)
    sp = _sc_prime(w)
    if triplet == "hat":
        d11 = ell * ((s + (lam - half_gap) * sp * wp) / cw
                     + (lam - half_gap) * s * s * wp / (2 * cw * cw))
        d12 = s * wp / (2 * cw * cw)
        d22 = (ell / (c * c)) * ((s + (lam + half_gap) * sp * wp) / cw
                                 + (lam + half_gap) * s * s * wp / (2 * cw * cw))
        return np.array([[d11, d12], [d12, d22]], dtype=complex)
    g = c * c / (ell * (lam + half_gap) * s)
    gp = -c * c * (s + (lam + half_gap) * sp * wp) / (ell * (lam + half_gap) ** 2 * s * s)
    gcp = gp * cw - g * s * wp / 2
    return np.array([[-gcp, -1j * gp], [1j * gp, -gcp]], dtype=complex)


def default_lambda0(model: EdgeModel):
    """Canonical real regularization point, or None when the user must choose.

    Dirac edges use the gap center c^2/2; finite Laplacian edges use 0 (the
    decoupled ground states sit at (pi/length)^2 > 0).  Half-line edges have
    decoupled spectrum [0, inf), so no default exists and a negative value
    has to be supplied.
    """
    if isinstance(model, Dirac):
        return model.c ** 2 / 2
    if isinstance(model, Laplacian):
        return 0.0
    return None


def weyl_norm_prime(model: EdgeModel, ell: float, lam0=None) -> float:
    """Spectral norm of the Hermitian matrix M'(lambda0) at a real point."""
    if lam0 is None:
        lam0 = default_lambda0(model)
        if lam0 is None:
            raise EdgeModelError("half-line edges need an explicit lambda0 < 0")
    if not _is_real(lam0):
        raise EdgeModelError(f"lambda0 must be real, got {lam0}")
    deriv = weyl_derivative(model, ell, lam0)
    return float(np.max(np.abs(np.linalg.eigvalsh(deriv))))


def transform_triplet(weyl_value: np.ndarray, w_blocks: np.ndarray) -> np.ndarray:
    """Rewrite a boundary response matrix under a unitary change of trace maps.

    ``w_blocks`` is a 2d x 2d unitary acting on stacked (Gamma0, Gamma1)
    data, partitioned into d x d blocks W = [[W00, W01], [W10, W11]]; the
    transformed matrix is (W10 + W11 M)(W00 + W01 M)^{-1}.
    """
    m = np.asarray(weyl_value, dtype=complex)
    d = m.shape[0]
    w = np.asarray(w_blocks, dtype=complex)
    if w.shape != (2 * d, 2 * d):
        raise EdgeModelError(f"block matrix must be {2*d}x{2*d}, got {w.shape}")
    if np.linalg.norm(w.conj().T @ w - np.eye(2 * d)) > 1e-10:
        raise EdgeModelError("trace-map transform must be unitary")
    w00, w01 = w[:d, :d], w[:d, d:]
    w10, w11 = w[d:, :d], w[d:, d:]
    denom = w00 + w01 @ m
    if abs(np.linalg.det(denom)) < 1e-14 * max(1.0, np.linalg.norm(denom) ** d):
        raise EdgeModelError("singular W00 + W01*M in trace-map transform")
    return np.linalg.solve(denom.T, (w10 + w11 @ m).T).T


@dataclass(frozen=True)
class DefectElement:
    """Solution of the edge eigenvalue equation with prescribed Gamma0 data.

    Coefficients refer to the normalized fundamental system
    c(x) = C(k^2 x^2), s(x) = x S(k^2 x^2) of the second-order reduction;
    for the Dirac model the second spinor component is recovered from the
    first-order system.
    """

    model: EdgeModel
    ell: float
    lam: complex
    gamma0: tuple
    coeff: tuple
    triplet: str = "graph"

    def values(self, x):
        """Solution values at points ``x``: shape (n,) scalar or (2, n) spinor."""
        x = np.asarray(x, dtype=float)
        if isinstance(self.model, HalfLineLaplacian):
            z = np.sqrt(complex(self.lam))
            if z.imag < 0:
                z = -z
            return self.coeff[0] * np.exp(1j * z * x)
        a, b = self.coeff
        if isinstance(self.model, Laplacian):
            k2 = complex(self.lam)
        else:
            c = self.model.c
            k2 = (complex(self.lam) ** 2 - (c * c / 2) ** 2) / (c * c)
        cvals = np.array([_sc(k2 * xi * xi)[1] for xi in x])
        svals = np.array([xi * _sc(k2 * xi * xi)[0] for xi in x])
        psi1 = a * cvals + b * svals
        if isinstance(self.model, Laplacian):
            return psi1
        c = self.model.c
        lam = complex(self.lam)
        psi2 = (1j * (lam - c * c / 2) / c) * a * svals \
            - (1j * c / (lam + c * c / 2)) * b * cvals
        return np.vstack([psi1, psi2])

    def boundary_data(self):
        """Return (Gamma0, Gamma1) of the element under its trace convention."""
        if isinstance(self.model, HalfLineLaplacian):
            z = np.sqrt(complex(self.lam))
            if z.imag < 0:
                z = -z
            a = self.coeff[0]
            return np.array([a]), np.array([1j * z * a])
        a, b = self.coeff
        ell = self.ell
        lam = complex(self.lam)
        if isinstance(self.model, Laplacian):
            k2 = lam
        else:
            c = self.model.c
            k2 = (lam * lam - (c * c / 2) ** 2) / (c * c)
        s, cw = _sc(k2 * ell * ell)
        cl, sl = cw, ell * s
        psi1_0, psi1_l = a, a * cl + b * sl
        dpsi1_0, dpsi1_l = b, -k2 * a * sl + b * cl
        if isinstance(self.model, Laplacian):
            return np.array([psi1_0, psi1_l]), np.array([dpsi1_0, -dpsi1_l])
        c = self.model.c
        # ic*psi2 = c^2 * psi1' / (lam + c^2/2)
        icpsi2_0 = c * c * dpsi1_0 / (lam + c * c / 2)
        icpsi2_l = c * c * dpsi1_l / (lam + c * c / 2)
        if self.triplet == "hat":
            return np.array([psi1_0, icpsi2_l]), np.array([icpsi2_0, psi1_l])
        return np.array([psi1_0, 1j * psi1_l]), np.array([icpsi2_0, -1j * icpsi2_l])


def defect_element(model: EdgeModel, ell: float, lam, gamma0,
                   triplet: str = "graph") -> DefectElement:
    """Defect solution with Gamma0 data ``gamma0`` at spectral point ``lam``."""
    _check_triplet(model, triplet)
    _check_length(model, ell)
    _guard_pole(model, ell, lam, triplet)
    gamma0 = np.asarray(gamma0, dtype=complex)
    if gamma0.shape != (boundary_dim(model),):
        raise EdgeModelError(
            f"gamma0 must have shape ({boundary_dim(model)},), got {gamma0.shape}"
        )
    lam = complex(lam)
    if isinstance(model, HalfLineLaplacian):
        return DefectElement(model, ell, lam, (gamma0[0],), (gamma0[0],), triplet)
    if isinstance(model, Laplacian):
        k2 = lam
    else:
        c = model.c
        k2 = (lam * lam - (c * c / 2) ** 2) / (c * c)
    s, cw = _sc(k2 * ell * ell)
    cl, sl = cw, ell * s
    x0, y0 = gamma0
    a = x0
    if isinstance(model, Laplacian):
        b = (y0 - x0 * cl) / sl
    elif triplet == "graph":
        b = (-1j * y0 - x0 * cl) / sl
    else:
        c = model.c
        b = (y0 + (lam - c * c / 2) * x0 * sl) * (lam + c * c / 2) / (c * c * cl)
    return DefectElement(model, ell, lam, tuple(gamma0), (a, b), triplet)


_GAUSS_NODES, _GAUSS_WEIGHTS = np.polynomial.legendre.leggauss(24)


def green_identity_residual(f: DefectElement, g: DefectElement) -> complex:
    """Residual of the boundary form identity for two defect elements.

    Returns (lam_f - conj(lam_g)) * <f, g>_{L^2} - [<Gamma1 f, Gamma0 g>
    - <Gamma0 f, Gamma1 g>]; the L^2 pairing is computed with fixed
    24-point Gauss-Legendre quadrature (the integrands are entire).
    """
    if (f.model, f.ell, f.triplet) != (g.model, g.ell, g.triplet):
        raise EdgeModelError("defect elements must live on the same edge")
    if isinstance(f.model, HalfLineLaplacian):
        raise EdgeModelError("Green identity check is for finite edges")
    x = 0.5 * f.ell * (_GAUSS_NODES + 1.0)
    wq = 0.5 * f.ell * _GAUSS_WEIGHTS
    fv, gv = f.values(x), g.values(x)
    if fv.ndim == 1:
        inner = np.sum(wq * fv * np.conj(gv))
    else:
        inner = np.sum(wq * (fv * np.conj(gv)).sum(axis=0))
    g0f, g1f = f.boundary_data()
    g0g, g1g = g.boundary_data()
    boundary = np.vdot(g0g, g1f) - np.vdot(g1g, g0f)
    return (complex(f.lam) - np.conj(complex(g.lam))) * inner - boundary


def decoupled_eigenvalues(model: EdgeModel, ell: float, window=None, count=None,
                          triplet: str = "graph") -> np.ndarray:
    """Spectrum of the decoupled edge operator (poles of the response matrix).

    Exactly one of ``window=(a, b)`` or ``count`` must be given.  ``count``
    means the first ``count`` wavenumber indices; for the Dirac model each
    index yields a +/- pair and the graph triplet additionally contains the
    gap edge -c^2/2.  Half-line edges have no eigenvalues (their decoupled
    spectrum is the continuous ray), so the result is empty.
    """
    _check_triplet(model, triplet)
    _check_length(model, ell)
    if (window is None) == (count is None):
        raise EdgeModelError("specify exactly one of window or count")
    if isinstance(model, HalfLineLaplacian):
        return np.array([])
    vals: list[float] = []
    if isinstance(model, Laplacian):
        if count is not None:
            vals = [(n * math.pi / ell) ** 2 for n in range(1, count + 1)]
        else:
            a, b = window
            n = 1
            while (n * math.pi / ell) ** 2 <= b:
                v = (n * math.pi / ell) ** 2
                if v >= a:
                    vals.append(v)
                n += 1
    else:
        c = model.c
        if triplet == "graph":
            ks = None if count is None else [n * math.pi / ell for n in range(1, count + 1)]
            gap_edge = [-c * c / 2]
        else:
            ks = None if count is None else [(n + 0.5) * math.pi / ell for n in range(count)]
            gap_edge = []
        if count is not None:
            vals = gap_edge + [s * math.sqrt((c * k) ** 2 + c ** 4 / 4)
                               for k in ks for s in (1, -1)]
        else:
            a, b = window
            vals = [v for v in gap_edge if a <= v <= b]
            n = 1 if triplet == "graph" else 0
            while True:
                k = (n * math.pi / ell) if triplet == "graph" else ((n + 0.5) * math.pi / ell)
                root = math.sqrt((c * k) ** 2 + c ** 4 / 4)
                if root > max(abs(a), abs(b)) and root > b and -root < a:
                    break
                if a <= root <= b:
                    vals.append(root)
                if a <= -root <= b:
                    vals.append(-root)
                n += 1
    return np.array(sorted(vals))

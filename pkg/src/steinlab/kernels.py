"""Reproducing kernels and their closed-form derivatives.

All supported families are radial in the squared distance,
``k(x, y) = phi(||x - y||^2 / h)`` for a squared length-scale ``h``:

* ``imq``:          phi(s) = (1 + s) ** beta          with beta in (-1, 0)
* ``log_inverse``:  phi(s) = (alpha + log(1 + s)) ** beta  with alpha > 0, beta < 0
* ``rbf``:          phi(s) = exp(-s)

Gradients and the mixed second derivative d2k / dx_j dy_j are analytic so the
quadratic-cost inner loops stay deterministic and cheap; finite differencing
appears only in tests as an oracle.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateBandwidthWarning

IMQ = "imq"
LOG_INVERSE = "log_inverse"
RBF = "rbf"
FAMILIES = (IMQ, LOG_INVERSE, RBF)

BANDWIDTH_FLOOR = 1e-6


@dataclass(frozen=True)
class KernelSpec:
    """One kernel family with its parameters.

    ``beta`` is the exponent (used by ``imq`` and ``log_inverse``), ``alpha``
    the additive offset inside the ``log_inverse`` logarithm, and
    ``bandwidth`` the squared length-scale dividing the squared distance.
    The unscaled inverse multiquadric of the experiments is
    ``KernelSpec("imq", beta=-0.5)`` with the default bandwidth of 1.
    """

    family: str
    beta: float = -0.5
    alpha: float = 1.0
    bandwidth: float = 1.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown kernel family {self.family!r}")
        if not self.bandwidth > 0.0:
            raise ValueError("bandwidth must be positive")
        if self.family == IMQ and not -1.0 < self.beta < 0.0:
            raise ValueError("imq exponent beta must lie in (-1, 0)")
        if self.family == LOG_INVERSE:
            if not self.beta < 0.0:
                raise ValueError("log_inverse exponent beta must be negative")
            if not self.alpha > 0.0:
                raise ValueError("log_inverse offset alpha must be positive")

    def to_config(self) -> dict:
        return {
            "family": self.family,
            "beta": repr(float(self.beta)),
            "alpha": repr(float(self.alpha)),
            "bandwidth": repr(float(self.bandwidth)),
        }

    @classmethod
    def from_config(cls, mapping) -> "KernelSpec":
        try:
            family = str(mapping["family"]).strip().lower()
        except KeyError:
            raise ValueError("kernel config is missing the 'family' key") from None
        kwargs = {}
        for key in ("beta", "alpha", "bandwidth"):
            if key in mapping:
                kwargs[key] = float(mapping[key])
        return cls(family=family, **kwargs)


def radial_profile(spec: KernelSpec, sq_dist):
    """Kernel value and derivatives in the squared distance, elementwise.

    Returns ``(k, p1, p2)`` where ``p1 = dk/d(r2)`` and ``p2 = d2k/d(r2)^2``
    at squared distance ``r2 = sq_dist``.  These three profiles are all the
    pairwise Stein terms and particle updates need: with ``u = x - y``,

        grad_x k = 2 p1 u,   grad_y k = -2 p1 u,
        d2k/dx_j dy_j = -4 p2 u_j^2 - 2 p1.
    """
    q = np.asarray(sq_dist, dtype=np.float64)
    h = spec.bandwidth
    if spec.family == IMQ:
        base = 1.0 + q / h
        k = base ** spec.beta
        p1 = (spec.beta / h) * base ** (spec.beta - 1.0)
        p2 = (spec.beta * (spec.beta - 1.0) / (h * h)) * base ** (spec.beta - 2.0)
    elif spec.family == RBF:
        k = np.exp(-q / h)
        p1 = -k / h
        p2 = k / (h * h)
    else:
        base = 1.0 + q / h
        w = spec.alpha + np.log(base)
        dw = 1.0 / (h * base)
        k = w ** spec.beta
        p1 = spec.beta * w ** (spec.beta - 1.0) * dw
        p2 = spec.beta * dw * dw * (
            (spec.beta - 1.0) * w ** (spec.beta - 2.0) - w ** (spec.beta - 1.0)
        )
    return k, p1, p2


def _sq_norm(u):
    # Same reduction as the batched squared-distance path, so pointwise and
    # Gram evaluations agree to the bit.
    return float(np.add.reduce(u * u))


def _pair(x, y):
    xv = np.asarray(x, dtype=np.float64).reshape(-1)
    yv = np.asarray(y, dtype=np.float64).reshape(-1)
    if xv.shape != yv.shape:
        raise ValueError(f"dimension mismatch: {xv.shape[0]} vs {yv.shape[0]}")
    return xv, yv


def eval(spec: KernelSpec, x, y) -> float:
    """Kernel value k(x, y); symmetric in its arguments."""
    xv, yv = _pair(x, y)
    u = xv - yv
    k, _, _ = radial_profile(spec, _sq_norm(u))
    return float(k)


def grad_x(spec: KernelSpec, x, y) -> np.ndarray:
    """Gradient of k with respect to its first argument."""
    xv, yv = _pair(x, y)
    u = xv - yv
    _, p1, _ = radial_profile(spec, _sq_norm(u))
    return 2.0 * p1 * u


def grad_y(spec: KernelSpec, x, y) -> np.ndarray:
    """Gradient of k with respect to its second argument (-grad_x for
    radial kernels)."""
    return -grad_x(spec, x, y)


def cross_deriv_diag(spec: KernelSpec, x, y) -> np.ndarray:
    """Vector of mixed second derivatives d2k/dx_j dy_j, one per coordinate."""
    xv, yv = _pair(x, y)
    u = xv - yv
    _, p1, p2 = radial_profile(spec, _sq_norm(u))
    return -4.0 * p2 * (u * u) - 2.0 * p1


def squared_distances(X, Y) -> np.ndarray:
    """Pairwise squared Euclidean distances between rows of X and Y."""
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    diff = X[:, None, :] - Y[None, :, :]
    return np.add.reduce(diff * diff, axis=2)


def gram(spec: KernelSpec, X, Y=None) -> np.ndarray:
    """Kernel Gram matrix between rows of X and Y (Y defaults to X)."""
    if Y is None:
        Y = X
    k, _, _ = radial_profile(spec, squared_distances(X, Y))
    return k


def median_heuristic_bandwidth(points) -> float:
    """``median(pairwise distances)^2 / log(n)`` over all point pairs.

    Returns ``BANDWIDTH_FLOOR`` and emits :class:`DegenerateBandwidthWarning`
    when the median distance is zero (at least half of all pairs coincide),
    since a zero bandwidth would be unusable.
    """
    pts = np.asarray(getattr(points, "points", points), dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    n = pts.shape[0]
    if n < 2:
        raise ValueError("median heuristic needs at least two points")
    iu = np.triu_indices(n, k=1)
    diff = pts[:, None, :] - pts[None, :, :]
    dists = np.sqrt(np.add.reduce(diff * diff, axis=2))[iu]
    med = float(np.median(dists))
    if med == 0.0:
        warnings.warn(
            "median pairwise distance is zero; using the floor bandwidth",
            DegenerateBandwidthWarning,
            stacklevel=2,
        )
        return BANDWIDTH_FLOOR
    return med * med / math.log(n)

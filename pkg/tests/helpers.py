"""Shared test oracles: finite differences and random problem builders.

The kernel oracle re-implements the radial families in extended precision
(long double) so nested finite differences of the mixed second derivative
stay well above cancellation noise at the standard step of 1e-5.
"""

import numpy as np

from steinlab import (
    KernelSpec,
    SampleBatch,
    gen_gmm_data,
    gen_logreg_data,
    iid_gaussian,
    make_gaussian,
    make_gmm_posterior,
    make_logreg,
)

FD_STEP = 1e-5
FD_RTOL = 1e-4


def kernel_value_ld(spec, x, y):
    """Independent long-double evaluation of the radial kernel families."""
    x = np.asarray(x, dtype=np.longdouble)
    y = np.asarray(y, dtype=np.longdouble)
    u = x - y
    s = np.sum(u * u) / np.longdouble(spec.bandwidth)
    beta = np.longdouble(spec.beta)
    if spec.family == "imq":
        return (1 + s) ** beta
    if spec.family == "rbf":
        return np.exp(-s)
    return (np.longdouble(spec.alpha) + np.log1p(s)) ** beta


def fd_kernel_grad_x(spec, x, y, step=FD_STEP):
    x = np.asarray(x, dtype=np.longdouble)
    h = np.longdouble(step)
    out = np.empty(x.shape[0], dtype=np.float64)
    for j in range(x.shape[0]):
        e = np.zeros_like(x)
        e[j] = h
        out[j] = float((kernel_value_ld(spec, x + e, y)
                        - kernel_value_ld(spec, x - e, y)) / (2 * h))
    return out


def fd_kernel_cross(spec, x, y, step=FD_STEP):
    """Nested central difference of d2k / dx_j dy_j, per coordinate."""
    x = np.asarray(x, dtype=np.longdouble)
    y = np.asarray(y, dtype=np.longdouble)
    h = np.longdouble(step)
    out = np.empty(x.shape[0], dtype=np.float64)
    for j in range(x.shape[0]):
        e = np.zeros_like(x)
        e[j] = h
        pp = kernel_value_ld(spec, x + e, y + e)
        pm = kernel_value_ld(spec, x + e, y - e)
        mp = kernel_value_ld(spec, x - e, y + e)
        mm = kernel_value_ld(spec, x - e, y - e)
        out[j] = float((pp - pm - mp + mm) / (4 * h * h))
    return out


def fd_gradient(f, x, step=FD_STEP):
    """Central-difference gradient of a scalar function of a vector."""
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    for j in range(x.size):
        e = np.zeros_like(x)
        e[j] = step
        out[j] = (f(x + e) - f(x - e)) / (2 * step)
    return out


def log_density(target):
    """Test-only log density: log prior plus the sum of all term log densities."""
    def f(x):
        total = target.log_prior(x)
        for l in range(target.L):
            total += target.log_term(l, x)
        return total

    return f


def assert_rel_close(actual, oracle, rtol=FD_RTOL, floor=1e-10):
    actual = np.atleast_1d(np.asarray(actual, dtype=np.float64))
    oracle = np.atleast_1d(np.asarray(oracle, dtype=np.float64))
    denom = np.maximum(np.abs(oracle), floor)
    rel = np.abs(actual - oracle) / denom
    assert np.all(rel <= rtol), f"max relative error {rel.max():.3e} > {rtol:.0e}"


def random_kernel_spec(rng, families=("imq", "log_inverse", "rbf")):
    family = families[rng.integers(len(families))]
    if family == "imq":
        return KernelSpec(
            "imq",
            beta=float(rng.uniform(-0.9, -0.1)),
            bandwidth=float(rng.uniform(0.5, 3.0)),
        )
    if family == "rbf":
        return KernelSpec("rbf", bandwidth=float(rng.uniform(0.5, 3.0)))
    return KernelSpec(
        "log_inverse",
        beta=float(rng.uniform(-1.5, -0.2)),
        alpha=float(rng.uniform(0.3, 2.0)),
        bandwidth=float(rng.uniform(0.5, 3.0)),
    )


def random_instance(rng, kinds=("gmm", "logreg"), families=("imq", "log_inverse"),
                    max_n=50, max_d=5):
    """Random (batch, target, spec, m) problem for oracle comparisons."""
    kind = kinds[rng.integers(len(kinds))]
    if kind == "gmm":
        L = int(rng.integers(3, 12))
        obs = gen_gmm_data(0.0, 1.0, 2.0, L, seed=int(rng.integers(2**32)))
        target = make_gmm_posterior(obs)
        d = 2
    elif kind == "logreg":
        d = int(rng.integers(1, max_d + 1))
        L = int(rng.integers(3, 12))
        X, y = gen_logreg_data(L, d, rng.standard_normal(d),
                               seed=int(rng.integers(2**32)))
        target = make_logreg(X, y)
    else:
        d = int(rng.integers(1, max_d + 1))
        L = int(rng.integers(1, 12))
        target = make_gaussian(0.0, 1.0, L, dim=d)
    n = int(rng.integers(2, max_n + 1))
    batch = iid_gaussian(n, d, 0.0, 1.2, seed=int(rng.integers(2**32)))
    m = int(rng.integers(1, target.L + 1))
    spec = random_kernel_spec(rng, families=families)
    return batch, target, spec, m

"""Independent reference implementations used by the tests.

Nothing here imports the package: the formulas are typed in directly from
the model definitions, in plain Fraction arithmetic, so agreement with the
package is a genuine cross-check.
"""
from fractions import Fraction as Q

import numpy as np


def W_oracle(x, y, u, v):
    """The hemophilia map written out term by term from the four crosses.

    XX x XY    -> 1/2 XX, 1/2 XY
    XX x XhY   -> 1/2 XXh, 1/2 XY
    XXh x XY   -> 1/4 of each genotype
    XXh x XhY  -> 1/3 XXh, 1/3 XY, 1/3 XhY
    """
    a, b, c, d = x * u, x * v, y * u, y * v
    xx = Q(1, 2) * a + Q(1, 4) * c
    xxh = Q(1, 2) * b + Q(1, 4) * c + Q(1, 3) * d
    xy = Q(1, 2) * a + Q(1, 2) * b + Q(1, 4) * c + Q(1, 3) * d
    xhy = Q(1, 4) * c + Q(1, 3) * d
    # total offspring mass of all crosses is (x + y)(u + v)
    mass = (x + y) * (u + v)
    return (xx / mass, xxh / mass, xy / mass, xhy / mass)


def W_unnormalized_oracle(x, y, u, v):
    a, b, c, d = x * u, x * v, y * u, y * v
    return (
        Q(1, 2) * a + Q(1, 4) * c,
        Q(1, 2) * b + Q(1, 4) * c + Q(1, 3) * d,
        Q(1, 2) * a + Q(1, 2) * b + Q(1, 4) * c + Q(1, 3) * d,
        Q(1, 4) * c + Q(1, 3) * d,
    )


def F_oracle(a, b):
    return (
        (6 * b + 3 * a + 4 * a * b) / (6 + 3 * a),
        (3 * a + 4 * a * b) / (6 + 6 * b + 3 * a + 4 * a * b),
    )


def fd_jacobian(f, point, h):
    """Plain forward-difference Jacobian, no Richardson, no symmetry tricks."""
    base = np.array(f(*point), dtype=float)
    jac = np.zeros((len(base), len(point)))
    for a in range(len(point)):
        shifted = list(point)
        shifted[a] = shifted[a] + h
        jac[:, a] = (np.array(f(*shifted), dtype=float) - base) / h
    return jac


def similarity_eigenvalues(m, seed=0):
    """Eigenvalues of P M P^-1 for a random well-conditioned P, via LAPACK."""
    m = np.asarray(m, dtype=float)
    rng = np.random.default_rng(seed)
    p = np.eye(len(m)) + 0.3 * rng.standard_normal(m.shape)
    return np.linalg.eigvals(p @ m @ np.linalg.inv(p))


def random_rational_state(rng, max_den=1000):
    while True:
        comps = [Q(rng.randint(0, max_den), rng.randint(1, max_den)) for _ in range(4)]
        total = sum(comps)
        if total and comps[0] + comps[1] and comps[2] + comps[3]:
            return tuple(c / total for c in comps)

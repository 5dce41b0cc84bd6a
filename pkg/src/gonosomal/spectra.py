"""Small-matrix eigenvalues: closed-form 2x2 and characteristic-polynomial 4x4."""
from __future__ import annotations

import cmath
import math
from fractions import Fraction
from typing import Sequence

from .core import GonosomalError

NONHYPERBOLIC_TOL = 1e-8


class RootFindingStalled(GonosomalError, ArithmeticError):
    pass


def _rational_sqrt(q: Fraction):
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def _sort_key(z):
    z = complex(z)
    return (-abs(z), cmath.phase(z))


def eigenvalues_2x2(m: Sequence[Sequence]) -> tuple:
    """Roots of t^2 - tr t + det.

    Rational matrices with a rational spectrum give exact Fractions; anything
    else goes through the cancellation-free form of the quadratic formula.
    """
    (a, b), (c, d) = m
    tr = a + d
    det = a * d - b * c
    disc = tr * tr - 4 * det
    if all(isinstance(e, (int, Fraction)) for e in (a, b, c, d)):
        root = _rational_sqrt(Fraction(disc))
        if root is not None:
            lam = ((tr + root) / 2, (tr - root) / 2)
            return tuple(sorted(lam, key=_sort_key))
    bq = -complex(tr)
    sq = cmath.sqrt(complex(disc))
    if (bq.conjugate() * sq).real >= 0:
        q = -(bq + sq) / 2
    else:
        q = -(bq - sq) / 2
    if q == 0:
        return (0j, 0j)
    return tuple(sorted((q, complex(det) / q), key=_sort_key))


def charpoly(m: Sequence[Sequence]) -> list:
    """Monic characteristic polynomial coefficients, highest degree first.

    Faddeev-LeVerrier recursion; exact when the entries are rationals.
    """
    n = len(m)
    a = [list(row) for row in m]
    coeffs = [1]
    mk = [[0] * n for _ in range(n)]
    for k in range(1, n + 1):
        c_prev = coeffs[-1]
        # M_k = A M_{k-1} + c_{n-k+1} I
        prod = [[sum(a[i][t] * mk[t][j] for t in range(n)) for j in range(n)] for i in range(n)]
        for i in range(n):
            prod[i][i] += c_prev
        mk = prod
        am = [[sum(a[i][t] * mk[t][j] for t in range(n)) for j in range(n)] for i in range(n)]
        trace = sum(am[i][i] for i in range(n))
        coeffs.append(-trace / k if not isinstance(trace, int) else Fraction(-trace, k))
    return coeffs


def _horner(coeffs, z):
    acc = 0j
    for c in coeffs:
        acc = acc * z + c
    return acc


def durand_kerner(coeffs: Sequence, tol: float = 1e-12, max_sweeps: int = 10_000) -> list:
    """All roots of a monic polynomial by simultaneous (Weierstrass) iteration."""
    c = [complex(v) for v in coeffs]
    lead = c[0]
    c = [v / lead for v in c]
    n = len(c) - 1
    if n == 0:
        return []
    radius = 1 + max(abs(v) for v in c[1:])
    seed = complex(0.4, 0.9)
    z = [radius * seed**k / abs(seed) ** k for k in range(n)]
    polish = 0
    for _ in range(max_sweeps):
        moved = 0.0
        for i in range(n):
            denom = 1 + 0j
            for j in range(n):
                if j != i:
                    denom *= z[i] - z[j]
            if denom == 0:
                denom = complex(tol, tol)
            delta = _horner(c, z[i]) / denom
            z[i] -= delta
            moved = max(moved, abs(delta))
        if max(abs(_horner(c, zi)) for zi in z) < tol:
            # clustered roots converge only linearly; keep polishing a while
            polish += 1
            if moved < 1e-15 or polish >= 100:
                return z
    raise RootFindingStalled(f"Durand-Kerner did not converge in {max_sweeps} sweeps")


def eigenvalues_4x4(m: Sequence[Sequence]) -> list:
    """Eigenvalues sorted by modulus (descending), then argument."""
    if len(m) != 4 or any(len(row) != 4 for row in m):
        raise ValueError("expected a 4x4 matrix")
    coeffs = charpoly([[float(e) for e in row] for row in m])
    return sorted(durand_kerner(coeffs), key=_sort_key)


def classify(eigenvalues, tol: float = NONHYPERBOLIC_TOL) -> str:
    """'nonhyperbolic' if some eigenvalue lies on the unit circle within ``tol``."""
    if any(abs(abs(complex(lam)) - 1) <= tol for lam in eigenvalues):
        return "nonhyperbolic"
    return "hyperbolic"

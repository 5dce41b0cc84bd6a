from fractions import Fraction as Q

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gonosomal.spectra import charpoly, classify, durand_kerner, eigenvalues_2x2, eigenvalues_4x4
from oracles import similarity_eigenvalues


def test_2x2_exact_rational_spectrum():
    eig = eigenvalues_2x2([[Q(1, 2), Q(1)], [Q(1, 2), Q(0)]])
    assert eig == (Q(1), Q(-1, 2))
    assert all(isinstance(e, Q) for e in eig)


def test_2x2_complex_pair():
    eig = eigenvalues_2x2([[0.0, -1.0], [1.0, 0.0]])
    assert sorted(round(e.imag, 12) for e in eig) == [-1.0, 1.0]


def test_2x2_no_cancellation_for_tiny_root():
    # roots 1 and 1e-12; the naive formula loses the small one
    small = min(eigenvalues_2x2([[1.0, 1.0], [0.0, 1e-12]]), key=abs)
    assert abs(small - 1e-12) < 1e-24


def test_charpoly_exact():
    m = [[Q(2), Q(1)], [Q(0), Q(3)]]
    assert charpoly(m) == [1, -5, 6]


def test_durand_kerner_known_roots():
    roots = durand_kerner([1, -10, 35, -50, 24])
    assert sorted(round(r.real, 10) for r in roots) == [1, 2, 3, 4]


def test_double_root_polished():
    # t^2 (t - 1)(t + 1/2)
    roots = sorted(durand_kerner([1, -0.5, -0.5, 0, 0]), key=lambda z: z.real)
    assert abs(roots[0] + 0.5) < 1e-12
    assert abs(roots[1]) < 1e-12 and abs(roots[2]) < 1e-12
    assert abs(roots[3] - 1) < 1e-12


def test_fixed_point_jacobian_spectrum():
    jac = [[0, -0.5, 0, -1], [0, 0.5, 0, 1], [0, -0.5, 0, 0], [0, 0.5, 0, 0]]
    eig = eigenvalues_4x4(jac)
    assert abs(eig[0] - 1) < 1e-12
    assert abs(eig[1] + 0.5) < 1e-12
    assert max(abs(e) for e in eig[2:]) < 1e-10
    assert classify(eig) == "nonhyperbolic"


def test_classify_hyperbolic():
    assert classify([0.5, -0.3]) == "hyperbolic"
    assert classify([1j]) == "nonhyperbolic"


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-2, 2), min_size=16, max_size=16))
def test_4x4_matches_similarity_oracle(entries):
    m = np.array(entries).reshape(4, 4)
    ours = sorted(eigenvalues_4x4(m.tolist()), key=lambda z: (round(z.real, 5), round(z.imag, 5)))
    ref = sorted(similarity_eigenvalues(m), key=lambda z: (round(z.real, 5), round(z.imag, 5)))
    # clustered roots are only determined to about sqrt(eps) by the polynomial
    for a, b in zip(sorted(ours, key=abs), sorted(ref, key=abs)):
        assert abs(abs(a) - abs(b)) < 1e-5

from fractions import Fraction

import numpy as np
import pytest

from contactproj import rational as rt
from contactproj.algebra import (
    AlgebraMismatchError,
    basis,
    bracket,
    sl_projective,
    sp_contact,
    zero_element,
)
from contactproj.group import (
    GroupElement,
    Subgroup,
    adjoint,
    exp_element,
    identity_element,
    in_subgroup,
    nilpotency_index,
    quotient_class,
    random_algebra_element,
    random_subgroup_element,
    random_symplectic,
    standard_action,
)

SP1 = sp_contact(1)
SP2 = sp_contact(2)
SL2 = sl_projective(2)
SL3 = sl_projective(3)


def test_exp_zero_is_identity():
    g = exp_element(zero_element(SP1))
    assert rt.mat_eq(g.entries, rt.fidentity(4))


def test_exp_g_minus2_is_linear_polynomial():
    x = basis(SP1, -2)[0]
    # oracle: x^2 = 0 by direct multiplication
    assert rt.is_zero(x.entries @ x.entries)
    assert nilpotency_index(x) == 2
    t = Fraction(5, 3)
    g = exp_element(x, t)
    expect = rt.fidentity(4) + t * x.entries
    assert g.exact
    assert rt.mat_eq(g.entries, expect)


def test_exp_inverse_cancels():
    x = random_algebra_element(SP1, np.random.default_rng(3))
    g = exp_element(x, 1)
    h = exp_element(x, -1)
    prod = g.to_float() @ h.to_float()
    assert np.abs(prod - np.eye(4)).max() < 1e-12


def test_group_membership_validation():
    with pytest.raises(ValueError):
        GroupElement(SL2, 2 * np.eye(3))
    with pytest.raises(ValueError):
        GroupElement(SP1, np.diag([2.0, 1.0, 1.0, 1.0]))


def test_identity_in_all_subgroups():
    e_sp = identity_element(SP1)
    for which in Subgroup:
        assert in_subgroup(e_sp, which)
    e_sl = identity_element(SL2)
    for which in (Subgroup.P_TILDE, Subgroup.Q_TILDE):
        assert in_subgroup(e_sl, which)


def test_exp_g_minus2_not_in_p():
    g = exp_element(basis(SP1, -2)[0], 1)
    assert g.entries[3, 0] != 0
    assert not in_subgroup(g, Subgroup.P)
    assert not in_subgroup(g, Subgroup.P_TILDE)


def test_exp_p_plus_in_p():
    for k in (1, 2):
        for b in basis(SP2, k):
            g = exp_element(b, Fraction(2, 3))
            assert in_subgroup(g, Subgroup.P)
            assert in_subgroup(g, Subgroup.P_TILDE)
            assert in_subgroup(g, Subgroup.Q)


def test_subgroup_descriptor_compatibility():
    with pytest.raises(AlgebraMismatchError):
        in_subgroup(identity_element(SL2), Subgroup.P)


def test_adjoint_identity():
    x = basis(SP1, -1)[0]
    assert rt.mat_eq(adjoint(identity_element(SP1), x).entries, x.entries)


def test_adjoint_bch_series_oracle():
    # Ad(exp(a)) x = sum ad_a^k(x)/k! ; exact for nilpotent a
    rng = np.random.default_rng(11)
    a = random_algebra_element(SP1, rng, grades=[1])
    x = random_algebra_element(SP1, rng)
    acc = x
    term = x
    fact = 1
    for k in range(1, 10):
        term = bracket(a, term)
        fact *= k
        acc = acc + Fraction(1, fact) * term
        if term.is_zero():
            break
    assert term.is_zero()
    got = adjoint(exp_element(a), x)
    assert rt.mat_eq(got.entries, acc.entries)


def test_adjoint_is_bracket_automorphism():
    rng = np.random.default_rng(5)
    g = random_subgroup_element(SP2, Subgroup.Q, rng)
    x = random_algebra_element(SP2, rng)
    y = random_algebra_element(SP2, rng)
    lhs = adjoint(g, bracket(x, y))
    rhs = bracket(adjoint(g, x), adjoint(g, y))
    assert rt.mat_eq(lhs.entries, rhs.entries)


def test_membership_preserved_under_products_and_inverses():
    rng = np.random.default_rng(17)
    for _ in range(20):
        g = random_symplectic(1, rng)
        h = random_symplectic(1, rng)
        GroupElement(SP1, (g @ h).entries)        # validates
        GroupElement(SP1, g.inverse().entries)    # validates
    om = rt.to_float(rt.fmat(np.zeros((3, 3), dtype=int)))  # unused for sl
    for _ in range(20):
        a = random_subgroup_element(SL3, Subgroup.P_TILDE, rng)
        b = random_subgroup_element(SL3, Subgroup.Q_TILDE, rng)
        GroupElement(SL3, (a @ b).entries)
        GroupElement(SL3, a.inverse().entries)


@pytest.mark.parametrize(
    "desc,which",
    [(SL2, Subgroup.Q_TILDE), (SL3, Subgroup.Q_TILDE), (SP1, Subgroup.Q), (SP2, Subgroup.Q)],
)
def test_first_column_conjugation_identity(desc, which):
    # first column of g x g^{-1} equals first column of g x, for g fixing e_1
    rng = np.random.default_rng(23)
    for _ in range(100):
        g = random_subgroup_element(desc, which, rng)
        for x in basis(desc):
            ad = adjoint(g, x)
            gx = g.entries @ x.entries
            assert all(ad.entries[i, 0] == gx[i, 0] for i in range(desc.matrix_size))


def test_quotient_class_of_q_tilde_is_zero():
    # elements with vanishing first column represent the zero class
    rng = np.random.default_rng(2)
    x = random_algebra_element(SL3, rng, grades=[0, 1])
    x = x + (-x.entries[0, 0]) * basis(SL3, 0)[0]  # cancel a to land in q~
    cls = quotient_class(x, Subgroup.Q_TILDE)
    if all(v == 0 for v in x.entries[:, 0]):
        assert all(v == 0 for v in cls)


def test_quotient_class_q_tilde_equivariance():
    rng = np.random.default_rng(29)
    for desc, which in ((SL3, Subgroup.Q_TILDE), (SP2, Subgroup.Q)):
        for _ in range(100):
            g = random_subgroup_element(desc, which, rng)
            x = random_algebra_element(desc, rng)
            lhs = quotient_class(adjoint(g, x), which)
            rhs = standard_action(g, quotient_class(x, which))
            assert all(a == b for a, b in zip(lhs, rhs))


def test_quotient_class_g_minus2_is_last_unit_vector():
    x = basis(SP2, -2)[0]
    cls = quotient_class(x, Subgroup.Q)
    expect = [Fraction(0)] * 5 + [Fraction(1)]
    assert list(cls) == expect


def test_quotient_class_p_drops_top_coordinate():
    x = basis(SP1, -1)[0]
    cls = quotient_class(x, Subgroup.P)
    assert len(cls) == 3
    assert cls[0] == 1

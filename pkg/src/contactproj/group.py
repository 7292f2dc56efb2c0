"""Group-level operations on SL(m+1,R) and Sp(2n+2,R).

Exponentials of nilpotent algebra elements are exact polynomials in rational
arithmetic; everything else goes through scipy's scaling-and-squaring expm.
Subgroup membership follows the stabilizer description: P-type groups fix the
ray through e_1, Q-type groups fix e_1 itself.
"""

from enum import Enum
from fractions import Fraction
from functools import lru_cache
from math import factorial

import numpy as np
import scipy.linalg

from . import rational as rt
from .algebra import (
    AlgebraDescriptor,
    AlgebraMismatchError,
    Family,
    GradedElement,
    basis,
    bracket,
    grade_of,
    omega_matrix,
)

FLOAT_TOL = 1e-10


class Subgroup(Enum):
    P = "P"
    Q = "Q"
    P_TILDE = "P_tilde"
    Q_TILDE = "Q_tilde"


class GroupElement:
    """Member of SL(m+1) or Sp(2n+2); validated on construction."""

    __slots__ = ("descriptor", "entries", "exact", "_inv")

    def __init__(self, descriptor: AlgebraDescriptor, entries, check=True):
        self.descriptor = descriptor
        self._inv = None
        arr = np.asarray(entries)
        size = descriptor.matrix_size
        if arr.shape != (size, size):
            raise ValueError(f"expected {size}x{size} matrix")
        if arr.dtype == object or np.issubdtype(arr.dtype, np.integer):
            self.entries = rt.fmat(arr)
            self.exact = True
        else:
            self.entries = arr.astype(float)
            self.exact = False
        if check:
            self._check_membership()

    def _check_membership(self):
        d = self.descriptor
        if d.family is Family.SL_PROJECTIVE:
            if self.exact:
                if rt.det(self.entries) != 1:
                    raise ValueError("determinant is not 1")
            elif abs(np.linalg.det(self.entries) - 1.0) >= FLOAT_TOL:
                raise ValueError("determinant is not 1")
        else:
            om = omega_matrix(d)
            if self.exact:
                if not rt.mat_eq(self.entries.T @ om @ self.entries, om):
                    raise ValueError("not symplectic")
            else:
                omf = rt.to_float(om)
                res = self.entries.T @ omf @ self.entries - omf
                if np.abs(res).max() >= FLOAT_TOL:
                    raise ValueError("not symplectic")

    def to_float(self) -> np.ndarray:
        return rt.to_float(self.entries) if self.exact else self.entries.copy()

    def __matmul__(self, other):
        if self.descriptor != other.descriptor:
            raise AlgebraMismatchError("algebra mismatch")
        if self.exact and other.exact:
            return GroupElement(self.descriptor, self.entries @ other.entries, check=False)
        return GroupElement(self.descriptor, self.to_float() @ other.to_float(), check=False)

    def inverse(self) -> "GroupElement":
        if self._inv is None:
            if self.exact:
                self._inv = GroupElement(self.descriptor, rt.inv(self.entries), check=False)
            else:
                self._inv = GroupElement(self.descriptor, np.linalg.inv(self.entries), check=False)
        return self._inv

    def __repr__(self):
        return f"GroupElement({self.descriptor.family.value}, param={self.descriptor.param})"


def identity_element(descriptor: AlgebraDescriptor) -> GroupElement:
    return GroupElement(descriptor, rt.fidentity(descriptor.matrix_size), check=False)


def nilpotency_index(x: GradedElement):
    """Smallest k with x^k = 0, or None if x is not nilpotent."""
    size = x.descriptor.matrix_size
    if not x.exact:
        return None
    power = rt.fidentity(size)
    for k in range(1, size + 1):
        power = power @ x.entries
        if rt.is_zero(power):
            return k
    return None


def exp_element(x: GradedElement, t=1) -> GroupElement:
    """exp(t x); exact polynomial when x is nilpotent and t rational."""
    size = x.descriptor.matrix_size
    k = nilpotency_index(x)
    if k is not None and isinstance(t, (int, Fraction)):
        acc = rt.fidentity(size)
        term = rt.fidentity(size)
        tf = rt.frac(t)
        for j in range(1, k):
            term = term @ x.entries
            acc = acc + (tf**j / factorial(j)) * term
        return GroupElement(x.descriptor, acc, check=False)
    return GroupElement(
        x.descriptor, scipy.linalg.expm(float(t) * x.to_float()), check=False
    )


def _first_column(g: GroupElement):
    return g.entries[:, 0]


def in_subgroup(g: GroupElement, which: Subgroup) -> bool:
    """Stabilizer tests: P-types fix the ray R+ e_1, Q-types fix e_1."""
    d = g.descriptor
    if which in (Subgroup.P, Subgroup.Q) and d.family is not Family.SP_CONTACT:
        raise AlgebraMismatchError("P and Q live in the symplectic family")
    col = _first_column(g)
    if g.exact:
        below_zero = all(v == 0 for v in col[1:])
        if which in (Subgroup.P, Subgroup.P_TILDE):
            return below_zero and col[0] > 0
        return below_zero and col[0] == 1
    below = np.abs(np.asarray(col[1:], dtype=float)).max() if len(col) > 1 else 0.0
    if which in (Subgroup.P, Subgroup.P_TILDE):
        return below < FLOAT_TOL and float(col[0]) > FLOAT_TOL
    return below < FLOAT_TOL and abs(float(col[0]) - 1.0) < FLOAT_TOL


def adjoint(g: GroupElement, x: GradedElement) -> GradedElement:
    """Ad(g) x = g x g^{-1}."""
    if g.descriptor != x.descriptor:
        raise AlgebraMismatchError("algebra mismatch")
    if g.exact and x.exact:
        res = g.entries @ x.entries @ g.inverse().entries
        return GradedElement(g.descriptor, res, check=False)
    res = g.to_float() @ x.to_float() @ g.inverse().to_float()
    return GradedElement(g.descriptor, res)


def quotient_class(x: GradedElement, parabolic: Subgroup) -> np.ndarray:
    """Class of x in g/q (first column) or g/p (first column mod top entry)."""
    col = x.entries[:, 0].copy()
    if parabolic in (Subgroup.Q, Subgroup.Q_TILDE):
        return col
    return col[1:]


def standard_action(g: GroupElement, vec: np.ndarray) -> np.ndarray:
    return g.entries @ vec


# ---------------------------------------------------------------------------
# seeded random elements; exact rationals of bounded height throughout


def random_fraction(rng, height=3) -> Fraction:
    return Fraction(int(rng.integers(-height, height + 1)), int(rng.integers(1, height + 1)))


def random_algebra_element(descriptor, rng, height=3, grades=None) -> GradedElement:
    from .algebra import zero_element

    x = zero_element(descriptor)
    for k in grades if grades is not None else descriptor.grades:
        for b in basis(descriptor, k):
            x = x + random_fraction(rng, height) * b
    return x


def random_graded_exponential(descriptor, rng, grades, height=2) -> GroupElement:
    """Product of exact exponentials of random pure-grade elements."""
    g = identity_element(descriptor)
    for k in grades:
        x = random_algebra_element(descriptor, rng, height, grades=[k])
        g = g @ exp_element(x)
    return g


@lru_cache(maxsize=None)
def _nilpotent_levi_basis(descriptor) -> tuple:
    return tuple(
        b
        for b in basis(descriptor, 0)
        if nilpotency_index(b) is not None and b.entries[0, 0] == 0
    )


def random_subgroup_element(descriptor, which: Subgroup, rng, height=2) -> GroupElement:
    """Exact random element of P, Q, P~ or Q~ as a product of exponentials
    of grade-basis combinations (plus exact ray scalings for the P-types)."""
    d = descriptor
    if which in (Subgroup.P, Subgroup.Q) and d.family is not Family.SP_CONTACT:
        raise AlgebraMismatchError("P and Q live in the symplectic family")
    pos = [k for k in d.grades if k > 0]
    g = random_graded_exponential(d, rng, pos, height)
    for b in _nilpotent_levi_basis(d):
        if rng.integers(0, 2):
            g = g @ exp_element(random_fraction(rng, height) * b)
    if which in (Subgroup.P, Subgroup.P_TILDE):
        lam = Fraction(int(rng.integers(1, height + 1)), int(rng.integers(1, height + 1)))
        size = d.matrix_size
        scale = rt.fidentity(size)
        if d.family is Family.SP_CONTACT:
            scale[0, 0] = lam
            scale[size - 1, size - 1] = 1 / lam
        else:
            for i in range(1, size):
                scale[i, i] = lam
            scale[0, 0] = lam ** (-(size - 1))
        g = g @ GroupElement(d, scale, check=False)
    out = GroupElement(d, g.entries)
    assert in_subgroup(out, which)
    return out


def random_symplectic(n, rng, spread=0.6) -> GroupElement:
    """Generic float element of Sp(2n+2,R): expm of a random algebra element."""
    from .algebra import sp_contact, zero_element

    d = sp_contact(n)
    x = zero_element(d)
    for b in basis(d):
        x = x + Fraction(int(rng.integers(-3, 4)), 3) * b
    g = scipy.linalg.expm(spread * x.to_float())
    return GroupElement(d, g)

"""Graded matrix Lie algebras sp(2n+2,R) and sl(m+1,R).

Both algebras are realized as square matrices over exact rationals.  The
symplectic family uses the antisymmetric form

    Omega = [[0, 0, 1], [0, J, 0], [-1, 0, 0]],   J = [[0, I_n], [-I_n, 0]]

with block sizes (1, 2n, 1); membership means X^t Omega + Omega X = 0.  The
projective family is all trace-free matrices with block sizes (1, m).  Grades
are read off block positions: the weight vector (1, 0, ..., 0, -1) for the
symplectic family gives grades -2..2, the weight vector (1, 0, ..., 0) for the
projective family gives grades -1..1.
"""

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

import numpy as np

from . import rational as rt


class Family(Enum):
    SP_CONTACT = "sp"
    SL_PROJECTIVE = "sl"


class AlgebraMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class AlgebraDescriptor:
    """Which algebra, and its size parameter (n for sp, m for sl)."""

    family: Family
    param: int

    def __post_init__(self):
        if self.family is Family.SP_CONTACT and self.param < 1:
            raise ValueError("sp family needs n >= 1")
        if self.family is Family.SL_PROJECTIVE and self.param < 2:
            raise ValueError("sl family needs m >= 2")

    @property
    def matrix_size(self) -> int:
        if self.family is Family.SP_CONTACT:
            return 2 * self.param + 2
        return self.param + 1

    @property
    def block_sizes(self) -> tuple:
        if self.family is Family.SP_CONTACT:
            return (1, 2 * self.param, 1)
        return (1, self.param)

    @property
    def grades(self) -> range:
        if self.family is Family.SP_CONTACT:
            return range(-2, 3)
        return range(-1, 2)

    @property
    def dim(self) -> int:
        if self.family is Family.SP_CONTACT:
            n = self.param
            return (n + 1) * (2 * n + 3)
        m = self.param
        return m * m + 2 * m

    def weights(self) -> list:
        """Block weight of each row/column index; grade(i,j) = w[i]-w[j]."""
        size = self.matrix_size
        w = [0] * size
        w[0] = 1
        if self.family is Family.SP_CONTACT:
            w[size - 1] = -1
        return w


def sp_contact(n: int) -> AlgebraDescriptor:
    return AlgebraDescriptor(Family.SP_CONTACT, n)


def sl_projective(m: int) -> AlgebraDescriptor:
    return AlgebraDescriptor(Family.SL_PROJECTIVE, m)


@dataclass(frozen=True)
class SymplecticForm:
    """The standard form on R^{2n+2} in the (1, 2n, 1) block convention."""

    n: int

    def __post_init__(self):
        om = self.matrix()
        size = 2 * self.n + 2
        if any(om[i][j] != -om[j][i] for i in range(size) for j in range(size)):
            raise AssertionError("omega must be antisymmetric")
        if om[0][size - 1] != 1:
            raise AssertionError("omega corner normalization")

    def matrix(self) -> np.ndarray:
        n = self.n
        size = 2 * n + 2
        om = rt.fzeros(size, size)
        om[0, size - 1] = Fraction(1)
        om[size - 1, 0] = Fraction(-1)
        for i in range(n):
            om[1 + i, 1 + n + i] = Fraction(1)
            om[1 + n + i, 1 + i] = Fraction(-1)
        return om

    def matrix_float(self) -> np.ndarray:
        return rt.to_float(self.matrix())


def omega_matrix(descriptor: AlgebraDescriptor) -> np.ndarray:
    if descriptor.family is not Family.SP_CONTACT:
        raise AlgebraMismatchError("omega only defined for the sp family")
    return SymplecticForm(descriptor.param).matrix()


def _j_matrix(n: int) -> np.ndarray:
    j = rt.fzeros(2 * n, 2 * n)
    for i in range(n):
        j[i, n + i] = Fraction(1)
        j[n + i, i] = Fraction(-1)
    return j


class GradedElement:
    """A matrix tagged with its ambient algebra; validated on construction."""

    __slots__ = ("descriptor", "entries", "exact")

    def __init__(self, descriptor: AlgebraDescriptor, entries, check=True):
        self.descriptor = descriptor
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
            tr = sum(self.entries[i, i] for i in range(d.matrix_size))
            ok = tr == 0 if self.exact else abs(tr) < 1e-10
            if not ok:
                raise ValueError("not trace-free")
        else:
            om = omega_matrix(d)
            if self.exact:
                res = self.entries.T @ om + om @ self.entries
                if not rt.is_zero(res):
                    raise ValueError("omega compatibility fails")
            else:
                omf = rt.to_float(om)
                res = self.entries.T @ omf + omf @ self.entries
                if np.abs(res).max() >= 1e-10:
                    raise ValueError("omega compatibility fails")

    def to_float(self) -> np.ndarray:
        return rt.to_float(self.entries) if self.exact else self.entries.copy()

    def __add__(self, other):
        self._same(other)
        return GradedElement(self.descriptor, self.entries + other.entries, check=False)

    def __sub__(self, other):
        self._same(other)
        return GradedElement(self.descriptor, self.entries - other.entries, check=False)

    def __rmul__(self, c):
        c = rt.frac(c) if self.exact else float(c)
        return GradedElement(self.descriptor, c * self.entries, check=False)

    def __neg__(self):
        return GradedElement(self.descriptor, -self.entries, check=False)

    def __eq__(self, other):
        if not isinstance(other, GradedElement) or self.descriptor != other.descriptor:
            return False
        if self.exact and other.exact:
            return rt.mat_eq(self.entries, other.entries)
        return np.allclose(self.to_float(), other.to_float(), atol=1e-12)

    def __hash__(self):
        raise TypeError("unhashable")

    def is_zero(self) -> bool:
        if self.exact:
            return rt.is_zero(self.entries)
        return np.abs(self.entries).max() == 0.0

    def _same(self, other):
        if self.descriptor != other.descriptor:
            raise AlgebraMismatchError("algebra mismatch")

    def __repr__(self):
        return f"GradedElement({self.descriptor.family.value}, param={self.descriptor.param})"


def zero_element(descriptor: AlgebraDescriptor) -> GradedElement:
    return GradedElement(descriptor, rt.fzeros(descriptor.matrix_size, descriptor.matrix_size))


def bracket(x: GradedElement, y: GradedElement) -> GradedElement:
    """Matrix commutator x y - y x."""
    if x.descriptor != y.descriptor:
        raise AlgebraMismatchError("algebra mismatch")
    return GradedElement(
        x.descriptor, x.entries @ y.entries - y.entries @ x.entries, check=False
    )


def grade_project(x: GradedElement, k: int) -> GradedElement:
    """Zero out every entry whose block grade differs from k."""
    d = x.descriptor
    if k not in d.grades:
        raise ValueError(f"grade {k} outside range of {d.family.value}")
    w = d.weights()
    size = d.matrix_size
    out = rt.fzeros(size, size) if x.exact else np.zeros((size, size))
    for i in range(size):
        for j in range(size):
            if w[i] - w[j] == k:
                out[i, j] = x.entries[i, j]
    return GradedElement(d, out, check=False)


def grade_of(x: GradedElement):
    """The unique grade of a nonzero pure element, else None."""
    present = [k for k in x.descriptor.grades if not grade_project(x, k).is_zero()]
    return present[0] if len(present) == 1 else None


def _sp_basis(n: int, k: int) -> list:
    d = sp_contact(n)
    size = 2 * n + 2
    j = _j_matrix(n)
    out = []
    if k == -2:
        m = rt.fzeros(size, size)
        m[size - 1, 0] = Fraction(1)
        out.append(m)
    elif k == -1:
        for i in range(2 * n):
            m = rt.fzeros(size, size)
            m[1 + i, 0] = Fraction(1)
            for c in range(2 * n):
                m[size - 1, 1 + c] = -j[i, c]
            out.append(m)
    elif k == 0:
        m = rt.fzeros(size, size)
        m[0, 0] = Fraction(1)
        m[size - 1, size - 1] = Fraction(-1)
        out.append(m)
        for a, b in [(a, b) for a in range(2 * n) for b in range(a, 2 * n)]:
            s = rt.fzeros(2 * n, 2 * n)
            s[a, b] += Fraction(1)
            s[b, a] += Fraction(1) if a != b else Fraction(0)
            block = -(j @ s)
            m = rt.fzeros(size, size)
            m[1 : size - 1, 1 : size - 1] = block
            out.append(m)
    elif k == 1:
        for i in range(2 * n):
            m = rt.fzeros(size, size)
            m[0, 1 + i] = Fraction(1)
            for r in range(2 * n):
                m[1 + r, size - 1] = j[r, i]
            out.append(m)
    elif k == 2:
        m = rt.fzeros(size, size)
        m[0, size - 1] = Fraction(1)
        out.append(m)
    return [GradedElement(d, m) for m in out]


def _sl_basis(m: int, k: int) -> list:
    d = sl_projective(m)
    size = m + 1
    out = []
    if k == -1:
        for i in range(m):
            e = rt.fzeros(size, size)
            e[1 + i, 0] = Fraction(1)
            out.append(e)
    elif k == 0:
        for i in range(m):
            e = rt.fzeros(size, size)
            e[1 + i, 1 + i] = Fraction(1)
            e[0, 0] = Fraction(-1)
            out.append(e)
        for i in range(m):
            for j in range(m):
                if i != j:
                    e = rt.fzeros(size, size)
                    e[1 + i, 1 + j] = Fraction(1)
                    out.append(e)
    elif k == 1:
        for i in range(m):
            e = rt.fzeros(size, size)
            e[0, 1 + i] = Fraction(1)
            out.append(e)
    return [GradedElement(d, e) for e in out]


@lru_cache(maxsize=None)
def _basis_cached(descriptor: AlgebraDescriptor, k: int) -> tuple:
    if descriptor.family is Family.SP_CONTACT:
        return tuple(_sp_basis(descriptor.param, k))
    return tuple(_sl_basis(descriptor.param, k))


def basis(descriptor: AlgebraDescriptor, k=None) -> list:
    """Integer-entry basis of grade k, or of the whole algebra (k=None),
    ordered by ascending grade.  Elements are shared; treat them as frozen."""
    if k is None:
        out = []
        for g in descriptor.grades:
            out.extend(_basis_cached(descriptor, g))
        return out
    if k not in descriptor.grades:
        raise ValueError(f"grade {k} outside range")
    return list(_basis_cached(descriptor, k))


def killing_pair(x: GradedElement, y: GradedElement):
    """Killing form as the trace form times the family constant:
    2n+4 for sp(2n+2), 2(m+1) for sl(m+1)."""
    if x.descriptor != y.descriptor:
        raise AlgebraMismatchError("algebra mismatch")
    d = x.descriptor
    factor = 2 * d.param + 4 if d.family is Family.SP_CONTACT else 2 * (d.param + 1)
    prod = x.entries @ y.entries
    tr = sum(prod[i, i] for i in range(d.matrix_size))
    return rt.frac(factor) * tr if (x.exact and y.exact) else float(factor) * tr


def grading_element(descriptor: AlgebraDescriptor) -> GradedElement:
    """E with [E, x] = k x for x of grade k."""
    size = descriptor.matrix_size
    m = rt.fzeros(size, size)
    if descriptor.family is Family.SP_CONTACT:
        m[0, 0] = Fraction(1)
        m[size - 1, size - 1] = Fraction(-1)
    else:
        mm = descriptor.param
        m[0, 0] = Fraction(mm, mm + 1)
        for i in range(mm):
            m[1 + i, 1 + i] = Fraction(-1, mm + 1)
    return GradedElement(descriptor, m)


def _coord_list(d: AlgebraDescriptor, ent, jmat):
    """Block read-off of basis coordinates; works for exact and float arrays."""
    size = d.matrix_size
    coords = []
    if d.family is Family.SP_CONTACT:
        n = d.param
        coords.append(ent[size - 1, 0])
        coords.extend(ent[1 + i, 0] for i in range(2 * n))
        coords.append(ent[0, 0])
        s = jmat @ ent[1 : size - 1, 1 : size - 1]
        coords.extend(s[a, b] for a in range(2 * n) for b in range(a, 2 * n))
        coords.extend(ent[0, 1 + i] for i in range(2 * n))
        coords.append(ent[0, size - 1])
    else:
        m = d.param
        coords.extend(ent[1 + i, 0] for i in range(m))
        coords.extend(ent[1 + i, 1 + i] for i in range(m))
        coords.extend(ent[1 + i, 1 + j] for i in range(m) for j in range(m) if i != j)
        coords.extend(ent[0, 1 + i] for i in range(m))
    return coords


def coordinates(x: GradedElement) -> np.ndarray:
    """Coordinates of x over basis(descriptor), grades ascending."""
    d = x.descriptor
    ent = x.entries if x.exact else rt.fmat(x.entries)
    jmat = _j_matrix(d.param) if d.family is Family.SP_CONTACT else None
    coords = _coord_list(d, ent, jmat)
    out = np.empty(len(coords), dtype=object)
    for i, c in enumerate(coords):
        out[i] = rt.frac(c)
    return out


def from_coordinates(descriptor: AlgebraDescriptor, coords) -> GradedElement:
    bs = basis(descriptor)
    acc = rt.fzeros(descriptor.matrix_size, descriptor.matrix_size)
    for c, b in zip(coords, bs):
        if c != 0:
            acc = acc + rt.frac(c) * b.entries
    return GradedElement(descriptor, acc, check=False)


class StructureData:
    """Cached bases, grades and bracket tables for one descriptor."""

    def __init__(self, descriptor: AlgebraDescriptor):
        self.descriptor = descriptor
        self.basis = basis(descriptor)
        self.grades = []
        for g in descriptor.grades:
            self.grades.extend([g] * len(basis(descriptor, g)))
        self.dim = len(self.basis)
        self.neg_indices = [i for i, g in enumerate(self.grades) if g < 0]
        self.pos_indices = [i for i, g in enumerate(self.grades) if g > 0]
        self._bracket_coords = {}
        self._gram = None
        self._gram_inv = None

    def indices_of_grade(self, k) -> list:
        return [i for i, g in enumerate(self.grades) if g == k]

    def bracket_coords(self, i: int, j: int) -> np.ndarray:
        """Coordinates of [basis_i, basis_j] over the full basis."""
        key = (i, j)
        if key not in self._bracket_coords:
            br = bracket(self.basis[i], self.basis[j])
            self._bracket_coords[key] = coordinates(br)
        return self._bracket_coords[key]

    @property
    def gram(self) -> np.ndarray:
        """Killing pairing of the g_- basis (rows) with the p_+ basis (cols)."""
        if self._gram is None:
            neg = [self.basis[i] for i in self.neg_indices]
            pos = [self.basis[i] for i in self.pos_indices]
            self._gram = rt.fmat(
                [[killing_pair(a, b) for b in pos] for a in neg]
            )
        return self._gram

    @property
    def gram_inv(self) -> np.ndarray:
        if self._gram_inv is None:
            self._gram_inv = rt.inv(self.gram)
        return self._gram_inv


@lru_cache(maxsize=None)
def structure(descriptor: AlgebraDescriptor) -> StructureData:
    return StructureData(descriptor)


def structure_tensor(descriptor: AlgebraDescriptor) -> np.ndarray:
    """Dense float tensor C with [b_i, b_j] = sum_k C[i,j,k] b_k.

    All structure constants are small integers, so float64 is exact here.
    """
    st = structure(descriptor)
    bs = np.stack([b.to_float() for b in st.basis])
    prod = np.einsum("aij,bjk->abik", bs, bs)
    comm = prod - np.transpose(prod, (1, 0, 2, 3))
    jmat = None
    if descriptor.family is Family.SP_CONTACT:
        jmat = rt.to_float(_j_matrix(descriptor.param))
    c = np.zeros((st.dim, st.dim, st.dim))
    for i in range(st.dim):
        for j in range(i + 1, st.dim):
            row = _coord_list(descriptor, comm[i, j], jmat)
            c[i, j] = row
            c[j, i] = [-v for v in row]
    return c


def basis_table_json(descriptor: AlgebraDescriptor) -> dict:
    """Basis tables and the g_- x p_+ Killing Gram matrix, JSON-ready."""
    st = structure(descriptor)
    entries = []
    idx_in_grade = {}
    for i, b in enumerate(st.basis):
        g = st.grades[i]
        idx_in_grade[g] = idx_in_grade.get(g, -1) + 1
        entries.append(
            {
                "grade": g,
                "index": idx_in_grade[g],
                "entries": [[str(v) for v in row] for row in b.entries],
            }
        )
    return {
        "family": descriptor.family.value,
        "param": descriptor.param,
        "matrix_size": descriptor.matrix_size,
        "dim": st.dim,
        "basis": entries,
        "killing_gram_neg_pos": [[str(v) for v in row] for row in st.gram],
    }

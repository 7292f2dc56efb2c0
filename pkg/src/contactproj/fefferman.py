"""The Fefferman-type embedding sp(2n+2) < sl(2n+2) and curvature transfer.

The inclusion is the identity on matrices; only the descriptor (and with it
the grading) changes: m = 2n+1.  Grade -2 lands inside the projective grade
-1; each contact grade -1 element x splits as x = x1 + a0 where x1 keeps the
first column (projective grade -1) and a0 = x - x1 sits in projective grade 0
with [a0, x1] = 0.  Curvature maps transfer through the induced isomorphism
of the negative quotients, value by value.
"""

import json
from fractions import Fraction

import numpy as np

from . import rational as rt
from .algebra import (
    AlgebraDescriptor,
    Family,
    GradedElement,
    basis,
    coordinates,
    from_coordinates,
    grade_of,
    grade_project,
    sl_projective,
    sp_contact,
    structure,
    zero_element,
)
from .group import random_fraction


def embed(x: GradedElement) -> GradedElement:
    """Reinterpret a symplectic algebra element inside sl(2n+2)."""
    if x.descriptor.family is not Family.SP_CONTACT:
        raise ValueError("embed expects the symplectic family")
    target = sl_projective(2 * x.descriptor.param + 1)
    return GradedElement(target, x.entries.copy())


def split_grade_minus1(x: GradedElement):
    """For x of pure contact grade -1, the pair (x1, a0) with embed(x) = x1 + a0,
    x1 the first-column part (projective grade -1) and a0 commuting with x1."""
    if x.descriptor.family is not Family.SP_CONTACT:
        raise ValueError("split expects the symplectic family")
    if not x.is_zero() and grade_of(x) != -1:
        raise ValueError("x must be pure grade -1")
    big = embed(x)
    size = x.descriptor.matrix_size
    col = rt.fzeros(size, size) if x.exact else np.zeros((size, size))
    col[:, 0] = x.entries[:, 0]
    x1 = GradedElement(big.descriptor, col, check=False)
    a0 = big - x1
    return x1, a0


def quotient_dim(descriptor: AlgebraDescriptor) -> int:
    return len(structure(descriptor).neg_indices)


def quotient_embedding_indices(n: int) -> list:
    """Index map of the isomorphism (contact g/p) -> (projective g/p): position
    q in the contact negative basis goes to this position in the projective one."""
    # contact order: [grade -2 generator, grade -1 with X = e_0..e_{2n-1}]
    # projective order: first-column units E_{1+i,0}, i = 0..2n
    return [2 * n] + list(range(2 * n))


class CurvatureMap:
    """Alternating map on the negative quotient basis with values in g.

    values[(i, j)] for i < j holds the value on (class_i, class_j); the other
    pairs follow by antisymmetry.
    """

    def __init__(self, descriptor: AlgebraDescriptor, values=None):
        self.descriptor = descriptor
        self.qdim = quotient_dim(descriptor)
        self.values = {}
        for (i, j), v in (values or {}).items():
            self.set_value(i, j, v)

    def set_value(self, i, j, v: GradedElement):
        if not 0 <= i < self.qdim and 0 <= j < self.qdim:
            raise IndexError("quotient index out of range")
        if v.descriptor != self.descriptor:
            raise ValueError("value in the wrong algebra")
        if i == j:
            raise ValueError("diagonal values are zero by antisymmetry")
        if i < j:
            self.values[(i, j)] = v
        else:
            self.values[(j, i)] = -v

    def value(self, i, j) -> GradedElement:
        if i == j:
            return zero_element(self.descriptor)
        if i < j:
            v = self.values.get((i, j))
            return v if v is not None else zero_element(self.descriptor)
        v = self.values.get((j, i))
        return -v if v is not None else zero_element(self.descriptor)

    def is_zero(self) -> bool:
        return all(v.is_zero() for v in self.values.values())

    def __eq__(self, other):
        if not isinstance(other, CurvatureMap) or other.descriptor != self.descriptor:
            return False
        pairs = set(self.values) | set(other.values)
        return all(self.value(*p) == other.value(*p) for p in pairs)


def transfer_curvature(k: CurvatureMap) -> CurvatureMap:
    """Push a contact curvature map to the projective side: the transferred map
    on transferred quotient classes is the embedding of the original value."""
    if k.descriptor.family is not Family.SP_CONTACT:
        raise ValueError("transfer starts from the symplectic family")
    n = k.descriptor.param
    idx = quotient_embedding_indices(n)
    out = CurvatureMap(sl_projective(2 * n + 1))
    for (i, j), v in k.values.items():
        out.set_value(idx[i], idx[j], embed(v))
    return out


def is_torsion_free(k: CurvatureMap) -> bool:
    """True iff every value lies in the parabolic (no negative grades)."""
    for v in k.values.values():
        for g in v.descriptor.grades:
            if g < 0 and not grade_project(v, g).is_zero():
                return False
    return True


def random_curvature_map(
    descriptor: AlgebraDescriptor, rng, height=2, parabolic_values=False
) -> CurvatureMap:
    """Random rational curvature map; parabolic_values restricts values to p."""
    k = CurvatureMap(descriptor)
    grades = [g for g in descriptor.grades if g >= 0] if parabolic_values else None
    for i in range(k.qdim):
        for j in range(i + 1, k.qdim):
            x = zero_element(descriptor)
            for kk in grades if grades is not None else descriptor.grades:
                for b in basis(descriptor, kk):
                    x = x + random_fraction(rng, height) * b
            k.set_value(i, j, x)
    return k


def curvature_to_json(k: CurvatureMap) -> str:
    payload = {
        "family": k.descriptor.family.value,
        "param": k.descriptor.param,
        "values": {
            f"{i},{j}": [str(c) for c in coordinates(v)]
            for (i, j), v in sorted(k.values.items())
        },
    }
    return json.dumps(payload, sort_keys=True, indent=2)


def curvature_from_json(text: str) -> CurvatureMap:
    payload = json.loads(text)
    fam = Family(payload["family"])
    desc = (
        sp_contact(payload["param"])
        if fam is Family.SP_CONTACT
        else sl_projective(payload["param"])
    )
    k = CurvatureMap(desc)
    for key, coords in payload["values"].items():
        i, j = (int(p) for p in key.split(","))
        k.set_value(i, j, from_coordinates(desc, [Fraction(c) for c in coords]))
    return k


def transfer_coordinate_matrix(n: int) -> np.ndarray:
    """Matrix of the curvature transfer on coordinates; used for the kernel
    (injectivity) check."""
    sp = sp_contact(n)
    sl = sl_projective(2 * n + 1)
    q = quotient_dim(sp)
    sp_dim = sp.dim
    sl_dim = sl.dim
    pairs_sp = [(i, j) for i in range(q) for j in range(i + 1, q)]
    pairs_sl = pairs_sp  # same quotient dimension
    col_index = {(p, b): k for k, (p, b) in enumerate((p, b) for p in pairs_sp for b in range(sp_dim))}
    rows = len(pairs_sl) * sl_dim
    mat = rt.fzeros(rows, len(col_index))
    sp_basis = basis(sp)
    pair_pos = {p: k for k, p in enumerate(pairs_sl)}
    for (p, b), col in col_index.items():
        k = CurvatureMap(sp)
        k.set_value(p[0], p[1], sp_basis[b])
        t = transfer_curvature(k)
        for (i, j), v in t.values.items():
            coords = coordinates(v)
            base = pair_pos[(i, j)] * sl_dim
            for r, c in enumerate(coords):
                if c != 0:
                    mat[base + r, col] = c
    return mat

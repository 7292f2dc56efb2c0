"""Cochain spaces Lambda^k p_+ (x) g, the Kostant codifferential, the
Chevalley-Eilenberg differential and the Kostant Laplacian, all in exact
rational arithmetic.

Cochains are sparse: coefficients are indexed by (sorted wedge tuple of p_+
basis positions, full g basis index).  The codifferential is the Lie algebra
homology boundary

    d*(Z_1 ^ ... ^ Z_k (x) A) = sum_a (-1)^a  Z_1 ^ ..a^.. (x) [Z_a, A]
                              + sum_{a<b} (-1)^{a+b} [Z_a, Z_b] ^ ..a,b^.. (x) A

(positions 1-indexed), which for k = 2 is -W(x)[Z,A] + Z(x)[W,A] - [Z,W](x)A.
The differential is the Chevalley-Eilenberg one of the nilpotent algebra g_-
acting on g by the adjoint action, carried over to p_+ coordinates through the
Killing duality between g/p and p_+.  Cochains are graded by the sum of the
grades of all tensor slots; the Laplacian preserves that grading.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

import numpy as np

from . import rational as rt
from .algebra import (
    AlgebraDescriptor,
    Family,
    GradedElement,
    coordinates,
    from_coordinates,
    structure,
    zero_element,
)
from .fefferman import CurvatureMap

MAX_SP_SIZE = 4
MAX_SL_SIZE = 8


class SizeGuardError(ValueError):
    pass


class CochainElement:
    """Element of Lambda^degree p_+ (x) g with exact rational coefficients."""

    __slots__ = ("descriptor", "degree", "coeffs")

    def __init__(self, descriptor: AlgebraDescriptor, degree: int, coeffs=None):
        if degree not in (0, 1, 2, 3):
            raise ValueError("degree must be 0..3")
        self.descriptor = descriptor
        self.degree = degree
        self.coeffs = {}
        for (wedge, j), v in (coeffs or {}).items():
            self.add_term(wedge, j, v)

    def add_term(self, wedge, j, v):
        wedge = tuple(wedge)
        if len(wedge) != self.degree or list(wedge) != sorted(set(wedge)):
            raise ValueError("wedge index must be a sorted tuple without repeats")
        v = rt.frac(v)
        if v == 0:
            return
        key = (wedge, j)
        cur = self.coeffs.get(key, Fraction(0)) + v
        if cur == 0:
            self.coeffs.pop(key, None)
        else:
            self.coeffs[key] = cur

    def is_zero(self):
        return not self.coeffs

    def __add__(self, other):
        self._compat(other)
        out = CochainElement(self.descriptor, self.degree, self.coeffs)
        for (wedge, j), v in other.coeffs.items():
            out.add_term(wedge, j, v)
        return out

    def __sub__(self, other):
        return self + (-1) * other

    def __rmul__(self, c):
        c = rt.frac(c)
        out = CochainElement(self.descriptor, self.degree)
        if c != 0:
            for (wedge, j), v in self.coeffs.items():
                out.coeffs[(wedge, j)] = c * v
        return out

    def __eq__(self, other):
        return (
            isinstance(other, CochainElement)
            and other.descriptor == self.descriptor
            and other.degree == self.degree
            and other.coeffs == self.coeffs
        )

    def _compat(self, other):
        if self.descriptor != other.descriptor or self.degree != other.degree:
            raise ValueError("cochain mismatch")

    def __repr__(self):
        return f"CochainElement(deg={self.degree}, terms={len(self.coeffs)})"


class CochainContext:
    """Cached bracket tables, grades and duality data for one descriptor."""

    def __init__(self, descriptor: AlgebraDescriptor):
        self.descriptor = descriptor
        self.st = structure(descriptor)
        self.pos = self.st.pos_indices          # p_+ positions -> g basis index
        self.neg = self.st.neg_indices
        self.pdim = len(self.pos)
        self.ndim = len(self.neg)
        self.gdim = self.st.dim
        self._pos_of = {g: b for b, g in enumerate(self.pos)}
        self._neg_of = {g: s for s, g in enumerate(self.neg)}
        self.ggrade = self.st.grades
        self.pgrade = [self.ggrade[i] for i in self.pos]
        self.ngrade = [self.ggrade[i] for i in self.neg]
        self.gram = self.st.gram                # ndim x ndim, rows g_-, cols p_+
        self.gram_inv = self.st.gram_inv
        self._winv = {}
        self._pp = {}
        self._pg = {}
        self._ng = {}
        self._nn = {}

    def bracket_pg(self, b, j):
        """[Z_b, A_j] as sparse coords over the full g basis."""
        key = (b, j)
        if key not in self._pg:
            coords = self.st.bracket_coords(self.pos[b], j)
            self._pg[key] = {k: v for k, v in enumerate(coords) if v != 0}
        return self._pg[key]

    def bracket_pp(self, b1, b2):
        """[Z_b1, Z_b2] as sparse coords over p_+ positions."""
        key = (b1, b2)
        if key not in self._pp:
            coords = self.st.bracket_coords(self.pos[b1], self.pos[b2])
            out = {}
            for k, v in enumerate(coords):
                if v != 0:
                    out[self._pos_of[k]] = v
            self._pp[key] = out
        return self._pp[key]

    def bracket_ng(self, s, j):
        """[B_s, A_j] over the full g basis."""
        key = (s, j)
        if key not in self._ng:
            coords = self.st.bracket_coords(self.neg[s], j)
            self._ng[key] = {k: v for k, v in enumerate(coords) if v != 0}
        return self._ng[key]

    def bracket_nn(self, s1, s2):
        """[B_s1, B_s2] over g_- positions (g_- is a subalgebra)."""
        key = (s1, s2)
        if key not in self._nn:
            coords = self.st.bracket_coords(self.neg[s1], self.neg[s2])
            out = {}
            for k, v in enumerate(coords):
                if v != 0:
                    out[self._neg_of[k]] = v
            self._nn[key] = out
        return self._nn[key]

    def minor_det(self, rows, cols):
        """det of the gram submatrix on (neg rows, pos cols)."""
        k = len(rows)
        g = self.gram
        if k == 0:
            return Fraction(1)
        if k == 1:
            return g[rows[0], cols[0]]
        if k == 2:
            return (
                g[rows[0], cols[0]] * g[rows[1], cols[1]]
                - g[rows[0], cols[1]] * g[rows[1], cols[0]]
            )
        sub = g[np.ix_(rows, cols)]
        return rt.det(sub)

    def wedge_tuples(self, k):
        return list(combinations(range(self.pdim), k))

    def w_inverse(self, k):
        """Inverse of the compound pairing matrix W_k[T, I] = det(gram[T, I])."""
        if k not in self._winv:
            tuples = self.wedge_tuples(k)
            w = rt.fmat(
                [[self.minor_det(t, i) for i in tuples] for t in tuples]
            ) if tuples else rt.fzeros(0, 0)
            self._winv[k] = (tuples, rt.inv(w) if tuples else w)
        return self._winv[k]


@lru_cache(maxsize=None)
def context(descriptor: AlgebraDescriptor) -> CochainContext:
    return CochainContext(descriptor)


def _insert_sorted(idx, wedge):
    """(sign, tuple) for Z_idx ^ Z_wedge, or None if idx repeats."""
    if idx in wedge:
        return None
    pos = sum(1 for w in wedge if w < idx)
    return (-1) ** pos, tuple(sorted(wedge + (idx,)))


def codifferential(c: CochainElement) -> CochainElement:
    """Homology boundary, degree k -> k-1."""
    if c.degree == 0:
        raise ValueError("codifferential needs degree >= 1")
    ctx = context(c.descriptor)
    out = CochainElement(c.descriptor, c.degree - 1)
    for (wedge, j), v in c.coeffs.items():
        k = len(wedge)
        for a in range(k):
            rest = wedge[:a] + wedge[a + 1 :]
            sign = (-1) ** (a + 1)
            for jj, bv in ctx.bracket_pg(wedge[a], j).items():
                out.add_term(rest, jj, sign * v * bv)
        for a in range(k):
            for b in range(a + 1, k):
                rest = tuple(x for i, x in enumerate(wedge) if i not in (a, b))
                sign = (-1) ** (a + 1 + b + 1)
                for pb, pv in ctx.bracket_pp(wedge[a], wedge[b]).items():
                    ins = _insert_sorted(pb, rest)
                    if ins is not None:
                        out.add_term(ins[1], j, sign * ins[0] * v * pv)
    return out


def _evaluate(c: CochainElement, ctx: CochainContext):
    """Values of c on sorted tuples of g_- basis vectors: {tuple: {g_index: coeff}}."""
    k = c.degree
    out = {t: {} for t in combinations(range(ctx.ndim), k)}
    for (wedge, j), v in c.coeffs.items():
        for t in out:
            d = ctx.minor_det(t, wedge) if k else Fraction(1)
            if d != 0:
                cur = out[t].get(j, Fraction(0)) + v * d
                if cur == 0:
                    out[t].pop(j, None)
                else:
                    out[t][j] = cur
    return out


def _eval_at(evals, ctx, args):
    """Evaluate from the sorted-tuple table at an arbitrary argument tuple."""
    order = tuple(sorted(args))
    if len(set(args)) != len(args):
        return {}
    sign = _permutation_sign(args, order)
    base = evals.get(order, {})
    return {j: sign * v for j, v in base.items()}


def _permutation_sign(args, order):
    args = list(args)
    sign = 1
    for i, target in enumerate(order):
        j = args.index(target)
        if j != i:
            args[i], args[j] = args[j], args[i]
            sign = -sign
    return sign


def differential(c: CochainElement) -> CochainElement:
    """Chevalley-Eilenberg differential of g_- with adjoint coefficients,
    degree k -> k+1, expressed back in p_+ coordinates."""
    if c.degree == 3:
        raise ValueError("differential needs degree <= 2")
    ctx = context(c.descriptor)
    k = c.degree
    evals = _evaluate(c, ctx)
    new_ev = {}
    for s_tuple in combinations(range(ctx.ndim), k + 1):
        acc = {}
        for a in range(k + 1):
            rest = s_tuple[:a] + s_tuple[a + 1 :]
            inner = evals[rest]
            sign = (-1) ** a
            for j, v in inner.items():
                for jj, bv in ctx.bracket_ng(s_tuple[a], j).items():
                    cur = acc.get(jj, Fraction(0)) + sign * v * bv
                    if cur == 0:
                        acc.pop(jj, None)
                    else:
                        acc[jj] = cur
        for a in range(k + 1):
            for b in range(a + 1, k + 1):
                rest = tuple(x for i, x in enumerate(s_tuple) if i not in (a, b))
                sign = (-1) ** (a + b)
                for s, sv in ctx.bracket_nn(s_tuple[a], s_tuple[b]).items():
                    vals = _eval_at(evals, ctx, (s,) + rest)
                    for j, v in vals.items():
                        cur = acc.get(j, Fraction(0)) + sign * sv * v
                        if cur == 0:
                            acc.pop(j, None)
                        else:
                            acc[j] = cur
        if acc:
            new_ev[s_tuple] = acc
    tuples, winv = ctx.w_inverse(k + 1)
    out = CochainElement(c.descriptor, k + 1)
    if not tuples:
        return out
    tpos = {t: i for i, t in enumerate(tuples)}
    cols = {}
    for t, vals in new_ev.items():
        for j, v in vals.items():
            cols.setdefault(j, {})[tpos[t]] = v
    for j, col in cols.items():
        for i_out, t_out in enumerate(tuples):
            s = Fraction(0)
            for i_in, v in col.items():
                if winv[i_out, i_in] != 0:
                    s += winv[i_out, i_in] * v
            if s != 0:
                out.add_term(t_out, j, s)
    return out


def laplacian(c: CochainElement) -> CochainElement:
    """Kostant Laplacian d d* + d* d on degree-2 cochains."""
    if c.degree != 2:
        raise ValueError("laplacian is defined on degree 2 here")
    return differential(codifferential(c)) + codifferential(differential(c))


def homogeneity_of_term(ctx: CochainContext, wedge, j) -> int:
    """Natural grading of a basis cochain: sum of all slot grades."""
    return sum(ctx.pgrade[b] for b in wedge) + ctx.ggrade[j]


def homogeneity_decompose(c: CochainElement) -> dict:
    ctx = context(c.descriptor)
    out = {}
    for (wedge, j), v in c.coeffs.items():
        h = homogeneity_of_term(ctx, wedge, j)
        out.setdefault(h, CochainElement(c.descriptor, c.degree)).add_term(wedge, j, v)
    return out


def cochain_dims(descriptor: AlgebraDescriptor) -> dict:
    ctx = context(descriptor)
    from math import comb

    return {k: comb(ctx.pdim, k) * ctx.gdim for k in range(4)}


def levi_action(a_index: int, c: CochainElement) -> CochainElement:
    """Action of the g_0 basis element a on cochains: ad on every slot."""
    ctx = context(c.descriptor)
    st = ctx.st
    out = CochainElement(c.descriptor, c.degree)
    for (wedge, j), v in c.coeffs.items():
        for jj, bv in {k: w for k, w in enumerate(st.bracket_coords(a_index, j)) if w != 0}.items():
            out.add_term(wedge, jj, v * bv)
        for pos_in_wedge, b in enumerate(wedge):
            rest = wedge[:pos_in_wedge] + wedge[pos_in_wedge + 1 :]
            coords = st.bracket_coords(a_index, ctx.pos[b])
            for k, w in enumerate(coords):
                if w == 0:
                    continue
                pb = ctx._pos_of[k]
                ins = _insert_sorted(pb, rest)
                if ins is not None:
                    sign = (-1) ** pos_in_wedge
                    out.add_term(ins[1], j, sign * v * w * ins[0])
    return out


@dataclass
class KernelReport:
    family: str
    param: int
    cochain_dims: dict
    kernel_dim: int
    homogeneities: list
    support_blocks: list
    parabolic_valued: bool

    def to_json_dict(self) -> dict:
        return {
            "family": self.family,
            "param": self.param,
            "cochain_dims": {str(k): v for k, v in self.cochain_dims.items()},
            "kernel_dim": self.kernel_dim,
            "homogeneities": self.homogeneities,
            "support_blocks": self.support_blocks,
            "parabolic_valued": self.parabolic_valued,
        }


def _check_size_guard(descriptor):
    if descriptor.family is Family.SP_CONTACT and descriptor.param > MAX_SP_SIZE:
        raise SizeGuardError(f"sp size guard: n <= {MAX_SP_SIZE}")
    if descriptor.family is Family.SL_PROJECTIVE and descriptor.param > MAX_SL_SIZE:
        raise SizeGuardError(f"sl size guard: m <= {MAX_SL_SIZE}")


def _block_label(ctx, wedge, j):
    fam = ctx.descriptor.family
    tilde = "~" if fam is Family.SL_PROJECTIVE else ""
    parts = [f"g{tilde}{ctx.pgrade[b]}" for b in wedge]
    return "^".join(parts) + f"(x)g{tilde}{ctx.ggrade[j]}"


def kernel_basis(descriptor: AlgebraDescriptor):
    """Exact nullspace basis of the degree-2 Laplacian, slice by homogeneity
    slice, plus a report of its homogeneities and wedge-type support."""
    _check_size_guard(descriptor)
    ctx = context(descriptor)
    slices = {}
    for wedge in ctx.wedge_tuples(2):
        for j in range(ctx.gdim):
            h = homogeneity_of_term(ctx, wedge, j)
            slices.setdefault(h, []).append((wedge, j))
    kernel = []
    for h in sorted(slices):
        terms = slices[h]
        mat = rt.fzeros(len(terms), len(terms))
        tindex = {t: i for i, t in enumerate(terms)}
        for col, (wedge, j) in enumerate(terms):
            c = CochainElement(descriptor, 2, {(wedge, j): Fraction(1)})
            lc = laplacian(c)
            for (w2, j2), v in lc.coeffs.items():
                mat[tindex[(w2, j2)], col] = v
        for vec in rt.nullspace(mat):
            c = CochainElement(descriptor, 2)
            for i, v in enumerate(vec):
                if v != 0:
                    c.add_term(terms[i][0], terms[i][1], v)
            kernel.append(c)
    homogeneities = sorted(
        {h for c in kernel for h in homogeneity_decompose(c)}
    )
    support = sorted(
        {_block_label(ctx, wedge, j) for c in kernel for (wedge, j) in c.coeffs}
    )
    parabolic = all(
        ctx.ggrade[j] >= 0 for c in kernel for (_, j) in c.coeffs
    )
    report = KernelReport(
        family=descriptor.family.value,
        param=descriptor.param,
        cochain_dims=cochain_dims(descriptor),
        kernel_dim=len(kernel),
        homogeneities=homogeneities,
        support_blocks=support,
        parabolic_valued=parabolic,
    )
    return kernel, report


def curvature_to_cochain(k: CurvatureMap) -> CochainElement:
    """Carry a curvature map to Lambda^2 p_+ (x) g through the Killing duality."""
    ctx = context(k.descriptor)
    out = CochainElement(k.descriptor, 2)
    ginv = ctx.gram_inv
    for (s, t), val in k.values.items():
        vc = coordinates(val)
        for b1 in range(ctx.pdim):
            for b2 in range(b1 + 1, ctx.pdim):
                coeff = ginv[b1, s] * ginv[b2, t] - ginv[b2, s] * ginv[b1, t]
                if coeff == 0:
                    continue
                for j, v in enumerate(vc):
                    if v != 0:
                        out.add_term((b1, b2), j, coeff * v)
    return out


def cochain_to_curvature(c: CochainElement) -> CurvatureMap:
    """Inverse of curvature_to_cochain: evaluate on pairs of g_- basis vectors."""
    if c.degree != 2:
        raise ValueError("curvature maps are degree-2 data")
    ctx = context(c.descriptor)
    evals = _evaluate(c, ctx)
    k = CurvatureMap(c.descriptor)
    for (s, t), vals in evals.items():
        if not vals:
            continue
        coords = [Fraction(0)] * ctx.gdim
        for j, v in vals.items():
            coords[j] = v
        k.set_value(s, t, from_coordinates(c.descriptor, coords))
    return k


def is_normal(k: CurvatureMap) -> bool:
    """d* of the associated cochain vanishes identically."""
    return codifferential(curvature_to_cochain(k)).is_zero()

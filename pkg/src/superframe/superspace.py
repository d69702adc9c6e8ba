"""The p-fold direct sum of the function space and its operator algebra.

A SuperVector is an ordered p-tuple of piecewise functions.  The module
realizes the lifted dilation (which permutes components by the inverse of
the dual label permutation while dilating each), the phased translations
(component q picks up the exact rational phase k . theta*_q), the diagonal
embeddings, the componentwise rescaling unitary, and the unique
decomposition of the direct sum into the p shifted diagonal subspaces.
"""

from __future__ import annotations

import math
from typing import Sequence

from .errors import ShapeMismatch
from .funcspace import (
    PiecewiseFunction,
    add,
    dilate,
    function_from_json,
    function_to_json,
    inner_product,
    linear_combination,
    scale_p,
    scale_values,
    sup_distance,
    translate,
    zero,
    _transform,
)
from .intlin import as_intvec, dot
from .quotient import CosetSystem, perm_power, unit_phase


class SuperVector:
    """Element of the p-fold direct sum; immutable component tuple."""

    __slots__ = ("components",)

    def __init__(self, components: Sequence[PiecewiseFunction]):
        components = tuple(components)
        if not components:
            raise ShapeMismatch("a super vector needs at least one component")
        dim = components[0].dim
        if any(c.dim != dim for c in components):
            raise ShapeMismatch("all components must share a dimension")
        self.components = components

    @property
    def p(self) -> int:
        return len(self.components)

    @property
    def dim(self) -> int:
        return self.components[0].dim

    def __getitem__(self, q: int) -> PiecewiseFunction:
        return self.components[q]

    def __repr__(self) -> str:
        return f"SuperVector(p={self.p}, dim={self.dim})"


def _require_compatible(g: SuperVector, cs: CosetSystem) -> None:
    if g.p != cs.p:
        raise ShapeMismatch(f"super vector has {g.p} components, system expects {cs.p}")
    if g.dim != cs.dim:
        raise ShapeMismatch(f"super vector dimension {g.dim} does not match system {cs.dim}")


def embed_s(f: PiecewiseFunction, cs: CosetSystem) -> SuperVector:
    """Isometric diagonal embedding: every component is f / sqrt(p)."""
    comp = scale_values(f, 1.0 / math.sqrt(cs.p))
    return SuperVector([comp] * cs.p)


def embed_s_prime(f: PiecewiseFunction, cs: CosetSystem) -> SuperVector:
    """Rescaled diagonal embedding: every component is f(P^{-1} x) / p."""
    comp = _transform(f, cs.p_matrix.to_rational(), None, 1.0 / cs.p)
    return SuperVector([comp] * cs.p)


def super_translate(g: SuperVector, k, cs: CosetSystem, primed: bool = False) -> SuperVector:
    """Phased translation: component q gains phase e^{2 pi i k . theta*_q}
    and is shifted by P^{-1}k (default) or by k itself (primed variant)."""
    _require_compatible(g, cs)
    k = as_intvec(k, cs.dim)
    shift = k if primed else cs.p_matrix.inverse().apply(k)
    out = []
    for q in range(cs.p):
        phase = unit_phase(dot(k, cs.theta_star[q]))
        out.append(translate(scale_values(g[q], phase), shift))
    return SuperVector(out)


def super_dilate(g: SuperVector, j: int, cs: CosetSystem, primed: bool = False) -> SuperVector:
    """j-th power of the lifted dilation.

    Output component q is the j-th dilation power applied to input
    component (sigma*)^{-j}(q); the closed form avoids compounding
    amplitude rounding across |j| single steps.
    """
    _require_compatible(g, cs)
    if j == 0:
        return g
    source = perm_power(cs.sigma_star, -j)
    matrix = cs.m_prime if primed else cs.m
    return SuperVector([dilate(g[source[q]], matrix, j) for q in range(cs.p)])


def super_scale_p(g: SuperVector, cs: CosetSystem) -> SuperVector:
    """Componentwise rescaling unitary sqrt(p) f(P x)."""
    _require_compatible(g, cs)
    return SuperVector([scale_p(c, cs.p_matrix) for c in g.components])


def super_add(g1: SuperVector, g2: SuperVector) -> SuperVector:
    if g1.p != g2.p or g1.dim != g2.dim:
        raise ShapeMismatch("component counts and dimensions must match")
    return SuperVector([add(a, b) for a, b in zip(g1.components, g2.components)])


def super_scale_values(g: SuperVector, c: complex) -> SuperVector:
    return SuperVector([scale_values(comp, c) for comp in g.components])


def super_inner_product(g1: SuperVector, g2: SuperVector) -> complex:
    """Direct-sum inner product: sum over components."""
    if g1.p != g2.p or g1.dim != g2.dim:
        raise ShapeMismatch("component counts and dimensions must match")
    parts = [inner_product(a, b) for a, b in zip(g1.components, g2.components)]
    return complex(
        math.fsum(z.real for z in parts), math.fsum(z.imag for z in parts)
    )


def super_norm_sq(g: SuperVector) -> float:
    return math.fsum(c.norm_sq() for c in g.components)


def super_norm(g: SuperVector) -> float:
    return math.sqrt(super_norm_sq(g))


def super_sup_distance(g1: SuperVector, g2: SuperVector) -> float:
    if g1.p != g2.p or g1.dim != g2.dim:
        raise ShapeMismatch("component counts and dimensions must match")
    return max(sup_distance(a, b) for a, b in zip(g1.components, g2.components))


def super_zero(cs: CosetSystem, dim: int | None = None) -> SuperVector:
    return SuperVector([zero(dim or cs.dim)] * cs.p)


def decompose(g: SuperVector, cs: CosetSystem) -> list[PiecewiseFunction]:
    """Unique coordinates of g along the p shifted diagonal subspaces.

    Inverts the component mixing with the conjugate of the (unitary)
    Fourier matrix, then undoes the shift and the geometric rescaling:
    f_r = sqrt(p) h_r(P y + P theta_r) where h = conj(H) g.
    """
    _require_compatible(g, cs)
    out = []
    for r in range(cs.p):
        coeffs = [cs.fourier[r][q].conjugate() for q in range(cs.p)]
        h = linear_combination(coeffs, g.components)
        shift = tuple(-v for v in cs.translation_rep(r))
        out.append(scale_p(translate(h, shift), cs.p_matrix))
    return out


def reassemble(parts: Sequence[PiecewiseFunction], cs: CosetSystem) -> SuperVector:
    """Rebuild g = sum_r (phased translation by P theta_r of the rescaled
    diagonal embedding of part r); inverse of `decompose`."""
    if len(parts) != cs.p:
        raise ShapeMismatch(f"need exactly {cs.p} parts")
    acc = super_zero(cs, parts[0].dim)
    for r, f in enumerate(parts):
        term = super_translate(embed_s_prime(f, cs), cs.translation_rep(r), cs, primed=True)
        acc = super_add(acc, term)
    return acc


def supervector_to_json(g: SuperVector, cs: CosetSystem) -> dict:
    """JSON form tagged with the coset-system fingerprint."""
    _require_compatible(g, cs)
    return {
        "fingerprint": cs.fingerprint(),
        "components": [function_to_json(c) for c in g.components],
    }


def supervector_from_json(obj: dict, cs: CosetSystem) -> SuperVector:
    if obj.get("fingerprint") != cs.fingerprint():
        raise ShapeMismatch("serialized vector belongs to a different coset system")
    return SuperVector([function_from_json(c) for c in obj["components"]])

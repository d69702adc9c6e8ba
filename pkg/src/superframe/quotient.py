"""Admissibility and the finite-group apparatus of an oversampling pair.

Given an expansive integer dilation M and an integer oversampling matrix P
with p = |det P|, this module decides admissibility (P M P^{-1} integral
and M^{-1}Z^d meeting P^{-1}Z^d exactly in Z^d), enumerates canonical
representatives of the quotient group P^{-1}Z^d / Z^d and of its dual,
builds the unitary Fourier matrix of that finite abelian group, and
computes the label permutations induced by the dilation on both sides.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import NotAdmissible, NotAPermutation, NotExpansive, SingularMatrix
from .intlin import (
    IntMatrix,
    IntVec,
    LatticeBasis,
    RatVec,
    as_intvec,
    dot,
    format_rat_vector,
    inverse_lattice,
    lattice_intersection,
    reduce_mod1,
    smith_normal_form,
)

EXPANSIVE_TOL = 1e-9
UNITARITY_TOL = 1e-12


def unit_phase(t: Fraction) -> complex:
    """e^{2 pi i t} for an exact rational t, reduced mod 1 before evaluating."""
    t = t % 1
    if t == 0:
        return complex(1.0, 0.0)
    angle = 2.0 * math.pi * float(t)
    return complex(math.cos(angle), math.sin(angle))


def assert_expansive(m: IntMatrix, tol: float = EXPANSIVE_TOL) -> None:
    """Reject any eigenvalue with modulus <= 1 + tol.

    The check is numerical (double-precision eigenvalues); borderline
    matrices are rejected loudly rather than accepted silently.
    """
    eigs = np.linalg.eigvals(np.array(m.rows, dtype=float))
    for lam in eigs:
        if abs(lam) <= 1.0 + tol:
            raise NotExpansive(
                f"dilation matrix has eigenvalue {lam:.12g} with modulus <= 1",
                eigenvalue=complex(lam),
            )


@dataclass(frozen=True)
class AdmissibilityReport:
    """Verdict plus the witnesses for both sub-conditions."""

    admissible: bool
    m_prime_integral: bool
    intersection: LatticeBasis
    p: int
    m_prime: IntMatrix | None = None

    def to_json_dict(self) -> dict:
        return {
            "admissible": self.admissible,
            "m_prime_integral": self.m_prime_integral,
            "intersection_is_standard": self.intersection
            == LatticeBasis.standard(self.intersection.dim),
            "intersection_basis": self.intersection.basis.text(),
            "p": self.p,
            "m_prime": self.m_prime.text() if self.m_prime is not None else None,
        }


def check_admissible(m: IntMatrix, p: IntMatrix) -> AdmissibilityReport:
    """Decide whether P is an admissible oversampling matrix for M.

    Requires: P M P^{-1} integral and the lattices M^{-1}Z^d, P^{-1}Z^d
    intersecting exactly in Z^d.  Both sub-verdicts are reported.
    """
    if m.det() == 0:
        raise SingularMatrix("dilation matrix is singular")
    if p.det() == 0:
        raise SingularMatrix("oversampling matrix is singular")
    if m.dim != p.dim:
        raise ValueError("dilation and oversampling matrices must share a dimension")
    assert_expansive(m)
    m_prime_rat = (p.to_rational() @ m.to_rational()) @ p.inverse()
    integral = m_prime_rat.is_integral()
    intersection = lattice_intersection(inverse_lattice(m), inverse_lattice(p))
    admissible = integral and intersection == LatticeBasis.standard(m.dim)
    return AdmissibilityReport(
        admissible=admissible,
        m_prime_integral=integral,
        intersection=intersection,
        p=abs(p.det()),
        m_prime=m_prime_rat.to_int_matrix() if integral else None,
    )


@dataclass(frozen=True)
class OversamplingPair:
    """A dilation/oversampling matrix pair with its admissibility verdict."""

    m: IntMatrix
    p_matrix: IntMatrix
    p: int
    m_prime: IntMatrix | None
    report: AdmissibilityReport

    @classmethod
    def create(cls, m: IntMatrix, p_matrix: IntMatrix) -> "OversamplingPair":
        report = check_admissible(m, p_matrix)
        return cls(
            m=m,
            p_matrix=p_matrix,
            p=report.p,
            m_prime=report.m_prime,
            report=report,
        )

    @property
    def dim(self) -> int:
        return self.m.dim

    @property
    def admissible(self) -> bool:
        return self.report.admissible


def coset_representatives(p_matrix: IntMatrix) -> list[RatVec]:
    """Canonical transversal of P^{-1}Z^d / Z^d, coordinates in [0, 1).

    Enumeration goes through the Smith form U P V = S: the quotient is
    isomorphic to the direct sum of Z/s_i, and representatives are
    P^{-1} U^{-1} e reduced mod 1 as the digit vector e runs over the
    diagonal ranges in lexicographic order.  The zero class comes first.
    """
    if p_matrix.det() == 0:
        raise SingularMatrix("oversampling matrix is singular")
    d = p_matrix.dim
    u, s, _ = smith_normal_form(p_matrix)
    u_inv = u.inverse().to_int_matrix()
    p_inv = p_matrix.inverse()
    reps = []
    for digits in itertools.product(*(range(s.rows[i][i]) for i in range(d))):
        k = u_inv.apply(digits)
        reps.append(reduce_mod1(p_inv.apply(k)))
    expected = abs(p_matrix.det())
    if len(set(reps)) != expected:
        raise NotAPermutation("quotient enumeration produced duplicate classes")
    return reps


def dual_representatives(p_matrix: IntMatrix) -> list[RatVec]:
    """Canonical transversal of the dual group (P^T)^{-1}Z^d / Z^d."""
    return coset_representatives(p_matrix.transpose())


def induced_permutation(a: IntMatrix, reps: list[RatVec]) -> list[int]:
    """Label permutation r -> index of (A theta_r mod Z^d) in reps.

    Raises NotAPermutation if some image is not a listed class or the map
    is not bijective; under admissibility that cannot happen, so failure
    is a diagnostic for bad input rather than a silent fallback.
    """
    index = {reduce_mod1(rep): i for i, rep in enumerate(reps)}
    perm = []
    for rep in reps:
        image = reduce_mod1(a.apply(rep))
        target = index.get(image)
        if target is None:
            raise NotAPermutation(
                f"image of representative {format_rat_vector(rep)} is not a coset class"
            )
        perm.append(target)
    if len(set(perm)) != len(reps):
        raise NotAPermutation("induced map on coset labels is not a bijection")
    return perm


def sigma(m: IntMatrix, theta: list[RatVec]) -> list[int]:
    """Permutation induced by the dilation on the coset labels."""
    return induced_permutation(m, theta)


def sigma_star(m_prime: IntMatrix, theta_star: list[RatVec]) -> list[int]:
    """Permutation induced by the transposed conjugated dilation on dual labels."""
    return induced_permutation(m_prime.transpose(), theta_star)


def duality_matrix(
    p_matrix: IntMatrix, theta: list[RatVec], theta_star: list[RatVec]
) -> list[list[complex]]:
    """Fourier matrix of the quotient group: H[r][q] = e^{2 pi i (P theta_r).theta*_q} / sqrt(p).

    The rational phase is reduced mod 1 exactly before exponentiation.
    """
    p = len(theta)
    scale = 1.0 / math.sqrt(p)
    rows = []
    for rep in theta:
        shifted = p_matrix.apply(rep)  # integer vector, exact
        rows.append([scale * unit_phase(dot(shifted, dual)) for dual in theta_star])
    return rows


def residue_index(cs: "CosetSystem", k) -> tuple[int, IntVec]:
    """The unique (l, m) with k = P theta_l + P m, m integral."""
    return cs.residue_index(k)


def perm_power(perm: list[int], n: int) -> list[int]:
    """n-th power of a permutation given as an image list; n may be negative."""
    size = len(perm)
    if n < 0:
        inverse = [0] * size
        for i, j in enumerate(perm):
            inverse[j] = i
        perm, n = inverse, -n
    result = list(range(size))
    for _ in range(n):
        result = [perm[i] for i in result]
    return result


class CosetSystem:
    """Representatives, dual representatives, induced permutations and the
    Fourier matrix for an admissible oversampling pair.

    Immutable after construction.  The canonical ordering of both
    representative lists is the Smith-digit order produced by
    `coset_representatives`; only index 0 (the zero class) is meaningfully
    paired across the two lists.
    """

    def __init__(self, pair: OversamplingPair):
        if not pair.admissible:
            raise NotAdmissible(
                "coset system requires an admissible pair "
                f"(M={pair.m.text()}, P={pair.p_matrix.text()})"
            )
        self.pair = pair
        self.theta = coset_representatives(pair.p_matrix)
        self.theta_star = dual_representatives(pair.p_matrix)
        self.sigma = sigma(pair.m, self.theta)
        self.sigma_star = sigma_star(pair.m_prime, self.theta_star)
        self.fourier = duality_matrix(pair.p_matrix, self.theta, self.theta_star)
        self._theta_index = {rep: i for i, rep in enumerate(self.theta)}

    @classmethod
    def build(cls, m: IntMatrix, p_matrix: IntMatrix) -> "CosetSystem":
        return cls(OversamplingPair.create(m, p_matrix))

    @property
    def p(self) -> int:
        return self.pair.p

    @property
    def dim(self) -> int:
        return self.pair.dim

    @property
    def m(self) -> IntMatrix:
        return self.pair.m

    @property
    def p_matrix(self) -> IntMatrix:
        return self.pair.p_matrix

    @property
    def m_prime(self) -> IntMatrix:
        return self.pair.m_prime

    def translation_rep(self, r: int) -> IntVec:
        """P theta_r as an exact integer vector."""
        return tuple(int(c) for c in self.p_matrix.apply(self.theta[r]))

    def residue_index(self, k) -> tuple[int, IntVec]:
        """The unique (l, m) with k = P theta_l + P m and m integral."""
        k = as_intvec(k, self.dim)
        x = self.p_matrix.inverse().apply(k)
        l = self._theta_index[reduce_mod1(x)]
        m = tuple(int(a - b) for a, b in zip(x, self.theta[l]))
        return l, m

    def unitarity_residual(self) -> float:
        """Max-norm of H H* - I."""
        h = np.array(self.fourier, dtype=complex)
        return float(np.max(np.abs(h @ h.conj().T - np.eye(self.p))))

    def compatibility_residual(self) -> float:
        """Max over r, q of |H[sigma(r)][q] - H[r][sigma*(q)]|."""
        worst = 0.0
        for r in range(self.p):
            for q in range(self.p):
                delta = abs(
                    self.fourier[self.sigma[r]][q] - self.fourier[r][self.sigma_star[q]]
                )
                worst = max(worst, delta)
        return worst

    def fingerprint(self) -> str:
        """Content hash of (M, P, representative list); guards serialized data."""
        payload = json.dumps(
            {
                "M": self.m.text(),
                "P": self.p_matrix.text(),
                "theta": [format_rat_vector(t) for t in self.theta],
            },
            sort_keys=True,
        )
        return hashlib.sha256(payload.encode()).hexdigest()[:16]

    def to_json_dict(self) -> dict:
        """Deterministic JSON form; the unitarity check is rerun at dump time."""
        return {
            "d": self.dim,
            "p": self.p,
            "M": self.m.text(),
            "P": self.p_matrix.text(),
            "M_prime": self.m_prime.text(),
            "theta": [format_rat_vector(t) for t in self.theta],
            "theta_star": [format_rat_vector(t) for t in self.theta_star],
            "sigma": list(self.sigma),
            "sigma_star": list(self.sigma_star),
            "H": [[[z.real, z.imag] for z in row] for row in self.fourier],
            "h_unitarity_residual": self.unitarity_residual(),
            "h_compatibility_residual": self.compatibility_residual(),
            "fingerprint": self.fingerprint(),
        }

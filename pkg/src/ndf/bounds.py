"""Closed-form point-count bounds and the replication construction.

Everything here is an executable calculator: the classical lower bound on
design sizes, the norm bounds that control how far a fixed point set can
push the design residual, the resulting sufficient point counts for
extending a set to a t-design, the order figure for nested designs, and
the rational-ratio replication plan that assembles a nested design from
smaller ones.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb, gcd, sqrt

import numpy as np

from .harmonics import (
    check_sphere_dim,
    dim_harmonic,
    dim_space,
    surface_area,
)
from .residual import Configuration, certify_design

__all__ = [
    "PaperConstants",
    "BoundsReport",
    "LemmaBounds",
    "dgs_lower_bound",
    "lemma_bounds",
    "theorem4_points",
    "corollary3_order",
    "ReplicationPlan",
    "proposition1_plan",
    "proposition1_build",
    "bounds_report",
]


@dataclass(frozen=True)
class PaperConstants:
    """Configurable constants of the existence bounds.

    The source results only prove these constants exist; b_d (partition
    norm coefficient), r_d (mesh-ratio threshold), and c_d are declared
    defaults, overridable via config keys b_d, r_d, c1_margin. c1 is
    derived as max(user override, (108 b_d / r_d)^d (1 + c1_margin)) and
    must stay strictly above (108 b_d / r_d)^d; c2 and c3 are computed,
    never user-set.
    """

    b_d: float = 7.0
    r_d: float = 1.0
    c_d: float = 1.0
    c1_margin: float = 0.01
    c1_override: float | None = None

    def __post_init__(self):
        for name in ("b_d", "r_d", "c_d", "c1_margin"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")

    def c1(self, d: int) -> float:
        floor = (108.0 * self.b_d / self.r_d) ** d
        value = floor * (1.0 + self.c1_margin)
        if self.c1_override is not None:
            value = max(self.c1_override, value)
        if not value > floor:
            raise ValueError("c1 must exceed (108 b_d / r_d)^d strictly")
        return value

    def c2(self, d: int) -> float:
        return self.r_d / (36.0 * sqrt(d))

    @staticmethod
    def c3(d: int) -> float:
        return sqrt((d + 1) / d)

    def to_dict(self) -> dict:
        return {
            "b_d": self.b_d,
            "r_d": self.r_d,
            "c_d": self.c_d,
            "c1_margin": self.c1_margin,
            "c1_override": self.c1_override,
        }


def dgs_lower_bound(t: int, d: int) -> int:
    """Classical lower bound on the size of any spherical t-design.

    C(d+k, d) + C(d+k-1, d) for t = 2k, and 2 C(d+k, d) for t = 2k+1,
    in exact integer arithmetic.
    """
    check_sphere_dim(d)
    if t < 1:
        raise ValueError(f"degree must be >= 1, got {t}")
    k = t // 2
    if t % 2 == 0:
        return comb(d + k, d) + comb(d + k - 1, d)
    return 2 * comb(d + k, d)


@dataclass(frozen=True)
class LemmaBounds:
    """The five closed-form norm bounds for a fixed set of M points.

    lemma1 bounds the L2 norm of unit-gradient-integral polynomials;
    lemma2_* bound the norm of the summed kernel sections, general and
    with the fixed set a t1-design; lemma3_* are the magnitudes of the
    corresponding (negative) lower bounds on the pairing against
    boundary polynomials.
    """

    lemma1: float
    lemma2_general: float
    lemma2_nested: float
    lemma3_general: float
    lemma3_nested: float


def lemma_bounds(t: int, t1: int, M: int, d: int) -> LemmaBounds:
    """Evaluate all five norm bounds for M fixed points on S^d."""
    check_sphere_dim(d)
    if not 1 <= t1 < t:
        raise ValueError(f"need 1 <= t1 < t, got t1={t1}, t={t}")
    if M < 1:
        raise ValueError(f"need M >= 1, got {M}")
    omega = surface_area(d)
    d_t = dim_space(t, d)
    d_t1 = dim_space(t1, d)
    d_next = dim_harmonic(t + 1, d + 1)  # = dim of full degree-(t+1) space
    ratio = (d + 1) / d
    return LemmaBounds(
        lemma1=sqrt(ratio * omega * d_next),
        lemma2_general=M * sqrt(omega * d_t),
        lemma2_nested=M * sqrt(omega * (d_t - d_t1)),
        lemma3_general=M * sqrt(ratio * d_next * d_t),
        lemma3_nested=M * sqrt(ratio * d_next * (d_t - d_t1)),
    )


def theorem4_points(t: int, t1: int | None, M: int, d: int,
                    consts: PaperConstants) -> tuple[float, float | None]:
    """Sufficient free-point counts for extending M fixed points.

    N_general = max(c1 t^d, c2^-1 c3 M t sqrt(D_next D_t)); the nested
    variant replaces D_t by D_t - D_t1 and requires t1. M = 0 reduces
    both to the c1 t^d branch.
    """
    check_sphere_dim(d)
    if t < 1:
        raise ValueError(f"degree must be >= 1, got {t}")
    if M < 0:
        raise ValueError(f"need M >= 0, got {M}")
    c1 = consts.c1(d)
    base = c1 * t**d
    d_t = dim_space(t, d)
    d_next = dim_harmonic(t + 1, d + 1)
    scale = consts.c3(d) / consts.c2(d) * M * t
    n_general = max(base, scale * sqrt(d_next * d_t))
    if t1 is None:
        return n_general, None
    if not 1 <= t1 < t:
        raise ValueError(f"need 1 <= t1 < t, got t1={t1}, t={t}")
    d_t1 = dim_space(t1, d)
    n_nested = max(base, scale * sqrt(d_next * (d_t - d_t1)))
    return n_general, n_nested


def corollary3_order(t: int, d: int, consts: PaperConstants) -> float:
    """The N+M order figure for nested designs built from a t1-design.

    With the fixed set of size M ~ t^d and the free count from the
    M-linear branch, N + M = c2^-1 c3 t^d t sqrt(D_next D_t) + t^d,
    which grows like t^(2d+1). The c1 t^d existence branch is not maxed
    in: its enormous default constant would mask the growth rate the
    figure exists to display.
    """
    check_sphere_dim(d)
    if t < 2:
        raise ValueError(f"degree must be >= 2, got {t}")
    d_t = dim_space(t, d)
    d_next = dim_harmonic(t + 1, d + 1)
    scale = consts.c3(d) / consts.c2(d)
    return scale * t**d * t * sqrt(d_next * d_t) + t**d


@dataclass(frozen=True)
class ReplicationPlan:
    """Arithmetic of the rational-ratio replication construction."""

    t1: int
    t: int
    d: int
    p: int
    q: int
    copies: int  # p^d - q^d further t-designs joined to the base
    unit_size_expr: str
    constant_expr: str


def proposition1_plan(t1: int, t: int, d: int) -> ReplicationPlan:
    """Plan the replication that extends a t1-design to a t-design.

    Writes t / t1 = p / q in lowest terms; the base t-design (which is
    also a t1-design) is joined by p^d - q^d further t-designs, each of
    the base's per-unit size, so both orders share one constant.
    """
    check_sphere_dim(d)
    if not 1 <= t1 < t:
        raise ValueError(f"need 1 <= t1 < t, got t1={t1}, t={t}")
    g = gcd(t, t1)
    p, q = t // g, t1 // g
    return ReplicationPlan(
        t1=t1,
        t=t,
        d=d,
        p=p,
        q=q,
        copies=p**d - q**d,
        unit_size_expr=f"N/{q}^{d}",
        constant_expr=f"(p/q)^{d} * q^{d} * C_d = {p**d} * C_d",
    )


def proposition1_build(t1: int, t: int, d: int, design_source,
                       tol: float = 1e-10):
    """Execute the replication plan with concrete designs.

    design_source(deg, n_or_None) must return a certified deg-design (as
    an (n, d+1) array); it is called once for the base set Y and once per
    copy. Returns (plan, Y, union, cert_t1, cert_t); Y is certified a
    t1-design, the union a t-design, and the union contains Y as an
    exact sub-multiset by construction. Source failures propagate.
    """
    plan = proposition1_plan(t1, t, d)
    base = np.asarray(design_source(t, None), dtype=float)
    parts = [base]
    for _ in range(plan.copies):
        parts.append(np.asarray(design_source(t, None), dtype=float))
    union = np.vstack(parts)
    cert_t1 = certify_design(t1, Configuration(d=d, fixed=base), tol)
    cert_t = certify_design(t, Configuration(d=d, fixed=union), tol)
    return plan, base, union, cert_t1, cert_t


@dataclass(frozen=True)
class BoundsReport:
    """All bound calculators evaluated at one (d, t, t1, M)."""

    d: int
    t: int
    t1: int | None
    M: int
    dgs_lower: int
    lemma1: float
    lemma2_general: float
    lemma2_nested: float | None
    lemma3_general: float
    lemma3_nested: float | None
    theorem4_N_general: float
    theorem4_N_nested: float | None
    corollary3_total_order: float | None
    constants: dict

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "t": self.t,
            "t1": self.t1,
            "M": self.M,
            "dgs_lower": self.dgs_lower,
            "lemma1": self.lemma1,
            "lemma2_general": self.lemma2_general,
            "lemma2_nested": self.lemma2_nested,
            "lemma3_general": self.lemma3_general,
            "lemma3_nested": self.lemma3_nested,
            "theorem4_N_general": self.theorem4_N_general,
            "theorem4_N_nested": self.theorem4_N_nested,
            "corollary3_total_order": self.corollary3_total_order,
            "constants": self.constants,
        }


def bounds_report(t: int, t1: int | None, M: int, d: int,
                  consts: PaperConstants) -> BoundsReport:
    """Evaluate every calculator into one deterministic report.

    The lemma bounds are M-linear, so M = 0 is reported as zero even
    though lemma_bounds itself requires M >= 1. Without t1 the nested
    fields are None.
    """
    scale = float(M)  # rescale the M=1 evaluation
    if t1 is not None:
        ref = lemma_bounds(t, t1, 1, d)
    else:
        omega = surface_area(d)
        d_t = dim_space(t, d)
        d_next = dim_harmonic(t + 1, d + 1)
        ratio = (d + 1) / d
        ref = LemmaBounds(
            lemma1=sqrt(ratio * omega * d_next),
            lemma2_general=sqrt(omega * d_t),
            lemma2_nested=float("nan"),
            lemma3_general=sqrt(ratio * d_next * d_t),
            lemma3_nested=float("nan"),
        )
    n_general, n_nested = theorem4_points(t, t1, M, d, consts)
    return BoundsReport(
        d=d,
        t=t,
        t1=t1,
        M=M,
        dgs_lower=dgs_lower_bound(t, d),
        lemma1=ref.lemma1,
        lemma2_general=ref.lemma2_general * scale,
        lemma2_nested=(ref.lemma2_nested * scale
                       if t1 is not None else None),
        lemma3_general=ref.lemma3_general * scale,
        lemma3_nested=(ref.lemma3_nested * scale
                       if t1 is not None else None),
        theorem4_N_general=n_general,
        theorem4_N_nested=n_nested,
        corollary3_total_order=(corollary3_order(t, d, consts)
                                if t >= 2 else None),
        constants=consts.to_dict(),
    )

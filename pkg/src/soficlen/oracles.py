"""Independent ground-truth routes for certifying the sofic estimators.

Three oracles, none of which touch the permutation-model code paths they
check: Følner box averages for Z^k (amenable mean length), the exact regular
representation for finite groups, and generic-point evaluation for Laurent
polynomial matrices.  The finite-group and Laurent routes run on the dense
exact-rational eliminator, not the sparse mod-p one.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction

from . import groups
from .exactla import SparseMatrix, dense_rank_rational, rank_mod_p, rank_over_Q
from .groupring import GroupRingMatrix
from .groups import GroupDescriptor, GroupElement
from .meanlength import FreeModuleVector, MeanLengthEstimate


class OracleError(ValueError):
    pass


@dataclass(frozen=True)
class FolnerBox:
    """Box [0, L₁) × … × [0, L_k) inside Z^k (plain interval for Z)."""

    sides: tuple[int, ...]

    def __post_init__(self):
        sides = tuple(int(x) for x in self.sides)
        if not sides or any(x < 1 for x in sides):
            raise OracleError("box sides must be positive")
        object.__setattr__(self, "sides", sides)

    @property
    def size(self) -> int:
        out = 1
        for x in self.sides:
            out *= x
        return out

    def elements(self, desc: GroupDescriptor) -> list[GroupElement]:
        if desc.family == groups.INTEGER_LINE:
            if len(self.sides) != 1:
                raise OracleError("integer-line box needs a single side")
            return [desc.element(v) for v in range(self.sides[0])]
        if desc.family != groups.LATTICE or desc.rank != len(self.sides):
            raise OracleError(f"box rank {len(self.sides)} does not match the group")
        return [desc.element(v) for v in
                itertools.product(*(range(x) for x in self.sides))]


def folner_mean_length(A, boxes) -> list[Fraction]:
    """rank(span{s⁻¹ a : s ∈ F, a ∈ A}) / |F| along the given boxes.

    The span is taken inside the coordinate window F⁻¹·supp(A) × [n]; the
    series is the Følner average whose limit is the amenable mean length,
    and the last entry is the oracle value.
    """
    A = tuple(A)
    if not A:
        raise OracleError("A must be nonempty")
    desc = A[0].desc
    ring = A[0].ring
    if desc.family not in (groups.INTEGER_LINE, groups.LATTICE):
        raise OracleError("Følner averaging supports Z and Z^k only")
    n = A[0].n
    values = []
    for box in boxes:
        F = box.elements(desc)
        window = set()
        for s in F:
            sinv = s.inverse()
            for a in A:
                window.update(sinv * g for g in a.support())
        widx = {g: i for i, g in
                enumerate(sorted(window, key=GroupElement.sort_key))}
        triplets = []
        r = 0
        for s in F:
            sinv = s.inverse()
            for a in A:
                for j, comp in enumerate(a.components):
                    for g, c in comp.coeffs.items():
                        triplets.append((r, widx[sinv * g] * n + j, c))
                r += 1
        if ring.kind == "Q":
            denom = 1
            for _, _, c in triplets:
                denom = denom * c.denominator // math.gcd(denom, c.denominator)
            triplets = [(i, j, int(c * denom)) for i, j, c in triplets]
        m = SparseMatrix.from_triplets(
            r, len(widx) * n, triplets,
            modulus=ring.p if ring.kind == "GF" else None)
        if ring.kind == "GF":
            rank = rank_mod_p(m).rank
        else:
            rank = rank_over_Q(m, seed=box.size).rank
        values.append(Fraction(rank, box.size))
    return values


def finite_group_vrk(f: GroupRingMatrix) -> Fraction:
    """Exact vrk of (QΓ)^{1×n}/(QΓ)^{1×m}f for a finite group Γ.

    Builds the |Γ|m × |Γ|n rational matrix of w ↦ f·w on column vectors
    over the regular representation and returns kernel dimension / |Γ|,
    computed by dense rational elimination (independent of the sparse
    permutation-model ranks it certifies).
    """
    desc = f.desc
    if desc.family != groups.FINITE:
        raise OracleError("finite-group oracle needs a finite group")
    if f.ring.kind == "GF":
        raise OracleError("finite-group vrk is a rational quantity; use ring Z or Q")
    o = desc.order
    dense = [[Fraction(0)] * (f.n * o) for _ in range(f.m * o)]
    for k in range(f.m):
        for j in range(f.n):
            entry = f.entries[k][j]
            for s, c in entry.coeffs.items():
                # block (k, j): column basis vector g contributes c at row s·g
                for g in range(o):
                    h = desc.table[s.value][g]
                    dense[k * o + h][j * o + g] += Fraction(c)
    rank = dense_rank_rational(dense)
    return Fraction(f.n * o - rank, o)


@dataclass(frozen=True)
class LaurentRank:
    rank: int
    vrk: Fraction
    evaluations: tuple[int, ...]  # ranks seen at the sample points


def laurent_rank(f: GroupRingMatrix, *, seed: int = 0, trials: int = 3) -> LaurentRank:
    """Generic rank of a Laurent polynomial matrix over Z or Z^k, and the
    vrk = n − rank of the presented quotient.

    Each variable is evaluated at a random rational with numerator strictly
    greater than denominator (both below 2³¹), keeping the point off the
    unit circle; the generic rank is attained off a proper subvariety, so
    the max over a few points is correct except on a measure-zero miss.
    """
    desc = f.desc
    if desc.family not in (groups.INTEGER_LINE, groups.LATTICE):
        raise OracleError("Laurent oracle needs group Z or Z^k")
    if f.ring.kind == "GF":
        raise OracleError("Laurent oracle works over Z or Q coefficients")
    k = 1 if desc.family == groups.INTEGER_LINE else desc.rank
    rng = random.Random(seed)
    seen = []
    for _ in range(trials):
        point = []
        for _ in range(k):
            den = rng.randrange(1, 2**31)
            num = rng.randrange(den + 1, 2**31 + 1)
            point.append(Fraction(num, den))
        dense = []
        for i in range(f.m):
            row = []
            for j in range(f.n):
                val = Fraction(0)
                for g, c in f.entries[i][j].coeffs.items():
                    exps = (g.value,) if desc.family == groups.INTEGER_LINE else g.value
                    term = Fraction(c)
                    for q, a in zip(point, exps):
                        term *= q ** a
                    val += term
                row.append(val)
            dense.append(row)
        seen.append(dense_rank_rational(dense))
    rank = max(seen)
    return LaurentRank(rank, Fraction(f.n - rank), tuple(seen))


@dataclass(frozen=True)
class CompareReport:
    """Estimator-vs-oracle verdict: residual |headline − oracle|, with the
    spread>tol case failed and flagged unstable regardless of residual."""

    passed: bool
    residual: Fraction
    headline: Fraction
    oracle: Fraction
    spread: Fraction
    tol: float
    unstable: bool

    def to_json_dict(self) -> dict:
        return {
            "passed": self.passed,
            "residual": float(self.residual),
            "residual_num": self.residual.numerator,
            "residual_den": self.residual.denominator,
            "headline": float(self.headline),
            "oracle": float(self.oracle),
            "oracle_num": self.oracle.numerator,
            "oracle_den": self.oracle.denominator,
            "spread": float(self.spread),
            "tol": self.tol,
            "unstable": self.unstable,
        }


def compare(estimate: MeanLengthEstimate, oracle_value, tol: float) -> CompareReport:
    if tol < 0:
        raise OracleError("tolerance must be nonnegative")
    oracle_value = Fraction(oracle_value)
    residual = abs(estimate.headline - oracle_value)
    unstable = estimate.spread > Fraction(tol)
    passed = residual <= Fraction(tol) and not unstable
    return CompareReport(passed, residual, estimate.headline, oracle_value,
                         estimate.spread, tol, unstable)

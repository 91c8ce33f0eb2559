"""Finite-scale mean-length and rank estimation for modules over group rings.

Given a matrix f over R[Γ] and a sofic approximation σ at size d, the free
module (R[Γ])^{1×n} transports to (R^d)^{1×n} by scattering each group
element s along the permutation σ_s.  Two finite models are built here:

* ``build_sigma_bar``: the dm × dn matrix whose rank/d estimates the mean
  rank of the submodule generated by the rows of f;
* ``relators`` + ``relative_mean_length_at``: the relator-quotient model,
  whose normalized rank difference estimates the mean length of a finite
  piece A relative to the relators of (B, F).

``estimate_vrk_fp`` turns 1 - rank/d (per ambient column) into the von
Neumann rank of the presented quotient module, checking the rank/kernel
duality rank(σ̄_f) + ker(σ_f) = d·n on every evaluation.  All reported
values are exact rationals at each finite size; limits are replaced by a
schedule of sizes with spread/stabilization reporting.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import groups
from .exactla import SparseMatrix, rank_mod_p, rank_over_Q
from .groupring import CoefficientRing, GroupRingElement, GroupRingError, GroupRingMatrix
from .groups import GroupDescriptor, GroupElement
from .sofic import SoficMap, SoficSchedule, defect, make_sigma


class MeanLengthError(ValueError):
    pass


class MeanRankOnlyError(MeanLengthError):
    """Raised when a vrk quantity is requested over GF(p)."""


@dataclass(frozen=True)
class FreeModuleVector:
    """An element of (R[Γ])^{1×n}: n group-ring components sharing one
    group and one coefficient ring."""

    components: tuple[GroupRingElement, ...]

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise MeanLengthError("free module vector needs at least one component")
        desc, ring = comps[0].desc, comps[0].ring
        for c in comps:
            if c.desc != desc or c.ring != ring:
                raise MeanLengthError("components from different group rings")
        object.__setattr__(self, "components", comps)

    @property
    def n(self) -> int:
        return len(self.components)

    @property
    def desc(self) -> GroupDescriptor:
        return self.components[0].desc

    @property
    def ring(self) -> CoefficientRing:
        return self.components[0].ring

    def support(self) -> set[GroupElement]:
        out = set()
        for c in self.components:
            out.update(c.coeffs)
        return out

    def translate(self, s: GroupElement) -> "FreeModuleVector":
        return FreeModuleVector(tuple(c.translate(s) for c in self.components))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    @classmethod
    def basis(cls, desc, ring, n: int) -> list["FreeModuleVector"]:
        one = GroupRingElement.one(desc, ring)
        zero = GroupRingElement.zero(desc, ring)
        return [cls(tuple(one if j == i else zero for j in range(n)))
                for i in range(n)]

    @classmethod
    def single(cls, x: GroupRingElement) -> "FreeModuleVector":
        return cls((x,))


def rows_of(f: GroupRingMatrix) -> list[FreeModuleVector]:
    return [FreeModuleVector(f.row(k)) for k in range(f.m)]


@dataclass(frozen=True)
class RelativePair:
    """A finite instance of the relative mean-length data: ambient rank n,
    generators A of the measured piece, generators B of the relator side,
    and the group window F."""

    n: int
    A: tuple[FreeModuleVector, ...]
    B: tuple[FreeModuleVector, ...]
    F: tuple[GroupElement, ...]

    def __post_init__(self):
        A = tuple(self.A)
        B = tuple(self.B)
        F = tuple(self.F)
        if not A or not B:
            raise MeanLengthError("A and B must be nonempty")
        desc, ring = A[0].desc, A[0].ring
        for v in A + B:
            if v.n != self.n:
                raise MeanLengthError(f"vector has {v.n} components, ambient n = {self.n}")
            if v.desc != desc or v.ring != ring:
                raise MeanLengthError("A and B must share one group ring")
        if not F:
            raise MeanLengthError("F must be nonempty")
        for s in F:
            if s.desc != desc:
                raise MeanLengthError("F element from a different group")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "F", F)

    @property
    def desc(self) -> GroupDescriptor:
        return self.A[0].desc

    @property
    def ring(self) -> CoefficientRing:
        return self.A[0].ring


# ---------------------------------------------------------------------------
# coefficient mapping into the elimination field

def _field_modulus(ring: CoefficientRing):
    return ring.p if ring.kind == "GF" else None


def _rank(m: SparseMatrix, ring: CoefficientRing, seed: int):
    if ring.kind == "GF":
        return rank_mod_p(m)
    return rank_over_Q(m, seed=seed)


def derive_rank_seed(tag: str, d: int, seed: int) -> int:
    return zlib.crc32(f"{tag}|{d}|{seed}".encode())


# ---------------------------------------------------------------------------
# matrix models

def _sigma_blocks(f: GroupRingMatrix, sigma: SoficMap):
    """Triplets of the permutation model, one block of d entries per
    (row, col, group element) of f; coefficients still in the ring."""
    if f.desc != sigma.desc:
        raise GroupRingError("matrix and sofic map live over different groups")
    d = sigma.d
    base = np.arange(d, dtype=np.int64)
    blocks = []
    for k in range(f.m):
        for j in range(f.n):
            for g, c in sorted(f.entries[k][j].coeffs.items(),
                               key=lambda kv: kv[0].sort_key()):
                rows = k * d + sigma.perm(g)
                cols = j * d + base
                blocks.append((rows, cols, c))
    return blocks


def _blocks_to_sparse(blocks, nrows, ncols, ring: CoefficientRing) -> SparseMatrix:
    """Flatten (row-array, col-array, ring-coefficient) blocks into a
    SparseMatrix, clearing rational denominators by one global lcm (global
    scaling leaves rank invariant)."""
    if ring.kind == "Q":
        denom = 1
        for _, _, c in blocks:
            denom = denom * c.denominator // math.gcd(denom, c.denominator)
        scalars = [int(c * denom) for _, _, c in blocks]
    else:
        scalars = [int(c) for _, _, c in blocks]
    if not blocks:
        return SparseMatrix(nrows, ncols, modulus=_field_modulus(ring))
    row_idx = np.concatenate([rows for rows, _, _ in blocks])
    col_idx = np.concatenate([cols for _, cols, _ in blocks])
    vals = []
    for (rows, _, _), v in zip(blocks, scalars):
        vals.extend([v] * len(rows))
    return SparseMatrix(nrows, ncols, row_idx, col_idx, vals,
                        modulus=_field_modulus(ring))


def build_sigma_bar(f: GroupRingMatrix, sigma: SoficMap) -> SparseMatrix:
    """The dm × dn matrix model of right multiplication by f.

    Entry ((k, v'), (j, v)) accumulates the coefficient of f_{k,j} at every
    s with σ_s(v) = v'.  Over GF(p) entries are residues; over Z/Q they are
    integers (rational coefficients cleared by a global lcm).
    """
    return _blocks_to_sparse(_sigma_blocks(f, sigma),
                             sigma.d * f.m, sigma.d * f.n, f.ring)


def build_sigma_action(f: GroupRingMatrix, sigma: SoficMap) -> SparseMatrix:
    """The matrix of the transported action on column vectors: block (k, j)
    sends w to the vector with v-entry Σ_{s, v': σ_s(v') = v} f_{k,j,s} w_{v'}.

    Under the coordinate conventions used here this produces the same sparse
    matrix as ``build_sigma_bar``; it is assembled from its own defining
    formula and kept as a separate entry point so kernel computations name
    the object they mean.
    """
    if f.desc != sigma.desc:
        raise GroupRingError("matrix and sofic map live over different groups")
    d = sigma.d
    vprime = np.arange(d, dtype=np.int64)
    blocks = []
    for k in range(f.m):
        for j in range(f.n):
            for s, c in sorted(f.entries[k][j].coeffs.items(),
                               key=lambda kv: kv[0].sort_key()):
                rows = k * d + sigma.perm(s)[vprime]
                cols = j * d + vprime
                blocks.append((rows, cols, c))
    return _blocks_to_sparse(blocks, d * f.m, d * f.n, f.ring)


def coordinate_window(pair: RelativePair) -> tuple[GroupElement, ...]:
    """W = supp(A) ∪ supp(B) ∪ F·supp(B), sorted deterministically."""
    w = set()
    for a in pair.A:
        w.update(a.support())
    for b in pair.B:
        sup = b.support()
        w.update(sup)
        for s in pair.F:
            w.update(s * g for g in sup)
    return tuple(sorted(w, key=GroupElement.sort_key))


def _relator_triplets(B, F, sigma: SoficMap, window, n: int):
    """Triplet blocks of the relator matrix: rows ordered v, then B index,
    then F index; columns indexed (v, w, j) ↦ (v·|W| + w)·n + j."""
    d = sigma.d
    widx = {g: i for i, g in enumerate(window)}
    nw = len(widx)
    base = np.arange(d, dtype=np.int64)
    nb, nf = len(B), len(F)
    blocks = []
    for bi, b in enumerate(B):
        for si, s in enumerate(F):
            rows = (base * nb + bi) * nf + si
            perm = sigma.perm(s)
            for j, comp in enumerate(b.components):
                for g, c in comp.coeffs.items():
                    cols = (base * nw + widx[g]) * n + j
                    blocks.append((rows, cols, c))
                for g, c in comp.translate(s).coeffs.items():
                    if g not in widx:
                        raise AssertionError(f"relator support {g!r} escapes the window")
                    cols = (perm * nw + widx[g]) * n + j
                    blocks.append((rows, cols, -c))
    return blocks, d * nb * nf, d * nw * n


def relators(B, F, sigma: SoficMap, window=None) -> SparseMatrix:
    """Sparse matrix whose rows are the relators δ_v b − δ_{σ_s(v)} s·b for
    v ∈ [d], b ∈ B, s ∈ F, in coordinates [d] × W × [n]."""
    B = tuple(B)
    if not B:
        raise MeanLengthError("B must be nonempty")
    n = B[0].n
    ring = B[0].ring
    if window is None:
        w = set()
        for b in B:
            sup = b.support()
            w.update(sup)
            for s in F:
                w.update(s * g for g in sup)
        window = tuple(sorted(w, key=GroupElement.sort_key))
    blocks, nrows, ncols = _relator_triplets(B, tuple(F), sigma, tuple(window), n)
    return _blocks_to_sparse(blocks, nrows, ncols, ring)


def relative_mean_length_at(pair: RelativePair, sigma: SoficMap, *,
                            rank_seed: int = 0) -> Fraction:
    """(rank(relators stacked with all δ_v a) − rank(relators)) / d.

    Both ranks are taken over the pair's field (GF(p) exactly, Q via the
    certified multi-prime route with a shared prime seed).
    """
    if pair.desc != sigma.desc:
        raise MeanLengthError("pair and sofic map live over different groups")
    d = sigma.d
    n = pair.n
    window = coordinate_window(pair)
    widx = {g: i for i, g in enumerate(window)}
    nw = len(window)
    rel_blocks, rel_rows, ncols = _relator_triplets(pair.B, pair.F, sigma, window, n)
    base = np.arange(d, dtype=np.int64)
    na = len(pair.A)
    a_blocks = []
    for ai, a in enumerate(pair.A):
        rows = rel_rows + base * na + ai
        for j, comp in enumerate(a.components):
            for g, c in comp.coeffs.items():
                cols = (base * nw + widx[g]) * n + j
                a_blocks.append((rows, cols, c))
    ring = pair.ring
    rel = _blocks_to_sparse(rel_blocks, rel_rows, ncols, ring)
    stacked = _blocks_to_sparse(rel_blocks + a_blocks, rel_rows + d * na, ncols, ring)
    rank_rel = _rank(rel, ring, rank_seed).rank
    rank_stacked = _rank(stacked, ring, rank_seed).rank
    return Fraction(rank_stacked - rank_rel, d)


# ---------------------------------------------------------------------------
# value snapping

def snap_to_H(value, desc: GroupDescriptor, tol: float) -> Fraction | None:
    """Nearest candidate invariant value within tol, else None.

    The candidate set is the additive subgroup of Q generated by reciprocals
    of finite-subgroup orders: Z for the torsion-free families here; for a
    finite group, fractions with denominators from the subgroup-order list
    (exhaustive search up to order 24, divisors of |Γ| beyond — a superset).
    """
    if tol <= 0:
        raise MeanLengthError("snap tolerance must be positive")
    v = Fraction(value)
    if desc.family == groups.FINITE:
        if desc.order <= 24:
            denominators = groups.subgroup_orders(desc)
        else:
            o = desc.order
            denominators = [q for q in range(1, o + 1) if o % q == 0]
    else:
        denominators = [1]
    best = None
    for q in denominators:
        cand = Fraction(round(v * q), q)
        dist = abs(v - cand)
        key = (dist, q, cand)
        if best is None or key < best:
            best = key
    dist, _, cand = best
    return cand if dist <= Fraction(tol) else None


# ---------------------------------------------------------------------------
# estimates over schedules

@dataclass(frozen=True)
class SeriesPoint:
    d: int
    seed: int
    value: Fraction


@dataclass(frozen=True, eq=False)
class MeanLengthEstimate:
    """Schedule series plus the derived summary values.

    headline = mean over seeds at the largest size; spread = max − min over
    those seeds; snapped = nearest candidate invariant value (or None);
    stabilized = whether the last two per-size means agree within the
    stabilization tolerance (single-size schedules count as stabilized).
    """

    quantity: str
    series: tuple[SeriesPoint, ...]
    headline: Fraction
    spread: Fraction
    snapped: Fraction | None
    defect_summary: dict | None
    stabilized: bool

    def to_json_dict(self) -> dict:
        return {
            "quantity": self.quantity,
            "series": [{"d": p.d, "seed": p.seed,
                        "value_num": p.value.numerator,
                        "value_den": p.value.denominator} for p in self.series],
            "headline": float(self.headline),
            "headline_num": self.headline.numerator,
            "headline_den": self.headline.denominator,
            "spread": float(self.spread),
            "spread_num": self.spread.numerator,
            "spread_den": self.spread.denominator,
            "snapped": None if self.snapped is None else
                       {"num": self.snapped.numerator, "den": self.snapped.denominator},
            "defect_summary": self.defect_summary,
            "stabilized": self.stabilized,
        }

    def csv_rows(self) -> list[list]:
        return [[p.d, p.seed, p.value.numerator, p.value.denominator,
                 float(p.value)] for p in self.series]


def assemble_estimate(quantity: str, series, desc: GroupDescriptor, *,
                      snap_tol: float = 0.05,
                      stabilize_tol: Fraction = Fraction(1, 100),
                      defect_summary=None) -> MeanLengthEstimate:
    pts = tuple(series)
    if not pts:
        raise MeanLengthError("empty series")
    dmax = max(p.d for p in pts)
    per_d: dict[int, list[Fraction]] = {}
    for p in pts:
        per_d.setdefault(p.d, []).append(p.value)
    last = per_d[dmax]
    headline = sum(last, Fraction(0)) / len(last)
    spread = max(last) - min(last)
    ds = sorted(per_d)
    stabilized = True
    if len(ds) >= 2:
        prev = per_d[ds[-2]]
        prev_mean = sum(prev, Fraction(0)) / len(prev)
        stabilized = abs(headline - prev_mean) <= stabilize_tol
    snapped = snap_to_H(headline, desc, snap_tol) if snap_tol is not None else None
    return MeanLengthEstimate(quantity, pts, headline, spread, snapped,
                              defect_summary, stabilized)


def _default_factory(desc):
    def factory(point):
        return make_sigma(desc, point.d, point.seed, point.dims)
    return factory


def estimate_mean_length(n: int, A, B_schedule, F_schedule,
                         schedule: SoficSchedule, *, sigma_factory=None,
                         snap_tol: float = 0.05,
                         stabilize_tol: Fraction = Fraction(1, 100),
                         with_defect: bool = True) -> MeanLengthEstimate:
    """Relative mean length of the span of A against the largest supplied
    (B, F) pair, evaluated across the schedule.

    ``B_schedule`` and ``F_schedule`` are increasing lists; monotonicity in
    B and F means the largest entries give the best finite surrogate for
    the infimum, so they are the ones evaluated.
    """
    A = tuple(A)
    if not A:
        raise MeanLengthError("A must be nonempty")
    B = tuple(tuple(bs) for bs in B_schedule)[-1]
    F = tuple(tuple(fs) for fs in F_schedule)[-1]
    pair = RelativePair(n, A, B, F)
    desc = pair.desc
    factory = sigma_factory or _default_factory(desc)
    series = []
    last_sigma = None
    for point in schedule.points():
        sigma = factory(point)
        value = relative_mean_length_at(
            pair, sigma, rank_seed=derive_rank_seed("mrk", point.d, point.seed))
        series.append(SeriesPoint(sigma.d, point.seed, value))
        last_sigma = sigma
    summary = defect(last_sigma, F).summary() if with_defect else None
    return assemble_estimate("mrk", series, desc, snap_tol=snap_tol,
                             stabilize_tol=stabilize_tol, defect_summary=summary)


@dataclass(frozen=True)
class PrincipalPoint:
    """One schedule evaluation of the presented module (R[Γ]^{1×n}) / rows(f):
    the rank of σ̄_f, the kernel dimension of the action matrix, and the
    derived mean-rank/vrk values.  duality = (kernel + rank == d·n)."""

    d: int
    seed: int
    rank: int
    kernel: int
    mrk: Fraction
    vrk: Fraction
    duality: bool


def principal_rank_point(f: GroupRingMatrix, sigma: SoficMap, *, seed: int = 0,
                         rank_seed: int = 0) -> PrincipalPoint:
    """Rank σ̄_f and kernel σ_f at one σ, with the duality identity checked
    from two independently assembled and eliminated matrices."""
    if f.ring.kind == "GF":
        raise MeanRankOnlyError(
            "vrk needs coefficients embeddable in the algebraic numbers "
            "(use ring Z or Q); over GF(p) this tool offers mean-rank only")
    d = sigma.d
    n = f.n
    bar = build_sigma_bar(f, sigma)
    rank = rank_over_Q(bar, seed=rank_seed).rank
    action = build_sigma_action(f, sigma)
    kernel = d * n - rank_over_Q(action, seed=rank_seed + 1).rank
    mrk = Fraction(rank, d)
    vrk = n - mrk
    return PrincipalPoint(d, seed, rank, kernel, mrk, vrk,
                          duality=(kernel + rank == d * n))


def estimate_vrk_fp(f: GroupRingMatrix, schedule: SoficSchedule, *,
                    sigma_factory=None, snap_tol: float = 0.05,
                    stabilize_tol: Fraction = Fraction(1, 100),
                    with_defect: bool = True) -> MeanLengthEstimate:
    """vrk of (R[Γ])^{1×n} / (R[Γ])^{1×m} f across the schedule: series of
    n − rank(σ̄_f)/d, the kernel route asserted equal at every point."""
    if f.ring.kind == "GF":
        raise MeanRankOnlyError(
            "vrk needs coefficients embeddable in the algebraic numbers "
            "(use ring Z or Q); over GF(p) this tool offers mean-rank only")
    desc = f.desc
    factory = sigma_factory or _default_factory(desc)
    series = []
    last_sigma = None
    for point in schedule.points():
        sigma = factory(point)
        pp = principal_rank_point(
            f, sigma, seed=point.seed,
            rank_seed=derive_rank_seed("vrk", point.d, point.seed))
        if not pp.duality:
            raise MeanLengthError(
                f"duality violation at d={pp.d}, seed={pp.seed}: "
                f"kernel {pp.kernel} + rank {pp.rank} != {pp.d * f.n}")
        series.append(SeriesPoint(pp.d, point.seed, pp.vrk))
        last_sigma = sigma
    summary = None
    if with_defect:
        window = set()
        for k in range(f.m):
            for j in range(f.n):
                window.update(f.entries[k][j].coeffs)
        window.add(desc.identity())
        summary = defect(last_sigma,
                         sorted(window, key=GroupElement.sort_key)).summary()
    return assemble_estimate("vrk", series, desc, snap_tol=snap_tol,
                             stabilize_tol=stabilize_tol, defect_summary=summary)


# ---------------------------------------------------------------------------
# addition formula report

@dataclass(frozen=True)
class AdditionPoint:
    d: int
    seed: int
    submodule: Fraction      # relative route: mean length of rows(f) in the ambient
    submodule_rank: Fraction  # direct route: rank(σ̄_f)/d
    quotient: Fraction       # n − submodule_rank
    residual_routes: Fraction
    residual_addition: Fraction


@dataclass(frozen=True, eq=False)
class AdditionReport:
    n: int
    points: tuple[AdditionPoint, ...]
    max_residual_routes: Fraction
    max_residual_addition: Fraction

    def to_json_dict(self) -> dict:
        return {
            "quantity": "addition-check",
            "n": self.n,
            "series": [{
                "d": p.d, "seed": p.seed,
                "submodule_num": p.submodule.numerator,
                "submodule_den": p.submodule.denominator,
                "submodule_rank_num": p.submodule_rank.numerator,
                "submodule_rank_den": p.submodule_rank.denominator,
                "quotient_num": p.quotient.numerator,
                "quotient_den": p.quotient.denominator,
                "residual_routes": float(p.residual_routes),
                "residual_addition": float(p.residual_addition),
            } for p in self.points],
            "max_residual_routes": float(self.max_residual_routes),
            "max_residual_addition": float(self.max_residual_addition),
        }

    def csv_rows(self) -> list[list]:
        return [[p.d, p.seed, p.submodule.numerator, p.submodule.denominator,
                 float(p.residual_routes)] for p in self.points]


def check_addition(f: GroupRingMatrix, schedule: SoficSchedule, *,
                   sigma_factory=None, F=None) -> AdditionReport:
    """Check that submodule and quotient values add up to the ambient rank.

    Route (i): mean length of A = rows(f) relative to (B = basis, F) by the
    relator construction.  Route (ii): rank(σ̄_f)/d.  Route (iii): quotient
    value n − (ii).  Reports |(i) − (ii)| and |(i) + (iii) − n| per point.
    """
    if f.ring.kind == "GF":
        raise MeanRankOnlyError(
            "the addition check compares against vrk and needs ring Z or Q")
    n = f.n
    desc = f.desc
    A = rows_of(f)
    B = FreeModuleVector.basis(desc, f.ring, n)
    if F is None:
        w = set()
        for a in A:
            w.update(a.support())
        w.add(desc.identity())
        F = sorted(w, key=GroupElement.sort_key)
    pair = RelativePair(n, tuple(A), tuple(B), tuple(F))
    factory = sigma_factory or _default_factory(desc)
    points = []
    for point in schedule.points():
        sigma = factory(point)
        sub = relative_mean_length_at(
            pair, sigma, rank_seed=derive_rank_seed("add-i", point.d, point.seed))
        pp = principal_rank_point(
            f, sigma, seed=point.seed,
            rank_seed=derive_rank_seed("add-ii", point.d, point.seed))
        if not pp.duality:
            raise MeanLengthError(
                f"duality violation at d={pp.d}, seed={pp.seed}")
        quot = n - pp.mrk
        points.append(AdditionPoint(
            sigma.d, point.seed, sub, pp.mrk, quot,
            abs(sub - pp.mrk), abs(sub + quot - n)))
    return AdditionReport(
        n, tuple(points),
        max(p.residual_routes for p in points),
        max(p.residual_addition for p in points))

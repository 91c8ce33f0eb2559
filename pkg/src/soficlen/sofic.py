"""Sofic approximations σ: Γ → Sym(d) and their quality reports.

Permutations are numpy int64 arrays of length d (σ_s as the map v ↦ arr[v]),
computed lazily per group element and cached.  Every builder is deterministic
given (source, d, seed); the cyclic, torus, translation, and quotient maps
are genuine homomorphisms, and the random free-group map is a homomorphism
on F_k by construction (generators get independent seeded permutations,
words compose them after free reduction), so its approximation error shows
up in separation, not multiplicativity.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import groups
from .groups import GroupDescriptor, GroupElement, GroupError


class SoficError(ValueError):
    """Bad construction parameters or group/descriptor mismatches."""


def perm_compose(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Array of v ↦ p[q[v]] (apply q, then p)."""
    return p[q]


def perm_inverse(p: np.ndarray) -> np.ndarray:
    out = np.empty_like(p)
    out[p] = np.arange(len(p), dtype=p.dtype)
    return out


def perm_power(p: np.ndarray, n: int) -> np.ndarray:
    """n-fold composition of p (binary exponentiation; n may be negative)."""
    if n < 0:
        return perm_power(perm_inverse(p), -n)
    acc = np.arange(len(p), dtype=p.dtype)
    base = p
    while n:
        if n & 1:
            acc = base[acc]
        base = base[base]
        n >>= 1
    return acc


class SoficMap:
    """Base class: caches permutations keyed by normal-form element."""

    def __init__(self, desc: GroupDescriptor, d: int, source: str, seed=None):
        if d < 1:
            raise SoficError("d must be >= 1")
        self.desc = desc
        self.d = d
        self.source = source
        self.seed = seed
        self._cache: dict = {}

    def perm(self, g: GroupElement) -> np.ndarray:
        """The permutation array of σ_g.  Treat as read-only."""
        if g.desc != self.desc:
            raise SoficError("element from a different group")
        arr = self._cache.get(g.value)
        if arr is None:
            arr = self._perm(g)
            arr.setflags(write=False)
            self._cache[g.value] = arr
        return arr

    def _perm(self, g: GroupElement) -> np.ndarray:
        raise NotImplementedError

    def __repr__(self):
        extra = "" if self.seed is None else f", seed={self.seed}"
        return f"SoficMap({self.source}, d={self.d}{extra})"


class CyclicSoficMap(SoficMap):
    def __init__(self, d: int):
        super().__init__(groups.integer_line(), d, "Cyclic")

    def _perm(self, g):
        return (np.arange(self.d, dtype=np.int64) + g.value) % self.d


class TorusSoficMap(SoficMap):
    def __init__(self, dims):
        dims = tuple(int(x) for x in dims)
        if not dims or any(x < 1 for x in dims):
            raise SoficError("torus dims must be positive")
        d = 1
        for x in dims:
            d *= x
        super().__init__(groups.lattice(len(dims)), d, "Torus")
        self.dims = dims
        self._coords = np.unravel_index(np.arange(d), dims)

    def _perm(self, g):
        shifted = tuple((c + a) % m for c, a, m in
                        zip(self._coords, g.value, self.dims))
        return np.ravel_multi_index(shifted, self.dims).astype(np.int64)


class TranslationSoficMap(SoficMap):
    """Left regular action of a finite group on itself: σ_s(v) = s·v."""

    def __init__(self, desc: GroupDescriptor):
        if desc.family != groups.FINITE:
            raise SoficError("translation map needs a finite group")
        super().__init__(desc, desc.order, "Translation")

    def _perm(self, g):
        return np.array([self.desc.table[g.value][v] for v in range(self.d)],
                        dtype=np.int64)


class RandomFreeSoficMap(SoficMap):
    """Independent uniform permutations per generator, composed along reduced
    words.  Each generator draws from a counter-based PRNG keyed by
    (seed, generator index), so permutations do not depend on query order."""

    def __init__(self, rank: int, d: int, seed: int):
        if d < 2:
            raise SoficError("random free map needs d >= 2")
        super().__init__(groups.free_group(rank), d, "RandomFree", seed=seed)
        self._letters: dict[int, np.ndarray] = {}

    def _letter(self, letter: int) -> np.ndarray:
        arr = self._letters.get(letter)
        if arr is None:
            if letter > 0:
                rng = np.random.Generator(
                    np.random.Philox(key=np.array([self.seed, letter], dtype=np.uint64)))
                arr = rng.permutation(self.d).astype(np.int64)
            else:
                arr = perm_inverse(self._letter(-letter))
            self._letters[letter] = arr
        return arr

    def _perm(self, g):
        # left-to-right fold: σ_{x1 x2 …} = σ_{x1} ∘ σ_{x2} ∘ …
        acc = np.arange(self.d, dtype=np.int64)
        for letter in g.value:
            acc = acc[self._letter(letter)]
        return acc


class QuotientSoficMap(SoficMap):
    """σ through a homomorphism onto a finite group: φ: Γ → Q given by
    generator images, then the left regular action of Q."""

    def __init__(self, desc: GroupDescriptor, target: GroupDescriptor,
                 images: list[GroupElement]):
        if target.family != groups.FINITE:
            raise SoficError("quotient target must be a finite group")
        if desc.family not in (groups.INTEGER_LINE, groups.LATTICE, groups.FREE):
            raise SoficError("quotient source must be Z, Z^k, or free")
        gens = desc.generators()
        if len(images) != len(gens):
            raise SoficError(f"need {len(gens)} generator images, got {len(images)}")
        for q in images:
            if q.desc != target:
                raise SoficError("generator image outside the target group")
        if desc.family == groups.LATTICE:
            for a in images:
                for b in images:
                    if a * b != b * a:
                        raise SoficError("lattice quotient needs commuting images")
        super().__init__(desc, target.order, "QuotientHom")
        self.target = target
        self.images = tuple(images)

    def _apply(self, g: GroupElement) -> GroupElement:
        if self.desc.family == groups.INTEGER_LINE:
            return _element_power(self.images[0], g.value)
        if self.desc.family == groups.LATTICE:
            acc = self.target.identity()
            for q, a in zip(self.images, g.value):
                acc = acc * _element_power(q, a)
            return acc
        acc = self.target.identity()
        for letter in g.value:
            q = self.images[abs(letter) - 1]
            acc = acc * (q if letter > 0 else q.inverse())
        return acc

    def _perm(self, g):
        q = self._apply(g)
        return np.array([self.target.table[q.value][v] for v in range(self.d)],
                        dtype=np.int64)


def _element_power(g: GroupElement, n: int) -> GroupElement:
    if n < 0:
        return _element_power(g.inverse(), -n)
    acc = g.desc.identity()
    base = g
    while n:
        if n & 1:
            acc = acc * base
        base = base * base
        n >>= 1
    return acc


class RestrictedSoficMap(SoficMap):
    """Pull a map on Γ back along an embedding Z → Γ, 1 ↦ image."""

    def __init__(self, base: SoficMap, image: GroupElement):
        if image.desc != base.desc:
            raise SoficError("embedding image outside the base group")
        if image.is_identity():
            raise SoficError("embedding not injective on ball(1): image is the identity")
        super().__init__(groups.integer_line(), base.d, "Restricted", seed=base.seed)
        self.base = base
        self.image = image

    def _perm(self, g):
        return np.asarray(self.base.perm(_element_power(self.image, g.value)))


# ---------------------------------------------------------------------------
# builders

def build_cyclic(d: int) -> SoficMap:
    return CyclicSoficMap(d)


def build_torus(dims) -> SoficMap:
    return TorusSoficMap(dims)


def build_translation(desc: GroupDescriptor) -> SoficMap:
    return TranslationSoficMap(desc)


def build_random_free(rank: int, d: int, seed: int) -> SoficMap:
    return RandomFreeSoficMap(rank, d, seed)


def build_quotient(desc, target, images) -> SoficMap:
    return QuotientSoficMap(desc, target, images)


def restrict(sigma: SoficMap, image: GroupElement) -> SoficMap:
    """Sofic map on Z with σ'_n = σ_{image^n}.

    The ball(1) injectivity check (image ≠ identity) is a heuristic only;
    genuine injectivity of n ↦ image^n is the caller's responsibility.
    """
    return RestrictedSoficMap(sigma, image)


def make_sigma(desc: GroupDescriptor, d: int, seed: int = 0, dims=None) -> SoficMap:
    """Default approximation for a group family at size d."""
    if desc.family == groups.INTEGER_LINE:
        return build_cyclic(d)
    if desc.family == groups.LATTICE:
        if dims is None:
            raise SoficError("lattice approximations need torus dims")
        if len(dims) != desc.rank:
            raise SoficError(f"dims rank {len(dims)} != lattice rank {desc.rank}")
        t = build_torus(dims)
        if t.d != d:
            raise SoficError(f"dims {dims} give d={t.d}, schedule says {d}")
        return t
    if desc.family == groups.FREE:
        return build_random_free(desc.rank, d, seed)
    if desc.order != d:
        raise SoficError(f"finite group has order {desc.order}, schedule says {d}")
    return build_translation(desc)


# ---------------------------------------------------------------------------
# quality reports

@dataclass(frozen=True, eq=False)
class DefectReport:
    """Exact per-pair quality fractions of a sofic map on a window F.

    multiplicativity[(s, t)] = |{v : σ_s(σ_t(v)) = σ_{st}(v)}| / d over all
    ordered pairs; separation[(s, t)] = |{v : σ_s(v) ≠ σ_t(v)}| / d over
    distinct pairs.
    """

    d: int
    multiplicativity: dict
    separation: dict

    def min_multiplicativity(self) -> Fraction:
        return min(self.multiplicativity.values(), default=Fraction(1))

    def mean_multiplicativity(self) -> Fraction:
        vals = list(self.multiplicativity.values())
        return sum(vals, Fraction(0)) / len(vals) if vals else Fraction(1)

    def min_separation(self) -> Fraction:
        return min(self.separation.values(), default=Fraction(1))

    def mean_separation(self) -> Fraction:
        vals = list(self.separation.values())
        return sum(vals, Fraction(0)) / len(vals) if vals else Fraction(1)

    def summary(self) -> dict:
        return {
            "d": self.d,
            "pairs": len(self.multiplicativity),
            "min_multiplicativity": float(self.min_multiplicativity()),
            "mean_multiplicativity": float(self.mean_multiplicativity()),
            "min_separation": float(self.min_separation()),
            "mean_separation": float(self.mean_separation()),
        }


def defect(sigma: SoficMap, F) -> DefectReport:
    """Exact multiplicativity/separation fractions for all pairs from F."""
    elems = list(F)
    for s in elems:
        if s.desc != sigma.desc:
            raise SoficError("window element from a different group")
    d = sigma.d
    mult = {}
    sep = {}
    for s in elems:
        ps = sigma.perm(s)
        for t in elems:
            pt = sigma.perm(t)
            pst = sigma.perm(s * t)
            agree = int(np.count_nonzero(ps[pt] == pst))
            mult[(s, t)] = Fraction(agree, d)
            if s != t:
                differ = int(np.count_nonzero(ps != pt))
                sep[(s, t)] = Fraction(differ, d)
    return DefectReport(d, mult, sep)


# ---------------------------------------------------------------------------
# schedules

@dataclass(frozen=True)
class SchedulePoint:
    d: int
    seed: int
    dims: tuple[int, ...] | None = None


@dataclass(frozen=True)
class SoficSchedule:
    """Evaluation grid: strictly increasing sizes × seed list.

    ``dims`` (optional) gives torus dimensions per size, with prod(dims_i)
    = ds[i].  Deterministic sources ignore the seed component.
    """

    ds: tuple[int, ...]
    seeds: tuple[int, ...] = (0,)
    dims: tuple[tuple[int, ...], ...] | None = None

    def __post_init__(self):
        ds = tuple(int(x) for x in self.ds)
        seeds = tuple(int(x) for x in self.seeds)
        object.__setattr__(self, "ds", ds)
        object.__setattr__(self, "seeds", seeds)
        if not ds:
            raise SoficError("schedule needs at least one size")
        if any(b <= a for a, b in zip(ds, ds[1:])):
            raise SoficError(f"sizes must be strictly increasing, got {ds}")
        if not seeds:
            raise SoficError("schedule needs at least one seed")
        if len(set(seeds)) != len(seeds):
            raise SoficError("seeds must be distinct")
        if self.dims is not None:
            dims = tuple(tuple(int(x) for x in block) for block in self.dims)
            object.__setattr__(self, "dims", dims)
            if len(dims) != len(ds):
                raise SoficError("need one dims tuple per schedule size")
            for block, d in zip(dims, ds):
                prod = 1
                for x in block:
                    prod *= x
                if prod != d:
                    raise SoficError(f"dims {block} give d={prod}, schedule says {d}")

    @classmethod
    def from_dims(cls, dims_list, seeds=(0,)) -> "SoficSchedule":
        dims = tuple(tuple(int(x) for x in block) for block in dims_list)
        ds = []
        for block in dims:
            prod = 1
            for x in block:
                prod *= x
            ds.append(prod)
        return cls(tuple(ds), tuple(seeds), dims)

    def points(self) -> list[SchedulePoint]:
        out = []
        for idx, d in enumerate(self.ds):
            block = self.dims[idx] if self.dims is not None else None
            for seed in self.seeds:
                out.append(SchedulePoint(d, seed, block))
        return out

    @property
    def largest(self) -> int:
        return self.ds[-1]

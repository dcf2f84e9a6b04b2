"""Permutations of F_q^n and permutation-group order via Schreier-Sims.

Points of F_q^n are numbered little-endian in base q: the point
``(x_1, ..., x_n)`` has index ``sum(x_i * q**(i-1))``.

A :class:`Perm` is stored as its image tuple, ``p[i]`` being the image of
point i.  ``p * r`` means "apply p, then r"; :func:`perm_compose` follows
function notation, ``perm_compose(p, r)[i] == p[r[i]]``.
"""

from __future__ import annotations

import math
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .autmap import PolyMap
from .gf import FieldSpec
from .mpoly import _BITS, _MASK

__all__ = [
    "NotBijectiveError",
    "PointIndexer",
    "Perm",
    "BSGS",
    "induced_images",
    "permutation_from_map",
    "cycle_decomposition",
    "format_cycles",
    "sign",
    "parity",
    "inversion_parity",
    "perm_compose",
    "perm_inverse",
    "schreier_sims",
    "contains",
    "enumerate_group",
]


class NotBijectiveError(ValueError):
    """The evaluated map is not a bijection of F_q^n."""


class PointIndexer:
    """Bijection between F_q^n and ``range(q**n)``; X_1 is least significant."""

    def __init__(self, field: FieldSpec, n: int):
        if n < 1:
            raise ValueError("dimension must be >= 1")
        self.field = field
        self.n = n
        self.N = field.q ** n
        self._coords = None

    def index(self, point: Sequence[int]) -> int:
        if len(point) != self.n:
            raise ValueError(f"point has {len(point)} coordinates, expected {self.n}")
        q = self.field.q
        idx = 0
        for x in reversed(point):
            idx = idx * q + self.field.check(x)
        return idx

    def point(self, idx: int) -> tuple[int, ...]:
        if not 0 <= idx < self.N:
            raise ValueError(f"point index {idx} out of range")
        out = []
        for _ in range(self.n):
            idx, r = divmod(idx, self.field.q)
            out.append(r)
        return tuple(out)

    def points(self):
        for i in range(self.N):
            yield self.point(i)

    def coordinate_arrays(self) -> np.ndarray:
        """Array of shape (n, N); column k holds the coordinates of point k."""
        if self._coords is None:
            idx = np.arange(self.N, dtype=np.int64)
            q = self.field.q
            self._coords = np.stack([(idx // q**i) % q for i in range(self.n)])
        return self._coords


class Perm:
    """A permutation of ``range(N)`` given by its images."""

    __slots__ = ("images",)

    def __init__(self, images: Iterable[int], check: bool = True):
        self.images = tuple(int(x) for x in images)
        if check and sorted(self.images) != list(range(len(self.images))):
            raise ValueError("images do not form a permutation")

    @classmethod
    def identity(cls, N: int) -> "Perm":
        return cls(range(N), check=False)

    @classmethod
    def from_cycles(cls, N: int, cycles: Iterable[Sequence[int]]) -> "Perm":
        img = list(range(N))
        for cyc in cycles:
            for a, b in zip(cyc, list(cyc[1:]) + [cyc[0]]):
                img[a] = b
        return cls(img)

    @property
    def N(self) -> int:
        return len(self.images)

    def __len__(self):
        return len(self.images)

    def __getitem__(self, i: int) -> int:
        return self.images[i]

    def __eq__(self, other):
        if not isinstance(other, Perm):
            return NotImplemented
        return self.images == other.images

    def __hash__(self):
        return hash(self.images)

    def __repr__(self):
        return f"Perm({format_cycles(self)}, N={self.N})"

    def __mul__(self, other: "Perm") -> "Perm":
        # apply self first, then other
        _check_size(self, other)
        o = other.images
        return Perm(tuple(o[x] for x in self.images), check=False)

    def inverse(self) -> "Perm":
        inv = [0] * self.N
        for i, x in enumerate(self.images):
            inv[x] = i
        return Perm(inv, check=False)

    def is_identity(self) -> bool:
        return all(i == x for i, x in enumerate(self.images))

    @property
    def sign(self) -> int:
        return sign(self)


def _check_size(p: Perm, r: Perm) -> None:
    if p.N != r.N:
        raise ValueError(f"permutation size mismatch: {p.N} vs {r.N}")


def perm_compose(p: Perm, r: Perm) -> Perm:
    """Function composition: ``(p o r)[i] = p[r[i]]``."""
    return r * p


def perm_inverse(p: Perm) -> Perm:
    return p.inverse()


# -- extraction from polynomial maps ---------------------------------------

def _power_table(field: FieldSpec, e: int) -> np.ndarray:
    return np.array([field.pow(x, e) for x in range(field.q)], dtype=np.int64)


def induced_images(F: PolyMap, indexer: PointIndexer) -> np.ndarray:
    """Image index of every point under F (not checked for bijectivity)."""
    if F.n != indexer.n or F.field != indexer.field:
        raise ValueError("map and point indexer disagree on dimension or field")
    field = F.field
    add = np.asarray(field.add_table, dtype=np.int64)
    mul = np.asarray(field.mul_table, dtype=np.int64)
    xs = indexer.coordinate_arrays()
    powers: dict[tuple[int, int], np.ndarray] = {}

    def var_power(i: int, e: int) -> np.ndarray:
        key = (i, e)
        if key not in powers:
            powers[key] = _power_table(field, e)[xs[i]]
        return powers[key]

    N, n, q = indexer.N, F.n, field.q
    out = np.zeros(N, dtype=np.int64)
    for j, coord in enumerate(F.coords):
        val = np.zeros(N, dtype=np.int64)
        for k, c in coord._terms.items():
            t = np.full(N, c, dtype=np.int64)
            for i in range(n):
                e = (k >> (_BITS * i)) & _MASK
                if e:
                    t = mul[t, var_power(i, e)]
            val = add[val, t]
        out += val * q**j
    return out


def permutation_from_map(F: PolyMap, indexer: PointIndexer | None = None) -> Perm:
    """The permutation E(F) of F_q^n; raises NotBijectiveError otherwise."""
    if indexer is None:
        indexer = PointIndexer(F.field, F.n)
    images = induced_images(F, indexer)
    counts = np.bincount(images, minlength=indexer.N)
    if not np.all(counts == 1):
        target = int(np.argmax(counts > 1))
        sources = [indexer.point(int(s)) for s in np.flatnonzero(images == target)[:2]]
        raise NotBijectiveError(
            f"map is not bijective on {field_points(indexer)}: {sources[0]} and "
            f"{sources[1]} both map to {indexer.point(target)}")
    return Perm(images.tolist(), check=False)


def field_points(indexer: PointIndexer) -> str:
    return f"{indexer.field.designation()}^{indexer.n}"


# -- cycle structure and parity ---------------------------------------------

def cycle_decomposition(p: Perm) -> tuple[list[tuple[int, ...]], int]:
    """Nontrivial cycles (each starting at its minimum, sorted) and the fixed-point count."""
    img = p.images
    seen = bytearray(len(img))
    cycles = []
    fixed = 0
    for start in range(len(img)):
        if seen[start]:
            continue
        seen[start] = 1
        if img[start] == start:
            fixed += 1
            continue
        cyc = [start]
        x = img[start]
        while x != start:
            seen[x] = 1
            cyc.append(x)
            x = img[x]
        cycles.append(tuple(cyc))
    return cycles, fixed


def cycle_histogram(p: Perm) -> dict[int, int]:
    """Cycle length -> number of cycles, fixed points counted as length 1."""
    cycles, fixed = cycle_decomposition(p)
    hist = Counter(len(c) for c in cycles)
    if fixed:
        hist[1] = fixed
    return dict(sorted(hist.items()))


def format_cycles(p: Perm) -> str:
    cycles, _ = cycle_decomposition(p)
    if not cycles:
        return "()"
    return "".join("(" + " ".join(map(str, c)) + ")" for c in cycles)


def _cycle_parity(p: Perm) -> int:
    cycles, fixed = cycle_decomposition(p)
    return (p.N - len(cycles) - fixed) % 2


def sign(p: Perm) -> int:
    """+1 for even permutations, -1 for odd ones."""
    return -1 if _cycle_parity(p) else 1


def parity(p: Perm) -> str:
    return "odd" if _cycle_parity(p) else "even"


def inversion_parity(p: Perm) -> str:
    """Parity from the number of inversions (Fenwick tree count).

    Independent of the cycle-based :func:`parity`; used as a cross-check.
    """
    N = p.N
    tree = [0] * (N + 1)
    inversions = 0
    for seen, x in enumerate(p.images):
        # count earlier entries greater than x
        i, smaller = x + 1, 0
        while i > 0:
            smaller += tree[i]
            i -= i & -i
        inversions += seen - smaller
        i = x + 1
        while i <= N:
            tree[i] += 1
            i += i & -i
    return "odd" if inversions % 2 else "even"


# -- Schreier-Sims -----------------------------------------------------------

@dataclass
class BSGS:
    """Base and strong generating set with explicit transversals.

    ``transversals[i][x]`` maps ``base[i]`` to x; ``inverse_transversals``
    holds the inverses.  ``order`` is the product of the basic orbit lengths.
    """

    degree: int
    base: list[int] = field(default_factory=list)
    strong_gens: list[Perm] = field(default_factory=list)
    level_gens: list[list[Perm]] = field(default_factory=list)
    transversals: list[dict[int, Perm]] = field(default_factory=list)
    inverse_transversals: list[dict[int, Perm]] = field(default_factory=list)
    stopped_at_bound: bool = False

    @property
    def order(self) -> int:
        return math.prod(len(t) for t in self.transversals)

    def orbit_sizes(self) -> list[int]:
        return [len(t) for t in self.transversals]

    def sift(self, p: Perm, start: int = 0) -> tuple[Perm, int]:
        """Strip p through the chain from level ``start``; return residue and drop-out level."""
        h = p
        for lvl in range(start, len(self.base)):
            x = h.images[self.base[lvl]]
            uinv = self.inverse_transversals[lvl].get(x)
            if uinv is None:
                return h, lvl
            h = h * uinv
        return h, len(self.base)

    def contains(self, p: Perm) -> bool:
        if p.N != self.degree:
            raise ValueError(f"permutation size {p.N} does not match degree {self.degree}")
        h, lvl = self.sift(p)
        return lvl == len(self.base) and h.is_identity()


def _first_moved(p: Perm) -> int:
    for i, x in enumerate(p.images):
        if i != x:
            return i
    raise ValueError("identity moves no point")


def _extend_orbit(bsgs: BSGS, lvl: int, new_gens: Sequence[Perm]) -> None:
    """Grow the transversal at ``lvl`` after generators were added; old entries are kept."""
    trans, itrans = bsgs.transversals[lvl], bsgs.inverse_transversals[lvl]
    gens = bsgs.level_gens[lvl]
    queue = deque()
    for x in list(trans):
        for s in new_gens:
            queue.append((x, s))
    while queue:
        x, s = queue.popleft()
        y = s.images[x]
        if y in trans:
            continue
        u = trans[x] * s
        trans[y] = u
        itrans[y] = u.inverse()
        for t in gens:
            queue.append((y, t))


def schreier_sims(generators: Sequence[Perm], use_order_bound: bool = True) -> BSGS:
    """Deterministic Schreier-Sims.

    Base points are chosen as the first point moved by the generator being
    added.  Every Schreier generator is sifted; pairs already checked are
    remembered, which stays valid because transversal entries never change.

    With ``use_order_bound`` the loop stops as soon as the orbit product
    reaches N! (or N!/2 when every generator is even).  That product is a
    lower bound on the group order at every stage and the bound is an upper
    bound, so equality certifies the order and a complete chain.
    """
    gens = list(generators)
    if not gens:
        raise ValueError("need at least one generator")
    N = gens[0].N
    for g in gens:
        if g.N != N:
            raise ValueError("generators act on different point sets")
    bsgs = BSGS(degree=N)
    gens = [g for g in gens if not g.is_identity()]
    if not gens:
        return bsgs
    bound = math.factorial(N)
    if all(parity(g) == "even" for g in gens):
        bound //= 2

    def add_level(point: int) -> None:
        bsgs.base.append(point)
        ident = Perm.identity(N)
        bsgs.transversals.append({point: ident})
        bsgs.inverse_transversals.append({point: ident})
        bsgs.level_gens.append([])

    for g in gens:
        h, lvl = bsgs.sift(g)
        if lvl == len(bsgs.base) and h.is_identity():
            continue
        _add_residue(bsgs, h, lvl, add_level)
        if use_order_bound and bsgs.order == bound:
            bsgs.stopped_at_bound = True
            return bsgs

    done: list[set] = []
    i = len(bsgs.base) - 1
    while i >= 0:
        while len(done) < len(bsgs.base):
            done.append(set())
        restarted = False
        trans, itrans = bsgs.transversals[i], bsgs.inverse_transversals[i]
        for x in list(trans):
            for gi, s in enumerate(bsgs.level_gens[i]):
                if (x, gi) in done[i]:
                    continue
                done[i].add((x, gi))
                y = s.images[x]
                h = trans[x] * s * itrans[y]
                res, lvl = bsgs.sift(h, i + 1)
                if lvl == len(bsgs.base) and res.is_identity():
                    continue
                _add_residue(bsgs, res, lvl, add_level, lowest=i + 1)
                if use_order_bound and bsgs.order == bound:
                    bsgs.stopped_at_bound = True
                    return bsgs
                i = lvl if lvl < len(bsgs.base) else len(bsgs.base) - 1
                restarted = True
                break
            if restarted:
                break
        if not restarted:
            i -= 1
    return bsgs


def _add_residue(bsgs: BSGS, h: Perm, lvl: int, add_level, lowest: int = 0) -> None:
    """Insert the nontrivial sift residue h (fixing base[:lvl]) as a strong generator."""
    if lvl == len(bsgs.base):
        add_level(_first_moved(h))
    bsgs.strong_gens.append(h)
    for j in range(lowest, lvl + 1):
        bsgs.level_gens[j].append(h)
        _extend_orbit(bsgs, j, [h])


def contains(bsgs: BSGS, p: Perm) -> bool:
    return bsgs.contains(p)


def enumerate_group(generators: Sequence[Perm], limit: int = 10**6) -> set[Perm]:
    """All elements of the generated group by breadth-first closure (oracle)."""
    gens = list(generators)
    ident = Perm.identity(gens[0].N)
    seen = {ident}
    queue = deque([ident])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = x * g
            if y not in seen:
                seen.add(y)
                if len(seen) > limit:
                    raise ValueError(f"group has more than {limit} elements")
                queue.append(y)
    return seen

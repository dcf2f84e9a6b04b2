"""Polynomial endomorphisms of affine n-space and the tame constructions.

A :class:`PolyMap` is an n-tuple of polynomials in n variables.  Composition
follows the usual convention ``(F o G)_i = F_i(G_1, ..., G_n)``, so ``G`` is
applied to a point first.

Constructors that know a formal inverse (elementary, linear, triangular,
Nagata, tame words) attach it as ``PolyMap.inverse``.  An attached inverse is
a claim, not a proof; :func:`verify_inverse_pair` checks it formally.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field as dc_field
from typing import Sequence, Union

from .gf import FieldSpec
from .mpoly import (Poly, format_poly, functional_reduce, parse_map_text,
                    parse_poly, poly_eval, poly_substitute, variables_poly)

__all__ = [
    "PolyMap",
    "LinearLetter",
    "ElementaryLetter",
    "TameWord",
    "identity_map",
    "compose_maps",
    "eval_map",
    "verify_inverse_pair",
    "functional_equal",
    "elementary_map",
    "linear_map",
    "triangular_map",
    "nagata_map",
    "permute_vars_map",
    "random_tame_word",
    "slice_map",
    "conjugate",
    "parse_map",
    "parse_word",
    "mat_det",
    "mat_inverse",
]


class PolyMap:
    """An endomorphism ``(F_1, ..., F_n)`` of F_q^n given by polynomials."""

    __slots__ = ("field", "n", "coords", "inverse")

    def __init__(self, coords: Sequence[Poly], inverse: "PolyMap | None" = None):
        coords = tuple(coords)
        if not coords:
            raise ValueError("a map needs at least one coordinate")
        n = len(coords)
        F = coords[0].field
        for c in coords:
            if not isinstance(c, Poly):
                raise TypeError("coordinates must be Poly")
            if c.n_vars != n:
                raise ValueError(f"coordinate has {c.n_vars} variables, map dimension is {n}")
            if c.field != F:
                raise ValueError("coordinates live over different fields")
        self.field = F
        self.n = n
        self.coords = coords
        self.inverse = inverse

    def __eq__(self, other):
        if not isinstance(other, PolyMap):
            return NotImplemented
        return self.coords == other.coords

    def __hash__(self):
        return hash(self.coords)

    def __str__(self):
        return "; ".join(format_poly(c) for c in self.coords)

    def __repr__(self):
        return f"PolyMap({str(self)!r}, {self.field.designation()})"

    def __call__(self, point: Sequence[int]) -> tuple[int, ...]:
        return eval_map(self, point)

    def __matmul__(self, other: "PolyMap") -> "PolyMap":
        return compose_maps(self, other)

    def degree(self) -> int:
        return max(c.degree() for c in self.coords)

    def is_identity(self) -> bool:
        return all(c.is_variable(i) for i, c in enumerate(self.coords, start=1))

    def without_inverse(self) -> "PolyMap":
        return PolyMap(self.coords)


def parse_map(text: str, field: FieldSpec, n: int | None = None) -> PolyMap:
    """Parse ``"p1; p2; ..."`` into a map (n defaults to the coordinate count)."""
    return PolyMap(parse_map_text(text, field, n))


def identity_map(field: FieldSpec, n: int) -> PolyMap:
    if n < 1:
        raise ValueError("dimension must be >= 1")
    ident = PolyMap(variables_poly(field, n))
    ident.inverse = PolyMap(ident.coords)
    return ident


def _check_same_space(F: PolyMap, G: PolyMap) -> None:
    if F.n != G.n:
        raise ValueError(f"dimension mismatch: {F.n} vs {G.n}")
    if F.field != G.field:
        raise ValueError("maps live over different fields")


def compose_maps(F: PolyMap, G: PolyMap) -> PolyMap:
    """Formal composition ``F o G``; attaches ``G^-1 o F^-1`` when both inverses are known."""
    _check_same_space(F, G)
    out = PolyMap([poly_substitute(f, G.coords) for f in F.coords])
    if F.inverse is not None and G.inverse is not None:
        out.inverse = PolyMap([poly_substitute(g, F.inverse.coords)
                               for g in G.inverse.coords])
    return out


def eval_map(F: PolyMap, point: Sequence[int]) -> tuple[int, ...]:
    if len(point) != F.n:
        raise ValueError(f"point has {len(point)} coordinates, map dimension is {F.n}")
    return tuple(poly_eval(c, point) for c in F.coords)


def verify_inverse_pair(F: PolyMap, G: PolyMap) -> bool:
    """True iff F o G and G o F are both formally the identity."""
    _check_same_space(F, G)
    return (compose_maps(F.without_inverse(), G.without_inverse()).is_identity()
            and compose_maps(G.without_inverse(), F.without_inverse()).is_identity())


def _all_points(field: FieldSpec, n: int):
    # X1 varies fastest, matching the point indexing in permgrp
    for rev in itertools.product(range(field.q), repeat=n):
        yield rev[::-1]


def functional_equal(F: PolyMap, G: PolyMap, method: str = "both") -> bool:
    """Do F and G induce the same self-map of F_q^n?

    ``method`` is ``"reduce"`` (compare functionally reduced coordinates),
    ``"eval"`` (compare values on every point) or ``"both"``, which runs the
    two routes and raises ``RuntimeError`` if they disagree.
    """
    _check_same_space(F, G)
    if method not in ("reduce", "eval", "both"):
        raise ValueError(f"unknown method {method!r}")
    by_reduce = by_eval = None
    if method in ("reduce", "both"):
        by_reduce = all(functional_reduce(f) == functional_reduce(g)
                        for f, g in zip(F.coords, G.coords))
    if method in ("eval", "both"):
        by_eval = all(eval_map(F, pt) == eval_map(G, pt)
                      for pt in _all_points(F.field, F.n))
    if method == "both" and by_reduce != by_eval:
        raise RuntimeError("functional reduction and pointwise evaluation disagree")
    return by_reduce if by_reduce is not None else by_eval


# -- linear algebra over F_q -------------------------------------------------

def _gauss(field: FieldSpec, matrix: Sequence[Sequence[int]], want_inverse: bool):
    n = len(matrix)
    if any(len(row) != n for row in matrix):
        raise ValueError("matrix must be square")
    a = [[field.check(x) for x in row] + ([1 if i == j else 0 for j in range(n)]
                                         if want_inverse else [])
         for i, row in enumerate(matrix)]
    det = 1
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col]), None)
        if pivot is None:
            return 0, None
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            det = field.neg(det)
        pv = a[col][col]
        det = field.mul(det, pv)
        inv = field.inv(pv)
        a[col] = [field.mul(inv, x) for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                c = a[r][col]
                a[r] = [field.sub(x, field.mul(c, y)) for x, y in zip(a[r], a[col])]
    if not want_inverse:
        return det, None
    return det, [row[n:] for row in a]


def mat_det(field: FieldSpec, matrix: Sequence[Sequence[int]]) -> int:
    return _gauss(field, matrix, False)[0]


def mat_inverse(field: FieldSpec, matrix: Sequence[Sequence[int]]) -> list[list[int]]:
    det, inv = _gauss(field, matrix, True)
    if not det:
        raise ValueError("matrix is singular")
    return inv


# -- named constructions -----------------------------------------------------

def _linear_coords(field: FieldSpec, matrix: Sequence[Sequence[int]]) -> list[Poly]:
    n = len(matrix)
    xs = variables_poly(field, n)
    coords = []
    for row in matrix:
        acc = Poly.zero(field, n)
        for c, x in zip(row, xs):
            if c:
                acc = acc + x.scale(c)
        coords.append(acc)
    return coords


def linear_map(field: FieldSpec, matrix: Sequence[Sequence[int]]) -> PolyMap:
    """The map X -> M X (coordinate i is sum_j M[i][j] X_j)."""
    inv = mat_inverse(field, matrix)
    out = PolyMap(_linear_coords(field, matrix))
    out.inverse = PolyMap(_linear_coords(field, inv))
    return out


def _elementary_coords(field: FieldSpec, n: int, i: int, f: Poly) -> list[Poly]:
    xs = variables_poly(field, n)
    xs[i - 1] = xs[i - 1] + f
    return xs


def elementary_map(field: FieldSpec, n: int, i: int, f: Poly) -> PolyMap:
    """``X_i -> X_i + f`` with f free of X_i; the inverse uses ``-f``."""
    if not 1 <= i <= n:
        raise ValueError(f"target index {i} out of range 1..{n}")
    if f.n_vars != n or f.field != field:
        raise ValueError("f must be a polynomial in the map's n variables over its field")
    if i in f.variables():
        raise ValueError(f"elementary shift involves its own variable X{i}")
    out = PolyMap(_elementary_coords(field, n, i, f))
    out.inverse = PolyMap(_elementary_coords(field, n, i, -f))
    return out


def permute_vars_map(field: FieldSpec, n: int, sigma: Sequence[int]) -> PolyMap:
    """Coordinate i is ``X_{sigma[i]}`` (sigma lists 1-based images)."""
    sigma = list(sigma)
    if len(sigma) != n or sorted(sigma) != list(range(1, n + 1)):
        raise ValueError(f"{sigma} is not a permutation of 1..{n}")
    matrix = [[1 if j + 1 == sigma[i] else 0 for j in range(n)] for i in range(n)]
    return linear_map(field, matrix)


def triangular_map(field: FieldSpec, n: int, diag: Sequence[int],
                   shifts: Sequence[Poly]) -> PolyMap:
    """``(a_1 X_1 + f_1, ..., a_n X_n + f_n)`` with f_i in X_{i+1}..X_n.

    Built as ``D o E_n o ... o E_1``: E_i adds a_i^-1 f_i to X_i and D is the
    diagonal scaling.  The inverse comes from back-substitution.
    """
    if len(diag) != n or len(shifts) != n:
        raise ValueError("need n diagonal coefficients and n shift polynomials")
    for i, (a, f) in enumerate(zip(diag, shifts), start=1):
        field.check(a)
        if a == 0:
            raise ValueError(f"diagonal coefficient {i} is zero")
        if f.n_vars != n or f.field != field:
            raise ValueError("shift polynomials must share the map's ring")
        bad = [v for v in f.variables() if v <= i]
        if bad:
            raise ValueError(f"f_{i} uses forbidden variable X{bad[0]}")
    ident = identity_map(field, n)
    acc = ident
    for i in range(1, n + 1):
        e = elementary_map(field, n, i, shifts[i - 1].scale(field.inv(diag[i - 1])))
        acc = compose_maps(e, acc)
    D = linear_map(field, [[diag[i] if i == j else 0 for j in range(n)] for i in range(n)])
    out = compose_maps(D, acc)

    xs = variables_poly(field, n)
    inv: list[Poly | None] = [None] * n
    for i in range(n, 0, -1):
        args = [xs[j] if inv[j] is None else inv[j] for j in range(n)]
        rhs = xs[i - 1] - poly_substitute(shifts[i - 1], args)
        inv[i - 1] = rhs.scale(field.inv(diag[i - 1]))
    out.inverse = PolyMap(inv)
    return out


def nagata_map(field: FieldSpec) -> PolyMap:
    """``(X - 2Y*D - Z*D^2, Y + Z*D, Z)`` with ``D = XZ + Y^2``, inverse attached."""
    X, Y, Z = variables_poly(field, 3)
    delta = X * Z + Y * Y
    two = Poly.constant(field, 3, field.from_int(2))
    ydelta = two * Y * delta
    zdelta2 = Z * delta * delta
    fwd = PolyMap([X - ydelta - zdelta2, Y + Z * delta, Z])
    fwd.inverse = PolyMap([X + ydelta - zdelta2, Y - Z * delta, Z])
    return fwd


# -- tame words --------------------------------------------------------------

@dataclass(frozen=True)
class LinearLetter:
    matrix: tuple[tuple[int, ...], ...]

    def apply_left(self, field: FieldSpec, acc: PolyMap) -> PolyMap:
        n = acc.n
        coords = []
        for row in self.matrix:
            c = Poly.zero(field, n)
            for a, p in zip(row, acc.coords):
                if a:
                    c = c + p.scale(a)
            coords.append(c)
        return PolyMap(coords)

    def inverse(self, field: FieldSpec) -> "LinearLetter":
        return LinearLetter(tuple(tuple(r) for r in mat_inverse(field, self.matrix)))

    def to_map(self, field: FieldSpec) -> PolyMap:
        return linear_map(field, self.matrix)

    def serialize(self, field: FieldSpec) -> str:
        lits = [field.format_element(x).replace(" ", "") for row in self.matrix for x in row]
        return "lin " + " ".join(lits)


@dataclass(frozen=True)
class ElementaryLetter:
    target: int
    shift: Poly

    def apply_left(self, field: FieldSpec, acc: PolyMap) -> PolyMap:
        coords = list(acc.coords)
        coords[self.target - 1] = coords[self.target - 1] + poly_substitute(self.shift, acc.coords)
        return PolyMap(coords)

    def inverse(self, field: FieldSpec) -> "ElementaryLetter":
        return ElementaryLetter(self.target, -self.shift)

    def to_map(self, field: FieldSpec) -> PolyMap:
        return elementary_map(field, self.shift.n_vars, self.target, self.shift)

    def serialize(self, field: FieldSpec) -> str:
        return f"elem {self.target} {format_poly(self.shift)}"


Letter = Union[LinearLetter, ElementaryLetter]


@dataclass(frozen=True)
class TameWord:
    """A word ``w_1 w_2 ... w_L`` in linear and elementary letters.

    The associated map is ``w_1 o w_2 o ... o w_L``.
    """

    field: FieldSpec
    n: int
    letters: tuple[Letter, ...]
    seed: int | None = dc_field(default=None, compare=False)
    meta: dict = dc_field(default_factory=dict, compare=False)

    def __post_init__(self):
        for let in self.letters:
            if isinstance(let, LinearLetter):
                if not mat_det(self.field, let.matrix):
                    raise ValueError("linear letter with zero determinant")
            elif isinstance(let, ElementaryLetter):
                if let.target in let.shift.variables():
                    raise ValueError("elementary letter shift involves its target variable")
            else:
                raise TypeError(f"unknown letter {let!r}")

    @property
    def length(self) -> int:
        return len(self.letters)

    def to_map(self) -> PolyMap:
        acc = identity_map(self.field, self.n).without_inverse()
        for let in reversed(self.letters):
            acc = let.apply_left(self.field, acc)
        acc.inverse = self.inverse_map()
        return acc

    def inverse_map(self) -> PolyMap:
        """``w_L^-1 o ... o w_1^-1``, built without composing the forward map."""
        acc = identity_map(self.field, self.n).without_inverse()
        for let in self.letters:
            acc = let.inverse(self.field).apply_left(self.field, acc)
        return acc

    def inverse_word(self) -> "TameWord":
        return TameWord(self.field, self.n,
                        tuple(let.inverse(self.field) for let in reversed(self.letters)))

    def letter_maps(self) -> list[PolyMap]:
        return [let.to_map(self.field) for let in self.letters]

    def serialize(self) -> list[str]:
        return [let.serialize(self.field) for let in self.letters]


def parse_word(records: Sequence[str], field: FieldSpec, n: int) -> TameWord:
    """Inverse of :meth:`TameWord.serialize`."""
    letters: list[Letter] = []
    for rec in records:
        kind, _, rest = rec.strip().partition(" ")
        if kind == "lin":
            vals = [field.parse_element(t) for t in rest.split()]
            if len(vals) != n * n:
                raise ValueError(f"lin record needs {n * n} entries, got {len(vals)}")
            letters.append(LinearLetter(tuple(tuple(vals[r * n:(r + 1) * n])
                                              for r in range(n))))
        elif kind == "elem":
            idx, _, text = rest.strip().partition(" ")
            letters.append(ElementaryLetter(int(idx), parse_poly(text, field, n)))
        else:
            raise ValueError(f"unknown word record {rec!r}")
    return TameWord(field, n, tuple(letters))


def _random_shift(rng: random.Random, field: FieldSpec, n: int, target: int,
                  degree: int) -> Poly:
    free = [i for i in range(n) if i != target - 1]
    exps = []
    for combo in itertools.product(range(degree + 1), repeat=len(free)):
        if sum(combo) <= degree:
            e = [0] * n
            for i, v in zip(free, combo):
                e[i] = v
            exps.append(tuple(e))
    f = Poly.zero(field, n)
    for _ in range(rng.randint(1, degree)):
        f = f + Poly.monomial(field, rng.choice(exps), rng.randrange(1, field.q))
    return f


def _random_matrix(rng: random.Random, field: FieldSpec, n: int,
                   fix_var: int | None) -> tuple[tuple[int, ...], ...]:
    while True:
        m = [[rng.randrange(field.q) for _ in range(n)] for _ in range(n)]
        if fix_var is not None:
            k = fix_var - 1
            for j in range(n):
                m[k][j] = 1 if j == k else 0
                m[j][k] = 1 if j == k else 0
        if mat_det(field, m):
            return tuple(tuple(r) for r in m)


def random_tame_word(field: FieldSpec, n: int, length: int, degree: int, seed: int,
                     fix_var: int | None = None, p_elementary: float = 0.5) -> TameWord:
    """Sample a tame word from ``random.Random(seed)``.

    Each letter is elementary with probability ``p_elementary`` (random
    target, 1..degree random monomials of total degree <= degree avoiding
    the target) and otherwise a random invertible matrix.  With ``fix_var``
    every letter fixes that variable, so the map does too.
    """
    if length < 1:
        raise ValueError("word length must be >= 1")
    if degree < 1:
        raise ValueError("degree bound must be >= 1")
    if fix_var is not None and not 1 <= fix_var <= n:
        raise ValueError(f"fix_var {fix_var} out of range")
    rng = random.Random(seed)
    targets = [i for i in range(1, n + 1) if i != fix_var]
    if not targets:
        raise ValueError("no free variable to act on")
    letters: list[Letter] = []
    for _ in range(length):
        if rng.random() < p_elementary:
            i = rng.choice(targets)
            letters.append(ElementaryLetter(i, _random_shift(rng, field, n, i, degree)))
        else:
            letters.append(LinearLetter(_random_matrix(rng, field, n, fix_var)))
    return TameWord(field, n, tuple(letters), seed=seed,
                    meta={"length": length, "degree": degree, "fix_var": fix_var})


# -- slices and conjugation --------------------------------------------------

def slice_map(F: PolyMap, i: int, a: int) -> PolyMap:
    """Restrict F to the hyperplane ``X_i = a`` (F must fix X_i formally)."""
    if not 1 <= i <= F.n:
        raise ValueError(f"variable index {i} out of range 1..{F.n}")
    if F.n < 2:
        raise ValueError("cannot slice a one-dimensional map")
    if not F.coords[i - 1].is_variable(i):
        raise ValueError(f"map does not fix X{i}: coordinate is {F.coords[i - 1]}")
    field = F.field
    field.check(a)
    m = F.n - 1
    ys = variables_poly(field, m)
    args = []
    for k in range(1, F.n + 1):
        if k == i:
            args.append(Poly.constant(field, m, a))
        else:
            args.append(ys[k - 1 if k < i else k - 2])
    return PolyMap([poly_substitute(c, args)
                    for k, c in enumerate(F.coords, start=1) if k != i])


def conjugate(F: PolyMap, phi: PolyMap, phi_inv: PolyMap, check: bool = True) -> PolyMap:
    """``phi^-1 o F o phi``."""
    if check and not verify_inverse_pair(phi, phi_inv):
        raise ValueError("phi and phi_inv are not formal inverses")
    return compose_maps(phi_inv.without_inverse(),
                        compose_maps(F.without_inverse(), phi.without_inverse()))

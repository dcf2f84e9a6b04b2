"""Sparse multivariate polynomials over a :class:`~oddaut.gf.FieldSpec`.

A :class:`Poly` stores only its nonzero terms.  Exponent vectors are packed
into a single Python int (``_BITS`` bits per variable, X1 in the lowest bits)
so that multiplying monomials is integer addition.  The public ``terms``
view unpacks them back to tuples.

Formal operations (``+``, ``*``, ``**``, :meth:`Poly.substitute`) never
reduce exponents.  :meth:`Poly.functional_reduce` is the only place where
``X^q`` is identified with ``X``.
"""

from __future__ import annotations

import re
from typing import Iterable, Mapping, Sequence

from .gf import FieldSpec

__all__ = [
    "Poly",
    "PolyParseError",
    "parse_poly",
    "format_poly",
    "parse_map_text",
    "poly_eval",
    "poly_substitute",
    "functional_reduce",
]

_BITS = 24
_MASK = (1 << _BITS) - 1
_MAX_DEGREE = _MASK


def _pack(exps: Sequence[int]) -> int:
    key = 0
    for i, e in enumerate(exps):
        if e < 0:
            raise ValueError("negative exponent")
        if e > _MAX_DEGREE:
            raise OverflowError("exponent too large")
        key |= e << (_BITS * i)
    return key


def _unpack(key: int, n: int) -> tuple[int, ...]:
    return tuple((key >> (_BITS * i)) & _MASK for i in range(n))


def _key_degree(key: int) -> int:
    d = 0
    while key:
        d += key & _MASK
        key >>= _BITS
    return d


class Poly:
    """Polynomial in ``X1..Xn`` over a finite field.  Immutable."""

    __slots__ = ("field", "n_vars", "_terms", "_hash", "_degree")

    def __init__(self, field: FieldSpec, n_vars: int,
                 terms: Mapping[Sequence[int], int] | None = None):
        if n_vars < 0:
            raise ValueError("n_vars must be non-negative")
        self.field = field
        self.n_vars = n_vars
        packed: dict[int, int] = {}
        add = field.add_table
        for exps, c in (terms or {}).items():
            if len(exps) != n_vars:
                raise ValueError(f"exponent vector {tuple(exps)} has wrong length "
                                 f"for {n_vars} variables")
            field.check(c)
            k = _pack(exps)
            packed[k] = add[packed.get(k, 0)][c]
        self._terms = {k: c for k, c in packed.items() if c}
        self._hash = None
        self._degree = None

    @classmethod
    def _raw(cls, field: FieldSpec, n_vars: int, packed: dict[int, int]) -> "Poly":
        # packed must already be free of zero coefficients
        obj = cls.__new__(cls)
        obj.field = field
        obj.n_vars = n_vars
        obj._terms = packed
        obj._hash = None
        obj._degree = None
        return obj

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, field: FieldSpec, n_vars: int) -> "Poly":
        return cls._raw(field, n_vars, {})

    @classmethod
    def constant(cls, field: FieldSpec, n_vars: int, c: int) -> "Poly":
        field.check(c)
        return cls._raw(field, n_vars, {0: c} if c else {})

    @classmethod
    def var(cls, field: FieldSpec, n_vars: int, i: int) -> "Poly":
        """The variable X_i (1-based)."""
        if not 1 <= i <= n_vars:
            raise ValueError(f"variable index {i} out of range 1..{n_vars}")
        return cls._raw(field, n_vars, {1 << (_BITS * (i - 1)): 1})

    @classmethod
    def monomial(cls, field: FieldSpec, exps: Sequence[int], c: int = 1) -> "Poly":
        return cls(field, len(exps), {tuple(exps): c})

    # -- inspection -------------------------------------------------------
    @property
    def terms(self) -> dict[tuple[int, ...], int]:
        """Terms as ``{exponent tuple: coefficient}`` in graded-lex descending order."""
        return {_unpack(k, self.n_vars): c for k, c in self._sorted_items()}

    def _sorted_items(self):
        n = self.n_vars
        # graded lex, X1 most significant
        return sorted(self._terms.items(),
                      key=lambda kc: (_key_degree(kc[0]), _unpack(kc[0], n)),
                      reverse=True)

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if self._degree is None:
            self._degree = max((_key_degree(k) for k in self._terms), default=-1)
        return self._degree

    def constant_term(self) -> int:
        return self._terms.get(0, 0)

    def variables(self) -> set[int]:
        """1-based indices of the variables that occur."""
        used = set()
        for k in self._terms:
            for i in range(self.n_vars):
                if (k >> (_BITS * i)) & _MASK:
                    used.add(i + 1)
        return used

    def is_variable(self, i: int) -> bool:
        return self._terms == {1 << (_BITS * (i - 1)): 1}

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return (self.n_vars == other.n_vars and self.field == other.field
                and self._terms == other._terms)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.field, self.n_vars, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self):
        return f"Poly({format_poly(self)!r}, {self.field.designation()}, n={self.n_vars})"

    def __str__(self):
        return format_poly(self)

    # -- ring operations --------------------------------------------------
    def _check_compatible(self, other: "Poly") -> None:
        if not isinstance(other, Poly):
            raise TypeError(f"expected Poly, got {type(other).__name__}")
        if other.n_vars != self.n_vars:
            raise ValueError(f"variable count mismatch: {self.n_vars} vs {other.n_vars}")
        if other.field != self.field:
            raise ValueError("polynomials live over different fields")

    def __add__(self, other: "Poly") -> "Poly":
        self._check_compatible(other)
        add = self.field.add_table
        res = dict(self._terms)
        for k, c in other._terms.items():
            s = add[res.get(k, 0)][c]
            if s:
                res[k] = s
            else:
                res.pop(k, None)
        return Poly._raw(self.field, self.n_vars, res)

    def __neg__(self) -> "Poly":
        neg = self.field.neg_table
        return Poly._raw(self.field, self.n_vars, {k: neg[c] for k, c in self._terms.items()})

    def __sub__(self, other: "Poly") -> "Poly":
        self._check_compatible(other)
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        if not isinstance(other, Poly):
            return NotImplemented
        self._check_compatible(other)
        if self.degree() + other.degree() > _MAX_DEGREE:
            raise OverflowError("product degree exceeds the packed exponent range")
        a, b = self._terms, other._terms
        if len(a) < len(b):
            a, b = b, a
        add, mul = self.field.add_table, self.field.mul_table
        res: dict[int, int] = {}
        get = res.get
        for kb, cb in b.items():
            row = mul[cb]
            for ka, ca in a.items():
                k = ka + kb
                res[k] = add[get(k, 0)][row[ca]]
        return Poly._raw(self.field, self.n_vars, {k: c for k, c in res.items() if c})

    def scale(self, c: int) -> "Poly":
        """Multiply by the field element c."""
        self.field.check(c)
        if c == 0:
            return Poly.zero(self.field, self.n_vars)
        row = self.field.mul_table[c]
        return Poly._raw(self.field, self.n_vars, {k: row[v] for k, v in self._terms.items()})

    def frobenius_power(self) -> "Poly":
        """``self ** p``, computed as sum of c^p * M^p (valid in characteristic p)."""
        p = self.field.p
        frob = self.field.frobenius
        return Poly._raw(self.field, self.n_vars,
                         {k * p: frob(c) for k, c in self._terms.items()})

    def __pow__(self, e: int) -> "Poly":
        if not isinstance(e, int) or e < 0:
            raise ValueError("exponent must be a non-negative int")
        if e == 0:
            return Poly.constant(self.field, self.n_vars, 1)
        if len(self._terms) <= 1:
            ((k, c),) = self._terms.items() if self._terms else ((0, 0),)
            if not c:
                return self
            if self.degree() * e > _MAX_DEGREE:
                raise OverflowError("power degree exceeds the packed exponent range")
            return Poly._raw(self.field, self.n_vars, {k * e: self.field.pow(c, e)})
        # base-p digits: f^e = prod_k (f^(p^k))^(d_k)
        p = self.field.p
        result = None
        base = self
        while e:
            e, d = divmod(e, p)
            for _ in range(d):
                result = base if result is None else result * base
            if e:
                base = base.frobenius_power()
        return result

    # -- evaluation and substitution -------------------------------------
    def eval(self, point: Sequence[int]) -> int:
        return poly_eval(self, point)

    def __call__(self, *point: int) -> int:
        return poly_eval(self, point)

    def substitute(self, args: Sequence["Poly"]) -> "Poly":
        return poly_substitute(self, args)

    def functional_reduce(self) -> "Poly":
        return functional_reduce(self)

    def rename(self, n_vars: int, mapping: Mapping[int, int]) -> "Poly":
        """Move variable i to position mapping[i] in an n_vars-variable ring.

        Every occurring variable must be in ``mapping``.
        """
        res: dict[int, int] = {}
        add = self.field.add_table
        for k, c in self._terms.items():
            exps = _unpack(k, self.n_vars)
            new = [0] * n_vars
            for i, e in enumerate(exps, start=1):
                if e:
                    new[mapping[i] - 1] += e
            nk = _pack(new)
            res[nk] = add[res.get(nk, 0)][c]
        return Poly._raw(self.field, n_vars, {k: c for k, c in res.items() if c})


def poly_eval(f: Poly, point: Sequence[int]) -> int:
    """Value of f at a point of F_q^n."""
    if len(point) != f.n_vars:
        raise ValueError(f"point has {len(point)} coordinates, polynomial has "
                         f"{f.n_vars} variables")
    F = f.field
    for x in point:
        F.check(x)
    add, mul, pw = F.add_table, F.mul_table, F.pow
    n = f.n_vars
    total = 0
    for k, c in f._terms.items():
        v = c
        for i in range(n):
            e = (k >> (_BITS * i)) & _MASK
            if e:
                v = mul[v][pw(point[i], e)]
                if not v:
                    break
        total = add[total][v]
    return total


def poly_substitute(f: Poly, args: Sequence[Poly]) -> Poly:
    """Formal composition ``f(args[0], ..., args[n-1])``, fully expanded."""
    if len(args) != f.n_vars:
        raise ValueError(f"expected {f.n_vars} substitution arguments, got {len(args)}")
    if not args:
        return f
    target = args[0]
    for a in args:
        if not isinstance(a, Poly):
            raise TypeError("substitution arguments must be Poly")
        if a.field != f.field or a.n_vars != target.n_vars:
            raise ValueError("substitution arguments disagree on field or variable count")
    if f.field != target.field:
        raise ValueError("substitution arguments live over a different field")
    F = f.field
    n_out = target.n_vars
    one = Poly.constant(F, n_out, 1)
    cache: dict[tuple[int, int], Poly] = {}

    def power(i: int, e: int) -> Poly:
        key = (i, e)
        if key not in cache:
            cache[key] = args[i] ** e
        return cache[key]

    add = F.add_table
    acc: dict[int, int] = {}
    n = f.n_vars
    for k, c in f._terms.items():
        term = None
        for i in range(n):
            e = (k >> (_BITS * i)) & _MASK
            if e:
                pw = power(i, e)
                term = pw if term is None else term * pw
                if term.is_zero():
                    break
        if term is None:
            term = one
        for tk, tc in term.scale(c)._terms.items():
            acc[tk] = add[acc.get(tk, 0)][tc]
    return Poly._raw(F, n_out, {k: c for k, c in acc.items() if c})


def functional_reduce(f: Poly) -> Poly:
    """Canonical representative of the function F_q^n -> F_q induced by f.

    Each exponent e >= 1 becomes ((e - 1) mod (q - 1)) + 1.
    """
    q = f.field.q
    add = f.field.add_table
    res: dict[int, int] = {}
    for k, c in f._terms.items():
        exps = _unpack(k, f.n_vars)
        nk = _pack([((e - 1) % (q - 1)) + 1 if e else 0 for e in exps])
        res[nk] = add[res.get(nk, 0)][c]
    return Poly._raw(f.field, f.n_vars, {k: c for k, c in res.items() if c})


# -- text format ------------------------------------------------------------

class PolyParseError(ValueError):
    """Syntax or semantic error in polynomial text; ``pos`` is the 0-based offset."""

    def __init__(self, message: str, text: str = "", pos: int = 0):
        self.message = message
        self.text = text
        self.pos = pos
        super().__init__(f"{message} at position {pos}" + (f": {text!r}" if text else ""))


_TOKEN_RE = re.compile(r"\s*(?:(?P<var>X(?P<idx>\d+)?|Y|Z)|(?P<gen>g)|(?P<num>\d+)|(?P<op>[-+*^]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        mt = _TOKEN_RE.match(text, pos)
        if not mt:
            stripped = len(text[pos:]) - len(text[pos:].lstrip())
            raise PolyParseError("unexpected character", text, pos + stripped)
        for kind in ("var", "gen", "num", "op"):
            if mt.group(kind) is not None:
                tokens.append((kind, mt.group(kind), mt.start(kind)))
                break
        pos = mt.end()
    tokens.append(("end", "", len(text)))
    return tokens


def parse_poly(text: str, field: FieldSpec, n_vars: int) -> Poly:
    """Parse polynomial text.

    Variables are ``X1..Xn`` (1-based); for n <= 3 the aliases ``X``, ``Y``,
    ``Z`` are accepted too.  A term is a ``*``-separated product of integer
    literals, ``g``/``g^k`` and variables with optional ``^`` exponents.
    """
    tokens = _tokenize(text)
    pos = 0

    def peek():
        return tokens[pos]

    def take(kind=None, value=None):
        nonlocal pos
        tok = tokens[pos]
        if (kind and tok[0] != kind) or (value and tok[1] != value):
            want = value or kind
            raise PolyParseError(f"expected {want!r}, found {tok[1] or 'end of input'!r}",
                                 text, tok[2])
        pos += 1
        return tok

    def uint_after_caret():
        if peek() == ("op", "^", peek()[2]):
            take("op", "^")
            return int(take("num")[1])
        return 1

    def factor() -> Poly:
        kind, val, at = peek()
        if kind == "num":
            take()
            return Poly.constant(field, n_vars, field.from_int(int(val)))
        if kind == "gen":
            take()
            e = uint_after_caret()
            return Poly.constant(field, n_vars, field.pow(field.gen, e))
        if kind == "var":
            take()
            if val[1:]:
                i = int(val[1:])
                if not 1 <= i <= n_vars:
                    hint = " (variables are 1-based)" if i == 0 else ""
                    raise PolyParseError(f"variable X{i} out of range 1..{n_vars}{hint}",
                                         text, at)
            else:
                if n_vars > 3:
                    raise PolyParseError(f"alias {val} only allowed for n <= 3", text, at)
                i = {"X": 1, "Y": 2, "Z": 3}[val]
                if i > n_vars:
                    raise PolyParseError(f"alias {val} out of range for n={n_vars}", text, at)
            e = uint_after_caret()
            return Poly.var(field, n_vars, i) ** e
        raise PolyParseError(f"expected a term, found {val or 'end of input'!r}", text, at)

    def term() -> Poly:
        acc = factor()
        while peek()[:2] == ("op", "*"):
            take()
            acc = acc * factor()
        return acc

    total = Poly.zero(field, n_vars)
    sign = "+"
    if peek()[0] == "op" and peek()[1] in "+-":
        sign = take()[1]
    while True:
        t = term()
        total = total - t if sign == "-" else total + t
        kind, val, at = peek()
        if kind == "end":
            break
        if kind == "op" and val in "+-":
            sign = take()[1]
            continue
        raise PolyParseError(f"unexpected {val!r}", text, at)
    return total


def _format_monomial(exps: Sequence[int]) -> str:
    parts = []
    for i, e in enumerate(exps, start=1):
        if e == 1:
            parts.append(f"X{i}")
        elif e > 1:
            parts.append(f"X{i}^{e}")
    return "*".join(parts)


def format_poly(f: Poly) -> str:
    """Canonical text: graded-lex descending, ``X1..Xn`` names.

    A coefficient outside the prime field is written as one term per nonzero
    g-power, e.g. ``(g+1)*X1`` prints as ``g*X1 + X1``.
    """
    if f.is_zero():
        return "0"
    F = f.field
    pieces = []
    for k, c in f._sorted_items():
        mono = _format_monomial(_unpack(k, f.n_vars))
        for coeff in F.format_element(c).split(" + "):
            if not mono:
                pieces.append(coeff)
            elif coeff == "1":
                pieces.append(mono)
            else:
                pieces.append(f"{coeff}*{mono}")
    return " + ".join(pieces)


def parse_map_text(text: str, field: FieldSpec, n: int | None = None) -> list[Poly]:
    """Split ``"p1; p2; ..."`` and parse each coordinate in n variables.

    If n is None it is taken to be the number of coordinates.
    """
    parts = [s for s in text.split(";")]
    if parts and not parts[-1].strip():
        parts = parts[:-1]
    if n is None:
        n = len(parts)
    if len(parts) != n:
        raise PolyParseError(f"map has {len(parts)} coordinates, expected {n}", text, 0)
    out = []
    offset = 0
    for part in parts:
        try:
            out.append(parse_poly(part, field, n))
        except PolyParseError as exc:
            raise PolyParseError(exc.message, text,
                                 offset + exc.pos) from None
        offset += len(part) + 1
    return out


def variables_poly(field: FieldSpec, n: int) -> list[Poly]:
    return [Poly.var(field, n, i) for i in range(1, n + 1)]


def sum_polys(polys: Iterable[Poly], field: FieldSpec, n: int) -> Poly:
    acc = Poly.zero(field, n)
    for p in polys:
        acc = acc + p
    return acc


__all__ += ["variables_poly", "sum_polys"]

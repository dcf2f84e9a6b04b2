"""Arithmetic in small finite fields F_{p^m}.

Elements are plain ints in ``0..q-1``.  The index of an element is its
coefficient vector ``(a_0, ..., a_{m-1})`` read in base p with ``a_0`` least
significant, so index 0 is zero, index 1 is one, and (for m >= 2) index p is
the residue class ``g`` of the formal variable t.

All operations go through precomputed addition/multiplication tables; the
fields in scope have q <= 1024.
"""

from __future__ import annotations

import itertools
import re
from typing import Iterable, Sequence

__all__ = [
    "FieldError",
    "FieldSpec",
    "DEFAULT_MODULI",
    "make_field",
    "parse_field",
    "ff_arith",
    "frobenius",
    "enumerate_elements",
    "is_prime",
    "is_irreducible",
]

MAX_ORDER = 1024

_ELEMENT_RE = re.compile(
    r"(?:(?P<num>\d+)\s*(?:\*\s*)?)?(?P<g>g(?:\s*\^\s*(?P<e>\d+))?)?")

# Low-weight irreducibles, coefficients a_0..a_m.
DEFAULT_MODULI = {
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (2, 4): (1, 1, 0, 0, 1),
    (2, 5): (1, 0, 1, 0, 0, 1),
    (2, 6): (1, 1, 0, 0, 0, 0, 1),
    (3, 2): (1, 0, 1),
}


class FieldError(ValueError):
    """Invalid field construction or an undefined field operation."""


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % d for d in range(2, int(p**0.5) + 1))


def _poly_mod_p(num: list[int], den: Sequence[int], p: int) -> list[int]:
    """Remainder of num by the monic polynomial den over F_p (low-first lists)."""
    r = list(num)
    d = len(den) - 1
    for k in range(len(r) - 1, d - 1, -1):
        c = r[k] % p
        if c:
            for j in range(d + 1):
                r[k - d + j] = (r[k - d + j] - c * den[j]) % p
    return [c % p for c in r[:d]]


def is_irreducible(modulus: Sequence[int], p: int) -> bool:
    """Brute-force irreducibility: no monic divisor of degree 1..m//2."""
    m = len(modulus) - 1
    for d in range(1, m // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            if not any(_poly_mod_p(list(modulus), list(low) + [1], p)):
                return False
    return True


class FieldSpec:
    """The field F_p[t]/(modulus) with q = p^m elements.

    Instances are immutable and compare equal when (p, m, modulus) agree.
    """

    __slots__ = ("p", "m", "modulus", "q", "add_table", "mul_table",
                 "neg_table", "inv_table", "_hash")

    def __init__(self, p: int, m: int, modulus: Sequence[int]):
        self.p = p
        self.m = m
        self.modulus = tuple(modulus)
        self.q = p**m
        self._hash = hash((p, m, self.modulus))
        self._build_tables()

    def _build_tables(self) -> None:
        p, m, q = self.p, self.m, self.q
        vecs = [self.to_vector(a) for a in range(q)]
        add = [[0] * q for _ in range(q)]
        mul = [[0] * q for _ in range(q)]
        for a in range(q):
            va = vecs[a]
            for b in range(a, q):
                vb = vecs[b]
                s = self.from_vector([(x + y) % p for x, y in zip(va, vb)])
                prod = [0] * (2 * m - 1)
                for i, x in enumerate(va):
                    if x:
                        for j, y in enumerate(vb):
                            prod[i + j] += x * y
                t = self.from_vector(_poly_mod_p(prod, self.modulus, p))
                add[a][b] = add[b][a] = s
                mul[a][b] = mul[b][a] = t
        self.add_table = tuple(tuple(r) for r in add)
        self.mul_table = tuple(tuple(r) for r in mul)
        self.neg_table = tuple(self.from_vector([(-x) % p for x in vecs[a]])
                               for a in range(q))
        inv = [0] * q
        for a in range(1, q):
            inv[a] = mul[a].index(1)
        self.inv_table = tuple(inv)

    def __eq__(self, other):
        if not isinstance(other, FieldSpec):
            return NotImplemented
        return (self.p, self.m, self.modulus) == (other.p, other.m, other.modulus)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"FieldSpec({self.designation()})"

    def designation(self, with_modulus: bool = False) -> str:
        s = f"GF({self.p})" if self.m == 1 else f"GF({self.p}^{self.m})"
        if with_modulus:
            s += " mod=" + ",".join(map(str, self.modulus))
        return s

    # -- indexing ---------------------------------------------------------
    def to_vector(self, a: int) -> tuple[int, ...]:
        out = []
        for _ in range(self.m):
            a, r = divmod(a, self.p)
            out.append(r)
        return tuple(out)

    def from_vector(self, vec: Sequence[int]) -> int:
        idx = 0
        for c in reversed(vec):
            idx = idx * self.p + (c % self.p)
        return idx

    def check(self, a: int) -> int:
        if not isinstance(a, int) or not 0 <= a < self.q:
            raise FieldError(f"{a!r} is not an element index of {self.designation()}")
        return a

    def from_int(self, k: int) -> int:
        """Image of the integer k under Z -> F_p -> F_q."""
        return k % self.p

    @property
    def gen(self) -> int:
        """Residue class of t."""
        if self.m >= 2:
            return self.p
        # m == 1: t is congruent to -modulus[0]
        return (-self.modulus[0]) % self.p

    # -- arithmetic -------------------------------------------------------
    def add(self, a: int, b: int) -> int:
        return self.add_table[a][b]

    def sub(self, a: int, b: int) -> int:
        return self.add_table[a][self.neg_table[b]]

    def neg(self, a: int) -> int:
        return self.neg_table[a]

    def mul(self, a: int, b: int) -> int:
        return self.mul_table[a][b]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in " + self.designation())
        return self.inv_table[a]

    def div(self, a: int, b: int) -> int:
        return self.mul_table[a][self.inv(b)]

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            a, e = self.inv(a), -e
        result = 1
        mul = self.mul_table
        while e:
            if e & 1:
                result = mul[result][a]
            a = mul[a][a]
            e >>= 1
        return result

    def frobenius(self, a: int) -> int:
        return self.pow(a, self.p)

    def elements(self) -> range:
        return range(self.q)

    def primitive_element(self) -> int:
        """Smallest index generating the multiplicative group."""
        if self.q == 2:
            return 1
        order = self.q - 1
        primes = [d for d in range(2, order + 1) if order % d == 0 and is_prime(d)]
        for a in range(2, self.q):
            if all(self.pow(a, order // r) != 1 for r in primes):
                return a
        raise FieldError("no primitive element")  # unreachable for a field

    # -- literals ---------------------------------------------------------
    def format_element(self, a: int) -> str:
        """Literal for a as a '+'-joined sum of c*g^k pieces."""
        if a == 0:
            return "0"
        if self.m == 1:
            return str(a)
        parts = []
        for k, c in reversed(list(enumerate(self.to_vector(a)))):
            if not c:
                continue
            if k == 0:
                parts.append(str(c))
            else:
                g = "g" if k == 1 else f"g^{k}"
                parts.append(g if c == 1 else f"{c}*{g}")
        return " + ".join(parts)

    def parse_element(self, text: str) -> int:
        """Parse an element literal.

        Accepts integers (reduced mod p), ``g``, ``g^k`` and ``c*g^k``, joined
        by ``+``; this is the inverse of :meth:`format_element`.
        """
        total = 0
        for piece in text.split("+"):
            mt = _ELEMENT_RE.fullmatch(piece.strip())
            if not mt or not piece.strip():
                raise FieldError(f"malformed field literal {text!r}")
            num, gexp = mt.group("num"), mt.group("g")
            if gexp is None:
                v = self.from_int(int(num))
            else:
                v = self.pow(self.gen, int(mt.group("e") or 1))
                if num is not None:
                    v = self.mul(self.from_int(int(num)), v)
            total = self.add(total, v)
        return total


def make_field(p: int, m: int = 1, modulus: Sequence[int] | None = None) -> FieldSpec:
    """Construct and validate F_{p^m}.

    When ``modulus`` is omitted, F_p uses ``t`` and the extension fields use
    the entries of ``DEFAULT_MODULI``.
    """
    if not is_prime(p):
        raise FieldError(f"characteristic {p} is not prime")
    if m < 1:
        raise FieldError("extension degree must be >= 1")
    if p**m > MAX_ORDER:
        raise FieldError(f"GF({p}^{m}) exceeds the supported order {MAX_ORDER}")
    if modulus is None:
        if m == 1:
            modulus = (0, 1)
        elif (p, m) in DEFAULT_MODULI:
            modulus = DEFAULT_MODULI[(p, m)]
        else:
            raise FieldError(f"no default modulus for GF({p}^{m}); supply one")
    modulus = tuple(int(c) for c in modulus)
    if len(modulus) != m + 1:
        raise FieldError(f"modulus must have {m + 1} coefficients, got {len(modulus)}")
    if any(not 0 <= c < p for c in modulus):
        raise FieldError(f"modulus coefficients must lie in 0..{p - 1}")
    if modulus[-1] != 1:
        raise FieldError("modulus must be monic")
    if not is_irreducible(modulus, p):
        raise FieldError(f"modulus {modulus} is reducible over F_{p}")
    return FieldSpec(p, m, modulus)


_FIELD_RE = re.compile(
    r"\s*(?:GF|F)\(\s*(\d+)\s*(?:\^\s*(\d+)\s*)?\)\s*(?:mod\s*=\s*([\d,\s]+))?\s*$")


def parse_field(text: str, modulus: str | Sequence[int] | None = None) -> FieldSpec:
    """Parse a designation such as ``GF(2^3)`` or ``GF(2^2) mod=1,1,1``."""
    mt = _FIELD_RE.match(text)
    if not mt:
        raise FieldError(f"malformed field designation {text!r}")
    p, m = int(mt.group(1)), int(mt.group(2) or 1)
    if modulus is None and mt.group(3):
        modulus = mt.group(3)
    if isinstance(modulus, str):
        modulus = [int(c) for c in modulus.replace(" ", "").split(",") if c]
    if not is_prime(p):
        # allow GF(4) style prime-power notation
        for base in range(2, p):
            k, v = 0, p
            while v % base == 0:
                v //= base
                k += 1
            if v == 1 and is_prime(base) and mt.group(2) is None:
                p, m = base, k
                break
    return make_field(p, m, modulus)


def ff_arith(spec: FieldSpec, op: str, *operands: int) -> int:
    """Dispatch one field operation by name (add, sub, mul, neg, inv, pow)."""
    if op == "pow":
        a, e = operands
        return spec.pow(spec.check(a), e)
    for a in operands:
        spec.check(a)
    try:
        fn = {"add": spec.add, "sub": spec.sub, "mul": spec.mul,
              "neg": spec.neg, "inv": spec.inv}[op]
    except KeyError:
        raise FieldError(f"unknown field operation {op!r}") from None
    return fn(*operands)


def frobenius(spec: FieldSpec, a: int) -> int:
    return spec.frobenius(spec.check(a))


def enumerate_elements(spec: FieldSpec) -> list[int]:
    return list(spec.elements())


def element_sum(spec: FieldSpec, values: Iterable[int]) -> int:
    total = 0
    add = spec.add_table
    for v in values:
        total = add[total][v]
    return total

"""Independent reference computations used only by the tests.

Nothing here imports the package's arithmetic: fields GF(2^m) use bit
operations on ints, prime fields use integer arithmetic mod p, and maps are
evaluated term by term from plain dictionaries.
"""

import itertools
from collections import deque


def gf2m_mul(a, b, modulus_bits, m):
    """Carry-less product of a and b reduced by the modulus (bit i = coeff of t^i)."""
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a >> m & 1:
            a ^= modulus_bits
    return r


def modulus_bits(coeffs):
    return sum(c << i for i, c in enumerate(coeffs))


class RefField:
    """Minimal field for p prime (m = 1) or p = 2 (any m)."""

    def __init__(self, p, m, modulus):
        self.p, self.m, self.q = p, m, p**m
        self.bits = modulus_bits(modulus)

    def add(self, a, b):
        return a ^ b if self.p == 2 else (a + b) % self.p

    def mul(self, a, b):
        if self.m == 1:
            return (a * b) % self.p
        return gf2m_mul(a, b, self.bits, self.m)

    def power(self, a, e):
        r = 1
        for _ in range(e):
            r = self.mul(r, a)
        return r


def eval_terms(ref, terms, point):
    """terms: {exponent tuple: coeff}; naive repeated multiplication."""
    total = 0
    for exps, c in terms.items():
        v = c
        for x, e in zip(point, exps):
            v = ref.mul(v, ref.power(x, e))
        total = ref.add(total, v)
    return total


def all_points(q, n):
    """Points in little-endian index order (X1 fastest)."""
    return [tuple(reversed(t)) for t in itertools.product(range(q), repeat=n)]


def point_index(pt, q):
    return sum(x * q**i for i, x in enumerate(pt))


def map_images(ref, coord_terms, n):
    q = ref.q
    return [point_index(tuple(eval_terms(ref, t, pt) for t in coord_terms), q)
            for pt in all_points(q, n)]


def naive_inversion_parity(images):
    inv = sum(1 for i in range(len(images)) for j in range(i + 1, len(images))
              if images[i] > images[j])
    return "odd" if inv % 2 else "even"


def closure_order(gens, limit=None):
    """Order of the group generated by image lists, by BFS over products."""
    ident = tuple(range(len(gens[0])))
    seen = {ident}
    todo = deque([ident])
    while todo:
        x = todo.popleft()
        for g in gens:
            y = tuple(g[i] for i in x)
            if y not in seen:
                seen.add(y)
                if limit is not None and len(seen) > limit:
                    return None
                todo.append(y)
    return len(seen)

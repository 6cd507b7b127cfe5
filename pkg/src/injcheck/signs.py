"""Sign vectors, the sign partial order, and sign-set rows.

Signs are the ints -1, 0, +1. The partial order puts 0 below both nonzero
signs and leaves - and + incomparable, so tau <= rho componentwise means every
nonzero coordinate of tau survives with the same sign in rho.

Two sign vectors are orthogonal when their coordinatewise products are either
all zero or include both a -1 and a +1; this is exactly the condition for two
real vectors with those sign patterns to admit a zero inner product.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import FrozenSet, Iterable, Optional, Sequence

Sign = int  # -1, 0, +1

_CHAR_OF_SIGN = {-1: "-", 0: "0", 1: "+"}
_SIGN_OF_CHAR = {"-": -1, "0": 0, "+": 1}


def sign_of(value) -> Sign:
    if value > 0:
        return 1
    if value < 0:
        return -1
    return 0


def _check_sign(s) -> Sign:
    if s not in (-1, 0, 1):
        raise ValueError(f"not a sign: {s!r}")
    return s


@dataclass(frozen=True)
class SignVector:
    entries: tuple[Sign, ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(_check_sign(s) for s in self.entries))

    @classmethod
    def from_text(cls, text: str) -> "SignVector":
        try:
            return cls(tuple(_SIGN_OF_CHAR[c] for c in text.strip()))
        except KeyError as exc:
            raise ValueError(f"bad sign character {exc.args[0]!r} in {text!r}") from None

    @classmethod
    def zero(cls, n: int) -> "SignVector":
        return cls((0,) * n)

    def __str__(self) -> str:
        return "".join(_CHAR_OF_SIGN[s] for s in self.entries)

    def __repr__(self) -> str:
        return f"SignVector({self})"

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i: int) -> Sign:
        return self.entries[i]

    def __neg__(self) -> "SignVector":
        return SignVector(tuple(-s for s in self.entries))

    def is_zero(self) -> bool:
        return all(s == 0 for s in self.entries)

    def support(self) -> tuple[int, ...]:
        return tuple(i for i, s in enumerate(self.entries) if s != 0)


def sigma(x: Sequence) -> SignVector:
    """Componentwise sign of an exact rational vector."""
    return SignVector(tuple(sign_of(v) for v in x))


def _entries(v) -> tuple[Sign, ...]:
    if isinstance(v, SignVector):
        return v.entries
    return tuple(_check_sign(int(s)) for s in v)


def sign_leq(tau, rho) -> bool:
    """tau <= rho in the product order with 0 < - and 0 < +."""
    a, b = _entries(tau), _entries(rho)
    if len(a) != len(b):
        raise ValueError("length mismatch")
    return all(s == 0 or s == t for s, t in zip(a, b))


def sign_orthogonal(tau, rho) -> bool:
    """Can vectors with these sign patterns have zero inner product?"""
    a, b = _entries(tau), _entries(rho)
    if len(a) != len(b):
        raise ValueError("length mismatch")
    products = [s * t for s, t in zip(a, b)]
    if all(p == 0 for p in products):
        return True
    return 1 in products and -1 in products


# ---------------------------------------------------------------------------
# sign sets

SignSet = FrozenSet[Sign]

_TOKEN_OF_SET = {
    frozenset(): "!",  # unsatisfiable entry; not parseable, only printable
    frozenset({0}): "0",
    frozenset({-1}): "-",
    frozenset({1}): "+",
    frozenset({-1, 0}): "-0",
    frozenset({0, 1}): "0+",
    frozenset({-1, 1}): "-+",
    frozenset({-1, 0, 1}): "*",
}
_SET_OF_TOKEN = {tok: s for s, tok in _TOKEN_OF_SET.items() if tok != "!"}


_CHAR_SIGNS = {"-": -1, "0": 0, "+": 1}


def parse_sign_set(token: str) -> SignSet:
    """Canonical tokens are 0 - + -0 0+ -+ *, but any character order works."""
    if token == "*":
        return frozenset({-1, 0, 1})
    if token and all(c in _CHAR_SIGNS for c in token) and len(set(token)) == len(token):
        return frozenset(_CHAR_SIGNS[c] for c in token)
    raise ValueError(
        f"bad sign-set token {token!r} (expected one of 0 - + -0 0+ -+ *)"
    )


def format_sign_set(s: SignSet) -> str:
    try:
        return _TOKEN_OF_SET[frozenset(s)]
    except KeyError:
        raise ValueError(f"not a sign set: {s!r}") from None


ALL_SIGN_SETS: tuple[SignSet, ...] = (
    frozenset({0}),
    frozenset({-1}),
    frozenset({1}),
    frozenset({-1, 0}),
    frozenset({0, 1}),
    frozenset({-1, 1}),
    frozenset({-1, 0, 1}),
)


def _achievable_products(w_i: SignSet, rho_i: Sign) -> frozenset:
    return frozenset(s * rho_i for s in w_i)


def signset_row_orthogonal(w_row: Sequence[SignSet], rho) -> bool:
    """Is some tau with tau_i in w_row[i] orthogonal to rho?

    Per coordinate the achievable products s * rho_i form a set; a valid tau
    needs either product 0 everywhere, or two distinct coordinates delivering
    -1 and +1 (remaining coordinates are then unconstrained).
    """
    r = _entries(rho)
    if len(w_row) != len(r):
        raise ValueError("length mismatch")
    prods = [_achievable_products(w, s) for w, s in zip(w_row, r)]
    if all(0 in p for p in prods):
        return True
    neg = [i for i, p in enumerate(prods) if -1 in p]
    pos = [i for i, p in enumerate(prods) if 1 in p]
    for i in neg:
        for j in pos:
            if i != j:
                return True
    return False


def signset_row_orthogonal_witness(w_row: Sequence[SignSet], rho) -> Optional[SignVector]:
    """A concrete tau in the row's sign sets with tau . rho = 0, or None.

    Deterministic: the all-zero-products choice is preferred; otherwise the
    lexicographically first coordinate pair supplying -1 and +1 is used and the
    rest aim for product 0 where possible.
    """
    r = _entries(rho)
    if len(w_row) != len(r):
        raise ValueError("length mismatch")
    prods = [_achievable_products(w, s) for w, s in zip(w_row, r)]

    def pick_for_product(w: SignSet, rho_i: Sign, target: Sign) -> Sign:
        choices = sorted(s for s in w if s * rho_i == target)
        return choices[0]

    if all(0 in p for p in prods):
        return SignVector(tuple(pick_for_product(w, s, 0) for w, s in zip(w_row, r)))
    neg = [i for i, p in enumerate(prods) if -1 in p]
    pos = [i for i, p in enumerate(prods) if 1 in p]
    for i in neg:
        for j in pos:
            if i == j:
                continue
            out = []
            for k, (w, s) in enumerate(zip(w_row, r)):
                if k == i:
                    out.append(pick_for_product(w, s, -1))
                elif k == j:
                    out.append(pick_for_product(w, s, 1))
                elif 0 in prods[k]:
                    out.append(pick_for_product(w, s, 0))
                else:
                    out.append(sorted(w)[0])
            return SignVector(tuple(out))
    return None


def all_sign_vectors(n: int, include_zero: bool = False) -> Iterable[SignVector]:
    """All sign vectors of length n in lexicographic order (-1 < 0 < +1)."""
    import itertools

    for combo in itertools.product((-1, 0, 1), repeat=n):
        if not include_zero and all(s == 0 for s in combo):
            continue
        yield SignVector(combo)

"""Bit-exact names for rationals, tuples and basic open sets.

The representation maps finite binary strings onto basic opens:

* naturals use Elias-gamma on n+1 (self-delimiting),
* a rational p/q is sign bit + gamma(|p|) + gamma(q-1), lowest terms only,
* pair(x, y) doubles every bit of x, then the delimiter "01", then y,
* a ball name is pair(center-code, radius-code) with the center tuple
  nested left-associatively.

Every name parses in one deterministic pass, so membership in the domain of
the representation is decidable and each ball has exactly one name.  The
canonical order on basic opens (and on rationals) is name length, then the
bits lexicographically; every "first set such that ..." in the game layer
resolves against this order.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import gcd
from typing import Callable, Iterator, Optional

from .topology import (
    EUCLIDEAN,
    TORUS,
    BasicOpen,
    Space,
    covered_by_union,
    disjoint,
    intersect_enumerate,
    subset,
)

Q = Fraction


class MalformedName(ValueError):
    """The string is not in the domain of the representation."""


class NonPositiveRadius(ValueError):
    """The name parses but encodes an empty ball (radius <= 0)."""


class SearchBudgetExceeded(RuntimeError):
    """A canonical-order search ran past its length guard."""


# ---------------------------------------------------------------------------
# Scalar codes
# ---------------------------------------------------------------------------


def encode_nat(n: int) -> str:
    """Elias-gamma code of n+1: (len-1) zeros, then bin(n+1)."""
    if n < 0:
        raise ValueError("encode_nat needs n >= 0")
    bits = bin(n + 1)[2:]
    return "0" * (len(bits) - 1) + bits


def _decode_nat(bits: str, pos: int) -> tuple[int, int]:
    zeros = 0
    while pos + zeros < len(bits) and bits[pos + zeros] == "0":
        zeros += 1
    start = pos + zeros
    end = start + zeros + 1
    if end > len(bits) or start >= len(bits):
        raise MalformedName("truncated natural")
    return int(bits[start:end], 2) - 1, end


def decode_nat(bits: str) -> int:
    n, end = _decode_nat(bits, 0)
    if end != len(bits):
        raise MalformedName("trailing bits after natural")
    return n


def encode_rational(q: Q) -> str:
    q = Q(q)
    sign = "1" if q < 0 else "0"
    return sign + encode_nat(abs(q.numerator)) + encode_nat(q.denominator - 1)


def _decode_rational(bits: str, pos: int) -> tuple[Q, int]:
    if pos >= len(bits):
        raise MalformedName("empty rational")
    negative = bits[pos] == "1"
    num, pos = _decode_nat(bits, pos + 1)
    den_minus, pos = _decode_nat(bits, pos)
    den = den_minus + 1
    if gcd(num, den) != 1:
        raise MalformedName("rational not in lowest terms")
    if negative and num == 0:
        raise MalformedName("negative zero")
    return Q(-num if negative else num, den), pos


def decode_rational(bits: str) -> Q:
    value, end = _decode_rational(bits, 0)
    if end != len(bits):
        raise MalformedName("trailing bits after rational")
    return value


def encode_pair(x: str, y: str) -> str:
    return "".join(b + b for b in x) + "01" + y


def decode_pair(w: str) -> tuple[str, str]:
    """Inverse of encode_pair; raises MalformedName off the grammar."""
    x_bits = []
    pos = 0
    while True:
        chunk = w[pos : pos + 2]
        if len(chunk) < 2:
            raise MalformedName("no pair delimiter")
        if chunk == "01":
            return "".join(x_bits), w[pos + 2 :]
        if chunk == "00":
            x_bits.append("0")
        elif chunk == "11":
            x_bits.append("1")
        else:
            raise MalformedName("broken doubled bit")
        pos += 2


def encode_tuple(codes: list[str]) -> str:
    """Left-associative pair nesting of one or more component codes."""
    out = codes[0]
    for code in codes[1:]:
        out = encode_pair(out, code)
    return out


def rational_code_length(q: Q) -> int:
    q = Q(q)
    return (
        1
        + 2 * (abs(q.numerator) + 1).bit_length()
        - 1
        + 2 * q.denominator.bit_length()
        - 1
    )


# ---------------------------------------------------------------------------
# The representation of basic opens
# ---------------------------------------------------------------------------


def ball_name(ball: BasicOpen) -> str:
    center = encode_tuple([encode_rational(c) for c in ball.center])
    return encode_pair(center, encode_rational(ball.radius))


def _decode_center(space: Space, code: str) -> tuple[Q, ...]:
    coords: list[str] = [code]
    for _ in range(space.dim - 1):
        head, tail = decode_pair(coords.pop())
        coords.append(head)
        coords.append(tail)
    values = tuple(decode_rational(c) for c in coords)
    if space.kind == TORUS and any(c < 0 or c >= 1 for c in values):
        raise MalformedName("torus center outside [0,1)")
    return values


def ball_from_name(space: Space, w: str) -> BasicOpen:
    """The partial inverse of the representation (nu)."""
    if not w or any(b not in "01" for b in w):
        raise MalformedName("names are non-empty binary strings")
    center_code, radius_code = decode_pair(w)
    center = _decode_center(space, center_code)
    radius = decode_rational(radius_code)
    if radius <= 0:
        raise NonPositiveRadius("a basic open must be non-empty")
    if space.kind == TORUS and radius >= Q(1, 2):
        raise MalformedName("torus radius must be < 1/2")
    return BasicOpen(space.kind, center, radius)


def in_domain(space: Space, w: str) -> bool:
    try:
        ball_from_name(space, w)
    except (MalformedName, NonPositiveRadius):
        return False
    return True


# ---------------------------------------------------------------------------
# Textual rendering of rationals ("p/q" everywhere, q >= 1 explicit)
# ---------------------------------------------------------------------------


def format_rational(q: Q) -> str:
    q = Q(q)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text: str) -> Q:
    """Accepts "p/q", integer literals, and finite decimal literals."""
    text = text.strip()
    if not text:
        raise ValueError("empty rational literal")
    try:
        value = Q(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational literal: {text!r}") from exc
    return value


def format_point(point) -> str:
    return " ".join(format_rational(c) for c in point)


# ---------------------------------------------------------------------------
# Canonical enumeration (length-lexicographic over the name grammar)
# ---------------------------------------------------------------------------

_RAT_CACHE: dict[int, tuple[tuple[str, Q], ...]] = {}


def _gamma_values(s: int) -> range:
    """Naturals whose gamma code has length 2s+1."""
    return range((1 << s) - 1, (1 << (s + 1)) - 1)


def rational_codes_of_length(length: int) -> tuple[tuple[str, Q], ...]:
    """All (code, value) pairs of rational codes with this exact length,
    sorted by code."""
    if length in _RAT_CACHE:
        return _RAT_CACHE[length]
    found = []
    if length >= 3 and length % 2 == 1:
        for t in range((length - 1) // 2):
            s = (length - 3 - 2 * t) // 2
            if s < 0:
                continue
            for den_minus in _gamma_values(t):
                den = den_minus + 1
                for num in _gamma_values(s):
                    if gcd(num, den) != 1:
                        continue
                    for sign in ("0", "1"):
                        if sign == "1" and num == 0:
                            continue
                        value = Q(-num if sign == "1" else num, den)
                        code = sign + encode_nat(num) + encode_nat(den - 1)
                        found.append((code, value))
    result = tuple(sorted(found))
    _RAT_CACHE[length] = result
    return result


def iter_rationals(predicate: Optional[Callable[[Q], bool]] = None) -> Iterator[Q]:
    """Rationals in canonical (code length, code bits) order."""
    for length in itertools.count(3, 2):
        for _, value in rational_codes_of_length(length):
            if predicate is None or predicate(value):
                yield value


def _rationals_of_length_in(
    length: int, lo: Q, hi: Q, lo_strict: bool, hi_strict: bool
) -> list[tuple[str, Q]]:
    """(code, value) pairs of this code length with value in the interval.

    Enumerates candidate numerators directly from the interval, so it stays
    cheap even when the admissible values have large denominators.
    """
    if length < 3 or length % 2 == 0 or lo > hi:
        return []
    found = []
    for t in range((length - 1) // 2):
        s = (length - 3 - 2 * t) // 2
        if s < 0:
            continue
        num_lo, num_hi = (1 << s) - 1, (1 << (s + 1)) - 2
        for den_minus in _gamma_values(t):
            den = den_minus + 1
            p_min = _ceil_div(lo * den, lo_strict)
            p_max = _floor_div(hi * den, hi_strict)
            for p in range(p_min, p_max + 1):
                if not num_lo <= abs(p) <= num_hi:
                    continue
                if gcd(abs(p), den) != 1:
                    continue
                value = Q(p, den)
                sign = "1" if p < 0 else "0"
                code = sign + encode_nat(abs(p)) + encode_nat(den - 1)
                found.append((code, value))
    return found


def _ceil_div(bound: Q, strict: bool) -> int:
    n = -((-bound.numerator) // bound.denominator)  # ceil
    if strict and n == bound:
        n += 1
    return n


def _floor_div(bound: Q, strict: bool) -> int:
    n = bound.numerator // bound.denominator  # floor
    if strict and n == bound:
        n -= 1
    return n


def _center_codes_of_length(space: Space, dim: int, length: int):
    """(code, coords tuple) of the exact length; unfiltered, cached."""
    key = (space.kind, dim, length)
    if key in _CENTER_CACHE:
        return _CENTER_CACHE[key]
    if dim == 1:
        items = [
            (code, (value,))
            for code, value in rational_codes_of_length(length)
            if space.kind != TORUS or 0 <= value < 1
        ]
    else:
        items = []
        for head_len in range(3, (length - 2 - 3) // 2 + 1):
            tail_len = length - 2 * head_len - 2
            heads = _center_codes_of_length(space, dim - 1, head_len)
            if not heads:
                continue
            for tail_code, tail_value in rational_codes_of_length(tail_len):
                if space.kind == TORUS and not 0 <= tail_value < 1:
                    continue
                for head_code, head_coords in heads:
                    items.append(
                        (encode_pair(head_code, tail_code), head_coords + (tail_value,))
                    )
    result = tuple(items)
    _CENTER_CACHE[key] = result
    return result


_CENTER_CACHE: dict[tuple, tuple] = {}
_NAMES_CACHE: dict[tuple, tuple] = {}


def names_of_length(space: Space, length: int) -> tuple[tuple[str, BasicOpen], ...]:
    """All valid ball names of exactly this length, sorted by bits."""
    key = (space.kind, space.dim, length)
    if key in _NAMES_CACHE:
        return _NAMES_CACHE[key]
    found = []
    for center_len in range(3, (length - 2 - 3) // 2 + 1):
        radius_len = length - 2 * center_len - 2
        radii = [
            (code, value)
            for code, value in rational_codes_of_length(radius_len)
            if value > 0 and (space.kind != TORUS or value < Q(1, 2))
        ]
        if not radii:
            continue
        for center_code, coords in _center_codes_of_length(space, space.dim, center_len):
            for radius_code, radius in radii:
                name = encode_pair(center_code, radius_code)
                found.append((name, BasicOpen(space.kind, coords, radius)))
    result = tuple(sorted(found, key=lambda item: item[0]))
    _NAMES_CACHE[key] = result
    return result


def iter_names(space: Space) -> Iterator[tuple[str, BasicOpen]]:
    """All valid names in canonical (length, bits) order; infinite."""
    for length in itertools.count(1):
        yield from names_of_length(space, length)


def iter_balls(space: Space) -> Iterator[BasicOpen]:
    for _, ball in iter_names(space):
        yield ball


def canonical_index_in_region(space: Space, target: BasicOpen, limit: int) -> int:
    """1-based position of the first canonical ball inside `target` within
    the enumeration of canonical balls lying in the space's region.

    Scans at most `limit` region balls; raises SearchBudgetExceeded beyond.
    """
    count = 0
    for _, ball in iter_names(space):
        if space.region is not None and not covered_by_union(ball, space.region):
            continue
        count += 1
        if subset(ball, target):
            return count
        if count >= limit:
            raise SearchBudgetExceeded(
                f"no canonical ball inside target among first {limit} region balls"
            )
    raise AssertionError("unreachable: the canonical enumeration is infinite")


# ---------------------------------------------------------------------------
# Canonical nested-ball search (used by the chain machinery)
# ---------------------------------------------------------------------------


def _wrapped_center_windows(kind: str, c0: Q, slack: Q) -> list[tuple[Q, Q]]:
    """Closed coordinate windows |c - c0| <= slack, split into linear pieces
    inside [0,1) on the torus."""
    if kind != TORUS:
        return [(c0 - slack, c0 + slack)]
    if 2 * slack >= 1:
        return [(Q(0), Q(1))]
    lo, hi = c0 - slack, c0 + slack
    pieces = []
    for shift in (-1, 0, 1):
        a, b = max(lo + shift, Q(0)), min(hi + shift, Q(1))
        if a <= b:
            pieces.append((a, b))
    return pieces


def _centers_of_length_within(
    space: Space, dim: int, length: int, c0: tuple[Q, ...], slack: Q
) -> list[tuple[str, tuple[Q, ...]]]:
    """Center codes of the given total length whose coordinates all satisfy
    the subset constraint |c_i - c0_i| <= slack (wrapped on the torus)."""
    if dim == 1:
        out = []
        for lo, hi in _wrapped_center_windows(space.kind, c0[0], slack):
            hi_strict = space.kind == TORUS and hi == 1
            out.extend(
                (code, (value,))
                for code, value in _rationals_of_length_in(
                    length, lo, hi, False, hi_strict
                )
            )
        return out
    items = []
    for head_len in range(3, (length - 2 - 3) // 2 + 1):
        tail_len = length - 2 * head_len - 2
        heads = _centers_of_length_within(space, dim - 1, head_len, c0[:-1], slack)
        if not heads:
            continue
        tails = _centers_of_length_within(
            Space(space.kind, 1), 1, tail_len, (c0[-1],), slack
        )
        for head_code, head_coords in heads:
            for tail_code, (tail_value,) in tails:
                items.append(
                    (encode_pair(head_code, tail_code), head_coords + (tail_value,))
                )
    return items


def _nested_names_of_length(
    space: Space, within: BasicOpen, length: int
) -> list[tuple[str, BasicOpen]]:
    found = []
    half = Q(1, 2)
    for center_len in range(3, (length - 2 - 3) // 2 + 1):
        radius_len = length - 2 * center_len - 2
        radii = [
            (code, value)
            for code, value in _rationals_of_length_in(
                radius_len, Q(0), within.radius, True, False
            )
            if space.kind != TORUS or value < half
        ]
        for radius_code, radius in radii:
            slack = within.radius - radius
            for center_code, coords in _centers_of_length_within(
                space, space.dim, center_len, within.center, slack
            ):
                name = encode_pair(center_code, radius_code)
                found.append((name, BasicOpen(space.kind, coords, radius)))
    return sorted(found, key=lambda item: item[0])


_NESTED_CACHE: dict[tuple, list] = {}


def first_nested(
    space: Space, within: BasicOpen, count: int, max_extra: int = 48
) -> list[BasicOpen]:
    """The first `count` basic opens contained in `within`, in canonical
    name order.  The first entry is usually `within` itself."""
    key = (space.kind, space.dim, within)
    cached = _NESTED_CACHE.get(key, [])
    if len(cached) < count:
        limit = len(ball_name(within)) + max_extra
        collected: list[BasicOpen] = []
        for length in range(1, limit + 1):
            for _, ball in _nested_names_of_length(space, within, length):
                collected.append(ball)
                if len(collected) >= count:
                    break
            if len(collected) >= count:
                break
        if len(collected) < count:
            raise SearchBudgetExceeded(
                f"fewer than {count} nested balls within name length {limit}"
            )
        cached = collected
        _NESTED_CACHE[key] = cached
    return cached[:count]


# ---------------------------------------------------------------------------
# Dovetailed non-emptiness of intersections (name level)
# ---------------------------------------------------------------------------


def intersects_semidecide(
    space: Space, u: str, v: str, fuel: int
) -> Optional[str]:
    """Search for a witness name w with nu(w) inside nu(u) ∩ nu(v).

    Returns the witness name, or None ("unknown") if the budget runs out.
    For ball spaces the relation is decidable, so a non-empty intersection
    is always found with fuel >= 1.
    """
    a = ball_from_name(space, u)
    b = ball_from_name(space, v)
    if fuel >= 1 and not disjoint(a, b):
        witness = next(intersect_enumerate(a, b))
        return ball_name(witness)
    return None

"""Shared instance generators and independent brute-force oracles.

The oracles recompute quantities straight from the definitions — Fractions
plus exhaustive enumeration over fixed-length strings — so they share no
code with the package's closed-form or incremental paths.  Generators are
driven by ``random.Random`` so both the property tests and the seeded
acceptance batches can use them deterministically.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from semimeasures import (
    Component,
    Dyadic,
    EPSILON,
    HALF,
    ONE,
    SemiMeasureStage,
    TailRule,
    ZERO,
    all_strings,
    leading_ones,
    strings_up_to,
)

Pair = tuple[str, str]


def as_fraction(d: Dyadic) -> Fraction:
    return Fraction(d.numerator, 2**d.exponent)


def from_fraction(fr: Fraction) -> Dyadic:
    exp = fr.denominator.bit_length() - 1
    if (1 << exp) != fr.denominator:
        raise ValueError(f"not dyadic: {fr}")
    return Dyadic(fr.numerator, exp)


# -- randomized instances -------------------------------------------------------


def random_dyadic(rng: random.Random, at_most: Dyadic, extra_exponent: int = 2) -> Dyadic:
    """Uniform draw from the dyadic grid refining ``at_most`` by extra bits."""
    cap = at_most.numerator << extra_exponent
    return Dyadic(rng.randint(0, cap), at_most.exponent + extra_exponent)


def random_table(
    rng: random.Random,
    depth: int,
    root: Dyadic = ONE,
    extra_exponent: int = 1,
    additive: bool = False,
) -> dict[str, Dyadic]:
    """Random super-additive (or exactly additive) table of the given depth."""
    table = {EPSILON: root}
    for node in strings_up_to(depth - 1) if depth > 0 else ():
        v = table[node]
        cap = v.numerator << extra_exponent
        exp = v.exponent + extra_exponent
        a = rng.randint(0, cap)
        b = (cap - a) if additive else rng.randint(0, cap - a)
        table[node + "0"] = Dyadic(a, exp)
        table[node + "1"] = Dyadic(b, exp)
    return table


def random_tail(rng: random.Random, conserving: bool | None = None) -> TailRule:
    if conserving is True:
        choices = ["uniform", "split-conserving"]
    elif conserving is False:
        choices = ["vanish", "geometric", "split"]
    else:
        choices = ["vanish", "uniform", "geometric", "split", "split-conserving"]
    kind = rng.choice(choices)
    if kind == "vanish":
        return TailRule.vanish()
    if kind == "uniform":
        return TailRule.uniform()
    if kind == "geometric":
        return TailRule.geometric(Dyadic(rng.randint(0, 4), 3))
    zero = Dyadic(rng.randint(0, 8), 3)
    if kind == "split-conserving":
        return TailRule.split(zero, ONE - zero)
    used = zero.numerator << (3 - zero.exponent)  # zero in eighths (exponent <= 3 after canonicalisation)
    one = Dyadic(rng.randint(0, 8 - used), 3)
    return TailRule.split(zero, one)


def random_component(
    rng: random.Random,
    weight: Dyadic = ONE,
    depth: int = 2,
    extra_exponent: int = 1,
    tilt: int = 0,
    conserving: bool | None = None,
) -> Component:
    table = random_table(rng, depth, extra_exponent=extra_exponent)
    tails = {node: random_tail(rng, conserving) for node in all_strings(depth)}
    return Component.build(weight, table, tails=tails, tilt=tilt)


def random_stage(
    rng: random.Random,
    depth: int = 2,
    strict: bool = True,
    parts: int | None = None,
    tilt_allowed: bool = False,
    conserving: bool | None = None,
) -> SemiMeasureStage:
    parts = parts if parts is not None else rng.choice([1, 2])
    weights = [ONE] if parts == 1 else [HALF, HALF]
    comps = []
    for w in weights:
        tilt = rng.choice([0, 0, 1]) if tilt_allowed else 0
        comps.append(
            random_component(rng, weight=w, depth=depth, tilt=tilt, conserving=conserving)
        )
    return SemiMeasureStage(tuple(comps), strict=strict)


def random_antichain(rng: random.Random, max_len: int = 5, draws: int = 5) -> tuple[str, ...]:
    kept: list[str] = []
    for _ in range(draws):
        n = rng.randint(1, max_len)
        s = "".join(rng.choice("01") for _ in range(n))
        if not any(s.startswith(k) or k.startswith(s) for k in kept):
            kept.append(s)
    return tuple(sorted(kept, key=lambda s: (len(s), s)))


def random_bits(rng: random.Random, max_len: int = 8) -> str:
    return "".join(rng.choice("01") for _ in range(rng.randint(0, max_len)))


# -- oracles ---------------------------------------------------------------------


def oracle_component_value(comp: Component, sigma: str) -> Fraction:
    """Component value from the raw definition, in Fractions."""
    if len(sigma) <= comp.depth:
        base = as_fraction(comp.table[sigma])
    else:
        node = sigma[: comp.depth]
        rule = comp.tails[node]
        base = as_fraction(comp.table[node])
        for b in sigma[comp.depth :]:
            base *= as_fraction(rule.zero if b == "0" else rule.one)
    return base / 2 ** (comp.tilt * leading_ones(sigma))


def oracle_stage_value(stage: SemiMeasureStage, sigma: str) -> Fraction:
    return sum(
        (as_fraction(c.weight) * oracle_component_value(c, sigma) for c in stage.components),
        Fraction(0),
    )


def oracle_level_sum(value: Callable[[str], Dyadic], sigma: str, n: int) -> Fraction:
    """Brute-force sum of values over all length-n extensions of sigma."""
    return sum(
        (as_fraction(value(sigma + tail)) for tail in all_strings(n - len(sigma))),
        Fraction(0),
    )


def oracle_functional_eval(pairs: Iterable[Pair], x: str) -> str:
    """Longest output among pairs whose input is a prefix of x."""
    best = EPSILON
    for i, o in pairs:
        if x.startswith(i) and len(o) > len(best):
            best = o
    return best


def oracle_induced_mass(pairs: Sequence[Pair], tau: str, resolution: int | None = None) -> Fraction:
    """Counting-measure version of the induced semi-measure.

    Counts the strings of a fixed length lying in some input cylinder whose
    pair's output extends tau; dividing by the count of all such strings
    gives the measure of the preimage union.
    """
    length = resolution
    if length is None:
        length = max((len(i) for i, _o in pairs), default=0)
    length = max(length, 1)
    hits = sum(
        1
        for x in all_strings(length)
        if any(x.startswith(i) and o.startswith(tau) for i, o in pairs)
    )
    return Fraction(hits, 1 << length)


def oracle_cylinder_leaves(members: Iterable[str], depth: int) -> set[str]:
    """All length-``depth`` strings whose cylinder lies in the member union."""
    pool = list(members)
    assert all(len(m) <= depth for m in pool), "resolution must cover every member"
    return {x for x in all_strings(depth) if any(x.startswith(m) for m in pool)}


def oracle_intersection_leaves(sets: Sequence[Iterable[str]], depth: int) -> set[str]:
    common = None
    for members in sets:
        leaves = oracle_cylinder_leaves(members, depth)
        common = leaves if common is None else (common & leaves)
    return common if common is not None else set()


def oracle_set_mass(value: Callable[[str], Dyadic], members: Iterable[str]) -> Fraction:
    from semimeasures import prefix_free_normalize

    return sum((as_fraction(value(m)) for m in prefix_free_normalize(members)), Fraction(0))

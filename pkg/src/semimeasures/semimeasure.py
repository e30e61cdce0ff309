"""Finitely presented semi-measures on the binary tree, and staged families.

A presentation is a finite mixture of components.  Each component is a
complete table of values on all strings of length <= depth together with a
tail rule per frontier node; the tail rule fixes the values everywhere below
the frontier, so evaluation is total.  A tail rule sends the fractions
``zero`` and ``one`` of a node's mass to its two children, uniformly on the
whole subtree; ``zero + one <= 1`` keeps super-additivity automatic below
the frontier.  The named special cases:

    vanish        (0, 0)      all mass dies at the frontier
    uniform       (1/2, 1/2)  Lebesgue splitting
    geometric(b)  (b, b)      symmetric decay, 0 <= b <= 1/2
    split(z, o)   (z, o)      directional, e.g. (0, 1) is a point mass spine

A component may additionally carry a "ones tilt": its value at sigma is
multiplied by 2**(-tilt * j) where j is the length of the maximal all-ones
prefix of sigma.  The factor only shrinks along the 1-spine, so validity is
preserved; exact trimming is not available for tilted components.

Super-additivity -- value(s) >= value(s0) + value(s1) at every node -- is
asserted by :func:`validate`, never assumed.  A presentation is *strict*
when it claims root mass exactly 1.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Iterable, Mapping, Sequence

from .dyadic import Dyadic, HALF, ONE, ZERO
from .errors import PreconditionError
from .strings import (
    EPSILON,
    StagedFamily,
    all_strings,
    check_bits,
    leading_ones,
    prefix_free_normalize,
    sort_key,
    strings_up_to,
)


@dataclass(frozen=True)
class TailRule:
    """Per-child mass fractions applied uniformly below a frontier node."""

    zero: Dyadic
    one: Dyadic

    @classmethod
    def vanish(cls) -> "TailRule":
        return cls(ZERO, ZERO)

    @classmethod
    def uniform(cls) -> "TailRule":
        return cls(HALF, HALF)

    @classmethod
    def geometric(cls, beta: Dyadic) -> "TailRule":
        if not ZERO <= beta <= HALF:
            raise ValueError("geometric ratio must lie in [0, 1/2]")
        return cls(beta, beta)

    @classmethod
    def split(cls, zero: Dyadic, one: Dyadic) -> "TailRule":
        return cls(zero, one)

    @property
    def total(self) -> Dyadic:
        return self.zero + self.one

    @property
    def conserving(self) -> bool:
        """True when no mass is lost below the frontier (total == 1)."""
        return self.total == ONE

    def factor(self, bit: str) -> Dyadic:
        return self.zero if bit == "0" else self.one

    @property
    def kind(self) -> str:
        if self.zero == self.one:
            if self.zero == ZERO:
                return "vanish"
            if self.zero == HALF:
                return "uniform"
            return "geometric"
        return "split"


@dataclass(frozen=True)
class Component:
    """One summand of a presentation: weight * (table + tails [+ tilt])."""

    weight: Dyadic
    depth: int
    table: Mapping[str, Dyadic]
    tails: Mapping[str, TailRule]
    tilt: int = 0

    @classmethod
    def build(
        cls,
        weight: Dyadic,
        table: Mapping[str, Dyadic],
        tail: TailRule | None = None,
        tails: Mapping[str, TailRule] | None = None,
        tilt: int = 0,
    ) -> "Component":
        """Structural constructor: checks table completeness and fills tails.

        ``tail`` applies one rule to every frontier node; ``tails`` gives a
        per-node map (missing nodes fall back to ``tail`` or vanish).
        """
        keys = {check_bits(k) for k in table}
        depth = max((len(k) for k in keys), default=0)
        expected = set(strings_up_to(depth))
        if keys != expected:
            missing = sorted(expected - keys, key=sort_key)[:3]
            raise ValueError(f"table must cover every string of length <= {depth}; missing {missing}")
        default = tail if tail is not None else TailRule.vanish()
        tail_map = {}
        for node in all_strings(depth):
            rule = tails.get(node, default) if tails is not None else default
            tail_map[node] = rule
        if tails is not None:
            extra = set(tails) - set(tail_map)
            if extra:
                raise ValueError(f"tail rules for non-frontier nodes: {sorted(extra)}")
        if tilt < 0:
            raise ValueError("tilt power must be non-negative")
        return cls(weight=weight, depth=depth, table=dict(table), tails=tail_map, tilt=tilt)

    # -- evaluation (weight NOT included) --------------------------------

    def _plain_value(self, sigma: str) -> Dyadic:
        if len(sigma) <= self.depth:
            return self.table[sigma]
        frontier = sigma[: self.depth]
        v = self.table[frontier]
        rule = self.tails[frontier]
        for bit in sigma[self.depth :]:
            if v.is_zero:
                return ZERO
            v = v * rule.factor(bit)
        return v

    def _tilt_factor(self, sigma: str) -> Dyadic:
        if self.tilt == 0:
            return ONE
        return Dyadic.pow2(-self.tilt * leading_ones(sigma))

    def value(self, sigma: str) -> Dyadic:
        return self._plain_value(sigma) * self._tilt_factor(sigma)

    def _plain_level_sum(self, sigma: str, n: int) -> Dyadic:
        # sum of untilted values over all length-n extensions of sigma
        if n <= self.depth:
            total = ZERO
            for tail in all_strings(n - len(sigma)):
                total = total + self.table[sigma + tail]
            return total
        if len(sigma) >= self.depth:
            rule = self.tails[sigma[: self.depth]]
            return self._plain_value(sigma) * rule.total ** (n - len(sigma))
        total = ZERO
        for tail in all_strings(self.depth - len(sigma)):
            frontier = sigma + tail
            total = total + self.table[frontier] * self.tails[frontier].total ** (n - self.depth)
        return total

    def level_sum(self, sigma: str, n: int) -> Dyadic:
        """Sum of values over all extensions of sigma at length exactly n."""
        if n < len(sigma):
            raise ValueError("level must not be above the string")
        if self.tilt == 0:
            return self._plain_level_sum(sigma, n)
        if "0" in sigma:
            # the all-ones prefix is frozen below sigma
            return self._tilt_factor(sigma) * self._plain_level_sum(sigma, n)
        # sigma lies on the 1-spine: split off the spine step by step
        if n == len(sigma):
            return self.value(sigma)
        return self.level_sum(sigma + "0", n) + self.level_sum(sigma + "1", n)


@dataclass(frozen=True)
class SemiMeasureStage:
    """A finite mixture of components; ``strict`` claims root mass 1."""

    components: tuple[Component, ...]
    strict: bool = True

    def value(self, sigma: str) -> Dyadic:
        check_bits(sigma)
        total = ZERO
        for comp in self.components:
            total = total + comp.weight * comp.value(sigma)
        return total

    def level_mass(self, sigma: str, n: int) -> Dyadic:
        total = ZERO
        for comp in self.components:
            total = total + comp.weight * comp.level_sum(sigma, n)
        return total

    def set_mass(self, strings: Iterable[str]) -> Dyadic:
        """Mass of a string set: normalise to an antichain, then sum values."""
        total = ZERO
        for s in prefix_free_normalize(strings):
            total = total + self.value(s)
        return total

    @property
    def max_depth(self) -> int:
        return max((c.depth for c in self.components), default=0)

    def scaled(self, factor: Dyadic) -> "SemiMeasureStage":
        comps = tuple(replace(c, weight=factor * c.weight) for c in self.components)
        return SemiMeasureStage(comps, strict=False)


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    node: str | None = None
    message: str = ""
    children: tuple[Dyadic, Dyadic] | None = None

    def __bool__(self) -> bool:  # pragma: no cover - convenience
        return self.ok


_OK = ValidationReport(ok=True)


def validate(stage: SemiMeasureStage) -> ValidationReport:
    """Check the semi-measure axioms on the whole presentation.

    Structure first (complete tables, admissible tail fractions), then the
    root constraint, then super-additivity of the mixture at every table
    node.  Below the deepest frontier the per-component bound
    zero + one <= 1 makes the inequality automatic, so finite checking
    suffices.  Returns the first violation found, in (length, lex) order.
    """
    for idx, comp in enumerate(stage.components):
        if comp.weight < ZERO:
            return ValidationReport(False, message=f"component {idx}: negative weight")
        keys = set(comp.table)
        if keys != set(strings_up_to(comp.depth)):
            return ValidationReport(False, message=f"component {idx}: incomplete table")
        for node, v in comp.table.items():
            if v < ZERO:
                return ValidationReport(False, node=node, message=f"component {idx}: negative value")
        if set(comp.tails) != set(all_strings(comp.depth)):
            return ValidationReport(False, message=f"component {idx}: tail map must cover the frontier")
        for node, rule in comp.tails.items():
            if rule.zero < ZERO or rule.one < ZERO or rule.total > ONE:
                return ValidationReport(
                    False, node=node, message=f"component {idx}: tail fractions must be >= 0 and sum to <= 1"
                )
        if comp.tilt < 0:
            return ValidationReport(False, message=f"component {idx}: negative tilt")

    root = stage.value(EPSILON)
    if stage.strict and root != ONE:
        return ValidationReport(False, node=EPSILON, message=f"strict presentation has root mass {root}")
    if root > ONE:
        return ValidationReport(False, node=EPSILON, message=f"root mass {root} exceeds 1")

    for node in strings_up_to(max(stage.max_depth - 1, 0)) if stage.max_depth > 0 else ():
        parent = stage.value(node)
        left = stage.value(node + "0")
        right = stage.value(node + "1")
        if left + right > parent:
            return ValidationReport(
                False,
                node=node,
                message=f"super-additivity fails at {node!r}: {left} + {right} > {parent}",
                children=(left, right),
            )
    return _OK


def validate_measure(stage: SemiMeasureStage) -> ValidationReport:
    """Like :func:`validate` but demanding exact additivity and conserving tails."""
    rep = validate(stage)
    if not rep.ok:
        return rep
    for comp in stage.components:
        for node, rule in comp.tails.items():
            if not rule.conserving and comp.table[node] != ZERO:
                return ValidationReport(False, node=node, message="tail loses mass at a charged frontier node")
    for node in strings_up_to(max(stage.max_depth - 1, 0)) if stage.max_depth > 0 else ():
        parent = stage.value(node)
        both = stage.value(node + "0") + stage.value(node + "1")
        if both != parent:
            return ValidationReport(False, node=node, message=f"additivity fails at {node!r}")
    return _OK


# -- stock presentations ----------------------------------------------------


def uniform_measure(depth: int = 0) -> SemiMeasureStage:
    """The fair-coin measure: value 2^-|sigma| everywhere."""
    table = {s: Dyadic.pow2(-len(s)) for s in strings_up_to(depth)}
    comp = Component.build(ONE, table, tail=TailRule.uniform())
    return SemiMeasureStage((comp,), strict=True)


def geometric_semimeasure(beta: Dyadic, depth: int = 0) -> SemiMeasureStage:
    """Root mass 1 decaying by ``beta`` per child: value beta^|sigma|."""
    rule = TailRule.geometric(beta)
    table = {s: beta ** len(s) for s in strings_up_to(depth)}
    comp = Component.build(ONE, table, tail=rule)
    return SemiMeasureStage((comp,), strict=True)


def dirac_spine(bit: str) -> SemiMeasureStage:
    """Point mass on the constant sequence bit^infinity."""
    if bit not in ("0", "1"):
        raise ValueError("bit must be '0' or '1'")
    rule = TailRule.split(ONE, ZERO) if bit == "0" else TailRule.split(ZERO, ONE)
    comp = Component.build(ONE, {EPSILON: ONE}, tail=rule)
    return SemiMeasureStage((comp,), strict=True)


def dirac_on_ones() -> SemiMeasureStage:
    return dirac_spine("1")


def table_semimeasure(table: Mapping[str, Dyadic], tail: TailRule | None = None,
                      tails: Mapping[str, TailRule] | None = None) -> SemiMeasureStage:
    """Single-component presentation from an explicit table."""
    comp = Component.build(ONE, table, tail=tail, tails=tails)
    stage = SemiMeasureStage((comp,), strict=table[EPSILON] == ONE)
    return stage


def tilt_by_ones(stage: SemiMeasureStage) -> SemiMeasureStage:
    """Multiply pointwise by 2^-j(sigma), j = length of the all-ones prefix.

    The factor never grows along any path, so validity is preserved; the
    strict flag is kept because the root factor is 1.
    """
    comps = tuple(replace(c, tilt=c.tilt + 1) for c in stage.components)
    return SemiMeasureStage(comps, strict=stage.strict)


def mix_stages(stages: Sequence[SemiMeasureStage], weights: Sequence[Dyadic]) -> SemiMeasureStage:
    """Weighted sum of presentations.  Weights must total at most 1."""
    if len(stages) != len(weights):
        raise ValueError("one weight per stage")
    total = ZERO
    for w in weights:
        if w < ZERO:
            raise ValueError("weights must be non-negative")
        total = total + w
    if total > ONE:
        raise PreconditionError(f"mixture weights total {total} > 1")
    comps: list[Component] = []
    for st, w in zip(stages, weights):
        comps.extend(st.scaled(w).components)
    mixed = SemiMeasureStage(tuple(comps), strict=False)
    if mixed.value(EPSILON) == ONE:
        mixed = SemiMeasureStage(mixed.components, strict=True)
    return mixed


# -- staged (left-c.e.) semi-measures ---------------------------------------


class LeftCeSemiMeasure:
    """Deterministic stage generator: stage_at(s) is a presentation and the
    values are pointwise non-decreasing in s (the caller's obligation,
    spot-checked in the test suite, never assumed silently elsewhere)."""

    def __init__(self, stage_fn: Callable[[int], SemiMeasureStage], descriptor: dict | None = None):
        self._fn = stage_fn
        self._cache: dict[int, SemiMeasureStage] = {}
        self.descriptor = descriptor

    def stage_at(self, s: int) -> SemiMeasureStage:
        if s < 0:
            raise ValueError("stage must be non-negative")
        if s not in self._cache:
            self._cache[s] = self._fn(s)
        return self._cache[s]

    def value(self, sigma: str, s: int) -> Dyadic:
        return self.stage_at(s).value(sigma)

    @classmethod
    def constant(cls, stage: SemiMeasureStage) -> "LeftCeSemiMeasure":
        return cls(lambda _s: stage, descriptor={"kind": "constant"})


def mixture(
    family: Sequence[LeftCeSemiMeasure],
    weights: Sequence[Dyadic] | None,
    stage: int,
) -> SemiMeasureStage:
    """Stage-s presentation of sum_e w_e * rho_e.

    Default weights are 2^-(e+1).  The result is generally non-strict.
    Component e is dominated: w_e * rho_e(sigma) <= mixture(sigma) pointwise,
    which :func:`check_domination` verifies on concrete strings.
    """
    if weights is None:
        weights = [Dyadic.pow2(-(e + 1)) for e in range(len(family))]
    return mix_stages([f.stage_at(stage) for f in family], list(weights))


def check_domination(
    mixed: SemiMeasureStage,
    part: SemiMeasureStage,
    weight: Dyadic,
    strings: Iterable[str],
) -> str | None:
    """Return a witness string where weight * part > mixed, or None."""
    for s in strings:
        if weight * part.value(s) > mixed.value(s):
            return s
    return None


# -- completion to a measure -------------------------------------------------


def complete_to_measure(stage: SemiMeasureStage, depth: int | None = None) -> SemiMeasureStage:
    """Smallest additive extension dominating the presentation.

    Each node's super-additivity defect g(s) = v(s) - v(s0) - v(s1) is pushed
    down the subtree in equal halves, which makes the completed table additive
    while never falling below the original values.  The construction is linear
    in the presentation, so components are completed independently.  Below the
    frontier the lost tail fraction 1 - (zero + one) is likewise split evenly
    between the children, giving a conserving tail that still dominates the
    original one; for symmetric tails this reproduces the pushed-down values
    exactly (geometric(1/4) from the root completes to the fair coin, a spine
    completes to the point mass).
    """
    rep = validate(stage)
    if not rep.ok:
        raise PreconditionError(f"completion requires a valid presentation: {rep.message}")
    if not stage.strict or stage.value(EPSILON) != ONE:
        raise PreconditionError("completion requires a strict presentation")
    if any(c.tilt for c in stage.components):
        raise PreconditionError("completion is not defined for tilted components")
    target = stage.max_depth if depth is None else depth
    if target < stage.max_depth:
        raise ValueError("completion depth must reach every component frontier")

    new_comps = []
    for comp in stage.components:
        values = {s: comp._plain_value(s) for s in strings_up_to(target)}
        mu: dict[str, Dyadic] = {EPSILON: values[EPSILON]}
        for node in strings_up_to(target - 1) if target > 0 else ():
            surplus = mu[node] - values[node + "0"] - values[node + "1"]
            mu[node + "0"] = values[node + "0"] + HALF * surplus
            mu[node + "1"] = values[node + "1"] + HALF * surplus
        new_tails = {}
        for node in all_strings(target):
            rule = comp.tails[node[: comp.depth]]
            pad = HALF * (ONE - rule.total)
            new_tails[node] = TailRule.split(rule.zero + pad, rule.one + pad)
        new_comps.append(
            Component(weight=comp.weight, depth=target, table=mu, tails=new_tails, tilt=0)
        )
    return SemiMeasureStage(tuple(new_comps), strict=True)


# -- infimum-scaled stages ---------------------------------------------------


Generator = Callable[[int], Dyadic]


def _as_generator(row) -> Generator:
    if callable(row):
        return row
    values = [v for v in row]

    def gen(s: int) -> Dyadic:
        return values[min(s, len(values) - 1)]

    return gen


def from_infimum_sequence(rows: Sequence, stage: int, depth: int) -> SemiMeasureStage:
    """Stage presentation of sigma -> 2^-|sigma| * min_{i <= |sigma|} r_i(stage).

    ``rows`` is a finite list of stage generators (callables or value lists,
    lists freezing at their last entry).  Indices past the end of ``rows``
    contribute nothing, so below depth len(rows) - 1 the minimum is frozen
    and the uniform tail reproduces the formula exactly; choose
    ``depth >= len(rows) - 1`` to get the exact presentation.
    """
    if not rows:
        raise ValueError("at least one generator row is required")
    gens = [_as_generator(r) for r in rows]
    vals = []
    for i, g in enumerate(gens):
        v = g(stage)
        if not isinstance(v, Dyadic) or v > ONE:
            raise ValueError(f"generator {i} must yield dyadics in [0, 1], got {v}")
        vals.append(v)
    table: dict[str, Dyadic] = {}
    running = vals[0]
    level_min = {0: running}
    for n in range(1, depth + 1):
        if n < len(vals):
            running = min(running, vals[n])
        level_min[n] = running
    for s in strings_up_to(depth):
        table[s] = Dyadic.pow2(-len(s)) * level_min[len(s)]
    comp = Component.build(ONE, table, tail=TailRule.uniform())
    return SemiMeasureStage((comp,), strict=vals[0] == ONE)


def infimum_semimeasure(rows: Sequence, depth: int) -> LeftCeSemiMeasure:
    frozen = [r if callable(r) else list(r) for r in rows]
    return LeftCeSemiMeasure(
        lambda s: from_infimum_sequence(frozen, s, depth),
        descriptor={"kind": "infimum"},
    )


# -- enumeration helpers ------------------------------------------------------


def enumerate_limsup(f, schedule: Sequence[int]) -> tuple[Dyadic, ...]:
    """Run the emission rule over a finite schedule of indices.

    At step s with index i = schedule[s], the value f(i, s) is emitted iff it
    has not been emitted before and f(i, s) < f(k, s) for every k < i.  ``f``
    may be a callable or an indexed table f[i][s].
    """
    call = f if callable(f) else (lambda i, s: f[i][s])
    emitted: list[Dyadic] = []
    seen: set[Dyadic] = set()
    for s, i in enumerate(schedule):
        v = call(i, s)
        if v in seen:
            continue
        if all(v < call(k, s) for k in range(i)):
            emitted.append(v)
            seen.add(v)
    return tuple(emitted)


def tail_max(values: Sequence[Dyadic], n: int) -> Dyadic:
    """Largest element of values[n:], i.e. the supremum of the finite tail."""
    if n < 0 or n >= len(values):
        raise IndexError("tail start out of range")
    best = values[n]
    for v in values[n + 1 :]:
        if v > best:
            best = v
    return best


# -- a semi-measure charging enumerated test levels --------------------------


def test_defeating_semimeasure(families: Sequence[StagedFamily], stage: int) -> SemiMeasureStage:
    """Charge level e+2 of each enumerated family with mass 2^-(e+1).

    For family e, if any string has entered level e+2 by ``stage``, the first
    entrant (earliest stage, ties by (length, lex)) gets value 2^-(e+1) on
    every prefix of itself and 0 elsewhere.  Leftover root mass goes into a
    slack component, so the result is strict.  Whenever the charged level is
    non-empty its mass under the result strictly exceeds 2^-(e+2).
    """
    comps: list[Component] = []
    used = ZERO
    for e, fam in enumerate(families):
        members = fam.level_at(e + 2, stage)
        if not members:
            continue
        chosen = min(members, key=lambda s: (fam.entry_stage(e + 2, s, stage), sort_key(s)))
        table = {s: (ONE if chosen.startswith(s) else ZERO) for s in strings_up_to(len(chosen))}
        comps.append(Component.build(Dyadic.pow2(-(e + 1)), table, tail=TailRule.vanish()))
        used = used + Dyadic.pow2(-(e + 1))
    slack = ONE - used
    if slack > ZERO:
        comps.append(Component.build(slack, {EPSILON: ONE}, tail=TailRule.vanish()))
    return SemiMeasureStage(tuple(comps), strict=True)


# -- a small registry used by demos and mixture tests -------------------------


def default_family(count: int = 8) -> tuple[LeftCeSemiMeasure, ...]:
    """Stock staged semi-measures for mixture demos; size is configurable."""
    quarter = Dyadic(1, 2)

    def growing_uniform(s: int) -> SemiMeasureStage:
        return uniform_measure().scaled(Dyadic.pow2(-max(0, 3 - s)))

    pool = [
        LeftCeSemiMeasure.constant(uniform_measure()),
        LeftCeSemiMeasure.constant(dirac_on_ones()),
        LeftCeSemiMeasure.constant(dirac_spine("0")),
        LeftCeSemiMeasure.constant(geometric_semimeasure(quarter)),
        LeftCeSemiMeasure.constant(
            mix_stages([uniform_measure(), geometric_semimeasure(quarter)], [HALF, HALF])
        ),
        infimum_semimeasure([[ONE], [HALF], [HALF]], depth=3),
        LeftCeSemiMeasure.constant(tilt_by_ones(uniform_measure())),
        LeftCeSemiMeasure(growing_uniform, descriptor={"kind": "ramp-uniform"}),
    ]
    if not 1 <= count <= len(pool):
        raise ValueError(f"registry size must be between 1 and {len(pool)}")
    return tuple(pool[:count])

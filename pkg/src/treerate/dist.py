"""Sparse exact joint distributions over named coordinates.

Probabilities are `fractions.Fraction` throughout, so support questions
(is this tuple possible at all?) are answered exactly.  Entropies and
mutual informations convert to floats only at the point where a base-2
logarithm is taken.

A coordinate is a pair ``("x", node)`` for a source observed at a tree
node or ``("w", node)`` for the message emitted by a node.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Any, Callable, Iterable, Mapping, Sequence

from .errors import GuardExceeded, InstanceError

Letter = Any
Coord = tuple[str, int]
Row = tuple

ZERO = Fraction(0)
ONE = Fraction(1)


def xcoord(node: int) -> Coord:
    return ("x", node)


def wcoord(node: int) -> Coord:
    return ("w", node)


def coord_key(coord: Coord):
    """Canonical coordinate order: sources first, then messages, by node id."""
    return (0 if coord[0] == "x" else 1, coord[1])


class JointTable:
    """Sparse pmf over an ordered tuple of coordinates; stores positive mass only."""

    __slots__ = ("coords", "alphabets", "probs", "_pos")

    def __init__(
        self,
        coords: Sequence[Coord],
        alphabets: Mapping[Coord, Sequence[Letter]],
        probs: Mapping[Row, Fraction],
        check: bool = True,
    ):
        self.coords = tuple(coords)
        self.alphabets = {c: tuple(alphabets[c]) for c in self.coords}
        self.probs: dict[Row, Fraction] = {}
        for row, p in probs.items():
            if p < 0:
                raise InstanceError(f"negative probability {p} for {row}")
            if p == 0:
                continue
            self.probs[tuple(row)] = Fraction(p)
        self._pos = {c: i for i, c in enumerate(self.coords)}
        if check:
            self._validate()

    def _validate(self):
        total = sum(self.probs.values(), ZERO)
        if total != 1:
            raise InstanceError(f"probabilities sum to {total}, expected exactly 1")
        for row in self.probs:
            if len(row) != len(self.coords):
                raise InstanceError(f"tuple {row} has wrong arity")
            for coord, letter in zip(self.coords, row):
                if letter not in self.alphabets[coord]:
                    raise InstanceError(f"letter {letter!r} not in alphabet of {coord}")

    def __len__(self):
        return len(self.probs)

    def positions(self, coords: Sequence[Coord]) -> tuple[int, ...]:
        try:
            return tuple(self._pos[c] for c in coords)
        except KeyError as e:
            raise InstanceError(f"unknown coordinate {e.args[0]}") from None

    def sorted_support(self) -> list[tuple[Row, Fraction]]:
        return sorted(self.probs.items())

    def prob(self, row: Row) -> Fraction:
        return self.probs.get(tuple(row), ZERO)

    def project_dist(self, coords: Sequence[Coord]) -> dict[Row, Fraction]:
        """Exact marginal over the given coordinates, keyed in their order."""
        pos = self.positions(coords)
        out: dict[Row, Fraction] = {}
        for row, p in self.probs.items():
            key = tuple(row[i] for i in pos)
            out[key] = out.get(key, ZERO) + p
        return out

    def project(self, coords: Sequence[Coord]) -> "JointTable":
        return JointTable(
            coords,
            {c: self.alphabets[c] for c in coords},
            self.project_dist(coords),
            check=False,
        )

    def pair_dist(
        self, a_coords: Sequence[Coord], b_coords: Sequence[Coord]
    ) -> dict[tuple[Row, Row], Fraction]:
        """Exact marginal over (A, B), keyed by the pair of sub-rows."""
        apos = self.positions(a_coords)
        bpos = self.positions(b_coords)
        out: dict[tuple[Row, Row], Fraction] = {}
        for row, p in self.probs.items():
            key = (tuple(row[i] for i in apos), tuple(row[i] for i in bpos))
            out[key] = out.get(key, ZERO) + p
        return out

    def condition(self, given: Mapping[Coord, Letter]) -> "JointTable":
        """Exact conditional over the remaining coordinates.

        Raises on conditioning events of probability zero.
        """
        fixed = {self._pos[c]: v for c, v in given.items()}
        keep = [c for c in self.coords if c not in given]
        keep_pos = self.positions(keep)
        mass = ZERO
        rows: dict[Row, Fraction] = {}
        for row, p in self.probs.items():
            if all(row[i] == v for i, v in fixed.items()):
                mass += p
                key = tuple(row[i] for i in keep_pos)
                rows[key] = rows.get(key, ZERO) + p
        if mass == 0:
            raise InstanceError(f"conditioning on zero-probability event {dict(given)}")
        return JointTable(
            keep,
            {c: self.alphabets[c] for c in keep},
            {r: p / mass for r, p in rows.items()},
            check=False,
        )

    def extend(
        self,
        coord: Coord,
        alphabet: Sequence[Letter],
        kernel: Callable[[Row], Iterable[tuple[Letter, Fraction]]],
        max_support: int | None = None,
    ) -> "JointTable":
        """Append a coordinate whose conditional law is given row-by-row.

        ``kernel(row)`` must return pairs ``(letter, probability)`` summing
        to one for every support row.
        """
        if coord in self._pos:
            raise InstanceError(f"coordinate {coord} already present")
        new_probs: dict[Row, Fraction] = {}
        for row, p in self.probs.items():
            total = ZERO
            for letter, q in kernel(row):
                if q == 0:
                    continue
                total += q
                new_probs[row + (letter,)] = p * q
            if total != 1:
                raise InstanceError(f"kernel rows must sum to 1, got {total} at {row}")
            if max_support is not None and len(new_probs) > max_support:
                raise GuardExceeded(f"joint support exceeds {max_support} entries")
        alphabets = dict(self.alphabets)
        alphabets[coord] = tuple(alphabet)
        return JointTable(self.coords + (coord,), alphabets, new_probs, check=False)


def entropy_bits(dist: Mapping[Any, Fraction] | Iterable[Fraction]) -> float:
    """Shannon entropy in bits of an exact pmf."""
    values = dist.values() if isinstance(dist, Mapping) else dist
    h = 0.0
    for p in values:
        if p > 0:
            fp = float(p)
            h -= fp * math.log2(fp)
    return h


def conditional_entropy_bits(
    table: JointTable, a_coords: Sequence[Coord], b_coords: Sequence[Coord]
) -> float:
    """H(A | B) in bits."""
    pab = table.pair_dist(a_coords, b_coords)
    pb: dict[Row, Fraction] = {}
    for (_, b), p in pab.items():
        pb[b] = pb.get(b, ZERO) + p
    h = 0.0
    for (_, b), p in pab.items():
        h += float(p) * math.log2(float(pb[b]) / float(p))
    return h


def mutual_information_bits(
    table: JointTable,
    a_coords: Sequence[Coord],
    b_coords: Sequence[Coord],
    c_coords: Sequence[Coord] = (),
) -> float:
    """I(A ; B | C) in bits, from exact marginals."""
    a_coords, b_coords, c_coords = tuple(a_coords), tuple(b_coords), tuple(c_coords)
    pabc = table.project_dist(a_coords + b_coords + c_coords)
    na, nb = len(a_coords), len(b_coords)
    pac: dict[Row, Fraction] = {}
    pbc: dict[Row, Fraction] = {}
    pc: dict[Row, Fraction] = {}
    for row, p in pabc.items():
        a, b, c = row[:na], row[na : na + nb], row[na + nb :]
        pac[a + c] = pac.get(a + c, ZERO) + p
        pbc[b + c] = pbc.get(b + c, ZERO) + p
        pc[c] = pc.get(c, ZERO) + p
    total = 0.0
    for row, p in pabc.items():
        a, b, c = row[:na], row[na : na + nb], row[na + nb :]
        num = float(p) * float(pc[c])
        den = float(pac[a + c]) * float(pbc[b + c])
        total += float(p) * math.log2(num / den)
    return total


def independence_violation(
    table: JointTable,
    groups: Sequence[Sequence[Coord]],
    given: Sequence[Coord] = (),
) -> Row | None:
    """Exact test that coordinate groups are mutually independent given `given`.

    Returns a witnessing support row on failure, else None.  Checking
    equality on the support of the joint suffices: both sides are
    conditional distributions summing to one, so agreement on the support
    forces the factorized form to vanish elsewhere too.
    """
    groups = [tuple(g) for g in groups if len(g) > 0]
    if len(groups) <= 1:
        return None
    given = tuple(given)
    all_coords = tuple(c for g in groups for c in g) + given
    joint = table.project_dist(all_coords)
    pc = table.project_dist(given)
    group_pos = []
    offset = 0
    for g in groups:
        group_pos.append((offset, offset + len(g)))
        offset += len(g)
    c_start = offset
    marg = [table.project_dist(tuple(g) + given) for g in groups]
    n = len(groups)
    for row, p in joint.items():
        c = row[c_start:]
        lhs = p * pc[c] ** (n - 1)
        rhs = ONE
        for (i, (lo, hi)) in enumerate(group_pos):
            rhs *= marg[i][row[lo:hi] + c]
        if lhs != rhs:
            return row
    return None

"""Source models, target functions, instance files, and the Markov check.

An instance couples a rooted tree with per-node finite alphabets, an exact
rational joint pmf over the full tuple space, and the function the root
must evaluate.  Tuples are always keyed by ascending node id.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .dist import ONE, ZERO, JointTable, Row, xcoord
from .errors import InstanceError
from .tree import RootedTree, incoming, parent, subtree, validate_tree


@dataclass
class SourceModel:
    alphabets: dict[int, tuple[str, ...]]
    probs: dict[Row, Fraction]

    @property
    def nodes(self) -> tuple[int, ...]:
        return tuple(sorted(self.alphabets))

    def validate(self) -> None:
        nodes = self.nodes
        total = ZERO
        for row, p in self.probs.items():
            if len(row) != len(nodes):
                raise InstanceError(f"pmf tuple {row} has wrong arity")
            for u, letter in zip(nodes, row):
                if letter not in self.alphabets[u]:
                    raise InstanceError(f"pmf letter {letter!r} invalid for node {u}")
            if p < 0:
                raise InstanceError(f"negative probability for {row}")
            total += p
        if total != 1:
            raise InstanceError(f"pmf sums to {total}, expected exactly 1")

    def to_table(self) -> JointTable:
        coords = tuple(xcoord(u) for u in self.nodes)
        alphabets = {xcoord(u): self.alphabets[u] for u in self.nodes}
        return JointTable(coords, alphabets, self.probs, check=False)

    def support(self) -> list[Row]:
        return sorted(r for r, p in self.probs.items() if p > 0)


@dataclass
class FunctionTable:
    """The target function as an explicit table on full source tuples."""

    outputs: dict[Row, str]

    @property
    def output_alphabet(self) -> tuple[str, ...]:
        return tuple(sorted(set(self.outputs.values())))

    def value(self, row: Row) -> str:
        try:
            return self.outputs[tuple(row)]
        except KeyError:
            raise InstanceError(f"function undefined on tuple {row}") from None


@dataclass
class Instance:
    tree: RootedTree
    model: SourceModel
    func: FunctionTable

    def validate(self) -> None:
        err = validate_tree(self.tree)
        if err is not None:
            raise InstanceError(f"invalid tree: {err}")
        if set(self.model.alphabets) != set(self.tree.nodes):
            raise InstanceError("alphabet node set differs from tree node set")
        self.model.validate()
        for row, p in self.model.probs.items():
            if p > 0 and tuple(row) not in self.func.outputs:
                raise InstanceError(f"function undefined on support tuple {row}")


def marginal(
    model: SourceModel,
    nodes: Sequence[int],
    given: Mapping[int, str] | None = None,
) -> dict[Row, Fraction]:
    """Exact marginal (or conditional) pmf over the selected nodes.

    Keys are tuples over ``sorted(nodes)``.  Conditioning on an event of
    probability zero is an error.
    """
    table = model.to_table()
    if given:
        table = table.condition({xcoord(u): v for u, v in given.items()})
    return table.project_dist(tuple(xcoord(u) for u in sorted(nodes)))


def product_form(
    tree: RootedTree,
    root_dist: Mapping[str, Fraction],
    conditionals: Mapping[int, Mapping[str, Mapping[str, Fraction]]],
) -> dict[Row, Fraction]:
    """Assemble p(x_root) * prod_u p(x_u | x_parent(u)) into a full pmf.

    ``conditionals[u][parent_letter][letter]`` gives p(x_u = letter | parent).
    """
    nodes = sorted(tree.nodes)
    parents = {u: parent(tree, u) for u in nodes}
    pmf: dict[Row, Fraction] = {}

    def rec(assigned: dict[int, str], weight: Fraction, todo: list[int]):
        if weight == 0:
            return
        if not todo:
            pmf[tuple(assigned[u] for u in nodes)] = weight
            return
        u = todo[0]
        table = conditionals[u][assigned[parents[u]]]
        for letter, q in table.items():
            assigned[u] = letter
            rec(assigned, weight * q, todo[1:])
            del assigned[u]

    order = sorted(tree.nodes, key=lambda u: _depth_for(tree, u))
    for letter, q in root_dist.items():
        rec({tree.root: letter}, Fraction(q), [u for u in order if u != tree.root])
    return pmf


def _depth_for(tree: RootedTree, u: int) -> int:
    d = 0
    while u != tree.root:
        u = parent(tree, u)
        d += 1
    return d


@dataclass(frozen=True)
class MarkovCheck:
    holds: bool
    node: int | None = None
    witness: Row | None = None

    def describe(self) -> str:
        if self.holds:
            return "holds"
        return f"violated-at({self.node}) witness={self.witness}"


def check_markov_property(instance: Instance) -> MarkovCheck:
    """Exact test that the source law factorizes along the tree.

    Equivalently: removing any node leaves the surviving connected source
    groups independent given that node's value.  On failure the returned
    witness names a node and a tuple breaking its local independence.
    """
    tree, model = instance.tree, instance.model
    table = model.to_table()
    nodes = sorted(tree.nodes)
    pos = {u: i for i, u in enumerate(nodes)}

    singles = {u: table.project_dist((xcoord(u),)) for u in nodes}
    pairs = {
        u: table.project_dist((xcoord(u), xcoord(parent(tree, u))))
        for u in nodes
        if u != tree.root
    }
    factorizes = True
    for row, p in model.probs.items():
        lhs = p
        rhs = singles[tree.root][(row[pos[tree.root]],)]
        for u in nodes:
            if u == tree.root:
                continue
            up = parent(tree, u)
            rhs *= pairs[u][(row[pos[u]], row[pos[up]])]
            rhs /= singles[up][(row[pos[up]],)]
        if lhs != rhs:
            factorizes = False
            break
    if factorizes:
        return MarkovCheck(True)

    for u in nodes:
        groups = [sorted(subtree(tree, v)) for v in sorted(incoming(tree, u))]
        outside = sorted(tree.nodes - subtree(tree, u))
        groups.append(outside)
        coord_groups = [[xcoord(v) for v in g] for g in groups if g]
        if len(coord_groups) <= 1:
            continue
        from .dist import independence_violation

        witness = independence_violation(table, coord_groups, (xcoord(u),))
        if witness is not None:
            return MarkovCheck(False, node=u, witness=witness)
    raise AssertionError("product form failed but no local violation found")


def sources_independent(model: SourceModel) -> bool:
    """Exact test that the sources are mutually independent."""
    table = model.to_table()
    singles = [table.project_dist((xcoord(u),)) for u in model.nodes]
    for row, p in model.probs.items():
        prod = ONE
        for i, letter in enumerate(row):
            prod *= singles[i][(letter,)]
        if p != prod:
            return False
    return True


# ---------------------------------------------------------------------------
# Instance files


def parse_instance(text: str) -> Instance:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise InstanceError(
            f"invalid JSON at line {e.lineno} column {e.colno}: {e.msg}"
        ) from None
    return instance_from_dict(data)


def load_instance(path: str) -> Instance:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise InstanceError(f"cannot read {path}: {e.strerror}") from None
    return parse_instance(text)


def _parse_fraction(s) -> Fraction:
    try:
        return Fraction(str(s))
    except (ValueError, ZeroDivisionError):
        raise InstanceError(f"invalid rational {s!r}; expected 'num/den'") from None


def instance_from_dict(data: dict) -> Instance:
    for key in ("nodes", "edges", "root", "pmf", "f"):
        if key not in data:
            raise InstanceError(f"missing top-level key {key!r}")
    alphabets: dict[int, tuple[str, ...]] = {}
    for entry in data["nodes"]:
        u = int(entry["id"])
        if u in alphabets:
            raise InstanceError(f"duplicate node id {u}")
        letters = tuple(str(a) for a in entry["alphabet"])
        if len(set(letters)) != len(letters) or not letters:
            raise InstanceError(f"alphabet of node {u} must be nonempty and distinct")
        alphabets[u] = letters
    tree = RootedTree.make(alphabets.keys(), data["edges"], data["root"])
    nodes = tuple(sorted(alphabets))

    def tuple_of(xmap: dict) -> Row:
        try:
            items = {int(k): str(v) for k, v in xmap.items()}
        except (TypeError, ValueError):
            raise InstanceError(f"bad tuple map {xmap!r}") from None
        if set(items) != set(nodes):
            raise InstanceError(f"tuple map {xmap!r} must assign every node exactly once")
        return tuple(items[u] for u in nodes)

    probs: dict[Row, Fraction] = {}
    for entry in data["pmf"]:
        row = tuple_of(entry["x"])
        if row in probs:
            raise InstanceError(f"duplicate pmf entry for {row}")
        probs[row] = _parse_fraction(entry["p"])
    outputs: dict[Row, str] = {}
    for entry in data["f"]:
        row = tuple_of(entry["x"])
        if row in outputs:
            raise InstanceError(f"duplicate function entry for {row}")
        outputs[row] = str(entry["value"])

    instance = Instance(tree, SourceModel(alphabets, probs), FunctionTable(outputs))
    instance.validate()
    return instance


def instance_to_dict(instance: Instance) -> dict:
    nodes = instance.model.nodes
    return {
        "nodes": [
            {"id": u, "alphabet": list(instance.model.alphabets[u])} for u in nodes
        ],
        "edges": sorted([u, v] for u, v in instance.tree.edges),
        "root": instance.tree.root,
        "pmf": [
            {
                "x": {str(u): letter for u, letter in zip(nodes, row)},
                "p": f"{p.numerator}/{p.denominator}",
            }
            for row, p in sorted(instance.model.probs.items())
        ],
        "f": [
            {"x": {str(u): letter for u, letter in zip(nodes, row)}, "value": val}
            for row, val in sorted(instance.func.outputs.items())
        ],
    }

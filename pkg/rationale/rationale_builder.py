import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, Generic, Hashable, List, Tuple, TypeVar

from rationale.relation_graph import RelationGraph

logger = logging.getLogger(__name__)

SOLUTION = "solution"
ARGUMENT = "argument"

T = TypeVar("T", bound=Hashable)


class DisjointSet(Generic[T]):
    """Union-find con compresión de caminos y unión por rango."""

    def __init__(self):
        self.parent: Dict[T, T] = {}
        self.rank: Dict[T, int] = {}

    def make_set(self, e: T) -> None:
        if e in self.parent:
            return
        self.parent[e] = e
        self.rank[e] = 0

    def find(self, e: T) -> T:
        self.make_set(e)
        root = e
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[e] != root:
            self.parent[e], e = root, self.parent[e]
        return root

    def union(self, x: T, y: T) -> None:
        x_root, y_root = self.find(x), self.find(y)
        if x_root == y_root:
            return
        if self.rank[x_root] < self.rank[y_root]:
            x_root, y_root = y_root, x_root
        self.parent[y_root] = x_root
        if self.rank[x_root] == self.rank[y_root]:
            self.rank[x_root] += 1

    def groups(self) -> List[List[T]]:
        sets = defaultdict(list)
        for e in self.parent:
            sets[self.find(e)].append(e)
        return list(sets.values())


@dataclass(frozen=True)
class DesignRationale:
    issue_key: str
    solution: Tuple[str, ...]
    arguments: Tuple[Tuple[str, ...], ...] = field(default_factory=tuple)

    def sentence_ids(self) -> List[str]:
        return list(self.solution) + [sid for group in self.arguments for sid in group]


# ============================================================
# Construction
# ============================================================

def assign_roles(g: RelationGraph) -> Dict[str, str]:
    """
    solución: destino de aristas supporting (o sin aristas supporting);
    argumento: origen. Si es ambas cosas gana el lado con más aristas, empate -> solución.
    """
    roles = {}
    for node in g.nodes:
        incoming, outgoing = g.degree(node)
        roles[node] = ARGUMENT if outgoing > incoming else SOLUTION
    return roles


def _group(g: RelationGraph, roles: Dict[str, str], role: str) -> List[Tuple[str, ...]]:
    ds: DisjointSet[str] = DisjointSet()
    for node in g.nodes:
        if roles[node] == role:
            ds.make_set(node)

    for e in g.complementary():
        if roles[e.source] == role and roles[e.target] == role:
            ds.union(e.source, e.target)

    return [tuple(sorted(group, key=g.positions.get)) for group in ds.groups()]


def construct_rationales(g: RelationGraph) -> List[DesignRationale]:
    roles = assign_roles(g)

    for e in g.complementary():
        if roles[e.source] != roles[e.target]:
            logger.warning(
                f"{g.issue_key}: ignoring complementary edge across roles ({e.source}, {e.target})"
            )

    for e in g.supporting():
        if roles[e.target] != SOLUTION:
            logger.warning(
                f"{g.issue_key}: dropping supporting edge {e.source}->{e.target}, "
                f"{e.target} took the argument role"
            )
        elif roles[e.source] != ARGUMENT:
            logger.warning(
                f"{g.issue_key}: dropping supporting edge {e.source}->{e.target}, "
                f"{e.source} took the solution role"
            )

    solution_groups = _group(g, roles, SOLUTION)
    argument_groups = _group(g, roles, ARGUMENT)

    group_of = {sid: i for i, group in enumerate(solution_groups) for sid in group}
    first_position = [g.positions[group[0]] for group in solution_groups]
    attached: Dict[int, List[Tuple[str, ...]]] = defaultdict(list)

    for arguments in argument_groups:
        members = set(arguments)
        votes: Dict[int, int] = defaultdict(int)
        for e in g.supporting():
            if e.source in members and roles[e.target] == SOLUTION:
                votes[group_of[e.target]] += 1

        if not votes:
            logger.warning(f"{g.issue_key}: discarding argument group {list(arguments)} with no solution")
            continue

        best = max(votes, key=lambda i: (votes[i], -first_position[i]))
        attached[best].append(arguments)

    rationales = []
    for i, solution in enumerate(solution_groups):
        arguments = sorted(attached[i], key=lambda group: g.positions[group[0]])
        rationales.append(
            DesignRationale(issue_key=g.issue_key, solution=solution, arguments=tuple(arguments))
        )

    return sorted(rationales, key=lambda r: g.positions[r.solution[0]])

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

SUPPORTING = "supporting"
COMPLEMENTARY = "complementary"


@dataclass(frozen=True)
class Edge:
    kind: str  # supporting | complementary
    source: str  # argumento en las aristas supporting
    target: str  # solución en las aristas supporting

    @property
    def pair(self) -> FrozenSet[str]:
        return frozenset((self.source, self.target))


@dataclass
class RelationGraph:
    """
    Grafo de relaciones entre oraciones de diseño de un issue.
    Como mucho una arista por par no ordenado; sin bucles.
    """

    issue_key: str = ""
    positions: Dict[str, int] = field(default_factory=dict)  # id -> global_index
    edges: List[Edge] = field(default_factory=list)

    def __post_init__(self):
        self._pairs = {e.pair for e in self.edges}

    @classmethod
    def from_sentences(cls, issue_key: str, sentences: Iterable) -> "RelationGraph":
        return cls(issue_key=issue_key, positions={s.id: s.global_index for s in sentences})

    # -----------------------------
    # Construction
    # -----------------------------

    def add_node(self, node_id: str, global_index: int) -> None:
        self.positions[node_id] = global_index

    def _check(self, a: str, b: str) -> None:
        for node in (a, b):
            if node not in self.positions:
                raise KeyError(f"Unknown node: {node}")
        if a == b:
            raise ValueError(f"Self-edge on {a}")
        if frozenset((a, b)) in self._pairs:
            raise ValueError(f"Pair ({a}, {b}) already has an edge")

    def add_supporting(self, argument: str, solution: str) -> None:
        self._check(argument, solution)
        self._add(Edge(SUPPORTING, argument, solution))

    def add_complementary(self, a: str, b: str) -> None:
        self._check(a, b)
        # orden canónico por posición
        if self.positions[b] < self.positions[a]:
            a, b = b, a
        self._add(Edge(COMPLEMENTARY, a, b))

    def _add(self, edge: Edge) -> None:
        self.edges.append(edge)
        self._pairs.add(edge.pair)

    # -----------------------------
    # Queries
    # -----------------------------

    @property
    def nodes(self) -> List[str]:
        return sorted(self.positions, key=self.positions.get)

    def supporting(self) -> List[Edge]:
        return [e for e in self.edges if e.kind == SUPPORTING]

    def complementary(self) -> List[Edge]:
        return [e for e in self.edges if e.kind == COMPLEMENTARY]

    def edge_between(self, a: str, b: str) -> Optional[Edge]:
        pair = frozenset((a, b))
        for e in self.edges:
            if e.pair == pair:
                return e
        return None

    def degree(self, node_id: str) -> Tuple[int, int]:
        """(aristas supporting entrantes, salientes) del nodo."""
        incoming = sum(1 for e in self.supporting() if e.target == node_id)
        outgoing = sum(1 for e in self.supporting() if e.source == node_id)
        return incoming, outgoing

"""Assignment of classes to city blocks.

Three sources: declared namespaces, recovered components from clustering the
dependency graph, or a user-supplied ad-hoc mapping. Every mode yields a
partition of the class set with stable, content-derived group ids.

Clustering runs on the undirected weighted projection of the graph
(multiplicities summed over both directions and all kinds, inheritance
double-weighted, self-loops dropped). Both algorithms are fully
deterministic: sorted iteration, smallest-label / lexicographic tie-breaks.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from itertools import combinations

from .graph import DepKind, DependencyGraph
from .model import CodeModel

ISA_WEIGHT_FACTOR = 2.0
MAX_PROPAGATION_ROUNDS = 100
EXACT_SEARCH_LIMIT = 8  # best-partition search is instant up to here


class GroupingMode(str, Enum):
    NAMESPACE = "namespace"
    RECOVERED = "recovered"
    ADHOC = "adhoc"


class ClusterAlgorithm(str, Enum):
    LABEL_PROPAGATION = "lp"
    GREEDY_MODULARITY = "greedy"


@dataclass(frozen=True)
class Group:
    id: str
    label: str
    members: tuple[str, ...]


@dataclass(frozen=True)
class Grouping:
    mode: GroupingMode
    groups: tuple[Group, ...]
    quality: float | None = None

    def group_of(self) -> dict[str, str]:
        return {member: g.id for g in self.groups for member in g.members}


class GroupingError(ValueError):
    pass


def group_by_namespace(model: CodeModel) -> Grouping:
    """One group per package, labelled with the namespace path."""
    members: dict[str, list[str]] = {p.id: [] for p in model.packages}
    for cls in sorted(model.classes, key=lambda c: c.id):
        members.setdefault(cls.package_id, []).append(cls.id)
    labels = {p.id: p.name for p in model.packages}
    groups = tuple(
        Group(id=pid, label=labels.get(pid, pid), members=tuple(member_ids))
        for pid, member_ids in sorted(members.items())
    )
    return Grouping(mode=GroupingMode.NAMESPACE, groups=groups)


# ---------------------------------------------------------------------------
# Architecture recovery via clustering


def projection_weights(
    graph: DependencyGraph, isa_factor: float = ISA_WEIGHT_FACTOR
) -> dict[tuple[str, str], float]:
    """Undirected pair weights; self-loops excluded."""
    weights: dict[tuple[str, str], float] = {}
    for e in graph.edges:
        if e.referrer == e.referent:
            continue
        pair = (min(e.referrer, e.referent), max(e.referrer, e.referent))
        factor = isa_factor if e.kind is DepKind.IS_A else 1.0
        weights[pair] = weights.get(pair, 0.0) + e.multiplicity * factor
    return weights


def modularity(
    partition: list[tuple[str, ...]], weights: dict[tuple[str, str], float]
) -> float:
    """Newman modularity Q of a partition over the weighted projection."""
    m = sum(weights.values())
    if m == 0:
        return 0.0
    strength: dict[str, float] = {}
    for (a, b), w in weights.items():
        strength[a] = strength.get(a, 0.0) + w
        strength[b] = strength.get(b, 0.0) + w
    q = 0.0
    for community in partition:
        members = set(community)
        intra = sum(
            w for (a, b), w in weights.items() if a in members and b in members
        )
        degree = sum(strength.get(node, 0.0) for node in members)
        q += intra / m - (degree / (2.0 * m)) ** 2
    return q


def _label_propagation(
    nodes: list[str], weights: dict[tuple[str, str], float]
) -> list[tuple[str, ...]]:
    neighbors: dict[str, list[tuple[str, float]]] = {node: [] for node in nodes}
    for (a, b), w in weights.items():
        neighbors[a].append((b, w))
        neighbors[b].append((a, w))

    labels = {node: node for node in nodes}
    for _ in range(MAX_PROPAGATION_ROUNDS):
        updated: dict[str, str] = {}
        for node in nodes:  # nodes pre-sorted
            scores: dict[str, float] = {}
            for other, w in neighbors[node]:
                label = labels[other]
                scores[label] = scores.get(label, 0.0) + w
            if not scores:
                updated[node] = labels[node]
                continue
            best = max(scores.values())
            updated[node] = min(lab for lab, s in scores.items() if s == best)
        if updated == labels:
            break
        labels = updated

    communities: dict[str, list[str]] = {}
    for node in nodes:
        communities.setdefault(labels[node], []).append(node)
    return [tuple(communities[label]) for label in sorted(communities)]


@lru_cache(maxsize=EXACT_SEARCH_LIMIT + 1)
def _partition_tables(n: int) -> tuple:
    """Every partition of n indices, precomputed as (communities, same-pair indices).

    Partitions enumerate in canonical label order, so ties resolve the same
    way on every run. Pair indices follow combinations(range(n), 2).
    """
    pair_index = {pair: k for k, pair in enumerate(combinations(range(n), 2))}
    tables = []

    def assign(i: int, labels: list[int], used: int) -> None:
        if i == n:
            communities: dict[int, list[int]] = {}
            for node, label in enumerate(labels):
                communities.setdefault(label, []).append(node)
            members = tuple(tuple(v) for v in communities.values())
            same = tuple(
                pair_index[(x, y)]
                for x, y in combinations(range(n), 2)
                if labels[x] == labels[y]
            )
            tables.append((members, same))
            return
        for label in range(used + 1):
            labels.append(label)
            assign(i + 1, labels, used + (1 if label == used else 0))
            labels.pop()

    assign(0, [], 0)
    return tuple(tables)


def _exact_best_partition(
    nodes: list[str], weights: dict[tuple[str, str], float]
) -> list[tuple[str, ...]]:
    """Maximum-modularity partition by enumeration; feasible for small graphs."""
    n = len(nodes)
    index = {node: i for i, node in enumerate(nodes)}
    m = sum(weights.values())
    wvec = [0.0] * (n * (n - 1) // 2)
    degree = [0.0] * n
    pair_index = {pair: k for k, pair in enumerate(combinations(range(n), 2))}
    for (a, b), w in weights.items():
        ia, ib = index[a], index[b]
        wvec[pair_index[(min(ia, ib), max(ia, ib))]] = w
        degree[ia] += w
        degree[ib] += w

    best_q = float("-inf")
    best_members = None
    inv_m = 1.0 / m
    inv_4m2 = 1.0 / (4.0 * m * m)
    for members, same in _partition_tables(n):
        intra = 0.0
        for k in same:
            intra += wvec[k]
        aterm = 0.0
        for community in members:
            deg = 0.0
            for i in community:
                deg += degree[i]
            aterm += deg * deg
        q = intra * inv_m - aterm * inv_4m2
        if q > best_q + 1e-12:
            best_q = q
            best_members = members
    assert best_members is not None
    return [tuple(nodes[i] for i in community) for community in best_members]


def _greedy_modularity(
    nodes: list[str], weights: dict[tuple[str, str], float]
) -> list[tuple[str, ...]]:
    """Best-gain agglomerative merging with refinement, exact below the limit.

    Merging stops at gain <= 0; a pure merge sequence can strand nodes in a
    local optimum, so a Kernighan-Lin pass afterwards relocates nodes while
    that improves the score. Small graphs skip straight to the enumerated
    optimum, which pins the quality bound the clustering advertises.
    """
    m = sum(weights.values())
    members: dict[str, list[str]] = {node: [node] for node in nodes}
    if m == 0:
        return [tuple(members[node]) for node in sorted(members)]
    if len(nodes) <= EXACT_SEARCH_LIMIT:
        return _exact_best_partition(nodes, weights)

    degree = {node: 0.0 for node in nodes}
    between: dict[tuple[str, str], float] = {}
    for (a, b), w in weights.items():
        degree[a] += w
        degree[b] += w
        between[(a, b)] = w

    while len(members) > 1:
        best_gain = 0.0
        best_pair: tuple[str, str] | None = None
        for pair in sorted(between):
            a, b = pair
            gain = between[pair] / m - 2.0 * (degree[a] / (2 * m)) * (degree[b] / (2 * m))
            if gain > best_gain:
                best_gain = gain
                best_pair = pair
        if best_pair is None:
            break
        a, b = best_pair  # a < b; merged community keeps the smaller id
        members[a] = sorted(members[a] + members.pop(b))
        degree[a] += degree.pop(b)
        merged_between: dict[tuple[str, str], float] = {}
        for (x, y), w in between.items():
            if (x, y) == (a, b):
                continue
            x = a if x == b else x
            y = a if y == b else y
            key = (min(x, y), max(x, y))
            merged_between[key] = merged_between.get(key, 0.0) + w
        between = merged_between

    partition = [tuple(members[cid]) for cid in sorted(members)]
    return _kl_refine(nodes, weights, partition)


class _MoveState:
    """Mutable community assignment with O(1) single-node moves."""

    DETACH = -1

    def __init__(self, nodes, strength, partition):
        self.strength = strength
        self.communities: dict[int, set[str]] = {
            i: set(c) for i, c in enumerate(partition)
        }
        self.comm_of: dict[str, int] = {
            n: i for i, c in self.communities.items() for n in c
        }
        self.comm_strength: dict[int, float] = {
            i: sum(strength[n] for n in c) for i, c in self.communities.items()
        }
        self.next_key = len(self.communities)

    def apply(self, node: str, target: int) -> int:
        current = self.comm_of[node]
        k_v = self.strength[node]
        if target == self.DETACH:
            target = self.next_key
        if target not in self.communities:
            self.next_key = max(self.next_key, target + 1)
            self.communities[target] = set()
            self.comm_strength[target] = 0.0
        self.communities[current].discard(node)
        self.comm_strength[current] -= k_v
        if not self.communities[current]:
            del self.communities[current]
            del self.comm_strength[current]
        self.communities[target].add(node)
        self.comm_strength[target] += k_v
        self.comm_of[node] = target
        return target

    def partition(self) -> list[tuple[str, ...]]:
        return sorted(
            (tuple(sorted(c)) for c in self.communities.values()), key=lambda c: c[0]
        )


def _kl_refine(
    nodes: list[str],
    weights: dict[tuple[str, str], float],
    partition: list[tuple[str, ...]],
    max_passes: int = 50,
) -> list[tuple[str, ...]]:
    """Kernighan-Lin style refinement of a partition.

    Each pass tentatively relocates every node once (best move first, even
    when its gain is negative) and keeps the best prefix of that move
    sequence; coordinated multi-node corrections that plain hill climbing
    cannot reach become visible this way. Fully deterministic: ties break on
    gain, then node id, then smallest target community member.
    """
    m = sum(weights.values())
    if m == 0 or len(nodes) < 2:
        return partition

    strength: dict[str, float] = {node: 0.0 for node in nodes}
    neighbors: dict[str, list[tuple[str, float]]] = {node: [] for node in nodes}
    for (a, b), w in weights.items():
        strength[a] += w
        strength[b] += w
        neighbors[a].append((b, w))
        neighbors[b].append((a, w))

    eps = 1e-12
    current = partition
    for _ in range(max_passes):
        state = _MoveState(nodes, strength, current)
        locked: set[str] = set()
        move_log: list[tuple[str, int]] = []
        cumulative = 0.0
        best_cumulative = 0.0
        best_prefix = 0

        while len(locked) < len(nodes):
            best: tuple[float, str, str, int] | None = None
            for node in sorted(set(nodes) - locked):
                k_v = strength[node]
                home = state.comm_of[node]
                weight_to: dict[int, float] = {}
                for other, w in neighbors[node]:
                    key = state.comm_of[other]
                    weight_to[key] = weight_to.get(key, 0.0) + w
                k_home = weight_to.get(home, 0.0)
                deg_home = state.comm_strength[home]
                candidates: list[tuple[int, str]] = [
                    (key, min(state.communities[key]))
                    for key in weight_to
                    if key != home
                ]
                if len(state.communities[home]) > 1:
                    candidates.append((_MoveState.DETACH, "￿"))
                for target, label in sorted(candidates, key=lambda c: c[1]):
                    if target == _MoveState.DETACH:
                        k_target, deg_target = 0.0, 0.0
                    else:
                        k_target = weight_to.get(target, 0.0)
                        deg_target = state.comm_strength[target]
                    gain = (k_target - k_home) / m - k_v * (
                        deg_target - deg_home + k_v
                    ) / (2.0 * m * m)
                    key = (gain, node, label, target)
                    if best is None or gain > best[0] + eps:
                        best = key
            if best is None:
                break
            gain, node, _label, target = best
            actual = state.apply(node, target)
            locked.add(node)
            move_log.append((node, actual))
            cumulative += gain
            if cumulative > best_cumulative + eps:
                best_cumulative = cumulative
                best_prefix = len(move_log)

        if best_prefix == 0:
            break
        replay = _MoveState(nodes, strength, current)
        for node, target in move_log[:best_prefix]:
            replay.apply(node, target)
        current = replay.partition()

    return current


def recover_components(
    graph: DependencyGraph, algorithm: ClusterAlgorithm | str
) -> Grouping:
    """Cluster the weighted projection into likely architecture components."""
    algorithm = ClusterAlgorithm(algorithm)
    if not graph.nodes:
        raise GroupingError("cannot recover components from an empty graph")
    nodes = sorted(graph.nodes)
    weights = projection_weights(graph)
    if algorithm is ClusterAlgorithm.LABEL_PROPAGATION:
        partition = _label_propagation(nodes, weights)
    else:
        partition = _greedy_modularity(nodes, weights)

    partition.sort(key=lambda community: community[0])
    groups = tuple(
        Group(
            id=f"cluster:{community[0]}",
            label=f"component {index + 1}",
            members=community,
        )
        for index, community in enumerate(partition)
    )
    return Grouping(
        mode=GroupingMode.RECOVERED,
        groups=groups,
        quality=modularity(partition, weights),
    )


# ---------------------------------------------------------------------------
# Ad-hoc grouping


UNGROUPED_LABEL = "ungrouped"


def load_adhoc_grouping(document: str, model: CodeModel) -> Grouping:
    """Parse a {label: [class names]} document; unlisted classes land in 'ungrouped'.

    Names may be fully qualified ('a::X') or bare when unambiguous.
    """
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise GroupingError(f"grouping document is not valid JSON ({exc})") from None
    if not isinstance(doc, dict):
        raise GroupingError("grouping document must be an object of label -> [class names]")

    by_qualified = {model.qualified_name(c): c.id for c in model.classes}
    by_bare: dict[str, list[str]] = {}
    for c in model.classes:
        by_bare.setdefault(c.name, []).append(c.id)

    assigned: dict[str, str] = {}
    groups: list[Group] = []
    for label in sorted(doc):
        names = doc[label]
        if not isinstance(names, list) or not all(isinstance(n, str) for n in names):
            raise GroupingError(f"group '{label}' must map to a list of class names")
        member_ids: list[str] = []
        for name in names:
            if name in by_qualified:
                cid = by_qualified[name]
            elif name in by_bare and len(by_bare[name]) == 1:
                cid = by_bare[name][0]
            elif name in by_bare:
                raise GroupingError(
                    f"class name '{name}' is ambiguous; qualify it with its namespace"
                )
            else:
                raise GroupingError(f"unknown class name '{name}' in group '{label}'")
            if cid in assigned:
                raise GroupingError(
                    f"class '{name}' listed in both '{assigned[cid]}' and '{label}'"
                )
            assigned[cid] = label
            member_ids.append(cid)
        groups.append(Group(id=f"adhoc:{label}", label=label, members=tuple(sorted(member_ids))))

    leftover = tuple(sorted(c.id for c in model.classes if c.id not in assigned))
    if leftover:
        existing = next((g for g in groups if g.label == UNGROUPED_LABEL), None)
        if existing is not None:
            groups.remove(existing)
            leftover = tuple(sorted(existing.members + leftover))
        groups.append(
            Group(id=f"adhoc:{UNGROUPED_LABEL}", label=UNGROUPED_LABEL, members=leftover)
        )
    groups.sort(key=lambda g: g.id)
    return Grouping(mode=GroupingMode.ADHOC, groups=tuple(groups))


def grouping_to_doc(grouping: Grouping) -> dict:
    return {
        "mode": grouping.mode.value,
        "quality": grouping.quality,
        "groups": [
            {"id": g.id, "label": g.label, "members": list(g.members)}
            for g in grouping.groups
        ],
    }

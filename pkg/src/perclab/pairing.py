"""Configuration (pairing) model over buckets of labelled points.

A degree sequence d_1..d_n assigns d_i labelled points to bucket i.  A
configuration is a perfect matching ("pairing") of all the points, drawn
uniformly at random.  Collapsing each bucket to a vertex projects the
pairing onto a multigraph, which may carry loops and parallel edges.
Conditioning on the projection being simple recovers the uniform simple
d-regular graph, at the price of rejection sampling.

Points are indexed globally: bucket b owns the contiguous block
offsets[b] .. offsets[b+1]-1.  Externally (text files) buckets and the
points inside them are 1-based; everything in memory is 0-based.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

DEFAULT_RETRY_CAP = 10_000


class InvalidDegreeSequenceError(ValueError):
    """Degree sequence cannot support a pairing (odd point total etc.)."""


class SamplingFailureError(RuntimeError):
    """Rejection sampling exhausted its retry budget."""


# ---------------------------------------------------------------------------
# basic types


@dataclass(frozen=True, eq=False)
class DegreeSequence:
    """Validated degree sequence; the bucket/point layout lives here."""

    degrees: np.ndarray

    def __post_init__(self):
        deg = np.asarray(self.degrees, dtype=np.int64)
        if deg.ndim != 1:
            raise InvalidDegreeSequenceError("degree sequence must be 1-d")
        if deg.size and deg.min() < 0:
            raise InvalidDegreeSequenceError("negative degree")
        if int(deg.sum()) % 2 != 0:
            raise InvalidDegreeSequenceError(
                "sum of degrees is odd, no perfect matching of points exists"
            )
        object.__setattr__(self, "degrees", deg)
        offsets = np.zeros(deg.size + 1, dtype=np.int64)
        np.cumsum(deg, out=offsets[1:])
        object.__setattr__(self, "offsets", offsets)

    offsets: np.ndarray = field(init=False, repr=False)

    @classmethod
    def regular(cls, n: int, d: int) -> "DegreeSequence":
        if n < 0 or d < 0:
            raise InvalidDegreeSequenceError("n and d must be nonnegative")
        return cls(np.full(n, d, dtype=np.int64))

    @property
    def n(self) -> int:
        return int(self.degrees.size)

    @property
    def total_points(self) -> int:
        return int(self.offsets[-1])

    @property
    def m(self) -> int:
        return self.total_points // 2

    @property
    def bucket_of_point(self) -> np.ndarray:
        return np.repeat(np.arange(self.n, dtype=np.int64), self.degrees)

    def __eq__(self, other):
        if not isinstance(other, DegreeSequence):
            return NotImplemented
        return np.array_equal(self.degrees, other.degrees)

    def __len__(self) -> int:
        return self.n


@dataclass(frozen=True, eq=False)
class Configuration:
    """A degree sequence plus a perfect matching of its points.

    ``mate`` is an involution on global point ids with no fixed point:
    mate[mate[i]] == i and mate[i] != i.
    """

    seq: DegreeSequence
    mate: np.ndarray

    def __post_init__(self):
        mate = np.asarray(self.mate, dtype=np.int64)
        object.__setattr__(self, "mate", mate)
        t = self.seq.total_points
        if mate.shape != (t,):
            raise ValueError(f"mate array has shape {mate.shape}, expected ({t},)")
        if t:
            idx = np.arange(t)
            if np.any(mate[mate] != idx) or np.any(mate == idx):
                raise ValueError("mate is not a fixed-point-free involution")

    @property
    def n(self) -> int:
        return self.seq.n

    @property
    def m(self) -> int:
        return self.seq.m

    def pairs(self) -> np.ndarray:
        """(m, 2) array of global point ids, u < mate(u), sorted by u."""
        idx = np.arange(self.seq.total_points, dtype=np.int64)
        first = idx < self.mate
        return np.column_stack([idx[first], self.mate[first]])

    def __eq__(self, other):
        if not isinstance(other, Configuration):
            return NotImplemented
        return self.seq == other.seq and np.array_equal(self.mate, other.mate)


@dataclass(eq=False)
class Multigraph:
    """Projection of a configuration: loops and parallel edges allowed.

    ``edges`` is an (m, 2) array of vertex labels; a loop is a row (v, v).
    Loops contribute 2 to the degree of their vertex.
    """

    n: int
    edges: np.ndarray

    _degree: np.ndarray | None = field(default=None, init=False, repr=False)
    _adj: tuple | None = field(default=None, init=False, repr=False)

    def __post_init__(self):
        e = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        if e.size and (e.min() < 0 or e.max() >= self.n):
            raise ValueError("edge endpoint out of range")
        self.edges = e

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Multigraph":
        arr = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        return cls(n, arr)

    @property
    def m(self) -> int:
        return int(self.edges.shape[0])

    @property
    def degree(self) -> np.ndarray:
        if self._degree is None:
            d = np.bincount(self.edges[:, 0], minlength=self.n)
            d += np.bincount(self.edges[:, 1], minlength=self.n)
            self._degree = d.astype(np.int64)
        return self._degree

    def adjacency(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """CSR-style incidence: (indptr, neighbors, edge_ids).

        Every non-loop edge appears once from each endpoint; a loop (v, v)
        appears twice in v's slice, matching its degree contribution.
        """
        if self._adj is None:
            src = np.concatenate([self.edges[:, 0], self.edges[:, 1]])
            dst = np.concatenate([self.edges[:, 1], self.edges[:, 0]])
            eid = np.tile(np.arange(self.m, dtype=np.int64), 2)
            order = np.argsort(src, kind="stable")
            indptr = np.zeros(self.n + 1, dtype=np.int64)
            np.cumsum(np.bincount(src, minlength=self.n), out=indptr[1:])
            self._adj = (indptr, dst[order], eid[order])
        return self._adj

    def loop_count(self) -> int:
        return int(np.count_nonzero(self.edges[:, 0] == self.edges[:, 1]))

    def neighbor_sets(self) -> list[set[int]]:
        """Distinct neighbors, loops ignored.  Small graphs only."""
        out = [set() for _ in range(self.n)]
        for u, v in self.edges:
            if u != v:
                out[int(u)].add(int(v))
                out[int(v)].add(int(u))
        return out

    def induced(self, keep: np.ndarray) -> tuple["Multigraph", np.ndarray]:
        """Subgraph on ``keep`` (bool mask or label array), labels compacted.

        Returns the subgraph and the array of original labels, so that new
        label i corresponds to original label labels[i] (order preserving).
        """
        keep = np.asarray(keep)
        if keep.dtype != bool:
            mask = np.zeros(self.n, dtype=bool)
            mask[keep] = True
        else:
            mask = keep
        labels = np.flatnonzero(mask)
        relabel = np.full(self.n, -1, dtype=np.int64)
        relabel[labels] = np.arange(labels.size, dtype=np.int64)
        e = self.edges
        sel = mask[e[:, 0]] & mask[e[:, 1]]
        return Multigraph(labels.size, relabel[e[sel]]), labels

    def __eq__(self, other):
        if not isinstance(other, Multigraph):
            return NotImplemented
        return self.n == other.n and np.array_equal(
            canonical_edges(self.edges), canonical_edges(other.edges)
        )


def canonical_edges(edges: np.ndarray) -> np.ndarray:
    """Sort endpoints within rows, then rows lexicographically."""
    e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    e = np.sort(e, axis=1)
    order = np.lexsort((e[:, 1], e[:, 0]))
    return e[order]


def is_simple(g: Multigraph) -> bool:
    """No loops, no parallel edges."""
    e = g.edges
    if e.size == 0:
        return True
    if np.any(e[:, 0] == e[:, 1]):
        return False
    ce = canonical_edges(e)
    return not np.any(np.all(ce[1:] == ce[:-1], axis=1))


# ---------------------------------------------------------------------------
# uniform pairing sampler
#
# Repeatedly take the lowest-indexed unmatched point and pair it with a
# uniformly random other unmatched point.  Each of the (2m-1)!! pairings
# comes out with probability prod_t 1/(2m-1-2t), i.e. uniformly.  The free
# points live in a swap-removal pool so each step is O(1); the random
# draws are pregenerated so the inner loop can be jit-compiled without
# touching the generator (the compiled and pure-Python paths consume the
# exact same draws and return identical arrays).


def _pair_pool_impl(two_m, draws):  # pragma: no cover - exercised via wrappers
    mate = np.full(two_m, -1, dtype=np.int64)
    pool = np.arange(two_m, dtype=np.int64)
    pos = np.arange(two_m, dtype=np.int64)
    size = two_m
    t = 0
    for p in range(two_m):
        if mate[p] >= 0:
            continue
        # remove p (always the lowest free point, hence at pool index 0..)
        ip = pos[p]
        last = pool[size - 1]
        pool[ip] = last
        pos[last] = ip
        size -= 1
        # draw q uniformly from the remaining free points
        iq = draws[t]
        q = pool[iq]
        last = pool[size - 1]
        pool[iq] = last
        pos[last] = iq
        size -= 1
        mate[p] = q
        mate[q] = p
        t += 1
    return mate


try:  # the compiled kernel is an optimization only; results are identical
    from numba import njit

    _pair_pool = njit(cache=True)(_pair_pool_impl)
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _pair_pool = _pair_pool_impl
    HAVE_NUMBA = False


def _pairing_draws(rng: np.random.Generator, m: int) -> np.ndarray:
    """One uniform integer in [0, 2m-1-2t) for each step t."""
    sizes = 2 * m - 1 - 2 * np.arange(m, dtype=np.int64)
    return rng.integers(0, sizes) if m else np.zeros(0, dtype=np.int64)


def sample_configuration(seq: DegreeSequence, seed=None) -> Configuration:
    """Uniform pairing of the points of ``seq``.

    ``seed`` may be an int, None, or a numpy Generator (consumed in place,
    which is how multi-stage pipelines stay on one stream).
    """
    rng = np.random.default_rng(seed)
    draws = _pairing_draws(rng, seq.m)
    mate = _pair_pool(seq.total_points, draws)
    return Configuration(seq, mate)


def project(config: Configuration) -> Multigraph:
    """Collapse buckets to vertices; keeps multiplicities and loops."""
    bop = config.seq.bucket_of_point
    pairs = config.pairs()
    return Multigraph(config.n, bop[pairs])


def sample_simple_regular(
    n: int, d: int, seed=None, retry_cap: int = DEFAULT_RETRY_CAP
):
    """Uniform simple d-regular graph by rejection on the pairing model.

    Returns (configuration, graph, rejections).  Conditioned on simplicity
    the projection is uniform over simple d-regular graphs, so rejection
    is exact.  Raises SamplingFailureError after ``retry_cap`` rejections
    (e.g. n=2, d=3, where no simple realization exists).
    """
    seq = DegreeSequence.regular(n, d)
    rng = np.random.default_rng(seed)
    for attempt in range(retry_cap):
        config = sample_configuration(seq, rng)
        graph = project(config)
        if is_simple(graph):
            return config, graph, attempt
    raise SamplingFailureError(
        f"no simple {d}-regular graph on {n} vertices after {retry_cap} attempts"
    )


# ---------------------------------------------------------------------------
# exact pairing probabilities and enumeration (small-m ground truth)


def pair_probability(m: int, k: int) -> float:
    """P(k disjoint prescribed pairs all occur) in a uniform pairing of 2m points.

    Exact value: prod_{i<k} 1/(2m-1-2i).  The asymptotic shorthand
    (2m)**-k is available from pair_probability_asymptotic.
    """
    if not (0 <= k <= m):
        raise ValueError(f"need 0 <= k <= m, got k={k}, m={m}")
    out = 1.0
    for i in range(k):
        out /= 2 * m - 1 - 2 * i
    return out


def pair_probability_asymptotic(m: int, k: int) -> float:
    if not (0 <= k <= m):
        raise ValueError(f"need 0 <= k <= m, got k={k}, m={m}")
    return float((2 * m) ** -k)


def matching_key(mate: np.ndarray) -> tuple:
    """Canonical hashable form: pairs (u, v) with u < v, sorted by u."""
    mate = np.asarray(mate)
    idx = np.arange(mate.size)
    first = idx < mate
    return tuple(zip(idx[first].tolist(), mate[first].tolist()))

def enumerate_matchings(total_points: int) -> list[tuple]:
    """All (2m-1)!! perfect matchings of 0..total_points-1, canonical keys."""
    if total_points % 2 != 0:
        raise InvalidDegreeSequenceError("odd number of points")

    def rec(free: tuple) -> Iterable[tuple]:
        if not free:
            yield ()
            return
        p = free[0]
        for j in range(1, len(free)):
            q = free[j]
            rest = free[1:j] + free[j + 1 :]
            for tail in rec(rest):
                yield ((p, q),) + tail

    return list(rec(tuple(range(total_points))))


def double_factorial_odd(m: int) -> int:
    """(2m-1)!! = number of perfect matchings of 2m points."""
    out = 1
    for i in range(1, 2 * m, 2):
        out *= i
    return out


# ---------------------------------------------------------------------------
# plain-text serialization
#
# configuration format:   header "n d_1 ... d_n", then one line per pair
# "b1 p1 b2 p2" (bucket and within-bucket point, both 1-based), pairs in
# canonical order.  multigraph format: one line "u v" per edge, 1-based,
# loops as "v v".


def format_configuration(config: Configuration) -> str:
    seq = config.seq
    lines = [" ".join(["%d" % seq.n] + ["%d" % d for d in seq.degrees])]
    bop = seq.bucket_of_point
    off = seq.offsets
    for u, v in config.pairs():
        bu, bv = bop[u], bop[v]
        lines.append(
            "%d %d %d %d" % (bu + 1, u - off[bu] + 1, bv + 1, v - off[bv] + 1)
        )
    return "\n".join(lines) + "\n"


def parse_configuration(text: str) -> Configuration:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise ValueError("empty configuration text")
    head = lines[0].split()
    n = int(head[0])
    degrees = np.array([int(x) for x in head[1:]], dtype=np.int64)
    if degrees.size != n:
        raise ValueError(f"header says n={n} but lists {degrees.size} degrees")
    seq = DegreeSequence(degrees)
    mate = np.full(seq.total_points, -1, dtype=np.int64)
    body = lines[1:]
    if len(body) != seq.m:
        raise ValueError(f"expected {seq.m} pair lines, got {len(body)}")
    for ln in body:
        b1, p1, b2, p2 = (int(x) for x in ln.split())
        u = seq.offsets[b1 - 1] + (p1 - 1)
        v = seq.offsets[b2 - 1] + (p2 - 1)
        if not (0 <= p1 - 1 < degrees[b1 - 1] and 0 <= p2 - 1 < degrees[b2 - 1]):
            raise ValueError(f"point out of bucket range: {ln!r}")
        if mate[u] != -1 or mate[v] != -1 or u == v:
            raise ValueError(f"point matched twice: {ln!r}")
        mate[u] = v
        mate[v] = u
    return Configuration(seq, mate)


def write_configuration(config: Configuration, path_or_file) -> None:
    _write_text(path_or_file, format_configuration(config))


def read_configuration(path_or_file) -> Configuration:
    return parse_configuration(_read_text(path_or_file))


def format_multigraph(g: Multigraph) -> str:
    lines = ["%d %d" % (u + 1, v + 1) for u, v in canonical_edges(g.edges)]
    return "\n".join(["%d" % g.n] + lines) + "\n"


def parse_multigraph(text: str) -> Multigraph:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise ValueError("empty multigraph text")
    n = int(lines[0])
    edges = []
    for ln in lines[1:]:
        u, v = (int(x) for x in ln.split())
        edges.append((u - 1, v - 1))
    return Multigraph.from_edges(n, edges)


def write_multigraph(g: Multigraph, path_or_file) -> None:
    _write_text(path_or_file, format_multigraph(g))


def read_multigraph(path_or_file) -> Multigraph:
    return parse_multigraph(_read_text(path_or_file))


def _write_text(path_or_file, text: str) -> None:
    if hasattr(path_or_file, "write"):
        path_or_file.write(text)
    else:
        with open(path_or_file, "w") as fh:
            fh.write(text)


def _read_text(path_or_file) -> str:
    if hasattr(path_or_file, "read"):
        return path_or_file.read()
    with open(path_or_file) as fh:
        return fh.read()

"""Vertex deletion on configurations.

Buckets are deleted independently with probability p (usually n**-alpha).
Deleting a bucket removes every pair touching one of its points; the
survivors keep their relative order, so the surviving configuration uses
compacted labels 0..n-r-1 with an explicit map back to the originals.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from perclab import theory
from perclab.pairing import (
    Configuration,
    DegreeSequence,
    _read_text,
    _write_text,
    format_configuration,
    parse_configuration,
)


@dataclass(frozen=True)
class DeletionParams:
    """Deletion rate, given either as alpha (p = n**-alpha) or explicit p."""

    n: int
    alpha: float | None = None
    p: float | None = None
    seed: object = None

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("n must be nonnegative")
        if (self.alpha is None) == (self.p is None):
            raise ValueError("give exactly one of alpha or p")
        if self.alpha is not None and not (self.alpha > 0):
            raise ValueError("alpha must be positive")
        if self.p is not None and not (0 < self.p < 1):
            raise ValueError("p must lie in (0, 1)")

    @property
    def prob(self) -> float:
        if self.p is not None:
            return float(self.p)
        q = float(self.n) ** -self.alpha
        if not (0 < q < 1):
            raise ValueError(f"n**-alpha = {q} is not a probability; need n >= 2")
        return q


@dataclass(eq=False)
class PercolationOutcome:
    """Survivors of one deletion round.

    survivor labels are 0..n-r-1 in the order of the surviving original
    buckets; bucket_map[new] gives the original label.  point_map carries
    the same correspondence on global point ids (None when the outcome was
    re-read from disk, where point identity is already compacted).
    """

    original_n: int
    deleted: np.ndarray
    survivor: Configuration
    census: np.ndarray
    bucket_map: np.ndarray
    point_map: np.ndarray | None = field(repr=False, default=None)

    @property
    def r(self) -> int:
        return int(self.deleted.size)

    @property
    def n_survivors(self) -> int:
        return self.survivor.n

    def point_relabel(self, new_bucket: int) -> np.ndarray:
        """Original within-bucket point indices for a surviving bucket."""
        if self.point_map is None:
            raise ValueError("point identities were not preserved")
        seq = self.survivor.seq
        lo, hi = seq.offsets[new_bucket], seq.offsets[new_bucket + 1]
        orig_bucket = self.bucket_map[new_bucket]
        return self.point_map[lo:hi] - self._orig_offsets[orig_bucket]

    _orig_offsets: np.ndarray | None = field(repr=False, default=None)


def choose_deletion_set(params: DeletionParams) -> np.ndarray:
    """Independent Bernoulli(p) per bucket; sorted array of deleted labels."""
    rng = np.random.default_rng(params.seed)
    return np.flatnonzero(rng.random(params.n) < params.prob).astype(np.int64)


def apply_deletion(config: Configuration, deleted) -> PercolationOutcome:
    """Remove buckets in ``deleted`` and every pair touching them.

    Surviving points whose partner died become unmatched and are dropped
    from the survivor's degree; the census N_0..N_d counts surviving
    buckets by their remaining degree (d = max original degree).
    """
    n = config.n
    deleted = np.unique(np.asarray(deleted, dtype=np.int64))
    if deleted.size and (deleted[0] < 0 or deleted[-1] >= n):
        raise ValueError("deleted label out of range")

    seq = config.seq
    dead_bucket = np.zeros(n, dtype=bool)
    dead_bucket[deleted] = True
    bop = seq.bucket_of_point

    # a point survives iff its bucket and its partner's bucket both survive
    dead_point = dead_bucket[bop]
    keep_point = ~(dead_point | dead_point[config.mate])

    keep_bucket = ~dead_bucket
    bucket_map = np.flatnonzero(keep_bucket)

    # remaining degree per original bucket, then restrict to survivors
    new_deg_orig = np.bincount(bop[keep_point], minlength=n)
    new_degrees = new_deg_orig[keep_bucket].astype(np.int64)

    d_max = int(seq.degrees.max()) if seq.n else 0
    census = np.bincount(new_degrees, minlength=d_max + 1).astype(np.int64)

    # compact point ids, preserving order, and rewrite the involution
    point_map = np.flatnonzero(keep_point)
    new_id = np.cumsum(keep_point) - 1
    new_mate = new_id[config.mate[point_map]]

    survivor = Configuration(DegreeSequence(new_degrees), new_mate)
    return PercolationOutcome(
        original_n=n,
        deleted=deleted,
        survivor=survivor,
        census=census,
        bucket_map=bucket_map,
        point_map=point_map,
        _orig_offsets=seq.offsets,
    )


def percolate(config: Configuration, params: DeletionParams) -> PercolationOutcome:
    return apply_deletion(config, choose_deletion_set(params))


def degree_census(outcome: PercolationOutcome, alpha: float | None = None):
    """(N_0..N_d, mu_0..mu_d or None).

    The mu companion values need alpha; with an explicit deletion
    probability and no alpha there is no n**-alpha scale to report.
    """
    census = outcome.census
    if alpha is None:
        return census, None
    d = census.size - 1
    params = theory.ModelParams(outcome.original_n, d, alpha)
    return census, np.array(theory.mu_all(params))


def reinstate(
    original: Configuration,
    outcome: PercolationOutcome,
    winners=None,
    q: float | None = None,
    seed=None,
) -> PercolationOutcome:
    """Undo the deletion of ``winners`` (a subset of the deleted buckets).

    When winners is None each deleted bucket independently stays deleted
    with probability q, so a first round at rate p1 followed by
    reinstatement composes to a single round at rate p1*q.  Reinstated
    buckets get back exactly the pairs whose other endpoint also lives.
    """
    if outcome.r == 0 and winners is None and q is not None:
        winners = np.zeros(0, dtype=np.int64)
    if winners is None:
        if q is None or not (0 <= q <= 1):
            raise ValueError("need winners or a keep-deleted probability q in [0,1]")
        rng = np.random.default_rng(seed)
        stay = rng.random(outcome.r) < q
        winners = outcome.deleted[~stay]
    else:
        winners = np.unique(np.asarray(winners, dtype=np.int64))
        if np.setdiff1d(winners, outcome.deleted).size:
            raise ValueError("winners must be a subset of the deleted buckets")
    still_deleted = np.setdiff1d(outcome.deleted, winners)
    return apply_deletion(original, still_deleted)


# ---------------------------------------------------------------------------
# serialization: the survivor configuration text plus two trailing lines,
# "deleted: <original labels, 1-based>" and "census: N_0 .. N_d".


def format_outcome(outcome: PercolationOutcome) -> str:
    body = format_configuration(outcome.survivor)
    deleted = " ".join(str(int(x) + 1) for x in outcome.deleted)
    census = " ".join(str(int(c)) for c in outcome.census)
    return body + f"deleted: {deleted}\ncensus: {census}\n"


def parse_outcome(text: str) -> PercolationOutcome:
    lines = text.splitlines()
    deleted = None
    census = None
    body = []
    for ln in lines:
        s = ln.strip()
        if s.startswith("deleted:"):
            deleted = np.array(
                [int(x) - 1 for x in s[len("deleted:"):].split()], dtype=np.int64
            )
        elif s.startswith("census:"):
            census = np.array([int(x) for x in s[len("census:"):].split()], dtype=np.int64)
        else:
            body.append(ln)
    if deleted is None or census is None:
        raise ValueError("outcome text lacks deleted:/census: lines")
    survivor = parse_configuration("\n".join(body))
    original_n = survivor.n + deleted.size
    keep = np.ones(original_n, dtype=bool)
    keep[deleted] = False
    return PercolationOutcome(
        original_n=original_n,
        deleted=deleted,
        survivor=survivor,
        census=census,
        bucket_map=np.flatnonzero(keep),
        point_map=None,
    )


def write_outcome(outcome: PercolationOutcome, path_or_file) -> None:
    _write_text(path_or_file, format_outcome(outcome))


def read_outcome(path_or_file) -> PercolationOutcome:
    return parse_outcome(_read_text(path_or_file))

"""Row/column extremum peeling for SEP on a simulated MPC cluster.

The simulation is logical: machines are record counters processed in
index order, a round is one synchronous shuffle, and every shuffle is
written to the trace. Points live on a fixed home machine for the whole
run (assigned points stay there as output). Per iteration:

* each remaining point ships one row record and one column record, and a
  sort-packed tree aggregation computes (min, max) per row and per column;
* the holders of finished aggregates send one flag per winning point to
  its home machine, where the point picks the first matching branch in
  left, right, down, up order.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Hashable, List, Optional, Sequence, Tuple

from .geometry import Direction, EscapeAssignment, SepInstance
from .peeling import NotDisjoint


class MpcFault(RuntimeError):
    def __init__(self, msg, round_no=None, machine=None):
        super().__init__(msg)
        self.round_no = round_no
        self.machine = machine


@dataclass(frozen=True)
class MpcConfig:
    machines: int
    memory: int
    comm_constant: float = 4.0
    replication_bound: float = 5.0

    def __post_init__(self):
        if self.machines < 1 or self.memory < 2:
            raise ValueError("need at least one machine with memory >= 2")

    @classmethod
    def sqrt_config(cls, n: int, slack: int = 4) -> "MpcConfig":
        """L = ceil(sqrt n) machines with 4 ceil(sqrt n) + slack records each."""
        s = 1 if n <= 1 else math.isqrt(n - 1) + 1
        return cls(machines=s, memory=4 * s + slack)

    def exponents(self, n: int) -> Tuple[Optional[float], Optional[float]]:
        if n < 2:
            return None, None
        return math.log(self.machines) / math.log(n), math.log(self.memory) / math.log(n)


@dataclass
class RoundRecord:
    round: int
    iteration: int
    phase: str
    records_shuffled: int
    max_machine_memory: int
    total_memory: int


@dataclass
class MpcTrace:
    n: int
    config: MpcConfig
    rounds: List[RoundRecord] = field(default_factory=list)
    machine_peaks: List[int] = field(default_factory=list)
    iterations: int = 0
    claimed_rounds: int = 0

    @property
    def total_rounds(self) -> int:
        return len(self.rounds)

    @property
    def replication_factor(self) -> float:
        if not self.rounds or self.n == 0:
            return 0.0
        return max(r.total_memory for r in self.rounds) / self.n

    def to_dict(self):
        eta, eta2 = self.config.exponents(self.n)
        return {
            "n": self.n,
            "machines": self.config.machines,
            "memory": self.config.memory,
            "eta": eta,
            "eta_prime": eta2,
            "iterations": self.iterations,
            "total_rounds": self.total_rounds,
            "claimed_rounds": self.claimed_rounds,
            "replication_factor": self.replication_factor,
            "machine_peaks": self.machine_peaks,
            "rounds": [vars(r) for r in self.rounds],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


class Cluster:
    """Per-machine memory ledger; faults when a machine would exceed its cap."""

    def __init__(self, cfg: MpcConfig, trace: MpcTrace, resident: Optional[List[int]] = None):
        self.cfg = cfg
        self.trace = trace
        self.resident = list(resident) if resident else [0] * cfg.machines
        self.held = [0] * cfg.machines
        if not trace.machine_peaks:
            trace.machine_peaks = list(self.resident)
        self.iteration = 0

    def free(self, k: int) -> int:
        return self.cfg.memory - self.resident[k] - self.held[k]

    def shuffle(self, received: Sequence[int], sent: int, phase: str):
        """Close one round: ``received[k]`` records arrive at machine ``k``."""
        rno = len(self.trace.rounds) + 1
        mem = [self.resident[k] + self.held[k] + received[k] for k in range(self.cfg.machines)]
        for k, v in enumerate(mem):
            if v > self.cfg.memory:
                raise MpcFault(f"machine {k} holds {v} > {self.cfg.memory} records in round {rno}",
                               rno, k)
            if v > self.trace.machine_peaks[k]:
                self.trace.machine_peaks[k] = v
        self.trace.rounds.append(RoundRecord(rno, self.iteration, phase, sent, max(mem), sum(mem)))


def _pack(cluster: Cluster, count: int) -> List[int]:
    """Sequential fill of machines by free capacity: sizes of consecutive chunks."""
    sizes = []
    rest = count
    for k in range(cluster.cfg.machines):
        if rest == 0:
            break
        take = min(rest, max(cluster.free(k), 0))
        sizes.append(take)
        rest -= take
    if rest:
        raise MpcFault(f"{count} records do not fit in the cluster's free memory",
                       len(cluster.trace.rounds) + 1, None)
    return sizes


def semigroup_aggregate(records: Sequence[Tuple[Hashable, object]], op: Callable,
                        cfg: MpcConfig, cluster: Optional[Cluster] = None,
                        phase: str = "aggregate") -> Tuple[Dict, Dict, MpcTrace]:
    """Per-key fold of an associative ``op`` by sort-packed tree reduction.

    Level 1 sorts the records by key and packs them onto machines; each
    machine folds its keys locally. Keys split across machines send one
    partial per machine to the next level. A single key over N records
    therefore needs ceil(log_m N) rounds.

    Returns ``(aggregate per key, holder machine per key, trace)``.
    """
    if cluster is None:
        cluster = Cluster(cfg, MpcTrace(len(records), cfg))
    level = sorted(records, key=lambda kv: kv[0])
    result: Dict = {}
    holder: Dict = {}
    while level:
        sizes = _pack(cluster, len(level))
        received = [0] * cluster.cfg.machines
        partials: List[Tuple[Hashable, object, int]] = []
        pos = 0
        for mach, size in enumerate(sizes):
            received[mach] = size
            chunk = level[pos:pos + size]
            pos += size
            for key, val in chunk:
                if partials and partials[-1][0] == key and partials[-1][2] == mach:
                    partials[-1] = (key, op(partials[-1][1], val), mach)
                else:
                    partials.append((key, val, mach))
        cluster.shuffle(received, len(level), phase)
        spans: Dict = {}
        for key, _, _ in partials:
            spans[key] = spans.get(key, 0) + 1
        nxt = []
        for key, val, mach in partials:
            if spans[key] == 1:
                result[key] = val
                holder[key] = mach
                cluster.held[mach] += 1
            else:
                nxt.append((key, val))
        if len(nxt) >= len(level):
            raise MpcFault("free memory too small for the aggregation tree to shrink",
                           len(cluster.trace.rounds), None)
        level = nxt
    return result, holder, cluster.trace


def _minmax(a, b):
    return (a[0] if a[0] <= b[0] else b[0], a[1] if a[1] >= b[1] else b[1])


@dataclass(frozen=True)
class MpcResult:
    assignment: EscapeAssignment
    queue: Tuple[Tuple[int, int, Direction], ...]
    iteration_of: Tuple[int, ...]
    trace: MpcTrace


def run_sep_mpc(inst: SepInstance, cfg: Optional[MpcConfig] = None,
                max_iterations: Optional[int] = None) -> MpcResult:
    if not inst.disjoint:
        raise NotDisjoint("the MPC peeling expects each grid point at most once")
    n = len(inst)
    cfg = cfg or MpcConfig.sqrt_config(n)
    cap = 4 * n if max_iterations is None else max_iterations
    per_home = max(1, -(-n // cfg.machines))
    home = [i // per_home for i in range(n)]
    resident = [0] * cfg.machines
    for h in home:
        resident[h] += 1
    trace = MpcTrace(n, cfg)
    cluster = Cluster(cfg, trace, resident)
    for k, v in enumerate(resident):
        if v > cfg.memory:
            raise MpcFault(f"machine {k} cannot hold its {v} home points", 0, k)

    pts = inst.points
    remaining = list(range(n))
    dirs: List[Optional[Direction]] = [None] * n
    it_of = [0] * n
    queue = []
    it = 0
    while remaining:
        it += 1
        if it > cap:
            raise MpcFault(f"iteration cap {cap} exceeded", len(trace.rounds), None)
        cluster.iteration = it
        recs = []
        for i in remaining:
            x, y = pts[i]
            recs.append((("row", y), ((x, i), (x, i))))
            recs.append((("col", x), ((y, i), (y, i))))
        agg, holder, _ = semigroup_aggregate(recs, _minmax, cfg, cluster, phase="extrema")

        flags: Dict[int, set] = {}
        for key, (lo, hi) in agg.items():
            tags = ("left", "right") if key[0] == "row" else ("down", "up")
            flags.setdefault(lo[1], set()).add(tags[0])
            flags.setdefault(hi[1], set()).add(tags[1])
        # one message per (aggregate, winner); a lone point gets a single two-tag flag
        received = [0] * cfg.machines
        sent = 0
        for key, (lo, hi) in agg.items():
            for winner in {lo[1], hi[1]}:
                received[home[winner]] += 1
                sent += 1
        cluster.held = [0] * cfg.machines
        cluster.shuffle(received, sent, "flags")
        trace.claimed_rounds += 2

        survivors = []
        for i in remaining:
            tags = flags.get(i, ())
            choice = next((d for d in ("left", "right", "down", "up") if d in tags), None)
            if choice is None:
                survivors.append(i)
            else:
                dirs[i] = Direction(choice)
                it_of[i] = it
                queue.append((pts[i][0], pts[i][1], dirs[i]))
        if len(survivors) == len(remaining):
            raise MpcFault("iteration assigned no point", len(trace.rounds), None)
        remaining = survivors
    trace.iterations = it
    return MpcResult(EscapeAssignment(tuple(dirs)), tuple(queue), tuple(it_of), trace)


def peel_points_sequential(inst: SepInstance) -> Tuple[EscapeAssignment, Tuple[int, ...]]:
    """Plain sequential execution of the extremum peeling, for cross-checks."""
    T = set(range(len(inst)))
    pts = inst.points
    dirs: List[Optional[Direction]] = [None] * len(pts)
    it_of = [0] * len(pts)
    it = 0
    while T:
        it += 1
        row_min, row_max, col_min, col_max = {}, {}, {}, {}
        for i in T:
            x, y = pts[i]
            row_min[y] = min(row_min.get(y, x), x)
            row_max[y] = max(row_max.get(y, x), x)
            col_min[x] = min(col_min.get(x, y), y)
            col_max[x] = max(col_max.get(x, y), y)
        done = []
        for i in T:
            x, y = pts[i]
            if x == row_min[y]:
                d = Direction.LEFT
            elif x == row_max[y]:
                d = Direction.RIGHT
            elif y == col_min[x]:
                d = Direction.DOWN
            elif y == col_max[x]:
                d = Direction.UP
            else:
                continue
            dirs[i] = d
            it_of[i] = it
            done.append(i)
        T.difference_update(done)
    return EscapeAssignment(tuple(dirs)), tuple(it_of)


def check_mpc_constraints(trace: MpcTrace, cfg: MpcConfig, n: int) -> List[str]:
    """Memory cap, linear per-round communication and replication factor; report only."""
    out = []
    for k, peak in enumerate(trace.machine_peaks):
        if peak > cfg.memory:
            out.append(f"machine {k}: peak memory {peak} > {cfg.memory}")
    for r in trace.rounds:
        if r.max_machine_memory > cfg.memory:
            out.append(f"round {r.round}: machine memory {r.max_machine_memory} > {cfg.memory}")
        if r.records_shuffled > cfg.comm_constant * max(n, 1):
            out.append(f"round {r.round}: {r.records_shuffled} records shuffled > "
                       f"{cfg.comm_constant}*n")
    rf = trace.replication_factor
    if rf > cfg.replication_bound:
        out.append(f"replication factor {rf:.3f} > {cfg.replication_bound}")
    return out

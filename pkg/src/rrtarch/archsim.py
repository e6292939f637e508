"""Cycle-accurate simulation of the three memory-arbitration architectures.

Node generators ("RRTs") work for a model-supplied number of cycles, then
raise a request that stays visible until an arbiter grants it. Three fabrics
move granted payloads into shared memory:

* combinatorial: a flat arbiter of width n grants every visible request in
  the cycle it appears; the memory commit lands one cycle later.
* hierarchical: a binary tree. Leaf polling stages watch two generators each
  through an alternating pointer, service an accepted request for
  `poll_service` cycles, and push the payload into a one-deep output
  register. FIFO stages pull from their two children (same pointer policy),
  are busy `fifo_service` cycles, and append to their own queue; the root
  FIFO's append is the memory commit. A stage whose subtree has a single
  live child skips pointer alternation and passes through.
* hybrid: m generators on a combinatorial block, the rest on a hierarchical
  subtree; both feed a merge arbiter of width m+1 that adds one cycle before
  the commit.

The simulation is event-driven but bit-faithful to a per-cycle model. Each
cycle has four phases, processed in order: (a) service completions, register
pushes, queue appends, and memory commits; (b) generator completions turning
into visible requests; (c) inspections, grants, and pulls, higher tree
levels first so a parent's pop frees space before a child checks its queue;
(d) retries of register pushes that were blocked earlier in the cycle.
Pointer alternation on idle cycles is computed arithmetically (the pointer
of an idle stage flips every cycle), so idle spans cost no events.
"""

from __future__ import annotations

import heapq
import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Protocol, Tuple

import numpy as np

ARCH_COMBINATORIAL = "combinatorial"
ARCH_HIERARCHICAL = "hierarchical"
ARCH_HYBRID = "hybrid"
ARCHITECTURES = (ARCH_COMBINATORIAL, ARCH_HIERARCHICAL, ARCH_HYBRID)

_PHASE_COMPLETE = 0
_PHASE_REQUEST = 1
_PHASE_INSPECT = 2
_PHASE_RETRY = 3


class DeadlockDetected(RuntimeError):
    """No progress is possible but committed work remains outstanding."""


class MemoryOverflow(RuntimeError):
    """A bank was asked to hold more records than its capacity."""


@dataclass(frozen=True)
class ArchConfig:
    """Stage timings (cycles) and sizing shared by all architectures."""

    poll_service: int = 5
    fifo_service: int = 3
    fifo_depth: int = 16
    commit_latency: int = 1
    merge_latency: int = 1

    def __post_init__(self):
        for name in ("poll_service", "fifo_service", "fifo_depth", "commit_latency", "merge_latency"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")


class WorkModel(Protocol):
    """Supplies per-node generation costs; queried when a generator starts."""

    def begin_node(self, rrt_id: int) -> Tuple[int, object]:
        """Return (cycles, payload) for the node this generator works on next."""
        ...


class DeterministicWork:
    """Every node costs the same number of cycles."""

    def __init__(self, cycles: int):
        if cycles < 1:
            raise ValueError("cycles must be >= 1")
        self.cycles = int(cycles)

    def begin_node(self, rrt_id: int) -> Tuple[int, object]:
        return self.cycles, None


class UniformWork:
    """Integer-uniform generation cost on [low, high], one stream per generator.

    Streams come from SeedSequence.spawn, so costs for generator i do not
    depend on how many generators exist or how often others are queried.
    """

    def __init__(self, n_rrts: int, seed, low: int = 20, high: int = 60):
        if not 1 <= low <= high:
            raise ValueError(f"need 1 <= low <= high, got [{low}, {high}]")
        seq = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
        self._rngs = [np.random.default_rng(s) for s in seq.spawn(n_rrts)]
        self.low = low
        self.high = high

    def begin_node(self, rrt_id: int) -> Tuple[int, object]:
        rng = self._rngs[rrt_id]
        return int(rng.integers(self.low, self.high + 1)), None


class MultiPortMemory:
    """Banked node store: address a lands in bank a mod banks.

    Commits arriving in one cycle take consecutive addresses, so up to
    `banks` simultaneous commits touch distinct banks.
    """

    def __init__(self, banks: int, state_dims: int = 3, total_kb_per_dim: float = 400.0):
        if banks < 1:
            raise ValueError("banks must be >= 1")
        if state_dims < 1:
            raise ValueError("state_dims must be >= 1")
        self.banks = banks
        self.record_bytes = (state_dims + 1) * 4
        self.bank_size_kb = total_kb_per_dim * state_dims / banks
        self.bank_capacity = int(self.bank_size_kb * 1024 // self.record_bytes)
        self.occupancy = [0] * banks
        self._next_address = 0

    def commit(self) -> Tuple[int, int]:
        """Store one record; returns (address, bank)."""
        address = self._next_address
        bank = address % self.banks
        if self.occupancy[bank] >= self.bank_capacity:
            raise MemoryOverflow(f"bank {bank} exceeded {self.bank_capacity} records")
        self.occupancy[bank] += 1
        self._next_address += 1
        return address, bank


@dataclass
class SimTrace:
    """Outcome of one simulation run."""

    architecture: str
    n: int
    m: Optional[int]
    total_cycles: int
    committed_nodes: int
    bank_occupancy: Tuple[int, ...]
    events: List[Tuple[int, str, str, int]] = field(default_factory=list)
    payloads: List[Tuple[int, object]] = field(default_factory=list)


# ---------------------------------------------------------------------------
# hierarchical fabric
# ---------------------------------------------------------------------------


class _Generator:
    __slots__ = ("id", "requesting", "payload", "stage", "slot")

    def __init__(self, rrt_id: int):
        self.id = rrt_id
        self.requesting = False
        self.payload = None
        self.stage: Optional["_Stage"] = None
        self.slot = 0


class _Stage:
    """Common pointer/idle bookkeeping for polling and FIFO stages."""

    __slots__ = (
        "name",
        "level",
        "children",
        "live",
        "parent",
        "slot_in_parent",
        "pointer",
        "idle_since",
        "epoch",
        "busy",
        "register",
        "queue",
        "is_root",
        "holding",
        "full_stalled",
    )

    def __init__(self, name: str, level: int, children: list):
        self.name = name
        self.level = level
        self.children = children
        self.live = [c is not None and _subtree_live(c) for c in children]
        self.parent: Optional["_Stage"] = None
        self.slot_in_parent = 0
        self.pointer = 0
        self.idle_since = 0
        self.epoch = 0
        self.busy = False
        self.register = None  # polling stages: (rrt_id, payload) or None
        self.queue: deque = deque()  # FIFO stages
        self.is_root = False
        self.holding = None  # completed payload waiting for a free register
        self.full_stalled = False

    @property
    def live_count(self) -> int:
        return sum(self.live)


def _subtree_live(node) -> bool:
    if isinstance(node, _Generator):
        return True
    return any(node.live)


def _build_hier_fabric(rrt_ids: List[int]):
    """Binary tree over the given generators, padded to a power of two.

    Returns (generators keyed by id order given, polling stages, fifo stages
    including the root last).
    """
    count = len(rrt_ids)
    levels = max(1, math.ceil(math.log2(count))) if count > 1 else 1
    slots = 1 << levels
    gens = [_Generator(rid) for rid in rrt_ids]
    padded: List[Optional[_Generator]] = list(gens) + [None] * (slots - count)

    polls = []
    for k in range(slots // 2):
        stage = _Stage(f"poll{k}", 1, [padded[2 * k], padded[2 * k + 1]])
        for slot, child in enumerate(stage.children):
            if child is not None:
                child.stage = stage
                child.slot = slot
        polls.append(stage)

    fifos = []
    level_nodes: List[_Stage] = list(polls)
    level = 2
    fifo_index = 0
    while len(level_nodes) > 1:
        nxt = []
        for k in range(len(level_nodes) // 2):
            stage = _Stage(f"fifo{fifo_index}", level, [level_nodes[2 * k], level_nodes[2 * k + 1]])
            fifo_index += 1
            for slot, child in enumerate(stage.children):
                child.parent = stage
                child.slot_in_parent = slot
            nxt.append(stage)
            fifos.append(stage)
        level_nodes = nxt
        level += 1
    if len(fifos) == 0:
        # a lone polling stage still reports through an explicit root FIFO
        root = _Stage("root", 2, [polls[0], None])
        root.live = [True, False]
        polls[0].parent = root
        polls[0].slot_in_parent = 0
        fifos.append(root)
    root = fifos[-1]
    root.is_root = True
    root.name = "root"
    return gens, polls, fifos


class _Engine:
    """Shared event queue with (cycle, phase, top-down level, seq) ordering."""

    def __init__(self):
        self._heap: list = []
        self._seq = itertools.count()

    def schedule(self, cycle: int, phase: int, level: int, fn: Callable[[], None]):
        heapq.heappush(self._heap, (cycle, phase, -level, next(self._seq), fn))

    def empty(self) -> bool:
        return not self._heap

    def peek_cycle(self) -> int:
        return self._heap[0][0]

    def pop(self):
        cycle, _, _, _, fn = heapq.heappop(self._heap)
        return cycle, fn


def run_simulation(
    architecture: str,
    n: int,
    target_nodes: int,
    work: WorkModel,
    m: Optional[int] = None,
    config: ArchConfig = ArchConfig(),
    state_dims: int = 3,
    record_events: bool = False,
    record_payloads: bool = False,
    max_cycles: int = 50_000_000,
) -> SimTrace:
    """Run one architecture until `target_nodes` commits land.

    The cycle holding the final commit is processed to completion, so
    `committed_nodes` can exceed `target_nodes` when several commits share
    it. `total_cycles` is the cycle of the commit that reached the target.
    """
    if architecture not in ARCHITECTURES:
        raise ValueError(f"unknown architecture {architecture!r}")
    if n < 1:
        raise ValueError("n must be >= 1")
    if target_nodes < 1:
        raise ValueError("target_nodes must be >= 1")
    if architecture == ARCH_HYBRID:
        if m is None or not 1 <= m <= n:
            raise ValueError(f"hybrid needs 1 <= m <= n, got m={m}")
    elif m is not None:
        raise ValueError(f"{architecture} takes no m")

    if architecture == ARCH_COMBINATORIAL:
        banks = n
    elif architecture == ARCH_HIERARCHICAL:
        banks = 1
    else:
        banks = m + 1
    memory = MultiPortMemory(banks, state_dims=state_dims)

    engine = _Engine()
    events: List[Tuple[int, str, str, int]] = []
    payloads: List[Tuple[int, object]] = []
    state = {"commits": 0, "stop_cycle": None, "commits_this_cycle": 0, "cycle": -1}

    def emit(cycle: int, component: str, event: str, rrt_id: int):
        if record_events:
            events.append((cycle, component, event, rrt_id))

    def commit(cycle: int, rrt_id: int, payload):
        memory.commit()
        state["commits_this_cycle"] += 1
        if state["commits_this_cycle"] > memory.banks:
            raise MemoryOverflow(f"{state['commits_this_cycle']} commits in cycle {cycle} exceed {memory.banks} ports")
        emit(cycle, "memory", "commit", rrt_id)
        if record_payloads:
            payloads.append((rrt_id, payload))
        state["commits"] += 1
        if state["commits"] == target_nodes and state["stop_cycle"] is None:
            state["stop_cycle"] = cycle

    # --- generator lifecycle -------------------------------------------------

    direct_ids: List[int] = []
    tree_ids: List[int] = []
    if architecture == ARCH_COMBINATORIAL:
        direct_ids = list(range(n))
    elif architecture == ARCH_HIERARCHICAL:
        tree_ids = list(range(n))
    else:
        direct_ids = list(range(m))
        tree_ids = list(range(m, n))

    gens_by_id = {}
    commit_delay_direct = config.commit_latency + (
        config.merge_latency if architecture == ARCH_HYBRID else 0
    )
    arbiter_name = "arbiter"

    def start_generation(gen: _Generator, cycle: int):
        cycles, payload = work.begin_node(gen.id)
        if int(cycles) < 1:
            raise ValueError(f"work model returned {cycles} cycles for generator {gen.id}")
        gen.payload = payload
        engine.schedule(cycle + int(cycles), _PHASE_REQUEST, 0, lambda: request_visible(gen))

    def request_visible(gen: _Generator):
        cycle = state["cycle"]
        gen.requesting = True
        emit(cycle, f"rrt{gen.id}", "request", gen.id)
        if gen.stage is None:
            # flat arbiter grants in the same cycle
            engine.schedule(cycle, _PHASE_INSPECT, 0, lambda: grant_direct(gen))
        else:
            stage_child_ready(gen.stage, gen.slot, cycle)

    def grant_direct(gen: _Generator):
        cycle = state["cycle"]
        gen.requesting = False
        emit(cycle, arbiter_name, "grant", gen.id)
        emit(cycle, f"rrt{gen.id}", "accept", gen.id)
        payload = gen.payload
        if architecture == ARCH_HYBRID:
            engine.schedule(
                cycle + config.commit_latency, _PHASE_COMPLETE, 0,
                lambda: emit(state["cycle"], "merge", "grant", gen.id),
            )
        rid = gen.id
        engine.schedule(
            cycle + commit_delay_direct, _PHASE_COMPLETE, 0, lambda: commit(state["cycle"], rid, payload)
        )
        start_generation(gen, cycle)

    # --- hierarchical stages --------------------------------------------------

    def child_ready(stage: _Stage, slot: int) -> bool:
        child = stage.children[slot]
        if child is None:
            return False
        if isinstance(child, _Generator):
            return child.requesting
        if child.level == 1:
            return child.register is not None
        return len(child.queue) > 0

    def next_accept_cycle(stage: _Stage, now: int) -> Optional[int]:
        """Earliest cycle >= now when the pointer lands on a ready child."""
        if stage.live_count == 0:
            return None
        if stage.live_count == 1:
            slot = 0 if stage.live[0] else 1
            return now if child_ready(stage, slot) else None
        best = None
        for slot in (0, 1):
            if not child_ready(stage, slot):
                continue
            c = now
            # pointer flips once per idle cycle since idle_since
            if ((c - stage.idle_since) & 1) != (slot ^ stage.pointer):
                c += 1
            if best is None or c < best:
                best = c
        return best

    def schedule_inspection(stage: _Stage, now: int):
        if stage.busy or stage.holding is not None:
            return
        if stage.level > 1 and not stage.is_root and len(stage.queue) >= config.fifo_depth:
            stage.full_stalled = True
            return
        target = next_accept_cycle(stage, now)
        if target is None:
            return
        epoch = stage.epoch
        engine.schedule(target, _PHASE_INSPECT, stage.level, lambda: inspect(stage, epoch))

    def stage_child_ready(stage: _Stage, slot: int, cycle: int):
        # a child became ready; an idle stage may be able to accept sooner
        schedule_inspection(stage, cycle)

    def inspect(stage: _Stage, epoch: int):
        if epoch != stage.epoch or stage.busy or stage.holding is not None:
            return
        cycle = state["cycle"]
        if stage.level > 1 and not stage.is_root and len(stage.queue) >= config.fifo_depth:
            stage.full_stalled = True
            return
        if stage.live_count >= 2:
            pointer_now = stage.pointer ^ ((cycle - stage.idle_since) & 1)
        else:
            pointer_now = 0 if stage.live[0] else 1
        if not child_ready(stage, pointer_now):
            return  # an earlier accept or pull changed the picture; stay idle
        accept(stage, pointer_now, cycle)

    def accept(stage: _Stage, slot: int, cycle: int):
        stage.epoch += 1
        stage.busy = True
        stage.pointer = slot ^ 1 if stage.live_count >= 2 else slot
        child = stage.children[slot]
        if isinstance(child, _Generator):
            # leaf poll: ack the generator, service, then push to register
            child.requesting = False
            rid = child.id
            payload = child.payload
            emit(cycle, stage.name, "grant", rid)
            emit(cycle, f"rrt{rid}", "accept", rid)
            start_generation(child, cycle)
            engine.schedule(
                cycle + config.poll_service, _PHASE_COMPLETE, stage.level,
                lambda: poll_push(stage, rid, payload),
            )
        elif child.level == 1:
            rid, payload = child.register
            child.register = None
            emit(cycle, stage.name, "grant", rid)
            if child.holding is not None:
                engine.schedule(cycle, _PHASE_RETRY, child.level, lambda: poll_retry(child))
            engine.schedule(
                cycle + config.fifo_service, _PHASE_COMPLETE, stage.level,
                lambda: fifo_append(stage, rid, payload),
            )
        else:
            rid, payload = child.queue.popleft()
            emit(cycle, stage.name, "grant", rid)
            if child.full_stalled:
                child.full_stalled = False
                engine.schedule(cycle, _PHASE_INSPECT, child.level, lambda: wake_full(child))
            engine.schedule(
                cycle + config.fifo_service, _PHASE_COMPLETE, stage.level,
                lambda: fifo_append(stage, rid, payload),
            )

    def wake_full(stage: _Stage):
        if not stage.busy and stage.holding is None:
            # pointer stayed frozen while the queue was full
            stage.idle_since = state["cycle"]
            stage.epoch += 1
            schedule_inspection(stage, state["cycle"])

    def poll_push(stage: _Stage, rid: int, payload):
        cycle = state["cycle"]
        if stage.register is None:
            stage.register = (rid, payload)
            go_idle(stage, cycle)
            if stage.parent is not None:
                stage_child_ready(stage.parent, stage.slot_in_parent, cycle)
        else:
            stage.holding = (rid, payload)

    def poll_retry(stage: _Stage):
        # the push lands in phase (d): this cycle's inspections already ran,
        # so both the stage and its parent act on it from the next cycle on
        cycle = state["cycle"]
        if stage.holding is not None and stage.register is None:
            stage.register = stage.holding
            stage.holding = None
            go_idle(stage, cycle + 1)
            if stage.parent is not None:
                stage_child_ready(stage.parent, stage.slot_in_parent, cycle + 1)

    def fifo_append(stage: _Stage, rid: int, payload):
        cycle = state["cycle"]
        if stage.is_root:
            if architecture == ARCH_HYBRID:
                # the root's completed node reaches the merge arbiter now
                # and commits merge_latency later
                emit(cycle, "merge", "grant", rid)
                engine.schedule(
                    cycle + config.merge_latency, _PHASE_COMPLETE, 0,
                    lambda: commit(state["cycle"], rid, payload),
                )
            else:
                commit(cycle, rid, payload)
        else:
            stage.queue.append((rid, payload))
            if stage.parent is not None:
                stage_child_ready(stage.parent, stage.slot_in_parent, cycle)
        go_idle(stage, cycle)

    def go_idle(stage: _Stage, cycle: int):
        stage.busy = False
        stage.idle_since = cycle
        stage.epoch += 1
        schedule_inspection(stage, cycle)

    # --- wiring ---------------------------------------------------------------

    polls: List[_Stage] = []
    fifos: List[_Stage] = []
    if tree_ids:
        gens, polls, fifos = _build_hier_fabric(tree_ids)
        for g in gens:
            gens_by_id[g.id] = g
    for rid in direct_ids:
        gens_by_id[rid] = _Generator(rid)

    for gen in gens_by_id.values():
        start_generation(gen, 0)

    # --- main loop ------------------------------------------------------------

    while True:
        if engine.empty():
            if state["stop_cycle"] is not None:
                break
            raise DeadlockDetected(
                f"{architecture} n={n}: no pending events after {state['commits']} commits"
            )
        cycle = engine.peek_cycle()
        if state["stop_cycle"] is not None and cycle > state["stop_cycle"]:
            break
        if cycle > max_cycles:
            raise DeadlockDetected(f"exceeded {max_cycles} cycles with {state['commits']} commits")
        if cycle != state["cycle"]:
            state["cycle"] = cycle
            state["commits_this_cycle"] = 0
        _, fn = engine.pop()
        fn()

    return SimTrace(
        architecture=architecture,
        n=n,
        m=m,
        total_cycles=state["stop_cycle"],
        committed_nodes=state["commits"],
        bank_occupancy=tuple(memory.occupancy),
        events=events,
        payloads=payloads,
    )


def measure_speedup(
    architecture: str,
    n: int,
    target_nodes: int,
    work_factory: Callable[[int], WorkModel],
    m: Optional[int] = None,
    config: ArchConfig = ArchConfig(),
    state_dims: int = 3,
) -> Tuple[float, SimTrace, SimTrace]:
    """T(1)/T(n) for one architecture; the n=1 baseline uses the same fabric.

    `work_factory(k)` must build a fresh work model for k generators; the
    baseline consumes its own single-generator model. A hybrid baseline runs
    with m=1.
    """
    base_m = 1 if architecture == ARCH_HYBRID else None
    base = run_simulation(
        architecture, 1, target_nodes, work_factory(1), m=base_m, config=config, state_dims=state_dims
    )
    if n == 1 and m in (None, base_m):
        return 1.0, base, base
    trace = run_simulation(
        architecture, n, target_nodes, work_factory(n), m=m, config=config, state_dims=state_dims
    )
    return base.total_cycles / trace.total_cycles, trace, base

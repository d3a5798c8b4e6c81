"""Slot-driven simulator for N sources sharing a medium.

Within each slot, events happen in a fixed order:

1. occupancy is sampled (slot-start state, the state arrivals will "see");
2. the access policy grants the slot from the slot-start backlog;
3. granted sources transmit and the channel resolves successes;
4. delivered packets leave their queue and either reach the monitor point or
   enter the network delay stage; delay-stage packets due this slot are
   classified at the destination;
5. Bernoulli arrivals are admitted (so a packet is never transmitted in its
   generation slot);
6. each source's age is sampled as ``slot - newest_gen + 1``, or
   ``slot + 1`` while nothing has been received.

The average age reported for a run is the per-slot mean of those samples.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .access import (
    ChannelConfig,
    ChannelKind,
    PolicyConfig,
    PolicyKind,
    grant,
    resolve,
)
from .analytic import QueueParams
from .errors import ConfigError, InsufficientDataError
from .netdelay import DelayStage, DestState, deliver_due
from .queueing import Discipline, Packet, SourceQueue
from .streams import SourceStreams

__all__ = [
    "MeasurePoint",
    "SimConfig",
    "AoiTracker",
    "DeliveryLog",
    "SourceMetrics",
    "MetricsReport",
    "sample_path_estimators",
    "run",
    "run_with_logs",
    "dedicated_channel_run",
]

_NAN = float("nan")


class MeasurePoint(Enum):
    AP = "ap"
    DESTINATION = "destination"


@dataclass(frozen=True)
class SimConfig:
    """Full description of one run; two equal configs give identical results.

    ``lambdas`` may include the boundary rates 0 (silent source) and 1
    (an update every slot).  ``measure_at`` defaults to the destination when
    the delay stage is enabled and to the access point otherwise; without a
    delay stage the two coincide.
    """

    n_sources: int
    lambdas: tuple[float, ...]
    discipline: Discipline
    policy: PolicyConfig
    channel: ChannelConfig
    network_k: float | None = None
    horizon: int = 1_000_000
    seed: int = 0
    measure_at: MeasurePoint | None = None
    warmup: int = 0

    def validate(self) -> None:
        if self.n_sources < 1:
            raise ConfigError(f"n_sources must be >= 1, got {self.n_sources}")
        if len(self.lambdas) != self.n_sources:
            raise ConfigError(
                f"lambdas length {len(self.lambdas)} != n_sources {self.n_sources}"
            )
        for i, lam in enumerate(self.lambdas):
            if not (0.0 <= lam <= 1.0):
                raise ConfigError(f"lambdas[{i}] must be in [0, 1], got {lam}")
        if self.horizon < 1:
            raise ConfigError(f"horizon must be >= 1, got {self.horizon}")
        if not (0 <= self.warmup < self.horizon):
            raise ConfigError(
                f"warmup must be in [0, horizon), got {self.warmup} with horizon {self.horizon}"
            )
        if self.network_k is not None and not (0.0 < self.network_k <= 1.0):
            raise ConfigError(f"network_k must be in (0, 1], got {self.network_k}")
        self.policy.validate(self.n_sources)
        self.channel.validate(self.n_sources)

    def resolved_measure_at(self) -> MeasurePoint:
        if self.measure_at is not None:
            return self.measure_at
        return MeasurePoint.DESTINATION if self.network_k is not None else MeasurePoint.AP


class AoiTracker:
    """Age accumulator of one source at one monitor point."""

    __slots__ = ("newest_gen", "age_sum", "samples")

    def __init__(self) -> None:
        self.newest_gen: int | None = None
        self.age_sum = 0
        self.samples = 0

    def on_update(self, gen_slot: int) -> None:
        newest = self.newest_gen
        if newest is None or gen_slot > newest:
            self.newest_gen = gen_slot

    def sample(self, slot: int) -> int:
        newest = self.newest_gen
        age = slot + 1 if newest is None else slot - newest + 1
        self.age_sum += age
        self.samples += 1
        return age


@dataclass
class DeliveryLog:
    """Per-source reception trace at the monitor point.

    ``left_empty`` is only populated when the monitor point is the access
    point: entry j says whether delivery j left the source queue empty at the
    end of its slot (arrivals of that slot included).
    """

    gen_slots: list[int] = field(default_factory=list)
    recv_slots: list[int] = field(default_factory=list)
    left_empty: list[bool] = field(default_factory=list)


def sample_path_estimators(log: DeliveryLog, window: int) -> tuple[float, float]:
    """Two area-decomposition estimates of the average age from one trace.

    The first rebuilds the age area from interarrival gaps Y and system times
    T, the second from inter-reception gaps Z and the previous system time;
    both are scaled by the empirical reception rate over ``window`` slots.
    On a stable run they agree with the per-slot average up to edge effects.
    """
    gens = log.gen_slots
    recvs = log.recv_slots
    m = len(gens)
    if m < 2:
        raise InsufficientDataError(f"need at least 2 receptions, got {m}")
    if window < 1:
        raise InsufficientDataError(f"window must be >= 1, got {window}")
    rate = m / window
    yt_acc = 0.0
    zt_acc = 0.0
    for j in range(1, m):
        y = gens[j] - gens[j - 1]
        t = recvs[j] - gens[j]
        z = recvs[j] - recvs[j - 1]
        t_prev = recvs[j - 1] - gens[j - 1]
        yt_acc += y * t + 0.5 * y * y + 0.5 * y
        zt_acc += t_prev * z + 0.5 * z * z + 0.5 * z
    k = m - 1
    return rate * yt_acc / k, rate * zt_acc / k


@dataclass(frozen=True)
class SourceMetrics:
    """Per-source results of one run (window excludes warm-up slots)."""

    source_id: int
    avg_aoi: float
    generated: int
    delivered: int
    dropped: int
    in_system_at_end: int
    informative: int
    obsolete: int
    empirical_drop_prob: float
    empirical_effective_rate: float
    occupancy_hist: dict[int, float]
    estimator_yt: float
    estimator_zt: float
    mean_system_time: float
    mean_interarrival: float
    mean_interarrival_sq: float
    stability_warning: bool


@dataclass(frozen=True)
class MetricsReport:
    """Results of one run, per source, plus the configuration that produced it."""

    config: SimConfig
    window: int
    per_source: tuple[SourceMetrics, ...]


def _service_share(config: SimConfig, i: int) -> float:
    """Heuristic per-source service capacity used for the stability flag."""
    n = config.n_sources
    channel = config.channel
    if channel.kind is ChannelKind.COLLISION and not channel.collision_thinning:
        att = 1.0
    else:
        att = channel.attempt_prob(i)
    if config.policy.kind is PolicyKind.RANDOM_ACCESS:
        qs = config.policy.access_probs
        assert qs is not None
        return qs[i] * att / n
    return att / n


def run_with_logs(config: SimConfig) -> tuple[MetricsReport, list[DeliveryLog]]:
    """Run one simulation, returning metrics and the per-source reception traces."""
    config.validate()
    n = config.n_sources
    lambdas = config.lambdas
    horizon = config.horizon
    warmup = config.warmup
    window = horizon - warmup

    queues = [SourceQueue(config.discipline, i) for i in range(n)]
    streams = [SourceStreams(config.seed, i) for i in range(n)]
    policy = config.policy
    channel = config.channel

    stage = DelayStage(config.network_k) if config.network_k is not None else None
    dest = DestState(n) if stage is not None else None
    measure_dest = stage is not None and config.resolved_measure_at() is MeasurePoint.DESTINATION

    trackers = [AoiTracker() for _ in range(n)]
    logs = [DeliveryLog() for _ in range(n)]
    occ_counts: list[list[int]] = [[0, 0, 0] for _ in range(n)]
    last_gen = [-1] * n
    y_sum = [0] * n
    y2_sum = [0] * n
    y_count = [0] * n
    seq = [0] * n
    informative = [0] * n
    obsolete = [0] * n
    base_generated = [0] * n
    base_delivered = [0] * n
    base_dropped = [0] * n

    rr = policy.kind is PolicyKind.ROUND_ROBIN

    for slot in range(horizon):
        rec = slot >= warmup
        if rec and slot == warmup and warmup:
            for i in range(n):
                q = queues[i]
                base_generated[i] = q.generated
                base_delivered[i] = q.delivered
                base_dropped[i] = q.dropped

        if rec:
            for i in range(n):
                o = queues[i].occupancy()
                oc = occ_counts[i]
                if o >= len(oc):
                    oc.extend([0] * (o + 1 - len(oc)))
                oc[o] += 1

        # grant from the slot-start backlog
        if rr:
            granted = [slot % n]
        else:
            nonempty = [queues[i].occupancy() > 0 for i in range(n)]
            granted = grant(policy, slot, nonempty, streams)

        transmitters = []
        for g in granted:
            if queues[g].begin_attempt() is not None:
                transmitters.append(g)
        successes = resolve(channel, transmitters, streams) if transmitters else []

        delivered_now: list[int] = []
        for i in successes:
            pkt = queues[i].on_delivery()
            if stage is not None:
                stage.inject(pkt, slot, streams[i].delay)
                if not measure_dest:
                    trackers[i].on_update(pkt.gen_slot)
                    if rec:
                        logs[i].gen_slots.append(pkt.gen_slot)
                        logs[i].recv_slots.append(slot)
                        delivered_now.append(i)
            else:
                trackers[i].on_update(pkt.gen_slot)
                if rec:
                    logs[i].gen_slots.append(pkt.gen_slot)
                    logs[i].recv_slots.append(slot)
                    delivered_now.append(i)

        if stage is not None:
            for pkt, fresh in deliver_due(stage, dest, slot):
                src = pkt.source_id
                if rec:
                    if fresh:
                        informative[src] += 1
                    else:
                        obsolete[src] += 1
                if fresh and measure_dest:
                    trackers[src].on_update(pkt.gen_slot)
                    if rec:
                        logs[src].gen_slots.append(pkt.gen_slot)
                        logs[src].recv_slots.append(slot)

        for i in range(n):
            lam = lambdas[i]
            if lam > 0.0 and streams[i].arrival.uniform() < lam:
                queues[i].on_arrival(Packet(i, slot, seq[i]))
                seq[i] += 1
                prev = last_gen[i]
                if rec and prev >= 0:
                    y = slot - prev
                    y_sum[i] += y
                    y2_sum[i] += y * y
                    y_count[i] += 1
                last_gen[i] = slot

        # classify what each delivery left behind, arrivals of this slot included
        for i in delivered_now:
            logs[i].left_empty.append(queues[i].occupancy() == 0)

        if rec:
            for i in range(n):
                trackers[i].sample(slot)

    per_source = []
    for i in range(n):
        q = queues[i]
        generated = q.generated - base_generated[i]
        delivered = q.delivered - base_delivered[i]
        dropped = q.dropped - base_dropped[i]
        log = logs[i]
        m = len(log.gen_slots)
        if m >= 2:
            est_yt, est_zt = sample_path_estimators(log, window)
        else:
            est_yt = est_zt = _NAN
        if m:
            mean_t = sum(
                r - g for g, r in zip(log.gen_slots, log.recv_slots)
            ) / m
        else:
            mean_t = _NAN
        yc = y_count[i]
        mean_y = y_sum[i] / yc if yc else _NAN
        mean_y2 = y2_sum[i] / yc if yc else _NAN
        total = sum(occ_counts[i])
        hist = {
            o: c / total for o, c in enumerate(occ_counts[i]) if c
        }
        per_source.append(
            SourceMetrics(
                source_id=i,
                avg_aoi=trackers[i].age_sum / window,
                generated=generated,
                delivered=delivered,
                dropped=dropped,
                in_system_at_end=q.occupancy(),
                informative=informative[i],
                obsolete=obsolete[i],
                empirical_drop_prob=dropped / generated if generated else 0.0,
                empirical_effective_rate=delivered / window,
                occupancy_hist=hist,
                estimator_yt=est_yt,
                estimator_zt=est_zt,
                mean_system_time=mean_t,
                mean_interarrival=mean_y,
                mean_interarrival_sq=mean_y2,
                stability_warning=(
                    config.discipline is Discipline.FIFO
                    and lambdas[i] >= _service_share(config, i) - 1e-12
                ),
            )
        )
    report = MetricsReport(config=config, window=window, per_source=tuple(per_source))
    return report, logs


def run(config: SimConfig) -> MetricsReport:
    """Run one simulation and return its metrics."""
    return run_with_logs(config)[0]


def dedicated_channel_run(
    params: QueueParams,
    discipline: Discipline,
    horizon: int = 1_000_000,
    seed: int = 0,
) -> MetricsReport:
    """Single source granted every slot, per-attempt success ``params.mu``."""
    config = SimConfig(
        n_sources=1,
        lambdas=(params.lam,),
        discipline=discipline,
        policy=PolicyConfig(PolicyKind.ROUND_ROBIN),
        channel=ChannelConfig(ChannelKind.ERASURE, service_probs=(params.mu,)),
        horizon=horizon,
        seed=seed,
    )
    return run(config)

"""Analytic communication/computation cost model.

All internal units are SI: W, Hz, s, J, bits.  CLI-facing configs may carry
dBm / MHz / ms and are converted once at the boundary (`LinkModel.from_config`).
"""

import math
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from typing import List, Optional, Sequence

from .compressor import DEFAULT_MAX_ROUND, compress
from .errors import ValidationError
from .kg import Corpus
from .probgraph import ProbabilityGraph


@dataclass(frozen=True)
class LinkModel:
    """Static channel and compute parameters for the BS-to-user link."""

    bandwidth_hz: float = 10e6
    path_gain: float = 1e-6
    noise_power_w: float = 1e-10
    bits_per_field: int = 24
    p_max_w: float = 1.0  # 30 dBm
    latency_budget_s: float = 1e-3
    compute_capacity: float = 1e9  # cycles/s
    tau1: float = 1e3  # cycles per comparison
    tau2: float = 1e-28  # effective-capacitance energy coefficient

    def __post_init__(self):
        for name in ("bandwidth_hz", "path_gain", "noise_power_w",
                     "bits_per_field", "p_max_w", "latency_budget_s",
                     "compute_capacity", "tau1", "tau2"):
            if getattr(self, name) <= 0:
                raise ValidationError("%s must be strictly positive" % name)

    @classmethod
    def from_config(cls, cfg: dict) -> "LinkModel":
        """Build from a flat config dict, converting MHz/dBm/ms to SI."""
        kwargs = {}
        if "bandwidth_mhz" in cfg:
            kwargs["bandwidth_hz"] = float(cfg["bandwidth_mhz"]) * 1e6
        if "p_max_dbm" in cfg:
            kwargs["p_max_w"] = dbm_to_watts(float(cfg["p_max_dbm"]))
        if "latency_budget_ms" in cfg:
            kwargs["latency_budget_s"] = float(cfg["latency_budget_ms"]) * 1e-3
        direct = {"noise_w": "noise_power_w", "path_gain": "path_gain",
                  "bits_per_field": "bits_per_field", "f_hz": "compute_capacity",
                  "tau1": "tau1", "tau2": "tau2"}
        for key, attr in direct.items():
            if key in cfg:
                value = cfg[key]
                kwargs[attr] = int(value) if attr == "bits_per_field" else float(value)
        return cls(**kwargs)


def _to_fraction(value) -> Fraction:
    """Exact rational view; float literals are read at decimal face value."""
    if isinstance(value, float):
        return Fraction(Decimal(str(value)))
    return Fraction(value)


def dbm_to_watts(dbm: float) -> float:
    return 10 ** ((dbm - 30.0) / 10.0)


def capacity(link: LinkModel, p: float) -> float:
    """Shannon capacity in bits/s at transmit power p."""
    if p < 0:
        raise ValidationError("transmit power must be non-negative")
    snr = p * link.path_gain / link.noise_power_w
    return link.bandwidth_hz * math.log2(1.0 + snr)


def payload_bits(link: LinkModel, m: float, e: float) -> float:
    """Encoded message size: 3m field slots minus the e omitted relations."""
    if not 0 <= e <= m:
        raise ValidationError("omission count must satisfy 0 <= E <= M")
    return link.bits_per_field * (3 * m - e)


def comm_latency(link: LinkModel, m: float, e: float, p: float) -> float:
    """Transmission time; inf at p = 0 so callers can treat it as infeasible."""
    bits = payload_bits(link, m, e)
    c = capacity(link, p)
    if c == 0.0:
        return math.inf
    return bits / c


class OmissionProfile:
    """Per-stage omission ratios and the piecewise-linear comparison load.

    Stage caps follow the recursion E_1 = M q_1, E_n = (M - sum E_k) q_n.
    The load is linear with slope 1/q_1 up to E_1, then slope E_{n-1}/q_n on
    each later stage interval; it is continuous and nondecreasing by
    construction.  Computed in exact rational arithmetic internally.
    """

    def __init__(self, m_total: float, q: Sequence[float]):
        if m_total <= 0:
            raise ValidationError("m_total must be positive")
        for value in q:
            if not 0 < value <= 1:
                raise ValidationError("omission ratios must lie in (0, 1]")
        self._m = _to_fraction(m_total)
        self._q = [_to_fraction(v) for v in q]

        self._caps: List[Fraction] = []
        remaining = self._m
        for qn in self._q:
            cap = remaining * qn
            self._caps.append(cap)
            remaining -= cap

        self._breaks: List[Fraction] = []
        acc = Fraction(0)
        for cap in self._caps:
            acc += cap
            self._breaks.append(acc)

        # load value at each breakpoint, anchored cumulatively
        self._anchors: List[Fraction] = []
        value = Fraction(0)
        prev_break = Fraction(0)
        for n, cap in enumerate(self._caps):
            slope = 1 / self._q[0] if n == 0 else self._caps[n - 1] / self._q[n]
            value += (self._breaks[n] - prev_break) * slope
            self._anchors.append(value)
            prev_break = self._breaks[n]

    @property
    def m_total(self) -> float:
        return float(self._m)

    @property
    def q(self) -> List[float]:
        return [float(v) for v in self._q]

    @property
    def e_caps(self) -> List[float]:
        return [float(c) for c in self._caps]

    @property
    def breakpoints(self) -> List[float]:
        return [float(b) for b in self._breaks]

    @property
    def total_omissible(self) -> float:
        return float(self._breaks[-1]) if self._breaks else 0.0

    def load_exact(self, e) -> Fraction:
        """Comparison count for e omissions, as an exact rational."""
        e = _to_fraction(e)
        if e < 0:
            raise ValidationError("omission count must be non-negative")
        if e == 0:
            return Fraction(0)
        if not self._breaks or e > self._breaks[-1]:
            raise ValidationError("omission count beyond the reachable total")
        prev_break = Fraction(0)
        prev_value = Fraction(0)
        for n, brk in enumerate(self._breaks):
            if e <= brk:
                slope = (1 / self._q[0] if n == 0
                         else self._caps[n - 1] / self._q[n])
                return prev_value + (e - prev_break) * slope
            prev_break, prev_value = brk, self._anchors[n]
        raise AssertionError("unreachable")

    def load(self, e: float) -> float:
        """Float view of load_exact; inf beyond the last breakpoint."""
        if e < 0:
            raise ValidationError("omission count must be non-negative")
        if e == 0:
            return 0.0
        if not self._breaks or _to_fraction(e) > self._breaks[-1]:
            return math.inf
        return float(self.load_exact(e))


def comp_latency(link: LinkModel, profile: OmissionProfile, e: float) -> float:
    return link.tau1 * profile.load(e) / link.compute_capacity


def energies(link: LinkModel, profile: OmissionProfile,
             m: float, e: float, p: float):
    """(communication energy, computation energy) in joules."""
    t1 = comm_latency(link, m, e, p)
    e1 = t1 * p if math.isfinite(t1) else math.inf
    e2 = link.tau1 * link.tau2 * profile.load(e) * link.compute_capacity ** 2
    return e1, e2


def estimate_q(g: ProbabilityGraph, corpus: Corpus,
               max_round: int = DEFAULT_MAX_ROUND,
               m_total: Optional[float] = None) -> OmissionProfile:
    """Measure per-stage omission ratios by compressing every corpus sample.

    Stages are aligned across samples by (round, cycle) position;
    ratios are pooled counts (total omitted / total candidates entering the
    stage).  Stages that omit nothing overall are dropped, so the profile
    only covers productive stages.
    """
    if corpus.n_samples == 0 or corpus.n_triples() == 0:
        raise ValidationError("corpus yields no triples")

    pooled = {}  # (round, cycle) -> [candidates, omitted]
    for kg in corpus.samples:
        _, report = compress(g, kg, max_round=max_round)
        for stage in report.stages:
            acc = pooled.setdefault((stage.round, stage.cycle), [0, 0])
            acc[0] += stage.candidates
            acc[1] += stage.omitted

    q = []
    for key in sorted(pooled):
        candidates, omitted = pooled[key]
        if candidates == 0 or omitted == 0:
            continue
        q.append(Fraction(omitted, candidates))

    if m_total is None:
        m_total = Fraction(corpus.n_triples(), corpus.n_samples)
    return OmissionProfile(m_total, q)

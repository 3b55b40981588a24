"""Pulse-level Monte-Carlo run of the quantum exchange up to the sifted key.

Each pulse: Alice draws an intensity class and a (basis, bit) pair; the photon
number is Poisson with the class mean. Bob draws a basis and one of the two
settings of his B92-like measurement. On a matched basis with the setting
equal to Alice's bit, the ``k`` photons produce a click with probability
``1 - (1 - eta*T*sin^2(dphi/2))^k``; dark counts add ``p_d`` to the click
probability on every pulse. A click asserts the bit equal to Bob's setting.
Sifting keeps clicks on matched bases.

Randomness comes from one stream per block of ``block_size`` pulses, keyed
by ``(seed, block index)``, so results do not depend on how blocks are
scheduled across worker threads.
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields

import numpy as np

from .channel import ChannelParams, detect_prob_k, photon_detection_prob
from .decoy import CLASSES, ClassObservation, IntensitySet, ObservedStats
from .errors import DomainError, SimulationError
from .states import GusParams
from .validation import binomial_z

TRANSCRIPT_COLUMNS = (
    "class", "alice_basis", "alice_bit", "photon_number", "bob_basis", "bob_setting", "clicked", "sifted", "error",
)


@dataclass(frozen=True)
class SessionConfig:
    gus: GusParams = field(default_factory=GusParams)
    intensities: IntensitySet = field(default_factory=IntensitySet)
    channel: ChannelParams = field(default_factory=ChannelParams)
    n_pulses: int = 1_000_000
    seed: int = 0
    block_size: int = 1 << 20

    def __post_init__(self):
        if self.n_pulses < 1:
            raise DomainError(f"need at least one pulse, got {self.n_pulses}")
        if self.block_size < 1:
            raise DomainError(f"block size must be positive, got {self.block_size}")
        if not 0 <= self.seed < 2**64:
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    @property
    def n_blocks(self) -> int:
        return -(-self.n_pulses // self.block_size)


@dataclass(frozen=True)
class PulseRecord:
    cls: str
    alice_basis: int
    alice_bit: int
    photon_number: int
    bob_basis: int
    bob_setting: int
    clicked: bool
    sifted: bool
    error: bool

    def __post_init__(self):
        if self.sifted and not (self.clicked and self.alice_basis == self.bob_basis):
            raise DomainError("a sifted pulse must have clicked on a matched basis")
        if self.error != (self.sifted and self.bob_setting != self.alice_bit):
            raise DomainError("error flag must mark sifted pulses whose setting differs from the bit")


@dataclass
class SessionResult:
    """Tallies and sifted keys of one session.

    Per-class arrays are indexed like :data:`gusqkd.decoy.CLASSES`. ``per_k``
    has one row per photon number with ``(matched pulses, sifted clicks,
    sifted errors)``.
    """

    emitted: np.ndarray
    matched: np.ndarray
    clicks: np.ndarray
    errors: np.ndarray
    mismatch_clicks: np.ndarray
    per_k: np.ndarray
    sifted_key_alice: np.ndarray
    sifted_key_bob: np.ndarray
    sifted_class: np.ndarray
    sifted_index: np.ndarray
    transcript: dict | None = None

    @property
    def stats(self) -> ObservedStats:
        return collect_stats(self)

    @property
    def per_k_tallies(self) -> dict[int, tuple[int, int, int]]:
        return {k: tuple(int(v) for v in row) for k, row in enumerate(self.per_k) if row[0] > 0}

    def equals(self, other: "SessionResult") -> bool:
        return all(
            np.array_equal(getattr(self, f.name), getattr(other, f.name))
            for f in fields(self)
            if f.name != "transcript"
        )

    @classmethod
    def from_records(cls, records) -> "SessionResult":
        """Tally a hand-written transcript of :class:`PulseRecord` objects."""
        records = list(records)
        index = {name: i for i, name in enumerate(CLASSES)}
        emitted, matched, clicks, errors, mismatch = (np.zeros(3, dtype=np.int64) for _ in range(5))
        k_max = max((r.photon_number for r in records), default=0)
        per_k = np.zeros((k_max + 1, 3), dtype=np.int64)
        key_a, key_b, key_cls, key_idx = [], [], [], []
        for i, r in enumerate(records):
            c = index[r.cls]
            emitted[c] += 1
            if r.alice_basis == r.bob_basis:
                matched[c] += 1
                per_k[r.photon_number, 0] += 1
            elif r.clicked:
                mismatch[c] += 1
            if r.sifted:
                clicks[c] += 1
                errors[c] += r.error
                per_k[r.photon_number, 1] += 1
                per_k[r.photon_number, 2] += r.error
                key_a.append(r.alice_bit)
                key_b.append(r.bob_setting)
                key_cls.append(c)
                key_idx.append(i)
        return cls(
            emitted,
            matched,
            clicks,
            errors,
            mismatch,
            per_k,
            np.array(key_a, dtype=np.uint8),
            np.array(key_b, dtype=np.uint8),
            np.array(key_cls, dtype=np.uint8),
            np.array(key_idx, dtype=np.int64),
        )


def _block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(block,))))


def _simulate_block(config: SessionConfig, block: int, keep_transcript: bool) -> dict:
    start = block * config.block_size
    size = min(config.block_size, config.n_pulses - start)
    rng = _block_rng(config.seed, block)
    n_bases = config.gus.n_bases
    means = np.array(config.intensities.total_means)
    cumulative = np.cumsum(config.intensities.class_probabilities)

    cls = np.minimum(np.searchsorted(cumulative, rng.random(size), side="right"), 2).astype(np.uint8)
    alice_basis = rng.integers(0, n_bases, size, dtype=np.int16)
    alice_bit = rng.integers(0, 2, size, dtype=np.uint8)
    photons = rng.poisson(means[cls])
    bob_basis = rng.integers(0, n_bases, size, dtype=np.int16)
    bob_setting = rng.integers(0, 2, size, dtype=np.uint8)
    u = rng.random(size)

    channel = config.channel
    x = photon_detection_prob(config.gus, channel)
    signal = -np.expm1(photons * np.log1p(-x)) if x < 1 else (photons > 0).astype(float)
    matched = alice_basis == bob_basis
    correct = bob_setting == alice_bit
    e_mis = channel.misalignment_error
    signal_click = np.where(matched, np.where(correct, (1.0 - e_mis) * signal, e_mis * signal), 0.0)
    clicked = u < channel.dark_count_prob + signal_click
    sifted = clicked & matched
    error = sifted & ~correct

    k_len = int(photons.max(initial=0)) + 1
    out = {
        "emitted": np.bincount(cls, minlength=3),
        "matched": np.bincount(cls[matched], minlength=3),
        "clicks": np.bincount(cls[sifted], minlength=3),
        "errors": np.bincount(cls[error], minlength=3),
        "mismatch_clicks": np.bincount(cls[clicked & ~matched], minlength=3),
        "per_k": np.stack(
            [
                np.bincount(photons[matched], minlength=k_len),
                np.bincount(photons[sifted], minlength=k_len),
                np.bincount(photons[error], minlength=k_len),
            ],
            axis=1,
        ),
        "sifted_key_alice": alice_bit[sifted],
        "sifted_key_bob": bob_setting[sifted],
        "sifted_class": cls[sifted],
        "sifted_index": np.nonzero(sifted)[0].astype(np.int64) + start,
    }
    if keep_transcript:
        out["transcript"] = {
            "class": cls,
            "alice_basis": alice_basis,
            "alice_bit": alice_bit,
            "photon_number": photons,
            "bob_basis": bob_basis,
            "bob_setting": bob_setting,
            "clicked": clicked,
            "sifted": sifted,
            "error": error,
        }
    return out


def _merge(blocks: list[dict]) -> SessionResult:
    k_len = max(b["per_k"].shape[0] for b in blocks)
    per_k = np.zeros((k_len, 3), dtype=np.int64)
    for b in blocks:
        per_k[: b["per_k"].shape[0]] += b["per_k"]
    transcript = None
    if "transcript" in blocks[0]:
        transcript = {key: np.concatenate([b["transcript"][key] for b in blocks]) for key in TRANSCRIPT_COLUMNS}
    return SessionResult(
        emitted=sum(b["emitted"] for b in blocks).astype(np.int64),
        matched=sum(b["matched"] for b in blocks).astype(np.int64),
        clicks=sum(b["clicks"] for b in blocks).astype(np.int64),
        errors=sum(b["errors"] for b in blocks).astype(np.int64),
        mismatch_clicks=sum(b["mismatch_clicks"] for b in blocks).astype(np.int64),
        per_k=per_k,
        sifted_key_alice=np.concatenate([b["sifted_key_alice"] for b in blocks]),
        sifted_key_bob=np.concatenate([b["sifted_key_bob"] for b in blocks]),
        sifted_class=np.concatenate([b["sifted_class"] for b in blocks]),
        sifted_index=np.concatenate([b["sifted_index"] for b in blocks]),
        transcript=transcript,
    )


def run_session(config: SessionConfig, workers: int = 1, keep_transcript: bool = False) -> SessionResult:
    """Simulate ``config.n_pulses`` pulses; identical configs give identical results for any ``workers``."""
    try:
        if workers <= 1:
            blocks = [_simulate_block(config, b, keep_transcript) for b in range(config.n_blocks)]
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                blocks = list(pool.map(lambda b: _simulate_block(config, b, keep_transcript), range(config.n_blocks)))
        return _merge(blocks)
    except MemoryError as exc:
        raise SimulationError(
            f"out of memory simulating {config.n_pulses} pulses; reduce block_size or disable the transcript"
        ) from exc


def collect_stats(result: SessionResult) -> ObservedStats:
    """Matched-basis click fraction and sifted QBER per class.

    A class that received no matched-basis pulses comes back with
    ``usable == False``.
    """
    return ObservedStats(
        *(
            ClassObservation.from_counts(int(result.matched[i]), int(result.clicks[i]), int(result.errors[i]))
            for i in range(3)
        )
    )


@dataclass(frozen=True)
class YieldCheck:
    z_scores: dict[int, float]
    max_abs_z: float
    threshold: float

    @property
    def consistent(self) -> bool:
        return self.max_abs_z < self.threshold


def per_k_yield_check(
    result: SessionResult, channel: ChannelParams, gus: GusParams, threshold: float = 5.0
) -> YieldCheck:
    """Compare the empirical click fraction of each photon number with the per-``k`` model."""
    z = {}
    for k, (pulses, clicks, _) in result.per_k_tallies.items():
        z[k] = binomial_z(clicks, pulses, detect_prob_k(k, gus, channel))
    max_z = max((abs(v) for v in z.values()), default=0.0)
    return YieldCheck(z, max_z, threshold)


def transcript_csv(result: SessionResult) -> str:
    """Line-per-pulse CSV of a session run with ``keep_transcript=True``."""
    if result.transcript is None:
        raise DomainError("session was run without keep_transcript")
    t = result.transcript
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TRANSCRIPT_COLUMNS)
    for i in range(len(t["class"])):
        writer.writerow(
            [CLASSES[t["class"][i]]]
            + [int(t[name][i]) for name in TRANSCRIPT_COLUMNS[1:]]
        )
    return buf.getvalue()

"""Input sequences and predictions.

Random streams come from numpy's PCG64. Evolving sequences draw every epoch
from its own child stream (``SeedSequence.spawn``), so an epoch's content does
not depend on how many epochs precede it.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .core import FrequencyVector, frequencies, l1_error

DEFAULT_EPOCH = 50_000
SHAPE_RANGE = (1.0, 4.0)
PREFIX_RANGE = (25, 125)


class Mode(str, enum.Enum):
    FIXED_WEIBULL = "FixedWeibull"
    FIXED_FILE = "FixedFile"
    EVOLVING_WEIBULL = "EvolvingWeibull"
    EVOLVING_FILES = "EvolvingFiles"
    ADVERSARIAL = "Adversarial"


@dataclass(frozen=True)
class WeibullSpec:
    shape: float = 3.0
    scale: float = 1000.0
    seed: int = 0

    def __post_init__(self):
        if not self.shape > 0 or not self.scale > 0:
            raise ValueError("Weibull shape and scale must be positive")


@dataclass
class BenchmarkFile:
    path: str
    n_declared: int
    capacity_declared: int
    sizes: list[int]


@dataclass
class SequenceSpec:
    mode: Mode = Mode.FIXED_WEIBULL
    n: int = 100_000
    k: int = 100
    epoch: int = DEFAULT_EPOCH
    seed: int = 0
    shape: float = 3.0
    scale: float = 1000.0
    # Weibull scaling divisor: "max" (sample maximum, per epoch when evolving),
    # "scale" (the Weibull scale), or an explicit positive number
    divisor: str | float | None = "max"
    variant: str = "sigma1"  # Adversarial: sigma1 | sigma2
    sources: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.mode = Mode(self.mode)
        if self.n < 1:
            raise ValueError("sequence length must be at least 1")
        if self.epoch < 1:
            raise ValueError("epoch length must be at least 1")
        if self.divisor is None:
            self.divisor = "max"
        if isinstance(self.divisor, str) and self.divisor not in ("max", "scale"):
            try:
                self.divisor = float(self.divisor)
            except ValueError:
                raise ValueError(f"unknown divisor {self.divisor!r}") from None
        if not isinstance(self.divisor, str) and not self.divisor > 0:
            raise ValueError("scaling divisor must be positive")

    @property
    def is_weibull(self) -> bool:
        return self.mode in (Mode.FIXED_WEIBULL, Mode.EVOLVING_WEIBULL)

    def divisor_for(self, values: np.ndarray) -> float:
        if self.divisor == "max":
            return float(values.max())
        if self.divisor == "scale":
            return float(self.scale)
        return float(self.divisor)


def weibull_from_uniform(u, shape: float, scale: float) -> np.ndarray:
    """Inverse Weibull CDF applied to uniforms in [0, 1)."""
    v = scale * np.power(-np.log1p(-np.asarray(u, dtype=float)), 1.0 / shape)
    return np.maximum(v, np.finfo(float).tiny)


def sample_weibull(spec: WeibullSpec, count: int, rng: np.random.Generator | None = None) -> np.ndarray:
    if count < 1:
        raise ValueError("count must be at least 1")
    if rng is None:
        rng = np.random.default_rng(spec.seed)
    return weibull_from_uniform(rng.random(count), spec.shape, spec.scale)


def scale_to_capacity(values, source_cap: float, k: int) -> np.ndarray:
    """Round ``v * k / source_cap`` half away from zero and clamp into [1, k]."""
    if not source_cap > 0:
        raise ValueError("source capacity must be positive")
    v = np.asarray(values, dtype=float) * k / source_cap
    return np.clip(np.floor(v + 0.5), 1, k).astype(np.int64)


def load_bpplib(path) -> BenchmarkFile:
    """Parse a BPPLIB text instance: item count, capacity, then one size per line."""
    text = Path(path).read_text()
    lines = [ln.strip() for ln in text.splitlines()]
    # drop trailing blank lines only; blank lines in the body are errors
    while lines and not lines[-1]:
        lines.pop()

    def integer(lineno):
        if lineno > len(lines):
            raise ValueError(f"{path}: line {lineno}: unexpected end of file")
        tok = lines[lineno - 1]
        try:
            return int(tok)
        except ValueError:
            raise ValueError(f"{path}: line {lineno}: expected an integer, got {tok!r}") from None

    n = integer(1)
    cap = integer(2)
    if n < 0:
        raise ValueError(f"{path}: line 1: negative item count")
    if cap < 1:
        raise ValueError(f"{path}: line 2: capacity must be positive")
    sizes = []
    for i in range(n):
        lineno = 3 + i
        s = integer(lineno)
        if not 1 <= s <= cap:
            raise ValueError(f"{path}: line {lineno}: size {s} outside [1, {cap}]")
        sizes.append(s)
    if len(lines) > 2 + n:
        raise ValueError(f"{path}: line {3 + n}: more sizes than declared ({n})")
    return BenchmarkFile(str(path), n, cap, sizes)


def write_bpplib(path, sizes: Sequence[int], capacity: int) -> None:
    """Write sizes in the same grammar :func:`load_bpplib` reads."""
    body = "".join(f"{int(s)}\n" for s in sizes)
    Path(path).write_text(f"{len(sizes)}\n{int(capacity)}\n{body}", newline="\n")


def adversarial_sigma1(n: int, k: int) -> list[int]:
    """n items of size 1 followed by n of size k - 1 (optimum: n bins)."""
    return [1] * n + [k - 1] * n


def adversarial_sigma2(n: int, k: int) -> list[int]:
    """2n items of size 1 (optimum: 2n / k bins when k divides 2n)."""
    return [1] * (2 * n)


def adversarial_prediction(k: int) -> FrequencyVector:
    """Half the mass on size 1 and half on size k - 1."""
    if k < 3:
        raise ValueError("adversarial prediction needs k >= 3")
    return FrequencyVector.from_dict({1: 0.5, k - 1: 0.5}, k)


def fractional_fixture(n: int, k: int, eps: float) -> list[float]:
    """n items just below k/2 then n just above; optimum n bins.

    The summed distance to the nearest integer is ``eps * k``, i.e. ``eps``
    measured in bin capacities.

    Rounded to integers every item is k/2, so a prediction putting all mass
    on k/2 is error-free.
    """
    delta = eps * k / (2 * n)
    return [k / 2 - delta] * n + [k / 2 + delta] * n


def rounding_deviation(sequence) -> float:
    """Sum of distances to the nearest integer (the naive deviation measure)."""
    return math.fsum(abs(float(v) - round(float(v))) for v in sequence)


def _load_sources(sources) -> list[BenchmarkFile]:
    out = []
    for s in sources:
        out.append(s if isinstance(s, BenchmarkFile) else load_bpplib(s))
    if not out:
        raise ValueError("file modes need at least one benchmark source")
    return out


def _epoch_lengths(n: int, epoch: int) -> list[int]:
    full, rest = divmod(n, epoch)
    return [epoch] * full + ([rest] if rest else [])


def _sample_file(bf: BenchmarkFile, count: int, k: int, rng) -> np.ndarray:
    sizes = np.asarray(bf.sizes, dtype=float)
    picks = sizes[rng.integers(0, len(sizes), size=count)]
    return scale_to_capacity(picks, bf.capacity_declared, k)


def make_sequence(spec: SequenceSpec, sources=None) -> np.ndarray:
    """Generate the item sequence described by ``spec`` as an int64 array."""
    return generate(spec, sources)[0]


def generate(spec: SequenceSpec, sources=None) -> tuple[np.ndarray, float]:
    """Sequence plus the Weibull scaling divisor used (NaN for other modes).

    Evolving sequences are scaled epoch by epoch; the reported divisor is
    then the mean over epochs (see :func:`epoch_divisors` for each one).
    """
    seq, divs = _generate(spec, sources)
    return seq, float(np.mean(divs)) if divs else float("nan")


def epoch_divisors(spec: SequenceSpec) -> list[float]:
    return _generate(spec)[1]


def _generate(spec: SequenceSpec, sources=None):
    n, k = spec.n, spec.k
    mode = spec.mode
    if mode is Mode.ADVERSARIAL:
        half = n // 2
        if 2 * half != n:
            raise ValueError("adversarial sequences need an even length")
        if spec.variant == "sigma1":
            return np.asarray(adversarial_sigma1(half, k), dtype=np.int64), []
        if spec.variant == "sigma2":
            return np.asarray(adversarial_sigma2(half, k), dtype=np.int64), []
        raise ValueError(f"unknown adversarial variant {spec.variant!r}")

    root = np.random.SeedSequence(spec.seed)
    if mode is Mode.FIXED_WEIBULL:
        rng = np.random.default_rng(root)
        vals = weibull_from_uniform(rng.random(n), spec.shape, spec.scale)
        d = spec.divisor_for(vals)
        return scale_to_capacity(vals, d, k), [d]
    if mode is Mode.FIXED_FILE:
        files = _load_sources(sources if sources is not None else spec.sources)
        rng = np.random.default_rng(root)
        bf = files[rng.integers(0, len(files))]
        return _sample_file(bf, n, k, rng), []

    lengths = _epoch_lengths(n, spec.epoch)
    children = root.spawn(len(lengths))
    parts, divs = [], []
    if mode is Mode.EVOLVING_WEIBULL:
        for length, child in zip(lengths, children):
            rng = np.random.default_rng(child)
            shape = rng.uniform(*SHAPE_RANGE)
            vals = weibull_from_uniform(rng.random(length), shape, spec.scale)
            d = spec.divisor_for(vals)
            divs.append(d)
            parts.append(scale_to_capacity(vals, d, k))
    elif mode is Mode.EVOLVING_FILES:
        files = _load_sources(sources if sources is not None else spec.sources)
        for length, child in zip(lengths, children):
            rng = np.random.default_rng(child)
            bf = files[rng.integers(0, len(files))]
            parts.append(_sample_file(bf, length, k, rng))
    return np.concatenate(parts), divs


def epoch_shapes(spec: SequenceSpec) -> list[float]:
    """Shape parameter drawn for each epoch of an EvolvingWeibull spec."""
    lengths = _epoch_lengths(spec.n, spec.epoch)
    children = np.random.SeedSequence(spec.seed).spawn(len(lengths))
    return [float(np.random.default_rng(c).uniform(*SHAPE_RANGE)) for c in children]


def prefix_size(i: int) -> int:
    """floor(100 * 1.05**i), computed exactly."""
    return 100 * 105**i // 100**i


def prefix_sizes(i_lo: int = PREFIX_RANGE[0], i_hi: int = PREFIX_RANGE[1]) -> list[int]:
    return [prefix_size(i) for i in range(i_lo, i_hi + 1)]


def prefix_prediction(sequence, b: int, k: int, truth: FrequencyVector | None = None):
    """Prediction from the first ``b`` items and its L1 error against the whole sequence."""
    seq = np.asarray(sequence)
    if not 1 <= b <= len(seq):
        raise ValueError(f"prefix size {b} outside [1, {len(seq)}]")
    f_pred = frequencies(seq[:b], k)
    f = truth if truth is not None else frequencies(seq, k)
    return f_pred, l1_error(f, f_pred)


def export_sequence(path, sequence, k: int) -> None:
    write_bpplib(path, list(sequence), k)


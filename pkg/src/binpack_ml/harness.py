"""Experiment runner: configuration, dispatch, timing and CSV persistence.

Config files are plain ``key = value`` lines; ``#`` starts a comment.
``algorithm`` and ``source`` may repeat. Algorithm and prediction values are
a name followed by ``key=value`` parameters::

    mode = FixedWeibull
    n = 100000
    k = 100
    prediction = prefix_sweep i_lo=25 i_hi=125
    algorithm = firstfit
    algorithm = hybrid lambda_num=1 lambda_den=2 m=5000 robust=firstfit
    repetitions = 1
    base_seed = 0
    output = results.csv
"""

from __future__ import annotations

import csv
import hashlib
import io
import math
import os
import time
import warnings
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from fractions import Fraction
from pathlib import Path

import numpy as np

from .adaptive import adaptive
from .classic import best_fit, first_fit, l2_bound
from .core import FrequencyVector, frequencies, l1_error
from .hybrid import h_aware, hybrid
from .profile import DEFAULT_M, profile_packing
from .workload import (
    Mode,
    SequenceSpec,
    adversarial_prediction,
    generate,
    prefix_prediction,
    prefix_sizes,
)

VERSION_LINE = "#binpack-ml v1"
CSV_FIELDS = ["algorithm", "params", "n", "k", "m", "seed", "b", "eta", "cost", "l2",
              "runtime_ms", "scaling_divisor"]

# name -> (needs prediction, default params)
ALGORITHMS = {
    "firstfit": (False, {}),
    "bestfit": (False, {}),
    "profilepacking": (True, {"m": DEFAULT_M, "packer": "ffd"}),
    "hybrid": (True, {"lambda_num": 1, "lambda_den": 2, "m": DEFAULT_M, "robust": "firstfit"}),
    "haware": (True, {"H": 0.0, "eps": 0.1, "cA": 1.7, "m": DEFAULT_M}),
    "adaptive": (False, {"w": 5000, "m": DEFAULT_M, "replan": "on-demand"}),
}
PREDICTIONS = {
    "oracle": {},
    "prefix": {"b": 1000},
    "prefix_sweep": {"i_lo": 25, "i_hi": 125},
    "adversarial": {},
    "none": {},
}


class ConfigError(ValueError):
    pass


def env_threads(default: int = 1) -> int:
    raw = os.environ.get("BINPACK_THREADS")
    if not raw:
        return default
    try:
        return max(1, int(raw))
    except ValueError:
        raise ConfigError(f"BINPACK_THREADS must be an integer, got {raw!r}") from None


@dataclass
class AlgorithmSpec:
    name: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.name not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.name!r}")
        defaults = ALGORITHMS[self.name][1]
        unknown = set(self.params) - set(defaults)
        if unknown:
            raise ConfigError(f"{self.name}: unknown parameters {sorted(unknown)}")
        self.params = {**defaults, **self.params}

    @property
    def needs_prediction(self) -> bool:
        return ALGORITHMS[self.name][0]

    def flat_params(self) -> str:
        return ";".join(f"{key}={self.params[key]}" for key in sorted(self.params))


@dataclass
class ExperimentConfig:
    sequence: SequenceSpec
    algorithms: list[AlgorithmSpec]
    prediction: str = "none"
    prediction_params: dict = field(default_factory=dict)
    output_path: str | None = None
    repetitions: int = 1
    base_seed: int = 0

    def __post_init__(self):
        if self.prediction not in PREDICTIONS:
            raise ConfigError(f"unknown prediction mode {self.prediction!r}")
        self.prediction_params = {**PREDICTIONS[self.prediction], **self.prediction_params}
        if self.repetitions < 1:
            raise ConfigError("repetitions must be at least 1")
        if not self.algorithms:
            raise ConfigError("no algorithms configured")
        for a in self.algorithms:
            if a.needs_prediction and self.prediction == "none":
                raise ConfigError(f"{a.name} needs a prediction mode other than 'none'")


@dataclass
class ExperimentRecord:
    algorithm: str
    params: str
    n: int
    k: int
    m: int
    seed: int
    b: int
    eta: float
    cost: int
    l2: int
    runtime_ms: float
    scaling_divisor: float
    checksum: str = field(default="", compare=False)

    def row(self) -> list[str]:
        return [self.algorithm, self.params, str(self.n), str(self.k), str(self.m), str(self.seed),
                str(self.b), repr(float(self.eta)), str(self.cost), str(self.l2),
                f"{self.runtime_ms:.3f}", repr(float(self.scaling_divisor))]

    @classmethod
    def from_row(cls, row: dict) -> "ExperimentRecord":
        ints = {"n", "k", "m", "seed", "b", "cost", "l2"}
        floats = {"eta", "runtime_ms", "scaling_divisor"}
        kw = {}
        for key in CSV_FIELDS:
            v = row[key]
            kw[key] = int(v) if key in ints else float(v) if key in floats else v
        return cls(**kw)


def _coerce(v: str):
    for conv in (int, float):
        try:
            return conv(v)
        except ValueError:
            pass
    return v


def _name_and_params(value: str) -> tuple[str, dict]:
    parts = value.split()
    if not parts:
        raise ConfigError("empty value")
    params = {}
    for tok in parts[1:]:
        if "=" not in tok:
            raise ConfigError(f"expected key=value, got {tok!r}")
        key, v = tok.split("=", 1)
        params[key] = _coerce(v)
    return parts[0], params


SEQUENCE_KEYS = {"mode": str, "n": int, "k": int, "epoch": int, "seed": int, "shape": float,
                 "scale": float, "divisor": str, "variant": str}


def _lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        yield lineno, key, value


def _sequence_spec(seq_kw: dict, sources: list) -> SequenceSpec:
    try:
        return SequenceSpec(**seq_kw, sources=sources)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def parse_sequence_spec(text: str, base_dir: str | os.PathLike = ".") -> SequenceSpec:
    """Sequence-only variant of :func:`parse_config` (used by ``generate``)."""
    seq_kw, sources = {}, []
    for lineno, key, value in _lines(text):
        if key in SEQUENCE_KEYS:
            try:
                seq_kw[key] = SEQUENCE_KEYS[key](value)
            except ValueError as exc:
                raise ConfigError(f"line {lineno}: {exc}") from None
        elif key == "source":
            sources.append(str(Path(base_dir, value)))
        else:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
    return _sequence_spec(seq_kw, sources)


def parse_config(text: str, base_dir: str | os.PathLike = ".") -> ExperimentConfig:
    seq_kw: dict = {}
    algorithms, sources = [], []
    prediction, pred_params = "none", {}
    output, reps, base_seed = None, 1, 0
    for lineno, key, value in _lines(text):
        try:
            if key in SEQUENCE_KEYS:
                seq_kw[key] = SEQUENCE_KEYS[key](value)
            elif key == "algorithm":
                algorithms.append(AlgorithmSpec(*_name_and_params(value)))
            elif key == "prediction":
                prediction, pred_params = _name_and_params(value)
            elif key == "source":
                sources.append(str(Path(base_dir, value)))
            elif key == "output":
                output = value
            elif key == "repetitions":
                reps = int(value)
            elif key == "base_seed":
                base_seed = int(value)
            else:
                raise ConfigError(f"unknown key {key!r}")
        except (ConfigError, ValueError) as exc:
            raise ConfigError(f"line {lineno}: {exc}") from None
    seq = _sequence_spec(seq_kw, sources)
    return ExperimentConfig(seq, algorithms, prediction, pred_params, output, reps, base_seed)


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    return parse_config(path.read_text(), path.parent)


def _predictions(config: ExperimentConfig, seq: np.ndarray, truth: FrequencyVector):
    """Yield (b, f_pred, eta) for every prediction cell."""
    k = config.sequence.k
    mode, params = config.prediction, config.prediction_params
    if mode == "oracle":
        return [(-1, truth, 0.0)]
    if mode == "prefix":
        f_pred, eta = prefix_prediction(seq, int(params["b"]), k, truth)
        return [(int(params["b"]), f_pred, eta)]
    if mode == "prefix_sweep":
        out = []
        for b in prefix_sizes(int(params["i_lo"]), int(params["i_hi"])):
            if b > len(seq):
                break
            f_pred, eta = prefix_prediction(seq, b, k, truth)
            out.append((b, f_pred, eta))
        return out
    if mode == "adversarial":
        f_pred = adversarial_prediction(k)
        return [(-1, f_pred, l1_error(truth, f_pred))]
    return []


def _dispatch(algo: AlgorithmSpec, seq, k, f_pred):
    p = algo.params
    if algo.name == "firstfit":
        return first_fit(seq, k)
    if algo.name == "bestfit":
        return best_fit(seq, k)
    if algo.name == "profilepacking":
        return profile_packing(seq, f_pred, int(p["m"]), k, p["packer"])
    if algo.name == "hybrid":
        lam = Fraction(int(p["lambda_num"]), int(p["lambda_den"]))
        return hybrid(seq, f_pred, lam, int(p["m"]), k, p["robust"])
    if algo.name == "haware":
        return h_aware(seq, f_pred, p["H"], p["eps"], p["cA"], int(p["m"]), k)
    if algo.name == "adaptive":
        return adaptive(seq, int(p["w"]), int(p["m"]), k, replan=p["replan"])
    raise ConfigError(f"unknown algorithm {algo.name!r}")


def sequence_checksum(seq) -> str:
    return hashlib.sha256(np.ascontiguousarray(seq, dtype=np.int64).tobytes()).hexdigest()[:16]


def run_repetition(config: ExperimentConfig, r: int, sources=None) -> list[ExperimentRecord]:
    seed = config.base_seed + r
    spec = SequenceSpec(**{f.name: getattr(config.sequence, f.name) for f in fields(SequenceSpec)})
    spec.seed = seed
    seq, divisor = generate(spec, sources)
    items = seq.tolist()
    k, n = spec.k, len(items)
    l2 = l2_bound(items, k)
    checksum = sequence_checksum(seq)
    truth = frequencies(seq, k)
    preds = _predictions(config, seq, truth)
    records = []
    for algo in config.algorithms:
        cells = preds if algo.needs_prediction else [(-1, None, 0.0)]
        for b, f_pred, eta in cells:
            t0 = time.perf_counter()
            packing = _dispatch(algo, items, k, f_pred)
            elapsed = (time.perf_counter() - t0) * 1000
            records.append(ExperimentRecord(
                algorithm=algo.name, params=algo.flat_params(), n=n, k=k,
                m=int(algo.params.get("m", -1)), seed=seed, b=b, eta=float(eta),
                cost=packing.cost(), l2=l2, runtime_ms=round(elapsed, 3),
                scaling_divisor=divisor, checksum=checksum,
            ))
    return records


def _open_csv(path: Path):
    fresh = not path.exists() or path.stat().st_size == 0
    fh = open(path, "a", newline="", encoding="utf-8")
    writer = csv.writer(fh, lineterminator="\n")
    if fresh:
        fh.write(VERSION_LINE + "\n")
        writer.writerow(CSV_FIELDS)
    return fh, writer


def run_experiment(config: ExperimentConfig, sources=None, output_path=None,
                   threads: int | None = None) -> list[ExperimentRecord]:
    """Run every (algorithm, prediction) cell on each repetition's shared sequence.

    Records are appended to the CSV at ``output_path`` (or the config's output)
    in repetition order. If a repetition fails, a ``#partial`` marker line is
    written before the error propagates.
    """
    out = output_path if output_path is not None else config.output_path
    threads = threads if threads is not None else env_threads()
    reps = range(config.repetitions)
    all_records: list[ExperimentRecord] = []
    fh = writer = None
    if out is not None:
        fh, writer = _open_csv(Path(out))
    try:
        if threads > 1 and config.repetitions > 1:
            with ProcessPoolExecutor(max_workers=threads) as pool:
                results = pool.map(run_repetition, [config] * len(reps), reps, [sources] * len(reps))
                for recs in results:
                    all_records.extend(recs)
                    if writer:
                        writer.writerows(rec.row() for rec in recs)
        else:
            for r in reps:
                recs = run_repetition(config, r, sources)
                all_records.extend(recs)
                if writer:
                    writer.writerows(rec.row() for rec in recs)
                    fh.flush()
    except BaseException as exc:
        if fh is not None:
            fh.write(f"#partial {type(exc).__name__}: {exc}\n".replace("\r", " "))
        raise
    finally:
        if fh is not None:
            fh.close()
    return all_records


def read_records(path) -> list[ExperimentRecord]:
    with open(path, newline="", encoding="utf-8") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    return [ExperimentRecord.from_row(row) for row in csv.DictReader(lines)]


def records_to_csv(records) -> str:
    buf = io.StringIO()
    buf.write(VERSION_LINE + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    writer.writerows(r.row() for r in records)
    return buf.getvalue()


def round_error(eta: float) -> float:
    """Error rounded half-up to two decimals."""
    return math.floor(eta * 100 + 0.5 + 1e-9) / 100


def average_by_rounded_error(records) -> list[tuple[float, float]]:
    buckets = defaultdict(list)
    for r in records:
        buckets[round_error(r.eta)].append(r.cost)
    return [(e, sum(c) / len(c)) for e, c in sorted(buckets.items())]


def _params(rec) -> dict:
    return dict(p.split("=", 1) for p in rec.params.split(";") if p)


def emit_plot_data(records, group_by: str = "eta") -> dict[str, str]:
    """Tab-separated (x, mean cost) series, one per algorithm configuration.

    ``group_by`` picks the x column: ``eta``, ``b`` or ``w``. Algorithms
    without that coordinate become flat reference lines spanning the x range,
    and an ``L2`` series is added the same way.
    """
    records = list(records)
    if not records:
        warnings.warn("no records: plot data is empty")
        return {}
    if group_by not in ("eta", "b", "w"):
        raise ValueError(f"cannot group by {group_by!r}")

    def xval(rec):
        if group_by == "w":
            w = _params(rec).get("w")
            return float(w) if w is not None else None
        if rec.b < 0 and not (group_by == "eta" and rec.algorithm in ("profilepacking", "hybrid", "haware")):
            return None
        return float(rec.eta) if group_by == "eta" else float(rec.b)

    series: dict[str, dict] = defaultdict(lambda: defaultdict(list))
    flat: dict[str, list] = defaultdict(list)
    for rec in records:
        label = f"{rec.algorithm}[{rec.params}]" if rec.params else rec.algorithm
        x = xval(rec)
        if x is None:
            flat[label].append(rec.cost)
        else:
            series[label][x].append(rec.cost)
    l2_by_seed = {rec.seed: rec.l2 for rec in records}
    flat["L2"] = list(l2_by_seed.values())

    xs = [x for pts in series.values() for x in pts]
    span = (min(xs), max(xs)) if xs else (0.0, 0.0)
    out = {}
    for label, pts in series.items():
        rows = [f"{x!r}\t{sum(c) / len(c)!r}" for x, c in sorted(pts.items())]
        out[label] = f"{group_by}\tcost\n" + "\n".join(rows) + "\n"
    for label, costs in flat.items():
        y = sum(costs) / len(costs)
        xs_flat = sorted(set(span))
        rows = [f"{x!r}\t{y!r}" for x in xs_flat]
        out[label] = f"{group_by}\tcost\n" + "\n".join(rows) + "\n"
    return out


def write_plot_data(records, group_by, out_dir) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for label, text in emit_plot_data(records, group_by).items():
        safe = "".join(ch if ch.isalnum() or ch in "-_." else "_" for ch in label).strip("_")
        path = out_dir / f"{safe}.tsv"
        path.write_text(text, encoding="utf-8", newline="\n")
        paths.append(path)
    return paths


def lambda_sweep_config(n=100_000, k=100, m=DEFAULT_M, seed=0, i_lo=25, i_hi=125,
                        lambdas=((0, 1), (1, 4), (1, 2), (3, 4), (1, 1)), mode=Mode.FIXED_WEIBULL,
                        sources=(), repetitions=1) -> ExperimentConfig:
    algos = [AlgorithmSpec("firstfit"), AlgorithmSpec("bestfit")]
    algos += [AlgorithmSpec("hybrid", {"lambda_num": a, "lambda_den": b, "m": m}) for a, b in lambdas]
    seq = SequenceSpec(mode=mode, n=n, k=k, seed=seed, sources=list(sources))
    return ExperimentConfig(seq, algos, "prefix_sweep", {"i_lo": i_lo, "i_hi": i_hi},
                            repetitions=repetitions, base_seed=seed)


def window_sweep_config(windows, n=200_000, k=100, m=DEFAULT_M, seed=0, mode=Mode.EVOLVING_WEIBULL,
                        sources=(), repetitions=1, replan="on-demand") -> ExperimentConfig:
    algos = [AlgorithmSpec("firstfit"), AlgorithmSpec("bestfit")]
    algos += [AlgorithmSpec("adaptive", {"w": int(w), "m": m, "replan": replan}) for w in windows]
    seq = SequenceSpec(mode=mode, n=n, k=k, seed=seed, sources=list(sources))
    return ExperimentConfig(seq, algos, "none", repetitions=repetitions, base_seed=seed)

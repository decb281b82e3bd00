"""Experiment orchestration: seeded runs over graphs and Haar matrices,
mergeable frequency tables, comparisons against the theory predictions, and
CSV/JSON reports.

Every trial is keyed by its index, tables merge commutatively, and derived
statistics are computed only after the merge, so a run's report is
byte-identical no matter how trials were partitioned across workers.
"""

from __future__ import annotations

import dataclasses
import json
import math
import multiprocessing
from dataclasses import dataclass, field

from . import __version__
from .classify import (
    PairingClass,
    aut_of_class,
    classify_sylow,
    enumerate_classes,
)
from .graphs import GraphSampleConfig, reduced_laplacian, sample_gnq_with_attempts
from .intlinalg import snf_diagonal
from .padic import (
    class_key,
    sylow_pairing_of_matrix,
    tally_mu_n,
    tally_surjection_moments,
)
from .stats import mean_z, proportion_z, ratio_z, wilson_interval
from .theory import RankExceedsNError, cyclic_probability_global, mu_n_finite, mu_n_zerosum

TRIVIAL_KEY = "1"

GRAPH_KINDS = ("graph-cyclic", "graph-pairing-freq", "graph-two-primes")
HAAR_KINDS = ("haar-mu", "haar-moments")
KINDS = GRAPH_KINDS + HAAR_KINDS


class ConfigError(ValueError):
    """Invalid experiment configuration."""


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    trials: int
    seed: int
    n: int
    q: float | None = None
    primes: tuple[int, ...] = ()
    max_order: int = 8
    catalog_bound: int = 64
    precision: int = 20
    guard: int = 4
    zerosum: bool = False
    targets: tuple[tuple[int, ...], ...] = ()
    out: str | None = None
    format: str = "csv"

    def __post_init__(self):
        object.__setattr__(self, "primes", tuple(self.primes))
        object.__setattr__(self, "targets", tuple(tuple(t) for t in self.targets))

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise ConfigError(f"unknown kind {self.kind!r}; expected one of {KINDS}")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.n < 1:
            raise ConfigError("n must be >= 1")
        if self.seed < 0:
            raise ConfigError("seed must be a nonnegative integer")
        if self.kind in GRAPH_KINDS:
            if self.q is None or not (0.0 < self.q < 1.0):
                raise ConfigError("graph experiments need q strictly in (0, 1)")
        if self.kind == "graph-pairing-freq" and len(self.primes) != 1:
            raise ConfigError("graph-pairing-freq needs exactly one prime")
        if self.kind == "graph-two-primes" and len(self.primes) != 2:
            raise ConfigError("graph-two-primes needs exactly two primes")
        if self.kind in HAAR_KINDS:
            if len(self.primes) != 1:
                raise ConfigError(f"{self.kind} needs exactly one prime")
            if self.precision < 1 or self.guard < 1:
                raise ConfigError("precision and guard must be >= 1")
            if self.guard >= self.precision:
                raise ConfigError("guard must be below the precision")
        if self.kind == "haar-moments" and not self.targets:
            raise ConfigError("haar-moments needs at least one target group")
        for t in self.targets:
            if not t or any(d < 2 for d in t):
                raise ConfigError("targets are nonempty lists of factors >= 2")
        for p in self.primes:
            if p < 2 or any(p % d == 0 for d in range(2, int(math.isqrt(p)) + 1)):
                raise ConfigError(f"{p} is not prime")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"unknown format {self.format!r}; expected csv or json")

    def echo(self) -> dict:
        """Effective config for reports: every logical field.  Execution
        details (threads, output path) stay out so reports do not depend on
        how or where they were produced."""
        d = dataclasses.asdict(self)
        d.pop("out")
        d["primes"] = list(self.primes)
        d["targets"] = [list(t) for t in self.targets]
        return d


def config_from_mapping(data: dict) -> ExperimentConfig:
    allowed = {f.name for f in dataclasses.fields(ExperimentConfig)}
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"unknown config fields: {sorted(unknown)}")
    try:
        cfg = ExperimentConfig(**data)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    cfg.validate()
    return cfg


def read_config_mapping(path: str) -> dict:
    if path.endswith(".toml"):
        try:
            import tomllib
        except ModuleNotFoundError:  # stdlib from 3.11 on
            import tomli as tomllib

        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    else:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    if not isinstance(data, dict):
        raise ConfigError("config file must hold one experiment object")
    return data


def load_config(path: str) -> ExperimentConfig:
    return config_from_mapping(read_config_mapping(path))


# ---------------------------------------------------------------------------
# Mergeable accumulators


@dataclass
class FrequencyTable:
    """Class-key counts; the mergeable monoid workers reduce into.

    Graph runs: counts sum to total_trials, discarded counts connectivity
    resamples.  Haar runs: counts + precision_exceeded sum to total_trials.
    """

    total_trials: int = 0
    counts: dict[str, int] = field(default_factory=dict)
    discarded: int = 0
    precision_exceeded: int = 0

    def add(self, key: str, k: int = 1) -> None:
        self.counts[key] = self.counts.get(key, 0) + k

    def merge(self, other: "FrequencyTable") -> "FrequencyTable":
        out = FrequencyTable(
            total_trials=self.total_trials + other.total_trials,
            counts=dict(self.counts),
            discarded=self.discarded + other.discarded,
            precision_exceeded=self.precision_exceeded + other.precision_exceeded,
        )
        for k, v in other.counts.items():
            out.counts[k] = out.counts.get(k, 0) + v
        return out


@dataclass
class MomentTable:
    """Running sums for per-trial integer statistics (means and variances)."""

    total_trials: int = 0
    sums: dict[str, int] = field(default_factory=dict)
    sumsqs: dict[str, int] = field(default_factory=dict)

    def add(self, key: str, value: int) -> None:
        self.sums[key] = self.sums.get(key, 0) + value
        self.sumsqs[key] = self.sumsqs.get(key, 0) + value * value

    def merge(self, other: "MomentTable") -> "MomentTable":
        out = MomentTable(
            total_trials=self.total_trials + other.total_trials,
            sums=dict(self.sums),
            sumsqs=dict(self.sumsqs),
        )
        for k, v in other.sums.items():
            out.sums[k] = out.sums.get(k, 0) + v
        for k, v in other.sumsqs.items():
            out.sumsqs[k] = out.sumsqs.get(k, 0) + v
        return out

    def mean(self, key: str) -> float:
        return self.sums.get(key, 0) / self.total_trials

    def sample_sd(self, key: str) -> float:
        n = self.total_trials
        m = self.mean(key)
        var = (self.sumsqs.get(key, 0) - n * m * m) / (n - 1) if n > 1 else 0.0
        return math.sqrt(max(var, 0.0))


@dataclass
class ChunkResult:
    freq: FrequencyTable = field(default_factory=FrequencyTable)
    moments: MomentTable = field(default_factory=MomentTable)

    def merge(self, other: "ChunkResult") -> "ChunkResult":
        return ChunkResult(
            freq=self.freq.merge(other.freq), moments=self.moments.merge(other.moments)
        )


# ---------------------------------------------------------------------------
# Per-kind trial loops (top level so multiprocessing can pickle them)


def _graph_cyclic_chunk(cfg: ExperimentConfig, start: int, stop: int) -> ChunkResult:
    res = ChunkResult()
    gcfg = GraphSampleConfig(n=cfg.n, q=cfg.q, seed=cfg.seed)
    rank_primes = cfg.primes or (2, 3)
    for t in range(start, stop):
        g, attempts = sample_gnq_with_attempts(gcfg, t)
        res.freq.discarded += attempts - 1
        diag = snf_diagonal(reduced_laplacian(g))
        nontrivial = [d for d in diag if d > 1]
        res.freq.add("cyclic" if len(nontrivial) <= 1 else "noncyclic")
        res.freq.total_trials += 1
        for p in rank_primes:
            r = sum(1 for d in nontrivial if d % p == 0)
            res.moments.add(f"p_rank_power[{p}]", p**r)
        res.moments.total_trials += 1
    return res


def _graph_pairing_chunk(cfg: ExperimentConfig, start: int, stop: int) -> ChunkResult:
    res = ChunkResult()
    gcfg = GraphSampleConfig(n=cfg.n, q=cfg.q, seed=cfg.seed)
    p = cfg.primes[0]
    for t in range(start, stop):
        g, attempts = sample_gnq_with_attempts(gcfg, t)
        res.freq.discarded += attempts - 1
        syl = sylow_pairing_of_matrix(reduced_laplacian(g), p)
        res.freq.add(class_key(syl, cfg.max_order, cfg.catalog_bound))
        res.freq.total_trials += 1
    return res


def _graph_two_primes_chunk(cfg: ExperimentConfig, start: int, stop: int) -> ChunkResult:
    res = ChunkResult()
    gcfg = GraphSampleConfig(n=cfg.n, q=cfg.q, seed=cfg.seed)
    p1, p2 = cfg.primes
    for t in range(start, stop):
        g, attempts = sample_gnq_with_attempts(gcfg, t)
        res.freq.discarded += attempts - 1
        lap = reduced_laplacian(g)
        syls = [sylow_pairing_of_matrix(lap, p) for p in (p1, p2)]
        joint_order = syls[0].order * syls[1].order
        if joint_order > cfg.max_order:
            res.freq.add(f"other({joint_order})")
        else:
            symbols = []
            for syl in syls:
                symbols.extend(classify_sylow(syl, cfg.catalog_bound).symbols)
            res.freq.add(PairingClass(tuple(symbols)).name)
        res.freq.total_trials += 1
    return res


def _haar_mu_chunk(cfg: ExperimentConfig, start: int, stop: int) -> ChunkResult:
    res = ChunkResult()
    counts, exceeded = tally_mu_n(
        cfg.primes[0],
        cfg.n,
        stop - start,
        cfg.seed,
        N=cfg.precision,
        guard=cfg.guard,
        zerosum=cfg.zerosum,
        max_order=cfg.max_order,
        catalog_bound=cfg.catalog_bound,
        trial_start=start,
    )
    res.freq.counts = counts
    res.freq.precision_exceeded = exceeded
    res.freq.total_trials = stop - start
    return res


def _haar_moments_chunk(cfg: ExperimentConfig, start: int, stop: int) -> ChunkResult:
    res = ChunkResult()
    p = cfg.primes[0]
    exp_lists = [_p_exponents(t, p) for t in cfg.targets]
    keys = [_target_key(t) for t in cfg.targets]
    sums, sumsqs, rank_sums, total = tally_surjection_moments(
        p,
        cfg.n,
        exp_lists,
        stop - start,
        cfg.seed,
        N=cfg.precision,
        zerosum=cfg.zerosum,
        trial_start=start,
    )
    for key, s, ss in zip(keys, sums, sumsqs):
        res.moments.sums[key] = res.moments.sums.get(key, 0) + s
        res.moments.sumsqs[key] = res.moments.sumsqs.get(key, 0) + ss
    rank_key = f"p_rank_power[{p}]"
    res.moments.sums[rank_key] = rank_sums[0]
    res.moments.sumsqs[rank_key] = rank_sums[1]
    res.moments.total_trials = total
    res.freq.total_trials = total
    return res


def _p_exponents(factors, p: int) -> list[int]:
    exps = []
    for d in factors:
        e = 0
        while d % p == 0:
            d //= p
            e += 1
        if d != 1:
            raise ConfigError("moment targets must be p-groups for the configured prime")
        exps.append(e)
    return sorted(exps)


def _target_key(factors) -> str:
    return "sur[" + "x".join(str(d) for d in sorted(factors)) + "]"


_CHUNK_FNS = {
    "graph-cyclic": _graph_cyclic_chunk,
    "graph-pairing-freq": _graph_pairing_chunk,
    "graph-two-primes": _graph_two_primes_chunk,
    "haar-mu": _haar_mu_chunk,
    "haar-moments": _haar_moments_chunk,
}


def _run_chunk(args) -> ChunkResult:
    cfg, start, stop = args
    return _CHUNK_FNS[cfg.kind](cfg, start, stop)


def _chunks(trials: int, parts: int):
    parts = max(1, min(parts, trials))
    base, extra = divmod(trials, parts)
    start = 0
    for i in range(parts):
        stop = start + base + (1 if i < extra else 0)
        yield start, stop
        start = stop


def run_accumulate(cfg: ExperimentConfig, threads: int = 1) -> ChunkResult:
    cfg.validate()
    if threads <= 1:
        return _run_chunk((cfg, 0, cfg.trials))
    jobs = [(cfg, a, b) for a, b in _chunks(cfg.trials, threads * 4)]
    with multiprocessing.Pool(processes=threads) as pool:
        parts = pool.map(_run_chunk, jobs)
    out = ChunkResult()
    for part in parts:
        out = out.merge(part)
    return out


# ---------------------------------------------------------------------------
# Comparison rows and reports


@dataclass(frozen=True)
class ComparisonRow:
    class_key: str
    observed_count: int
    total: int
    proportion: float
    wilson_lo: float
    wilson_hi: float
    observed_ratio: float | None
    expected_ratio: float | None
    z_score: float | None


def _class_rows(freq: FrequencyTable, classes: list[PairingClass], z_mode: str, preds=None):
    """Rows for an enumerated class set plus any observed overflow buckets.

    z_mode 'ratio': z of trivial/class ratio against #group * #Aut.
    z_mode 'proportion': z of the class proportion against preds[name].
    """
    total = freq.total_trials
    n_triv = freq.counts.get(TRIVIAL_KEY, 0)
    rows = []
    seen = set()
    for cls in classes:
        name = cls.name
        seen.add(name)
        count = freq.counts.get(name, 0)
        expected = cls.order * aut_of_class(cls)
        lo, hi = wilson_interval(count, total)
        if name == TRIVIAL_KEY:
            obs_ratio, z = (1.0, 0.0 if z_mode == "ratio" else None)
        else:
            obs_ratio, z = ratio_z(n_triv, count, total, expected)
        if z_mode == "proportion":
            p0 = preds.get(name) if preds else None
            z = proportion_z(count, total, p0) if p0 is not None else None
        rows.append(
            ComparisonRow(
                class_key=name,
                observed_count=count,
                total=total,
                proportion=count / total,
                wilson_lo=lo,
                wilson_hi=hi,
                observed_ratio=obs_ratio,
                expected_ratio=expected,
                z_score=z,
            )
        )
    for name in sorted(freq.counts):
        if name in seen:
            continue
        count = freq.counts[name]
        lo, hi = wilson_interval(count, total)
        obs_ratio = n_triv / count if count else None
        rows.append(
            ComparisonRow(
                class_key=name,
                observed_count=count,
                total=total,
                proportion=count / total,
                wilson_lo=lo,
                wilson_hi=hi,
                observed_ratio=obs_ratio,
                expected_ratio=None,
                z_score=None,
            )
        )
    rows.sort(key=lambda r: r.class_key)
    return rows


@dataclass
class Report:
    config: dict
    seed: int
    version: str
    frequency: dict
    rows: list[ComparisonRow]
    extras: dict

    def flagged(self, threshold: float = 3.0) -> list[str]:
        out = [r.class_key for r in self.rows if r.z_score is not None and abs(r.z_score) > threshold]
        for key, entry in sorted(self.extras.items()):
            if isinstance(entry, dict):
                z = entry.get("z_score")
                if z is not None and abs(z) > threshold:
                    out.append(key)
        return out


def _freq_payload(freq: FrequencyTable) -> dict:
    return {
        "total_trials": freq.total_trials,
        "counts": {k: freq.counts[k] for k in sorted(freq.counts)},
        "discarded": freq.discarded,
        "precision_exceeded": freq.precision_exceeded,
    }


def run_experiment(cfg: ExperimentConfig, threads: int = 1) -> Report:
    cfg.validate()
    acc = run_accumulate(cfg, threads)
    freq, moments = acc.freq, acc.moments
    extras: dict = {}
    rows: list[ComparisonRow] = []

    if cfg.kind == "graph-cyclic":
        pred = cyclic_probability_global()
        p0 = float(pred.value)
        total = freq.total_trials
        for key, null in (("cyclic", p0), ("noncyclic", 1 - p0)):
            count = freq.counts.get(key, 0)
            lo, hi = wilson_interval(count, total)
            rows.append(
                ComparisonRow(
                    class_key=key,
                    observed_count=count,
                    total=total,
                    proportion=count / total,
                    wilson_lo=lo,
                    wilson_hi=hi,
                    observed_ratio=None,
                    expected_ratio=None,
                    z_score=proportion_z(count, total, null),
                )
            )
        extras["cyclic_prediction"] = {
            "value": float(pred.value),
            "truncation_bound": float(pred.truncation_bound),
        }
        _attach_rank_moments(extras, moments, cfg.primes or (2, 3))
    elif cfg.kind == "graph-pairing-freq":
        classes = enumerate_classes(cfg.primes[0], cfg.max_order)
        rows = _class_rows(freq, classes, z_mode="ratio")
    elif cfg.kind == "graph-two-primes":
        classes = _joint_classes(cfg.primes, cfg.max_order)
        rows = _class_rows(freq, classes, z_mode="ratio")
    elif cfg.kind == "haar-mu":
        classes = enumerate_classes(cfg.primes[0], cfg.max_order)
        mu = mu_n_zerosum if cfg.zerosum else mu_n_finite
        preds = {}
        for cls in classes:
            try:
                preds[cls.name] = float(mu(cls, cfg.n, p=cfg.primes[0]).value)
            except RankExceedsNError:
                preds[cls.name] = None  # structurally impossible at this size
        rows = _class_rows(freq, classes, z_mode="proportion", preds=preds)
        extras["predictions"] = {k: preds[k] for k in sorted(preds)}
    elif cfg.kind == "haar-moments":
        from .theory import PartitionType, expected_surjections, rank_moment

        p = cfg.primes[0]
        for factors in cfg.targets:
            key = _target_key(factors)
            target = PartitionType(tuple(_p_exponents(factors, p)))
            want = expected_surjections(target, p)
            mean = moments.mean(key)
            sd = moments.sample_sd(key)
            extras[key] = {
                "mean": mean,
                "sample_sd": sd,
                "expected": want,
                "z_score": mean_z(mean, sd, moments.total_trials, want),
            }
        _attach_rank_moments(extras, moments, (p,))

    report = Report(
        config=cfg.echo(),
        seed=cfg.seed,
        version=__version__,
        frequency=_freq_payload(freq),
        rows=rows,
        extras=extras,
    )
    return report


def _attach_rank_moments(extras: dict, moments: MomentTable, primes) -> None:
    from .theory import rank_moment

    for p in primes:
        key = f"p_rank_power[{p}]"
        if key not in moments.sums:
            continue
        mean = moments.mean(key)
        sd = moments.sample_sd(key)
        extras[key] = {
            "mean": mean,
            "sample_sd": sd,
            "expected": rank_moment(1, p),
            "z_score": mean_z(mean, sd, moments.total_trials, rank_moment(1, p)),
        }


def _joint_classes(primes, max_order: int) -> list[PairingClass]:
    lists = [enumerate_classes(p, max_order) for p in primes]
    out = []
    import itertools as it

    for combo in it.product(*lists):
        order = math.prod(c.order for c in combo)
        if order <= max_order:
            symbols = tuple(s for c in combo for s in c.symbols)
            out.append(PairingClass(symbols))
    out.sort(key=lambda c: (c.order, c.name))
    return out


# ---------------------------------------------------------------------------
# Serialization

CSV_COLUMNS = (
    "class",
    "observed_count",
    "total",
    "proportion",
    "wilson_lo",
    "wilson_hi",
    "observed_ratio",
    "expected_ratio",
    "z_score",
)


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def report_csv(report: Report) -> str:
    lines = [",".join(CSV_COLUMNS)]
    for r in report.rows:
        lines.append(
            ",".join(
                _fmt(v)
                for v in (
                    r.class_key,
                    r.observed_count,
                    r.total,
                    r.proportion,
                    r.wilson_lo,
                    r.wilson_hi,
                    r.observed_ratio,
                    r.expected_ratio,
                    r.z_score,
                )
            )
        )
    return "\n".join(lines) + "\n"


def report_json(report: Report) -> str:
    payload = {
        "config": report.config,
        "seed": report.seed,
        "version": report.version,
        "frequency": report.frequency,
        "rows": [dataclasses.asdict(r) for r in report.rows],
        "extras": report.extras,
    }
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def emit_report(report: Report, fmt: str, path: str | None = None) -> str:
    if fmt == "csv":
        text = report_csv(report)
    elif fmt == "json":
        text = report_json(report)
    else:
        raise ConfigError(f"unknown format {fmt!r}; expected csv or json")
    if path is not None:
        try:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            raise OSError(f"cannot write report to {path}: {exc}") from exc
    return text

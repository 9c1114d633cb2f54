"""Run configuration and JSON reports for the command-line tool."""

import hashlib
import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import ConfigError

__version__ = "0.1.0"

VERDICTS = ("pass", "fail", "inconclusive")
EXIT_CODES = {"pass": 0, "fail": 1, "inconclusive": 2}
EXIT_CONFIG = 64


@dataclass
class RunConfig:
    """Everything that determines a run; its hash goes into every output.

    ``grid`` holds ``[min, max, count]`` per real axis, ordered
    Re z1, Im z1, Re z2, Im z2, ...; axes past the end are fixed at 0.
    An empty list means the command's default points.
    """

    command: str
    potential: str = "builtin:fubini_study"
    n: int = 1
    grid: list = field(default_factory=list)
    kappa: float = 2.0
    form: str = "H"
    flat_tol: float = 1e-4
    chsc_tol: float = 1e-6
    pullback_tol: float = 1e-4
    transport_rtol: float = 1e-6
    fd_step: float = None
    seed: int = 0
    eps: float = 0.1
    normalize: bool = True
    points: int = 3

    def validate(self):
        for name in ("flat_tol", "chsc_tol", "pullback_tol", "transport_rtol"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if self.fd_step is not None and not self.fd_step > 0:
            raise ConfigError("fd_step must be positive")
        if self.form not in ("H", "K"):
            raise ConfigError(f"form must be H or K, got {self.form!r}")
        if len(self.grid) > 2 * self.n:
            raise ConfigError(f"{len(self.grid)} grid axes given for n={self.n} (at most {2 * self.n})")
        for axis in self.grid:
            lo, hi, count = axis
            if int(count) != count or count < 1:
                raise ConfigError(f"grid count must be a positive integer, got {count}: empty grid")
            if hi < lo:
                raise ConfigError(f"grid axis has max < min: {axis}")
        if self.points < 1:
            raise ConfigError("need at least one sample point")
        return self

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        return cls(**data)

    def config_hash(self):
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def grid_points(self):
        """Cartesian product of the grid axes as complex n-vectors (empty list if no grid)."""
        if not self.grid:
            return []
        axes = [np.linspace(lo, hi, int(count)) for lo, hi, count in self.grid]
        axes += [np.zeros(1)] * (2 * self.n - len(axes))
        mesh = np.meshgrid(*axes, indexing="ij")
        flat = np.stack([m.ravel() for m in mesh], axis=1)
        return [flat[k, 0::2] + 1j * flat[k, 1::2] for k in range(len(flat))]


def combine_verdicts(verdicts):
    verdicts = list(verdicts)
    if "fail" in verdicts:
        return "fail"
    if "inconclusive" in verdicts:
        return "inconclusive"
    return "pass"


def _plain(x):
    """Recursively convert numpy scalars and arrays to JSON-native values."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, (float, np.floating)):
        x = float(x)
        # keep the output strict JSON
        return x if np.isfinite(x) else None
    return x


@dataclass
class Report:
    """Per-point records plus a summary; ``summary['max_residual']`` is the max over records."""

    command: list
    config: dict
    config_hash: str
    version: str
    seed: int
    records: list
    summary: dict

    @classmethod
    def build(cls, argv, config, records, runtime, verdict=None, extra=None):
        records = _plain(records)
        residuals = [r["residual"] for r in records if r.get("residual") is not None]
        if verdict is None:
            verdict = combine_verdicts(r["verdict"] for r in records) if records else "fail"
        summary = {
            "max_residual": max(residuals) if residuals else None,
            "verdict": verdict,
            "runtime": float(runtime),
            "count": len(records),
        }
        if extra:
            summary.update(_plain(extra))
        return cls(list(argv), config.to_dict(), config.config_hash(), __version__, config.seed, records, summary)

    @property
    def verdict(self):
        return self.summary["verdict"]

    @property
    def exit_code(self):
        return EXIT_CODES[self.verdict]

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        return cls(**data)

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, allow_nan=False)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

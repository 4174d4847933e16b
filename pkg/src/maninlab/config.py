"""Experiment configuration: a YAML file of knobs that round-trips losslessly."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields

import yaml

from .polynomial import HomogeneousPolynomial, parse_polynomial


@dataclass
class ExperimentConfig:
    polynomial: object = "x1^2+x2^2+x3^2"  # text form or [[coeff, [e1..en]], ...]
    n: int | None = None
    bad_primes: list = field(default_factory=list)  # user-declared, unioned with detection
    s0: float | None = None  # None, None -> anticanonical (n+1, n)
    s1: float | None = None
    B: float = 1000.0
    grid: object = "100:100000:13"  # "start:stop:steps" (geometric) or explicit list
    truncation: int = 12  # trivial-character direct series cutoff
    char_truncation: int | None = None  # nontrivial-character cutoff; None = budget-capped
    series_cutoff: int = 40
    budget: int = 10**8
    max_candidates: float = 5.0e7
    qmc_samples: int = 2**18
    qmc_replicates: int = 8
    p_max: int = 10**4
    bad_prime_search_bound: int = 50
    threads: int = 1
    seed: int = 0
    cache_dir: str | None = None
    out: str | None = None
    format: str = "json"
    timings: str = "zero"  # zero: reproducible artifacts; real: measured seconds

    def __post_init__(self):
        if self.format not in ("json", "csv"):
            raise ValueError(f"format must be json or csv, got {self.format!r}")
        if self.timings not in ("zero", "real"):
            raise ValueError(f"timings must be zero or real, got {self.timings!r}")

    def form(self) -> HomogeneousPolynomial:
        return parse_polynomial(self.polynomial, n=self.n)

    def s(self) -> tuple:
        f = self.form()
        if self.s0 is None and self.s1 is None:
            return (f.n + 1, f.n)
        if self.s0 is None or self.s1 is None:
            raise ValueError("set both s0 and s1, or neither")
        s0 = int(self.s0) if float(self.s0).is_integer() else float(self.s0)
        s1 = int(self.s1) if float(self.s1).is_integer() else float(self.s1)
        return (s0, s1)

    def grid_values(self) -> list[float]:
        from .enumeration import geometric_grid

        if isinstance(self.grid, str):
            parts = self.grid.split(":")
            if len(parts) != 3:
                raise ValueError("grid spec must be start:stop:steps")
            return geometric_grid(float(parts[0]), float(parts[1]), int(parts[2]))
        return [float(v) for v in self.grid]

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=True)

    @classmethod
    def from_yaml(cls, text: str) -> "ExperimentConfig":
        data = yaml.safe_load(text)
        if not isinstance(data, dict):
            raise ValueError("config file must hold a mapping")
        return cls.from_dict(data)

    @classmethod
    def load(cls, path: str) -> "ExperimentConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_yaml(fh.read())

    def save(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_yaml())

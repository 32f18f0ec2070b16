"""Run settings shared by the library entry points and the command line."""
from __future__ import annotations

import os
from dataclasses import dataclass, replace

from .numeric import set_precision

FORMATS = ("json", "csv", "text")


@dataclass(frozen=True)
class RunConfig:
    precision_bits: int = 128
    oracle_cap: int = 60
    tie_epsilon_exponent: int = 128
    threads: int = 1
    output_format: str = "text"

    def __post_init__(self):
        if self.precision_bits < 64:
            raise ValueError("precision_bits must be at least 64")
        if self.oracle_cap < 1:
            raise ValueError("oracle_cap must be positive")
        if self.tie_epsilon_exponent < 1:
            raise ValueError("tie_epsilon_exponent must be positive")
        if self.threads < 1:
            raise ValueError("threads must be positive")
        if self.output_format not in FORMATS:
            raise ValueError(f"output format must be one of {', '.join(FORMATS)}")

    @classmethod
    def from_env(cls, environ=None, **overrides) -> "RunConfig":
        env = os.environ if environ is None else environ
        base = {}
        if env.get("MCRS_PRECISION_BITS"):
            base["precision_bits"] = int(env["MCRS_PRECISION_BITS"])
        if env.get("MCRS_THREADS"):
            base["threads"] = int(env["MCRS_THREADS"])
        base.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**base)

    def with_(self, **changes) -> "RunConfig":
        return replace(self, **changes)

    @property
    def max_bits(self) -> int:
        # refinement stops once two values agree to the tie tolerance plus a
        # generous guard, never below 32 times the working precision
        return max(32 * self.precision_bits, 4 * self.tie_epsilon_exponent)

    def apply(self) -> None:
        set_precision(self.precision_bits, self.max_bits)

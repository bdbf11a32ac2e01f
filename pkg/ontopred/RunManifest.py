"""RunManifest.py"""

import datetime as dt
import time
from dataclasses import dataclass, field

import pytz

from .const import TOOL_VERSION
from .utils import file_digest


@dataclass
class RunManifest:
    subcommand: str
    tool_version: str = TOOL_VERSION
    config: dict = field(default_factory=dict)
    input_digests: dict = field(default_factory=dict)
    namespace: str = ""
    n_terms: int = None
    d0: int = None
    d: int = None
    seed: int = None
    extra: dict = field(default_factory=dict)
    started_at: dt.datetime = field(default_factory=lambda: dt.datetime.now(pytz.utc))
    _clock: float = field(default_factory=time.perf_counter, repr=False)
    duration_seconds: float = None

    def add_input(self, name: str, path) -> None:
        if path:
            self.input_digests[name] = file_digest(path)

    def finish(self) -> None:
        self.duration_seconds = time.perf_counter() - self._clock

    def lines(self) -> list[str]:
        lines = [
            f"tool_version\t{self.tool_version}",
            f"subcommand\t{self.subcommand}",
            f"namespace\t{self.namespace}",
            f"n_terms\t{'' if self.n_terms is None else self.n_terms}",
            f"d0\t{'' if self.d0 is None else self.d0}",
            f"d\t{'' if self.d is None else self.d}",
            f"seed\t{'' if self.seed is None else self.seed}",
        ]
        lines += [f"config.{k}\t{v}" for k, v in self.config.items()]
        lines += [f"input.{k}.fnv1a64\t{v}" for k, v in self.input_digests.items()]
        lines += [f"{k}\t{v}" for k, v in self.extra.items()]
        lines.append(f"started_at\t{self.started_at.isoformat()}")
        if self.duration_seconds is not None:
            lines.append(f"duration_seconds\t{self.duration_seconds:.3f}")
        return lines

    def write(self, path) -> None:
        if self.duration_seconds is None:
            self.finish()
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write("\n".join(self.lines()) + "\n")

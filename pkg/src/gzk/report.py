"""Named scalar results with metadata, serializable to text and JSON."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

__all__ = ["NormReport"]


@dataclass
class NormReport:
    """Map from norm names to values.

    Values must be finite unless their name appears in ``flagged``.
    """

    values: dict[str, float] = field(default_factory=dict)
    meta: dict = field(default_factory=dict)
    flagged: set[str] = field(default_factory=set)

    def __post_init__(self):
        self.values = {k: float(v) for k, v in self.values.items()}
        for k, v in self.values.items():
            if not math.isfinite(v) and k not in self.flagged:
                raise ValueError(f"report value {k}={v} is not finite")

    def __getitem__(self, name: str) -> float:
        return self.values[name]

    def __contains__(self, name: str) -> bool:
        return name in self.values

    def to_text(self) -> str:
        """One ``name = value`` pair per line; metadata lines start with ``#``."""
        lines = [f"# {k} = {json.dumps(v, sort_keys=True)}" for k, v in sorted(self.meta.items())]
        lines += [f"{k} = {v!r}" for k, v in self.values.items()]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "NormReport":
        values, meta = {}, {}
        for line in text.splitlines():
            if not line.strip():
                continue
            if line.startswith("#"):
                k, v = line[1:].split("=", 1)
                meta[k.strip()] = json.loads(v)
            else:
                k, v = line.rsplit("=", 1)
                values[k.strip()] = float(v)
        flagged = {k for k, v in values.items() if not math.isfinite(v)}
        return cls(values, meta, flagged)

    def to_json(self) -> str:
        payload = {
            "values": {k: (v if math.isfinite(v) else str(v)) for k, v in self.values.items()},
            "meta": self.meta,
            "flagged": sorted(self.flagged),
        }
        return json.dumps(payload, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "NormReport":
        d = json.loads(text)
        return cls({k: float(v) for k, v in d["values"].items()}, d["meta"], set(d["flagged"]))

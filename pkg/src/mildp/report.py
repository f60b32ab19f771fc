"""JSON wire formats: relator files in, verdict reports out."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Any, Optional, Sequence

import jsonschema

from . import __version__
from .arith import is_prime
from .errors import InvalidInputError
from .linalg import MAX_P
from .mildness import Relator2, Verdict

REPORT_FIELDS = ("command", "input_digest", "verdict", "result", "timing", "version")


@lru_cache(maxsize=None)
def schema(name: str) -> dict[str, Any]:
    text = resources.files("mildp").joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)


@lru_cache(maxsize=None)
def _validator(name: str) -> Any:
    doc = schema(name)
    cls = jsonschema.validators.validator_for(doc)
    cls.check_schema(doc)
    return cls(doc)


def _validate(obj: Any, name: str) -> None:
    try:
        _validator(name).validate(obj)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(x) for x in exc.absolute_path) or "<root>"
        raise InvalidInputError(f"{name} invalid at {where}: {exc.message}") from None


def parse_relator_file(obj: Any) -> list[Relator2]:
    """Validate a RelatorFile document and build its relators."""
    _validate(obj, "relator_file")
    p, m = obj["p"], obj["generators"]
    if not is_prime(p) or p > MAX_P:
        raise InvalidInputError(f"p = {p} must be an odd prime <= {MAX_P}")
    out = []
    for k, rel in enumerate(obj["relators"], start=1):
        pi = rel.get("pi", [0] * m)
        if len(pi) != m or any(c >= p for c in pi):
            raise InvalidInputError(f"relator {k}: pi must have {m} entries in [0, {p})")
        seen = set()
        for i, j, a in rel["quad"]:
            if not (i < j <= m):
                raise InvalidInputError(f"relator {k}: pair ({i}, {j}) needs 1 <= i < j <= {m}")
            if a >= p:
                raise InvalidInputError(f"relator {k}: coefficient {a} not in [0, {p})")
            if (i, j) in seen:
                raise InvalidInputError(f"relator {k}: pair ({i}, {j}) listed twice")
            seen.add((i, j))
        out.append(Relator2(p, m, tuple(pi), {(i, j): a for i, j, a in rel["quad"]}))
    return out


def dump_relator_file(relators: Sequence[Relator2]) -> dict[str, Any]:
    if not relators:
        raise InvalidInputError("cannot serialize an empty relator list without p and m")
    p, m = relators[0].p, relators[0].m
    return {
        "p": p,
        "generators": m,
        "relators": [
            {"pi": list(r.pi_part), "quad": [[i, j, a] for (i, j), a in r.quad.items()]}
            for r in relators
        ],
    }


def canonical(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def input_digest(name: str, inputs: Any) -> str:
    blob = canonical({"command": name, "inputs": inputs}).encode()
    return "sha256:" + hashlib.sha256(blob).hexdigest()


@dataclass
class VerdictReport:
    command: dict[str, Any]
    input_digest: str
    verdict: Optional[dict[str, Any]] = None
    result: dict[str, Any] = field(default_factory=dict)
    timing: Optional[float] = None
    version: str = __version__

    @classmethod
    def build(
        cls,
        name: str,
        args: dict[str, Any],
        inputs: Any,
        verdict: Optional[Verdict] = None,
        result: Optional[dict[str, Any]] = None,
        timing: Optional[float] = None,
    ) -> "VerdictReport":
        return cls(
            {"name": name, "args": args},
            input_digest(name, inputs),
            verdict.to_json() if verdict is not None else None,
            result or {},
            timing,
        )

    def to_json(self) -> dict[str, Any]:
        return {k: getattr(self, k) for k in REPORT_FIELDS}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> "VerdictReport":
        _validate(obj, "verdict_report")
        return cls(**{k: obj[k] for k in REPORT_FIELDS})

    @classmethod
    def loads(cls, text: str) -> "VerdictReport":
        return cls.from_json(json.loads(text))

    def validate(self) -> None:
        _validate(json.loads(self.dumps()), "verdict_report")

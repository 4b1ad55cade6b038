"""The system tuple: sources, users ``(A_i, W_i, d_i)`` and adversary side info ``P``.

Source indices are 0-based in memory and 1-based in JSON files and in
validation messages.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .prob import ProductDistribution, SourceDistribution

UTILITY_SLACK = 1e-9


class ValidationError(ValueError):
    """Raised when a system fails validation; carries the violation list."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(v.message for v in self.violations))


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    user: int | None = None


@dataclass(frozen=True)
class UserSpec:
    """A legitimate user: side information ``A``, must-decode set ``W`` and
    utility threshold ``d`` (bits) on the remaining sources."""

    side_info: frozenset[int]
    must_decode: frozenset[int]
    gain_threshold: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "side_info", frozenset(self.side_info))
        object.__setattr__(self, "must_decode", frozenset(self.must_decode))
        object.__setattr__(self, "gain_threshold", float(self.gain_threshold))

    def guess_set(self, n: int) -> frozenset[int]:
        """``G = [n] minus A minus W``."""
        return frozenset(range(n)) - self.side_info - self.must_decode


@dataclass(frozen=True)
class UserSets:
    G: frozenset[int]
    W_Q: frozenset[int]
    A_Q: frozenset[int]
    W_P: frozenset[int]
    A_P: frozenset[int]


@dataclass(frozen=True)
class DerivedSets:
    Q: frozenset[int]
    users: tuple[UserSets, ...]


@dataclass(frozen=True)
class SystemSpec:
    sources: ProductDistribution
    users: tuple[UserSpec, ...]
    adversary_side_info: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "users", tuple(self.users))
        object.__setattr__(self, "adversary_side_info", frozenset(self.adversary_side_info))

    @property
    def n(self) -> int:
        return self.sources.n

    @property
    def m(self) -> int:
        return len(self.users)

    @property
    def P(self) -> frozenset[int]:
        return self.adversary_side_info

    @property
    def Q(self) -> frozenset[int]:
        return frozenset(range(self.n)) - self.adversary_side_info

    def G(self, i: int) -> frozenset[int]:
        return self.users[i].guess_set(self.n)

    def to_dict(self) -> dict:
        return {
            "sources": [{"pmf": list(s.pmf)} for s in self.sources.sources],
            "users": [
                {
                    "A": sorted(j + 1 for j in u.side_info),
                    "W": sorted(j + 1 for j in u.must_decode),
                    "d": u.gain_threshold,
                }
                for u in self.users
            ],
            "P": sorted(j + 1 for j in self.adversary_side_info),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SystemSpec":
        """Build from the JSON layout; source indices there are 1-based."""
        sources = ProductDistribution(
            tuple(SourceDistribution(tuple(s["pmf"])) for s in data["sources"])
        )
        users = tuple(
            UserSpec(
                frozenset(j - 1 for j in u.get("A", [])),
                frozenset(j - 1 for j in u.get("W", [])),
                u.get("d", 0.0),
            )
            for u in data.get("users", [])
        )
        return cls(sources, users, frozenset(j - 1 for j in data.get("P", [])))


def _fmt(s) -> str:
    return "{" + ",".join(str(j + 1) for j in sorted(s)) + "}"


def validate(spec: SystemSpec) -> list[Violation]:
    """Return every violated system invariant; an empty list means valid."""
    out: list[Violation] = []
    n = spec.n
    ground = frozenset(range(n))
    if spec.m < 1:
        out.append(Violation("no_users", "system must have at least one user"))
    bad = spec.P - ground
    if bad:
        out.append(Violation("index_out_of_range", f"P contains unknown sources {_fmt(bad)}"))
    for i, u in enumerate(spec.users):
        tag = f"user {i + 1}"
        for name, s in (("A", u.side_info), ("W", u.must_decode)):
            bad = s - ground
            if bad:
                out.append(Violation(
                    "index_out_of_range", f"{tag}: {name} contains unknown sources {_fmt(bad)}", i))
        overlap = u.side_info & u.must_decode
        if overlap:
            out.append(Violation(
                "must_decode_overlaps_side_info",
                f"{tag}: must-decode overlaps side information on {_fmt(overlap)}", i))
        d = u.gain_threshold
        if d < 0:
            out.append(Violation("negative_threshold", f"{tag}: threshold {d} is negative", i))
        G = u.guess_set(n) & ground
        h_inf = spec.sources.min_entropy(G)
        if d > h_inf + UTILITY_SLACK:
            out.append(Violation(
                "threshold_exceeds_min_entropy",
                f"{tag}: threshold {d} exceeds min-entropy {h_inf} of G={_fmt(G)}", i))
    return out


def check(spec: SystemSpec) -> SystemSpec:
    """Validate and return ``spec``; raise :class:`ValidationError` otherwise."""
    violations = validate(spec)
    if violations:
        raise ValidationError(violations)
    return spec


def derived_sets(spec: SystemSpec) -> DerivedSets:
    P, Q = spec.P, spec.Q
    users = []
    for u in spec.users:
        users.append(UserSets(
            G=u.guess_set(spec.n),
            W_Q=u.must_decode & Q,
            A_Q=u.side_info & Q,
            W_P=u.must_decode & P,
            A_P=u.side_info & P,
        ))
    return DerivedSets(Q, tuple(users))


def load_system(path) -> SystemSpec:
    return SystemSpec.from_dict(json.loads(Path(path).read_text()))


def save_system(spec: SystemSpec, path) -> None:
    Path(path).write_text(json.dumps(spec.to_dict(), indent=2))

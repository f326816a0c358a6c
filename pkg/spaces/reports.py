from dataclasses import dataclass, field

import numpy as np
from django.db import models

MAX_KEPT_VIOLATIONS = 20


class Verdict(models.TextChoices):
    PASS = 'pass'
    FAIL = 'fail'
    INFEASIBLE = 'infeasible'


@dataclass(frozen=True)
class Violation:
    """One counterexample: the sampled inputs and the two sides that disagreed."""
    inputs: dict
    lhs: float
    rhs: float


@dataclass(frozen=True)
class CheckReport:
    """
    Outcome of a sampled check.

    Failures are data: ``violations`` keeps the first few counterexamples in
    sampling order and ``violation_count`` counts all of them. An infeasible
    report carries the reason a precondition or construction failed and no
    violations.
    """
    check: str
    violations: tuple = ()
    violation_count: int = 0
    samples_run: int = 0
    seed: int = 0
    details: dict = field(default_factory=dict)
    parts: tuple = ()
    infeasible: str | None = None

    @property
    def verdict(self):
        if self.violation_count:
            return Verdict.FAIL
        if self.infeasible is not None:
            return Verdict.INFEASIBLE
        return Verdict.PASS

    @property
    def passed(self):
        return self.verdict == Verdict.PASS

    def part(self, check):
        for part in self.parts:
            if part.check == check:
                return part
        raise KeyError(check)

    @classmethod
    def collect(cls, check, seed, samples_run, violations, details=None):
        violations = list(violations)
        return cls(
            check=check,
            violations=tuple(violations[:MAX_KEPT_VIOLATIONS]),
            violation_count=len(violations),
            samples_run=int(samples_run),
            seed=int(seed),
            details=dict(details or {}),
        )

    @classmethod
    def from_chunks(cls, check, seed, chunks, details=None):
        """Merge ``(kept_violations, samples, violation_count)`` triples in chunk order."""
        kept = []
        samples = count = 0
        for chunk_violations, chunk_samples, chunk_count in chunks:
            kept.extend(chunk_violations[:MAX_KEPT_VIOLATIONS - len(kept)])
            samples += chunk_samples
            count += chunk_count
        return cls(
            check=check,
            violations=tuple(kept),
            violation_count=count,
            samples_run=samples,
            seed=int(seed),
            details=dict(details or {}),
        )

    @classmethod
    def combine(cls, check, parts, seed=0, details=None):
        parts = tuple(parts)
        infeasible = [f"{part.check}: {part.infeasible}" for part in parts if part.infeasible is not None]
        violations = [violation for part in parts for violation in part.violations]
        return cls(
            check=check,
            violations=tuple(violations[:MAX_KEPT_VIOLATIONS]),
            violation_count=sum(part.violation_count for part in parts),
            samples_run=sum(part.samples_run for part in parts),
            seed=int(seed),
            details=dict(details or {}),
            parts=parts,
            infeasible='; '.join(infeasible) if infeasible else None,
        )

    @classmethod
    def precondition_failed(cls, check, reason, seed=0, details=None):
        return cls(check=check, seed=int(seed), details=dict(details or {}), infeasible=str(reason))


def flagged(mask, build):
    """
    Build violations for the first few flagged rows of a sample chunk.

    Returns ``(violations, count)`` where ``count`` covers every flagged row.
    """
    rows = np.flatnonzero(mask)
    return [build(int(i)) for i in rows[:MAX_KEPT_VIOLATIONS]], int(rows.size)

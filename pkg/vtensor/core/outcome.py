"""
VTensor v1.0 - Check outcomes
The result type every core check returns; suites wrap these into reports.
"""

from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Any, Dict, Iterable, List, Mapping, Optional

from vtensor.core.series import Comparison, Interval


class Verdict(str, Enum):
    PASS = 'PASS'
    FAIL = 'FAIL'
    WINDOW_LIMITED = 'WINDOW-LIMITED'
    ILL_DEFINED = 'ILL-DEFINED'


# FAIL dominates, then ILL-DEFINED, then WINDOW-LIMITED.
_SEVERITY = {
    Verdict.PASS: 0,
    Verdict.WINDOW_LIMITED: 1,
    Verdict.ILL_DEFINED: 2,
    Verdict.FAIL: 3,
}


def window_json(window: Mapping[str, Interval]) -> Dict[str, List[Optional[str]]]:
    return {v: box.to_json() for v, box in sorted(window.items())}


@dataclass
class CheckOutcome:
    """Verdict of one exact comparison, with the window it certifies."""
    name: str
    verdict: Verdict
    window: Dict[str, Any] = field(default_factory=dict)
    witness: Optional[Dict[str, Any]] = None
    compared: int = 0
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict == Verdict.PASS

    def __bool__(self) -> bool:
        return self.passed

    @classmethod
    def from_comparison(cls, name: str, comparison: Comparison,
                        window: Mapping[str, Interval], **details) -> 'CheckOutcome':
        return cls(
            name=name,
            verdict=Verdict.PASS if comparison.equal else Verdict.FAIL,
            window=window_json(window),
            witness=comparison.witness.to_json() if comparison.witness else None,
            compared=comparison.compared,
            details=dict(details),
        )

    @classmethod
    def failure(cls, name: str, witness: Dict[str, Any], **details) -> 'CheckOutcome':
        return cls(name=name, verdict=Verdict.FAIL, witness=witness, details=dict(details))

    @classmethod
    def combine(cls, name: str, parts: Iterable['CheckOutcome'], **details) -> 'CheckOutcome':
        """Worst verdict of the parts; the first failing part supplies the witness."""
        parts = list(parts)
        verdict = Verdict.PASS
        witness = None
        window: Dict[str, Any] = {}
        for part in parts:
            if _SEVERITY[part.verdict] > _SEVERITY[verdict]:
                verdict = part.verdict
            if witness is None and part.verdict == Verdict.FAIL:
                witness = dict(part.witness or {'reason': 'failed'})
                witness.setdefault('check', part.name)
            if not window and part.window:
                window = part.window
        out = cls(name=name, verdict=verdict, window=window, witness=witness,
                  compared=sum(p.compared for p in parts), details=dict(details))
        out.details['parts'] = [p.to_dict() for p in parts]
        return out

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data['verdict'] = self.verdict.value
        return data

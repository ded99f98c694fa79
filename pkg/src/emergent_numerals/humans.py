"""Human numeral systems: parsing, naming distributions, costs and derived priors.

File format, one system per line (``#`` starts a comment)::

    language,kind,term_spec;term_spec;...

A ``term_spec`` is an explicit set ``{1,2,3}`` (ranges allowed: ``{4-20}``),
``rest`` for every number no explicit set covers, or ``gauss(mu)`` for an
approximate term with standard deviation ``weber * mu``.

Every term is read as a distribution over numbers (uniform on its set, or
the normalized Gaussian) and the naming is p(w|n) proportional to that
shape at n.  Disjoint sets therefore give a deterministic naming.
"""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np
from scipy.special import logsumexp

from .analysis import CostReport, comm_cost
from .core import DomainError, NamingDistribution, NeedPrior, NumberLine, NumeralSystem
from .priors import average_caps, blahut_arimoto_cap, log_gaussian_rows, maxent_prior

_GAUSS = re.compile(r"^gauss\(\s*([0-9.]+)\s*\)$")
_SET = re.compile(r"^\{(.*)\}$")


class ValidationError(ValueError):
    pass


@dataclass(frozen=True)
class Term:
    spec: str
    numbers: frozenset | None = None  # explicit set; None for gauss / rest
    mu: float | None = None
    rest: bool = False

    @classmethod
    def parse(cls, spec: str) -> "Term":
        spec = spec.strip()
        if spec == "rest":
            return cls(spec, rest=True)
        m = _GAUSS.match(spec)
        if m:
            return cls(spec, mu=float(m.group(1)))
        m = _SET.match(spec)
        if not m:
            raise ValidationError(f"cannot parse term {spec!r}")
        nums = set()
        for part in m.group(1).split(","):
            part = part.strip()
            if "-" in part:
                a, b = part.split("-")
                nums.update(range(int(a), int(b) + 1))
            elif part:
                nums.add(int(part))
        if not nums:
            raise ValidationError(f"empty term {spec!r}")
        return cls(spec, numbers=frozenset(nums))


@dataclass(frozen=True)
class HumanSystem:
    language: str
    kind: str  # "exact" or "approximate"
    terms: tuple

    def __post_init__(self):
        if self.kind not in ("exact", "approximate"):
            raise ValidationError(f"{self.language}: unknown kind {self.kind!r}")
        seen: set = set()
        for t in self.terms:
            if t.numbers is not None:
                overlap = seen & t.numbers
                if overlap:
                    raise ValidationError(f"{self.language}: numbers {sorted(overlap)} named twice")
                seen |= t.numbers
        if sum(t.rest for t in self.terms) > 1:
            raise ValidationError(f"{self.language}: more than one 'rest' term")

    @property
    def term_count(self) -> int:
        return len(self.terms)

    def log_shapes(self, line: NumberLine = NumberLine(), weber: float = 0.31) -> np.ndarray:
        covered = set().union(*(t.numbers for t in self.terms if t.numbers is not None))
        rest = frozenset(int(n) for n in line.numbers) - covered
        out = np.full((len(self.terms), line.size), -np.inf)
        for k, t in enumerate(self.terms):
            if t.mu is not None:
                out[k] = log_gaussian_rows([t.mu], weber, line)[0]
                continue
            nums = rest if t.rest else t.numbers
            if not nums:
                raise ValidationError(f"{self.language}: term {t.spec} covers no number")
            idx = [line.index(n) for n in sorted(nums)]
            out[k, idx] = -np.log(len(idx))
        return out

    def naming(self, line: NumberLine = NumberLine(), weber: float = 0.31) -> NamingDistribution:
        shapes = self.log_shapes(line, weber)
        norm = logsumexp(shapes, axis=0)
        if np.any(np.isneginf(norm)):
            missing = line.numbers[np.isneginf(norm)].tolist()
            raise ValidationError(f"{self.language}: numbers {missing} have no term")
        return NamingDistribution(np.exp(shapes - norm).T)

    def system(self, line: NumberLine = NumberLine()) -> NumeralSystem:
        """Mode system (the exact partition for exact systems)."""
        return NumeralSystem(self.naming(line).rows.argmax(axis=1))

    def cost(self, prior: NeedPrior, line: NumberLine = NumberLine(), weber: float = 0.31) -> CostReport:
        return comm_cost(self.naming(line, weber), prior)


def parse_human_systems(text: str) -> list[HumanSystem]:
    systems = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split(",", 2)
        if len(parts) != 3:
            raise ValidationError(f"malformed line {raw!r}")
        lang, kind, specs = (p.strip() for p in parts)
        terms = tuple(Term.parse(s) for s in _split_terms(specs))
        systems.append(HumanSystem(lang, kind, terms))
    return systems


def _split_terms(specs: str):
    # split on ';' outside braces
    out, depth, cur = [], 0, []
    for ch in specs:
        depth += ch in "{("
        depth -= ch in "})"
        if ch == ";" and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    return [s for s in (x.strip() for x in out) if s]


def load_human_systems(path=None) -> list[HumanSystem]:
    if path is None:
        text = resources.files(__package__).joinpath("data/human_systems.txt").read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    return parse_human_systems(text)


def ingest_human_systems(path=None, prior: NeedPrior | None = None, line: NumberLine = NumberLine()):
    """Systems from ``path`` (bundled file by default) with their cost under ``prior``."""
    systems = load_human_systems(path)
    if prior is None:
        return [(s, None) for s in systems]
    return [(s, s.cost(prior, line)) for s in systems]


def data_path(name: str) -> Path:
    return Path(str(resources.files(__package__).joinpath("data", name)))


def universal_cap(systems=None, line: NumberLine = NumberLine(), tol: float = 1e-10) -> NeedPrior:
    """Average of the capacity-achieving priors of the exact systems."""
    systems = load_human_systems() if systems is None else systems
    caps = [blahut_arimoto_cap(s.naming(line), tol=tol).prior for s in systems if s.kind == "exact"]
    return average_caps(caps)


def load_word_frequencies(path) -> HumanSystem | tuple:
    """Read a ``term,frequency`` CSV; returns (system, frequencies)."""
    text = Path(path).read_text(encoding="utf-8")
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    rows = list(csv.DictReader(io.StringIO("\n".join(lines))))
    terms = tuple(Term.parse(r["term"]) for r in rows)
    freqs = np.array([float(r["frequency"]) for r in rows])
    name = Path(path).stem
    kind = "approximate" if any(t.mu is not None for t in terms) else "exact"
    return HumanSystem(name, kind, terms), freqs / freqs.sum()


def maxent_prior_from_file(path, line: NumberLine = NumberLine(), weber: float = 0.31,
                           tol: float = 1e-10) -> NeedPrior:
    system, freqs = load_word_frequencies(path)
    return maxent_prior(system.naming(line, weber), freqs, tol=tol).prior

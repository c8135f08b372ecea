"""Linear level-crossing models H(t) = A + B t and their band structure.

A model is defined by the diagonal slopes ``beta`` (the diagonal of B), the
constant diabatic offsets ``alpha`` (the diagonal of A), and the Hermitian
off-diagonal coupling block of A.  Diabatic energies are straight lines
``E_i(t) = beta[i] * t + alpha[i]``; states sharing a slope form a band of
parallel levels.

States that share a slope can always be decoupled from each other by a
unitary rotation within the band (``canonicalize_bands``); most operations
in this package require that canonical form.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ModelSpec",
    "Band",
    "BandKind",
    "TransitionClass",
    "Violation",
    "BandTransform",
    "ModelFormatError",
    "validate",
    "is_valid",
    "is_canonical",
    "require_valid",
    "require_canonical",
    "bands",
    "classify_transition",
    "canonicalize_bands",
    "full_unitary",
    "parse_model",
    "load_model",
    "format_model",
]

NEAR_PARALLEL_TOL = 1e-9


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ModelSpec:
    """Definition of one model: slopes, offsets, and Hermitian couplings.

    ``coupling`` holds only the off-diagonal part of A; its diagonal must be
    zero (``alpha`` is the single source of the diagonal).  Indices are
    0-based throughout the Python API; the text file format is 1-based.
    """

    beta: np.ndarray
    alpha: np.ndarray
    coupling: np.ndarray

    def __post_init__(self):
        beta = _readonly(np.array(self.beta, dtype=float))
        alpha = _readonly(np.array(self.alpha, dtype=float))
        coupling = _readonly(np.array(self.coupling, dtype=complex))
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "coupling", coupling)

    @property
    def n(self) -> int:
        return self.beta.shape[0]

    @classmethod
    def from_pairs(cls, beta, alpha, pairs: dict | None = None) -> "ModelSpec":
        """Build a spec from ``{(i, j): g}`` upper-triangle couplings (0-based)."""
        beta = np.asarray(beta, dtype=float)
        n = beta.shape[0]
        coupling = np.zeros((n, n), dtype=complex)
        for (i, j), g in (pairs or {}).items():
            if i == j:
                raise ValueError(f"diagonal coupling ({i},{i}) not allowed")
            coupling[i, j] = g
            coupling[j, i] = np.conj(g)
        return cls(beta=beta, alpha=np.asarray(alpha, dtype=float),
                   coupling=coupling)

    def hamiltonian(self, t: float) -> np.ndarray:
        """Full Hermitian H(t) = diag(beta*t + alpha) + coupling."""
        return np.diag(self.beta * t + self.alpha) + self.coupling

    def replace(self, **kwargs) -> "ModelSpec":
        fields = {"beta": self.beta, "alpha": self.alpha,
                  "coupling": self.coupling}
        fields.update(kwargs)
        return ModelSpec(**fields)

    def __eq__(self, other):
        if not isinstance(other, ModelSpec):
            return NotImplemented
        return (np.array_equal(self.beta, other.beta)
                and np.array_equal(self.alpha, other.alpha)
                and np.array_equal(self.coupling, other.coupling))


class BandKind(enum.Enum):
    MAX_SLOPE = "max-slope"
    MIN_SLOPE = "min-slope"
    INTERIOR = "interior"
    UNIQUE_SLOPE_ALL = "unique-slope-all"


@dataclass(frozen=True)
class Band:
    """A maximal set of states sharing one slope, sorted by offset."""

    slope: float
    members: tuple[int, ...]
    kind: BandKind


class TransitionClass(enum.Enum):
    REGULAR_CROSSING = "regular-crossing"
    COUNTERINTUITIVE = "counterintuitive"
    WITHIN_BAND_INTUITIVE = "within-band-intuitive"
    DEGENERATE = "degenerate"
    INTERIOR_BAND = "interior-band"


@dataclass(frozen=True)
class Violation:
    """One invariant violation.  ``level`` is "error" or "warning"."""

    level: str
    message: str
    where: tuple[int, ...] = ()

    def __str__(self):
        return f"{self.level}: {self.message}"


def validate(spec: ModelSpec) -> list[Violation]:
    """Check every structural invariant; violations are data, not failures.

    Error-level entries make the model invalid.  Non-canonical intra-band
    couplings and nearly-parallel (but not exactly parallel) slopes are
    reported at warning level.
    """
    out: list[Violation] = []
    n = spec.beta.shape[0]
    if n < 1:
        out.append(Violation("error", "model must have at least one state"))
        return out
    if spec.alpha.shape != (n,):
        out.append(Violation(
            "error", f"alpha has length {spec.alpha.shape}, expected ({n},)"))
        return out
    if spec.coupling.shape != (n, n):
        out.append(Violation(
            "error",
            f"coupling has shape {spec.coupling.shape}, expected ({n}, {n})"))
        return out
    for name, arr in (("beta", spec.beta), ("alpha", spec.alpha)):
        if not np.all(np.isfinite(arr)):
            out.append(Violation("error", f"{name} contains non-finite values"))
    if not np.all(np.isfinite(spec.coupling)):
        out.append(Violation("error", "coupling contains non-finite values"))
        return out

    for i in range(n):
        if spec.coupling[i, i] != 0:
            out.append(Violation(
                "error",
                f"coupling diagonal must be zero at state {i + 1} "
                "(alpha carries the diagonal)",
                (i, i)))
    for i in range(n):
        for j in range(i + 1, n):
            if spec.coupling[i, j] != np.conj(spec.coupling[j, i]):
                out.append(Violation(
                    "error",
                    f"coupling not Hermitian between states {i + 1} and {j + 1}",
                    (i, j)))

    for i in range(n):
        for j in range(i + 1, n):
            if spec.beta[i] == spec.beta[j] and spec.coupling[i, j] != 0:
                out.append(Violation(
                    "warning",
                    f"non-canonical band coupling at ({i + 1},{j + 1}): "
                    "states share a slope but are coupled",
                    (i, j)))
            else:
                gap = abs(spec.beta[i] - spec.beta[j])
                if 0 < gap < NEAR_PARALLEL_TOL:
                    out.append(Violation(
                        "warning",
                        f"slopes of states {i + 1} and {j + 1} differ by "
                        f"{gap:.3e}; bands require exactly equal slopes",
                        (i, j)))
    return out


def is_valid(spec: ModelSpec) -> bool:
    return not any(v.level == "error" for v in validate(spec))


def is_canonical(spec: ModelSpec) -> bool:
    """Valid and with zero couplings inside every band."""
    return not any(
        v.level == "error" or "non-canonical" in v.message
        for v in validate(spec))


def require_valid(spec: ModelSpec) -> None:
    errors = [v for v in validate(spec) if v.level == "error"]
    if errors:
        raise ValueError("invalid model: " + "; ".join(v.message for v in errors))


def require_canonical(spec: ModelSpec) -> None:
    require_valid(spec)
    bad = [v for v in validate(spec) if "non-canonical" in v.message]
    if bad:
        raise ValueError(
            "model is not canonical: " + "; ".join(v.message for v in bad)
            + " (use canonicalize_bands first)")


def bands(spec: ModelSpec) -> list[Band]:
    """Partition states into bands of exactly equal slope.

    Bands appear in order of first state appearance; members are sorted by
    ascending offset (ties by index).  Kind compares the band's slope to the
    extremes of the distinct slopes.
    """
    require_valid(spec)
    groups: dict[float, list[int]] = {}
    order: list[float] = []
    for i, b in enumerate(spec.beta):
        b = float(b)
        if b not in groups:
            groups[b] = []
            order.append(b)
        groups[b].append(i)
    distinct = list(groups)
    top, bottom = max(distinct), min(distinct)
    result = []
    for slope in order:
        members = tuple(sorted(groups[slope],
                               key=lambda i: (spec.alpha[i], i)))
        if len(distinct) == 1:
            kind = BandKind.UNIQUE_SLOPE_ALL
        elif slope == top:
            kind = BandKind.MAX_SLOPE
        elif slope == bottom:
            kind = BandKind.MIN_SLOPE
        else:
            kind = BandKind.INTERIOR
        result.append(Band(slope=slope, members=members, kind=kind))
    return result


def classify_transition(spec: ModelSpec, source: int, target: int) -> TransitionClass:
    """Classify the transition source -> target (0-based indices).

    Levels with different slopes cross once: regular-crossing.  Within a
    band, the transition is counterintuitive when no sequence of pairwise
    crossings can reach the target: in a max-slope band that is a move up
    in offset, in a min-slope band a move down.  Interior bands carry no
    such classification.
    """
    require_canonical(spec)
    n = spec.n
    if not (0 <= source < n and 0 <= target < n):
        raise IndexError(f"state index out of range for n={n}")
    if source == target:
        raise ValueError("source and target must differ")
    b_s, b_t = spec.beta[source], spec.beta[target]
    if b_s != b_t:
        return TransitionClass.REGULAR_CROSSING
    band = next(b for b in bands(spec) if source in b.members)
    if band.kind is BandKind.UNIQUE_SLOPE_ALL:
        raise ValueError(
            "all states share one slope; no extreme band exists and "
            "within-band transitions are unclassified")
    a_s, a_t = spec.alpha[source], spec.alpha[target]
    if a_s == a_t:
        return TransitionClass.DEGENERATE
    if band.kind is BandKind.INTERIOR:
        return TransitionClass.INTERIOR_BAND
    if band.kind is BandKind.MAX_SLOPE:
        up = a_s < a_t
    else:
        up = a_s > a_t
    return (TransitionClass.COUNTERINTUITIVE if up
            else TransitionClass.WITHIN_BAND_INTUITIVE)


@dataclass(frozen=True)
class BandTransform:
    """Unitary applied within one band's subspace during canonicalization."""

    members: tuple[int, ...]
    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix",
                           _readonly(np.array(self.matrix, dtype=complex)))


def canonicalize_bands(spec: ModelSpec) -> tuple[ModelSpec, list[BandTransform]]:
    """Rotate each multi-state band so intra-band couplings vanish.

    Within each band the restriction of A is diagonalized; the band's
    offsets become its eigenvalues (ascending) and cross-band couplings are
    rotated accordingly.  Returns the canonical spec and the per-band
    unitaries, so results computed in the canonical basis can be mapped
    back: the full-window propagators in the lab frame satisfy
    ``U_canonical = V^dag @ U_original @ V`` with V from ``full_unitary``.
    """
    require_valid(spec)
    n = spec.n
    a_full = np.diag(spec.alpha.astype(complex)) + spec.coupling
    transforms: list[BandTransform] = []
    v = np.eye(n, dtype=complex)
    for band in bands(spec):
        if len(band.members) < 2:
            continue
        idx = np.array(band.members)
        block = a_full[np.ix_(idx, idx)]
        if np.all(block == np.diag(np.diag(block))):
            # Already diagonal (members are offset-sorted): exact identity.
            u = np.eye(len(idx), dtype=complex)
        else:
            _, u = np.linalg.eigh(block)
            v[np.ix_(idx, idx)] = u
        transforms.append(BandTransform(members=band.members, matrix=u))

    rotated = v.conj().T @ a_full @ v
    new_alpha = np.real(np.diag(rotated)).copy()
    new_coupling = rotated.copy()
    np.fill_diagonal(new_coupling, 0.0)
    # Exact zeros within bands and exact Hermiticity from the upper triangle.
    for band in bands(spec):
        idx = np.array(band.members)
        if len(idx) >= 2:
            new_coupling[np.ix_(idx, idx)] = 0.0
    upper = np.triu(new_coupling, 1)
    new_coupling = upper + upper.conj().T
    new_spec = ModelSpec(beta=spec.beta, alpha=new_alpha, coupling=new_coupling)
    return new_spec, transforms


def full_unitary(n: int, transforms: list[BandTransform]) -> np.ndarray:
    """Assemble the N x N block unitary from per-band transforms."""
    v = np.eye(n, dtype=complex)
    for tr in transforms:
        idx = np.array(tr.members)
        v[np.ix_(idx, idx)] = tr.matrix
    return v


# ---------------------------------------------------------------------------
# Model file format (line oriented, '#' comments, 1-based coupling indices):
#
#   n 5
#   beta 1 1 1 0 -0.8
#   alpha 0 0.3 0.5 0 -0.4
#   c 1 4 0.4 0.12
#
# Each "c i j re im" line sets coupling[i-1][j-1] = re + im*1j with i < j;
# the conjugate entry is implied.

class ModelFormatError(ValueError):
    """Raised when model file text does not follow the grammar."""


def parse_model(text: str) -> ModelSpec:
    n = None
    beta = None
    alpha = None
    entries: dict[tuple[int, int], complex] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        key = tokens[0]

        def fail(msg):
            raise ModelFormatError(f"line {lineno}: {msg}")

        if key == "n":
            if n is not None:
                fail("duplicate 'n' line")
            if len(tokens) != 2:
                fail("'n' takes exactly one integer")
            try:
                n = int(tokens[1])
            except ValueError:
                fail(f"bad integer {tokens[1]!r}")
            if n < 1:
                fail("n must be >= 1")
        elif key in ("beta", "alpha"):
            if n is None:
                fail(f"'{key}' before 'n'")
            try:
                values = [float(tok) for tok in tokens[1:]]
            except ValueError:
                fail(f"bad float in '{key}' line")
            if len(values) != n:
                fail(f"'{key}' needs {n} values, got {len(values)}")
            if key == "beta":
                if beta is not None:
                    fail("duplicate 'beta' line")
                beta = values
            else:
                if alpha is not None:
                    fail("duplicate 'alpha' line")
                alpha = values
        elif key == "c":
            if n is None:
                fail("'c' before 'n'")
            if len(tokens) != 5:
                fail("'c' takes: i j re im")
            try:
                i, j = int(tokens[1]), int(tokens[2])
                re, im = float(tokens[3]), float(tokens[4])
            except ValueError:
                fail("bad number in 'c' line")
            if not (1 <= i <= n and 1 <= j <= n):
                fail(f"state index out of range in c {i} {j}")
            if i >= j:
                fail(f"'c' requires i < j (got {i} {j}); "
                     "diagonal terms belong in alpha")
            if (i - 1, j - 1) in entries:
                fail(f"duplicate coupling ({i},{j})")
            entries[(i - 1, j - 1)] = complex(re, im)
        else:
            fail(f"unknown directive {key!r}")
    if n is None:
        raise ModelFormatError("missing 'n' line")
    if beta is None:
        raise ModelFormatError("missing 'beta' line")
    if alpha is None:
        raise ModelFormatError("missing 'alpha' line")
    return ModelSpec.from_pairs(beta, alpha, entries)


def load_model(path) -> ModelSpec:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_model(fh.read())


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def format_model(spec: ModelSpec, comment: str | None = None) -> str:
    """Serialize a spec to model file text (round-trips through parse_model)."""
    lines = []
    if comment:
        for chunk in comment.splitlines():
            lines.append(f"# {chunk}")
    lines.append(f"n {spec.n}")
    lines.append("beta " + " ".join(_fmt(b) for b in spec.beta))
    lines.append("alpha " + " ".join(_fmt(a) for a in spec.alpha))
    for i in range(spec.n):
        for j in range(i + 1, spec.n):
            g = spec.coupling[i, j]
            if g != 0:
                lines.append(f"c {i + 1} {j + 1} {_fmt(g.real)} {_fmt(g.imag)}")
    return "\n".join(lines) + "\n"

"""Erasure patterns, the two noise models, correctability, and class reduction.

A pattern records the erasure status of each of the 7 qubits in a code
block.  Text form uses one character per qubit:

    .   intact
    M   measured in the Z basis, outcome known (ideal-hardware failures)
    Z   Z erasure: unintentional Z measurement of unknown outcome
    E   full erasure: all information lost at a known location

The two models use disjoint alphabets: ideal patterns contain only '.' and
'M'; lossy patterns only '.', 'Z' and 'E'.

Correctability is purely combinatorial: a pattern with support S is
recoverable by the sequential single-qubit procedure iff |S| <= 2, or
|S| == 3 and S covers no logical operator.  Weight-4 supports that avoid
logical operators exist but the single-target recovery circuits do not
apply to them, so all weight >= 4 patterns are counted as procedure
failures.

``build_classes`` compresses the pattern space into equivalence classes by
partition refinement: starting from a candidate grouping (by weight for the
ideal model, by full/Z-erasure counts for the lossy model), classes are
split until every member of a class has the identical class-level outcome
distribution under one correction attempt, compared exactly as polynomials.
The fixed point is therefore a verified lumping of the Markov chain, not an
assumed one.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from fractions import Fraction
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

from .exact_arith import Poly
from .pauli_algebra import N_QUBITS, supports_logical


class Erasure(IntEnum):
    NONE = 0
    Z_MEASURED = 1
    Z_ERASED = 2
    FULL = 3


_STATUS_CHARS = {
    Erasure.NONE: ".",
    Erasure.Z_MEASURED: "M",
    Erasure.Z_ERASED: "Z",
    Erasure.FULL: "E",
}
_CHAR_STATUS = {v: k for k, v in _STATUS_CHARS.items()}

# A pattern is a 7-tuple of Erasure values; tuples keep it hashable and cheap.
Pattern = Tuple[Erasure, ...]

CLEAN_PATTERN: Pattern = (Erasure.NONE,) * N_QUBITS


class Model(Enum):
    IDEAL = "ideal"
    LOSSY = "lossy"


MODEL_ALPHABET = {
    Model.IDEAL: (Erasure.NONE, Erasure.Z_MEASURED),
    Model.LOSSY: (Erasure.NONE, Erasure.Z_ERASED, Erasure.FULL),
}


class Classification(Enum):
    CORRECTABLE = "correctable"
    PROCEDURE_FAIL = "procedure_fail"


class ClassUnsound(Exception):
    """Two members of one equivalence class disagree on outgoing distributions."""


def parse_pattern(text: str) -> Pattern:
    if len(text) != N_QUBITS:
        raise ValueError(f"pattern must have {N_QUBITS} characters, got {text!r}")
    try:
        return tuple(_CHAR_STATUS[ch] for ch in text)
    except KeyError as exc:
        raise ValueError(f"invalid pattern character {exc.args[0]!r}") from None


def format_pattern(pattern: Pattern) -> str:
    return "".join(_STATUS_CHARS[s] for s in pattern)


def pattern_support(pattern: Pattern) -> frozenset:
    return frozenset(q + 1 for q in range(N_QUBITS) if pattern[q] != Erasure.NONE)


def pattern_weight(pattern: Pattern) -> int:
    return sum(1 for s in pattern if s != Erasure.NONE)


def pattern_counts(pattern: Pattern) -> Tuple[int, int, int]:
    """(full erasures, Z erasures, Z measurements)."""
    m = sum(1 for s in pattern if s == Erasure.FULL)
    n = sum(1 for s in pattern if s == Erasure.Z_ERASED)
    k = sum(1 for s in pattern if s == Erasure.Z_MEASURED)
    return m, n, k


def infer_model(pattern: Pattern) -> Optional[Model]:
    """Model implied by the pattern alphabet; None when all qubits are intact."""
    has_m = any(s == Erasure.Z_MEASURED for s in pattern)
    has_loss = any(s in (Erasure.Z_ERASED, Erasure.FULL) for s in pattern)
    if has_m and has_loss:
        raise ValueError("pattern mixes the ideal and lossy alphabets")
    if has_m:
        return Model.IDEAL
    if has_loss:
        return Model.LOSSY
    return None


def classify(pattern: Pattern) -> Classification:
    """Correctable iff weight <= 2, or weight 3 with no covered logical."""
    w = pattern_weight(pattern)
    if w <= 2:
        return Classification.CORRECTABLE
    if w == 3 and not supports_logical(pattern_support(pattern)):
        return Classification.CORRECTABLE
    return Classification.PROCEDURE_FAIL


@dataclass(frozen=True)
class ModelParams:
    """Noise model with its symbolic (or numeric) rates.

    The ideal model has only the gate teleportation failure rate eps; the
    lossy model has the gate loss rate eps and the per-detector loss rate
    delta.  Rates are polynomials so the same engine serves symbolic series
    extraction, the delta = eps diagonal, and numeric evaluation.
    """

    model: Model
    eps: Poly
    delta: Poly

    @staticmethod
    def ideal(eps: Poly | Fraction | int | None = None) -> "ModelParams":
        p = Poly.eps() if eps is None else _as_poly(eps)
        return ModelParams(Model.IDEAL, p, Poly.zero())

    @staticmethod
    def lossy(
        eps: Poly | Fraction | int | None = None,
        delta: Poly | Fraction | int | None = None,
    ) -> "ModelParams":
        e = Poly.eps() if eps is None else _as_poly(eps)
        d = Poly.delta() if delta is None else _as_poly(delta)
        return ModelParams(Model.LOSSY, e, d)

    @staticmethod
    def lossy_diagonal(value: Poly | Fraction | int | None = None) -> "ModelParams":
        """Lossy model on the delta = eps line."""
        e = Poly.eps() if value is None else _as_poly(value)
        return ModelParams(Model.LOSSY, e, e)


def _as_poly(value) -> Poly:
    if isinstance(value, Poly):
        return value
    return Poly.constant(value)


def all_patterns(model: Model) -> List[Pattern]:
    """Every pattern over the model's alphabet (128 ideal, 2187 lossy)."""
    alphabet = MODEL_ALPHABET[model]
    return [tuple(p) for p in product(alphabet, repeat=N_QUBITS)]


@dataclass(frozen=True)
class PatternCensus:
    model: Model
    total: int
    by_weight: Dict[int, int]
    by_composition: Dict[Tuple[int, int, int], int]
    correctable: int
    procedure_fail: int


def enumerate_patterns(model: Model) -> PatternCensus:
    """Counts of the pattern space by weight and composition."""
    by_weight: Dict[int, int] = {}
    by_comp: Dict[Tuple[int, int, int], int] = {}
    n_ok = n_fail = 0
    patterns = all_patterns(model)
    for p in patterns:
        w = pattern_weight(p)
        by_weight[w] = by_weight.get(w, 0) + 1
        comp = pattern_counts(p)
        by_comp[comp] = by_comp.get(comp, 0) + 1
        if classify(p) is Classification.CORRECTABLE:
            n_ok += 1
        else:
            n_fail += 1
    return PatternCensus(
        model=model,
        total=len(patterns),
        by_weight=by_weight,
        by_composition=by_comp,
        correctable=n_ok,
        procedure_fail=n_fail,
    )


# ----------------------------------------------------------------------
# Equivalence classes
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class EquivClass:
    id: int
    label: str
    representative: Pattern
    size: int
    members: Tuple[Pattern, ...]


@dataclass
class ClassTable:
    model: Model
    classes: List[EquivClass]
    index: Dict[Pattern, int] = field(repr=False)
    clean_id: int
    fail_id: int

    def class_of(self, pattern: Pattern) -> int:
        return self.index[pattern]

    def labels(self) -> List[str]:
        return [c.label for c in self.classes]

    def to_json(self) -> dict:
        return {
            "model": self.model.value,
            "clean_id": self.clean_id,
            "fail_id": self.fail_id,
            "classes": [
                {
                    "id": c.id,
                    "label": c.label,
                    "representative": format_pattern(c.representative),
                    "size": c.size,
                }
                for c in self.classes
            ],
        }


def _base_label(pattern: Pattern, model: Model) -> str:
    if pattern_weight(pattern) == 0:
        return "clean"
    if classify(pattern) is Classification.PROCEDURE_FAIL:
        return "fail"
    m, n, k = pattern_counts(pattern)
    if model is Model.IDEAL:
        return f"w{k}"
    return f"[{m},{n}]"


def _fail_representative(model: Model) -> Pattern:
    status = Erasure.Z_MEASURED if model is Model.IDEAL else Erasure.FULL
    return (status,) * N_QUBITS


def _orbit_partition(
    patterns: Sequence[Pattern], symmetry: Sequence[Tuple[int, ...]]
) -> Dict[Pattern, Pattern]:
    """Map each pattern to its orbit representative under the permutations."""
    rep: Dict[Pattern, Pattern] = {}
    for p in patterns:
        orbit = {p}
        for perm in symmetry:
            q = [Erasure.NONE] * N_QUBITS
            for k in range(N_QUBITS):
                q[perm[k] - 1] = p[k]
            orbit.add(tuple(q))
        rep[p] = min(orbit)
    return rep


def build_classes(
    model: Model,
    symmetry: Optional[Sequence[Tuple[int, ...]]] = None,
    merge: bool = True,
    config=None,
) -> ClassTable:
    """Partition the pattern space into verified equivalence classes.

    With ``merge=True`` (the default), patterns are first grouped by their
    correction signature (weight / erasure composition) and the grouping is
    refined until one attempt's class-level outcome distribution is
    literally identical, as exact polynomials, for every member of every
    class.  With ``merge=False`` only the orbit partition under ``symmetry``
    is used (trivial symmetry then yields one class per pattern).
    """
    from .correction_circuits import FaultModel, attempt

    fault_model = config if config is not None else FaultModel()
    params = (
        ModelParams.ideal() if model is Model.IDEAL else ModelParams.lossy()
    )
    patterns = all_patterns(model)

    # Seed partition: signature groups when merging, otherwise the orbit
    # partition under the supplied symmetry (trivial symmetry keeps every
    # pattern in its own class, the degenerate baseline).
    groups: Dict[object, List[Pattern]] = {}
    if merge:
        for p in patterns:
            groups.setdefault(_base_label(p, model), []).append(p)
    else:
        symmetry = symmetry or [tuple(range(1, N_QUBITS + 1))]
        orbit_rep = _orbit_partition(patterns, symmetry)
        for p in patterns:
            groups.setdefault(orbit_rep[p], []).append(p)

    partition: List[List[Pattern]] = [
        sorted(g) for _, g in sorted(groups.items(), key=lambda kv: str(kv[0]))
    ]

    if merge:
        partition = _refine_partition(partition, params, fault_model)

    # Stable ordering: clean first, then by (weight, composition), fail last.
    def sort_key(group: List[Pattern]):
        p = group[0]
        if pattern_weight(p) == 0:
            return (0, 0, (0, 0, 0), ())
        if classify(p) is Classification.PROCEDURE_FAIL:
            return (2, pattern_weight(p), (0, 0, 0), p)
        m, n, k = pattern_counts(p)
        return (1, pattern_weight(p), (m, n, k), p)

    partition.sort(key=sort_key)

    sink = _fail_representative(model)
    classes: List[EquivClass] = []
    index: Dict[Pattern, int] = {}
    label_counts: Dict[str, int] = {}
    clean_id = fail_id = -1
    for cid, group in enumerate(partition):
        rep = group[0]
        label = _base_label(rep, model)
        if label == "fail":
            if sink in group:
                rep = sink
                fail_id = cid
            else:
                # Unmerged procedure-failure orbit; it drains into the sink
                # in one step, so it only needs a distinguishable label.
                label = f"fail:{format_pattern(rep)}"
        elif label == "clean":
            clean_id = cid
        else:
            label_counts[label] = label_counts.get(label, 0) + 1
        classes.append(
            EquivClass(
                id=cid,
                label=label,
                representative=rep,
                size=len(group),
                members=tuple(group),
            )
        )
        for p in group:
            index[p] = cid

    # Disambiguate labels when refinement split a signature group.
    seen: Dict[str, int] = {}
    relabeled: List[EquivClass] = []
    for c in classes:
        total = label_counts.get(c.label, 1)
        if c.label not in ("clean", "fail") and total > 1:
            n = seen.get(c.label, 0)
            seen[c.label] = n + 1
            suffix = chr(ord("a") + n) if n < 26 else f"_{n}"
            c = EquivClass(c.id, f"{c.label}{suffix}", c.representative, c.size, c.members)
        relabeled.append(c)
    classes = relabeled

    if clean_id < 0 or fail_id < 0:
        raise RuntimeError("pattern space lost its clean or fail class")
    return ClassTable(
        model=model, classes=classes, index=index, clean_id=clean_id, fail_id=fail_id
    )


def _refine_partition(partition, params, fault_model):
    """Split classes until class-projected outcome rows match exactly."""
    from .correction_circuits import attempt

    # Outcome distributions over raw patterns never change; cache them.
    outcome_cache: Dict[Pattern, Dict[Pattern, Poly]] = {}

    def outcomes(p: Pattern) -> Dict[Pattern, Poly]:
        if p not in outcome_cache:
            outcome_cache[p] = attempt(p, params, fault_model)
        return outcome_cache[p]

    while True:
        index: Dict[Pattern, int] = {}
        for cid, group in enumerate(partition):
            for p in group:
                index[p] = cid

        new_partition: List[List[Pattern]] = []
        changed = False
        for group in partition:
            rows: Dict[tuple, List[Pattern]] = {}
            for p in group:
                projected: Dict[int, Poly] = {}
                for q, prob in outcomes(p).items():
                    cid = index[q]
                    projected[cid] = projected.get(cid, Poly.zero()) + prob
                key = tuple(
                    (cid, projected[cid].key()) for cid in sorted(projected)
                )
                rows.setdefault(key, []).append(p)
            if len(rows) > 1:
                changed = True
            new_partition.extend(sorted(g) for g in rows.values())
        partition = new_partition
        if not changed:
            return partition


def verify_class_soundness(table: ClassTable, params: ModelParams, config=None) -> None:
    """Exact check that every member of every class shares one projected row.

    Raises ClassUnsound on the first disagreement; used by the chain builder
    and directly by tests.
    """
    from .correction_circuits import FaultModel, attempt

    fault_model = config if config is not None else FaultModel()
    for cls in table.classes:
        reference = None
        for p in cls.members:
            projected: Dict[int, Poly] = {}
            for q, prob in attempt(p, params, fault_model).items():
                cid = table.index[q]
                projected[cid] = projected.get(cid, Poly.zero()) + prob
            row = tuple((cid, projected[cid].key()) for cid in sorted(projected))
            if reference is None:
                reference = row
            elif row != reference:
                raise ClassUnsound(
                    f"class {cls.label!r}: {format_pattern(p)} disagrees with "
                    f"{format_pattern(cls.representative)}"
                )


# ----------------------------------------------------------------------
# Initial distribution
# ----------------------------------------------------------------------

def qubit_marginals(params: ModelParams) -> Dict[Erasure, Poly]:
    """Per-qubit erasure probabilities injected by one encoded gate.

    Ideal hardware: each qubit is measured in Z with probability eps.
    Lossy hardware: each gate failure fully erases the qubit being
    teleported and Z-erases its partner, so the per-qubit marginal splits
    the failure rate evenly between the two types.
    """
    one = Poly.one()
    if params.model is Model.IDEAL:
        return {
            Erasure.NONE: one - params.eps,
            Erasure.Z_MEASURED: params.eps,
        }
    half = Fraction(1, 2)
    return {
        Erasure.NONE: one - params.eps,
        Erasure.FULL: half * params.eps,
        Erasure.Z_ERASED: half * params.eps,
    }


def pattern_probability(pattern: Pattern, params: ModelParams) -> Poly:
    """Probability of one injected pattern (independent qubits)."""
    marginals = qubit_marginals(params)
    prob = Poly.one()
    for status in pattern:
        prob = prob * marginals[status]
    return prob


def initial_distribution(params: ModelParams, table: ClassTable) -> Dict[int, Poly]:
    """Class-level distribution of the injected erasure pattern."""
    if table.model is not params.model:
        raise ValueError("class table and params disagree on the model")
    dist: Dict[int, Poly] = {}
    for p in all_patterns(params.model):
        cid = table.index[p]
        dist[cid] = dist.get(cid, Poly.zero()) + pattern_probability(p, params)
    return dist


def class_table_json(table: ClassTable) -> str:
    return json.dumps(table.to_json(), indent=2, sort_keys=True)

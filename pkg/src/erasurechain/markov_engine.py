"""Absorbing Markov chain over erasure-pattern classes.

One correction attempt defines a stochastic map on equivalence classes;
iterating it describes the whole recovery procedure.  Two absorbing states:
the clean pattern (recovery finished) and the failure sink (the block is
discarded and counts as an encoded failure: an encoded Z measurement under
ideal hardware, an encoded full erasure under lossy hardware).

The encoded failure rate is the probability of absorbing into the sink,
starting from the distribution injected by one encoded gate.  It is
computed two ways, both exact:

* at a numeric rate, by solving the absorbing-chain linear system with
  Fraction Gaussian elimination (this is what threshold searches use; the
  truncated series is unreliable near the threshold);
* as a power series in eps, by iterating the transition map with all
  polynomials truncated at the requested order until the unabsorbed mass
  vanishes at that order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .exact_arith import Poly
from .erasure_model import (
    ClassTable,
    Model,
    ModelParams,
    build_classes,
    initial_distribution,
    verify_class_soundness,
)
from .correction_circuits import DEFAULT_FAULT_MODEL, FaultModel, attempt


@dataclass
class TransitionMatrix:
    table: ClassTable
    P: List[List[Poly]]
    params: ModelParams
    config: FaultModel

    @property
    def size(self) -> int:
        return len(self.table.classes)

    @property
    def absorbing(self) -> Tuple[int, int]:
        return (self.table.clean_id, self.table.fail_id)

    def row_sums(self) -> List[Poly]:
        sums = []
        for row in self.P:
            total = Poly.zero()
            for entry in row:
                total = total + entry
            sums.append(total)
        return sums

    def evaluate(self, eps: Fraction, delta: Fraction = Fraction(0)) -> List[List[Fraction]]:
        return [
            [entry.evaluate(eps, delta) for entry in row] for row in self.P
        ]

    def to_json(self) -> dict:
        return {
            "model": self.params.model.value,
            "config_hash": self.config.config_hash(),
            "classes": self.table.to_json()["classes"],
            "absorbing": list(self.absorbing),
            "matrix": [[entry.to_json() for entry in row] for row in self.P],
        }


@dataclass
class ChainResult:
    encoded_failure: Poly | Fraction
    attempts_used: Optional[int]
    residual_mass: Poly | Fraction


def build_chain(
    params: ModelParams,
    table: Optional[ClassTable] = None,
    config: FaultModel = DEFAULT_FAULT_MODEL,
    verify: bool = True,
) -> TransitionMatrix:
    """Assemble the class-level transition matrix for one attempt.

    With ``verify=True`` every member of every class is checked against its
    representative; a mismatch raises ClassUnsound.  Absorbing rows (clean,
    fail) are identity rows.
    """
    if table is None:
        table = build_classes(params.model, config=config)
    if table.model is not params.model:
        raise ValueError("class table and params disagree on the model")
    if verify:
        verify_class_soundness(table, params, config)

    n = len(table.classes)
    P: List[List[Poly]] = []
    for cls in table.classes:
        row = [Poly.zero() for _ in range(n)]
        if cls.id in (table.clean_id, table.fail_id):
            row[cls.id] = Poly.one()
        else:
            for q, prob in attempt(cls.representative, params, config).items():
                cid = table.index[q]
                row[cid] = row[cid] + prob
        P.append(row)
    return TransitionMatrix(table=table, P=P, params=params, config=config)


def _apply(dist: Dict[int, Poly], P: List[List[Poly]]) -> Dict[int, Poly]:
    out: Dict[int, Poly] = {}
    for cid, mass in dist.items():
        if mass.is_zero():
            continue
        for j, entry in enumerate(P[cid]):
            if entry.is_zero():
                continue
            out[j] = out.get(j, Poly.zero()) + mass * entry
    return out


def run_to_absorption(
    chain: TransitionMatrix,
    initial: Optional[Dict[int, Poly]] = None,
    max_attempts: Optional[int] = None,
    series_order: Optional[int] = None,
) -> ChainResult:
    """Encoded failure probability from iterating or solving the chain.

    ``max_attempts`` iterates that many attempts exactly and reports the
    unabsorbed residual.  Unbounded absorption requires either numeric
    parameters (solved by exact elimination) or ``series_order`` (solved by
    truncated iteration).
    """
    if initial is None:
        initial = initial_distribution(chain.params, chain.table)

    clean_id, fail_id = chain.absorbing

    if max_attempts is not None:
        if max_attempts < 0:
            raise ValueError("max_attempts must be >= 0")
        dist = dict(initial)
        for _ in range(max_attempts):
            dist = _apply(dist, chain.P)
        fail_mass = _sink_mass(dist, chain.table, fail_id)
        clean_mass = dist.get(clean_id, Poly.zero())
        residual = Poly.one() - clean_mass - fail_mass
        return ChainResult(
            encoded_failure=fail_mass,
            attempts_used=max_attempts,
            residual_mass=residual,
        )

    if series_order is not None:
        series = _absorb_series(chain, initial, series_order)
        return ChainResult(
            encoded_failure=series, attempts_used=None, residual_mass=Poly.zero()
        )

    if _is_numeric(chain):
        value = _absorb_numeric(chain, initial)
        return ChainResult(
            encoded_failure=value, attempts_used=None, residual_mass=Fraction(0)
        )
    raise ValueError(
        "unbounded absorption with symbolic rates needs series_order"
    )


def _sink_mass(dist: Dict[int, Poly], table: ClassTable, fail_id: int) -> Poly:
    """Mass in the sink plus mass parked in unmerged procedure-fail classes.

    With the merged tables every failure pattern is already in the sink
    class; unmerged baselines keep one-step antechambers whose mass is
    committed to failing and is counted here.
    """
    from .erasure_model import Classification, classify

    total = dist.get(fail_id, Poly.zero())
    for cls in table.classes:
        if cls.id in (fail_id,):
            continue
        if classify(cls.representative) is Classification.PROCEDURE_FAIL:
            total = total + dist.get(cls.id, Poly.zero())
    return total


def _is_numeric(chain: TransitionMatrix) -> bool:
    eps_const = chain.params.eps.total_degree() <= 0
    delta_const = chain.params.delta.total_degree() <= 0
    return eps_const and delta_const


def _absorb_series(
    chain: TransitionMatrix, initial: Dict[int, Poly], order: int
) -> Poly:
    """Iterate with truncation until the unabsorbed mass vanishes at the order.

    Every zero-noise transition makes strict progress toward absorption, so
    mass that survives k extra rounds carries at least k powers of the
    noise rates; the truncated residual reaches exact zero in a bounded
    number of steps.
    """
    clean_id, fail_id = chain.absorbing
    dist = {cid: p.truncate(order) for cid, p in initial.items()}
    fail_mass = dist.pop(fail_id, Poly.zero())
    dist.pop(clean_id, None)

    limit = 40 * (order + 2)
    for _ in range(limit):
        if not any(not p.is_zero() for p in dist.values()):
            return fail_mass
        nxt: Dict[int, Poly] = {}
        for cid, mass in dist.items():
            if mass.is_zero():
                continue
            for j, entry in enumerate(chain.P[cid]):
                if entry.is_zero():
                    continue
                contrib = (mass * entry).truncate(order)
                if contrib.is_zero():
                    continue
                nxt[j] = nxt.get(j, Poly.zero()) + contrib
        fail_mass = (fail_mass + nxt.pop(fail_id, Poly.zero())).truncate(order)
        nxt.pop(clean_id, None)
        dist = nxt
    raise RuntimeError("series iteration did not absorb; chain may not progress")


def _absorb_numeric(chain: TransitionMatrix, initial: Dict[int, Poly]) -> Fraction:
    """Unbounded absorption for a chain built at numeric rates.

    The matrix entries are constant polynomials, so evaluating the symbolic
    solver at (0, 0) reads the constants off exactly.
    """
    return encoded_failure_at(chain, Fraction(0), Fraction(0), initial)


def _solve_linear(A: List[List[Fraction]], b: List[Fraction]) -> List[Fraction]:
    """Gaussian elimination with exact rationals (partial pivot on nonzero)."""
    n = len(A)
    M = [row[:] + [b[i]] for i, row in enumerate(A)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if M[r][col] != 0), None)
        if pivot is None:
            raise ValueError("singular transient system")
        M[col], M[pivot] = M[pivot], M[col]
        inv = Fraction(1) / M[col][col]
        M[col] = [x * inv for x in M[col]]
        for r in range(n):
            if r != col and M[r][col] != 0:
                factor = M[r][col]
                M[r] = [x - factor * y for x, y in zip(M[r], M[col])]
    return [M[i][n] for i in range(n)]


def encoded_failure_at(
    chain: TransitionMatrix,
    eps: Fraction,
    delta: Fraction,
    initial: Optional[Dict[int, Poly]] = None,
) -> Fraction:
    """Exact absorption probability of a symbolic chain at numeric rates.

    Evaluates the symbolic matrix and initial distribution at (eps, delta)
    and solves the absorbing system; this is the workhorse behind threshold
    bisection (one symbolic build, many numeric solves).
    """
    if initial is None:
        initial = initial_distribution(chain.params, chain.table)
    clean_id, fail_id = chain.absorbing
    n = chain.size
    transient = [i for i in range(n) if i not in (clean_id, fail_id)]
    pos = {cid: k for k, cid in enumerate(transient)}
    m = len(transient)

    A = [[Fraction(0)] * m for _ in range(m)]
    b = [Fraction(0)] * m
    for i in transient:
        for j in range(n):
            entry = chain.P[i][j]
            if entry.is_zero():
                continue
            v = entry.evaluate(eps, delta)
            if j == fail_id:
                b[pos[i]] += v
            elif j != clean_id:
                A[pos[i]][pos[j]] -= v
        A[pos[i]][pos[i]] += Fraction(1)
    solution = _solve_linear(A, b)

    total = Fraction(0)
    for cid, mass in initial.items():
        v = mass.evaluate(eps, delta)
        if cid == fail_id:
            total += v
        elif cid != clean_id:
            total += v * solution[pos[cid]]
    return total


def recursion_series(
    params: ModelParams,
    order: int,
    config: FaultModel = DEFAULT_FAULT_MODEL,
    table: Optional[ClassTable] = None,
) -> Poly:
    """Encoded failure rate as an exact series in eps, truncated at ``order``.

    The lossy model is evaluated on the delta = eps diagonal so the result
    is single-variable in both models.
    """
    if order < 0:
        raise ValueError("order must be >= 0")
    if params.model is Model.LOSSY:
        params = ModelParams(Model.LOSSY, params.eps, params.eps)
    chain = build_chain(params, table=table, config=config)
    result = run_to_absorption(chain, series_order=order)
    return result.encoded_failure


def chain_json(chain: TransitionMatrix) -> str:
    return json.dumps(chain.to_json(), indent=2, sort_keys=True)

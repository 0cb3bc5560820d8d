"""One error-correction attempt as an exact stochastic map on erasure patterns.

The recovery strategy corrects full erasures first; once none remain it
corrects Z erasures and Z measurements.  One attempt is one circuit
application on a single target qubit:

ZRecovery (teleported single-qubit recovery)
    The target qubit, plus three intact helper qubits chosen so that the
    four together support both an X-type and a Z-type stabilizer element,
    plus a fresh |+> qubit that replaces the target.  Fault locations:

    * target readout, only when the target is a Z erasure (its outcome is
      unknown and must be read out first): the photon is lost with
      probability delta, the target becomes a full erasure and the attempt
      is abandoned;
    * three helper teleportations.  Ideal hardware: each fails with
      probability eps and the helper ends Z-measured with a known outcome.
      Lossy hardware: each loses its photon with probability delta, the
      helper ends fully erased and the fresh control qubit picks up a
      Z-erasure mark.

    Only when every location succeeds is the target recovered; any helper
    fault leaves the target erased (Z-measured under ideal hardware, a
    Z erasure on the fresh qubit under lossy hardware).

FullErasureToZ (ancilla-register stabilizer measurement)
    Measures the Z-type stabilizer covering the target and three intact
    helpers, converting a full erasure into a Z erasure when it succeeds.
    Fault locations:

    * four ancilla detectors, each losing its photon with probability
      delta; any loss voids the measurement and the target stays fully
      erased;
    * four coupling gates between ancilla and data qubits, each failing
      with probability eps; the data qubit hit picks up a Z-erasure mark
      (back-action on the gate's data side; ancilla-side loss is already
      accounted by the detector locations).  The mark is invisible on the
      target, which is already erased, so only the three helper couplings
      shape the outcome.

All location counts live in ``FaultModel`` so alternative accountings can
be explored; outputs record the configuration hash.  Ancilla preparation
(Bell pairs, |+>, the four-qubit register) is taken as error-free: offline
preparation can be repeated until it succeeds.

Every operation returns an OutcomeDistribution whose probabilities are
exact polynomials summing to one.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import combinations
from typing import Dict, Tuple

from .exact_arith import Poly
from .erasure_model import (
    Classification,
    Erasure,
    Model,
    ModelParams,
    Pattern,
    classify,
    pattern_weight,
)
from .pauli_algebra import N_QUBITS, stabilizer_supports_weight4

OutcomeDistribution = Dict[Pattern, Poly]


class StepKind(Enum):
    FULL_TO_Z = "full_to_z"
    Z_RECOVERY = "z_recovery"


class Done:
    """Sentinel: nothing left to correct."""

    def __repr__(self) -> str:
        return "Done"


class Abort:
    """Sentinel: the pattern is a procedure failure."""

    def __repr__(self) -> str:
        return "Abort"


DONE = Done()
ABORT = Abort()


@dataclass(frozen=True)
class CorrectionStep:
    kind: StepKind
    target: int
    helpers: Tuple[int, int, int]


@dataclass(frozen=True)
class FaultModel:
    """Configurable fault-location counts for the two correction circuits.

    readout_detections: photon detections in the target readout of a
        Z-erasure recovery (loss probability 1-(1-delta)^n).
    helper_detections: detections per helper teleportation measurement.
    ancilla_detections: detections in the stabilizer-measurement register.
    coupling_full_fraction: fraction of coupling-gate back-action that
        fully erases the data qubit instead of Z-erasing it (0 keeps the
        pure Z back-action of the control side).
    """

    readout_detections: int = 1
    helper_detections: int = 1
    ancilla_detections: int = 4
    coupling_full_fraction: Fraction = Fraction(0)

    def to_json(self) -> dict:
        return {
            "readout_detections": self.readout_detections,
            "helper_detections": self.helper_detections,
            "ancilla_detections": self.ancilla_detections,
            "coupling_full_fraction": str(self.coupling_full_fraction),
        }

    @staticmethod
    def from_json(data: dict) -> "FaultModel":
        kwargs = {}
        if "readout_detections" in data:
            kwargs["readout_detections"] = int(data["readout_detections"])
        if "helper_detections" in data:
            kwargs["helper_detections"] = int(data["helper_detections"])
        if "ancilla_detections" in data:
            kwargs["ancilla_detections"] = int(data["ancilla_detections"])
        if "coupling_full_fraction" in data:
            kwargs["coupling_full_fraction"] = Fraction(data["coupling_full_fraction"])
        return FaultModel(**kwargs)

    def config_hash(self) -> str:
        canonical = json.dumps(self.to_json(), sort_keys=True)
        return hashlib.sha256(canonical.encode()).hexdigest()[:12]


DEFAULT_FAULT_MODEL = FaultModel()

_QUADS = None


def _quad_supports():
    global _QUADS
    if _QUADS is None:
        _QUADS = tuple(frozenset(s) for s in stabilizer_supports_weight4())
    return _QUADS


def select_step(pattern: Pattern):
    """Choose the next correction action for a pattern.

    Returns DONE for a clean pattern, ABORT for a procedure failure, and
    otherwise a CorrectionStep targeting the lowest-indexed full erasure
    (or, when none remain, the lowest-indexed Z erasure / Z measurement)
    with the lexicographically smallest valid helper set.
    """
    if pattern_weight(pattern) == 0:
        return DONE
    if classify(pattern) is Classification.PROCEDURE_FAIL:
        return ABORT

    fulls = [q + 1 for q in range(N_QUBITS) if pattern[q] == Erasure.FULL]
    if fulls:
        kind, target = StepKind.FULL_TO_Z, fulls[0]
    else:
        zs = [q + 1 for q in range(N_QUBITS) if pattern[q] != Erasure.NONE]
        kind, target = StepKind.Z_RECOVERY, zs[0]

    intact = {q + 1 for q in range(N_QUBITS) if pattern[q] == Erasure.NONE}
    candidates = sorted(
        tuple(sorted(quad - {target}))
        for quad in _quad_supports()
        if target in quad and (quad - {target}) <= intact
    )
    if not candidates:
        # Cannot happen for correctable patterns: any <=2 other erased
        # qubits leave at least one covering stabilizer support free.
        raise RuntimeError(f"no valid helper set for {pattern}")
    return CorrectionStep(kind=kind, target=target, helpers=candidates[0])


def _loss_probability(delta: Poly, detections: int) -> Poly:
    """1 - (1-delta)^detections, exactly."""
    keep = Poly.one()
    survive = Poly.one() - delta
    for _ in range(detections):
        keep = keep * survive
    return Poly.one() - keep


def _with_status(pattern: Pattern, qubit: int, status: Erasure) -> Pattern:
    updated = list(pattern)
    updated[qubit - 1] = status
    return tuple(updated)


def _accumulate(dist: OutcomeDistribution, pattern: Pattern, prob: Poly) -> None:
    if prob.is_zero():
        return
    if pattern in dist:
        dist[pattern] = dist[pattern] + prob
    else:
        dist[pattern] = prob


def apply_z_recovery(
    pattern: Pattern,
    step: CorrectionStep,
    params: ModelParams,
    config: FaultModel = DEFAULT_FAULT_MODEL,
) -> OutcomeDistribution:
    """Outcome distribution of one teleported single-qubit recovery."""
    if step.kind is not StepKind.Z_RECOVERY:
        raise ValueError("step is not a Z recovery")
    target_status = pattern[step.target - 1]
    if target_status not in (Erasure.Z_MEASURED, Erasure.Z_ERASED):
        raise ValueError("Z recovery target must be Z-measured or Z-erased")
    for h in step.helpers:
        if pattern[h - 1] != Erasure.NONE:
            raise ValueError("helpers must be intact")

    one = Poly.one()
    dist: OutcomeDistribution = {}

    if params.model is Model.IDEAL:
        # Three teleportation locations, each failing with probability eps
        # and Z-measuring its helper; any failure leaves the target unfixed.
        p_fail = params.eps
        p_ok = one - p_fail
        for k in range(4):
            for failed in combinations(step.helpers, k):
                prob = one
                for h in step.helpers:
                    prob = prob * (p_fail if h in failed else p_ok)
                if k == 0:
                    out = _with_status(pattern, step.target, Erasure.NONE)
                else:
                    out = pattern
                    for h in failed:
                        out = _with_status(out, h, Erasure.Z_MEASURED)
                _accumulate(dist, out, prob)
        return dist

    # Lossy hardware.
    p_readout = _loss_probability(params.delta, config.readout_detections)
    p_helper = _loss_probability(params.delta, config.helper_detections)
    survive_readout = one - p_readout
    survive_helper = one - p_helper

    if target_status is Erasure.Z_ERASED:
        # The unknown outcome must be read out first; loss destroys the
        # qubit and the attempt is abandoned before the teleportations.
        _accumulate(dist, _with_status(pattern, step.target, Erasure.FULL), p_readout)
        proceed = survive_readout
    else:
        proceed = one

    for k in range(4):
        for failed in combinations(step.helpers, k):
            prob = proceed
            for h in step.helpers:
                prob = prob * (p_helper if h in failed else survive_helper)
            if k == 0:
                out = _with_status(pattern, step.target, Erasure.NONE)
            else:
                # Failed teleportations fully erase their helpers and leave
                # an unknown Z correction on the fresh replacement qubit.
                out = _with_status(pattern, step.target, Erasure.Z_ERASED)
                for h in failed:
                    out = _with_status(out, h, Erasure.FULL)
            _accumulate(dist, out, prob)
    return dist


def apply_full_to_z(
    pattern: Pattern,
    step: CorrectionStep,
    params: ModelParams,
    config: FaultModel = DEFAULT_FAULT_MODEL,
) -> OutcomeDistribution:
    """Outcome distribution of one covering-stabilizer measurement."""
    if step.kind is not StepKind.FULL_TO_Z:
        raise ValueError("step is not a full-erasure conversion")
    if pattern[step.target - 1] != Erasure.FULL:
        raise ValueError("conversion target must be fully erased")
    if params.model is not Model.LOSSY:
        raise ValueError("full erasures occur only in the lossy model")

    one = Poly.one()
    p_meas_fail = _loss_probability(params.delta, config.ancilla_detections)
    p_meas_ok = one - p_meas_fail
    p_couple = params.eps
    p_couple_ok = one - p_couple
    frac_full = Fraction(config.coupling_full_fraction)

    dist: OutcomeDistribution = {}
    for measured, meas_prob in ((True, p_meas_ok), (False, p_meas_fail)):
        base = _with_status(
            pattern, step.target, Erasure.Z_ERASED if measured else Erasure.FULL
        )
        # The target's own coupling gate cannot change its status further,
        # so only the three helper couplings are enumerated.
        for k in range(4):
            for hit in combinations(step.helpers, k):
                # Each hit helper is Z-erased, or fully erased for the
                # configured fraction of coupling failures.
                for full_subset in _subsets(hit) if frac_full else ((),):
                    prob = meas_prob
                    for h in step.helpers:
                        if h not in hit:
                            prob = prob * p_couple_ok
                        elif h in full_subset:
                            prob = prob * (p_couple * frac_full)
                        else:
                            prob = prob * (p_couple * (1 - frac_full))
                    out = base
                    for h in hit:
                        status = Erasure.FULL if h in full_subset else Erasure.Z_ERASED
                        out = _with_status(out, h, status)
                    _accumulate(dist, out, prob)
    return dist


def _subsets(items):
    for k in range(len(items) + 1):
        yield from combinations(items, k)


def attempt(
    pattern: Pattern,
    params: ModelParams,
    config: FaultModel = DEFAULT_FAULT_MODEL,
) -> OutcomeDistribution:
    """One correction attempt: select a step and apply its fault model.

    Clean patterns map to themselves; procedure failures map to the
    designated absorbing failure pattern (every qubit erased).
    """
    step = select_step(pattern)
    if step is DONE:
        return {pattern: Poly.one()}
    if step is ABORT:
        return {fail_sink(params.model): Poly.one()}
    if step.kind is StepKind.Z_RECOVERY:
        return apply_z_recovery(pattern, step, params, config)
    return apply_full_to_z(pattern, step, params, config)


def fail_sink(model: Model) -> Pattern:
    """The absorbing failure pattern: every qubit carries the worst erasure."""
    status = Erasure.Z_MEASURED if model is Model.IDEAL else Erasure.FULL
    return (status,) * N_QUBITS

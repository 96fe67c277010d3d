"""Iterative recovery of the outer rotation between a field and its copy.

Given a reference field v and a pattern u that is (approximately) an outer
rotated copy of v, each pass correlates the current pattern against v, reads
the argument angle phi and plane Q off the correlation, applies the
counter-rotation of phi in Q to the pattern, and accumulates the step into a
running rotation estimate.  The argument angle underestimates the remaining
misalignment (it carries at most half of it, weighted by how much of the
field's energy lies in the plane), so the loop walks the misalignment down
monotonically and stops once phi drops below the configured tolerance.

Two degenerate starts need care.  A real-valued first correlation carries no
plane information: either the pattern already matches (phi = 0) or it sits at
the antipodal half-turn where the bivector part cancels.  Both are handled by
injecting a fixed disturbance rotation on the first pass and letting the loop
take it back out again.

The report states the *generating* rotation: rotating the reference by
(plane, alpha) reproduces the input pattern.  The applied corrections undo
that rotation, so the accumulated correction plane is the reported plane with
its orientation flipped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .ga3 import (
    E12, Multivector, Rotor, UnitBivector, ZERO_BIVECTOR_RTOL,
    compose_rotation, polar_decompose, rotation_rotor,
)
from .fields import VectorField, l2_norm, rotate_outer
from .correlation import correlate_at_origin


@dataclass(frozen=True)
class DetectionConfig:
    """Loop controls for detect().

    epsilon is the exit tolerance on the correlation argument angle.  The
    disturbance is the fixed rotation injected when the first correlation
    comes out real-valued; by default it fires for any real value (the
    antipodal case produces a negative real correlation and would otherwise
    stall), while literal_zero_disturbance restricts it to a nonnegative
    real first correlation, the narrowest reading of the rule.
    """

    epsilon: float
    max_iterations: int = 1000
    disturbance_angle: float = math.pi / 4
    disturbance_plane: UnitBivector = field(default_factory=lambda: E12)
    literal_zero_disturbance: bool = False

    def __post_init__(self):
        if not self.epsilon > 0.0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if not 0.0 < self.disturbance_angle <= math.pi:
            raise ValueError("disturbance_angle must lie in (0, pi]")


@dataclass(frozen=True)
class DetectionReport:
    """Outcome of a detection run.

    alpha and plane describe the generating rotation: rotate_outer(reference,
    plane, alpha) reproduces the pattern up to the exit tolerance.
    corrected_pattern is the pattern after all applied counter-rotations and
    matches the reference to the same level.  corrections holds the applied
    per-pass rotors in application order; phi_trace the per-pass argument
    angles after any disturbance override.  converged is False when the loop
    hit max_iterations first, in which case the rest of the report describes
    the partial state.
    """

    alpha: float
    plane: UnitBivector
    corrected_pattern: VectorField
    iterations: int
    phi_trace: tuple[float, ...]
    corrections: tuple[Rotor, ...]
    converged: bool


def _argument_of(cor: Multivector) -> tuple[float, UnitBivector, bool]:
    """Angle and plane of an even correlation value.

    Mirrors the polar decomposition, including its zero-bivector fallback;
    the flag reports whether the value was real (no usable plane).
    """
    c = cor.coeffs
    sc = float(c[0])
    bmag = math.sqrt(c[4] ** 2 + c[5] ** 2 + c[6] ** 2)
    if bmag <= ZERO_BIVECTOR_RTOL * max(1.0, abs(sc)):
        return (0.0 if sc >= 0.0 else math.pi), E12, True
    plane = UnitBivector(c[4] / bmag, c[5] / bmag, c[6] / bmag)
    return math.atan2(bmag, sc), plane, False


def detect(reference: VectorField, pattern: VectorField,
           config: DetectionConfig) -> DetectionReport:
    """Estimate the outer rotation mapping reference onto pattern.

    Runs are deterministic: identical inputs produce bit-identical reports.
    Raises ValueError if either field has zero norm.
    """
    if l2_norm(reference) < 1e-300 or l2_norm(pattern) < 1e-300:
        raise ValueError("cannot detect rotation against a zero field")

    u = pattern
    phi = math.pi
    alpha = 0.0
    plane = E12
    iterations = 0
    trace: list[float] = []
    corrections: list[Rotor] = []

    while phi > config.epsilon and iterations < config.max_iterations:
        iterations += 1
        cor = correlate_at_origin(u, reference)
        phi, q, real_valued = _argument_of(cor)
        if iterations == 1:
            fire = (phi == 0.0) if config.literal_zero_disturbance else real_valued
            if fire:
                phi = config.disturbance_angle
                q = config.disturbance_plane
        u = rotate_outer(u, q, phi)
        alpha, plane = compose_rotation(alpha, plane, phi, q)
        trace.append(phi)
        corrections.append(rotation_rotor(q, phi))

    return DetectionReport(
        alpha=alpha,
        plane=-plane,
        corrected_pattern=u,
        iterations=iterations,
        phi_trace=tuple(trace),
        corrections=tuple(corrections),
        converged=phi <= config.epsilon,
    )


def residual_angle(v: VectorField, u: VectorField, applied,
                   true_plane: UnitBivector, true_angle: float) -> float:
    """Rotation angle left after applying corrections to a known misalignment.

    v and u name the pair under correction (u built as rotate_outer(v,
    true_plane, true_angle)); the returned angle depends only on the rotors.
    Composes the net value rotor, the true generating rotor followed by every
    applied correction in application order, and returns the canonical angle
    in [0, pi] of that net rotation; 0 means the corrections undo the
    misalignment exactly.
    """
    net = rotation_rotor(true_plane, true_angle).as_multivector()
    for c in applied:
        net = c.as_multivector() * net
    beta = 2.0 * polar_decompose(net).angle
    if beta > math.pi:
        beta = 2.0 * math.pi - beta
    return beta

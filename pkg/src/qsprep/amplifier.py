"""Fixed-point amplification of a rank-one encoded singular value.

When a unitary C satisfies C|Psi> = sigma |w> + |garbage> with the garbage
orthogonal to the flagged subspace, the compression between the flag
projector and |Psi><Psi| is the rank-one matrix sigma |w><Psi|. Applying an
odd sign-function polynomial to that singular value through the alternating
phase product pushes the success amplitude to at least 1 - delta/2 using a
number of rounds that scales like (1/sigma) log(1/delta). The construction
is non-unitary-friendly: it never requires C|Psi> to be close to a unitary
image, but it does consume the initial-state preparer S (and its adjoint)
once per round, so the initial state is fixed.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .blockenc import BlockEncoding, qsvt_circuit
from .errors import DegreeOverflowError, DimensionError
from .phases import PhaseSequence, find_phases, phases_to_text, phases_from_text
from .polyapprox import Polynomial, complete_to_complex, evaluate, sign_approx
from .simulator import Projector, UnitaryMatrix


@dataclass(frozen=True)
class AmplificationPlan:
    """Resolved amplification parameters.

    rounds equals the sign polynomial degree and the number of C (and S)
    uses, counting adjoints; it is always odd. ``polynomial`` is the real
    sign target; ``realized`` the completed polynomial the angles implement,
    whose extra imaginary part only raises the success probability.
    """

    sigma: float
    delta: float
    phases: PhaseSequence
    rounds: int
    polynomial: Polynomial
    realized: Polynomial
    threshold: float  # the Delta the sign approximant was built for

    def __post_init__(self):
        if not 0 < self.sigma <= 1:
            raise ValueError("sigma must lie in (0, 1]")
        if self.rounds % 2 == 0:
            raise ValueError("rounds must be odd for an odd polynomial")

    def predicted_success(self, sigma: float | None = None) -> float:
        s = self.sigma if sigma is None else sigma
        return float(abs(evaluate(self.realized, s)) ** 2)


def plan_to_text(plan: AmplificationPlan) -> str:
    head = f"{plan.sigma:.17g} {plan.delta:.17g} {plan.rounds}\n"
    return head + phases_to_text(plan.phases)


def plan_from_text(text: str) -> AmplificationPlan:
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    sigma, delta, rounds = lines[0].split()
    phi = phases_from_text("\n".join(lines[1:]))
    plan = plan_amplification(float(sigma), float(delta))
    if plan.rounds != int(rounds) or len(phi) != plan.rounds:
        raise ValueError("serialized plan is inconsistent with its parameters")
    return plan


def build_projectors(n: int, s_unitary: UnitaryMatrix, ancillas: int = 2) -> tuple[Projector, Projector]:
    """Flag projector |0..0><0..0| (x) 1 and initial-state projector.

    The initial-state projector is |0..0><0..0| (x) S|0^n><0^n|S-dagger;
    extra encoding ancillas are padded with |0><0| factors via the leading
    register convention.
    """
    if s_unitary.num_qubits != n:
        raise DimensionError("S acts on the wrong number of qubits")
    flag = Projector.ancilla_zero(ancillas, n)
    vec = np.zeros(2 ** (ancillas + n), dtype=complex)
    vec[: 2**n] = s_unitary.entries[:, 0]
    init = Projector.from_vector(vec)
    return flag, init


def plan_amplification(
    sigma: float,
    delta: float,
    sigma_floor: float = 1e-3,
    max_degree: int = 10_000,
    seed: int = 11,
) -> AmplificationPlan:
    """Sign-polynomial plan boosting a singular value >= sigma to 1 - delta/2.

    The sign approximant is built at threshold 0.9 * sigma to tolerate the
    estimation error a quantized amplitude table induces on sigma.
    """
    if not 0 < sigma <= 1:
        raise ValueError("sigma must lie in (0, 1]")
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    if sigma < sigma_floor:
        est = int(np.ceil(2.0 / sigma * np.log(16.0 / delta)))
        raise DegreeOverflowError(
            f"sigma = {sigma:.2e} below the floor {sigma_floor}; the plan would "
            f"need roughly degree {est}",
            needed=est,
        )
    if sigma >= 1.0 - delta / 2.0:
        # the identity polynomial already reaches the target, and degrades
        # continuously, so no threshold margin is needed
        poly = Polynomial(np.array([0.0, 1.0]), basis="chebyshev", parity="odd")
        return AmplificationPlan(
            sigma, delta, PhaseSequence(np.zeros(1)), 1, poly, poly, 1.0 - delta / 2.0
        )
    threshold = 0.9 * sigma
    poly = sign_approx(threshold, delta, max_degree=max_degree)
    comp = complete_to_complex(poly, max_degree=max_degree)
    phi = find_phases(comp, seed=seed)
    return AmplificationPlan(sigma, delta, phi, len(phi), poly, comp, threshold)


def amplify(c_unitary: UnitaryMatrix, s_unitary: UnitaryMatrix, plan: AmplificationPlan) -> UnitaryMatrix:
    """The full amplification unitary: alternating phases around C and C+.

    Post-selecting the flag register of the result applied to
    |0..0> S|0^n> succeeds with probability |P(sigma)|^2 and leaves the
    amplified state exactly (up to a global phase) when the compression is
    exactly rank-one.
    """
    n = s_unitary.num_qubits
    ancillas = c_unitary.num_qubits - n
    if ancillas < 1:
        raise DimensionError("C must carry at least one flag qubit")
    flag, init = build_projectors(n, s_unitary, ancillas)
    be = BlockEncoding(c_unitary, ancillas, flag, init)
    out = qsvt_circuit(be, plan.phases, "odd")
    return out.unitary

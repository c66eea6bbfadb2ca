"""Variable feedback controller and synchronization error algebra.

The control law u = [mu(e + 2d - k) + rho*k] * e / k collapses the
closed-loop error to e' = rho * e for any drive-side value d available
to the receiver (the drive state when idle, the masked line signal
during transmission).
"""

from dataclasses import dataclass

from .core import LogisticParams

DEGENERATE_TOL_FACTOR = 1e-12

STABLE_ASYMPTOTIC = "globally_asymptotically_stable"
STABLE_MARGINAL = "stable"
UNSTABLE = "unstable"


@dataclass(frozen=True)
class ControllerGains:
    """Feedback gain rho plus the map parameters it controls.

    rho is not range-restricted: experiments with unstable gains are
    legitimate, so the stability class is reported, never enforced.
    """

    rho: float
    params: LogisticParams

    @property
    def stability_class(self) -> str:
        a = abs(self.rho)
        if a < 1.0:
            return STABLE_ASYMPTOTIC
        if a == 1.0:
            return STABLE_MARGINAL
        return UNSTABLE


@dataclass(frozen=True)
class CoupledState:
    """Drive state (basin-confined) and response state (any real)."""

    x: float
    y: float


@dataclass(frozen=True)
class SyncDiagnostics:
    """Error, Lyapunov value V = e^2, its one-step change, and control effort."""

    e: float
    V: float
    dV: float
    u: float


def error(y: float, x: float) -> float:
    """Synchronization error e = y - x."""
    return y - x


def control(gains: ControllerGains, e: float, d: float) -> float:
    """Control effort for error e and drive-side value d."""
    mu = gains.params.mu
    k = gains.params.k
    return (mu * (e + 2.0 * d - k) + gains.rho * k) * e / k


def step_response(gains: ControllerGains, y: float, d: float) -> float:
    """Next response state: logistic step plus control with e = y - d.

    Satisfies step_response(y, d) - step(d) = rho * (y - d) for all real
    y and d.
    """
    mu = gains.params.mu
    k = gains.params.k
    return mu * y * (1.0 - y / k) + control(gains, y - d, d)


def predict_error(rho: float, e0: float, n: int) -> float:
    """Closed-form error after n closed-loop steps: rho**n * e0."""
    return rho**n * e0


def lyapunov_delta(rho: float, e: float) -> float:
    """One-step change of V = e^2 under e' = rho*e: -e^2 (1 - rho^2)."""
    return -(e * e) * (1.0 - rho * rho)


def diagnostics(gains: ControllerGains, y: float, d: float) -> SyncDiagnostics:
    """Error, Lyapunov bookkeeping, and control effort at one step."""
    e = y - d
    return SyncDiagnostics(
        e=e,
        V=e * e,
        dV=lyapunov_delta(gains.rho, e),
        u=control(gains, e, d),
    )


def check_degenerate_sync(x: float, y: float, k: float) -> bool:
    """True iff x + y = k within 1e-12*k.

    On that set the uncontrolled maps produce equal next states, so the
    pair synchronizes in one step without any controller.  Diagnostic
    only; never used for control.
    """
    return abs(x + y - k) < DEGENERATE_TOL_FACTOR * k

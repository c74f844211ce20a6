"""Exact stationary analysis of Markovian multi-server queues.

Covers the Erlang loss and delay formulas (including the real-argument
extension of Erlang C), full stationary measures of M/M/s, the
finite-buffer M/M/s/n, and the abandonment model M/M/s+M, the last two
through a generic birth-death solver.

Conventions: ``load`` always means offered load lambda/mu.  ``mean_delay``
is queueing time only (no service), ``mean_queue`` counts waiting jobs
only.  For models with losses or abandonment, Little's law links the two
through the rate of jobs that eventually start service.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Sequence, Union

import numpy as np
from scipy import integrate as _integrate
from scipy import special as _sp

from .errors import DomainError, InstabilityError, NumericalError
from .special import SeriesControl

__all__ = [
    "QueueModel",
    "StationaryMeasures",
    "BirthDeathResult",
    "erlang_b",
    "erlang_c",
    "erlang_c_real",
    "mms_measures",
    "mms_pi",
    "solve_birth_death",
    "mmsn_measures",
    "erlang_a_measures",
]


@dataclass(frozen=True)
class QueueModel:
    """Parameters of an M/M/s-family system.

    ``n`` (total capacity, buffer included) selects the finite-buffer
    variant, ``theta`` (abandonment rate) the Erlang-A variant; at most
    one of the two may be set.
    """

    lam: float
    s: int
    mu: float = 1.0
    n: Optional[int] = None
    theta: Optional[float] = None

    def __post_init__(self):
        if not (self.lam > 0.0):
            raise DomainError("arrival rate must be positive, got %r" % (self.lam,))
        if not (self.mu > 0.0):
            raise DomainError("service rate must be positive, got %r" % (self.mu,))
        if int(self.s) != self.s or self.s < 1:
            raise DomainError("server count must be a positive integer, got %r" % (self.s,))
        if self.n is not None and self.theta is not None:
            raise DomainError("finite buffer and abandonment are mutually exclusive")
        if self.n is not None and self.n < self.s:
            raise DomainError("system capacity n=%r below server count s=%r" % (self.n, self.s))
        if self.theta is not None and self.theta < 0.0:
            raise DomainError("abandonment rate must be >= 0, got %r" % (self.theta,))

    @property
    def load(self) -> float:
        return self.lam / self.mu

    @property
    def rho(self) -> float:
        return self.lam / (self.s * self.mu)


@dataclass(frozen=True)
class StationaryMeasures:
    """Steady-state performance measures plus the distribution itself."""

    delay_prob: float
    mean_delay: float
    mean_queue: float
    utilization: float
    pi: np.ndarray
    tail_mass: float
    block_prob: Optional[float] = None
    abandon_prob: Optional[float] = None


class BirthDeathResult(NamedTuple):
    pi: np.ndarray
    tail_mass: float
    converged: bool


def erlang_b(s: int, load: float) -> float:
    """Blocking probability of the M/M/s/s loss system.

    Uses the stable recursion B(0) = 1, B(k) = a B(k-1) / (k + a B(k-1));
    always well defined since the loss model is stable for every load.
    """
    if int(s) != s or s < 1:
        raise DomainError("erlang_b requires integer s >= 1, got %r" % (s,))
    if not (load > 0.0):
        raise DomainError("erlang_b requires load > 0, got %r" % (load,))
    b = 1.0
    for k in range(1, int(s) + 1):
        b = load * b / (k + load * b)
    return b


def erlang_c(s: int, load: float) -> float:
    """Probability an arriving job must wait in the M/M/s queue."""
    if int(s) != s or s < 1:
        raise DomainError("erlang_c requires integer s >= 1, got %r" % (s,))
    if not (load > 0.0):
        raise DomainError("erlang_c requires load > 0, got %r" % (load,))
    if load >= s:
        raise InstabilityError("M/M/s unstable: load %r >= s=%r" % (load, s))
    rho = load / s
    return 1.0 / (rho + (1.0 - rho) / erlang_b(s, load))


def erlang_c_real(s: float, load: float) -> float:
    """Erlang C extended to real server counts via its integral form.

    The reciprocal equals ``load * int_0^inf t e^(-load t) (1+t)^(s-1) dt``;
    after rescaling t by sqrt(load) the integrand has an O(1)-located,
    O(1)-wide peak for every load, so adaptive quadrature is
    well conditioned uniformly in the QED regime.
    """
    s = float(s)
    if not (load > 0.0):
        raise DomainError("erlang_c_real requires load > 0, got %r" % (load,))
    if not (s > load):
        raise InstabilityError("erlang_c_real requires s > load, got s=%r load=%r" % (s, load))
    r = math.sqrt(load)

    def integrand(v):
        return v * np.exp(-r * v + (s - 1.0) * np.log1p(v / r))

    val, err = _integrate.quad(integrand, 0.0, np.inf, epsabs=0.0, epsrel=1e-11, limit=200)
    if not np.isfinite(val) or val <= 0.0 or err > 1e-8 * val:
        raise NumericalError(
            "erlang_c_real quadrature did not converge (value=%r, err=%r)" % (val, err)
        )
    return 1.0 / val


def mms_pi(load: float, s: int, abs_tol: float = 1e-12) -> tuple[np.ndarray, float]:
    """Stationary distribution of M/M/s, truncated with reported tail mass.

    The returned array covers 0..K where K is chosen so the (exactly
    geometric) remaining mass is below ``abs_tol``; that remainder is
    returned as the tail mass.
    """
    if load >= s:
        raise InstabilityError("M/M/s unstable: load %r >= s=%r" % (load, s))
    rho = load / s
    # states 0..s in log space, then a geometric tail
    k = np.arange(0, s + 1)
    logw = k * math.log(load) - _sp.gammaln(k + 1)
    # normalization: sum_{k<=s} a^k/k! + a^s/s! * rho/(1-rho)
    log_tail_total = logw[-1] + math.log(rho / (1.0 - rho)) if rho > 0 else -np.inf
    log_norm = np.logaddexp(_sp.logsumexp(logw), log_tail_total)
    # geometric extension until remaining mass < abs_tol
    extra = int(np.ceil((math.log(abs_tol) + log_norm - logw[-1] + math.log(1.0 - rho))
                        / math.log(rho))) if rho > 0 else 0
    extra = max(extra, 1)
    j = np.arange(1, extra + 1)
    logq = logw[-1] + j * math.log(rho) if rho > 0 else np.full(1, -np.inf)
    pi = np.exp(np.concatenate([logw, logq]) - log_norm)
    tail_mass = math.exp(logw[-1] - log_norm) * rho ** (extra + 1) / (1.0 - rho)
    return pi, tail_mass


def mms_measures(model: QueueModel, abs_tol: float = 1e-12) -> StationaryMeasures:
    """Full steady-state measures of the plain M/M/s queue."""
    if model.n is not None or model.theta is not None:
        raise DomainError("mms_measures expects a plain M/M/s model")
    a, s, rho = model.load, int(model.s), model.rho
    if rho >= 1.0:
        raise InstabilityError("M/M/s unstable: rho=%r >= 1" % (rho,))
    c = erlang_c(s, a)
    mean_delay = c / ((1.0 - rho) * s * model.mu)
    pi, tail = mms_pi(a, s, abs_tol)
    k = np.arange(len(pi))
    mean_queue = float(np.sum(np.maximum(k - s, 0) * pi))
    # the truncated tail is geometric; fold in its exact first moment
    if rho > 0 and tail > 0:
        ktail = len(pi) - 1
        mean_queue += tail * ((ktail - s) + 1.0 / (1.0 - rho))
    return StationaryMeasures(
        delay_prob=c,
        mean_delay=mean_delay,
        mean_queue=mean_queue,
        utilization=rho,
        pi=pi,
        tail_mass=tail,
    )


RateSpec = Union[Sequence[float], Callable[[int], float]]


def solve_birth_death(
    birth: RateSpec,
    death: RateSpec,
    control: SeriesControl = SeriesControl(),
) -> BirthDeathResult:
    """Stationary distribution of a birth-death chain by detailed balance.

    ``birth(k)`` is the rate out of state k upward, ``death(k)`` the rate
    from state k down to k-1 (k >= 1).  Passing sequences fixes the state
    space to 0..len(birth); passing callables grows the state space until
    the estimated remaining mass drops below ``control.abs_tol`` or
    ``control.max_terms`` states have been used, whichever comes first.
    A normalization that keeps growing is reported as unstable.
    """
    seq_mode = not callable(birth)
    if seq_mode != (not callable(death)):
        raise DomainError("birth and death must both be sequences or both callables")

    if seq_mode:
        b = np.asarray(birth, dtype=float)
        d = np.asarray(death, dtype=float)
        if len(b) != len(d):
            raise DomainError("birth and death sequences must have equal length")
        if np.any(b < 0.0) or np.any(d <= 0.0):
            raise DomainError("rates must be nonnegative (deaths strictly positive)")
        logw = np.concatenate([[0.0], np.cumsum(np.log(np.where(b > 0, b, 1.0))
                                                - np.log(d))])
        # a zero birth rate truncates the reachable space
        zero = np.where(b == 0.0)[0]
        if len(zero):
            logw[zero[0] + 1:] = -np.inf
        w = np.exp(logw - np.max(logw[np.isfinite(logw)]))
        pi = w / w.sum()
        return BirthDeathResult(pi, 0.0, True)

    logw = [0.0]
    log_max = 0.0
    total = 1.0  # running sum of exp(logw - log_max)
    k = 1
    while k <= control.max_terms:
        bk = float(birth(k - 1))
        dk = float(death(k))
        if bk < 0.0 or dk <= 0.0:
            raise DomainError("rates must be nonnegative (deaths strictly positive)")
        if bk == 0.0:
            break
        logw.append(logw[-1] + math.log(bk) - math.log(dk))
        if logw[-1] > log_max:
            total *= math.exp(log_max - logw[-1])
            log_max = logw[-1]
        total += math.exp(logw[-1] - log_max)
        k += 1
        if k > 10:
            ratio = math.exp(logw[-1] - logw[-2])
            if ratio < 1.0:
                # geometric bound on the un-enumerated mass
                rem = math.exp(logw[-1] - log_max) * ratio / (1.0 - ratio)
                if rem < control.abs_tol * total:
                    w = np.exp(np.array(logw) - log_max)
                    pi = w / (w.sum() + rem)
                    return BirthDeathResult(pi, rem / (w.sum() + rem), True)
    else:
        ratio = math.exp(logw[-1] - logw[-2])
        if ratio >= 1.0:
            raise InstabilityError(
                "birth-death normalization diverges (weight ratio %.3f >= 1)" % ratio
            )
        raise NumericalError(
            "birth-death solver did not reach tail tolerance within %d states"
            % control.max_terms
        )
    w = np.exp(np.array(logw) - log_max)
    pi = w / w.sum()
    return BirthDeathResult(pi, 0.0, True)


def mmsn_measures(model: QueueModel) -> StationaryMeasures:
    """Steady-state measures of the finite-capacity M/M/s/n queue.

    The delay probability counts admitted jobs only: by PASTA it equals
    P(s <= Q < n) / (1 - P(Q = n)).
    """
    if model.n is None:
        raise DomainError("mmsn_measures expects a finite-buffer model")
    s, n = int(model.s), int(model.n)
    birth = np.full(n, model.lam)
    death = model.mu * np.minimum(np.arange(1, n + 1), s)
    pi = solve_birth_death(birth, death).pi
    block = float(pi[n])
    admitted = 1.0 - block
    delay = float(pi[s:n].sum()) / admitted
    k = np.arange(n + 1)
    mean_queue = float(np.sum(np.maximum(k - s, 0) * pi))
    mean_delay = mean_queue / (model.lam * admitted)
    util = float(np.sum(np.minimum(k, s) * pi)) / s
    return StationaryMeasures(
        delay_prob=delay,
        mean_delay=mean_delay,
        mean_queue=mean_queue,
        utilization=util,
        pi=pi,
        tail_mass=0.0,
        block_prob=block,
    )


def erlang_a_measures(model: QueueModel, control: SeriesControl | None = None) -> StationaryMeasures:
    """Steady-state measures of the M/M/s+M (abandonment) queue.

    With theta > 0 the chain is stable for every load; the state space is
    grown until the tail mass is negligible, capped at s + 200 sqrt(s)
    extra states (the superlinear death rate guarantees fast decay).
    """
    if model.theta is None:
        raise DomainError("erlang_a_measures expects an abandonment model")
    s, theta, mu, lam = int(model.s), float(model.theta), model.mu, model.lam
    if theta == 0.0:
        if model.rho >= 1.0:
            raise InstabilityError("theta=0 and rho >= 1: no stationary regime")
        return mms_measures(QueueModel(lam=lam, s=s, mu=mu))
    if control is None:
        cap = s + int(math.ceil(200.0 * math.sqrt(s))) + 200
        control = SeriesControl(abs_tol=1e-12, max_terms=cap)

    def death(k: int) -> float:
        return mu * min(k, s) + theta * max(k - s, 0)

    res = solve_birth_death(lambda k: lam, death, control)
    pi = res.pi
    k = np.arange(len(pi))
    mean_queue = float(np.sum(np.maximum(k - s, 0) * pi))
    abandon = theta * mean_queue / lam
    delay = float(pi[s:].sum())
    mean_delay = mean_queue / lam  # Little's law over the waiting room
    util = float(np.sum(np.minimum(k, s) * pi)) / s
    return StationaryMeasures(
        delay_prob=delay,
        mean_delay=mean_delay,
        mean_queue=mean_queue,
        utilization=util,
        pi=pi,
        tail_mass=res.tail_mass,
        abandon_prob=abandon,
    )

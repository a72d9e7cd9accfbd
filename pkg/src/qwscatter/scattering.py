"""Wave operators between an inhomogeneous walk and its asymptotic sides.

The comparison dynamics is the pair of homogeneous walks built from the
two asymptotic coins.  States of the pair are identified with states of
the full walk through the gluing map

    J(psi_l, psi_r) = 1_{x<0} psi_l + 1_{x>=0} psi_r,

which satisfies J J* = 1.  Two limits are computed here, both by
iteration with certified increments:

* ``wave_forward``: Phi = lim_n U^{-n} J U_0^n (psi_l, psi_r), the
  identification-then-interaction limit.  The free evolution is exact
  (Fourier), the backward interacting steps are exact windowed products,
  and each checkpoint is evaluated from scratch, so no error accumulates
  between checkpoints.

* ``outgoing_pair``: Phi_star = lim_n U_star^{-n} 1_star U^n psi for
  both sides star in {l, r}.  Pure point components of U have no strong
  limit under this iteration (their contribution oscillates without
  decaying), so the iterates are averaged over dyadic tail blocks
  (N/2, N], which removes bound state contamination at rate N^{-1/2}
  while leaving the limit of the scattering part untouched.  The whole
  average is accumulated in the Fourier picture of a fixed window, so
  one interacting evolution pass serves every block and both sides.

Sides whose asymptotic coin is purely off diagonal (a = 0) carry no
propagating modes; ``propagating_part`` projects them away, which is
exactly the spectral cutoff of the free dynamics away from its point
spectrum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .coin import CoinField
from .errors import ConvergenceError, DomainError, ResourceLimitError
from .lattice import DEFAULT_MAX_WINDOW, Evolution, LatticeState, evolve
from .momentum import FreeModel

__all__ = [
    "Schedule",
    "ConvergenceReport",
    "PairState",
    "free_model",
    "apply_J",
    "apply_J_adjoint",
    "propagating_part",
    "free_evolve",
    "wave_forward",
    "outgoing_pair",
    "outgoing_state",
    "intertwining_residual",
]


@dataclass(frozen=True)
class Schedule:
    """Iteration budget: dyadic checkpoints first, 2*first, ..., n_max."""

    n_max: int = 1 << 14
    tol: float = 1e-6
    first: int = 64

    def __post_init__(self) -> None:
        if self.first < 2 or self.n_max < self.first:
            raise DomainError("need 2 <= first <= n_max")
        if not self.tol > 0.0:
            raise DomainError("tolerance must be positive")

    def checkpoints(self) -> list[int]:
        ns = [self.first]
        while ns[-1] < self.n_max:
            ns.append(min(2 * ns[-1], self.n_max))
        return ns


@dataclass
class ConvergenceReport:
    """Checkpoint trace of an iterated limit."""

    checkpoints: list[int]
    increments: list[float]
    tol: float
    converged: bool

    @property
    def final_n(self) -> int:
        return self.checkpoints[-1]

    @property
    def final_increment(self) -> float:
        return self.increments[-1] if self.increments else math.inf

    def require(self) -> None:
        if not self.converged:
            raise ConvergenceError(
                f"limit not converged: increment {self.final_increment:.3e} "
                f"above {self.tol:.3e} at n = {self.final_n}"
            )


@dataclass(frozen=True)
class PairState:
    """Element of the doubled comparison space (one state per side)."""

    left: LatticeState
    right: LatticeState

    def norm_sq(self) -> float:
        return self.left.norm_sq() + self.right.norm_sq()

    def norm(self) -> float:
        return math.sqrt(self.norm_sq())


def free_model(field: CoinField, side: str) -> FreeModel:
    """Homogeneous comparison walk of one side."""
    return FreeModel(field.asymptotic(side))


def apply_J(pair: PairState) -> LatticeState:
    """Glue a pair into one state: left half from psi_l, right half from psi_r."""
    return pair.left.restricted("left") + pair.right.restricted("right")


def apply_J_adjoint(state: LatticeState) -> PairState:
    """J* psi = (1_{x<0} psi, 1_{x>=0} psi)."""
    return PairState(state.restricted("left"), state.restricted("right"))


def propagating_part(pair: PairState, field: CoinField) -> PairState:
    """Remove components on sides whose free walk is pure point (a = 0)."""
    left = pair.left if field.left.a > 0.0 else 0.0 * pair.left
    right = pair.right if field.right.a > 0.0 else 0.0 * pair.right
    return PairState(left, right)


def _next_pow2(n: int) -> int:
    return 1 << max(int(n) - 1, 1).bit_length()


def free_evolve(
    state: LatticeState,
    model: FreeModel,
    steps: int,
    *,
    max_window: int = DEFAULT_MAX_WINDOW,
) -> LatticeState:
    """Apply the homogeneous walk exactly via its Fourier symbol.

    ``steps`` may be negative.  The result lives on a padded power-of-two
    window large enough that the circular convolution is exact.
    """
    if steps == 0:
        return state.copy()
    n = state.hi - state.lo
    size = _next_pow2(n + 2 * abs(steps) + 64)
    if size > max_window:
        raise ResourceLimitError(f"free evolution window of {size} sites exceeds {max_window}")
    x0 = state.lo - (size - n) // 2
    buf = np.zeros((size, 2), dtype=complex)
    buf[state.lo - x0 : state.hi - x0] = state.amp
    k = 2.0 * math.pi * np.arange(size) / size
    lam, vec = model.eigensystem(k)
    phases = np.exp(1j * steps * np.angle(lam))  # lambda^steps with exact modulus
    hat = np.fft.fft(buf, axis=0)
    out = np.zeros_like(hat)
    for j in (0, 1):
        amp_j = phases[:, j] * (vec[:, j, 0].conj() * hat[:, 0] + vec[:, j, 1].conj() * hat[:, 1])
        out[:, 0] += amp_j * vec[:, j, 0]
        out[:, 1] += amp_j * vec[:, j, 1]
    return LatticeState(x0, np.fft.ifft(out, axis=0))


def wave_forward(
    pair: PairState,
    field: CoinField,
    schedule: Schedule | None = None,
    *,
    require_convergence: bool = False,
    max_window: int = DEFAULT_MAX_WINDOW,
) -> tuple[LatticeState, ConvergenceReport]:
    """Iterated limit of U^{-n} J U_0^n on a pair of free states.

    Returns the state at the last evaluated checkpoint together with the
    increment trace; stops early once consecutive checkpoints differ by
    at most ``schedule.tol`` in norm.
    """
    sched = schedule or Schedule()
    pair = propagating_part(pair, field)
    models = (free_model(field, "left"), free_model(field, "right"))
    prev: LatticeState | None = None
    cps: list[int] = []
    incs: list[float] = []
    converged = False
    for n in sched.checkpoints():
        sides = []
        for st, model in zip((pair.left, pair.right), models):
            sides.append(st if st.norm_sq() == 0.0 else free_evolve(st, model, n, max_window=max_window))
        joined = apply_J(PairState(*sides))
        phi = evolve(joined, field, n, inverse=True, max_window=max_window)
        cps.append(n)
        if prev is not None:
            inc = (phi - prev).norm()
            incs.append(inc)
            prev = phi
            if inc <= sched.tol:
                converged = True
                break
        else:
            prev = phi
    report = ConvergenceReport(cps, incs, sched.tol, converged)
    if require_convergence:
        report.require()
    assert prev is not None
    return prev.trimmed(1e-15), report


class _SideAccumulator:
    """Fourier-space tail-block averaging of U_star^{-n} 1_star U^n psi."""

    def __init__(self, model: FreeModel, k: np.ndarray, tol: float) -> None:
        lam, vec = model.eigensystem(k)
        self.u = vec  # (W, 2, 2)
        self.lam_conj = lam.conj()
        self.powers = np.ones_like(lam)  # lambda^{-n}, renormalized periodically
        self.acc = np.zeros((k.size, 2), dtype=complex)
        self.snap = np.zeros_like(self.acc)
        self.block_avg: np.ndarray | None = None
        self.checkpoints: list[int] = []
        self.increments: list[float] = []
        self.tol = tol

    def absorb(self, yhat: np.ndarray, n: int) -> None:
        self.powers *= self.lam_conj
        if n % 1024 == 0:
            self.powers /= np.abs(self.powers)
        for j in (0, 1):
            t = self.powers[:, j] * (
                self.u[:, j, 0].conj() * yhat[:, 0] + self.u[:, j, 1].conj() * yhat[:, 1]
            )
            self.acc[:, 0] += t * self.u[:, j, 0]
            self.acc[:, 1] += t * self.u[:, j, 1]

    def checkpoint(self, n: int, prev_n: int) -> float:
        avg = (self.acc - self.snap) / (n - prev_n)
        np.copyto(self.snap, self.acc)
        inc = math.inf
        if self.block_avg is not None:
            w = avg.shape[0]
            inc = float(np.linalg.norm(avg - self.block_avg)) / math.sqrt(w)
            self.increments.append(inc)
        self.block_avg = avg
        self.checkpoints.append(n)
        return inc

    def result(self, x0: int) -> tuple[LatticeState, ConvergenceReport]:
        assert self.block_avg is not None
        state = LatticeState(x0, np.fft.ifft(self.block_avg, axis=0)).trimmed(1e-15)
        converged = bool(self.increments and self.increments[-1] <= self.tol)
        return state, ConvergenceReport(self.checkpoints, self.increments, self.tol, converged)


def _tail_averaged_outgoing(
    state: LatticeState,
    field: CoinField,
    sched: Schedule,
    sides: Iterable[str],
    max_window: int,
) -> dict[str, tuple[LatticeState, ConvergenceReport]]:
    sides = list(sides)
    support = state.hi - state.lo
    n_max = sched.n_max
    size = _next_pow2(support + 4 * n_max + 256)
    if size > max_window:
        raise ResourceLimitError(
            f"outgoing-state window of {size} sites exceeds {max_window}; lower n_max"
        )
    x0 = state.lo - 2 * n_max - 128
    k = 2.0 * math.pi * np.arange(size) / size
    accs = {s: _SideAccumulator(free_model(field, s), k, sched.tol) for s in sides}
    ev = Evolution(state, field, n_max)
    origin_idx = -x0  # fourier buffer index of lattice site 0
    ybuf = np.zeros((size, 2), dtype=complex)
    prev_cp = 0
    for cp in sched.checkpoints():
        for n in range(prev_cp + 1, cp + 1):
            ev.step()
            view = ev.values_view()
            g0 = ev.lo - x0
            g1 = ev.hi - x0
            for side in sides:
                if side == "left":
                    a0, a1 = g0, min(g1, origin_idx)
                else:
                    a0, a1 = max(g0, origin_idx), g1
                ybuf[:] = 0.0
                if a0 < a1:
                    ybuf[a0:a1] = view[a0 - g0 : a1 - g0]
                accs[side].absorb(np.fft.fft(ybuf, axis=0), n)
        block_incs = [accs[s].checkpoint(cp, prev_cp) for s in sides]
        prev_cp = cp
        if all(inc <= sched.tol for inc in block_incs):
            break
    return {s: accs[s].result(x0) for s in sides}


def outgoing_pair(
    state: LatticeState,
    field: CoinField,
    schedule: Schedule | None = None,
    *,
    max_window: int = DEFAULT_MAX_WINDOW,
) -> tuple[PairState, dict[str, ConvergenceReport]]:
    """Tail-averaged outgoing states of both sides in one evolution pass.

    A side whose asymptotic coin has a = 0 supports no scattering and
    comes back as the zero state with an empty report.
    """
    sched = schedule or Schedule()
    sides = [s for s in ("left", "right") if field.asymptotic(s).a > 0.0]
    results = _tail_averaged_outgoing(state, field, sched, sides, max_window) if sides else {}
    out: dict[str, LatticeState] = {}
    reports: dict[str, ConvergenceReport] = {}
    for s in ("left", "right"):
        if s in results:
            out[s], reports[s] = results[s]
        else:
            out[s] = LatticeState.zero(0, 1)
            reports[s] = ConvergenceReport([], [], sched.tol, True)
    return PairState(out["left"], out["right"]), reports


def outgoing_state(
    state: LatticeState,
    field: CoinField,
    side: str,
    schedule: Schedule | None = None,
    *,
    max_window: int = DEFAULT_MAX_WINDOW,
) -> tuple[LatticeState, ConvergenceReport]:
    """Tail-averaged outgoing state of one side."""
    if side not in ("left", "right"):
        raise DomainError(f"side must be 'left' or 'right', got {side!r}")
    if field.asymptotic(side).a == 0.0:
        raise DomainError(f"the {side} asymptotic walk has no propagating modes (a = 0)")
    sched = schedule or Schedule()
    results = _tail_averaged_outgoing(state, field, sched, [side], max_window)
    return results[side]


def intertwining_residual(
    pair: PairState,
    field: CoinField,
    schedule: Schedule | None = None,
) -> float:
    """Norm of (W U_0 - U W) applied to a pair, at the schedule's resolution."""
    sched = schedule or Schedule()
    ml, mr = free_model(field, "left"), free_model(field, "right")
    advanced = PairState(free_evolve(pair.left, ml, 1), free_evolve(pair.right, mr, 1))
    phi_adv, _ = wave_forward(advanced, field, sched)
    phi, _ = wave_forward(pair, field, sched)
    return (phi_adv - evolve(phi, field, 1)).norm()

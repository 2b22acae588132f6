"""Two pools infiltrating each other: payoffs, equilibrium, region sweeps.

Each pool's distributable pot is its hosting income (blocks it publishes
that survive, including opponent-found ones) plus its infiltrator's share
of the opponent's pot. The pots are mutually recursive but linear in each
other, so they come from an exact 2x2 solve:

    pot1 = (a1-f1)/(1-f1-f2) + c2*f2*E/(1-f2) + c2p*X + pot2 * f1/(a2+f1)
    pot2 = (a2-f2)/(1-f1-f2) + c1*f1*E/(1-f1) + c1p*X + pot1 * f2/(a1+f2)

with E = 1-a1-a2 and X = f1*f2*(1/(1-f1) + 1/(1-f2)) * E/(1-f1-f2). The
three-branch terms credit the HOST pool, hence the opponent's primed
probability appears in each pot.

A pool's own power keeps pot_i * a_i/(a_i + f_opp) after paying the
opponent's infiltrator; that net take is what decides winning and losing
(at c=1 the external side never wins a fork, the two nets sum to a1+a2
exactly, and the win/lose borderline is the pool-size diagonal). Best
responses are identical under pot or net because the outgoing-share factor
does not depend on the pool's own infiltration choice.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import SingularSystem
from .optimize import grid_golden_max
from .scenarios import GameScenario, validate_game

WINNER_POOL1 = "pool1"
WINNER_POOL2 = "pool2"
WINNER_BOTH_LOSE = "both_lose"
WINNER_TIE = "both_gain_tie"

TIE_EPS_PP = 1e-4  # |RER| below this (in percentage points) counts as the borderline

SWEEP_CSV_HEADER = ("alpha2", "c", "f1", "f2", "rer1_pct", "rer2_pct", "winner", "converged")

_DET_EPS = 1e-12


def pot_payoffs_raw(a1, a2, f1, f2, c1, c2, c1p, c2p):
    """Solve the pot system; ufunc-friendly in f1/f2, no validation."""
    ext = 1.0 - a1 - a2
    k1 = f1 / (a2 + f1)
    k2 = f2 / (a1 + f2)
    both = 1.0 - f1 - f2
    cross = f1 * f2 * (1.0 / (1.0 - f1) + 1.0 / (1.0 - f2)) * ext / both
    h1 = (a1 - f1) / both + c2 * f2 * ext / (1.0 - f2) + c2p * cross
    h2 = (a2 - f2) / both + c1 * f1 * ext / (1.0 - f1) + c1p * cross
    det = 1.0 - k1 * k2
    return (h1 + k1 * h2) / det, (h2 + k2 * h1) / det


def game_payoffs(g: GameScenario) -> tuple[float, float]:
    """Exact (pot1, pot2) for a validated scenario.

    Substituting the result back into the defining equations reproduces it
    to rounding error; with f1 = f2 = 0 it is exactly (alpha1, alpha2).
    """
    validate_game(g)
    det = 1.0 - (g.f1 / (g.alpha2 + g.f1)) * (g.f2 / (g.alpha1 + g.f2))
    if abs(det) < _DET_EPS:
        raise SingularSystem(f"pot system determinant {det!r} below {_DET_EPS}")
    r1, r2 = pot_payoffs_raw(g.alpha1, g.alpha2, g.f1, g.f2, g.c1, g.c2, g.c1p, g.c2p)
    return float(r1), float(r2)


def net_payoffs(g: GameScenario) -> tuple[float, float]:
    """Each pool's take after paying the opponent's infiltrator its share."""
    r1, r2 = game_payoffs(g)
    return (
        r1 * (g.alpha1 / (g.alpha1 + g.f2)),
        r2 * (g.alpha2 / (g.alpha2 + g.f1)),
    )


def best_response(g: GameScenario, responder: int,
                  n_grid: int = 1000, xtol: float = 1e-9) -> float:
    """Most profitable infiltration power for one pool, opponent held fixed.

    Grid scan over [0, alpha_responder] then golden-section on the winning
    bracket. Boundary optima are returned as-is.
    """
    validate_game(g)
    if responder not in (1, 2):
        raise ValueError("responder must be 1 or 2")
    return _best_response_raw(
        g.alpha1, g.alpha2, g.c1, g.c2, g.c1p, g.c2p, responder,
        g.f2 if responder == 1 else g.f1, n_grid, xtol,
    )


def _best_response_raw(a1, a2, c1, c2, c1p, c2p, responder, f_opp, n_grid, xtol):
    cap = a1 if responder == 1 else a2
    if cap <= 0.0:
        return 0.0
    if responder == 1:
        f = lambda x: pot_payoffs_raw(a1, a2, x, f_opp, c1, c2, c1p, c2p)[0]
    else:
        f = lambda x: pot_payoffs_raw(a1, a2, f_opp, x, c1, c2, c1p, c2p)[1]
    x, _ = grid_golden_max(f, 0.0, cap, n_grid=n_grid, xtol=xtol)
    return x


@dataclass(frozen=True)
class EquilibriumResult:
    """Fixed point of alternating best responses.

    r1/r2 are the pot payoffs, net1/net2 the after-share takes, and the RER
    percentages are computed on the nets. ``deviation_gain`` is the largest
    pot improvement either pool could still find by unilateral deviation
    (post-hoc line scan); it should be of the order of the solve tolerance.
    """

    f1_star: float
    f2_star: float
    r1: float
    r2: float
    net1: float
    net2: float
    rer1_pct: float
    rer2_pct: float
    iterations: int
    converged: bool
    trace: tuple[tuple[float, float], ...]
    deviation_gain: float


def unilateral_gain(a1, a2, c1, c2, c1p, c2p, f1, f2, n_grid: int = 2000) -> float:
    """Best pot improvement available to either pool by deviating alone."""
    base1, base2 = pot_payoffs_raw(a1, a2, f1, f2, c1, c2, c1p, c2p)
    xs1 = np.linspace(0.0, a1, n_grid + 1)
    gain1 = np.max(pot_payoffs_raw(a1, a2, xs1, f2, c1, c2, c1p, c2p)[0]) - base1
    xs2 = np.linspace(0.0, a2, n_grid + 1)
    gain2 = np.max(pot_payoffs_raw(a1, a2, f1, xs2, c1, c2, c1p, c2p)[1]) - base2
    return float(max(gain1, gain2))


def solve_equilibrium(alpha1, alpha2, c1, c2, c1p, c2p,
                      tol: float = 1e-7, max_iter: int = 10000,
                      start: tuple[float, float] = (0.0, 0.0),
                      n_grid: int = 1000, xtol: float = 1e-9,
                      keep_trace: bool = True) -> EquilibriumResult:
    """Alternating best-response dynamics until max |df| < tol.

    The game is strictly concave in each pool's own infiltration over the
    valid domain, so the dynamics contract to the unique fixed point from
    any start. A run that exhausts max_iter returns converged=False with
    the trace kept for diagnosis.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    validate_game(GameScenario(alpha1, alpha2, start[0], start[1], c1, c2, c1p, c2p))
    f1, f2 = float(start[0]), float(start[1])
    trace = [(f1, f2)] if keep_trace else []
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        new_f1 = _best_response_raw(alpha1, alpha2, c1, c2, c1p, c2p, 1, f2, n_grid, xtol)
        if keep_trace:
            trace.append((new_f1, f2))
        new_f2 = _best_response_raw(alpha1, alpha2, c1, c2, c1p, c2p, 2, new_f1, n_grid, xtol)
        if keep_trace:
            trace.append((new_f1, new_f2))
        delta = max(abs(new_f1 - f1), abs(new_f2 - f2))
        f1, f2 = new_f1, new_f2
        if delta < tol:
            converged = True
            break
    r1, r2 = pot_payoffs_raw(alpha1, alpha2, f1, f2, c1, c2, c1p, c2p)
    net1 = r1 * (alpha1 / (alpha1 + f2))
    net2 = r2 * (alpha2 / (alpha2 + f1))
    return EquilibriumResult(
        f1_star=f1,
        f2_star=f2,
        r1=float(r1),
        r2=float(r2),
        net1=float(net1),
        net2=float(net2),
        rer1_pct=(net1 - alpha1) / alpha1 * 100.0,
        rer2_pct=(net2 - alpha2) / alpha2 * 100.0,
        iterations=iterations,
        converged=converged,
        trace=tuple(trace),
        deviation_gain=unilateral_gain(alpha1, alpha2, c1, c2, c1p, c2p, f1, f2),
    )


def classify_winner(rer1_pct: float, rer2_pct: float,
                    tie_eps_pp: float = TIE_EPS_PP) -> str:
    """Winner from RER signs; near-zero values land on the borderline."""
    near1 = abs(rer1_pct) <= tie_eps_pp
    near2 = abs(rer2_pct) <= tie_eps_pp
    if (rer1_pct > tie_eps_pp and rer2_pct > tie_eps_pp) or near1 or near2:
        return WINNER_TIE
    if rer1_pct > tie_eps_pp:
        return WINNER_POOL1
    if rer2_pct > tie_eps_pp:
        return WINNER_POOL2
    return WINNER_BOTH_LOSE


@dataclass(frozen=True)
class RegionCell:
    """One sweep cell: equilibrium outcome at (alpha2, c)."""

    alpha2: float
    c: float
    f1: float
    f2: float
    rer1_pct: float
    rer2_pct: float
    winner: str
    converged: bool


def _cell_from_result(alpha2, c, res: EquilibriumResult) -> RegionCell:
    return RegionCell(
        alpha2=float(alpha2),
        c=float(c),
        f1=res.f1_star,
        f2=res.f2_star,
        rer1_pct=res.rer1_pct,
        rer2_pct=res.rer2_pct,
        winner=classify_winner(res.rer1_pct, res.rer2_pct),
        converged=res.converged,
    )


def sweep_regions(alpha1, alpha2_axis, c_axis,
                  tol: float = 1e-7, max_iter: int = 10000) -> list[RegionCell]:
    """Equilibrium winner map under the symmetric model c_i = c, c_i' = c/2.

    Cells are emitted row-major with c as the outer axis and alpha2 inner.
    A cell whose solve exhausts max_iter is recorded with converged=False
    and the sweep continues.
    """
    cells = []
    for c in c_axis:
        for a2 in alpha2_axis:
            res = solve_equilibrium(alpha1, a2, c, c, c / 2.0, c / 2.0,
                                    tol=tol, max_iter=max_iter, keep_trace=False)
            cells.append(_cell_from_result(a2, c, res))
    return cells


def sweep_regions_assumed_c(alpha1, alpha2_axis, c_axis,
                            tol: float = 1e-7, max_iter: int = 10000) -> list[RegionCell]:
    """Winner map when both managers plan for c = alpha1 + alpha2.

    Strategies come from the equilibrium under the assumed (minimum
    rational) c; payoffs and winners are then evaluated under the actual
    axis c. Same cell order as sweep_regions.
    """
    assumed = {}
    for a2 in alpha2_axis:
        ca = alpha1 + a2
        assumed[a2] = solve_equilibrium(alpha1, a2, ca, ca, ca / 2.0, ca / 2.0,
                                        tol=tol, max_iter=max_iter, keep_trace=False)
    cells = []
    for c in c_axis:
        for a2 in alpha2_axis:
            plan = assumed[a2]
            r1, r2 = pot_payoffs_raw(alpha1, a2, plan.f1_star, plan.f2_star,
                                     c, c, c / 2.0, c / 2.0)
            net1 = r1 * (alpha1 / (alpha1 + plan.f2_star))
            net2 = r2 * (a2 / (a2 + plan.f1_star))
            rer1 = (net1 - alpha1) / alpha1 * 100.0
            rer2 = (net2 - a2) / a2 * 100.0
            cells.append(RegionCell(
                alpha2=float(a2), c=float(c),
                f1=plan.f1_star, f2=plan.f2_star,
                rer1_pct=float(rer1), rer2_pct=float(rer2),
                winner=classify_winner(rer1, rer2),
                converged=plan.converged,
            ))
    return cells


def write_sweep_csv(cells, dest=None) -> str:
    """Serialize sweep cells as CSV; returns the text, optionally writing it.

    ``dest`` may be a path or an open text file. Row order is whatever the
    sweep produced (row-major, c outer).
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_CSV_HEADER)
    for cell in cells:
        writer.writerow([
            f"{cell.alpha2:.10g}", f"{cell.c:.10g}",
            f"{cell.f1:.12g}", f"{cell.f2:.12g}",
            f"{cell.rer1_pct:.12g}", f"{cell.rer2_pct:.12g}",
            cell.winner, str(cell.converged).lower(),
        ])
    text = buf.getvalue()
    if dest is not None:
        if hasattr(dest, "write"):
            dest.write(text)
        else:
            Path(dest).write_text(text)
    return text

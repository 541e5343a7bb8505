"""Synthetic assessor panels with a tunable amount of agreement.

Each item is unanimous with probability ``p_unanimous`` (one label drawn
and copied to every assessor); otherwise each assessor draws a label
independently. Randomness comes from numpy's PCG64 bit generator seeded
with ``seed``, so a config always yields the same matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .judgments import LABELS, InvalidInputError, JudgmentMatrix, rjcd

UNIFORM = (0.25, 0.25, 0.25, 0.25)


@dataclass(frozen=True)
class PanelConfig:
    h: int = 5
    n_items: int = 50
    p_unanimous: float = 0.0
    label_weights: tuple[float, ...] = UNIFORM  # over LABELS (R, P, I, N)
    seed: int = 0

    def __post_init__(self):
        if self.h < 1 or self.n_items < 1:
            raise InvalidInputError("h and n_items must be >= 1")
        if not 0.0 <= self.p_unanimous <= 1.0:
            raise InvalidInputError("p_unanimous must lie in [0, 1]")
        w = tuple(float(x) for x in self.label_weights)
        if len(w) != len(LABELS) or any(x < 0 or math.isnan(x) for x in w):
            raise InvalidInputError("label_weights must be 4 non-negative numbers")
        if abs(math.fsum(w) - 1.0) > 1e-9:
            raise InvalidInputError("label_weights must sum to 1")
        object.__setattr__(self, "label_weights", w)


@dataclass(frozen=True)
class SweepRow:
    p_unanimous: float
    seed: int
    rho: float
    AN: int
    JN: int


def simulate_panel(cfg: PanelConfig, query_id: str | None = None) -> JudgmentMatrix:
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    unanimous = rng.random(cfg.n_items) < cfg.p_unanimous
    draws = rng.choice(len(LABELS), size=(cfg.n_items, cfg.h), p=cfg.label_weights)
    # a unanimous row copies its first draw to every assessor
    draws[unanimous] = draws[unanimous, :1]
    rows = tuple(tuple(LABELS[j] for j in row) for row in draws.tolist())
    qid = query_id if query_id is not None else f"sim-p{cfg.p_unanimous:g}-s{cfg.seed}"
    return JudgmentMatrix(qid, rows)


def sweep(cfgs: Iterable[PanelConfig]) -> list[SweepRow]:
    out = []
    for cfg in cfgs:
        rep = rjcd(simulate_panel(cfg))
        out.append(SweepRow(cfg.p_unanimous, cfg.seed, rep.rho, rep.AN, rep.JN))
    return out


def expected_rho(h: int, p_unanimous: float, weights: Sequence[float] = UNIFORM) -> float:
    """E[AN] / E[JN] per item under the mixture model, in closed form."""
    w = [float(x) for x in weights]
    p_same = sum(x**h for x in w)
    # E[#distinct] for iid draws: sum over labels of P(label appears)
    e_gamma_iid = sum(1.0 - (1.0 - x) ** h for x in w)
    e_an = p_unanimous + (1.0 - p_unanimous) * p_same
    e_jn = p_unanimous + (1.0 - p_unanimous) * e_gamma_iid
    return e_an / e_jn

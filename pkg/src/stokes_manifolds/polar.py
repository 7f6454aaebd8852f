"""Parsing a two-mode state into fixed-photon-number polarization manifolds.

A manifold with N = 2S photons carries a spin-S representation on the basis
|S, m> = |n_H = S + m, n_V = S - m>, ordered m = S, S-1, ..., -S.  Coherences
between different N are invisible to polarization measurements and are
discarded by construction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .fock import TwoModeState, _require_hermitian

WEIGHT_FLOOR = 1e-12


@dataclass(frozen=True)
class ManifoldBlock:
    """Unit-trace block of the spin-S manifold with its probability weight.

    `truncated` marks manifolds whose basis straddles a mode cutoff;
    `negligible` marks weights below the floor, which stay unnormalized and
    are excluded from squeezing and multipole reports.
    """

    spin: float
    weight: float
    block: np.ndarray
    truncated: bool = False
    negligible: bool = False

    def __post_init__(self):
        two_j = round(2 * self.spin)
        if abs(2 * self.spin - two_j) > 1e-9 or two_j < 0:
            raise ValueError(f"spin must be a non-negative half-integer, got {self.spin}")
        block = np.asarray(self.block, dtype=complex)
        dim = two_j + 1
        if block.shape != (dim, dim):
            raise ValueError(f"block must be {dim}x{dim}, got {block.shape}")
        if not self.negligible:
            block = _require_hermitian(block, "ManifoldBlock")
            tr = np.real(np.trace(block))
            if abs(tr - 1.0) > 1e-10:
                raise ValueError(f"block trace {tr} is not 1")
        block.setflags(write=False)
        object.__setattr__(self, "block", block)

    @property
    def photon_number(self) -> int:
        return round(2 * self.spin)

    @property
    def dim(self) -> int:
        return self.photon_number + 1


@dataclass(frozen=True)
class PolarizationSector:
    """Blocks for S = 0, 1/2, 1, ... with their weights P_S."""

    blocks: tuple[ManifoldBlock, ...]

    def __post_init__(self):
        spins = [b.spin for b in self.blocks]
        if any(b - a != 0.5 for a, b in zip(spins, spins[1:])):
            raise ValueError("block spins must increase in steps of 1/2")

    @property
    def captured(self) -> float:
        """Total probability caught by the parsed manifolds."""
        return float(sum(b.weight for b in self.blocks))

    @property
    def max_spin(self) -> float:
        return self.blocks[-1].spin if self.blocks else 0.0

    def reported(self, max_spin: float | None = None) -> tuple[ManifoldBlock, ...]:
        """Blocks that enter reports: above the weight floor, complete, and
        (optionally) no larger than max_spin."""
        out = []
        for b in self.blocks:
            if b.negligible or b.truncated:
                continue
            if max_spin is not None and b.spin > max_spin + 1e-9:
                continue
            out.append(b)
        return tuple(out)

    def restricted(self, max_spin: float) -> "PolarizationSector":
        return PolarizationSector(
            tuple(b for b in self.blocks if b.spin <= max_spin + 1e-9)
        )


def parse_manifolds(state: TwoModeState, weight_floor: float = WEIGHT_FLOOR) -> PolarizationSector:
    """Extract the block-diagonal polarization sector of a two-mode state.

    Basis states outside either mode cutoff carry exactly zero amplitude in the
    truncated input, so incomplete manifolds are embedded into the full
    (2S+1)-dimensional block with zero rows and flagged as truncated.
    """
    ch, cv = state.cutoff_h, state.cutoff_v
    entries = state.entries
    blocks = []
    for n_total in range(ch + cv + 1):
        n_h = np.arange(n_total, -1, -1)  # m descending
        n_v = n_total - n_h
        valid = (n_h <= ch) & (n_v <= cv)
        dim = n_total + 1
        block = np.zeros((dim, dim), dtype=complex)
        pos = np.nonzero(valid)[0]
        flat = n_h[pos] * (cv + 1) + n_v[pos]
        block[np.ix_(pos, pos)] = entries[np.ix_(flat, flat)]
        weight = float(np.real(np.trace(block)))
        truncated = not valid.all()
        if weight > weight_floor:
            blocks.append(
                ManifoldBlock(n_total / 2.0, weight, block / weight, truncated=truncated)
            )
        else:
            blocks.append(
                ManifoldBlock(
                    n_total / 2.0, max(weight, 0.0), block, truncated=truncated, negligible=True
                )
            )
    return PolarizationSector(tuple(blocks))


def photon_number_distribution(sector: PolarizationSector) -> list[tuple[int, float]]:
    """Pairs (N, P_N) over all parsed manifolds."""
    return [(b.photon_number, b.weight) for b in sector.blocks]


def embed_sector(sector: PolarizationSector, cutoff_h: int, cutoff_v: int) -> np.ndarray:
    """Scatter weighted blocks back into a two-mode matrix (diagonal-in-N part)."""
    dim = (cutoff_h + 1) * (cutoff_v + 1)
    out = np.zeros((dim, dim), dtype=complex)
    for b in sector.blocks:
        n_total = b.photon_number
        n_h = np.arange(n_total, -1, -1)
        n_v = n_total - n_h
        valid = (n_h <= cutoff_h) & (n_v <= cutoff_v)
        pos = np.nonzero(valid)[0]
        flat = n_h[pos] * (cutoff_v + 1) + n_v[pos]
        scale = b.weight if not b.negligible else 1.0
        out[np.ix_(flat, flat)] += scale * b.block[np.ix_(pos, pos)]
    return out


def sector_to_json_dict(sector: PolarizationSector) -> dict:
    """JSON-ready dump: per manifold S, the weight and the block as nested
    [re, im] pairs in m-descending order."""
    manifolds = []
    for b in sector.blocks:
        manifolds.append(
            {
                "S": b.spin,
                "N": b.photon_number,
                "P": b.weight,
                "truncated": b.truncated,
                "negligible": b.negligible,
                "block": [
                    [[float(z.real), float(z.imag)] for z in row] for row in b.block
                ],
            }
        )
    return {"captured": sector.captured, "manifolds": manifolds}


def dump_sector(sector: PolarizationSector, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(sector_to_json_dict(sector), fh, indent=1, sort_keys=True)
        fh.write("\n")

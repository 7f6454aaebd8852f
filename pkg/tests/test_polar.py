import json
import math

import numpy as np
import pytest

from stokes_manifolds.fock import (
    ModeState,
    NoiseModel,
    TwoModeState,
    synthesize_mode,
    tensor_product,
)
from stokes_manifolds.polar import (
    ManifoldBlock,
    embed_sector,
    parse_manifolds,
    photon_number_distribution,
    sector_to_json_dict,
)


def number_state(n, cutoff):
    rho = np.zeros((cutoff + 1, cutoff + 1), dtype=complex)
    rho[n, n] = 1.0
    return ModeState(cutoff, rho)


def default_sector(alpha=1.13, cutoff=12):
    model = NoiseModel(3.6, 4.4, 0.85)
    rho_h = synthesize_mode(model, alpha, cutoff)
    rho_v = synthesize_mode(model, 0.0, cutoff)
    return parse_manifolds(tensor_product(rho_h, rho_v))


class TestParsing:
    def test_single_fock_pair_lands_in_one_manifold(self):
        state = tensor_product(number_state(2, 4), number_state(1, 4))
        sector = parse_manifolds(state)
        weights = {b.photon_number: b.weight for b in sector.blocks}
        assert abs(weights[3] - 1.0) < 1e-14
        assert all(w < 1e-14 for n, w in weights.items() if n != 3)
        # |n_H=2, n_V=1> is |S=3/2, m=1/2>, index 1 in m-descending order
        block = next(b for b in sector.blocks if b.photon_number == 3)
        assert abs(block.block[1, 1] - 1.0) < 1e-14

    def test_m_descending_order(self):
        # superposition across one manifold keeps coherences, ordered m = S..-S
        cutoff = 2
        dim = (cutoff + 1) ** 2
        psi = np.zeros(dim, dtype=complex)
        state0 = TwoModeState(cutoff, cutoff, np.zeros((dim, dim), dtype=complex))
        i20 = state0.index(2, 0)
        i02 = state0.index(0, 2)
        psi[i20] = 1.0 / math.sqrt(2.0)
        psi[i02] = 1.0 / math.sqrt(2.0)
        state = TwoModeState(cutoff, cutoff, np.outer(psi, psi.conj()))
        block = next(b for b in parse_manifolds(state).blocks if b.photon_number == 2)
        # m=+1 (n_H=2) is row 0, m=-1 (n_V=2) is row 2
        assert abs(block.block[0, 0] - 0.5) < 1e-14
        assert abs(block.block[0, 2] - 0.5) < 1e-14
        assert abs(block.block[1, 1]) < 1e-14

    def test_weights_sum_to_trace(self):
        sector = default_sector()
        state_trace = sum(w for _, w in photon_number_distribution(sector))
        assert abs(state_trace - sector.captured) < 1e-14
        assert sector.captured <= 1.0 + 1e-12

    def test_blocks_unit_trace(self):
        for b in default_sector().blocks:
            if not b.negligible:
                assert abs(np.trace(b.block).real - 1.0) < 1e-10

    def test_truncated_flag_on_straddling_manifolds(self):
        sector = default_sector(cutoff=6)
        for b in sector.blocks:
            assert b.truncated == (b.photon_number > 6)

    def test_negligible_blocks_flagged(self):
        state = tensor_product(number_state(0, 3), number_state(0, 3))
        sector = parse_manifolds(state)
        assert not sector.blocks[0].negligible
        assert all(b.negligible for b in sector.blocks[1:])

    def test_reported_excludes_truncated_and_negligible(self):
        sector = default_sector(cutoff=6)
        for b in sector.reported():
            assert not b.truncated and not b.negligible

    def test_embedding_roundtrip(self):
        sector = default_sector(cutoff=8)
        model = NoiseModel(3.6, 4.4, 0.85)
        state = tensor_product(
            synthesize_mode(model, 1.13, 8), synthesize_mode(model, 0.0, 8)
        )
        back = embed_sector(sector, 8, 8)
        # the embedded sector is the block-diagonal (fixed-N) part of the state
        dim = 81
        mask = np.zeros((dim, dim), dtype=bool)
        for i in range(dim):
            for j in range(dim):
                ni = i // 9 + i % 9
                nj = j // 9 + j % 9
                mask[i, j] = ni == nj
        assert np.max(np.abs(back[mask] - state.entries[mask])) < 1e-12
        assert np.max(np.abs(back[~mask])) < 1e-14


class TestBlockValidation:
    def test_rejects_wrong_shape(self):
        with pytest.raises(ValueError, match="block must be"):
            ManifoldBlock(1.0, 1.0, np.eye(2, dtype=complex))

    def test_rejects_non_unit_trace(self):
        with pytest.raises(ValueError, match="trace"):
            ManifoldBlock(0.5, 1.0, 0.7 * np.eye(2, dtype=complex))

    def test_rejects_bad_spin(self):
        with pytest.raises(ValueError, match="half-integer"):
            ManifoldBlock(0.3, 1.0, np.eye(2, dtype=complex))


class TestJsonDump:
    def test_roundtrip_structure(self, tmp_path):
        sector = default_sector(cutoff=4)
        doc = sector_to_json_dict(sector)
        text = json.dumps(doc)
        loaded = json.loads(text)
        assert abs(loaded["captured"] - sector.captured) < 1e-15
        m = loaded["manifolds"][2]
        assert m["N"] == 2
        block = np.array([[complex(re, im) for re, im in row] for row in m["block"]])
        want = sector.blocks[2].block
        assert np.max(np.abs(block - want)) < 1e-15

"""Exact states and distributions against a from-scratch reference.

The reference construction below builds the deformed ground state the long
way: singlets on every bond, a Dicke-weight symmetrizer per site, then the
inverse deformation on the physical index.  It shares no code with the
package's tensor contraction, so agreement pins down basis order, gauge
and normalization at once.
"""

from math import comb

import numpy as np
import pytest

from akltsim import exact_oracle as eo
from akltsim.lattice import build


def reference_state(lattice, a_squared):
    """Deformed valence-bond state by explicit sum over bond configurations.

    Site 0 is the most significant base-4 digit; physical index 0..3 means
    m = 3/2, 1/2, -1/2, -3/2.  Returned unnormalized.
    """
    n = lattice.n_sites
    a = np.sqrt(a_squared)
    d_inv = np.diag([a / np.sqrt(3.0), 1.0, 1.0, a / np.sqrt(3.0)])
    # symmetrizer: three virtual qubits (bit 1 = lowered spin) to spin-3/2
    upsilon = np.zeros((4, 8))
    for bits in range(8):
        k = bin(bits).count("1")
        upsilon[k, bits] = 1.0 / np.sqrt(comb(3, k))
    site_map = d_inv @ upsilon
    amps = np.zeros(4 ** n)
    n_bonds = lattice.n_bonds
    for assign in range(2 ** n_bonds):
        words = [0] * n
        coef = (1.0 / np.sqrt(2.0)) ** n_bonds
        for j in range(n_bonds):
            a_site, b_site = int(lattice.bonds[j, 0]), int(lattice.bonds[j, 1])
            slot = j % 3
            if (assign >> j) & 1:
                # singlet term |1>_A |0>_B with sign -1
                coef = -coef
                words[a_site] |= 1 << slot
            else:
                words[b_site] |= 1 << slot
        contrib = np.array([coef])
        for i in range(n):
            contrib = np.kron(contrib, site_map[:, words[i]])
        amps += contrib
    return amps


@pytest.mark.parametrize("nu,nv", [(1, 1), (2, 1), (3, 1)])
@pytest.mark.parametrize("a2", [1.0, 2.0, 3.0, 6.46])
def test_peps_matches_reference(nu, nv, a2):
    lat = build(nu, nv)
    ref = reference_state(lat, a2)
    peps = eo.build_peps_state(lat, a2)
    overlap = abs(np.vdot(ref, peps.amplitudes))
    overlap /= np.linalg.norm(ref) * np.linalg.norm(peps.amplitudes)
    assert overlap == pytest.approx(1.0, abs=1e-12)


def test_peps_matches_reference_two_by_two():
    lat = build(2, 2)
    ref = reference_state(lat, 3.0)
    peps = eo.build_peps_state(lat, 3.0)
    overlap = abs(np.vdot(ref, peps.amplitudes))
    overlap /= np.linalg.norm(ref) * np.linalg.norm(peps.amplitudes)
    assert overlap == pytest.approx(1.0, abs=1e-12)


def test_total_sz_is_zero():
    lat = build(2, 1)
    peps = eo.build_peps_state(lat, 2.0)
    amps = peps.amplitudes
    digits = np.array([
        [(idx // 4 ** (lat.n_sites - 1 - i)) % 4 for i in range(lat.n_sites)]
        for idx in range(len(amps))
    ])
    total_m = (1.5 - digits).sum(axis=1)
    nonzero = np.abs(amps) > 1e-12
    assert np.allclose(total_m[nonzero], 0.0)


@pytest.mark.parametrize("a2", [1.0, 2.0, 3.0, 6.46])
def test_enumeration_is_normalized(a2):
    dist = eo.enumerate_distribution(build(2, 1), a2)
    assert np.all(dist.probabilities >= 0)
    assert dist.probabilities.sum() == pytest.approx(1.0, abs=1e-12)
    assert len(dist.probabilities) == 3 ** 4
    # weights and probabilities agree up to one common scale
    finite = np.isfinite(dist.log2_weights)
    w = np.exp2(dist.log2_weights[finite] - dist.log2_weights[finite].max())
    assert np.allclose(w / w.sum(), dist.probabilities[finite], atol=1e-12)
    assert np.all(dist.probabilities[~finite] == 0.0)


def test_projective_point_kills_z_outcomes():
    lat = build(2, 1)
    dist = eo.enumerate_distribution(lat, 1.0)
    codes = np.arange(3 ** lat.n_sites)
    for site in range(lat.n_sites):
        has_z = (codes // 3 ** site) % 3 == 2
        assert np.all(dist.probabilities[has_z] == 0.0)


@pytest.mark.parametrize("nu,nv", [(1, 1), (2, 1)])
@pytest.mark.parametrize("a2", [1.0, 2.0, 3.0, 6.46])
def test_quantum_matches_enumeration(nu, nv, a2):
    lat = build(nu, nv)
    dist = eo.enumerate_distribution(lat, a2)
    quantum = eo.quantum_distribution(eo.build_peps_state(lat, a2))
    assert quantum.sum() == pytest.approx(1.0, abs=1e-9)
    support = (dist.probabilities > 1e-30) | (quantum > 1e-30)
    rel = np.abs(dist.probabilities - quantum)[support]
    rel /= np.maximum(dist.probabilities, quantum)[support]
    assert np.max(rel) < 1e-9


def test_single_outcome_probability():
    lat = build(1, 1)
    peps = eo.build_peps_state(lat, 3.0)
    dist = eo.enumerate_distribution(lat, 3.0)
    # config code: site 0 is the least significant base-3 digit
    p = eo.quantum_outcome_probability(peps, np.array([0, 1], dtype=np.int8))
    assert p == pytest.approx(dist.probabilities[3], rel=1e-9)


def test_ghz_structure_and_limit():
    lat = build(3, 1)
    ghz = eo.ghz_state(lat)
    assert np.count_nonzero(ghz) == 2
    assert np.linalg.norm(ghz) == pytest.approx(1.0)
    peps = eo.build_peps_state(lat, 1e4)
    fidelity = abs(np.vdot(ghz, peps.amplitudes)) ** 2
    assert fidelity > 0.999
    # far from the limit the overlap is modest
    peps = eo.build_peps_state(lat, 3.0)
    assert abs(np.vdot(ghz, peps.amplitudes)) ** 2 < 0.9


def test_total_variation_distance():
    p = np.array([0.5, 0.5, 0.0])
    q = np.array([0.25, 0.25, 0.5])
    assert eo.total_variation_distance(p, q) == pytest.approx(0.5)
    assert eo.total_variation_distance(p, p) == 0.0


def test_size_guards():
    with pytest.raises(ValueError):
        eo.enumerate_distribution(build(4, 2), 3.0)  # 16 sites
    with pytest.raises(ValueError):
        eo.build_peps_state(build(3, 2), 3.0)  # 12 sites

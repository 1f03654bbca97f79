"""Frozen demo inputs and golden outputs for the CLI and the test suite.

Everything here is stored as an exact expression (fractions, square roots,
roots of unity) rather than rounded decimals, except for the golden
reflection matrices, which are 4-decimal printouts and carry a matching
comparison tolerance.
"""

from __future__ import annotations

import numpy as np

from .povm import ProjectorFamily, family_from_vectors

#: Comparison tolerance for the 4-decimal golden matrices below.
GOLDEN_TOL = 5e-4

KAPPA = np.sqrt(9 + 6 * np.sqrt(2)) / 4
SIGMA = np.sqrt(9 - 6 * np.sqrt(2)) / 4

#: Frame operator of the nine-vector demo family.
E_EXACT = np.array(
    [[1, 0, 0], [0, 1, -1 / 3], [0, -1 / 3, 1]], dtype=complex
)
E_INV_EXACT = np.array(
    [[1, 0, 0], [0, 9 / 8, 3 / 8], [0, 3 / 8, 9 / 8]], dtype=complex
)
E_INV_SQRT_EXACT = np.array(
    [[1, 0, 0], [0, KAPPA, SIGMA], [0, SIGMA, KAPPA]], dtype=complex
)

_W = np.exp(2j * np.pi / 3)
_S3 = 1 / np.sqrt(3)

#: The nine unit vectors in the order used for the golden reflection set:
#: six phase-ladder vectors followed by the computational basis.
DEMO_VECTORS_DISPLAY = [
    _S3 * np.array([1, _W, _W.conjugate()]),
    _S3 * np.array([1, _W.conjugate(), _W]),
    _S3 * np.array([_W, _W.conjugate(), _W.conjugate()]),
    _S3 * np.array([_W, 1, _W]),
    _S3 * np.array([_W.conjugate(), 1, _W.conjugate()]),
    _S3 * np.array([_W.conjugate(), _W, _W]),
    np.array([1.0, 0, 0]),
    np.array([0.0, 1, 0]),
    np.array([0.0, 0, 1]),
]

#: Same vectors with each phase-ladder vector's components cycled so that the
#: family's frame operator equals E_EXACT. This is the ordering the builder
#: registry exposes.
DEMO_VECTORS = [
    np.array([v[2], v[0], v[1]]) for v in DEMO_VECTORS_DISPLAY[:6]
] + DEMO_VECTORS_DISPLAY[6:]

DEMO_WEIGHTS = [1.0 / 3.0] * 9

#: Reference index (0-based) for the golden reflection set.
DEMO_REFERENCE_INDEX = 6

_PHASE = 0.5 + (np.sqrt(3) / 2) * 1j

#: Unit-modulus eta choices that reproduce the golden reflection matrices.
DEMO_ETA = [1, 1, _PHASE, _PHASE, _PHASE.conjugate(), _PHASE.conjugate(), 1, 1, 1]

_G1 = np.array(
    [
        [0.5898, -0.3612 - 0.4423j, -0.3612 + 0.4423j],
        [-0.3612 + 0.4423j, 0.2051, 0.1590 + 0.7788j],
        [-0.3612 - 0.4423j, 0.1590 - 0.7788j, 0.2051],
    ]
)
_G2 = np.array(
    [
        [0.5898, -0.3612 + 0.4423j, -0.3612 - 0.4423j],
        [-0.3612 - 0.4423j, 0.2051, 0.1590 - 0.7788j],
        [-0.3612 + 0.4423j, 0.1590 + 0.7788j, 0.2051],
    ]
)
_G3 = np.array(
    [
        [-0.2500 + 0.4330j, 0.6124, 0.6124],
        [-0.3062 - 0.5303j, 0.3750 - 0.6495j, -0.1250 + 0.2165j],
        [-0.3062 - 0.5303j, -0.1250 + 0.2165j, 0.3750 - 0.6495j],
    ]
)
_G4 = np.array(
    [
        [-0.2949 + 0.5108j, -0.3612 - 0.4423j, -0.3612 + 0.4423j],
        [0.5636 + 0.0916j, 0.3974 - 0.6884j, 0.1946 + 0.0650j],
        [-0.2025 + 0.5339j, -0.1535 - 0.1360j, 0.3974 - 0.6884j],
    ]
)
_G8 = np.array(
    [
        [0, 0.9856, 0.1691],
        [0.9856, 0.0286, -0.1667],
        [0.1691, -0.1667, 0.9714],
    ],
    dtype=complex,
)
_G9 = np.array(
    [
        [0, 0.1691, 0.9856],
        [0.1691, 0.9714, -0.1667],
        [0.9856, -0.1667, 0.0286],
    ],
    dtype=complex,
)

#: Golden synthesis matrices, keyed by 0-based family index. Index 6 (the
#: reference) is absent on purpose: its matrix is pinned down only up to the
#: choice of reflector, so it is checked by its properties instead.
GOLDEN_REFLECTIONS = {
    0: _G1,
    1: _G2,
    2: _G3,
    3: _G4,
    4: _G4.conjugate(),
    5: _G3.conjugate(),
    7: _G8,
    8: _G9,
}


def demo_family() -> ProjectorFamily:
    """Nine-vector demo family whose frame operator is E_EXACT."""
    return family_from_vectors(DEMO_VECTORS, DEMO_WEIGHTS)


def demo_family_display_order() -> ProjectorFamily:
    """Component ordering matching the golden reflection matrices."""
    return family_from_vectors(DEMO_VECTORS_DISPLAY, DEMO_WEIGHTS)


def demo_eta_overrides() -> dict[int, dict]:
    """Per-index overrides reproducing the golden eta choices."""
    return {i: {"eta": DEMO_ETA[i]} for i in range(9)}


def fiducial_state(d: int) -> np.ndarray:
    """A unit vector whose basis orbit is symmetric (equal pairwise overlaps)."""
    if d == 2:
        return (1 / np.sqrt(6)) * np.array(
            [
                np.sqrt(3 + np.sqrt(3)),
                np.exp(1j * np.pi / 4) * np.sqrt(3 - np.sqrt(3)),
            ]
        )
    if d == 3:
        return (1 / np.sqrt(2)) * np.array([0, 1, -1], dtype=complex)
    raise ValueError(f"no stored fiducial for dimension {d}")


def _fiducial_family(d: int) -> ProjectorFamily:
    return family_from_vectors([fiducial_state(d)], [1.0])


#: Named family builders usable from config files.
FAMILY_BUILDERS = {
    "example-4-8": demo_family,
    "example-4-8-display": demo_family_display_order,
    "sic-fiducial-d2": lambda: _fiducial_family(2),
    "sic-fiducial-d3": lambda: _fiducial_family(3),
}

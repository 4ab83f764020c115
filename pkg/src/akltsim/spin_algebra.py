"""Spin-3/2 operators and the deformed three-outcome filter measurement.

Single-site conventions used across the package:

* Basis ordering is by decreasing magnetisation, ``(3/2, 1/2, -1/2, -3/2)``,
  so index 0 is the highest-weight state.
* The deformation is ``D(a) = diag(sqrt(3)/a, 1, 1, sqrt(3)/a)``; ``a^2 = 3``
  is the undeformed point where ``D`` is the identity.
* The undeformed filter along axis ``b`` is
  ``F_b = sqrt(2/3) * (|3/2_b><3/2_b| + |-3/2_b><-3/2_b|)``,
  the scaled projector onto the extremal doublet of ``S_b``.
* The deformed family is
  ``F_x(a) = sqrt((4/3) a^2/(1+a^2)) D^dag F_x D`` (same prefactor for y) and
  ``F_z(a) = a sqrt((a^2-1)/6) D^dag F_z D``, which closes to the identity,
  ``sum_b F_b(a)^dag F_b(a) = 1``, for every ``a^2 >= 1``.
* Below ``a^2 = 1`` the z outcome loses meaning and the closing family is
  ``{a F_x(a), a F_y(a), E(a)}`` with ``E(a)`` supported on the inner doublet;
  see :func:`subunit_operators`.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "AXES",
    "spin_matrices",
    "extremal_eigenvectors",
    "deformation",
    "filter_undeformed",
    "filter_deformed",
    "projective_basis_a1",
    "subunit_operators",
    "completeness_residual",
]

AXES = ("x", "y", "z")

_SQ3 = np.sqrt(3.0)


def _check_a_squared(a_squared: float) -> float:
    a2 = float(a_squared)
    if not np.isfinite(a2) or a2 <= 0.0:
        raise ValueError(f"a_squared must be positive and finite, got {a_squared!r}")
    return a2


def spin_matrices() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return ``(S_x, S_y, S_z)`` for spin 3/2 as complex 4x4 matrices."""
    sz = np.diag([1.5, 0.5, -0.5, -1.5]).astype(np.complex128)
    # <m+1|S+|m> = sqrt(s(s+1) - m(m+1)), ladder touches (3/2,1/2), (1/2,-1/2), (-1/2,-3/2)
    sp = np.zeros((4, 4), dtype=np.complex128)
    sp[0, 1] = _SQ3
    sp[1, 2] = 2.0
    sp[2, 3] = _SQ3
    sx = (sp + sp.conj().T) / 2.0
    sy = (sp - sp.conj().T) / 2.0j
    return sx, sy, sz


def _fix_phase(v: np.ndarray) -> np.ndarray:
    """Rotate the global phase so the largest-magnitude component is real positive.

    Ties are broken toward the lowest index, which makes the convention
    deterministic; only projectors built from these vectors matter physically.
    """
    k = int(np.argmax(np.abs(np.abs(v) - np.max(np.abs(v))) < 1e-12))
    phase = v[k] / abs(v[k])
    return v / phase


def extremal_eigenvectors(axis: str) -> tuple[np.ndarray, np.ndarray]:
    """Normalised eigenvectors of ``S_axis`` with eigenvalues +3/2 and -3/2."""
    if axis == "z":
        vp = np.array([1, 0, 0, 0], dtype=np.complex128)
        vm = np.array([0, 0, 0, 1], dtype=np.complex128)
    elif axis == "x":
        vp = np.array([1, _SQ3, _SQ3, 1], dtype=np.complex128) / np.sqrt(8.0)
        vm = np.array([1, -_SQ3, _SQ3, -1], dtype=np.complex128) / np.sqrt(8.0)
    elif axis == "y":
        vp = np.array([1, 1j * _SQ3, -_SQ3, -1j], dtype=np.complex128) / np.sqrt(8.0)
        vm = vp.conj()
    else:
        raise ValueError(f"axis must be one of {AXES}, got {axis!r}")
    return _fix_phase(vp), _fix_phase(vm)


def deformation(a_squared: float) -> np.ndarray:
    """Diagonal deformation ``D(a) = diag(sqrt(3)/a, 1, 1, sqrt(3)/a)``."""
    a2 = _check_a_squared(a_squared)
    d = _SQ3 / np.sqrt(a2)
    return np.diag([d, 1.0, 1.0, d]).astype(np.complex128)


def filter_undeformed(axis: str) -> np.ndarray:
    """Scaled extremal projector ``sqrt(2/3)(|3/2_b><3/2_b| + |-3/2_b><-3/2_b|)``."""
    vp, vm = extremal_eigenvectors(axis)
    return np.sqrt(2.0 / 3.0) * (np.outer(vp, vp.conj()) + np.outer(vm, vm.conj()))


def filter_deformed(axis: str, a_squared: float) -> np.ndarray:
    """Deformed filter operator ``F_axis(a)``, valid for ``a_squared >= 1``.

    At ``a_squared = 3`` this reduces to :func:`filter_undeformed`; at
    ``a_squared = 1`` the z filter vanishes and x, y become the orthogonal
    projectors of :func:`projective_basis_a1`.
    """
    a2 = _check_a_squared(a_squared)
    if a2 < 1.0:
        raise ValueError(
            "filter_deformed requires a_squared >= 1; for 0 < a_squared <= 1 "
            "use subunit_operators instead"
        )
    if axis in ("x", "y"):
        pref = np.sqrt((4.0 / 3.0) * a2 / (1.0 + a2))
    elif axis == "z":
        pref = np.sqrt(a2) * np.sqrt((a2 - 1.0) / 6.0)
    else:
        raise ValueError(f"axis must be one of {AXES}, got {axis!r}")
    d = deformation(a2)
    return pref * (d.conj().T @ filter_undeformed(axis) @ d)


def projective_basis_a1() -> np.ndarray:
    """The orthonormal basis measured projectively at ``a_squared = 1``.

    Returns a ``(4, 4)`` array whose rows are the four states; rows 0 and 1
    span ``F_x(1)`` and rows 2 and 3 span ``F_y(1)``, while ``F_z(1) = 0``.
    """
    basis = np.array(
        [
            [1, 1, 1, 1],
            [1, -1, 1, -1],
            [1, 1j, -1, -1j],
            [1, -1j, -1, 1j],
        ],
        dtype=np.complex128,
    ) / 2.0
    return np.array([_fix_phase(v) for v in basis])


def subunit_operators(a_squared: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Closing operator family ``(a F_x(a), a F_y(a), E(a))`` for ``a_squared <= 1``.

    ``E(a) = sqrt(1 - a^2)`` on the inner doublet absorbs the weight the
    rescaled x and y filters give up, so the three operators satisfy
    ``sum K^dag K = 1`` on the whole subunit range ``0 < a_squared <= 1``.
    """
    a2 = _check_a_squared(a_squared)
    if a2 > 1.0:
        raise ValueError(
            "subunit_operators requires 0 < a_squared <= 1; for a_squared >= 1 "
            "use filter_deformed instead"
        )
    a = np.sqrt(a2)
    # filter_deformed refuses a2 < 1, build the rescaled filters directly
    pref = np.sqrt((4.0 / 3.0) * a2 / (1.0 + a2))
    d = deformation(a2)
    kx = a * pref * (d.conj().T @ filter_undeformed("x") @ d)
    ky = a * pref * (d.conj().T @ filter_undeformed("y") @ d)
    e = np.diag([0.0, np.sqrt(1.0 - a2), np.sqrt(1.0 - a2), 0.0]).astype(np.complex128)
    return kx, ky, e


def completeness_residual(a_squared: float) -> float:
    """Frobenius norm of ``sum_K K^dag K - 1`` for the family valid at ``a_squared``."""
    a2 = _check_a_squared(a_squared)
    if a2 >= 1.0:
        ops = [filter_deformed(b, a2) for b in AXES]
    else:
        ops = list(subunit_operators(a2))
    total = sum(op.conj().T @ op for op in ops)
    return float(np.linalg.norm(total - np.eye(4)))

"""Named lattice constructions reused by scenarios and tests."""

from __future__ import annotations

from orbicalc_math.errors import InvalidValue
from orbicalc_math.lattice import IntMatrix
from orbicalc_math.orbifold import OrbifoldSurface, contract_chain
from orbicalc_math.surfaces import (
    Convention,
    SurfaceModel,
    add_curve,
    blow_up_sequence,
    make_hirzebruch,
    make_projective_plane,
    plane_curve_genus,
    pencil_base_multiplicity,
)

K3_CHAIN_LENGTH = 19
K3_CHAIN_NAMES: tuple[str, ...] = ("O", *(f"Theta{i}" for i in range(K3_CHAIN_LENGTH - 1)))


def pencil_surface(b: int, degree: int = 3) -> SurfaceModel:
    """Blow-up of the plane along a pencil of degree-d curves D1..Db meeting at one point.

    The d^2 infinitely near blow-ups E1..E_{d^2} separate the pencil; the curves
    X2..Xb are blow-ups of the points where D2..Db cross the last exceptional curve.
    """
    if b < 1:
        raise InvalidValue(f"need at least one curve in the pencil, got b={b}")
    s = make_projective_plane()
    genus = plane_curve_genus(degree)
    for i in range(1, b + 1):
        s = add_curve(s, f"D{i}", (degree,), genus)
    depth = pencil_base_multiplicity(degree)
    curves = tuple(f"D{i}" for i in range(1, b + 1))
    s = blow_up_sequence(
        s, [f"E{j}" for j in range(1, depth + 1)], through=curves, infinitely_near=True
    )
    return blow_up_sequence(
        s,
        [f"X{i}" for i in range(2, b + 1)],
        through=(f"E{depth}",),
        through_each=[(f"D{i}",) for i in range(2, b + 1)],
    )


def pencil_chain(degree: int = 3) -> tuple[str, ...]:
    depth = pencil_base_multiplicity(degree)
    return tuple(f"E{j}" for j in range(depth, 0, -1))


def pencil_orbifold(b: int, degree: int = 3) -> OrbifoldSurface:
    """Contract E_{d^2}, ..., E1: one singular point of type (b d^2 - d^2 + 1, d^2)."""
    return contract_chain(pencil_surface(b, degree), pencil_chain(degree))


def genus_two_surface() -> SurfaceModel:
    """H_2 with sigma^2 = 2 and the genus 2 curve D = 2 sigma + f."""
    s = make_hirzebruch(2, Convention.POSITIVE)
    return add_curve(s, "D", (2, 1), 2)


def genus_two_orbifold() -> OrbifoldSurface:
    return contract_chain(genus_two_surface(), ("sigma_infinity",))


def make_k3_lattice_with_chain() -> SurfaceModel:
    """Even unimodular lattice of signature (3, 19) with an A_19 chain of (-2)-curves.

    Basis: the chain O, Theta0, ..., Theta17 followed by w1, w2, w3, where w1 meets
    O once and w1, w2, w3 have Gram [[0, 3, 0], [3, 10, 1], [0, 1, 2]]. The
    determinant is -20 * (1/20) = -1.
    """
    n = K3_CHAIN_LENGTH
    size = n + 3
    rows = [[0] * size for _ in range(size)]
    for i in range(n):
        rows[i][i] = -2
        if i + 1 < n:
            rows[i][i + 1] = rows[i + 1][i] = 1
    w = [[0, 3, 0], [3, 10, 1], [0, 1, 2]]
    for i in range(3):
        for j in range(3):
            rows[n + i][n + j] = w[i][j]
    rows[0][n] = rows[n][0] = 1

    s = SurfaceModel(
        gram=IntMatrix(rows),
        canonical=(0,) * size,
        basis_labels=(*K3_CHAIN_NAMES, "w1", "w2", "w3"),
    )
    for name in K3_CHAIN_NAMES:
        s = add_curve(s, name, s.basis_vector(name), 0)
    return s


def k3_orbifold() -> OrbifoldSurface:
    """Contract the A_19 chain: b2 = 3 and one singular point of type (20, 19)."""
    return contract_chain(make_k3_lattice_with_chain(), K3_CHAIN_NAMES)

"""
Unit tests for `orbicalc_math.orbifold`.

The main fixtures are the cubic pencil (contracting E9..E1) and the positive
Hirzebruch surface with sigma^2 = 2 (contracting sigma_infinity).
"""

from __future__ import annotations

from fractions import Fraction

import pytest

from orbicalc_math import constructions
from orbicalc_math.errors import (
    ChainTouchesSingularPoint,
    CoprimalityViolation,
    InvalidIncidence,
    InvalidValue,
    MultiplicityNotGreaterThanOne,
    NotAChain,
)
from orbicalc_math.hirzebruch_jung import CyclicSingularity
from orbicalc_math.lattice import IntMatrix, det
from orbicalc_math.orbifold import (
    IsotropyData,
    OrbifoldSurface,
    assign_isotropy,
    blow_down,
    branch_divisor,
    contract_chain,
    is_calabi_yau,
    orbifold_signature,
    orbifold_structure,
    resolution_basis,
    resolution_gram,
)
from orbicalc_math.surfaces import (
    SurfaceModel,
    add_curve,
    blow_up_sequence,
    make_hirzebruch,
    make_projective_plane,
)


@pytest.fixture
def pencil_orbifold_b2() -> OrbifoldSurface:
    return constructions.pencil_orbifold(2)


class TestContractChain:
    def test_pencil_singularity_and_b2(self, pencil_orbifold_b2: OrbifoldSurface) -> None:
        x = pencil_orbifold_b2
        assert x.b2 == 2
        (point,) = x.singular_points
        assert point.singularity == CyclicSingularity(10, 9)
        assert point.label == "A_9"
        assert "D1" in point.incident

    @pytest.mark.parametrize("b", [2, 3, 4, 5, 6])
    def test_d1_square_after_contraction(self, b: int) -> None:
        # Gram inversion of the chain [b, 2, ..., 2] gives D1^2 = 9 / (9b - 8).
        x = constructions.pencil_orbifold(b)
        assert x.singular_points[0].singularity == CyclicSingularity(9 * b - 8, 9)
        assert x.self_intersection("D1") == Fraction(9, 9 * b - 8)
        assert x.b2 == b
        for i in range(2, b + 1):
            assert x.self_intersection(f"D{i}") == -1
            assert x.pairing(x.curve("D1").vector, x.curve(f"D{i}").vector) == 0

    def test_genus_two_orbifold(self) -> None:
        x = constructions.genus_two_orbifold()
        assert x.b2 == 1
        assert x.singular_points[0].singularity == CyclicSingularity(2, 1)
        assert x.self_intersection("D") == Fraction(25, 2)

    def test_contracted_curve_is_gone(self, pencil_orbifold_b2: OrbifoldSurface) -> None:
        with pytest.raises(InvalidIncidence):
            pencil_orbifold_b2.curve("E5")

    def test_cannot_contract_twice(self, pencil_orbifold_b2: OrbifoldSurface) -> None:
        with pytest.raises(ChainTouchesSingularPoint):
            contract_chain(pencil_orbifold_b2, ["E3"])

    def test_chain_touching_existing_point(self) -> None:
        # A and B meet once, so contracting A first forbids contracting B.
        s = SurfaceModel(
            gram=IntMatrix([[-2, 1, 0], [1, -2, 0], [0, 0, 1]]),
            canonical=(0, 0, 0),
            basis_labels=("a", "b", "h"),
        )
        s = add_curve(s, "A", (1, 0, 0), 0)
        s = add_curve(s, "B", (0, 1, 0), 0)
        x = contract_chain(s, ["A"])
        with pytest.raises(ChainTouchesSingularPoint):
            contract_chain(x, ["B"])

    def test_not_a_chain(self) -> None:
        # E1 and E3 of the pencil do not meet.
        s = constructions.pencil_surface(2)
        with pytest.raises(NotAChain):
            contract_chain(s, ["E1", "E3"])
        with pytest.raises(NotAChain):
            contract_chain(s, [])
        with pytest.raises(NotAChain):
            contract_chain(s, ["E1", "E1"])

    def test_minus_one_curve_is_not_a_chain(self) -> None:
        s = constructions.pencil_surface(1)
        with pytest.raises(NotAChain):
            contract_chain(s, ["E9"])

    def test_a3_chain_inside_larger_lattice(self) -> None:
        # Three (-2)-curves in a row contract to an A_3 point.
        s = SurfaceModel(
            gram=IntMatrix([[-2, 1, 0, 0], [1, -2, 1, 0], [0, 1, -2, 0], [0, 0, 0, 1]]),
            canonical=(0, 0, 0, 0),
            basis_labels=("a", "b", "c", "h"),
        )
        s = add_curve(s, "A", (1, 0, 0, 0), 0)
        s = add_curve(s, "B", (0, 1, 0, 0), 0)
        s = add_curve(s, "C", (0, 0, 1, 0), 0)
        x = contract_chain(s, ["A", "B", "C"])
        assert x.singular_points[0].singularity == CyclicSingularity(4, 3)

    def test_curve_crossing_the_middle(self) -> None:
        # A curve meeting the middle of a chain is rejected.
        s = SurfaceModel(
            gram=IntMatrix([[-2, 1, 0, 0], [1, -2, 1, 1], [0, 1, -2, 0], [0, 1, 0, 0]]),
            canonical=(0, 0, 0, 0),
            basis_labels=("a", "b", "c", "h"),
        )
        for name, v in [("A", (1, 0, 0, 0)), ("B", (0, 1, 0, 0)), ("C", (0, 0, 1, 0))]:
            s = add_curve(s, name, v, 0)
        s = add_curve(s, "L", (0, 0, 0, 1), None)
        with pytest.raises(InvalidIncidence):
            contract_chain(s, ["A", "B", "C"])


class TestBlowDown:
    def test_cubic_cross_check(self) -> None:
        # Blowing E9, ..., E1 back down restores C^2 = 9 = 9 / (9*1 - 8).
        s = add_curve(make_projective_plane(), "C", (3,), 1)
        s = blow_up_sequence(s, [f"E{j}" for j in range(1, 10)], through=("C",), infinitely_near=True)
        x = OrbifoldSurface.from_surface(s)
        for j in range(9, 0, -1):
            x = blow_down(x, f"E{j}")
        assert x.self_intersection("C") == 9
        assert x.b2 == 1
        assert x.singular_points == ()

    def test_needs_minus_one(self) -> None:
        s = constructions.pencil_surface(1)
        with pytest.raises(NotAChain):
            blow_down(s, "E1")


class TestIsotropy:
    def test_pencil_isotropy_and_point_multiplicity(self, pencil_orbifold_b2: OrbifoldSurface) -> None:
        x = assign_isotropy(pencil_orbifold_b2, [IsotropyData("D1", 3), IsotropyData("D2", 9)])
        assert [d.genus for d in x.isotropy] == [1, 1]
        (point,) = orbifold_structure(x)
        assert point.local_order == 10
        assert point.divisors == ("D1",)
        assert point.multiplicity == 30

    def test_multiplicity_must_exceed_one(self) -> None:
        with pytest.raises(MultiplicityNotGreaterThanOne):
            IsotropyData("D1", 1)

    def test_declared_genus_mismatch(self, pencil_orbifold_b2: OrbifoldSurface) -> None:
        with pytest.raises(InvalidValue):
            assign_isotropy(pencil_orbifold_b2, [IsotropyData("D1", 3, genus=2)])

    def test_coprimality_on_declared_intersection(self, pencil_orbifold_b2: OrbifoldSurface) -> None:
        # D1 and D2 are disjoint, so only a declared intersection triggers the gcd test.
        with pytest.raises(CoprimalityViolation) as exc:
            assign_isotropy(
                pencil_orbifold_b2,
                [IsotropyData("D1", 4), IsotropyData("D2", 6)],
                intersections=[("D1", "D2")],
            )
        assert exc.value.pair == ("D1", "D2")

    def test_coprimality_from_pairing(self) -> None:
        # sigma and f meet once on a Hirzebruch surface.
        x = OrbifoldSurface.from_surface(make_hirzebruch(1))
        with pytest.raises(CoprimalityViolation):
            assign_isotropy(x, [IsotropyData("sigma", 2), IsotropyData("f", 4)])
        ok = assign_isotropy(x, [IsotropyData("sigma", 2), IsotropyData("f", 3)])
        assert len(ok.isotropy) == 2

    def test_genus_two_point_multiplicity(self) -> None:
        x = assign_isotropy(constructions.genus_two_orbifold(), [IsotropyData("D", 5)])
        (point,) = orbifold_structure(x)
        assert point.multiplicity == 10


class TestGlobalData:
    def test_k3_orbifold_is_calabi_yau(self) -> None:
        x = constructions.k3_orbifold()
        assert x.b2 == 3
        assert x.singular_points[0].singularity == CyclicSingularity(20, 19)
        assert is_calabi_yau(x)
        assert orbifold_signature(x) == (3, 0)

    def test_plane_is_not_calabi_yau(self) -> None:
        assert not is_calabi_yau(OrbifoldSurface.from_surface(make_projective_plane()))

    def test_branch_divisor(self) -> None:
        x = assign_isotropy(OrbifoldSurface.from_surface(make_hirzebruch(1)), [IsotropyData("f", 3)])
        assert branch_divisor(x) == (0, Fraction(2, 3))

    @pytest.mark.parametrize(
        "build",
        [
            constructions.genus_two_orbifold,
            lambda: constructions.pencil_orbifold(2),
            lambda: constructions.pencil_orbifold(3, degree=4),
            constructions.k3_orbifold,
        ],
    )
    def test_resolution_gram_rebuilds_smooth_form(self, build) -> None:
        x = build()
        basis = IntMatrix(resolution_basis(x))
        smooth = basis @ x.resolution.gram @ basis.transpose()
        assert resolution_gram(x) == smooth
        assert abs(det(basis)) == 1

    def test_resolution_gram_genus_two(self) -> None:
        # Basis (f, sigma_infinity): f.f = 0, f.sigma_infinity = 1, sigma_infinity^2 = -2.
        x = constructions.genus_two_orbifold()
        g = resolution_gram(x)
        assert g.to_lists() == [[0, 1], [1, -2]]
        assert det(g) == -1 == det(x.resolution.gram)

    def test_resolution_gram_after_blow_down(self) -> None:
        s = add_curve(make_projective_plane(), "C", (3,), 1)
        s = blow_up_sequence(s, [f"E{j}" for j in range(1, 10)], through=("C",), infinitely_near=True)
        x = OrbifoldSurface.from_surface(s)
        for j in range(9, 0, -1):
            x = blow_down(x, f"E{j}")
        basis = IntMatrix(resolution_basis(x))
        assert resolution_gram(x) == basis @ x.resolution.gram @ basis.transpose()


class TestCorrectionTerm:
    @pytest.mark.parametrize(
        "build",
        [
            constructions.genus_two_orbifold,
            lambda: constructions.pencil_orbifold(2),
            lambda: constructions.pencil_orbifold(5),
            constructions.k3_orbifold,
        ],
    )
    def test_contraction_raises_squares(self, build) -> None:
        # M is negative definite, so -U^T M^-1 U > 0 whenever U != 0.
        x = build()
        checked = 0
        for i in range(x.resolution.rank):
            v = x.basis_vector(i)
            if not any(x.resolution.pair(c, v) for c in x.contracted_vectors):
                continue
            if any(v == c for c in x.contracted_vectors):
                continue
            assert x.pairing(v, v) > x.resolution.pair(v, v)
            checked += 1
        assert checked > 0

"""
Unit tests for `orbicalc_math.surfaces`.

We validate:
- Hirzebruch surfaces in both conventions (Gram, K, named sections).
- Adjunction genus, including the error cases.
- Blow-ups: single, infinitely near runs, the cubic pencil bookkeeping and random sequences.
- The Kodaira dimension sign table.
"""

from __future__ import annotations

import math
import random

import pytest

from orbicalc_math.errors import (
    InvalidIncidence,
    InvalidValue,
    NonIntegralGenus,
    NonRepresentable,
    UndefinedCase,
)
from orbicalc_math.lattice import IntMatrix, det
from orbicalc_math.surfaces import (
    Convention,
    PointSpec,
    SurfaceModel,
    add_curve,
    adjunction_genus,
    blow_up,
    blow_up_sequence,
    kodaira_dimension,
    make_hirzebruch,
    make_projective_plane,
    multiplication_degree,
    pencil_base_multiplicity,
    plane_curve_genus,
)


class TestHirzebruch:
    def test_negative_convention(self) -> None:
        s = make_hirzebruch(3)
        assert s.gram == IntMatrix([[-3, 1], [1, 0]])
        assert s.canonical == (-2, -5)
        assert s.k_squared == 8
        assert s.square(s.curve("sigma_positive").vector) == 3
        assert s.convention is Convention.NEGATIVE

    def test_positive_convention(self) -> None:
        s = make_hirzebruch(2, "positive")
        assert s.gram == IntMatrix([[2, 1], [1, 0]])
        assert s.square(s.curve("sigma_infinity").vector) == -2
        assert s.k_squared == 8

    def test_fiber_and_section_are_rational(self) -> None:
        s = make_hirzebruch(1)
        assert s.curve("f").genus == 0
        assert s.curve("sigma").genus == 0

    def test_n_zero_has_no_extra_section(self) -> None:
        s = make_hirzebruch(0)
        assert not s.has_curve("sigma_positive")

    def test_rejects_bad_input(self) -> None:
        with pytest.raises(InvalidValue):
            make_hirzebruch(-1)
        with pytest.raises(InvalidValue):
            make_hirzebruch(2, Convention.NONE)


class TestAdjunction:
    @pytest.mark.parametrize("d, genus", [(1, 0), (2, 0), (3, 1), (4, 3), (5, 6)])
    def test_plane_curves(self, d: int, genus: int) -> None:
        assert adjunction_genus(make_projective_plane(), (d,)) == genus
        assert plane_curve_genus(d) == genus

    def test_genus_two_curve(self) -> None:
        # D = 2 sigma + f on the positive H_2: D^2 = 12, genus 2.
        s = make_hirzebruch(2, Convention.POSITIVE)
        assert s.square((2, 1)) == 12
        assert adjunction_genus(s, (2, 1)) == 2

    def test_zero_class(self) -> None:
        with pytest.raises(NonRepresentable):
            adjunction_genus(make_projective_plane(), (0,))

    def test_odd_parity(self) -> None:
        # On an odd form v^2 + K.v can be odd (K here is not characteristic).
        s = SurfaceModel(gram=IntMatrix([[1]]), canonical=(0,), basis_labels=("x",))
        with pytest.raises(NonIntegralGenus):
            adjunction_genus(s, (1,))

    def test_declared_genus_must_match(self) -> None:
        with pytest.raises(InvalidValue):
            add_curve(make_projective_plane(), "C", (3,), 2)

    def test_duplicate_curve(self) -> None:
        s = add_curve(make_projective_plane(), "C", (3,), 1)
        with pytest.raises(InvalidValue):
            add_curve(s, "C", (1,))


class TestBlowUp:
    def test_single_point(self) -> None:
        s = add_curve(make_projective_plane(), "C", (3,), 1)
        s = blow_up(s, PointSpec(through=("C",)))
        assert s.basis_labels == ("H", "e_E1")
        assert s.square(s.curve("C").vector) == 8
        assert s.square(s.curve("E1").vector) == -1
        assert s.canonical == (-3, 1)
        assert s.k_squared == 8

    def test_unknown_incident_curve(self) -> None:
        with pytest.raises(InvalidIncidence):
            blow_up(make_projective_plane(), PointSpec(through=("nope",)))

    def test_infinitely_near_needs_previous(self) -> None:
        with pytest.raises(InvalidIncidence):
            blow_up(make_projective_plane(), PointSpec(infinitely_near=True))

    def test_cubic_pencil(self) -> None:
        # Nine infinitely near blow-ups along two cubics: C_i^2 = 0, E_1..E_8 = -2, E_9 = -1.
        s = make_projective_plane()
        s = add_curve(s, "D1", (3,), 1)
        s = add_curve(s, "D2", (3,), 1)
        s = blow_up_sequence(s, [f"E{j}" for j in range(1, 10)], through=("D1", "D2"), infinitely_near=True)
        assert s.rank == 10
        assert s.square(s.curve("D1").vector) == 0
        assert s.pair(s.curve("D1").vector, s.curve("D2").vector) == 0
        for j in range(1, 9):
            assert s.square(s.curve(f"E{j}").vector) == -2
        assert s.square(s.curve("E9").vector) == -1
        assert s.pair(s.curve("D1").vector, s.curve("E9").vector) == 1
        assert s.k_squared == 0

    def test_through_each(self) -> None:
        s = add_curve(make_projective_plane(), "A", (1,), 0)
        s = add_curve(s, "B", (1,), 0)
        s = blow_up_sequence(s, ["P", "Q"], through_each=[("A",), ("B",)])
        assert s.curve("A").vector == (1, -1, 0)
        assert s.curve("B").vector == (1, 0, -1)

    def test_through_each_length(self) -> None:
        with pytest.raises(InvalidValue):
            blow_up_sequence(make_projective_plane(), ["P", "Q"], through_each=[()])

    def test_input_is_not_mutated(self) -> None:
        s = make_projective_plane()
        blow_up(s)
        assert s.rank == 1

    @pytest.mark.parametrize(
        "base",
        [
            make_projective_plane(),
            make_hirzebruch(0),
            make_hirzebruch(3),
            make_hirzebruch(2, Convention.POSITIVE),
        ],
        ids=["P2", "H0", "H3", "H2-positive"],
    )
    def test_random_sequences(self, base: SurfaceModel) -> None:
        # Each blow-up keeps the form unimodular, lowers K^2 by one and leaves curve genera alone.
        rng = random.Random(2718)
        for _ in range(20):
            s = base
            for _ in range(rng.randint(1, 8)):
                names = [c.name for c in s.curves]
                through = tuple(rng.sample(names, rng.randint(0, min(2, len(names)))))
                near = bool(s.exceptionals) and rng.random() < 0.5
                k_squared = s.k_squared
                s = blow_up(s, PointSpec(through=through, infinitely_near=near))
                assert abs(det(s.gram)) == 1
                assert s.k_squared == k_squared - 1
                for c in s.curves:
                    assert adjunction_genus(s, c.vector) == c.genus


class TestNumerics:
    def test_degrees(self) -> None:
        assert pencil_base_multiplicity(3) == 9
        assert multiplication_degree(9) == 81
        with pytest.raises(InvalidValue):
            multiplication_degree(0)


class TestKodairaDimension:
    @pytest.mark.parametrize(
        "kw, kk, expected",
        [
            (-1, 0, -math.inf),
            ("negative", "positive", -math.inf),
            (0, 0, 0),
            (1, 0, 1),
            ("positive", "positive", 2),
            (2, -1, -math.inf),
        ],
    )
    def test_sign_table(self, kw: object, kk: object, expected: float) -> None:
        assert kodaira_dimension(kw, kk) == expected

    def test_undefined_case(self) -> None:
        with pytest.raises(UndefinedCase):
            kodaira_dimension(0, 1)

"""Unit tests for `orbicalc_math.constructions`."""

from __future__ import annotations

from fractions import Fraction

import pytest

from orbicalc_math import constructions
from orbicalc_math.errors import InvalidValue
from orbicalc_math.hirzebruch_jung import CyclicSingularity
from orbicalc_math.lattice import det, is_even, signature


class TestPencil:
    def test_chain_names(self) -> None:
        assert constructions.pencil_chain() == tuple(f"E{j}" for j in range(9, 0, -1))
        assert len(constructions.pencil_chain(4)) == 16

    def test_needs_a_curve(self) -> None:
        with pytest.raises(InvalidValue):
            constructions.pencil_surface(0)

    def test_separating_blow_ups(self) -> None:
        s = constructions.pencil_surface(3)
        assert s.rank == 1 + 9 + 2
        assert s.square(s.curve("X3").vector) == -1
        assert s.square(s.curve("E9").vector) == -3

    @pytest.mark.parametrize("b", [2, 3])
    def test_quartic_pencil(self, b: int) -> None:
        # d = 4: a (16(b-1) + 1, 16) point, genus 3 curves.
        x = constructions.pencil_orbifold(b, degree=4)
        assert x.singular_points[0].singularity == CyclicSingularity(16 * (b - 1) + 1, 16)
        assert x.self_intersection("D1") == Fraction(16, 16 * (b - 1) + 1)
        assert x.curve("D1").genus == 3


class TestK3:
    def test_lattice(self) -> None:
        s = constructions.make_k3_lattice_with_chain()
        assert s.rank == 22
        assert det(s.gram) == -1
        assert is_even(s.gram)
        assert signature(s.gram)[:2] == (3, 19)
        assert s.k_squared == 0

    def test_orbifold(self) -> None:
        x = constructions.k3_orbifold()
        assert x.b2 == 3
        assert x.singular_points[0].label == "A_19"

"""
Tests für Versuchspläne
"""
import numpy as np
import pytest

from src.sampling import (
    Design,
    Domain,
    SamplingError,
    gaussian_design,
    latin_hypercube,
    prefix,
    scale_to_box,
)


class TestLatinHypercube:
    """Tests für latin_hypercube"""

    def test_one_point_per_stratum(self):
        """Test: M = 4, m = 1 ergibt einen Punkt pro Viertel"""
        design = latin_hypercube(4, 1, seed=7)
        strata = np.sort(np.floor(design.points[:, 0] * 4).astype(int))
        assert strata.tolist() == [0, 1, 2, 3]

    def test_latin_property_every_column(self):
        """Test: Latin-Eigenschaft in jeder Koordinate"""
        M = 50
        design = latin_hypercube(M, 5, seed=3)
        for j in range(5):
            strata = np.floor(design.points[:, j] * M).astype(int)
            assert sorted(strata.tolist()) == list(range(M))

    def test_single_point(self):
        """Test: M = 1 ergibt einen Punkt in [0,1)^m"""
        design = latin_hypercube(1, 3, seed=0)
        assert design.points.shape == (1, 3)
        assert np.all(design.points >= 0.0) and np.all(design.points < 1.0)

    def test_deterministic(self):
        """Test: Gleicher Seed ergibt identische Matrizen"""
        a = latin_hypercube(20, 4, seed=11)
        b = latin_hypercube(20, 4, seed=11)
        assert np.array_equal(a.points, b.points)

    def test_seed_changes_design(self):
        """Test: Anderer Seed ergibt anderes Design"""
        assert not np.array_equal(latin_hypercube(20, 4, 1).points, latin_hypercube(20, 4, 2).points)

    def test_zero_points_rejected(self):
        """Test: M = 0 ergibt einen Fehler"""
        with pytest.raises(SamplingError):
            latin_hypercube(0, 2, seed=0)


class TestScaleToBox:
    """Tests für scale_to_box"""

    def test_midpoint(self):
        """Test: 0.5 wird auf die Mitte abgebildet"""
        design = Design(points=np.array([[0.5]]), domain=Domain.UNIT_CUBE, seed=0)
        scaled = scale_to_box(design, -0.01, 0.01)
        assert scaled.points[0, 0] == pytest.approx(0.0, abs=1e-18)

    def test_lower_corner_exact(self):
        """Test: 0 wird exakt auf lo abgebildet"""
        design = Design(points=np.array([[0.0, 0.0]]), domain=Domain.UNIT_CUBE, seed=0)
        scaled = scale_to_box(design, [-1.0, 2.0], [1.0, 3.0])
        assert scaled.points.tolist() == [[-1.0, 2.0]]

    def test_within_bounds(self):
        """Test: Alle Werte liegen im Quader"""
        scaled = scale_to_box(latin_hypercube(100, 18, seed=0), -0.01, 0.01)
        assert scaled.domain == Domain.BOX
        assert np.all(scaled.points >= -0.01) and np.all(scaled.points <= 0.01)

    def test_invalid_bounds(self):
        """Test: lo ≥ hi ergibt einen Fehler"""
        with pytest.raises(SamplingError):
            scale_to_box(latin_hypercube(3, 2, seed=0), [0.0, 1.0], [1.0, 1.0])


class TestGaussianDesign:
    """Tests für gaussian_design"""

    def test_moments(self):
        """Test: Mittelwert und Varianz nahe (0, 1)"""
        design = gaussian_design(100_000, 2, seed=0)
        assert np.all(np.abs(design.points.mean(axis=0)) <= 0.02)
        assert np.all(np.abs(design.points.var(axis=0) - 1.0) <= 0.03)

    def test_deterministic(self):
        """Test: Gleicher Seed ergibt identische Ausgabe"""
        assert np.array_equal(gaussian_design(10, 3, 5).points, gaussian_design(10, 3, 5).points)

    def test_single_point(self):
        """Test: M = 1 ergibt einen m-Vektor"""
        assert gaussian_design(1, 4, 0).points.shape == (1, 4)


class TestPrefix:
    """Tests für prefix"""

    def test_first_rows(self):
        """Test: Präfix enthält die ersten k Zeilen"""
        design = latin_hypercube(10, 2, seed=1)
        head = prefix(design, 4)
        assert np.array_equal(head.points, design.points[:4])
        assert head.seed == design.seed

    def test_invalid_length(self):
        """Test: k außerhalb von 1…M"""
        with pytest.raises(SamplingError):
            prefix(latin_hypercube(3, 1, seed=0), 4)

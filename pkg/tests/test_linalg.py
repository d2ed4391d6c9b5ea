"""
Tests für Frames, Eigenzerlegung und Unterraumabstände
"""
import numpy as np
import pytest

from src.linalg import (
    Frame,
    LinalgError,
    Spectrum,
    canonical_basis,
    complement,
    fix_signs,
    lstsq,
    orthonormalize,
    polar_factor,
    subspace_distance,
    sym_eig_desc,
)


class TestFrame:
    """Tests für das Frame-Modell"""

    def test_create_valid_frame(self):
        """Test: Gültigen Frame erstellen"""
        U = Frame(np.eye(3)[:, :2])
        assert U.m == 3
        assert U.n == 2

    def test_n_must_be_smaller_than_m(self):
        """Test: n muss kleiner als m sein"""
        with pytest.raises(ValueError, match="1 ≤ n < m"):
            Frame(np.eye(2))

    def test_columns_must_be_orthonormal(self):
        """Test: Nicht-orthonormale Spalten werden abgelehnt"""
        with pytest.raises(ValueError, match="nicht orthonormal"):
            Frame(np.array([[1.0], [1.0], [0.0]]))

    def test_sign_convention_enforced(self):
        """Test: Negativer Pivot-Eintrag wird abgelehnt"""
        with pytest.raises(ValueError, match="Vorzeichenkonvention"):
            Frame(np.array([[-1.0], [0.0]]))

    def test_from_array_fixes_signs(self):
        """Test: from_array dreht Spaltenvorzeichen"""
        U = Frame.from_array(np.array([[-0.6], [0.8]]) * -1.0)
        np.testing.assert_allclose(U.entries[:, 0], [-0.6, 0.8])

    def test_tie_goes_to_lowest_row(self):
        """Test: Bei gleichen Beträgen ist der oberste Eintrag positiv"""
        A = fix_signs(np.array([[-1.0], [1.0]]) / np.sqrt(2.0))
        assert A[0, 0] > 0
        assert A[1, 0] < 0

    def test_entries_read_only(self):
        """Test: Einträge sind unveränderlich"""
        U = Frame(np.eye(3)[:, :1])
        with pytest.raises(ValueError):
            U.entries[0, 0] = 2.0

    def test_to_list_row_major(self):
        """Test: to_list liefert Zeilen"""
        U = Frame(np.eye(3)[:, :2])
        assert U.to_list() == [[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]]


class TestOrthonormalize:
    """Tests für orthonormalize"""

    def test_identity_unchanged(self):
        """Test: Orthonormale Eingabe bleibt gleich"""
        U = orthonormalize(np.eye(3)[:, :2])
        np.testing.assert_allclose(U.entries, np.eye(3)[:, :2], atol=1e-15)

    def test_gram_schmidt_by_hand(self):
        """Test: [[1,1],[0,1],[0,0]] ergibt die ersten beiden Einheitsvektoren"""
        A = np.array([[1.0, 1.0], [0.0, 1.0], [0.0, 0.0]])
        U = orthonormalize(A)
        np.testing.assert_allclose(U.entries, np.eye(3)[:, :2], atol=1e-15)

    def test_random_full_rank(self):
        """Test: Zufällige Matrix mit vollem Rang"""
        A = np.random.default_rng(1).standard_normal((7, 3))
        U = orthonormalize(A)
        assert np.max(np.abs(U.entries.T @ U.entries - np.eye(3))) <= 1e-12
        assert subspace_distance(U, orthonormalize(A, method="polar")) < 1e-12

    def test_rank_deficient(self):
        """Test: Rangabfall wird gemeldet"""
        A = np.array([[1.0, 2.0], [1.0, 2.0], [0.0, 0.0]])
        with pytest.raises(LinalgError, match="rank deficient"):
            orthonormalize(A)

    def test_unknown_method(self):
        """Test: Unbekannte Methode"""
        with pytest.raises(LinalgError, match="Unbekannte Methode"):
            orthonormalize(np.eye(3)[:, :1], method="svd")

    def test_polar_factor_equivariant(self):
        """Test: polar(A·Q) = polar(A)·Q"""
        rng = np.random.default_rng(2)
        A = rng.standard_normal((5, 2))
        Q, _ = np.linalg.qr(rng.standard_normal((2, 2)))
        np.testing.assert_allclose(polar_factor(A @ Q), polar_factor(A) @ Q, atol=1e-13)


class TestComplement:
    """Tests für complement"""

    def test_e1_in_r2(self):
        """Test: Komplement von e₁ ist e₂"""
        V = complement(Frame(np.array([[1.0], [0.0]])))
        np.testing.assert_allclose(V.entries, [[0.0], [1.0]], atol=1e-15)

    def test_rotation(self):
        """Test: Komplement von [cos α, sin α]ᵀ"""
        alpha = 0.3
        V = complement(Frame.from_array([np.cos(alpha), np.sin(alpha)]))
        expected = np.array([[-np.sin(alpha)], [np.cos(alpha)]])
        assert subspace_distance(V, expected) < 1e-12

    def test_orthogonal_to_input(self):
        """Test: max|VᵀU| ≤ 1e-12"""
        U = orthonormalize(np.random.default_rng(3).standard_normal((6, 2)))
        V = complement(U)
        assert V.n == 4
        assert np.max(np.abs(V.entries.T @ U.entries)) <= 1e-12

    def test_full_space_has_no_complement(self):
        """Test: n = m ergibt einen Fehler"""
        with pytest.raises(LinalgError, match="no complement"):
            complement(np.eye(2))


class TestCanonicalBasis:
    """Tests für canonical_basis"""

    @pytest.mark.parametrize("m, n", [(2, 1), (3, 2), (4, 2), (6, 3)])
    def test_rotation_of_basis(self, m, n):
        """Test: U und UQ ergeben dieselbe Basis"""
        rng = np.random.default_rng(10 * m + n)
        U = orthonormalize(rng.standard_normal((m, n)))
        Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
        a = canonical_basis(U)
        b = canonical_basis(U.entries @ Q)
        np.testing.assert_allclose(a.entries, b.entries, atol=1e-12)
        assert subspace_distance(a, U) <= 1e-12

    def test_axis_aligned(self):
        """Test: span(e₂, e₁) ergibt [e₁, e₂]"""
        U = Frame(np.array([[0.0, 1.0], [1.0, 0.0], [0.0, 0.0]]))
        np.testing.assert_allclose(canonical_basis(U).entries, np.eye(3)[:, :2], atol=1e-15)

    def test_rank_deficient(self):
        """Test: Linear abhängige Spalten werden abgelehnt"""
        with pytest.raises(LinalgError, match="rank deficient"):
            canonical_basis(np.array([[1.0, 1.0], [0.0, 0.0], [0.0, 0.0]]))


class TestSymEigDesc:
    """Tests für sym_eig_desc"""

    def test_diagonal_reordered(self):
        """Test: diag(25, 526.4) wird absteigend sortiert"""
        spec = sym_eig_desc(np.diag([25.0, 526.4]))
        np.testing.assert_allclose(spec.eigenvalues, [526.4, 25.0])
        np.testing.assert_allclose(spec.eigenvectors, [[0.0, 1.0], [1.0, 0.0]], atol=1e-15)

    def test_identity_tie_break(self):
        """Test: S = I ergibt W = I"""
        spec = sym_eig_desc(np.eye(4))
        np.testing.assert_allclose(spec.eigenvalues, np.ones(4))
        np.testing.assert_allclose(spec.eigenvectors, np.eye(4), atol=1e-15)

    def test_two_by_two(self):
        """Test: [[2,1],[1,2]] hat λ = (3,1)"""
        spec = sym_eig_desc(np.array([[2.0, 1.0], [1.0, 2.0]]))
        s = 1.0 / np.sqrt(2.0)
        np.testing.assert_allclose(spec.eigenvalues, [3.0, 1.0])
        np.testing.assert_allclose(spec.eigenvectors, [[s, s], [s, -s]], atol=1e-14)

    def test_asymmetric_rejected(self):
        """Test: Unsymmetrische Matrix wird abgelehnt"""
        with pytest.raises(LinalgError, match="nicht symmetrisch"):
            sym_eig_desc(np.array([[1.0, 2.0], [0.0, 1.0]]))

    def test_spectrum_validates_order(self):
        """Test: Spectrum verlangt absteigende Eigenwerte"""
        with pytest.raises(ValueError, match="absteigend"):
            Spectrum(eigenvalues=np.array([1.0, 2.0]), eigenvectors=np.eye(2))

    def test_reconstruction(self):
        """Test: W Λ Wᵀ = S"""
        B = np.random.default_rng(4).standard_normal((5, 5))
        S = B + B.T
        spec = sym_eig_desc(S)
        W = spec.eigenvectors
        np.testing.assert_allclose((W * spec.eigenvalues) @ W.T, S, atol=1e-12)

    @pytest.mark.parametrize("m", [2, 10, 25, 50])
    def test_reconstruction_random_sizes(self, m):
        """Test: Rekonstruktion und Orthogonalität bis m = 50"""
        B = np.random.default_rng(m).standard_normal((m, m))
        S = B + B.T
        spec = sym_eig_desc(S)
        W = spec.eigenvectors
        assert np.all(np.diff(spec.eigenvalues) <= 0)
        np.testing.assert_allclose(W.T @ W, np.eye(m), atol=1e-12)
        np.testing.assert_allclose((W * spec.eigenvalues) @ W.T, S, atol=1e-10 * np.max(np.abs(S)))

    @pytest.mark.parametrize("m, rank", [(5, 1), (8, 2), (18, 2), (50, 3)])
    def test_rank_deficient_psd(self, m, rank):
        """Test: Niedrigrangige SPSD-Matrix mit Rundungsrauschen im Nullraum"""
        G = np.random.default_rng(100 + m).standard_normal((m, rank))
        S = G @ G.T
        spec = sym_eig_desc(S)
        W = spec.eigenvectors
        assert np.all(np.diff(spec.eigenvalues) <= 0)
        np.testing.assert_allclose(spec.eigenvalues[rank:], 0.0, atol=1e-12 * np.max(np.abs(S)))
        np.testing.assert_allclose((W * spec.eigenvalues) @ W.T, S, atol=1e-10 * np.max(np.abs(S)))

    def test_rank_one_constant_gradient(self):
        """Test: bbᵀ in m = 8 hat λ = (‖b‖², 0, …)"""
        b = np.arange(1.0, 9.0)
        spec = sym_eig_desc(np.outer(b, b))
        assert spec.eigenvalues[0] == pytest.approx(b @ b, rel=1e-12)
        np.testing.assert_allclose(spec.eigenvalues[1:], 0.0, atol=1e-12 * (b @ b))


class TestSubspaceDistance:
    """Tests für subspace_distance"""

    def test_identical(self):
        """Test: Gleicher Unterraum hat Abstand 0"""
        U = orthonormalize(np.random.default_rng(5).standard_normal((4, 2)))
        assert subspace_distance(U, U) == pytest.approx(0.0, abs=1e-15)

    def test_orthogonal(self):
        """Test: e₁ und e₂ haben Abstand 1"""
        assert subspace_distance(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == pytest.approx(1.0)

    def test_principal_angle(self):
        """Test: Abstand = |sin α| für α = π/6"""
        alpha = np.pi / 6
        d = subspace_distance(np.array([1.0, 0.0]), np.array([np.cos(alpha), np.sin(alpha)]))
        assert d == pytest.approx(0.5, rel=1e-12)

    def test_basis_invariant(self):
        """Test: Abstand hängt nicht von der Basis ab"""
        rng = np.random.default_rng(6)
        A = orthonormalize(rng.standard_normal((5, 2)))
        B = orthonormalize(rng.standard_normal((5, 2)))
        Q, _ = np.linalg.qr(rng.standard_normal((2, 2)))
        assert subspace_distance(A, B) == pytest.approx(subspace_distance(A.entries @ Q, B), rel=1e-12)

    def test_dimension_mismatch(self):
        """Test: Unterschiedliches k ergibt einen Fehler"""
        with pytest.raises(LinalgError, match="passen nicht"):
            subspace_distance(np.eye(3)[:, :1], np.eye(3)[:, :2])


class TestLstsq:
    """Tests für lstsq"""

    def test_identity(self):
        """Test: A = I liefert b"""
        b = np.array([1.0, -2.0, 3.0])
        np.testing.assert_allclose(lstsq(np.eye(3), b), b)

    def test_mean(self):
        """Test: A = [[1],[1]], b = (1,3) liefert θ = 2"""
        np.testing.assert_allclose(lstsq(np.array([[1.0], [1.0]]), np.array([1.0, 3.0])), [2.0])

    def test_consistent_system(self):
        """Test: Konsistentes überbestimmtes System wird exakt gelöst"""
        rng = np.random.default_rng(7)
        A = rng.standard_normal((20, 4))
        b = A @ rng.standard_normal(4)
        theta = lstsq(A, b)
        assert np.linalg.norm(A @ theta - b) <= 1e-10 * np.linalg.norm(b)

    def test_rank_deficient_min_norm(self):
        """Test: Bei Rangabfall wird die Lösung minimaler Norm gewählt"""
        A = np.array([[1.0, 1.0], [1.0, 1.0]])
        np.testing.assert_allclose(lstsq(A, np.array([2.0, 2.0])), [1.0, 1.0])

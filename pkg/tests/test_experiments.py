"""
Tests für Experimente (Monte-Carlo-Konvergenz, Startwertvergleich, Trainingsgröße)
"""
import numpy as np
import pytest

from src.activesubspace import GradientSet, analytic_quadratic_C, estimate_C
from src.experiments import (
    DEFAULT_RANDOM_SEEDS,
    ExperimentError,
    InitComparison,
    compare_initializations,
    initial_frame,
    monte_carlo_convergence,
    training_size_study,
)
from src.linalg import subspace_distance
from src.oracle import builtin
from src.polyridge import LabeledSamples
from src.sampling import gaussian_design


@pytest.fixture
def ridge_problem():
    """Exakte Ridge-Funktion in m = 4 mit n = 1, Trainings- und Testdaten"""
    f = builtin("exact_ridge", m=4, n=1, degree=2, seed=3)
    X_train = gaussian_design(120, 4, seed=10).points
    X_test = gaussian_design(50, 4, seed=11).points
    train = LabeledSamples(X=X_train, f=f(X_train))
    test = LabeledSamples(X=X_test, f=f(X_test))
    estimate = estimate_C(GradientSet(f.grad(X_train[:20])))
    return f, train, test, estimate


class TestInitialFrame:
    """Tests für initial_frame"""

    def test_identity(self):
        """Test: identity ergibt die ersten n Einheitsvektoren"""
        U0 = initial_frame("identity", 4, 2)
        np.testing.assert_array_equal(U0.entries, np.eye(4)[:, :2])

    def test_active_uses_leading_eigenvectors(self):
        """Test: active ergibt die führenden Eigenvektoren"""
        est = analytic_quadratic_C(np.diag([1.0, 5.0, 2.0]), np.zeros(3))
        U0 = initial_frame("active", 3, 1, est)
        assert subspace_distance(U0, np.array([0.0, 1.0, 0.0])) <= 1e-14

    def test_random_deterministic(self):
        """Test: random mit gleichem Seed ist reproduzierbar"""
        a = initial_frame("random", 5, 2, seed=4)
        b = initial_frame("random", 5, 2, seed=4)
        assert np.array_equal(a.entries, b.entries)
        assert np.array_equal(initial_frame("random", 5, 2).entries,
                              initial_frame("random", 5, 2, seed=0).entries)

    def test_active_without_estimate(self):
        """Test: active ohne Spektrum"""
        with pytest.raises(ExperimentError, match="Spektrum"):
            initial_frame("active", 3, 1)

    def test_active_dimension_mismatch(self):
        """Test: Spektrum mit falscher Dimension"""
        est = analytic_quadratic_C(np.eye(2), np.zeros(2))
        with pytest.raises(ExperimentError, match="Dimension"):
            initial_frame("active", 3, 1, est)

    def test_unknown_mode(self):
        """Test: Unbekannter Modus"""
        with pytest.raises(ExperimentError, match="Unbekannter Startwert"):
            initial_frame("zeros", 3, 1)


class TestMonteCarloConvergence:
    """Tests für monte_carlo_convergence"""

    def test_quadratic_rate(self):
        """Test: errΛ fällt etwa wie N^(−½) für ½xᵀdiag(3,1)x"""
        f = builtin("quadratic")
        reference = analytic_quadratic_C(np.diag([3.0, 1.0]), np.zeros(2))
        study = monte_carlo_convergence(f, reference, [100, 316, 1000, 3162, 10000])
        assert study.seed_count == len(DEFAULT_RANDOM_SEEDS)
        assert -0.65 <= study.slope_lambda <= -0.35
        assert study.err_lambda[-1] < study.err_lambda[0]
        assert list(study.to_table().columns) == ["N", "err_lambda", "err_w"]

    def test_lhs_design(self):
        """Test: LHS-Design wird unterstützt"""
        f = builtin("quadratic")
        reference = analytic_quadratic_C(np.diag([3.0, 1.0]), np.zeros(2))
        study = monte_carlo_convergence(f, reference, [10, 40], seeds=[0, 1], design="lhs")
        assert study.sizes.tolist() == [10, 40]
        assert study.seed_count == 2

    def test_sizes_sorted(self):
        """Test: Größen werden aufsteigend sortiert"""
        f = builtin("quadratic")
        reference = analytic_quadratic_C(np.diag([3.0, 1.0]), np.zeros(2))
        study = monte_carlo_convergence(f, reference, [50, 20], seeds=[0])
        assert study.sizes.tolist() == [20, 50]

    def test_single_size_rejected(self):
        """Test: Eine Größe reicht nicht für eine Steigung"""
        f = builtin("quadratic")
        reference = analytic_quadratic_C(np.diag([3.0, 1.0]), np.zeros(2))
        with pytest.raises(ExperimentError):
            monte_carlo_convergence(f, reference, [100])

    def test_reference_dimension(self):
        """Test: Referenz mit falscher Dimension"""
        with pytest.raises(ExperimentError, match="Referenz"):
            monte_carlo_convergence(builtin("quadratic"),
                                    analytic_quadratic_C(np.eye(3), np.zeros(3)), [10, 20])

    def test_unknown_design(self):
        """Test: Unbekanntes Design"""
        f = builtin("quadratic")
        reference = analytic_quadratic_C(np.diag([3.0, 1.0]), np.zeros(2))
        with pytest.raises(ExperimentError, match="Design"):
            monte_carlo_convergence(f, reference, [10, 20], design="sobol")


class TestCompareInitializations:
    """Tests für compare_initializations / InitComparison"""

    def test_labels_and_tables(self, ridge_problem):
        """Test: Bezeichnungen active, identity, random-<seed>"""
        _, train, _, estimate = ridge_problem
        comparison = compare_initializations(train, 1, 2, estimate, random_seeds=[0, 1], P=2)
        assert list(comparison.models) == ["active", "identity", "random-0", "random-1"]
        table = comparison.to_table()
        assert list(table.columns) == ["label", "iter", "phase", "residual"]
        assert len(table) == 4 * (2 * 2 + 1)
        assert comparison.models["random-1"].seed == 1
        assert comparison.models["active"].init == "active"

    def test_active_start_is_best(self, ridge_problem):
        """Test: Start im aktiven Unterraum erreicht ein exaktes Residuum"""
        _, train, _, estimate = ridge_problem
        comparison = compare_initializations(train, 1, 2, estimate, random_seeds=range(3), P=3)
        residuals = comparison.final_residuals()
        assert residuals["active"] <= 1e-12 * float(np.sum(train.f ** 2))
        assert residuals["active"] <= (comparison.random_median() * (1 + 1e-3)
                                    + 1e-20 * float(np.sum(train.f ** 2)))

    def test_without_estimate(self, ridge_problem):
        """Test: Ohne Spektrum kein active-Lauf"""
        _, train, _, _ = ridge_problem
        comparison = compare_initializations(train, 1, 1, random_seeds=[], P=1,
                                             include_identity=True)
        assert list(comparison.models) == ["identity"]
        with pytest.raises(ExperimentError, match="zufälligen"):
            comparison.random_median()

    def test_empty_comparison(self):
        """Test: Leerer Vergleich"""
        assert InitComparison(n=1, N=2).final_residuals() == {}


class TestTrainingSizeStudy:
    """Tests für training_size_study"""

    def test_rows_per_size_and_mode(self, ridge_problem):
        """Test: Eine Zeile pro Größe und Startwert"""
        _, train, test, estimate = ridge_problem
        table = training_size_study(train, test, [30, 120], 1, 2, estimate,
                                    random_seeds=[0, 1], P=2)
        assert list(table.columns) == ["M", "init", "test_error"]
        assert len(table) == 2 * 3
        assert table["M"].tolist() == [30, 30, 30, 120, 120, 120]
        active = table[table["init"] == "active"]["test_error"]
        assert np.all(active <= 1e-6)

    def test_small_size_skipped(self, ridge_problem):
        """Test: M kleiner als die Basis wird übersprungen"""
        _, train, test, _ = ridge_problem
        table = training_size_study(train, test, [2, 40], 1, 2, modes=["identity"], P=1)
        assert table["M"].tolist() == [40]

    def test_size_above_available(self, ridge_problem):
        """Test: Mehr Trainingspaare als vorhanden"""
        _, train, test, _ = ridge_problem
        with pytest.raises(ExperimentError, match="Trainingsgröße"):
            training_size_study(train, test, [500], 1, 2, modes=["identity"])

"""
Demo: Ridge-Approximation mit Startwert aus dem aktiven Unterraum
"""
import sys
from pathlib import Path

# Füge das Projektverzeichnis zum Python-Pfad hinzu
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

import numpy as np

from src.activesubspace import GradientSet, choose_n, estimate_C
from src.experiments import compare_initializations
from src.linalg import subspace_distance
from src.oracle import builtin
from src.polyridge import LabeledSamples
from src.sampling import gaussian_design


def main():
    """Vergleicht active, identity und zufällige Startwerte in m = 10"""
    f = builtin("perturbed_ridge", m=10, n=2, degree=3, seed=0, epsilon=1e-2)
    X = gaussian_design(400, 10, seed=1).points
    samples = LabeledSamples(X=X, f=f(X))

    print("=" * 70)
    print("ALTERNIERENDE MINIMIERUNG")
    print("=" * 70)

    print("\n⏳ Spektrum aus 20 Gradienten...")
    est = estimate_C(GradientSet(f.grad(X[:20])))
    print(f"   Eigenwerte: {np.array2string(est.eigenvalues[:4], precision=3)} …")
    print(f"   Vorgeschlagenes n: {choose_n(est.spectrum)}")

    print("\n⏳ Anpassung mit n = 2, N = 3...")
    comparison = compare_initializations(samples, 2, 3, est, random_seeds=range(5), P=10)

    print("\n📊 Finale Residuen")
    print("-" * 70)
    U_star = np.asarray(f.params["U_star"])
    for label, model in comparison.models.items():
        distance = subspace_distance(model.U, U_star)
        print(f"   {label:10s} Residuum = {model.residual_final:.4e}   Abstand zu U* = {distance:.2e}")
    print(f"\n   Median zufällig: {comparison.random_median():.4e}")

    print("\n" + "=" * 70)
    print("✨ Demo abgeschlossen!")
    print("=" * 70)


if __name__ == "__main__":
    main()

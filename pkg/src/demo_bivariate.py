"""
Demo: Quadratur-Orakel für f = 5x₁ + sin(10πx₂)
"""
import sys
from pathlib import Path

# Füge das Projektverzeichnis zum Python-Pfad hinzu
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

import numpy as np

from src.oracle import (
    angle_frame,
    bivariate_reference,
    builtin,
    check_bound,
    estimate_C_quadrature,
    gauss_hermite,
    ridge_error_R,
    sweep_angle,
)


def main():
    """Demonstriert C, R(α) und die Gradientenschranke"""
    f = builtin("bivariate")
    reference = bivariate_reference()

    print("=" * 70)
    print("BIVARIATE REFERENZFUNKTION")
    print("=" * 70)

    print("\n⏳ C per Tensorquadratur (101 Punkte)...")
    est = estimate_C_quadrature(f, 2, gauss_hermite(101))
    print(f"   C₁₁ = {est.C_hat[0, 0]:.4g}")
    print(f"   C₂₂ = {est.C_hat[1, 1]:.4g}")
    print(f"   C₂₂ analytisch = {reference['C22']:.5g} (veröffentlicht: {reference['C22_published']})")
    print(f"   Eigenwerte: {np.array2string(est.eigenvalues, precision=4)}")

    print("\n⏳ R an den Koordinatenachsen (301 Punkte)...")
    rule = gauss_hermite(301)
    for label, alpha in (("e₁", 0.0), ("e₂", np.pi / 2)):
        print(f"   R({label}) = {ridge_error_R(f, angle_frame(alpha), rule):.4g}")

    print("\n📈 Winkel-Sweep (21 Winkel, 201 Punkte)")
    print("-" * 70)
    table = sweep_angle(f, 21, 201)
    for alpha, R in zip(table.alpha, table.R):
        bar = "█" * int(round(R * 4))
        print(f"   α = {alpha:5.3f}  R = {R:8.4f}  {bar}")

    print("\n🔎 Gradientenschranke am inaktiven Unterraum")
    report = check_bound(f, 1)
    status = "✅" if report.ok else "❌"
    print(f"   {status} ‖∇R‖ = {report.grad_norm:.3e} ≤ {report.bound:.3e} (L = {report.lipschitz})")

    print("\n" + "=" * 70)
    print("✨ Demo abgeschlossen!")
    print("=" * 70)


if __name__ == "__main__":
    main()

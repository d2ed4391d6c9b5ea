"""
ridgekit
Ridge-Approximation g(Uᵀx) mit aktiven Unterräumen, Grassmann-Abstieg und Quadratur-Orakel
"""

__version__ = "0.1.0"

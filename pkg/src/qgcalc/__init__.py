"""qgcalc: exact-arithmetic engine for multiparametric quantum-group
R-matrices, bicovariant differential calculi, and quantum-plane algebras."""

__version__ = "0.1.0"

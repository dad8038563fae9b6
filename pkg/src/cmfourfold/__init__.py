"""Hodge-theoretic invariants of CM abelian varieties over products of cyclotomic fields."""

__version__ = "0.1.0"

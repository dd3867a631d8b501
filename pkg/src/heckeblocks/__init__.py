"""Exact verification of affine sl2 identities, loop group factorizations and
Hecke transport of Knizhnik-Zamolodchikov blocks."""

__version__ = "0.1.0"

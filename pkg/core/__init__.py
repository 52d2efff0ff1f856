"""Exact linear algebra, subspaces and lattice plumbing."""

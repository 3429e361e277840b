"""Conjugacy decisions and boundary dynamics for Higman-Thompson almost automorphisms."""

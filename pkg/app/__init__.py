"""Exact computer algebra for the bosonic CKP hierarchy."""

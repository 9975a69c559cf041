"""Offline molecular integral fixture generator (PySCF, ROHF/STO-3G)."""

"""Verification pipeline, reports and the ``steklov`` command line."""

from .verify import VerificationReport, chain_diagnostics, load_spec, verify

__all__ = ["VerificationReport", "chain_diagnostics", "load_spec", "verify"]

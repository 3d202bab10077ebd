"""Services package."""

from .verify import SuiteParams, VerificationService

__all__ = ["SuiteParams", "VerificationService"]

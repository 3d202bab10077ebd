"""Models package."""

from .schemas import (
    CLambdaReport,
    ErrorResponse,
    GroupElementSpec,
    HirotaReport,
    PathCountReport,
    PfHfReport,
    ReportItem,
    SkewReport,
    SuiteReport,
    TauCoefficientModel,
    TauSeriesReport,
    TermModel,
    VerifyAllReport,
    WaveReport,
)

__all__ = [
    "CLambdaReport",
    "ErrorResponse",
    "GroupElementSpec",
    "HirotaReport",
    "PathCountReport",
    "PfHfReport",
    "ReportItem",
    "SkewReport",
    "SuiteReport",
    "TauCoefficientModel",
    "TauSeriesReport",
    "TermModel",
    "VerifyAllReport",
    "WaveReport",
]

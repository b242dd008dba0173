"""Python surface of the deployopt core.

All functions take and return JSON strings matching the documents the CLI
uses; see the README for the schemas. The heavy lifting happens in the
compiled extension `_deployopt`.
"""

from _deployopt import analyze, check, emit_smtlib, estimate, plan  # noqa: F401

__all__ = ["analyze", "check", "emit_smtlib", "estimate", "plan"]

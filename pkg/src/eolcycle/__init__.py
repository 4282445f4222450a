"""Provenance knowledge graph with a rule engine and query evaluator for end-of-life route decisions."""

__version__ = "0.1.0"

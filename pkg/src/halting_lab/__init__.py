"""Partial halting decider laboratory over an enumerable toy machine language."""

__version__ = "0.1.0"

"""Emotion-cause clause extraction and per-product review summarization."""

__version__ = "0.1.0"

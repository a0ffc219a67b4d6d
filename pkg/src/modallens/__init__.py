"""modallens: explanation engine and analytics service for multimodal
sentiment models — Shapley attribution, interaction typing, template mining,
projection, and a read-only query API."""

__version__ = "0.1.0"

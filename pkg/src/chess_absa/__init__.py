"""Aspect-based sentiment pipeline for chess moves described in teaching
text: entity/predicate extraction, annotation tooling, verb-action
clustering, knowledge-infused sentiment classification, and UCI engine
cross-checking."""

__version__ = "0.1.0"

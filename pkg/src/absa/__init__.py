"""Aspect-based sentiment analysis with lexicon correction and explanations."""

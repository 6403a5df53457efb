"""Embedding advice strings into sampling distributions, and the bounds that
say how many samples it takes to read them back (or to tell two sampling
states apart)."""

__version__ = "0.1.0"

"""Reference implementation of the ATR language family and its bound extractors."""

__version__ = "0.1.0"

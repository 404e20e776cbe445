"""Pickup and delivery routing by tours over lifted requests."""

__version__ = "0.1.0"

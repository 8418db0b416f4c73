"""Time- and power-partitioning transmission for the overloaded MISO broadcast channel."""

__version__ = "0.1.0"

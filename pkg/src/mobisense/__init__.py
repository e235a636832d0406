"""Telemetry-study runtime: declarative protocols, simulated probes, pluggable sinks."""

__version__ = "0.1.0"

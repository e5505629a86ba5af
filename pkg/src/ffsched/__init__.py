"""Co-simulation of embedded control under CPU contention.

Periodic control tasks share one CPU under fixed-priority preemptive
scheduling while their sampling periods are rescaled online, either by a
fuzzy feedback scheduler driven by measured utilization, by an omniscient
ideal rescaler, or not at all (open loop).
"""

__version__ = "0.1.0"

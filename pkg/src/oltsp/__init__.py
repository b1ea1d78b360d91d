"""Randomized online TSP on the line: simulation, offline optima and competitive-ratio evaluation."""

from .model import HullTimeline, Instance, Request, Segment, Trajectory
from .offline import Mode, opt_fair, opt_general
from .scalar import Surd, fmt, parse, sqrt

__all__ = [
    "HullTimeline",
    "Instance",
    "Request",
    "Segment",
    "Trajectory",
    "Mode",
    "opt_fair",
    "opt_general",
    "Surd",
    "fmt",
    "parse",
    "sqrt",
]

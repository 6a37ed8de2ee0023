"""Elitist Ant System for job-shop scheduling, with an exact oracle and benchmark harness."""

from .colony import BestResult, ColonyParams, run
from .instance import JobShopInstance, load_instance, lookup_bks, parse_instance
from .schedule import Schedule, build_schedule, render_gantt, validate

__all__ = [
    "BestResult",
    "ColonyParams",
    "JobShopInstance",
    "Schedule",
    "build_schedule",
    "load_instance",
    "lookup_bks",
    "parse_instance",
    "render_gantt",
    "run",
    "validate",
]

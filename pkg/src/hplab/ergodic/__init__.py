"""Measure-preserving systems, multiple ergodic averages and the flow lift."""

from .averages import (
    SCHEMES,
    AverageSeries,
    Checkpoint,
    GapSweep,
    Iterate,
    NilReport,
    RecurrenceReport,
    ShortIntervalReport,
    comparison_gap,
    comparison_gap_max,
    l2_distance,
    multiple_average,
    nil_orbit_equidistribution,
    recurrence_experiment,
    scheme_samples,
    short_interval_average,
)
from .fixedpoint import FixedReal
from .flow import FlowExtension, FlowPoint, LiftCheck, identity_check, lift_to_flow, non_concentration
from .observables import Observable, TrigPoly, character, constant, coordinate_character, smoothed_arc
from .sets import ArcSet, BoxSet, intersection_measure
from .systems import ErgodicSystem, HeisenbergOrbit, TorusRotation, UnipotentAffine, sample_grid

__all__ = [name for name in dir() if not name.startswith("_")]

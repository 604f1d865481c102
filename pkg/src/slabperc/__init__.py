"""Bernoulli bond percolation on slabs Z^2 x {0..k-1}^(d-2): crossing events,
estimators, exact oracles and inequality checks."""

from .connectivity import backbone, cluster, connected, dist1, min_sa_path, outer_vertex_boundary
from .estimation import Estimate, mc_estimate, nested_estimate, product_estimate, sweep, wilson
from .events import EventSpec, Truncation, ev_lr, ev_step5, f_value, g_value
from .geometry import Region, SegmentSpec, SlabSpec, lift, reflect2, shadow
from .harness import (CheckReport, check_glue, check_recursive, check_shortlong, check_wide, constants,
                      trace_proof)
from .oracle import CapExceeded, enumerate_simple_paths, exact_prob, fkg_check
from .sampling import Config, derive_seed, sample

__all__ = [
    "CapExceeded", "CheckReport", "Config", "Estimate", "EventSpec", "Region", "SegmentSpec", "SlabSpec",
    "Truncation", "backbone", "check_glue", "check_recursive", "check_shortlong", "check_wide", "cluster",
    "connected", "constants", "derive_seed", "dist1", "enumerate_simple_paths", "ev_lr", "ev_step5",
    "exact_prob", "f_value", "fkg_check", "g_value", "lift", "mc_estimate", "min_sa_path", "nested_estimate",
    "outer_vertex_boundary", "product_estimate", "reflect2", "sample", "shadow", "sweep", "trace_proof", "wilson",
]

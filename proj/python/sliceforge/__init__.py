"""Sliceform papercraft generation from labelled volumes.

The native functions exchange JSON text. The wrappers here accept and return
plain dicts, and pass numpy arrays (indexed ``[z, y, x]``) straight through.
"""

import json as _json

from . import _core
from ._core import InfeasibleError, IoError, SliceforgeError, ValidationError

__all__ = [
    "SliceforgeError",
    "ValidationError",
    "InfeasibleError",
    "IoError",
    "version",
    "build",
    "slice_labels",
    "slice_volume",
    "hinge",
    "order",
    "pack",
    "solve_order",
    "verify_plan",
    "to_lp",
]

__version__ = _core.version()


def _dump(obj):
    return obj if isinstance(obj, str) else _json.dumps(obj)


def version():
    return _core.version()


def build(config):
    """Run the whole pipeline. ``config`` uses the keys of the JSON config file."""
    return _json.loads(_core.build(_dump(config)))


def slice_labels(labels, level=3, orientations=("yz", "xz"), spacing=(1.0, 1.0, 1.0)):
    return _json.loads(_core.slice_labels(labels, level, tuple(orientations), tuple(spacing)))


def slice_volume(scalars, tf, level=3, orientations=("yz", "xz"), spacing=(1.0, 1.0, 1.0)):
    return _json.loads(
        _core.slice_volume(scalars, _dump(tf), level, tuple(orientations), tuple(spacing))
    )


def hinge(slices):
    return _json.loads(_core.hinge(_dump(slices)))


def order(hinges, exact_threshold=16):
    return _json.loads(_core.order(_dump(hinges), exact_threshold))


def pack(hinges, plan, page="A4", sheets=1, slot_width_mm=1.0, k_max=6, seed=0):
    return _json.loads(
        _core.pack(_dump(hinges), _dump(plan), page, sheets, slot_width_mm, k_max, seed)
    )


def solve_order(problem, exact_threshold=16):
    """Optimal hinge order for {hinge_ids, backbone, triples, w_distance}."""
    return _json.loads(_core.solve_order(_dump(problem), exact_threshold))


def verify_plan(hinge_order, problem):
    return _json.loads(_core.verify_plan(list(hinge_order), _dump(problem)))


def to_lp(problem):
    return _core.to_lp(_dump(problem))

"""Named parameter bundles.

"default" is the standard benchmark database and workload. "dstc-club"
narrows the database to two classes of constant-size objects with three
same-typed references drawn inside a locality zone around each object,
the shape used to emulate the older single-traversal clustering benchmark.
"""
from __future__ import annotations

from .errors import ParameterError

PRESETS: dict[str, dict[str, str]] = {
    # every parameter already defaults to the standard values
    "default": {},
    "dstc-club": {
        "nc": "2",
        "maxnref": "3",
        "basesize": "50",
        "no": "20000",
        "nreft": "3",
        "infclass": "0",
        "supclass": "2",
        "dist1": "constant:3",
        "dist2": "constant:1",
        "dist3": "constant:1",
        "dist4": "special:200:0.9",
    },
}


def preset_overrides(name: str) -> dict[str, str]:
    try:
        return dict(PRESETS[name])
    except KeyError:
        raise ParameterError(
            f"unknown preset {name!r} (available: {', '.join(sorted(PRESETS))})"
        ) from None

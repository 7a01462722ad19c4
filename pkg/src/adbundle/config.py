"""Size bounds shared by all modules.

Every bound can be overridden from the environment with the ``ADBUNDLE_``
prefix, e.g. ``ADBUNDLE_ORDER_BOUND=720``.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, fields

ENV_PREFIX = "ADBUNDLE_"


@dataclass
class Bounds:
    order_bound: int = 5040
    degree_bound: int = 24
    shift_bound: int = 1 << 20
    jobs: int = 1

    @classmethod
    def from_env(cls, environ=None) -> "Bounds":
        env = os.environ if environ is None else environ
        out = cls()
        for f in fields(cls):
            key = ENV_PREFIX + f.name.upper()
            if key in env:
                setattr(out, f.name, int(env[key]))
        return out


DEFAULTS = Bounds.from_env()

"""Innovation laws for the random-coefficient recursion.

Each family maps to an integer code understood by the kernels in
:mod:`rcarstable.kernels`; both backends turn output of the same bit
generator into draws with identical formulas (``U`` is numpy's
53-bit uniform on [0, 1)):

=================  ==============================  ===================
family             draw                            parameter
=================  ==============================  ===================
rademacher         +1 / -1 from one raw random bit  none
gaussian_std       numpy ziggurat standard normal  none
uniform_sym        -h + 2h U                       half width h > 0
exponential_pos    -log(1 - U) / rate              rate > 0
point_mass         v (consumes no randomness)      value v
=================  ==============================  ===================
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidArgumentError

FAMILY_CODES = {
    "rademacher": 0,
    "gaussian_std": 1,
    "uniform_sym": 2,
    "exponential_pos": 3,
    "point_mass": 4,
}

_DEFAULT_PARAM = {
    "rademacher": 0.0,
    "gaussian_std": 0.0,
    "uniform_sym": 1.0,
    "exponential_pos": 1.0,
    "point_mass": 0.0,
}

_PARAMETRIC = {"uniform_sym", "exponential_pos", "point_mass"}


@dataclass(frozen=True)
class InnovationSpec:
    """Distribution of the i.i.d. innovations ``eps_k``.

    ``param`` is the half width for ``uniform_sym``, the rate for
    ``exponential_pos`` and the atom for ``point_mass``; other families
    ignore it.
    """

    family: str
    param: float = 0.0

    def __post_init__(self):
        if self.family not in FAMILY_CODES:
            raise InvalidArgumentError(
                f"unknown innovation family {self.family!r}; "
                f"expected one of {sorted(FAMILY_CODES)}")
        param = float(self.param)
        if self.family not in _PARAMETRIC:
            param = 0.0
        elif self.family in ("uniform_sym", "exponential_pos") and not param > 0:
            raise InvalidArgumentError(
                f"{self.family} needs a positive parameter, got {self.param}")
        object.__setattr__(self, "param", param)

    @classmethod
    def parse(cls, text: str) -> "InnovationSpec":
        """Build a spec from ``family`` or ``family:param`` text."""
        name, _, value = text.strip().partition(":")
        if not value:
            return cls(name, _DEFAULT_PARAM.get(name, 0.0))
        try:
            return cls(name, float(value))
        except ValueError as exc:
            raise InvalidArgumentError(f"bad innovation parameter in {text!r}") from exc

    @property
    def code(self) -> int:
        return FAMILY_CODES[self.family]

    @property
    def symmetric(self) -> bool:
        if self.family == "point_mass":
            return self.param == 0.0
        return self.family in ("rademacher", "gaussian_std", "uniform_sym")

    @property
    def degenerate(self) -> bool:
        """True when every draw is exactly zero."""
        return self.family == "point_mass" and self.param == 0.0

    @property
    def nonnegative(self) -> bool:
        return self.family == "exponential_pos" or (
            self.family == "point_mass" and self.param >= 0.0)

    def label(self) -> str:
        if self.family in _PARAMETRIC:
            return f"{self.family}:{self.param!r}"
        return self.family

    def to_dict(self) -> dict:
        return {"family": self.family, "param": self.param}

    @classmethod
    def from_dict(cls, data) -> "InnovationSpec":
        if isinstance(data, str):
            return cls.parse(data)
        return cls(data["family"], data.get("param", _DEFAULT_PARAM.get(data["family"], 0.0)))

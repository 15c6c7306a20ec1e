"""Rules producing real sequences ``λ_0, λ_1, ...``.

Three kinds cover every sequence the experiments need:

``cyclic``  repeats a finite pattern (constants, ``(-1)^n``, ``0.5, 1, 2, ...``);
``power``   ``scale * (n + offset) ** exponent``;
``prefix``  a stored finite prefix, which cannot be evaluated past its end.

The text form (used by the CLI) is ``const:V``, ``cyclic:V1,V2,...``,
``power:EXP[:SCALE[:OFFSET]]`` or ``prefix:V1,V2,...``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import check_int
from .exceptions import ValidationError

_KINDS = ("cyclic", "power", "prefix")


@dataclass(frozen=True)
class SequenceSpec:
    kind: str
    params: tuple

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValidationError("sequence", f"unknown kind {self.kind!r}")
        params = tuple(float(x) for x in self.params)
        if not params or not np.all(np.isfinite(params)):
            raise ValidationError("sequence", "parameters must be finite and non-empty")
        if self.kind == "power" and len(params) != 3:
            raise ValidationError("sequence", "power takes (exponent, scale, offset)")
        object.__setattr__(self, "params", params)

    @classmethod
    def constant(cls, value):
        return cls("cyclic", (value,))

    @classmethod
    def cyclic(cls, pattern):
        return cls("cyclic", tuple(pattern))

    @classmethod
    def power(cls, exponent, scale=1.0, offset=1.0):
        return cls("power", (exponent, scale, offset))

    @classmethod
    def prefix(cls, values):
        return cls("prefix", tuple(values))

    @classmethod
    def parse(cls, text):
        kind, _, rest = text.strip().partition(":")
        try:
            if kind == "const":
                return cls.constant(float(rest))
            if kind in ("cyclic", "prefix"):
                return cls(kind, tuple(float(x) for x in rest.split(",")))
            if kind == "power":
                parts = [float(x) for x in rest.split(":")]
                return cls.power(*parts)
        except (TypeError, ValueError) as exc:
            raise ValidationError("sequence", f"cannot parse {text!r}: {exc}") from None
        raise ValidationError("sequence", f"cannot parse {text!r}")

    @property
    def available(self):
        """Largest index that can be evaluated (``None`` for unbounded rules)."""
        return len(self.params) - 1 if self.kind == "prefix" else None

    def values(self, N, start=0):
        """Entries ``start..N`` as a float array."""
        N = check_int("N", N, minimum=-1)
        n = np.arange(start, N + 1)
        if self.kind == "cyclic":
            out = np.asarray(self.params)[n % len(self.params)]
        elif self.kind == "power":
            exponent, scale, offset = self.params
            with np.errstate(divide="ignore", invalid="ignore"):
                out = scale * (n + offset) ** exponent
        else:
            if N > self.available:
                raise ValidationError("N", f"prefix sequence only has {len(self.params)} entries")
            out = np.asarray(self.params)[n]
        if not np.all(np.isfinite(out)):
            raise ValidationError("sequence", f"{self.describe()} is not finite on {start}..{N}")
        return out.astype(float)

    def __call__(self, n):
        return float(self.values(n, start=n)[0])

    def describe(self):
        if self.kind == "cyclic" and len(self.params) == 1:
            return f"const:{self.params[0]:g}"
        if self.kind == "power":
            return "power:" + ":".join(f"{x:g}" for x in self.params)
        if self.kind == "prefix" and len(self.params) > 8:
            return f"prefix[{len(self.params)}]"
        return f"{self.kind}:" + ",".join(f"{x:g}" for x in self.params)

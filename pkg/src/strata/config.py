"""Run-wide settings shared by the library and the command line tool."""

from dataclasses import dataclass, field, fields, replace
from fractions import Fraction

from .layers import ComplexityBudget


def _parse_fraction(text: str) -> Fraction:
    text = text.strip()
    if "/" in text:
        num, den = text.split("/", 1)
        return Fraction(int(num), int(den))
    return Fraction(text)


@dataclass(frozen=True)
class Config:
    """Defaults every command starts from; overridable via key=value pairs."""

    precision_bits: int = 32
    tolerance: Fraction = field(default_factory=lambda: Fraction(1, 2**20))
    zero_test_bits: int = 256
    max_dyadic_exponent: int = 8
    max_poly_degree: int = 2
    max_coeff_height: int = 4
    max_series_terms: int = 64
    seed: int = 0

    @property
    def budget(self) -> ComplexityBudget:
        return ComplexityBudget(
            max_dyadic_exponent=self.max_dyadic_exponent,
            max_poly_degree=self.max_poly_degree,
            max_coeff_height=self.max_coeff_height,
            max_series_terms=self.max_series_terms,
        )

    def with_overrides(self, pairs: dict[str, str]) -> "Config":
        """Apply string-valued overrides, e.g. from --config key=value flags."""
        known = {f.name: f.type for f in fields(self)}
        updates = {}
        for key, raw in pairs.items():
            if key not in known:
                raise KeyError(f"unknown config key: {key!r}")
            if key == "tolerance":
                updates[key] = _parse_fraction(raw)
            else:
                updates[key] = int(raw)
        return replace(self, **updates)


def parse_overrides(items: list[str]) -> dict[str, str]:
    """Turn ['a=1', 'b=2/3'] into a dict, complaining about malformed items."""
    out: dict[str, str] = {}
    for item in items:
        if "=" not in item:
            raise ValueError(f"expected key=value, got {item!r}")
        key, value = item.split("=", 1)
        out[key.strip()] = value.strip()
    return out

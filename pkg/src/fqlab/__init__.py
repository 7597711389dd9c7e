"""Exact finite-field incidence geometry: fields, flats, moments, witnesses, designs, Sidon sets."""

from .field import FieldSpec, field_of_order, make_field
from .geometry import Flat, PointSet

__all__ = ["FieldSpec", "Flat", "PointSet", "field_of_order", "make_field"]
__version__ = "0.1.0"

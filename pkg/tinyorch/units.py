"""
Engineering units of device profile quantities.

Numeric fields of a device profile may be written either as plain numbers
(already in the field's canonical units) or as text with engineering units,
such as ``"442 kB"``, ``"50 MHz"``, ``"1 Mbit/s"``, or ``"100 us"``.  Text is
converted with |pint|.  Prefixes are decimal (``kB`` is 1000 bytes) unless a
binary prefix is written (``KiB``).

.. autosummary::

    ~CANONICAL_UNITS
    ~to_canonical
    ~to_canonical_int
"""

import logging
import numbers

import pint

logger = logging.getLogger(__name__)

CANONICAL_UNITS = {
    "bytes": "byte",
    "frequency": "Hz",
    "bandwidth": "bit / second",
    "duration": "ns",
    "slope": "ns / byte",
    "power": "W",
    "energy_per_byte": "nJ / byte",
}
"""Canonical engineering units, by kind of quantity."""


def to_canonical(value, kind: str) -> float:
    """
    Convert ``value`` to the canonical units of ``kind``.

    .. rubric:: Parameters

    * ``value`` (number or str): Plain number (already canonical) or text
      with engineering units.
    * ``kind`` (str): One of the keys of :data:`CANONICAL_UNITS`.

    Raises ValueError when the text cannot be parsed or has the wrong
    dimensions.
    """
    units = CANONICAL_UNITS[kind]
    if isinstance(value, bool):
        raise ValueError(f"Expected a quantity in {units!r}, received {value!r}.")
    if isinstance(value, numbers.Number):
        return value
    if not isinstance(value, str):
        raise ValueError(f"Expected a quantity in {units!r}, received {value!r}.")
    try:
        quantity = pint.Quantity(value)
        magnitude = quantity.to(units).magnitude
    except (pint.errors.PintError, AttributeError, TypeError, ValueError) as exc:
        raise ValueError(f"Cannot convert {value!r} to {units!r}: {exc}") from exc
    logger.debug("value=%r kind=%r magnitude=%r", value, kind, magnitude)
    return magnitude


def to_canonical_int(value, kind: str) -> int:
    """Like :func:`to_canonical`, rounded to the nearest integer."""
    magnitude = to_canonical(value, kind)
    if isinstance(magnitude, int):
        return magnitude
    if magnitude != magnitude or magnitude in (float("inf"), float("-inf")):
        raise ValueError(f"Quantity {value!r} is not finite.")
    return int(round(magnitude))

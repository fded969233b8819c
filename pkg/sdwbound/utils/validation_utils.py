"""
Validation utilities for sdwbound
Checks physical parameters and user-supplied lists before they reach the solvers
"""

import math
import numbers

from ..errors import ParameterDomainError

SUPPORTED_RS = (0.005, 6.0)


def _is_number(value):
    return isinstance(value, numbers.Real) and not isinstance(value, bool) and math.isfinite(value)


def validate_deformation(r_s, eps, h):
    """
    Validate the (r_s, eps, h) triple of a Fermi-surface deformation

    Args:
        r_s (float): Density parameter, must be > 0
        eps (float): Cap-truncation depth, must lie in (0, 1)
        h (float): Relative cylinder height, must lie in [0, 1]

    Returns:
        tuple: (is_valid: bool, error_message: str)
    """
    for name, value in (('r_s', r_s), ('eps', eps), ('h', h)):
        if not _is_number(value):
            return False, f"{name} must be a finite number, got {value!r}"

    if r_s <= 0:
        return False, f"r_s must be positive, got {r_s}"

    if not 0 < eps < 1:
        return False, f"eps must lie in (0, 1), got {eps}"

    if not 0 <= h <= 1:
        return False, f"h must lie in [0, 1], got {h}"

    return True, ""


def validate_supported_rs(r_s):
    """
    Check that r_s lies in the range the optimizer supports

    Args:
        r_s (float): Density parameter

    Returns:
        tuple: (is_valid: bool, error_message: str)
    """
    low, high = SUPPORTED_RS
    if not _is_number(r_s) or not low <= r_s <= high:
        return False, f"r_s must lie in [{low}, {high}], got {r_s!r}"
    return True, ""


def validate_positive(name, value, upper=None):
    """
    Check a strictly positive setting, optionally bounded above (exclusive)

    Returns:
        tuple: (is_valid: bool, error_message: str)
    """
    if not _is_number(value) or value <= 0:
        return False, f"{name} must be positive, got {value!r}"
    if upper is not None and value >= upper:
        return False, f"{name} must be below {upper}, got {value!r}"
    return True, ""


def require(check):
    """
    Raise ParameterDomainError if a (is_valid, message) check failed

    Args:
        check (tuple): Result of one of the validate_* helpers
    """
    is_valid, message = check
    if not is_valid:
        raise ParameterDomainError(message)


def parse_float_list(text, name='list'):
    """
    Parse a comma separated list of floats such as "0.01,0.1,1"

    Args:
        text (str): Raw user input
        name (str): Name used in error messages

    Returns:
        list: Parsed floats, in input order
    """
    if text is None:
        raise ParameterDomainError(f"{name} cannot be empty")

    items = [item.strip() for item in str(text).split(',') if item.strip()]
    if not items:
        raise ParameterDomainError(f"{name} cannot be empty")

    values = []
    for item in items:
        try:
            value = float(item)
        except ValueError:
            raise ParameterDomainError(f"{name}: cannot parse {item!r} as a number")
        if not math.isfinite(value):
            raise ParameterDomainError(f"{name}: {item!r} is not finite")
        values.append(value)
    return values


def parse_grid_spec(text, name='grid'):
    """
    Parse either a float list or a "start:stop:num" linear grid

    Args:
        text (str): e.g. "0:1:21" or "0,0.25,0.5"
        name (str): Name used in error messages

    Returns:
        list: Grid values
    """
    if text is not None and ':' in str(text):
        parts = str(text).split(':')
        if len(parts) != 3:
            raise ParameterDomainError(f"{name} must look like start:stop:num, got {text!r}")
        start, stop = parse_float_list(parts[0], name)[0], parse_float_list(parts[1], name)[0]
        try:
            num = int(parts[2])
        except ValueError:
            raise ParameterDomainError(f"{name}: point count {parts[2]!r} is not an integer")
        if num < 2:
            raise ParameterDomainError(f"{name} needs at least two points")
        step = (stop - start) / (num - 1)
        return [start + i * step for i in range(num - 1)] + [stop]
    return parse_float_list(text, name)

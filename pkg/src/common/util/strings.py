import math


def snake_to_title(s: str) -> str:
    """Convert snake_case string to Title Case."""
    return s.replace("_", " ").title()


def kebab_to_snake(s: str) -> str:
    return s.replace("-", "_")


def format_fixed(value: float, decimals: int = 4) -> str:
    """Fixed-point text with the given number of decimals."""
    return f"{value:.{decimals}f}"


def format_mantissa(value: float, digits: int = 4, decimals: int = 2) -> str:
    """Scientific text with a ``digits``-digit integer mantissa, e.g. 0.00193587 -> "1935.87e-6"."""
    if value == 0 or not math.isfinite(value):
        return str(value)
    exponent = math.floor(math.log10(abs(value))) - (digits - 1)
    mantissa = value / 10.0**exponent
    if round(abs(mantissa), decimals) >= 10**digits:
        exponent += 1
        mantissa /= 10
    return f"{mantissa:.{decimals}f}e{exponent}"


def format_complex(value: complex, decimals: int = 4) -> str:
    if value.imag == 0:
        return format_fixed(value.real, decimals)
    sign = "+" if value.imag >= 0 else "-"
    return f"{value.real:.{decimals}f}{sign}{abs(value.imag):.{decimals}f}i"

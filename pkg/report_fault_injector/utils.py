"""Small formatting and summary helpers shared by the pipeline stages."""

import statistics
from typing import Dict, List, Optional, Sequence, Union


def safe_divide(numerator: Union[int, float], denominator: Union[int, float], default: float = 0.0) -> float:
    """Safe division that handles division by zero returning default value."""
    if denominator == 0:
        return default
    return numerator / denominator


def create_summary_stats(data: Sequence[Optional[Union[int, float]]]) -> Dict[str, float]:
    """Count, min, max, mean, median and sum of the numeric entries of ``data``."""
    clean_data: List[float] = [x for x in data if x is not None and isinstance(x, (int, float))]

    if not clean_data:
        return {"count": 0, "min": 0.0, "max": 0.0, "avg": 0.0, "median": 0.0, "sum": 0.0}

    return {
        "count": len(clean_data),
        "min": min(clean_data),
        "max": max(clean_data),
        "avg": sum(clean_data) / len(clean_data),
        "median": statistics.median(clean_data),
        "sum": sum(clean_data),
    }


def format_number(number: Optional[Union[int, float, str]], decimals: int = 3) -> str:
    """Format a metric for tables; ``None`` and non-numbers pass through as text."""
    if number is None:
        return "N/A"
    if isinstance(number, str):
        return number
    if isinstance(number, int):
        return str(number)
    return f"{number:.{decimals}f}"

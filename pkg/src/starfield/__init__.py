"""starfield: contraction star products and operator orderings for free scalar fields."""

__version__ = "0.1.0"

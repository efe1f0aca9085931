"""Equal-fraction cuts of several measures."""
__version__ = "0.1.0"

"""StatusQuo: status-quo policy gradients and GameDistill on social dilemmas."""

__version__ = "0.1.0"

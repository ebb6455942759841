"""LoCI: causal discovery by logical inference, with an FCI reference"""

__version__ = "0.1.0"

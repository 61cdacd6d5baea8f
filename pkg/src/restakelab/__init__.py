"""Liquid-restaking revenue analytics and depeg-liquidation stress engine."""

__version__ = "0.1.0"

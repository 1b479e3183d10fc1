"""
Polyflow - complexity certificates and numerical checks for multiparameter
polynomial averages along flows.

This package provides:
- Exact polynomial families over Q[pi, 1/pi]
- Flow average complexity bounds with replayable certificates
- Torus rotation and Heisenberg nilflow simulation
- Host-Kra seminorms on torus rotations
- Interval-set density and syndeticity scans
"""

__version__ = "1.0.0"
__author__ = "Polyflow Project"
__description__ = "Complexity bounds and flow-average experiments for polynomial families"

"""quadlab: internal distances, conformal moduli, rectilinear approximation
and inscribed disks for marked quadrilaterals."""

__version__ = "0.1.0"

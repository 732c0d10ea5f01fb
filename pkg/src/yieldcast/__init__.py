"""Crop-yield hindcasting from dekadal satellite and weather series.

The package covers the full workflow: season timing from NDVI, monthly
feature engineering, nested leave-one-year-out model selection over a
configuration lattice, benchmark models, accuracy metrics at provincial
and national level, and Bayesian practical-significance comparison.
"""

__version__ = "0.1.0"

"""Dashboard backend: data ingestion, MLN community analysis, visualization cache."""

__version__ = "0.1.0"

"""Two-player image-labelling dialogue game: domain model, server and corpus tools."""

__version__ = "0.1.0"

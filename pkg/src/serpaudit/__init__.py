"""Crowdsourced audit platform for advertising on search result pages."""

__version__ = "0.1.0"

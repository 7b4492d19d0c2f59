"""Inter-operator dynamic spectrum sharing simulator and analysis toolkit."""

__version__ = "0.1.0"

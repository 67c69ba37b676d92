"""Age-of-information game for an RIS-assisted low-altitude ISAC network under a channel-access attack."""

__version__ = "0.1.0"

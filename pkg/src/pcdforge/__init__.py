"""pcdforge: performance-conditioned diversity GANs on 2D benchmarks."""

__version__ = "0.1.0"

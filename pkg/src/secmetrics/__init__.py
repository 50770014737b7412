"""Short-blocklength secrecy metrics for concatenated wiretap coding chains."""

__version__ = "0.1.0"

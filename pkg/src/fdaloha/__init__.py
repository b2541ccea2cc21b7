"""Throughput analysis of unslotted Aloha networks mixing half- and full-duplex links."""

__version__ = "0.1.0"

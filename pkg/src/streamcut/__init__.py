"""Verification harness for streaming MAX-CUT lower-bound constructions."""

__version__ = "0.1.0"

#: Build tag written into every CSV row.
BUILD_TAG = f"streamcut-{__version__}"

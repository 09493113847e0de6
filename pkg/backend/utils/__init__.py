"""
Utilities: config files, exporters and random streams.
"""

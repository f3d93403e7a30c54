"""
Common library for the fingerspelling recognizer.
Provides logging, configuration and error types shared by every package.
"""

__version__ = "1.0.0"

"""
gysin - exact homological algebra for S¹-equivariant Gysin sequences
"""
import logging

__version__ = "0.1.0"

logging.getLogger(__name__).addHandler(logging.NullHandler())

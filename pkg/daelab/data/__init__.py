"""Synthetic datasets."""

from .mixture import *

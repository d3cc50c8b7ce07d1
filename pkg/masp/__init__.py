"""
Modular ASP toolkit

Parses nested modular logic programs, compiles them to second-order
stable-model formulas, enumerates answer sets over finite Herbrand domains,
and checks contextual strong equivalence between modules.
"""

__version__ = "1.0.0"
__author__ = "masp developers"

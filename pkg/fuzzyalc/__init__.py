"""
Exact-arithmetic toolkit for fuzzy ALC under the Zadeh, Lukasiewicz,
Product and Goedel operator families
"""

from fuzzyalc.config import TOOL_VERSION as __version__

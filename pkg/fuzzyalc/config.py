"""
Configuration settings for the fuzzy ALC toolkit
"""

import os

TOOL_VERSION = "1.0.0"

# Paths
BASE_DIR = os.path.dirname(os.path.abspath(__file__))
PROJECT_DIR = os.path.dirname(BASE_DIR)
FIXTURES_DIR = os.path.join(PROJECT_DIR, "fixtures")
OUTPUT_DIR = os.path.join(PROJECT_DIR, "output")

# Logging settings
LOG_LEVEL = "INFO"
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

# Model search defaults
DEFAULT_MAX_SIZE = 2
DEFAULT_DENOMINATORS = (1, 2)
DEFAULT_SEARCH_WORKERS = 1
PROGRESS_EVERY = 100000  # candidates between progress lines

# Canonical model defaults
DEFAULT_PREFIX_DEPTH = 64
DEFAULT_TOLERANCE = 16
APPROXIMATION_DIGITS = 60

# Fresh names carry this marker; user input may not contain it
FRESH_MARKER = "'"
GADGET_ATOM = "A'"

# Output settings
JSON_INDENT = 2
REPORT_ROW_LIMIT = 40

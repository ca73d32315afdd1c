"""
Situation Kernel Configuration

This file contains all configuration settings for the interpreter.
Update these values as needed; the CLI flags --depth and --max-firings
override the chaining limits for a single run.
"""

# Name of the distinguished background situation
WORLD_SITUATION = "w"

# Concrete-syntax sigils
TYPE_SIGIL = "~"
VARIABLE_SIGIL = "?"
NULL_TOKEN = "-"

# Backward proof depth limit (rule applications along one branch)
DEFAULT_DEPTH_LIMIT = 32

# Forward chaining cap (consequent assertions attempted per chaining run)
DEFAULT_MAX_FIRINGS = 10_000

# Default system parameters, one per basic kind
DEFAULT_SYSTEM_PARAMETERS = {
    "IND1": "IND",
    "TIM1": "TIM",
    "LOC1": "LOC",
    "REL1": "REL",
    "POL1": "POL",
    "INF1": "INF",
    "PAR1": "PAR",
    "SIT1": "SIT",
    "TYP1": "TYP",
}

# REPL prompts per mode
PROMPTS = {
    "assert": "I> ",
    "query": "Q> ",
}

# Exit codes for batch mode
EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NO_SOLUTIONS = 2

# First lines of every saved knowledge base
KB_PREAMBLE = [
    "; situation kernel knowledge base",
    f"; background situation: {WORLD_SITUATION}",
]

# Situations created by forward chaining for unbound consequent situations
FRESH_SITUATION_TEMPLATE = "{constraint}-{index}"

# Report file written by run_batch.sh when no name is given
DEFAULT_REPORT_FILE = "Situation_Fact_Report.xlsx"

# Width of the banner lines printed by the CLI
BANNER_WIDTH = 80

"""Resume analysis and candidate ranking toolkit.

Pipeline: layout documents -> section segmentation and classification ->
entity extraction -> candidate profiles -> skill embedding and scoring ->
ranked, filterable candidate pools served over HTTP and the CLI.
"""

__version__ = "0.1.0"

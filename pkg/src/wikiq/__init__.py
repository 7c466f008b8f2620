"""wikiq: wiki article quality scoring from edit longevity and author
network centrality, with graded-relevance ranking evaluation."""

__version__ = "0.1.0"

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from groundedqa import KnowledgeGraph


@pytest.fixture
def small_kg():
    return KnowledgeGraph(
        triples=[
            ("A", "r", "B"),
            ("B", "r", "C"),
            ("C", "r", "A"),
            ("A", "age", "45"),
        ],
        labels=[("A", "Alan Turing"), ("B", "Abraham Lincoln"), ("C", "New York")],
    )

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from slreach.heaps import Heap, MemoryState


@pytest.fixture(scope="session")
def cycle_states():
    """The two six-cell three-variable cycles (one per direction)."""
    store = {1: 10, 2: 12, 3: 14}
    fwd = MemoryState(3, store, Heap({10: 11, 11: 12, 12: 13, 13: 14, 14: 15, 15: 10}))
    bwd = MemoryState(3, store, Heap({11: 10, 12: 11, 13: 12, 14: 13, 15: 14, 10: 15}))
    return fwd, bwd


@pytest.fixture(scope="session")
def merge_states():
    """Two five-cell states where both variable paths merge into a loop
    holding the third variable; they differ in the merge order."""
    store = {1: 20, 2: 22, 3: 24}
    a = MemoryState(3, store, Heap({20: 21, 22: 23, 21: 23, 23: 24, 24: 21}))
    b = MemoryState(3, store, Heap({20: 21, 22: 23, 21: 24, 24: 23, 23: 21}))
    return a, b

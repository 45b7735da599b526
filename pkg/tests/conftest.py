import random

import pytest

from mosaic import default_registry, from_records

# lowercase alphabetic vocabulary: body lines can never collide with serial
# digit labels or marker strings
WORDS = (
    "alpha bravo charlie delta echo foxtrot golf hotel india juliet kilo lima "
    "mike november oscar papa quebec romeo sierra tango uniform victor whiskey "
    "xray yankee zulu amber birch cedar dune ember flint grove harbor iris jade"
).split()


def synth_rows(n, seed=0, multiline=True):
    """Deterministic alpaca-style rows with varied lengths."""
    r = random.Random(seed)
    rows = []
    for _ in range(n):
        instr_words = [r.choice(WORDS) for _ in range(r.randint(3, 14))]
        instruction = " ".join(instr_words).capitalize() + "?"
        resp_words = [r.choice(WORDS) for _ in range(r.randint(4, 30))]
        if multiline and len(resp_words) > 8 and r.random() < 0.3:
            cut = r.randint(3, len(resp_words) - 3)
            response = " ".join(resp_words[:cut]) + "\n" + " ".join(resp_words[cut:])
        else:
            response = " ".join(resp_words)
        rows.append({"instruction": instruction, "input": "", "output": response + "."})
    return rows


def synth_dataset(n, seed=0, multiline=True):
    return from_records(synth_rows(n, seed=seed, multiline=multiline))


@pytest.fixture
def registry():
    return default_registry()

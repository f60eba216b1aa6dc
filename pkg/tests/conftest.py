import os

import pytest

from topictiler.parsers.lexicon_parser import load_lexicon
from topictiler.taxonomy import load_taxonomy

DATA_DIR = os.path.join(os.path.dirname(__file__), '..', 'test_data')


@pytest.fixture
def data_path():
    def resolve(name):
        return os.path.join(DATA_DIR, name)
    return resolve


@pytest.fixture
def sample_lexicon():
    return load_lexicon(os.path.join(DATA_DIR, 'lexicon.tsv'), os.path.join(DATA_DIR, 'stoplist.txt'))


@pytest.fixture
def sample_taxonomy():
    return load_taxonomy(os.path.join(DATA_DIR, 'taxonomy.tsv'))

import pytest

from gnatty import EditDistanceMetric, EuclideanMetric, generate_random_words, generate_uniform_vectors


@pytest.fixture(scope="session")
def euclid():
    return EuclideanMetric()


@pytest.fixture(scope="session")
def editm():
    return EditDistanceMetric()


@pytest.fixture(scope="session")
def vectors_300():
    return generate_uniform_vectors(300, 6, seed=1)


@pytest.fixture(scope="session")
def words_250():
    return generate_random_words(250, seed=3)

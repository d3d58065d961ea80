import numpy as np
import pytest
from src.exceptions import SpaceError
from src.space import (
    MixedSpace,
    MixedVector,
    encode_points,
    l2_distance,
    mixed_distance_vector,
    mutate_point,
    pairwise_distance_tensor,
    sample_uniform,
    validate_point,
)


@pytest.fixture
def space():
    return MixedSpace(((0.0, 10.0),), ((0.0, 1.0, 2.0, 4.0),), (3,))


class TestMixedSpace:
    """Test space construction and enumeration"""

    def test_dimension_counts(self, space):
        """Test dimension counts"""
        assert space.n_continuous == 1
        assert space.n_ordinal == 1
        assert space.n_categorical == 1
        assert space.dimension == 3
        assert not space.is_discrete

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"continuous_dims": ((1.0, 1.0),)},
            {"ordinal_dims": ((0.0, 0.0, 1.0),)},
            {"ordinal_dims": ((0.0,),)},
            {"categorical_dims": (1,)},
            {},
        ],
    )
    def test_invalid_spaces(self, kwargs):
        """Test invalid spaces"""
        with pytest.raises(SpaceError):
            MixedSpace(**kwargs)

    def test_grid_enumeration(self):
        """Test grid enumeration"""
        s = MixedSpace(ordinal_dims=((0.0, 1.0, 2.0),), categorical_dims=(2, 4))
        points = list(s.enumerate_points())

        assert s.grid_size == 24
        assert len(points) == 24
        assert len(set(points)) == 24
        assert all(validate_point(p, s) for p in points)

    def test_grid_size_needs_discrete_space(self, space):
        """Test grid size needs discrete space"""
        with pytest.raises(SpaceError):
            _ = space.grid_size

    def test_document_roundtrip(self, space):
        """Test document roundtrip"""
        assert MixedSpace.from_dict(space.to_dict()) == space

    def test_document_rejects_unknown_keys(self):
        """Test document rejects unknown keys"""
        with pytest.raises(SpaceError):
            MixedSpace.from_dict({"categorical": [2], "integer": [[0, 3]]})


class TestPoints:
    """Test sampling, validation and mutation"""

    def test_validate_point(self, space):
        """Test validate point"""
        assert validate_point(MixedVector((5.0,), (3,), (2,)), space)
        assert not validate_point(MixedVector((10.5,), (0,), (0,)), space)
        assert not validate_point(MixedVector((5.0,), (4,), (0,)), space)
        assert not validate_point(MixedVector((5.0,), (0,), (3,)), space)
        assert not validate_point(MixedVector((5.0,), (), (0,)), space)

    def test_uniform_samples_are_valid(self, space):
        """Test uniform samples are valid"""
        rng = np.random.default_rng(0)
        assert all(validate_point(sample_uniform(space, rng), space) for _ in range(200))

    def test_sampling_is_reproducible(self, space):
        """Test sampling is reproducible"""
        a = [sample_uniform(space, np.random.default_rng(5)) for _ in range(3)]
        b = [sample_uniform(space, np.random.default_rng(5)) for _ in range(3)]
        assert a == b

    def test_mutation_rate_zero_keeps_point(self, space):
        """Test mutation rate zero keeps point"""
        w = MixedVector((2.0,), (1,), (0,))
        assert mutate_point(w, space, 0.0, np.random.default_rng(1)) == w

    def test_full_mutation_stays_valid(self, space):
        """Test full mutation stays valid"""
        rng = np.random.default_rng(2)
        w = MixedVector((2.0,), (1,), (0,))
        for _ in range(100):
            assert validate_point(mutate_point(w, space, 1.0, rng), space)

    def test_uniform_sample_frequencies(self):
        """Test every level and category is drawn about equally often"""
        rng = np.random.default_rng(7)
        space = MixedSpace(((0.0, 10.0),), ((0.0, 1.0, 2.0, 4.0),), (4,))
        samples = [sample_uniform(space, rng) for _ in range(20000)]

        ordinal = np.bincount([w.ordinal_indices[0] for w in samples], minlength=4) / 20000
        categorical = np.bincount([w.categorical_indices[0] for w in samples], minlength=4) / 20000
        np.testing.assert_allclose(ordinal, 0.25, atol=0.015)
        np.testing.assert_allclose(categorical, 0.25, atol=0.015)
        assert np.mean([w.continuous_values[0] for w in samples]) == pytest.approx(5.0, abs=0.1)

    @pytest.mark.parametrize("beta, expected", [(1.0, 0.25), (0.5, 0.625)])
    def test_mutation_keep_rate(self, beta, expected):
        """Test a gene survives mutation at rate (1 - beta) + beta / categories"""
        rng = np.random.default_rng(8)
        space = MixedSpace(categorical_dims=(4,))
        w = MixedVector((), (), (2,))
        kept = np.mean([mutate_point(w, space, beta, rng) == w for _ in range(20000)])
        assert kept == pytest.approx(expected, abs=0.015)

    def test_point_document_roundtrip(self):
        """Test point document roundtrip"""
        w = MixedVector((0.1, 0.2), (1,), (0, 2))
        assert MixedVector.from_dict(w.to_dict()) == w

    def test_malformed_point_document(self):
        """Test malformed point document"""
        with pytest.raises(SpaceError):
            MixedVector.from_dict({"categorical": ["a"]})


class TestDistances:
    """Test mixed distance vectors"""

    def test_hand_computed_distance(self, space):
        """Test normalized numeric differences plus Hamming for categories"""
        w = MixedVector((2.0,), (1,), (0,))
        w2 = MixedVector((7.0,), (3,), (2,))

        np.testing.assert_allclose(mixed_distance_vector(w, w2, space), [0.5, 0.75, 1.0])
        assert l2_distance(w, w2, space) == pytest.approx(np.sqrt(0.25 + 0.5625 + 1.0))

    def test_distance_to_self_is_zero(self, space):
        """Test distance to self is zero"""
        w = MixedVector((3.3,), (2,), (1,))
        assert l2_distance(w, w, space) == 0.0

    def test_tensor_matches_pairwise(self, space):
        """Test tensor matches pairwise"""
        rng = np.random.default_rng(3)
        a = [sample_uniform(space, rng) for _ in range(4)]
        b = [sample_uniform(space, rng) for _ in range(5)]
        tensor = pairwise_distance_tensor(encode_points(a, space), encode_points(b, space))

        assert tensor.shape == (4, 5, 3)
        for i in range(4):
            for j in range(5):
                np.testing.assert_allclose(tensor[i, j], mixed_distance_vector(a[i], b[j], space))


if __name__ == "__main__":
    pytest.main([__file__, "-v"])

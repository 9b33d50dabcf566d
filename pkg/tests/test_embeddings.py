import math

import numpy as np
import pytest

from emocause.embeddings import (DEFAULT_TOP_K, EMOTIONS, EmbeddingTable,
                                 EmotionLexicon, blend_emotion_embedding,
                                 build_emotion_aware_table,
                                 build_similarity_matrix, cosine_similarity,
                                 load_emotion_lexicon, load_word_embeddings,
                                 overlay, save_word_embeddings,
                                 top_k_emotion_words)
from emocause.errors import DataError, NoEmotionalContextError

from conftest import random_table


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


class TestLoadWordEmbeddings:
    def test_minimal_file(self, tmp_path):
        p = write(tmp_path / "v.txt", "2 3\ngood 1 0 0\nbad 0 1 0\n")
        table = load_word_embeddings(p)
        assert len(table) == 2 and table.dim == 3
        assert np.array_equal(table["good"], [1.0, 0.0, 0.0])

    def test_dimension_mismatch(self, tmp_path):
        p = write(tmp_path / "v.txt", "1 3\ngood 1 0\n")
        with pytest.raises(DataError, match="expected 3"):
            load_word_embeddings(p)

    def test_malformed_header(self, tmp_path):
        p = write(tmp_path / "v.txt", "three words here\ngood 1 0\n")
        with pytest.raises(DataError, match="header"):
            load_word_embeddings(p)

    def test_duplicate_word(self, tmp_path):
        p = write(tmp_path / "v.txt", "2 2\na 1 0\na 0 1\n")
        with pytest.raises(DataError, match="duplicate"):
            load_word_embeddings(p)

    def test_zero_vector_rejected(self, tmp_path):
        p = write(tmp_path / "v.txt", "1 2\na 0 0\n")
        with pytest.raises(DataError, match="zero"):
            load_word_embeddings(p)

    def test_count_mismatch(self, tmp_path):
        p = write(tmp_path / "v.txt", "2 2\na 1 0\n")
        with pytest.raises(DataError, match="promises 2"):
            load_word_embeddings(p)

    def test_round_trip_bit_exact(self, tmp_path, rng):
        table = random_table(rng, 50, 7)
        p = tmp_path / "v.txt"
        save_word_embeddings(table, p)
        loaded = load_word_embeddings(p)
        assert loaded.words == table.words
        assert np.array_equal(loaded.vectors, table.vectors)


class TestLoadEmotionLexicon:
    def test_single_row(self, tmp_path):
        p = write(tmp_path / "l.tsv", "furious\tanger\t0.964\n")
        lex = load_emotion_lexicon(p)
        assert lex.entries["furious"] == (("anger", 0.964),)

    def test_intensity_out_of_range(self, tmp_path):
        p = write(tmp_path / "l.tsv", "calm\ttrust\t1.5\n")
        with pytest.raises(DataError, match="outside"):
            load_emotion_lexicon(p)

    def test_unknown_emotion(self, tmp_path):
        p = write(tmp_path / "l.tsv", "calm\tserenity\t0.5\n")
        with pytest.raises(DataError, match="unknown emotion"):
            load_emotion_lexicon(p)

    def test_malformed_row(self, tmp_path):
        p = write(tmp_path / "l.tsv", "calm trust 0.5\n")
        with pytest.raises(DataError, match="3 tab-separated"):
            load_emotion_lexicon(p)

    def test_multi_emotion_word(self, tmp_path):
        p = write(tmp_path / "l.tsv", "alarm\tfear\t0.8\nalarm\tsurprise\t0.6\n")
        lex = load_emotion_lexicon(p)
        assert lex.entries["alarm"] == (("fear", 0.8), ("surprise", 0.6))
        assert lex.max_intensity("alarm") == 0.8


class TestCosineSimilarity:
    def test_self_similarity(self, rng):
        v = rng.normal(size=5)
        assert cosine_similarity(v, v) == pytest.approx(1.0, abs=1e-12)

    def test_orthogonal(self):
        assert cosine_similarity([1.0, 0.0], [0.0, 1.0]) == 0.0

    def test_hand_value(self):
        # dot = 32, norms = sqrt(14) * sqrt(77)
        expected = 32.0 / math.sqrt(14.0 * 77.0)
        assert expected == pytest.approx(0.974631846, abs=1e-6)
        assert cosine_similarity([1, 2, 3], [4, 5, 6]) == pytest.approx(expected, abs=1e-12)

    def test_zero_vector_rejected(self):
        with pytest.raises(ValueError, match="zero"):
            cosine_similarity([0.0, 0.0], [1.0, 0.0])

    def test_length_mismatch(self):
        with pytest.raises(ValueError, match="mismatch"):
            cosine_similarity([1.0], [1.0, 2.0])


def lexicon_for(words, intensity=0.9):
    return EmotionLexicon({w: (("joy", intensity),) for w in words})


class TestSimilarityMatrix:
    def test_single_self_entry(self):
        table = EmbeddingTable(["joyful"], [[1.0, 2.0]])
        matrix = build_similarity_matrix(table, lexicon_for(["joyful"]))
        assert matrix.values.shape == (1, 1)
        assert matrix.values[0, 0] == pytest.approx(1.0, abs=1e-6)

    def test_empty_intersection(self, rng):
        table = random_table(rng, 3, 4)
        with pytest.raises(DataError, match="no lexicon word"):
            build_similarity_matrix(table, lexicon_for(["absent"]))

    def test_matches_elementwise_oracle(self, rng):
        table = random_table(rng, 5, 6)
        emotion_words = ["w1", "w3", "w4"]
        matrix = build_similarity_matrix(table, lexicon_for(emotion_words))
        assert matrix.emotion_words == tuple(sorted(emotion_words))
        for i, w in enumerate(table.words):
            for j, ew in enumerate(matrix.emotion_words):
                expected = cosine_similarity(table[w], table[ew])
                assert matrix.values[i, j] == pytest.approx(expected, abs=1e-12)


class TestTopK:
    def test_truncates_to_available(self):
        table = EmbeddingTable(["joyful", "other"], [[1.0, 0.0], [0.5, 0.5]])
        matrix = build_similarity_matrix(table, lexicon_for(["joyful"]))
        assert len(top_k_emotion_words(matrix, "other", k=2)) == 1

    def test_lexicographic_tie_break(self):
        # b and c share a vector, so their similarities tie exactly
        table = EmbeddingTable(["w", "a", "b", "c"],
                               [[1.0, 0.0], [0.9, 0.1], [0.5, 0.5], [0.5, 0.5]])
        matrix = build_similarity_matrix(table, lexicon_for(["a", "b", "c"]))
        top = top_k_emotion_words(matrix, "w", k=2)
        assert [w for w, _ in top] == ["a", "b"]
        assert top[0][1] > top[1][1]

    def test_self_is_top(self, rng):
        table = random_table(rng, 4, 5)
        matrix = build_similarity_matrix(table, lexicon_for(["w2", "w3"]))
        top = top_k_emotion_words(matrix, "w2", k=2)
        assert top[0][0] == "w2"
        assert top[0][1] == pytest.approx(1.0, abs=1e-6)

    def test_unknown_word(self, rng):
        table = random_table(rng, 3, 4)
        matrix = build_similarity_matrix(table, lexicon_for(["w0"]))
        with pytest.raises(KeyError):
            top_k_emotion_words(matrix, "nope", k=2)

    def test_matches_brute_force_scan(self, rng):
        # oracle: scan all emotion columns, sort by (-sim, word)
        for _ in range(100):
            n = int(rng.integers(3, 10))
            table = random_table(rng, n, 4)
            emotion_words = [f"w{i}" for i in range(int(rng.integers(1, n)))]
            matrix = build_similarity_matrix(table, lexicon_for(emotion_words))
            word = f"w{int(rng.integers(n))}"
            expected = sorted(
                ((ew, cosine_similarity(table[word], table[ew]))
                 for ew in emotion_words),
                key=lambda pair: (-pair[1], pair[0]))[:DEFAULT_TOP_K]
            got = top_k_emotion_words(matrix, word, DEFAULT_TOP_K)
            assert [w for w, _ in got] == [w for w, _ in expected]
            for (_, s_got), (_, s_exp) in zip(got, expected):
                assert s_got == pytest.approx(s_exp, abs=1e-12)


class TestBlend:
    def test_single_word_yields_its_vector(self, rng):
        table = random_table(rng, 2, 3)
        lex = lexicon_for(["w0"], intensity=0.4)
        out = blend_emotion_embedding("w1", [("w0", 0.3)], table, lex)
        assert np.allclose(out, table["w0"], atol=1e-12)

    def test_hand_weights(self):
        # sims (0.8, 0.4) with intensities (0.5, 1.0): 0.8*0.5 == 0.4*1.0,
        # so both weights are exactly 0.5 and the blend is the mean
        table = EmbeddingTable(["e1", "e2"], [[2.0, 0.0], [0.0, 4.0]])
        lex = EmotionLexicon({"e1": (("joy", 0.5),), "e2": (("fear", 1.0),)})
        out = blend_emotion_embedding("w", [("e1", 0.8), ("e2", 0.4)], table, lex)
        assert np.allclose(out, [1.0, 2.0], atol=1e-12)

    def test_all_nonpositive_sims(self, rng):
        table = random_table(rng, 2, 3)
        lex = lexicon_for(["w0", "w1"])
        with pytest.raises(NoEmotionalContextError):
            blend_emotion_embedding("x", [("w0", -0.2), ("w1", 0.0)], table, lex)

    def test_max_intensity_for_multi_emotion_word(self):
        table = EmbeddingTable(["e1", "e2"], [[1.0, 0.0], [0.0, 1.0]])
        lex = EmotionLexicon({"e1": (("fear", 0.2), ("surprise", 0.8)),
                              "e2": (("joy", 0.4),)})
        out = blend_emotion_embedding("w", [("e1", 0.5), ("e2", 0.5)], table, lex)
        # weights 0.5*0.8 and 0.5*0.4 -> 2/3, 1/3
        assert np.allclose(out, [2.0 / 3.0, 1.0 / 3.0], atol=1e-12)

    def test_weights_nonnegative_and_normalized(self, rng):
        # reconstruct the weights from the blend of basis vectors
        for _ in range(50):
            k = int(rng.integers(1, 4))
            table = EmbeddingTable([f"e{i}" for i in range(3)], np.eye(3) * 2.0)
            lex = EmotionLexicon({f"e{i}": (("joy", float(rng.uniform(0.1, 1.0))),)
                                  for i in range(3)})
            top = [(f"e{i}", float(rng.uniform(-1.0, 1.0))) for i in range(k)]
            try:
                out = blend_emotion_embedding("w", top, table, lex)
            except NoEmotionalContextError:
                assert all(s <= 0 for _, s in top)
                continue
            weights = out / 2.0
            assert np.all(weights >= 0)
            assert weights.sum() == pytest.approx(1.0, abs=1e-9)


class TestOverlay:
    def test_idempotent_on_equal(self, rng):
        v = rng.normal(size=4)
        assert np.array_equal(overlay(v, v), v)

    def test_midpoint(self):
        assert np.array_equal(overlay([2.0, 0.0], [0.0, 2.0]), [1.0, 1.0])

    def test_contraction_property(self, rng):
        for _ in range(100):
            a = rng.normal(size=6)
            b = rng.normal(size=6)
            assert (np.linalg.norm(overlay(a, b) - a)
                    <= np.linalg.norm(b - a) + 1e-12)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            overlay([1.0], [1.0, 2.0])


class TestBuildEmotionAwareTable:
    def test_pure_emotion_word_is_fixed_point(self):
        table = EmbeddingTable(["joyful"], [[1.0, 2.0]])
        aware = build_emotion_aware_table(table, lexicon_for(["joyful"]))
        assert np.allclose(aware["joyful"], table["joyful"], atol=1e-12)

    def test_vocabulary_and_dim_preserved(self, rng):
        table = random_table(rng, 8, 5)
        aware = build_emotion_aware_table(table, lexicon_for(["w0", "w3"]))
        assert aware.words == table.words
        assert aware.dim == table.dim

    def test_matches_hand_composed_oracle(self, rng):
        # toy 4-word vocab, 2 emotion words; compose the expected rows from
        # scratch with raw numpy
        vecs = rng.normal(size=(4, 3))
        table = EmbeddingTable(["a", "b", "e1", "e2"], vecs)
        lex = EmotionLexicon({"e1": (("joy", 0.7),), "e2": (("anger", 0.9),)})
        aware = build_emotion_aware_table(table, lex)

        def unit(v):
            return v / np.linalg.norm(v)

        intensities = {"e1": 0.7, "e2": 0.9}
        for i, word in enumerate(table.words):
            sims = {ew: float(unit(vecs[i]) @ unit(table[ew])) for ew in ("e1", "e2")}
            weights = {ew: max(s, 0.0) * intensities[ew] for ew, s in sims.items()}
            total = sum(weights.values())
            if total == 0.0:
                expected = vecs[i]
            else:
                blend = sum(w / total * table[ew] for ew, w in weights.items())
                expected = (vecs[i] + blend) / 2.0
            assert np.allclose(aware[word], expected, atol=1e-9), word

    def test_word_without_positive_similarity_unchanged(self):
        table = EmbeddingTable(["w", "e"], [[1.0, 0.0], [-1.0, 0.0]])
        lex = EmotionLexicon({"e": (("anger", 1.0),)})
        aware = build_emotion_aware_table(table, lex)
        assert np.array_equal(aware["w"], table["w"])

    def test_scale_invariance(self, rng):
        table = random_table(rng, 6, 4)
        lex = lexicon_for(["w1", "w4"], intensity=0.8)
        aware = build_emotion_aware_table(table, lex)
        scaled = EmbeddingTable(table.words, table.vectors * 4.0)
        aware_scaled = build_emotion_aware_table(scaled, lex)
        # powers of two scale without rounding, so this is exact
        assert np.array_equal(aware_scaled.vectors, aware.vectors * 4.0)

    def test_deterministic(self, rng):
        table = random_table(rng, 10, 4)
        lex = lexicon_for(["w2", "w5", "w7"])
        a = build_emotion_aware_table(table, lex)
        b = build_emotion_aware_table(table, lex)
        assert np.array_equal(a.vectors, b.vectors)


class TestEmbeddingTableInvariants:
    def test_rejects_duplicates(self):
        with pytest.raises(ValueError, match="duplicate"):
            EmbeddingTable(["a", "a"], [[1.0], [2.0]])

    def test_rejects_zero_rows(self):
        with pytest.raises(ValueError, match="zero"):
            EmbeddingTable(["a", "b"], [[1.0], [0.0]])

    def test_vectors_read_only(self):
        table = EmbeddingTable(["a"], [[1.0, 2.0]])
        with pytest.raises(ValueError):
            table["a"][0] = 5.0

    def test_emotion_labels_are_plutchik_eight(self):
        assert EMOTIONS == ("anger", "anticipation", "disgust", "fear",
                            "joy", "sadness", "surprise", "trust")

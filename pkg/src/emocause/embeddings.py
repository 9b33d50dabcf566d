"""Emotion-aware word embeddings.

Raw vectors come from a word2vec-style text file. An intensity lexicon names
emotion words; every vocabulary word is compared against those by cosine
similarity, its two most similar emotion words are blended (weights =
similarity * intensity, negatives clamped to zero, normalized), and the
blend is averaged with the original vector. Words with no positive
emotional similarity keep their raw vector.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError, NoEmotionalContextError

EMOTIONS = ("anger", "anticipation", "disgust", "fear", "joy",
            "sadness", "surprise", "trust")

DEFAULT_TOP_K = 2


class EmbeddingTable:
    """Immutable word -> float64 vector mapping with a fixed dimension."""

    def __init__(self, words, vectors):
        self.words = tuple(words)
        self.vectors = np.ascontiguousarray(vectors, dtype=np.float64)
        if self.vectors.ndim != 2 or self.vectors.shape[0] != len(self.words):
            raise ValueError("vectors must be one row per word")
        if self.vectors.shape[1] == 0:
            raise ValueError("embedding dimension must be positive")
        if len(set(self.words)) != len(self.words):
            raise ValueError("duplicate words in embedding table")
        zero_rows = np.flatnonzero(~np.any(self.vectors, axis=1))
        if zero_rows.size:
            raise ValueError(f"all-zero vector for word {self.words[zero_rows[0]]!r}")
        self.vectors.setflags(write=False)
        self._index = {w: i for i, w in enumerate(self.words)}

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self._index

    def __getitem__(self, word: str) -> np.ndarray:
        try:
            return self.vectors[self._index[word]]
        except KeyError:
            raise KeyError(f"unknown word {word!r}") from None

    def index_of(self, word: str) -> int:
        return self._index[word]


@dataclass(frozen=True)
class EmotionLexicon:
    """word -> ((emotion, intensity), ...); a word may carry several emotions."""

    entries: dict

    def __post_init__(self):
        for word, pairs in self.entries.items():
            for emotion, intensity in pairs:
                if emotion not in EMOTIONS:
                    raise ValueError(f"unknown emotion {emotion!r} for {word!r}")
                if not 0.0 <= intensity <= 1.0:
                    raise ValueError(f"intensity {intensity} for {word!r} outside [0, 1]")

    def __contains__(self, word: str) -> bool:
        return word in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def words(self):
        return self.entries.keys()

    def max_intensity(self, word: str) -> float:
        return max(intensity for _, intensity in self.entries[word])


@dataclass(frozen=True)
class SimilarityMatrix:
    """Cosine similarities of every vocabulary word (rows) against every
    emotion word that occurs in the vocabulary (columns, sorted)."""

    vocab_words: tuple
    emotion_words: tuple
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "_row_index",
                           {w: i for i, w in enumerate(self.vocab_words)})

    def row(self, word: str) -> np.ndarray:
        try:
            return self.values[self._row_index[word]]
        except KeyError:
            raise KeyError(f"word {word!r} not in similarity matrix") from None


def load_word_embeddings(path) -> EmbeddingTable:
    """Read a text-format embedding file: header "<count> <dim>", then one
    "<word> <floats...>" row per line."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise DataError(f"{path}: header must be '<count> <dim>'")
        try:
            count, dim = int(header[0]), int(header[1])
        except ValueError:
            raise DataError(f"{path}: header must be '<count> <dim>'") from None
        if count < 0 or dim <= 0:
            raise DataError(f"{path}: bad header values {count} {dim}")
        words = []
        rows = []
        seen = set()
        for lineno, line in enumerate(fh, start=2):
            parts = line.rstrip("\n").split(" ")
            if parts == [""]:
                continue
            word = parts[0]
            if len(parts) - 1 != dim:
                raise DataError(
                    f"{path}:{lineno}: {len(parts) - 1} values for {word!r}, expected {dim}")
            if word in seen:
                raise DataError(f"{path}:{lineno}: duplicate word {word!r}")
            seen.add(word)
            try:
                vec = np.array([float(x) for x in parts[1:]], dtype=np.float64)
            except ValueError:
                raise DataError(f"{path}:{lineno}: non-numeric value for {word!r}") from None
            if not np.any(vec):
                raise DataError(f"{path}:{lineno}: all-zero vector for {word!r}")
            words.append(word)
            rows.append(vec)
    if len(words) != count:
        raise DataError(f"{path}: header promises {count} rows, found {len(words)}")
    return EmbeddingTable(words, np.array(rows) if rows else np.empty((0, dim)))


def save_word_embeddings(table: EmbeddingTable, path) -> None:
    """Write the same text format load_word_embeddings reads. Floats are
    written with repr, so a save/load round trip is bit-exact."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{len(table)} {table.dim}\n")
        for word, vec in zip(table.words, table.vectors):
            fh.write(word + " " + " ".join(repr(float(x)) for x in vec) + "\n")


def load_emotion_lexicon(path) -> EmotionLexicon:
    """Read a headerless TSV of "<word>\\t<emotion>\\t<intensity>" rows."""
    entries: dict = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise DataError(f"{path}:{lineno}: expected 3 tab-separated fields")
            word, emotion, raw = parts
            if emotion not in EMOTIONS:
                raise DataError(f"{path}:{lineno}: unknown emotion {emotion!r}")
            try:
                intensity = float(raw)
            except ValueError:
                raise DataError(f"{path}:{lineno}: bad intensity {raw!r}") from None
            if not 0.0 <= intensity <= 1.0:
                raise DataError(f"{path}:{lineno}: intensity {intensity} outside [0, 1]")
            entries.setdefault(word, []).append((emotion, intensity))
    return EmotionLexicon({w: tuple(pairs) for w, pairs in entries.items()})


def cosine_similarity(a, b) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise ValueError("cosine similarity of a zero vector is undefined")
    return float(a @ b / (na * nb))


def build_similarity_matrix(table: EmbeddingTable, lexicon: EmotionLexicon) -> SimilarityMatrix:
    emotion_words = tuple(sorted(w for w in lexicon.words() if w in table))
    if not emotion_words:
        raise DataError("no lexicon word occurs in the vocabulary")
    norms = np.linalg.norm(table.vectors, axis=1, keepdims=True)
    unit = table.vectors / norms
    cols = np.stack([unit[table.index_of(w)] for w in emotion_words])
    return SimilarityMatrix(table.words, emotion_words, unit @ cols.T)


def top_k_emotion_words(matrix: SimilarityMatrix, word: str,
                        k: int = DEFAULT_TOP_K) -> list[tuple[str, float]]:
    """The k most similar emotion words, descending; equal similarities are
    ordered lexicographically by emotion word."""
    if k <= 0:
        raise ValueError("k must be positive")
    row = matrix.row(word)
    # columns are sorted lexicographically, so a stable sort on -sim
    # resolves ties in lexicographic order
    order = np.argsort(-row, kind="stable")[:k]
    return [(matrix.emotion_words[j], float(row[j])) for j in order]


def blend_emotion_embedding(word: str, top: list[tuple[str, float]],
                            table: EmbeddingTable, lexicon: EmotionLexicon) -> np.ndarray:
    """Weighted average of the top emotion words' vectors, weight =
    max(similarity, 0) * intensity, normalized to sum to 1. A word listed
    under several emotions contributes its maximum intensity."""
    if not top:
        raise ValueError("top emotion word list is empty")
    weights = np.array([max(sim, 0.0) * lexicon.max_intensity(ew) for ew, sim in top])
    total = weights.sum()
    if total == 0.0:
        raise NoEmotionalContextError(f"{word!r} has no positively similar emotion word")
    weights /= total
    vecs = np.stack([table[ew] for ew, _ in top])
    return weights @ vecs


def overlay(original, emotional) -> np.ndarray:
    original = np.asarray(original, dtype=np.float64)
    emotional = np.asarray(emotional, dtype=np.float64)
    if original.shape != emotional.shape:
        raise ValueError(f"length mismatch: {original.shape} vs {emotional.shape}")
    return (original + emotional) / 2.0


def build_emotion_aware_table(table: EmbeddingTable, lexicon: EmotionLexicon,
                              k: int = DEFAULT_TOP_K) -> EmbeddingTable:
    """Blend and overlay every vocabulary word; same words, same dimension.
    Words without positive emotional similarity keep their raw vector."""
    matrix = build_similarity_matrix(table, lexicon)
    out = np.array(table.vectors)
    for i, word in enumerate(table.words):
        top = top_k_emotion_words(matrix, word, k)
        try:
            emotional = blend_emotion_embedding(word, top, table, lexicon)
        except NoEmotionalContextError:
            continue
        out[i] = overlay(table.vectors[i], emotional)
    return EmbeddingTable(table.words, out)

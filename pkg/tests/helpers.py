"""Shared builders and oracles used by both the module tests and the
acceptance suite."""

import numpy as np

from emocause import cause_model, emotion_model
from emocause.clustering import cosine_distance
from emocause.embeddings import EMOTIONS, EmbeddingTable


def reference_complete_link(vectors, threshold):
    """Naive complete-linkage oracle: recompute every cluster distance from
    scratch each step; same scan order and merge convention as the
    implementation."""
    clusters = [[i] for i in range(len(vectors))]
    while len(clusters) > 1:
        best = None
        best_d = np.inf
        for i in range(len(clusters)):
            for j in range(i + 1, len(clusters)):
                d = max(cosine_distance(vectors[a], vectors[b])
                        for a in clusters[i] for b in clusters[j])
                if d < best_d:
                    best_d, best = d, (i, j)
        if best_d >= threshold:
            break
        i, j = best
        clusters[i] = sorted(clusters[i] + clusters[j])
        del clusters[j]
    return sorted(clusters, key=lambda c: c[0])


def as_partition(clusters):
    return {frozenset(c) for c in clusters}

# 10 distinct emotion words covering all 8 classes (two classes twice)
SEPARABLE_CLASSES = (0, 1, 2, 3, 4, 5, 6, 7, 0, 1)


def separable_emotion_setup(dim=10, scale=6.0):
    """(table, examples): 10 reviews, each separable by one high-signal
    emotion word; class k's words point along embedding axis k."""
    rng = np.random.default_rng(0)
    words, vecs = [], []
    for w, cls in enumerate(SEPARABLE_CLASSES):
        v = rng.normal(0.0, 0.2, dim)
        v[cls] += scale
        words.append(f"emo{w}")
        vecs.append(v)
    for extra in ("the", "item", "seems", "today"):
        words.append(extra)
        vecs.append(rng.normal(0.0, 0.8, dim))
    table = EmbeddingTable(words, np.array(vecs))
    examples = [
        emotion_model.EmotionTrainExample(
            ("the", "item", "seems", f"emo{w}", "today"), EMOTIONS[cls])
        for w, cls in enumerate(SEPARABLE_CLASSES)
    ]
    return table, examples


CAUSE_POSITIVE = (("because", "battery", "broke"),
                  ("because", "battery", "works"),
                  ("battery", "broke"),
                  ("because", "broke"),
                  ("battery", "works", "because"))
CAUSE_NEGATIVE = (("works", "fine"), ("nice", "item"), ("item", "good"),
                  ("good", "fine"), ("nice", "good", "fine"))


def separable_cause_setup(dim=10):
    """(table, examples): 10 clauses, positives marked by 'because'/'battery'."""
    words = ["because", "battery", "broke", "works", "fine", "nice", "item", "good"]
    table = EmbeddingTable(words,
                           np.random.default_rng(1).normal(size=(len(words), dim)))
    probs = cause_model.one_hot_probs("anger")
    examples = ([cause_model.CauseTrainExample(t, probs, 1) for t in CAUSE_POSITIVE]
                + [cause_model.CauseTrainExample(t, probs, 0) for t in CAUSE_NEGATIVE])
    return table, examples


def emotion_accuracy(model, examples):
    return sum(emotion_model.predict_label(model, ex.tokens) == ex.label
               for ex in examples)


def cause_accuracy(model, examples):
    return sum((cause_model.score_clause(model, ex.tokens, ex.probs) >= 0.5)
               == bool(ex.label) for ex in examples)


def run_cli_chain(workdir, seed=0, products=2, reviews=24, dim=12,
                  emotion_hidden=16, cause_hidden=24, emotion_epochs=40,
                  cause_epochs=15):
    """gen-synthetic -> build-embeddings -> train both models, all through
    the CLI, inside workdir. Returns a ready PipelineConfig."""
    from emocause.cli import main
    from emocause.pipeline import PipelineConfig

    w = str(workdir)
    paths = {name: f"{w}/{name}" for name in
             ("corpus.jsonl", "parses.conllu", "embeddings.txt", "lexicon.tsv",
              "aware.txt", "emotion.bin", "cause.bin")}
    assert main(["gen-synthetic", "--output-dir", w, "--seed", str(seed),
                 "--products", str(products), "--reviews", str(reviews),
                 "--dim", str(dim)]) == 0
    assert main(["build-embeddings", "--embeddings", paths["embeddings.txt"],
                 "--lexicon", paths["lexicon.tsv"],
                 "--output", paths["aware.txt"]]) == 0
    assert main(["train-emotion", "--corpus", paths["corpus.jsonl"],
                 "--parses", paths["parses.conllu"],
                 "--embeddings", paths["aware.txt"],
                 "--output", paths["emotion.bin"],
                 "--epochs", str(emotion_epochs),
                 "--hidden", str(emotion_hidden), "--seed", str(seed)]) == 0
    assert main(["train-cause", "--corpus", paths["corpus.jsonl"],
                 "--parses", paths["parses.conllu"],
                 "--embeddings", paths["aware.txt"],
                 "--output", paths["cause.bin"],
                 "--epochs", str(cause_epochs),
                 "--hidden", str(cause_hidden), "--seed", str(seed)]) == 0
    return PipelineConfig(
        embeddings_path=paths["embeddings.txt"],
        aware_path=paths["aware.txt"],
        lexicon_path=paths["lexicon.tsv"],
        corpus_path=paths["corpus.jsonl"],
        parses_path=paths["parses.conllu"],
        emotion_model_path=paths["emotion.bin"],
        cause_model_path=paths["cause.bin"],
        seed=seed,
    )

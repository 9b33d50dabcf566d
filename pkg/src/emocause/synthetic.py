"""Deterministic synthetic review corpus with planted structure.

Every review contains an emotion word (driving its gold label) and a cause
clause introduced by "because" whose subject is a topic marker word
("battery", "shipping", ...). Reviews are built from templates with known
dependency trees, so the emitted CoNLL-U parses are exact and the gold
cause span is recovered by running the clause extractor on them. Products
get a small fixed set of (emotion, topic) issues, so cause clauses repeat
per (product, emotion) and cluster.

Companion generators emit a random embedding file over the template
vocabulary (emotion words get per-emotion directions so the labels are
learnable) and an intensity lexicon, since real word2vec training and
lexicon curation are out of scope.
"""

from __future__ import annotations

import numpy as np

from .clauses import Sentence, Token, extract_clauses
from .corpus import GoldCause, ReviewRecord
from .embeddings import EMOTIONS, EmbeddingTable

EMOTION_WORDS = {
    "anger": ("furious", "angry", "livid"),
    "anticipation": ("eager", "hopeful", "expectant"),
    "disgust": ("disgusted", "revolted", "nauseated"),
    "fear": ("terrified", "afraid", "alarmed"),
    "joy": ("delighted", "thrilled", "overjoyed"),
    "sadness": ("miserable", "heartbroken", "gloomy"),
    "surprise": ("astonished", "stunned", "startled"),
    "trust": ("confident", "reassured", "assured"),
}

# a couple of lexicon words carry a second, weaker emotion
SECONDARY_EMOTIONS = {
    "alarmed": ("surprise", 0.45),
    "stunned": ("fear", 0.40),
}

NEGATIVE_EMOTIONS = {"anger", "disgust", "fear", "sadness"}

# topic -> (marker noun, ((verb, tail, tail_upos, tail_deprel), ...))
TOPICS = {
    "battery": (("died", "quickly"), ("drained", "overnight")),
    "screen": (("cracked", "instantly"), ("flickered", "constantly")),
    "shipping": (("arrived", "late"), ("dragged", "forever")),
    "packaging": (("tore", "easily"), ("crumpled", "badly")),
    "price": (("dropped", "suddenly"), ("doubled", "overnight")),
    "manual": (("confused", "everyone"), ("rambled", "endlessly")),
    "zipper": (("jammed", "repeatedly"), ("snapped", "immediately")),
    "motor": (("overheated", "fast"), ("stalled", "often")),
    "handle": (("loosened", "quickly"), ("wobbled", "noticeably")),
    "software": (("crashed", "daily"), ("lagged", "terribly")),
}

MARKERS = tuple(sorted(TOPICS))

SUBJECTS = (("i", "was"), ("we", "were"), ("they", "were"))

FILLER_NOUNS = ("case", "box", "color", "design", "strap")
FILLER_ADJS = ("fine", "plain", "okay", "simple", "sturdy")

_TAIL_POS = {"everyone": ("PRON", "obj")}


def _tail_info(tail: str) -> tuple[str, str]:
    return _TAIL_POS.get(tail, ("ADV", "advmod"))


def _main_sentence(subj, cop, intensifier, emo_word, topic, variant):
    """Tokens of "<subj> <cop> [really] <emo> because the <marker> <verb> <tail>"."""
    verb, tail = TOPICS[topic][variant]
    tail_upos, tail_deprel = _tail_info(tail)
    intro = [(subj, "PRON", "nsubj"), (cop, "AUX", "cop")]
    if intensifier:
        intro.append(("really", "ADV", "advmod"))
    root = len(intro)  # the emotion adjective
    verb_idx = root + 4
    rows = [(form, upos, root, deprel) for form, upos, deprel in intro]
    rows.append((emo_word, "ADJ", root, "root"))
    rows.append(("because", "SCONJ", verb_idx, "mark"))
    rows.append(("the", "DET", root + 3, "det"))
    rows.append((topic, "NOUN", verb_idx, "nsubj"))
    rows.append((verb, "VERB", root, "advcl"))
    rows.append((tail, tail_upos, verb_idx, tail_deprel))
    return rows


def _filler_sentence(rng: np.random.Generator):
    kind = rng.integers(3)
    if kind == 0:
        noun = FILLER_NOUNS[rng.integers(len(FILLER_NOUNS))]
        adj = FILLER_ADJS[rng.integers(len(FILLER_ADJS))]
        return [("the", "DET", 1, "det"), (noun, "NOUN", 3, "nsubj"),
                ("is", "AUX", 3, "cop"), (adj, "ADJ", 3, "root")]
    if kind == 1:
        return [("it", "PRON", 1, "nsubj"), ("works", "VERB", 1, "root")]
    return [("the", "DET", 1, "det"), ("box", "NOUN", 2, "nsubj"),
            ("arrived", "VERB", 2, "root"), ("today", "ADV", 2, "advmod")]


def _to_sentence(rows, review_id: str, sent_index: int) -> Sentence:
    tokens = tuple(Token(index=i, text=form, upos=upos, head=head, deprel=deprel)
                   for i, (form, upos, head, deprel) in enumerate(rows))
    return Sentence(tokens, review_id=review_id, sent_index=sent_index)


def _conllu_lines(sentence: Sentence) -> list[str]:
    lines = [f"# sent_id = {sentence.sent_id}",
             f"# text = {' '.join(sentence.texts())}"]
    for tok in sentence.tokens:
        head = 0 if tok.is_root() else tok.head + 1
        lines.append("\t".join([str(tok.index + 1), tok.text, tok.text, tok.upos,
                                "_", "_", str(head), tok.deprel, "_", "_"]))
    lines.append("")
    return lines


def generate_synthetic_corpus(seed: int, n_products: int = 50,
                              n_reviews: int = 1000):
    """Returns (records, conllu_text). Reviews are split equally across
    products (earlier products absorb any remainder)."""
    rng = np.random.default_rng([seed, 0])
    emotions = list(EMOTIONS)
    per_product = [n_reviews // n_products] * n_products
    for i in range(n_reviews % n_products):
        per_product[i] += 1

    # each product gets 2-4 planted (emotion, topic) issues
    issues = []
    for _ in range(n_products):
        count = int(rng.integers(2, 5))
        emo_picks = rng.choice(len(emotions), size=count, replace=False)
        topic_picks = rng.choice(len(MARKERS), size=count, replace=False)
        issues.append([(emotions[e], MARKERS[t])
                       for e, t in zip(emo_picks, topic_picks)])

    records = []
    conllu = []
    review_no = 0
    for prod_no in range(n_products):
        product_id = f"p{prod_no:02d}"
        for _ in range(per_product[prod_no]):
            review_id = f"r{review_no:04d}"
            review_no += 1
            emotion, topic = issues[prod_no][rng.integers(len(issues[prod_no]))]
            words = EMOTION_WORDS[emotion]
            emo_word = words[rng.integers(len(words))]
            subj, cop = SUBJECTS[rng.integers(len(SUBJECTS))]
            main_rows = _main_sentence(subj, cop, bool(rng.integers(2)),
                                       emo_word, topic, int(rng.integers(2)))
            sentence_rows = [main_rows]
            main_index = 0
            if rng.random() < 0.4:
                filler = _filler_sentence(rng)
                if rng.random() < 0.5:
                    sentence_rows = [filler, main_rows]
                    main_index = 1
                else:
                    sentence_rows.append(filler)
            sentences = [_to_sentence(rows, review_id, i)
                         for i, rows in enumerate(sentence_rows)]
            gold = None
            for clause in extract_clauses(sentences[main_index]):
                if topic in clause.words:
                    gold = GoldCause(main_index, clause.span.start, clause.span.end)
                    break
            if gold is None:
                raise RuntimeError("template lost its planted cause clause")
            if emotion in NEGATIVE_EMOTIONS:
                stars = int(rng.integers(1, 3))
            elif emotion == "surprise":
                stars = int(rng.integers(2, 6))
            else:
                stars = int(rng.integers(4, 6))
            text = " ".join(t for s in sentences for t in s.texts())
            records.append(ReviewRecord(
                review_id=review_id,
                product_id=product_id,
                stars=stars,
                text=text,
                parse_ids=tuple(s.sent_id for s in sentences),
                gold_emotion=emotion,
                gold_cause=gold,
            ))
            for sentence in sentences:
                conllu.extend(_conllu_lines(sentence))
    return records, "\n".join(conllu) + ("\n" if conllu else "")


def template_vocabulary() -> list[str]:
    """Every surface form the templates can emit, sorted."""
    vocab = {"because", "the", "really", "it", "works", "is", "box",
             "arrived", "today"}
    for subj, cop in SUBJECTS:
        vocab.update((subj, cop))
    for words in EMOTION_WORDS.values():
        vocab.update(words)
    for topic, variants in TOPICS.items():
        vocab.add(topic)
        for verb, tail in variants:
            vocab.update((verb, tail))
    vocab.update(FILLER_NOUNS)
    vocab.update(FILLER_ADJS)
    return sorted(vocab)


def synthetic_embeddings(seed: int, dim: int = 16) -> EmbeddingTable:
    """Random vectors over the template vocabulary. Emotion words get a
    strong per-emotion direction so the classifier has signal to find."""
    if dim < len(EMOTIONS):
        raise ValueError(f"dim must be at least {len(EMOTIONS)}")
    rng = np.random.default_rng([seed, 1])
    word_emotion = {}
    for emotion, words in EMOTION_WORDS.items():
        for word in words:
            word_emotion[word] = EMOTIONS.index(emotion)
    vocab = template_vocabulary()
    vectors = np.empty((len(vocab), dim))
    for i, word in enumerate(vocab):
        if word in word_emotion:
            vec = rng.normal(0.0, 0.3, dim)
            vec[word_emotion[word]] += 2.0
        else:
            vec = rng.normal(0.0, 0.8, dim)
        vectors[i] = vec
    return EmbeddingTable(vocab, vectors)


def synthetic_lexicon_rows(seed: int) -> list[tuple[str, str, float]]:
    """(word, emotion, intensity) rows for every planted emotion word."""
    rng = np.random.default_rng([seed, 2])
    rows = []
    for emotion in EMOTIONS:
        for word in EMOTION_WORDS[emotion]:
            rows.append((word, emotion, round(float(rng.uniform(0.75, 0.98)), 3)))
            if word in SECONDARY_EMOTIONS:
                other, intensity = SECONDARY_EMOTIONS[word]
                rows.append((word, other, intensity))
    return rows


def write_lexicon(rows, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for word, emotion, intensity in rows:
            fh.write(f"{word}\t{emotion}\t{intensity}\n")

"""End-to-end orchestration: reviews -> clauses -> emotion -> cause clause
-> per-(product, emotion) clusters -> summary report.

Reviews that fail any stage (missing parses, everything out of vocabulary)
are counted as skipped; the run never aborts on a bad review.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import cause_model, clustering, emotion_model
from .clauses import extract_clauses, parse_conllu
from .corpus import load_corpus
from .embeddings import load_word_embeddings
from .errors import DataError, OovError

DEFAULT_THRESHOLD = clustering.DEFAULT_THRESHOLD


@dataclass
class PipelineConfig:
    """Paths and hyperparameters for the full pipeline. The defaults are the
    reference settings: top-2 emotion blending, 100/50 training epochs,
    learning rate 0.003, momentum 0.9, hidden sizes 256/1024, clustering
    threshold 0.13."""

    embeddings_path: str = ""
    aware_path: str = ""
    lexicon_path: str = ""
    corpus_path: str = ""
    parses_path: str = ""
    emotion_model_path: str = ""
    cause_model_path: str = ""
    threshold: float = DEFAULT_THRESHOLD
    top_k: int = 2
    emotion_epochs: int = emotion_model.DEFAULT_EPOCHS
    cause_epochs: int = cause_model.DEFAULT_EPOCHS
    learning_rate: float = 0.003
    momentum: float = 0.9
    emotion_hidden: int = emotion_model.DEFAULT_HIDDEN
    cause_hidden: int = cause_model.DEFAULT_HIDDEN
    seed: int = 0


@dataclass
class SummaryReport:
    cluster_sets: list = field(default_factory=list)  # clustering.ClusterSet
    processed: int = 0
    skipped: int = 0

    def to_json_obj(self) -> dict:
        return {
            "groups": [cs.to_json_obj() for cs in self.cluster_sets],
            "processed": self.processed,
            "skipped": self.skipped,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True, indent=2) + "\n"

    def to_text(self) -> str:
        lines = [f"reviews processed: {self.processed}, skipped: {self.skipped}"]
        for cs in self.cluster_sets:
            lines.append(f"product {cs.product} | emotion {cs.emotion} | "
                         f"{len(cs.clusters)} cluster(s), {len(cs.pruned)} pruned")
            for cluster in cs.clusters:
                head = cs.vectors[cluster.head]
                lines.append(f"  [size {cluster.size}] {head.clause_text} "
                             f"({head.review_id})")
        return "\n".join(lines) + "\n"


def index_sentences(conllu_text: str) -> dict:
    return {s.sent_id: s for s in parse_conllu(conllu_text)}


def load_tables(cfg: PipelineConfig):
    raw = load_word_embeddings(cfg.embeddings_path)
    aware = load_word_embeddings(cfg.aware_path)
    if raw.dim != aware.dim or set(raw.words) != set(aware.words):
        raise DataError("raw and emotion-aware tables must share vocabulary and dim")
    return raw, aware


def build_emotion_examples(records, sentences: dict):
    """Training examples for the emotion model: whole-review tokens plus the
    gold label. Records without gold labels or parses are dropped."""
    examples = []
    for record in records:
        if record.gold_emotion is None:
            continue
        try:
            parsed = [sentences[pid] for pid in record.parse_ids]
        except KeyError:
            continue
        tokens = tuple(t for s in parsed for t in s.texts())
        examples.append(emotion_model.EmotionTrainExample(tokens, record.gold_emotion))
    return examples


def build_cause_examples(records, sentences: dict):
    """Training examples for the cause scorer: one per extracted clause,
    labeled 1 iff it is the review's gold cause span. The emotion signal is
    teacher-forced to a one-hot of the gold label."""
    examples = []
    for record in records:
        if record.gold_emotion is None:
            continue
        try:
            parsed = [sentences[pid] for pid in record.parse_ids]
        except KeyError:
            continue
        probs = cause_model.one_hot_probs(record.gold_emotion)
        gold = record.gold_cause
        for sent_no, sentence in enumerate(parsed):
            for clause in extract_clauses(sentence):
                label = int(sent_no == gold.sentence_index
                            and clause.span.start == gold.start
                            and clause.span.end == gold.end)
                examples.append(cause_model.CauseTrainExample(clause.words, probs, label))
    return examples


def run_pipeline(cfg: PipelineConfig) -> SummaryReport:
    """Inference over a corpus with already-trained models and tables."""
    raw, aware = load_tables(cfg)
    emo = emotion_model.load_emotion_model(cfg.emotion_model_path, aware)
    causes = cause_model.load_cause_model(cfg.cause_model_path, aware)
    records = load_corpus(cfg.corpus_path)
    with open(cfg.parses_path, encoding="utf-8") as fh:
        sentences = index_sentences(fh.read())

    entries = []
    processed = 0
    skipped = 0
    for record in records:
        try:
            parsed = [sentences[pid] for pid in record.parse_ids]
        except KeyError:
            skipped += 1
            continue
        try:
            clauses = [c for s in parsed for c in extract_clauses(s)]
            tokens = [t for s in parsed for t in s.texts()]
            log_probs = emotion_model.forward_emotion(emo, tokens)
            probs = emotion_model.emotion_probs(log_probs)
            emotion = emo.labels[int(np.argmax(log_probs))]
            chosen, _score = cause_model.select_cause_clause(causes, clauses, probs)
            vector = clustering.vectorize_clause(clauses[chosen], raw, aware)
        except (OovError, ValueError):
            skipped += 1
            continue
        entries.append((record.product_id, emotion, vector))
        processed += 1

    cluster_sets = clustering.cluster_causes(entries, cfg.threshold)
    return SummaryReport(cluster_sets=cluster_sets, processed=processed,
                         skipped=skipped)


def dump_projection(report: SummaryReport) -> list[dict]:
    """Per (product, emotion) group, members projected to 2-D for plotting."""
    out = []
    for cs in report.cluster_sets:
        points = clustering.project_2d(cs.vectors)
        out.append({
            "product": cs.product,
            "emotion": cs.emotion,
            "points": [{"review_id": v.review_id,
                        "clause_text": v.clause_text,
                        "x": float(points[i, 0]),
                        "y": float(points[i, 1])}
                       for i, v in enumerate(cs.vectors)],
        })
    return out

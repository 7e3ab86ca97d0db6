import json
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Set, Tuple

from backends.base import Backend
from backends.classifiers import (
    BASELINE,
    SP_FEATURE_ORDER,
    Models,
    Relation,
    RelationLabel,
    SentenceClassifier,
    UnparsableResponse,
    classify_pair,
)
from backends.linear_head import HeadModel, ModelMissing
from backends.remote_backend import RemoteBackend
from backends.scripted_backend import ScriptedBackend
from backends.tfidf_baseline import DSEA, DSPA, BaselineBackend, BaselineModel
from features.pair_features import extract_pair_features
from features.sentence_features import SentenceFeatureExtractor
from features.sentiment import SentimentScorer
from ingestion.issue_loader import IssueLog
from ingestion.issue_segmenter import IssueSegmenter, SegmentedIssue, Sentence
from ingestion.sentence_splitter import SentenceSplitter
from ingestion.text_cleaner import TextCleaner
from pipelines.run_config import RunConfig
from prompts.budget import TokenBudget
from prompts.dspa_prompt import build_dspa_prompt
from rationale.export import rationales_to_json, render_markdown, write_text
from rationale.rationale_builder import DesignRationale, construct_rationales
from rationale.relation_graph import RelationGraph

logger = logging.getLogger(__name__)


@dataclass
class MiningResult:
    issue: SegmentedIssue
    related: List[str]
    scores: Dict[str, float]
    graph: RelationGraph
    rationales: List[DesignRationale] = field(default_factory=list)

    @property
    def key(self) -> str:
        return self.issue.key

    def texts(self) -> Dict[str, str]:
        return {s.id: s.text for s in self.issue.sentences}


# ============================================================
# Phases
# ============================================================

def run_dsea(
    issue: SegmentedIssue, classifier: SentenceClassifier, workers: int = 1
) -> Tuple[Set[str], Dict[str, float]]:
    """
    Clasifica todas las oraciones, resumen incluido.
    Devuelve (ids relacionados con el diseño, puntuación por id).
    """
    sentences = list(issue.sentences)
    if workers > 1 and len(sentences) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            decisions = list(pool.map(lambda s: classifier.classify(s, issue), sentences))
    else:
        decisions = [classifier.classify(s, issue) for s in sentences]

    related = {s.id for s, (is_design, _) in zip(sentences, decisions) if is_design}
    scores = {s.id: score for s, (_, score) in zip(sentences, decisions)}
    return related, scores


class PairDecider:
    """
    Consulta cada par en orden de documento y, si sale supporting,
    también en orden inverso para fijar la dirección.
    """

    def __init__(self, backend: Backend, budget: TokenBudget, max_tokens: Optional[int] = None):
        self.backend = backend
        self.budget = budget
        self.max_tokens = max_tokens

    def _query(self, s1: Sentence, s2: Sentence) -> Relation:
        pf = extract_pair_features(s1, s2)
        prompt = build_dspa_prompt(s1, s2, pf, self.budget)
        try:
            relation, _ = classify_pair(self.backend, prompt, pf, s1, s2, self.max_tokens)
        except UnparsableResponse as e:
            logger.warning(f"{s1.issue_key}: ({s1.id}, {s2.id}) treated as unrelated: {e}")
            return Relation(RelationLabel.UNRELATED)
        return relation

    def decide(self, first: Sentence, second: Sentence) -> Relation:
        forward = self._query(first, second)
        if forward.label != RelationLabel.SUPPORTING:
            return forward

        reverse = self._query(second, first)
        if reverse.label != RelationLabel.SUPPORTING:
            return forward

        # ambas direcciones: gana la solución con menor global_index (second va después)
        return reverse


def run_dspa(
    related: Iterable[Sentence],
    issue: SegmentedIssue,
    backend: Backend,
    budget: TokenBudget,
    max_tokens: Optional[int] = None,
    workers: int = 1,
) -> RelationGraph:
    nodes = sorted(related, key=lambda s: s.global_index)
    graph = RelationGraph.from_sentences(issue.key, nodes)
    pairs = [(a, b) for i, a in enumerate(nodes) for b in nodes[i + 1:]]
    decider = PairDecider(backend, budget, max_tokens)

    if workers > 1 and len(pairs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            decisions = list(pool.map(lambda p: decider.decide(*p), pairs))
    else:
        decisions = [decider.decide(a, b) for a, b in pairs]

    # la reconciliación se hace en un solo hilo, en orden de pares
    for (a, b), relation in zip(pairs, decisions):
        if relation.label == RelationLabel.SUPPORTING:
            graph.add_supporting(relation.argument, relation.solution)
        elif relation.label == RelationLabel.COMPLEMENTARY:
            graph.add_complementary(a.id, b.id)

    logger.info(f"{issue.key}: {len(pairs)} pair decisions, {len(graph.edges)} edges")
    return graph


# ============================================================
# Orchestrator
# ============================================================

class RationaleMiner:
    """
    Orquestador: limpieza -> enumeración -> DSEA -> DSPA -> construcción.
    Backend y modelos se cargan desde la configuración cuando hacen falta.
    """

    def __init__(
        self,
        config: RunConfig,
        backend: Optional[Backend] = None,
        models: Optional[Models] = None,
    ):
        self.config = config
        cleaning = config.cleaning
        self.segmenter = IssueSegmenter(
            cleaner=TextCleaner(cleaning.encoding, cleaning.bot_authors, cleaning.bot_markers),
            splitter=SentenceSplitter(config.abbreviations),
        )
        self.extractor = SentenceFeatureExtractor(SentimentScorer(config.lexicon_path))
        self.dsea_budget = TokenBudget(config.budgets.dsea_max, config.budgets.counter)
        self.dspa_budget = TokenBudget(config.budgets.dspa_max, config.budgets.counter)
        self.workers = config.worker_count

        self._backend = backend
        self._models = models

    # ------------------------------------------------------------
    # Lazy resources
    # ------------------------------------------------------------

    @property
    def backend(self) -> Backend:
        if self._backend is None:
            self._backend = build_backend(self.config, self.models)
        return self._backend

    @property
    def models(self) -> Models:
        if self._models is None:
            self._models = load_models(self.config)
        return self._models

    @property
    def classifier(self) -> SentenceClassifier:
        backend = None if self.config.mode == BASELINE else self.backend
        return SentenceClassifier(self.config.mode, self.models, backend, self.dsea_budget, self.extractor)

    # ------------------------------------------------------------
    # Phases
    # ------------------------------------------------------------

    def segment(self, issue: IssueLog) -> SegmentedIssue:
        return self.segmenter.segment(issue)

    def extract(self, issue: SegmentedIssue) -> Tuple[Set[str], Dict[str, float]]:
        return run_dsea(issue, self.classifier, self.workers)

    def pair(self, issue: SegmentedIssue, related_ids: Iterable[str]) -> RelationGraph:
        related = [issue.get(sid) for sid in related_ids]
        return run_dspa(
            related, issue, self.backend, self.dspa_budget, self.config.backend.max_tokens, self.workers
        )

    def mine(self, issue: IssueLog) -> MiningResult:
        segmented = self.segment(issue)
        related, scores = self.extract(segmented)
        ordered = sorted(related, key=lambda sid: segmented.get(sid).global_index)
        graph = self.pair(segmented, ordered)
        rationales = construct_rationales(graph)

        logger.info(f"{issue.key}: {len(ordered)} design-related sentences, {len(rationales)} rationales")
        return MiningResult(
            issue=segmented, related=ordered, scores=scores, graph=graph, rationales=rationales
        )

    def mine_corpus(self, issues: List[IssueLog]) -> Tuple[Dict[str, MiningResult], Dict[str, str]]:
        """
        Mina cada issue de forma independiente; un fallo se registra
        y no detiene al resto.
        """
        results: Dict[str, MiningResult] = {}
        errors: Dict[str, str] = {}

        def run(issue: IssueLog):
            try:
                return issue.key, self.mine(issue), None
            except Exception as e:
                logger.error(f"{issue.key}: mining failed: {e}")
                return issue.key, None, f"{type(e).__name__}: {e}"

        # las oraciones de cada issue ya se procesan en paralelo
        with ThreadPoolExecutor(max_workers=max(1, min(self.workers, len(issues) or 1))) as pool:
            outcomes = list(pool.map(run, issues))

        for key, result, error in outcomes:
            if error is None:
                results[key] = result
            else:
                errors[key] = error
        return results, errors


# ============================================================
# Factories
# ============================================================

def load_models(config: RunConfig) -> Models:
    """Carga los modelos que existan; los ausentes quedan a None (ModelMissing al usarlos)."""
    paths = config.models
    models = Models()

    def present(path: Optional[str]) -> bool:
        return bool(path) and os.path.isfile(path)

    if config.mode == BASELINE:
        if present(paths.dsea_baseline):
            models.dsea_baseline = BaselineModel.load(paths.dsea_baseline, DSEA)
    elif present(paths.dsea_head):
        models.dsea_head = HeadModel.load(paths.dsea_head, SP_FEATURE_ORDER)

    if present(paths.dspa_baseline):
        models.dspa_baseline = BaselineModel.load(paths.dspa_baseline, DSPA)
    return models


def build_backend(config: RunConfig, models: Optional[Models] = None) -> Backend:
    if config.mode == BASELINE:
        pair_model = models.dspa_baseline if models else None
        if pair_model is None:
            raise ModelMissing(f"Baseline mode needs a dspa baseline model ({config.models.dspa_baseline})")
        return BaselineBackend(pair_model)

    if config.backend.kind == "scripted":
        return ScriptedBackend.from_file(config.backend.script)

    return RemoteBackend(
        base_url=config.backend.base_url,
        auth_token=config.backend.auth_token,
        timeout=config.backend.timeout,
        max_tokens=config.backend.max_tokens,
    )


def mine(issue: IssueLog, config: RunConfig) -> List[DesignRationale]:
    return RationaleMiner(config).mine(issue).rationales


# ============================================================
# Output
# ============================================================

def write_result(result: MiningResult, output_dir: str) -> str:
    texts = result.texts()
    json_path = os.path.join(output_dir, f"{result.key}.json")
    write_text(rationales_to_json(result.key, result.rationales, texts), json_path)
    write_text(render_markdown(result.key, result.rationales, texts), os.path.join(output_dir, f"{result.key}.md"))
    return json_path


def write_errors(errors: Dict[str, str], output_dir: str) -> Optional[str]:
    if not errors:
        return None
    path = os.path.join(output_dir, "errors.json")
    write_text(json.dumps(dict(sorted(errors.items())), indent=2, ensure_ascii=False) + "\n", path)
    return path

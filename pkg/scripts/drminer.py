import argparse
import json
import logging
import os
import sys
from typing import Dict, List, Optional

import pandas as pd

# 1. PATH SETUP
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from backends.classifiers import BASELINE
from backends.linear_head import ModelMissing
from evaluation.ablation import ablate, ablate_all
from evaluation.annotations import by_issue, design_related_ids, gold_rationales, load_annotations
from evaluation.dataset_split import group_by_project, split_dataset
from evaluation.metrics import eval_dsea, evaluate
from evaluation.reports import eval_report_frame, render_table, score_frame, summarize_dataset, to_json
from features.sentence_features import DIMENSIONS
from ingestion.issue_loader import IssueLog, load_corpus, write_issue
from pipelines.rationale_pipeline import RationaleMiner, write_errors, write_result
from pipelines.run_config import ConfigError, RunConfig, load_config
from pipelines.training import (
    ablation_dataset,
    pair_samples,
    sentence_rows,
    sp_samples,
    train_dsea_baseline,
    train_dsea_head,
    train_dspa_baseline,
)
from rationale.export import rationales_from_dict, render_markdown, render_repair_context, write_text

VERSION = "0.1.0"

logger = logging.getLogger("drminer")

# base_url / script solo se exige en modo prompt_head
NEEDS_BACKEND = {"mine", "extract", "pair", "train", "ablate"}


# ============================================================
# Arguments
# ============================================================

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="Run configuration (YAML or JSON)")
    common.add_argument("--output", help="Output directory")
    common.add_argument("--mode", choices=["prompt_head", "baseline"])
    common.add_argument("--seed", type=int)
    common.add_argument("--workers", type=int)
    common.add_argument("--log-level", dest="log_level")

    parser = argparse.ArgumentParser(
        prog="drminer",
        description="Mine design rationales from issue-tracker discussions.",
    )
    parser.add_argument("--version", action="version", version=f"drminer {VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", parents=[common], help="Normalize raw issue exports into the corpus dir")
    p.add_argument("--input", required=True)
    p.add_argument("--corpus")

    for name, text in (
        ("mine", "Run the full pipeline per issue"),
        ("extract", "Run design sentence extraction only"),
        ("pair", "Run sentence pairing (reuses extract output when present)"),
    ):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("--issue", action="append", help="Issue key (repeatable)")
        p.add_argument("--corpus")

    p = sub.add_parser("train", parents=[common], help="Train heads / baselines from annotations")
    p.add_argument("--annotations", required=True)
    p.add_argument("--split", help="split.json; train on its train ids only")
    p.add_argument("--corpus")

    p = sub.add_parser("eval", parents=[common], help="Score mined rationales against annotations")
    p.add_argument("--annotations", required=True)
    p.add_argument("--predictions", help="Directory with mined {key}.json files")

    p = sub.add_parser("split", parents=[common], help="Per-project train/test split")
    p.add_argument("--annotations", required=True)

    p = sub.add_parser("ablate", parents=[common], help="Feature-dimension ablation of the DSEA head")
    p.add_argument("--annotations", required=True)
    p.add_argument("--dimension", choices=list(DIMENSIONS))
    p.add_argument("--split")
    p.add_argument("--corpus")

    p = sub.add_parser("stats", parents=[common], help="Dataset counts per project and label")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--annotations")
    group.add_argument("--corpus", dest="annotations")

    p = sub.add_parser("export", parents=[common], help="Render mined rationales for downstream prompting")
    p.add_argument("--format", choices=["markdown", "repair"], default="markdown")
    p.add_argument("--issue", action="append")

    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    overrides = {
        "output_dir": args.output,
        "mode": args.mode,
        "seed": args.seed,
        "workers": args.workers,
        "log_level": args.log_level,
    }
    corpus = getattr(args, "corpus", None)
    if corpus and args.command != "stats":
        overrides["corpus_dir"] = corpus

    require_backend = args.command in NEEDS_BACKEND
    return load_config(args.config, overrides, require_backend=require_backend)


# ============================================================
# Helpers
# ============================================================

def _select(issues: List[IssueLog], keys: Optional[List[str]]) -> List[IssueLog]:
    if not keys:
        return issues
    by_key = {i.key: i for i in issues}
    missing = [k for k in keys if k not in by_key]
    if missing:
        raise ConfigError(f"Issue(s) not in corpus: {', '.join(missing)}")
    return [by_key[k] for k in keys]


def _write_json(data, path: str) -> str:
    return write_text(json.dumps(data, indent=2, ensure_ascii=False) + "\n", path)


def _read_json(path: str):
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def _load_split(path: Optional[str], records, seed: int) -> Dict[str, List[str]]:
    if path:
        return _read_json(path)
    train, test = split_dataset(group_by_project(r.issue_key for r in records), seed)
    return {"train": train, "test": test}


def _segment_corpus(miner: RationaleMiner, keys) -> Dict:
    issues = _select(load_corpus(miner.config.corpus_dir), sorted(set(keys)))
    return {issue.key: miner.segment(issue) for issue in issues}


# ============================================================
# Commands
# ============================================================

def cmd_ingest(args, config: RunConfig) -> int:
    corpus_dir = args.corpus or config.corpus_dir
    if os.path.abspath(corpus_dir) == os.path.abspath(args.input):
        raise ConfigError("ingest --input and the corpus dir must differ")

    issues = load_corpus(args.input)
    for issue in issues:
        write_issue(issue, corpus_dir)
    print(f"✅ Ingested {len(issues)} issues into {corpus_dir}")
    return 0


def cmd_mine(args, config: RunConfig) -> int:
    # los resultados se llaman <KEY>.json, igual que los issues del corpus
    if os.path.abspath(config.output_dir) == os.path.abspath(config.corpus_dir):
        raise ConfigError("mine --output and the corpus dir must differ")
    miner = RationaleMiner(config)
    issues = _select(load_corpus(config.corpus_dir), args.issue)

    results, errors = miner.mine_corpus(issues)
    for key in sorted(results):
        path = write_result(results[key], config.output_dir)
        print(f"📄 {key}: {len(results[key].rationales)} rationales -> {path}")

    write_errors(errors, config.output_dir)
    for key, message in sorted(errors.items()):
        print(f"❌ {key}: {message}")
    return 1 if errors else 0


def _run_per_issue(issues: List[IssueLog], config: RunConfig, work) -> int:
    errors = {}
    for issue in issues:
        try:
            work(issue)
        except Exception as e:
            logger.error(f"{issue.key}: {e}")
            errors[issue.key] = f"{type(e).__name__}: {e}"
    write_errors(errors, config.output_dir)
    return 1 if errors else 0


def cmd_extract(args, config: RunConfig) -> int:
    miner = RationaleMiner(config)
    issues = _select(load_corpus(config.corpus_dir), args.issue)

    def work(issue: IssueLog):
        segmented = miner.segment(issue)
        related, scores = miner.extract(segmented)
        ordered = [s.id for s in segmented.sentences if s.id in related]
        path = _write_json(
            {"issue_key": issue.key, "design_related": ordered, "scores": scores},
            os.path.join(config.output_dir, f"{issue.key}.dsea.json"),
        )
        print(f"🧠 {issue.key}: {len(ordered)}/{len(segmented.sentences)} design-related -> {path}")

    return _run_per_issue(issues, config, work)


def cmd_pair(args, config: RunConfig) -> int:
    miner = RationaleMiner(config)
    issues = _select(load_corpus(config.corpus_dir), args.issue)

    def work(issue: IssueLog):
        segmented = miner.segment(issue)
        dsea_path = os.path.join(config.output_dir, f"{issue.key}.dsea.json")
        if os.path.isfile(dsea_path):
            related = _read_json(dsea_path)["design_related"]
        else:
            ids, _ = miner.extract(segmented)
            related = [s.id for s in segmented.sentences if s.id in ids]

        graph = miner.pair(segmented, related)
        path = _write_json(
            {
                "issue_key": issue.key,
                "nodes": graph.nodes,
                "edges": [{"kind": e.kind, "source": e.source, "target": e.target} for e in graph.edges],
            },
            os.path.join(config.output_dir, f"{issue.key}.graph.json"),
        )
        print(f"🔗 {issue.key}: {len(graph.edges)} edges -> {path}")

    return _run_per_issue(issues, config, work)


def cmd_train(args, config: RunConfig) -> int:
    records = load_annotations(args.annotations)
    keys = sorted(by_issue(records))
    if args.split:
        keys = _read_json(args.split)["train"]

    miner = RationaleMiner(config)
    segmented = _segment_corpus(miner, keys)
    rows = sentence_rows(segmented, records, miner.extractor, keys)

    if config.mode == BASELINE:
        model = train_dsea_baseline(rows, config.seed)
        model.save(config.models.dsea_baseline)
        print(f"✅ DSEA baseline ({len(model.vocabulary)} terms) -> {config.models.dsea_baseline}")
    else:
        head = train_dsea_head(sp_samples(rows, miner.backend, miner.dsea_budget), config.seed)
        head.save(config.models.dsea_head)
        print(f"✅ DSEA head -> {config.models.dsea_head}")

    pairs = pair_samples(segmented, records, keys)
    pair_model = train_dspa_baseline(pairs, config.seed)
    pair_model.save(config.models.dspa_baseline)
    print(f"✅ DSPA baseline ({len(pairs)} pairs) -> {config.models.dspa_baseline}")
    return 0


def cmd_eval(args, config: RunConfig) -> int:
    records = load_annotations(args.annotations)
    gold = gold_rationales(records)
    predictions_dir = args.predictions or config.output_dir

    pred_all, gold_all = [], []
    predicted_related, gold_related = set(), set()
    for key in sorted(gold):
        gold_all.extend(gold[key])
        path = os.path.join(predictions_dir, f"{key}.json")
        if os.path.isfile(path):
            pred_all.extend(rationales_from_dict(_read_json(path)))
        else:
            logger.warning(f"{key}: no prediction file, counted as empty")

        dsea_path = os.path.join(predictions_dir, f"{key}.dsea.json")
        if os.path.isfile(dsea_path):
            predicted_related |= {(key, sid) for sid in _read_json(dsea_path)["design_related"]}
            gold_related |= {k for k in design_related_ids(records) if k[0] == key}

    report = evaluate(pred_all, gold_all)
    frame = eval_report_frame(report)
    output = report.as_dict()
    if gold_related or predicted_related:
        dsea = eval_dsea(predicted_related, gold_related)
        output["dsea"] = dsea.as_dict()
        frame = pd.concat([frame, score_frame({"dsea": dsea})])

    write_text(to_json(output), os.path.join(config.output_dir, "eval.json"))
    table = render_table(frame)
    write_text(table, os.path.join(config.output_dir, "eval.txt"))
    print(table, end="")
    return 0


def cmd_split(args, config: RunConfig) -> int:
    records = load_annotations(args.annotations)
    train, test = split_dataset(group_by_project(r.issue_key for r in records), config.seed)
    path = _write_json({"train": train, "test": test}, os.path.join(config.output_dir, "split.json"))
    print(f"✂️  {len(train)} train / {len(test)} test -> {path}")
    return 0


def cmd_ablate(args, config: RunConfig) -> int:
    records = load_annotations(args.annotations)
    split = _load_split(args.split, records, config.seed)

    miner = RationaleMiner(config)
    segmented = _segment_corpus(miner, split["train"] + split["test"])
    train_rows = sentence_rows(segmented, records, miner.extractor, split["train"])
    test_rows = sentence_rows(segmented, records, miner.extractor, split["test"])

    backend = None if config.mode == BASELINE else miner.backend
    dataset = ablation_dataset(train_rows, test_rows, config.mode, backend, miner.dsea_budget)

    if args.dimension:
        report = ablate(dataset, args.dimension, seed=config.seed)
        frame = score_frame({report.dimension: report.score})
        frame.insert(0, "masked", report.masked_slots)
    else:
        frame = ablate_all(dataset, seed=config.seed).set_index("dimension")

    write_text(to_json(frame), os.path.join(config.output_dir, "ablation.json"))
    table = render_table(frame)
    write_text(table, os.path.join(config.output_dir, "ablation.txt"))
    print(table, end="")
    return 0


def cmd_stats(args, config: RunConfig) -> int:
    print(render_table(summarize_dataset(load_annotations(args.annotations))), end="")
    return 0


def cmd_export(args, config: RunConfig) -> int:
    names = sorted(
        n for n in os.listdir(config.output_dir)
        if n.endswith(".json") and n.count(".") == 1 and n not in ("errors.json", "eval.json", "split.json", "ablation.json")
    )
    if args.issue:
        names = [f"{key}.json" for key in args.issue]

    for name in names:
        data = _read_json(os.path.join(config.output_dir, name))
        key = data["issue_key"]
        rationales = rationales_from_dict(data)
        texts = {ref["id"]: ref["text"] for r in data["rationales"] for ref in r["solution"]}
        texts.update({ref["id"]: ref["text"] for r in data["rationales"] for g in r["arguments"] for ref in g})

        if args.format == "repair":
            path = write_text(render_repair_context(key, rationales, texts), os.path.join(config.output_dir, f"{key}.repair.txt"))
        else:
            path = write_text(render_markdown(key, rationales, texts), os.path.join(config.output_dir, f"{key}.md"))
        print(f"📤 {key} -> {path}")
    return 0


COMMANDS = {
    "ingest": cmd_ingest,
    "mine": cmd_mine,
    "extract": cmd_extract,
    "pair": cmd_pair,
    "train": cmd_train,
    "eval": cmd_eval,
    "split": cmd_split,
    "ablate": cmd_ablate,
    "stats": cmd_stats,
    "export": cmd_export,
}


# ============================================================
# Entry point
# ============================================================

def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)

    try:
        config = config_from_args(args)
    except ConfigError as e:
        print(f"❌ Configuration error: {e}", file=sys.stderr)
        return 2

    logging.basicConfig(
        level=getattr(logging, str(config.log_level).upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    try:
        return COMMANDS[args.command](args, config)
    except ConfigError as e:
        print(f"❌ Configuration error: {e}", file=sys.stderr)
        return 2
    except ModelMissing as e:
        print(f"❌ {e}", file=sys.stderr)
        return 1
    except Exception as e:
        logger.exception(f"{args.command} failed: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())

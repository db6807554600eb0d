"""Command-line front end.

Subcommands: synth (write the synthetic benchmark), extract (feature CSVs per
rule), evaluate (accuracy grids and the genealogy table), predict (rule values
for one language). Every RunConfig field can come from a JSON config file
(--config) and be overridden by a flag of the same name; flags win.

Exit codes: 0 success, 2 usage or config error, 3 data or ingestion error,
4 internal failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from . import __version__, classifiers, evaluation
from .corpus import ParallelCorpus, read_alignments, read_conll, read_sentences, zip_corpus
from .errors import DataError
from .extraction import (DEFAULT_CLAUSE_LABELS, TEXT_RULES, build_text_vector,
                         write_features_csv)
from .features import FeatureBlockSpec, assemble, genealogy_vocab, rules_block
from .particles import build_92A_vector
from .synthetic import default_benchmark, generate, write_benchmark
from .wals import RULE_ORDER, load_rules_csv, load_wals_csv


class ConfigError(ValueError):
    """Bad usage or configuration; maps to exit code 2."""


@dataclass
class RunConfig:
    wals_csv: str | None = None
    rules_csv: str | None = None
    corpus_dir: str | None = None
    out_dir: str = "out"
    rules: list[str] = field(default_factory=lambda: list(RULE_ORDER))
    blocks: list[str] = field(default_factory=lambda: ["text", "rules"])
    lambdas: list[float] = field(default_factory=lambda: list(classifiers.PAPER_LAMBDAS))
    ks: list[int] = field(default_factory=lambda: [1, 3, 5, 7])
    clause_labels: list[str] = field(default_factory=lambda: sorted(DEFAULT_CLAUSE_LABELS))
    alpha: float = 0.5
    min_freq: int = 3
    seed: int = 42
    jobs: int = 1
    noise: float = 0.0
    sentences: int = 200
    classifier: str = "genus"
    k: int = 3

    def validate(self):
        if not self.lambdas or any(lam <= 0 for lam in self.lambdas):
            raise ConfigError("lambdas must be a nonempty list of positive values")
        if any(k < 1 for k in self.ks):
            raise ConfigError("ks must all be >= 1")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")
        if not 0.0 <= self.noise < 0.5:
            raise ConfigError("noise must lie in [0, 0.5)")
        unknown = [r for r in self.rules if r not in RULE_ORDER]
        if unknown:
            raise ConfigError(f"unknown rule id(s): {unknown}")
        if self.classifier not in ("genus", "family", "majority", "logistic",
                                   "naive_bayes", "knn"):
            raise ConfigError(f"unknown classifier {self.classifier!r}")

    def hash(self) -> str:
        blob = json.dumps(asdict(self), sort_keys=True).encode("utf-8")
        return hashlib.sha256(blob).hexdigest()[:12]

    def metadata(self) -> str:
        return f"walspred {__version__} config={self.hash()} seed={self.seed}"


def _resolve_config(args) -> RunConfig:
    config = RunConfig()
    valid = {f.name for f in fields(RunConfig)}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as handle:
                loaded = json.load(handle)
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}") from exc
        for key, value in loaded.items():
            if key not in valid:
                raise ConfigError(f"unknown config key {key!r}")
            setattr(config, key, value)
    for name in valid:
        value = getattr(args, name, None)
        if value is not None:
            setattr(config, name, value)
    config.validate()
    return config


def _csv_list(text):
    return [item for item in text.split(",") if item]


def _add_config_flags(parser):
    parser.add_argument("--config", help="JSON config file mirroring RunConfig")
    parser.add_argument("--wals-csv", dest="wals_csv")
    parser.add_argument("--rules-csv", dest="rules_csv")
    parser.add_argument("--corpus-dir", dest="corpus_dir")
    parser.add_argument("--out-dir", dest="out_dir")
    parser.add_argument("--rules", type=_csv_list, help="comma-separated rule ids")
    parser.add_argument("--blocks", type=_csv_list, help="comma-separated feature blocks")
    parser.add_argument("--lambdas", type=lambda s: [float(x) for x in _csv_list(s)])
    parser.add_argument("--ks", type=lambda s: [int(x) for x in _csv_list(s)])
    parser.add_argument("--clause-labels", dest="clause_labels", type=_csv_list)
    parser.add_argument("--alpha", type=float)
    parser.add_argument("--min-freq", dest="min_freq", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--jobs", type=int)
    parser.add_argument("--noise", type=float)
    parser.add_argument("--sentences", type=int)
    parser.add_argument("--classifier")
    parser.add_argument("--k", type=int)


def _job_map(jobs: int):
    if jobs <= 1:
        return map
    def mapper(fn, items):
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, list(items)))
    return mapper


def _load_language_dir(lang_dir: Path) -> ParallelCorpus:
    trees = read_conll(lang_dir / "source.conll")
    targets = read_sentences(lang_dir / "target.txt")
    alignments = read_alignments(lang_dir / "alignments.txt")
    return zip_corpus(trees, targets, alignments, lang_dir.name)


def _load_corpora(config: RunConfig) -> dict[str, ParallelCorpus]:
    if not config.corpus_dir:
        raise ConfigError("a corpus directory is required (--corpus-dir)")
    root = Path(config.corpus_dir)
    if not root.is_dir():
        raise ConfigError(f"corpus directory {root} does not exist")
    lang_dirs = sorted(d for d in root.iterdir() if d.is_dir())
    if not lang_dirs:
        raise ConfigError(f"corpus directory {root} has no language subdirectories")
    mapper = _job_map(config.jobs)
    corpora = list(mapper(_load_language_dir, lang_dirs))
    return {corpus.language_code: corpus for corpus in corpora}


def _extract_language(corpus: ParallelCorpus, clause_labels, alpha, min_freq):
    """All six per-rule feature rows for one language."""
    rows = {}
    for rule in TEXT_RULES:
        vec = build_text_vector(rule, corpus, clause_labels)
        rows[rule] = (vec.normalized, vec.n_instances, None)
    particle = build_92A_vector(corpus, alpha=alpha, min_freq=min_freq)
    rows["92A"] = (particle.normalized, sum(particle.counts), particle.particle)
    return rows


def _extract_all(config: RunConfig, corpora):
    clause_labels = frozenset(config.clause_labels)
    mapper = _job_map(config.jobs)
    codes = sorted(corpora)
    per_language = list(mapper(
        lambda code: _extract_language(corpora[code], clause_labels,
                                       config.alpha, config.min_freq),
        codes))
    by_rule: dict[str, dict] = {rule: {} for rule in RULE_ORDER}
    for code, rows in zip(codes, per_language):
        for rule, payload in rows.items():
            by_rule[rule][code] = payload
    return by_rule


def _load_db(config: RunConfig):
    if not config.wals_csv or not config.rules_csv:
        raise ConfigError("both --wals-csv and --rules-csv are required")
    for path in (config.rules_csv, config.wals_csv):
        if not Path(path).is_file():
            raise ConfigError(f"file {path} does not exist")
    rules = load_rules_csv(config.rules_csv)
    return load_wals_csv(config.wals_csv, rules)


def cmd_synth(config: RunConfig) -> int:
    spec = default_benchmark(noise=config.noise, sentences=config.sentences,
                             seed=config.seed)
    db, corpora = generate(spec)
    write_benchmark(db, corpora, config.out_dir, spec, config_hash=config.hash())
    print(f"wrote benchmark with {len(corpora)} languages to {config.out_dir}")
    return 0


def cmd_extract(config: RunConfig) -> int:
    corpora = _load_corpora(config)
    by_rule = _extract_all(config, corpora)
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for rule in RULE_ORDER:
        rows = [(code, rule, vec, n, particle)
                for code, (vec, n, particle) in sorted(by_rule[rule].items())]
        write_features_csv(rows, out / f"features_{rule}.csv",
                           metadata=config.metadata())
    print(f"wrote {len(RULE_ORDER)} feature files for {len(corpora)} languages "
          f"to {config.out_dir}")
    return 0


def cmd_evaluate(config: RunConfig) -> int:
    db = _load_db(config)
    corpora = _load_corpora(config)
    by_rule = _extract_all(config, corpora)
    mapper = _job_map(config.jobs)
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    grids = []
    genealogy = []
    knn_sections = []
    for rule in config.rules:
        vectors = {code: vec for code, (vec, _, _) in by_rule[rule].items()}
        grid = evaluation.run_grid(db, vectors, rule, lambdas=config.lambdas,
                                   job_map=mapper)
        grids.append(grid)
        best = max(max(row) for row in grid.cells)
        genealogy.append(evaluation.run_genealogy(db, vectors, rule, best_other=best))
        knn_sections.append((rule, evaluation.run_knn_grid(db, vectors, rule,
                                                           config.ks, job_map=mapper)))

    header = f"# {config.metadata()}\n"
    for grid in grids:
        for fmt, ext in (("tsv", "tsv"), ("markdown", "md")):
            text = header + evaluation.emit_grid(grid, fmt)
            (out / f"report_{grid.rule}.{ext}").write_text(text, encoding="utf-8")
    for fmt, ext in (("tsv", "tsv"), ("markdown", "md")):
        text = header + evaluation.emit_genealogy(genealogy, fmt)
        (out / f"report_genealogy.{ext}").write_text(text, encoding="utf-8")
        text = header + evaluation.emit_knn(knn_sections, fmt)
        (out / f"report_knn.{ext}").write_text(text, encoding="utf-8")

    report = evaluation.ExperimentReport(grids=tuple(grids), genealogy=tuple(genealogy))
    print(evaluation.emit_report(report, "tsv"))
    return 0


def _predict_row(db, language, rule, blocks, text_vector, cohort_codes):
    values = []
    if "text" in blocks:
        if text_vector is None:
            raise DataError(f"no corpus for language {language}, cannot build text features")
        values.extend(float(x) for x in text_vector)
    if "rules" in blocks:
        if language in db:
            values.extend(rules_block(db, language, rule))
        else:
            width = sum(db.rule(r).domain_size for r in RULE_ORDER if r != rule)
            values.extend([0.0] * width)
    if "genealogy" in blocks:
        genera, families = genealogy_vocab(db, cohort_codes)
        row = [0.0] * (len(genera) + len(families))
        if language in db:
            rec = db.record(language)
            if rec.genus in genera:
                row[genera.index(rec.genus)] = 1.0
            if rec.family in families:
                row[len(genera) + families.index(rec.family)] = 1.0
        values.extend(row)
    return values


def cmd_predict(config: RunConfig, language: str) -> int:
    db = _load_db(config)
    corpora = _load_corpora(config) if config.corpus_dir else {}
    known = language in db
    if not known and language not in corpora:
        raise DataError(f"unknown language code {language!r}: "
                        "not in the WALS data and no corpus directory for it")

    needs_text = config.classifier in ("logistic", "naive_bayes", "knn") \
        and "text" in config.blocks
    by_rule = _extract_all(config, corpora) if (corpora and needs_text) else None

    results = []
    for rule in config.rules:
        labeled = [rec.wals_code for rec in db.languages
                   if rule in rec.rule_values and rec.wals_code != language]
        if config.classifier in ("genus", "family"):
            predicted = classifiers.genealogy_predict(
                db, rule, language, config.classifier, labeled)
        elif config.classifier == "majority":
            predicted = classifiers.majority_train(
                [db.record(code).rule_values[rule] for code in labeled])
        else:
            cohort_codes = set(corpora) - {language}
            vectors = {code: vec for code, (vec, _, _) in by_rule[rule].items()} \
                if by_rule else {}
            dataset = assemble(db, vectors,
                               FeatureBlockSpec(frozenset(config.blocks), rule),
                               corpus_set=cohort_codes)
            if not dataset.rows:
                raise DataError(f"no labeled training languages with corpora for {rule}")
            text_vec = vectors.get(language) if by_rule else None
            if text_vec is None and by_rule and language in corpora:
                text_vec = by_rule[rule][language][0]
            row = _predict_row(db, language, rule, config.blocks, text_vec,
                               [r.language for r in dataset.rows])
            if config.classifier == "logistic":
                model = classifiers.train_logistic(dataset, config.lambdas[0])
                predicted = classifiers.predict_logistic(model, row)
            elif config.classifier == "naive_bayes":
                predicted = classifiers.predict_nb(classifiers.train_nb(dataset), row)
            else:
                predicted = classifiers.knn_predict(
                    dataset, row, min(config.k, len(dataset.rows)))
        results.append((rule, predicted, db.rule(rule).label(predicted)))

    for rule, code, label in results:
        print(f"{rule}\t{code}\t{label}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="walspred",
        description="Predict WALS typological rule values from parallel corpora, "
                    "other rules, and genealogy.")
    parser.add_argument("--version", action="version",
                        version=f"walspred {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
            ("synth", "write the synthetic benchmark corpus"),
            ("extract", "extract per-rule feature CSVs from a corpus directory"),
            ("evaluate", "run the LOOCV experiment grid and write reports"),
            ("predict", "predict rule values for one language")):
        cmd = sub.add_parser(name, help=help_text)
        _add_config_flags(cmd)
        if name == "predict":
            cmd.add_argument("language", help="WALS code of the language to predict")
    return parser


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    config = _resolve_config(args)
    if args.command == "synth":
        return cmd_synth(config)
    if args.command == "extract":
        return cmd_extract(config)
    if args.command == "evaluate":
        return cmd_evaluate(config)
    if args.command == "predict":
        return cmd_predict(config, args.language)
    raise ConfigError(f"unknown command {args.command!r}")


def main(argv=None) -> int:
    try:
        return run(argv)
    except ConfigError as exc:
        print(f"walspred: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"walspred: {exc}", file=sys.stderr)
        return 3
    except SystemExit:
        raise
    except Exception as exc:  # anything else is an internal failure
        print(f"walspred: internal error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())

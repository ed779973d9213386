"""Command-line entry point: ``gramnoise {stats,noise,mix,score,report}``.

Exit status is 0 on success, 1 on usage errors and 2 on data errors.  Outputs
are written to temporary files and renamed into place only once every output
of the command is ready.
"""

import argparse
import json
import logging
import os
import sys
import tempfile

from gramnoise import __version__
from gramnoise.confusion import ErrorType
from gramnoise.datasets import (
    ParallelCorpus,
    build_clean_plus_error,
    build_mix_all,
    file_digest,
    filter_by_length,
    make_manifest,
    mark_changes,
)
from gramnoise.evaluation import (
    NORMALIZATION_VERSION,
    TOKENIZERS,
    corpus_bleu,
    delta_report,
    self_bleu_robustness,
    sentence_bleu,
    transpose_references,
)
from gramnoise.exceptions import DataError
from gramnoise.m2stats import DEFAULT_CODE_MAP, ConfusionMatrixSet, learn_from_m2
from gramnoise.noiser import DEFAULT_SEED, NoiseConfig, format_events, noisify_corpus, parse_events

log = logging.getLogger("gramnoise")

ENV_MATRICES = "GRAMNOISE_MATRICES"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(1)


class _Outputs:
    """Collects output files and moves them into place together."""

    def __init__(self):
        self._pending = []

    def add(self, path, text):
        self._pending.append((path, text))

    def commit(self):
        staged = []
        try:
            for path, text in self._pending:
                directory = os.path.dirname(os.path.abspath(path))
                os.makedirs(directory, exist_ok=True)
                fd, tmp = tempfile.mkstemp(prefix=".gramnoise-", dir=directory)
                with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
                    f.write(text)
                staged.append((tmp, path))
        except BaseException:
            for tmp, _ in staged:
                os.unlink(tmp)
            raise
        for tmp, path in staged:
            os.replace(tmp, path)


def _read_lines(path):
    with open(path, encoding="utf-8") as f:
        return f.read().splitlines()


def _join_lines(lines):
    return "".join(line + "\n" for line in lines)


def _require_files(*paths):
    for path in paths:
        if path is not None and not os.path.isfile(path):
            raise DataError(f"input file not found: {path}")


def _provenance(argv, seed, inputs):
    return {
        "argv": list(argv),
        "seed": seed,
        "version": __version__,
        "normalization": NORMALIZATION_VERSION,
        "inputs": {p: file_digest(p) for p in inputs if p is not None},
    }


def _dump(doc):
    return json.dumps(doc, ensure_ascii=False, indent=2, sort_keys=True) + "\n"


def _parse_code_map(text):
    if text is None:
        return DEFAULT_CODE_MAP
    if os.path.isfile(text):
        with open(text, encoding="utf-8") as f:
            raw = json.load(f)
    else:
        try:
            raw = dict(item.split("=", 1) for item in text.split(","))
        except ValueError:
            raise UsageError(f"bad --code-map {text!r}; expected CODE=type,...") from None
    try:
        return {code: ErrorType.parse(t) for code, t in raw.items()}
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_stats(args, argv):
    _require_files(*args.m2)
    lines = []
    for path in args.m2:
        lines.extend(_read_lines(path))
        lines.append("")
    matrices = learn_from_m2(lines, _parse_code_map(args.code_map), args.smoothing)
    matrices.metadata["sources"] = {p: file_digest(p) for p in args.m2}
    matrices.metadata["provenance"] = [_provenance(argv, None, args.m2)]
    out = _Outputs()
    out.add(args.out, matrices.to_json())
    out.commit()
    other = matrices.metadata["other_annotations"]
    if other:
        log.warning("%d mapped annotations fell outside their confusion sets", other)
    return 0


def cmd_noise(args, argv):
    error_type = ErrorType.parse(args.type)
    matrices_path = args.matrices or os.environ.get(ENV_MATRICES)
    if error_type is not ErrorType.DROP:
        if args.trees is None:
            raise UsageError(f"--trees is required for --type {error_type.value}")
        if matrices_path is None:
            raise UsageError(f"--matrices (or ${ENV_MATRICES}) is required for --type {error_type.value}")
        _require_files(args.corpus, args.trees, matrices_path)
        matrices = ConfusionMatrixSet.load(matrices_path)
        trees = _read_lines(args.trees)
    else:
        _require_files(args.corpus)
        matrices, trees, matrices_path = None, None, None
    config = NoiseConfig(error_type, matrices, args.seed)
    result = noisify_corpus(_read_lines(args.corpus), trees, config, workers=args.workers)
    summary = result.summary()
    summary["seed"] = args.seed
    summary["provenance"] = [_provenance(argv, args.seed, [args.corpus, args.trees, matrices_path])]
    out = _Outputs()
    out.add(args.out, _join_lines(result.lines))
    out.add(args.events or args.out + ".events.tsv", format_events(result.events))
    out.add(args.summary or args.out + ".summary.json", _dump(summary))
    out.commit()
    print(f"{summary['type']}\t{summary['changed']}/{summary['lines']}\t{summary['changed_percent']}%",
          file=sys.stderr)
    return 0


def _parse_noisy_specs(specs):
    by_type = {}
    for spec in specs or ():
        if "=" not in spec:
            raise UsageError(f"--noisy expects TYPE=PATH, got {spec!r}")
        name, path = spec.split("=", 1)
        try:
            by_type[ErrorType.parse(name)] = path
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    return by_type


def cmd_mix(args, argv):
    _require_files(args.clean_src, args.clean_tgt)
    target = _read_lines(args.clean_tgt)
    clean = ParallelCorpus(_read_lines(args.clean_src), target)
    inputs = [args.clean_src, args.clean_tgt]
    if args.mode == "mix-all":
        noisy_paths = _parse_noisy_specs(args.noisy)
        _require_files(*noisy_paths.values())
        inputs += list(noisy_paths.values())
        noisy = {t: ParallelCorpus(_read_lines(p), target) for t, p in noisy_paths.items()}
        corpus = build_mix_all(clean, noisy)
    else:
        if args.noisy_src is None:
            raise UsageError(f"--noisy-src is required for --mode {args.mode}")
        _require_files(args.noisy_src)
        inputs.append(args.noisy_src)
        noisy = ParallelCorpus(_read_lines(args.noisy_src), target)
        tag = args.type or "error"
        if args.mode == "error":
            corpus = mark_changes(clean, noisy, tag)
        else:
            corpus = build_clean_plus_error(clean, noisy, tag)
    removed = 0
    if args.max_words is not None:
        corpus, removed = filter_by_length(corpus, args.max_words)
    manifest = make_manifest(args.mode, corpus, args.seed,
                             {p: file_digest(p) for p in inputs}, removed)
    manifest.provenance.append(_provenance(argv, args.seed, inputs))
    out = _Outputs()
    out.add(args.out + ".src", _join_lines(corpus.source))
    out.add(args.out + ".tgt", _join_lines(corpus.target))
    out.add(args.out + ".tags", _join_lines(corpus.tags))
    out.add(args.out + ".manifest.json", _dump(manifest.to_dict()))
    out.commit()
    print(f"{args.mode}\t{manifest.total_lines} lines\t{manifest.changed_percent}% changed",
          file=sys.stderr)
    return 0


def cmd_score(args, argv):
    _require_files(args.hyp, *args.ref)
    hyps = _read_lines(args.hyp)
    refs = transpose_references([_read_lines(p) for p in args.ref])
    score = corpus_bleu(hyps, refs, tokenize=args.tokenize, workers=args.workers)
    print(score)
    if args.sentences:
        for hyp, line_refs in zip(hyps, refs):
            print(f"{sentence_bleu(hyp, line_refs, tokenize=args.tokenize).score:.2f}")
    if args.out:
        doc = score.to_dict()
        doc["provenance"] = [_provenance(argv, None, [args.hyp, *args.ref])]
        out = _Outputs()
        out.add(args.out, _dump(doc))
        out.commit()
    return 0


def cmd_report(args, argv):
    _require_files(args.events, args.noisy_hyp, args.clean_hyp, *args.ref)
    with open(args.events, encoding="utf-8") as f:
        events = parse_events(f.read())
    noisy = _read_lines(args.noisy_hyp)
    clean = _read_lines(args.clean_hyp)
    refs = transpose_references([_read_lines(p) for p in args.ref])
    report = delta_report(events, noisy, clean, refs, tokenize=args.tokenize)
    table = report.format_table()
    sys.stdout.write(table)
    robustness = self_bleu_robustness(noisy, clean, tokenize=args.tokenize)
    print(f"self-BLEU (noisy vs clean translations): {robustness.score:.2f}")
    if args.out:
        doc = report.to_dict()
        doc["self_bleu"] = robustness.to_dict()
        doc["provenance"] = [_provenance(argv, None, [args.events, args.noisy_hyp,
                                                      args.clean_hyp, *args.ref])]
        out = _Outputs()
        out.add(args.out, _dump(doc))
        out.add(args.out + ".txt", table)
        out.commit()
    return 0


def build_parser():
    parser = _Parser(prog="gramnoise", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version",
                        version=f"gramnoise {__version__} (scoring normalization {NORMALIZATION_VERSION})")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("stats", help="learn confusion matrices from M2 files")
    p.add_argument("--m2", nargs="+", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--smoothing", type=float, default=0.0)
    p.add_argument("--code-map", help="JSON file or CODE=type,... pairs")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("noise", help="inject one error per sentence")
    p.add_argument("--type", required=True, choices=[t.value for t in ErrorType])
    p.add_argument("--corpus", required=True)
    p.add_argument("--trees")
    p.add_argument("--matrices", help=f"defaults to ${ENV_MATRICES}")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True)
    p.add_argument("--events")
    p.add_argument("--summary")
    p.set_defaults(func=cmd_noise)

    p = sub.add_parser("mix", help="build error / clean+error / mix-all datasets")
    p.add_argument("--mode", required=True, choices=["error", "clean+error", "mix-all"])
    p.add_argument("--clean-src", required=True)
    p.add_argument("--clean-tgt", required=True)
    p.add_argument("--noisy-src")
    p.add_argument("--noisy", action="append", metavar="TYPE=PATH")
    p.add_argument("--type", help="tag for the noisy block")
    p.add_argument("--max-words", type=int)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out", required=True, help="output prefix")
    p.set_defaults(func=cmd_mix)

    for name, func, helptext in (("score", cmd_score, "corpus BLEU"),
                                 ("report", cmd_report, "per-substitution BLEU deltas")):
        p = sub.add_parser(name, help=helptext)
        if name == "score":
            p.add_argument("--hyp", required=True)
            p.add_argument("--sentences", action="store_true", help="also print sentence BLEU per line")
            p.add_argument("--workers", type=int, default=1)
        else:
            p.add_argument("--events", required=True)
            p.add_argument("--noisy-hyp", required=True)
            p.add_argument("--clean-hyp", required=True)
        p.add_argument("--ref", action="append", required=True)
        p.add_argument("--tokenize", choices=sorted(TOKENIZERS), default="13a")
        p.add_argument("--out")
        p.set_defaults(func=func)
    return parser


def run(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors, --help and --version
        return exc.code if isinstance(exc.code, int) else 1
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    if args.command is None:
        parser.print_help(sys.stderr)
        return 1
    if getattr(args, "workers", 1) < 1:
        print("gramnoise: error: --workers must be >= 1", file=sys.stderr)
        return 1
    if not 0 <= getattr(args, "seed", 0) < 2**64:
        print("gramnoise: error: --seed must be an unsigned 64-bit integer", file=sys.stderr)
        return 1
    try:
        return args.func(args, argv)
    except UsageError as exc:
        print(f"gramnoise {args.command}: error: {exc}", file=sys.stderr)
        return 1
    except (DataError, OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        print(f"gramnoise {args.command}: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(run())

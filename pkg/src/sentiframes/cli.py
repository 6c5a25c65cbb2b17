"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 invalid input, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import agreement, corpus, lexicon, matching
from .attitudes import Pairing

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_IO = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class _Help(argparse.ArgumentDefaultsHelpFormatter):
    """Show defaults, except for required options where they mean nothing."""

    def _get_help_string(self, action):
        if action.required:
            return action.help
        return super()._get_help_string(action)


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _particles(text: str) -> frozenset[str]:
    items = frozenset(p.strip().lower() for p in text.split(",") if p.strip())
    if not items:
        raise argparse.ArgumentTypeError("particle list is empty")
    return items


def _existing(path: str) -> Path:
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    return p


def _read_lines(path) -> list[str]:
    with open(_existing(path), encoding="utf-8") as fh:
        return fh.readlines()


def _add_matching_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--lemmas", metavar="F", default=None,
                   help="TSV lemma table (surface<TAB>lemma); identity lowercasing if omitted")
    p.add_argument("--negation-window", metavar="N", type=_positive_int, default=1,
                   help="tokens before an entry searched for a negation particle")
    p.add_argument("--particles", metavar="LIST", type=_particles,
                   default=",".join(sorted(matching.DEFAULT_NEGATION_PARTICLES)),
                   help="comma-separated negation particles")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sentiframes", formatter_class=_Help,
                     description="Sentiment-frame lexicon tools and attitude extraction.")
    parser.add_argument("-v", "--verbose", action="store_true", default=False,
                        help="log progress to standard error")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    lex = sub.add_parser("lexicon", formatter_class=_Help, help="validate a lexicon or summarize it",
                         description="Validate a lexicon file or print its entry statistics.")
    lex_sub = lex.add_subparsers(dest="action", metavar="ACTION", parser_class=_Parser)
    lex_sub.required = True
    val = lex_sub.add_parser("validate", formatter_class=_Help, help="check every frame",
                             description="Check every frame; violations go to standard error.")
    val.add_argument("file", help="lexicon file (canonical or upstream layout)")
    st = lex_sub.add_parser("stats", formatter_class=_Help, help="entry distribution tables",
                            description="Print entry counts by attitude, effect and entry type as TSV.")
    st.add_argument("file", help="lexicon file (canonical or upstream layout)")
    st.add_argument("--reconcile", action="store_true", default=False,
                    help="append a per-cell diff against the published RuSentiFrames v2.0 counts")
    st.add_argument("--tolerance", type=float, default=0.02,
                    help="relative tolerance per cell for --reconcile")
    st.add_argument("--out", metavar="F", default=None,
                    help="write the TSV to this file instead of standard output")
    st.add_argument("--figure", metavar="F", default=None, help="also render a bar chart (PNG)")

    m = sub.add_parser("match", formatter_class=_Help, help="show entry matches in a text",
                       description="Debug view: tokens and frame-entry matches for one text.")
    m.add_argument("--lexicon", metavar="F", required=True, help="lexicon file")
    m.add_argument("--text", metavar="S", required=True, help="sentence to analyse")
    _add_matching_flags(m)

    ex = sub.add_parser("extract", formatter_class=_Help, help="extract attitudes from a corpus",
                        description="Extract entity-pair attitudes from a JSONL corpus and "
                                    "write records, pair counts and reports to --out.")
    ex.add_argument("--lexicon", metavar="F", required=True, help="lexicon file")
    ex.add_argument("--corpus", metavar="F", required=True, help="JSONL corpus, one document per line")
    ex.add_argument("--out", metavar="D", required=True, help="output directory")
    _add_matching_flags(ex)
    ex.add_argument("--aliases", metavar="F", default=None,
                    help="TSV alias table (surface<TAB>canonical) for entity names")
    ex.add_argument("--pairing", choices=[p.value for p in Pairing], default=Pairing.ALL_PAIRS.value,
                    help="'all' pairs every left/right mention pair, 'adjacent' skips pairs "
                         "with another mention in between")
    ex.add_argument("--workers", metavar="N", type=_positive_int, default=1,
                    help="worker processes")
    ex.add_argument("--min-total", metavar="N", type=_positive_int, default=1,
                    help="minimum sentences per pair in the reports")
    ex.add_argument("--top", metavar="K", type=_positive_int, default=10,
                    help="pairs per report table")
    ex.add_argument("--no-figures", action="store_true", default=False,
                    help="skip PNG figures")

    ag = sub.add_parser("aggregate", formatter_class=_Help, help="rank pairs from attitude records",
                        description="Aggregate attitude records per entity pair and print the "
                                    "most positive or most negative pairs.")
    ag.add_argument("--attitudes", metavar="F", required=True, help="attitudes JSONL written by extract")
    ag.add_argument("--direction", choices=[d.value for d in corpus.Direction],
                    default=corpus.Direction.MOST_NEGATIVE.value, help="ranking direction")
    ag.add_argument("--min-total", metavar="N", type=_positive_int, default=1,
                    help="minimum sentences per pair")
    ag.add_argument("--top", metavar="K", type=_positive_int, default=10, help="pairs to show")
    ag.add_argument("--format", choices=["text", "tsv"], default="text", help="standard output layout")
    ag.add_argument("--out", metavar="D", default=None,
                    help="also write report TSV and PNG figure to this directory")

    a = sub.add_parser("agree", formatter_class=_Help, help="agreement between two frame sets",
                       description="Compare two experts' frame files: R1, R2 and harmonic mean.")
    a.add_argument("--a", metavar="F", required=True, help="first expert's lexicon file")
    a.add_argument("--b", metavar="F", required=True, help="second expert's lexicon file")
    a.add_argument("--ids-must-match", action=argparse.BooleanOptionalAction, default=True,
                   help="match connotations by frame id; with --no-ids-must-match they are "
                        "matched per entry word instead")
    return parser


# --- commands ----------------------------------------------------------------

def _cmd_validate(args) -> int:
    try:
        lex = lexicon.read_lexicon(_existing(args.file))
    except lexicon.LexiconValidationError as exc:
        for v in exc.violations:
            print(v, file=sys.stderr)
        frames = len({v.frame_id for v in exc.violations})
        print(f"{len(exc.violations)} violations in {frames} frame(s)")
        return EXIT_INVALID
    violations = lex.violations()
    for v in violations:
        print(v, file=sys.stderr)
    noun = "frame" if len(lex) == 1 else "frames"
    print(f"{len(lex)} {noun}, {len(violations)} violations")
    return EXIT_INVALID if violations else EXIT_OK


def _load_for_stats(path: Path) -> lexicon.Lexicon:
    data = path.read_bytes()
    doc = lexicon._decode(data)
    if isinstance(doc, dict) and doc and "format" not in doc:
        result = lexicon.import_upstream(doc)
        for field in result.unmapped:
            print(f"unmapped field: {field}", file=sys.stderr)
        if result.notes:
            print(f"{len(result.notes)} import notes (duplicates merged/dropped)", file=sys.stderr)
        if result.violations:
            print(f"{len(result.violations)} validation warnings in upstream data", file=sys.stderr)
        return result.lexicon
    return lexicon.load_lexicon(data)


def _cmd_stats(args) -> int:
    lex = _load_for_stats(_existing(args.file))
    stats = lexicon.lexicon_stats(lex)
    text = lexicon.render_stats_tsv(stats)
    if args.reconcile:
        text += "\n" + lexicon.render_reconciliation(lexicon.reconcile(stats, tolerance=args.tolerance))
    outputs = []
    if args.out:
        outputs.append(Path(args.out))
    if args.figure:
        outputs.append(Path(args.figure))
    for p in outputs:
        p.parent.mkdir(parents=True, exist_ok=True)
    staged = [corpus._AtomicDir(p.parent) for p in outputs]
    try:
        if args.out:
            staged[0].write_text(Path(args.out).name, text)
        if args.figure:
            from .plotting import plot_lexicon_stats

            plot_lexicon_stats(stats, staged[-1].path(Path(args.figure).name))
        for s in staged:
            s.commit()
    except BaseException:
        for s in staged:
            s.abort()
        raise
    if not args.out:
        sys.stdout.write(text)
    return EXIT_OK


def _lemma_table(path) -> dict[str, str]:
    return matching.read_lemma_table(_read_lines(path)) if path else {}


def _cmd_match(args) -> int:
    lex = lexicon.read_lexicon(_existing(args.lexicon))
    table = _lemma_table(args.lemmas)
    index = matching.build_entry_index(lex, table)
    tokens = matching.tokenize(args.text, table)
    print("tokens: " + " ".join(f"{t.index}:{t.surface}/{t.lemma}" for t in tokens))
    found = matching.find_matches(index, tokens, args.negation_window, args.particles)
    for m in found:
        text = " ".join(t.surface for t in tokens[m.start:m.end + 1])
        print(json.dumps({"text": text, **corpus.match_record(m)}, ensure_ascii=False))
    if not found:
        print("no matches")
    return EXIT_OK


def _cmd_extract(args) -> int:
    _existing(args.lexicon)
    _existing(args.corpus)
    aliases = matching.read_alias_table(_read_lines(args.aliases)) if args.aliases else {}
    config = corpus.PipelineConfig(
        negation_window=args.negation_window, particles=args.particles,
        pairing=Pairing(args.pairing), lemma_table=_lemma_table(args.lemmas), aliases=aliases,
        min_total=args.min_total, top_k=args.top, workers=args.workers)
    result = corpus.run_pipeline(args.lexicon, args.corpus, args.out, config,
                                 figures=not args.no_figures)
    for msg in result.diagnostics:
        print(msg, file=sys.stderr)
    c = result.counters
    print(f"{c['documents']} documents processed, {c['skipped_records']} skipped, "
          f"{c['sentences']} sentences, {c['attitudes']} attitudes, "
          f"{len(result.stats)} pairs, {c['misaligned_mentions']} misaligned mentions")
    return EXIT_OK


def _cmd_aggregate(args) -> int:
    attitudes = []
    for n, line in enumerate(_read_lines(args.attitudes), 1):
        if not line.strip():
            continue
        try:
            attitudes.append(corpus.attitude_from_record(json.loads(line)))
        except (ValueError, KeyError, TypeError, IndexError) as exc:
            print(f"{args.attitudes}:{n}: invalid attitude record: {exc}", file=sys.stderr)
            return EXIT_INVALID
    stats = corpus.aggregate_attitudes(attitudes)
    direction = corpus.Direction(args.direction)
    ranked = corpus.rank_pairs(stats, direction, args.min_total, args.top)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        target = corpus._AtomicDir(out)
        try:
            stem = corpus.REPORT_FILES[direction]
            target.write_text(f"{stem}.tsv", corpus.render_report_tsv(ranked))
            from .plotting import plot_pair_report

            plot_pair_report(ranked, direction, target.path(f"{stem}.png"))
            target.commit()
        except BaseException:
            target.abort()
            raise
    if args.format == "tsv":
        sys.stdout.write(corpus.render_report_tsv(ranked))
    else:
        sys.stdout.write(corpus.render_report_text(ranked, direction))
    return EXIT_OK


def _cmd_agree(args) -> int:
    by = "frame" if args.ids_must_match else "word"
    a = lexicon.read_lexicon(_existing(args.a))
    b = lexicon.read_lexicon(_existing(args.b))
    result = agreement.agreement_ratios(agreement.connotation_set(a, by),
                                        agreement.connotation_set(b, by))
    print(result)
    print(f"R1={result.r1!r} R2={result.r2!r} HM={result.hm!r} "
          f"(common={result.common}, |A|={result.size1}, |B|={result.size2})")
    return EXIT_OK


COMMANDS = {
    "match": _cmd_match,
    "extract": _cmd_extract,
    "aggregate": _cmd_aggregate,
    "agree": _cmd_agree,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    if args.command == "lexicon":
        handler = _cmd_validate if args.action == "validate" else _cmd_stats
    else:
        handler = COMMANDS[args.command]
    try:
        return handler(args)
    except (lexicon.LexiconError, agreement.ConnotationConflict, agreement.EmptySetError,
            UnicodeDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ValueError as exc:
        # malformed auxiliary tables (lemmas, aliases)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

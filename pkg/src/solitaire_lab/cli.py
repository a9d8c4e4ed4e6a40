"""Command-line driver: keystream generation, statistics, censuses, attacks,
and the acceptance battery.

Exit codes: 0 success, 2 usage errors, 3 data errors (bad deck files, bad
stream inputs), 4 acceptance failures from ``repro``.

Every CSV artifact starts with a provenance comment line (version and exact
command) followed by a header row; identical invocations produce
byte-identical files. Keystream text output is pure data, one value per line.
"""

from __future__ import annotations

import argparse
import shlex
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__, acceptance, attacks, engine
from . import graph as graph_mod
from . import model as model_mod
from . import variants as variants_mod
from .deck import format_deck, load_deck, shard_seed, validate_deck
from .errors import SolitaireError
from .stats import StreamStats, top_card_on_repeat

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_ACCEPTANCE = 4

_CHUNK = 1 << 22
_STATS_SHARDS = 8  # fixed so results never depend on --workers


def _parse_count(text: str) -> int:
    """Non-negative integer count; scientific notation accepted ("1e7")."""
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if value < 0 or value != int(value):
        raise argparse.ArgumentTypeError(f"expected a non-negative integer count: {text!r}")
    return int(value)


def _parse_seed(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer seed: {text!r}") from None
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return value


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".10g")
    return str(value)


def _write_csv(path, argv, header, rows) -> None:
    lines = [f"# solitaire-lab {__version__} | solitaire-lab {shlex.join(argv)}"]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    text = "\n".join(lines) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _add_deck_source(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--seed", type=_parse_seed, help="key a fresh deck from this 64-bit seed")
    group.add_argument("--deck", metavar="FILE", help="read the starting deck from a one-line text file")


def _deck_source(args):
    if args.deck is not None:
        return load_deck(args.deck)
    return int(args.seed)


def _sharded_stats(args, mode: str, modulus: int, max_distance: int, length: int, workers: int) -> StreamStats:
    """Stats over `length` outputs; seeded runs fan out over fixed shards.

    mode "letters" is the folded 1..26 keystream; mode "values" is the
    keystream before the mod-26 fold (jokers dropped, values 1..52).
    """
    if args.deck is not None or length < _STATS_SHARDS:
        sources = [_deck_source(args)]
        counts = [length]
    else:
        sources = [shard_seed(args.seed, i) for i in range(_STATS_SHARDS)]
        base, extra = divmod(length, _STATS_SHARDS)
        counts = [base + (1 if i < extra else 0) for i in range(_STATS_SHARDS)]

    def one(source_count):
        source, count = source_count
        part = StreamStats(modulus, max_distance)
        gen = engine.StreamGenerator(source)
        remaining = count
        while remaining > 0:
            take = min(_CHUNK, remaining)
            chunk = gen.letters(take) if mode == "letters" else gen.values(take)
            part.accumulate(chunk)
            remaining -= take
        return part

    jobs = list(zip(sources, counts))
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(one, jobs))
    else:
        parts = [one(job) for job in jobs]
    merged = StreamStats(modulus, max_distance)
    for part in parts:
        merged = merged.merge(part)
    return merged


def _cmd_gen(args, argv) -> int:
    out = None
    if args.out is not None:
        out = open(args.out, "wb")
    try:
        sink = out if out is not None else sys.stdout.buffer
        gen = engine.StreamGenerator(_deck_source(args))
        produce = {"letters": gen.letters, "raw": gen.raw, "values": gen.values}[args.mode]
        remaining = args.len
        while remaining > 0:
            take = min(_CHUNK, remaining)
            chunk = produce(take)
            if args.format == "bytes":
                sink.write(chunk.tobytes())
            else:
                sink.write(("\n".join(str(int(v)) for v in chunk) + "\n").encode())
            remaining -= take
        sink.flush()
    finally:
        if out is not None:
            out.close()
    return EXIT_OK


def _cmd_stats(args, argv) -> int:
    st = _sharded_stats(args, "letters" if args.mod == 26 else "values", args.mod, args.dist, args.len, args.workers)
    _write_csv(
        f"{args.out}_distance.csv", argv, ["d", "rate", "stderr"], st.distance_profile()
    )
    tr = st.tuple_rates() if st.length >= 5 else None
    tuple_rows = []
    if tr is not None:
        tuple_rows = [
            (3, tr.rate3, tr.ratio_1_3),
            (4, tr.rate4, tr.ratio_3_4),
            (5, tr.rate5, tr.ratio_4_5),
        ]
    _write_csv(f"{args.out}_tuples.csv", argv, ["r", "rate", "ratio_prev"], tuple_rows)
    chi2_rows = []
    try:
        stat, dof = st.uniformity_chi2()
        chi2_rows.append((st.length, st.modulus, st.repeat_rate(1), stat, dof))
        header = ["length", "modulus", "repeat_rate_d1", "chi2", "dof"]
    except SolitaireError:
        header = ["length", "modulus", "repeat_rate_d1", "chi2", "dof"]
        rate1 = st.repeat_rate(1) if st.length > 1 else float("nan")
        chi2_rows.append((st.length, st.modulus, rate1, "", ""))
    _write_csv(f"{args.out}_summary.csv", argv, header, chi2_rows)
    return EXIT_OK


def _cmd_trace(args, argv) -> int:
    source = _deck_source(args)
    if args.dump_traces:
        raw, top, flag, slow_b, slow_a, fast_b, fast_a, bottom = engine.traced_run_full(source, args.len)
        rows = [
            (t + 1, int(top[t]), int(raw[t]), int(slow_b[t]), int(slow_a[t]), int(fast_b[t]), int(fast_a[t]), int(bottom[t]), int(flag[t]))
            for t in range(len(raw))
        ]
        _write_csv(
            args.dump_traces,
            argv,
            ["t", "top_card", "extracted", "slow_before", "slow_after", "fast_before", "fast_after", "bottom_after", "story_flag"],
            rows,
        )
    else:
        raw, top, flag = engine.traced_run(source, args.len)
    hist = top_card_on_repeat(top, raw)
    rows = [(v, int(hist.counts[v])) for v in range(1, 55)]
    _write_csv(f"{args.out}_topcard.csv", argv, ["value", "count"], rows)
    flagged = int(np.count_nonzero(flag))
    print(f"steps={len(raw)} repeats={hist.total} story_flagged={flagged}")
    return EXIT_OK


def _cmd_model(args, argv) -> int:
    rows = model_mod.report()
    _write_csv(args.out, argv, ["quantity", "value", "units"], rows)
    return EXIT_OK


def _cmd_census(args, argv) -> int:
    c = graph_mod.census(args.n, args.max_states)
    _write_csv(
        f"{args.out}_indegree.csv",
        argv,
        ["in_degree", "states"],
        sorted(c.in_degree_hist.items()),
    )
    lengths = {}
    for length in c.cycle_lengths:
        lengths[length] = lengths.get(length, 0) + 1
    _write_csv(f"{args.out}_cycles.csv", argv, ["cycle_length", "count"], sorted(lengths.items()))
    baseline = graph_mod.bijection_baseline(c.state_count)
    print(
        f"n={c.n} states={c.state_count} image={c.image_size} cycles={c.cycle_count} "
        f"tail_states={c.tail_states} max_tail={c.max_tail_length} "
        f"bijection_expected_cycles={baseline.expected_cycles:.2f}"
    )
    return EXIT_OK


def _cmd_preimages(args, argv) -> int:
    cards = validate_deck(load_deck(args.deck)) if args.deck else engine.shuffled_deck(args.seed)
    pres = graph_mod.preimage_decks(cards)
    lines = [format_deck(p) for p in pres]
    if args.out:
        Path(args.out).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
    else:
        for line in lines:
            print(line)
    print(f"preimages={len(pres)}", file=sys.stderr)
    return EXIT_OK


def _cmd_attack_cred(args, argv) -> int:
    report = attacks.simulate_credential_attack(args.credential, args.sessions, args.seed)
    rows = []
    for pos in range(report.tallies.shape[0]):
        for diff in range(26):
            rows.append((pos + 1, diff, int(report.tallies[pos, diff])))
    _write_csv(f"{args.out}_tallies.csv", argv, ["position", "diff", "count"], rows)
    summary = [
        (pos + 1, report.planted_diffs[pos], report.recovered_diffs[pos], report.margins_z[pos])
        for pos in range(len(report.planted_diffs))
    ]
    _write_csv(
        f"{args.out}_summary.csv",
        argv,
        ["position", "planted_diff", "recovered_diff", "margin_z"],
        summary,
    )
    print(f"sessions={report.sessions} success={report.success}")
    return EXIT_OK


def _read_text_arg(inline, path):
    if inline is not None:
        return inline
    return Path(path).read_text(encoding="utf-8")


def _cmd_attack_causal(args, argv) -> int:
    ciphertext = _read_text_arg(args.ciphertext, args.ciphertext_file)
    plaintext = _read_text_arg(args.plaintext, args.plaintext_file)
    report = attacks.causal_repeat_test(ciphertext, plaintext, args.rate)
    rows = [
        (
            report.length,
            report.observed_repeats,
            report.causal_mean,
            report.null_mean,
            report.null_sd,
            report.z_causal,
            report.z_null,
            report.verdict_margin_sd,
        )
    ]
    _write_csv(
        args.out,
        argv,
        ["length", "observed", "causal_mean", "null_mean", "null_sd", "z_causal", "z_null", "verdict_margin_sd"],
        rows,
    )
    verdict = "causal" if report.verdict_margin_sd > 0 else "non-causal"
    print(f"observed={report.observed_repeats} verdict={verdict} margin_sd={report.verdict_margin_sd:.2f}")
    return EXIT_OK


def _cmd_variant(args, argv) -> int:
    spec = variants_mod.parse_variant_spec(args.variant)
    modulus = args.mod
    st = StreamStats(modulus, args.dist)
    gen_source = _deck_source(args)
    mode = "letters" if modulus == 26 else "values"
    stream = variants_mod.variant_keystream(gen_source, args.len, spec, mode)
    st.accumulate(stream)
    if args.stream_out:
        Path(args.stream_out).write_text("\n".join(str(int(v)) for v in stream) + "\n", encoding="utf-8")
    _write_csv(f"{args.out}_distance.csv", argv, ["d", "rate", "stderr"], st.distance_profile())
    rate1 = st.repeat_rate(1) if st.length > 1 else float("nan")
    _write_csv(
        f"{args.out}_summary.csv",
        argv,
        ["variant", "length", "modulus", "repeat_rate_d1"],
        [(spec.cli_string(), st.length, modulus, rate1)],
    )
    return EXIT_OK


def _cmd_repro(args, argv) -> int:
    cfg = acceptance.AcceptanceConfig(scale=args.scale)
    if args.list:
        for i, fn in enumerate(acceptance.CRITERIA, start=1):
            print(f"{i:2d}  {fn.__doc__ or fn.__name__}")
        return EXIT_OK
    results = acceptance.run_all(cfg, only=args.only or None)
    print(acceptance.format_table(results))
    rate = acceptance.measured_update_rate()
    print(
        f"info: engine throughput {rate / 1e6:.1f}M updates/sec "
        f"(design target {acceptance.TARGET_UPDATE_RATE / 1e6:.0f}M on a modern core)"
    )
    return EXIT_OK if all(r.passed for r in results) else EXIT_ACCEPTANCE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="solitaire-lab",
        description="Cryptanalysis workbench for the Solitaire hand cipher.",
    )
    parser.add_argument("--version", action="version", version=f"solitaire-lab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="emit a keystream")
    _add_deck_source(p)
    p.add_argument("--len", type=_parse_count, required=True)
    p.add_argument("--mode", choices=("letters", "raw", "values"), default="letters",
                   help="letters: folded 1..26; raw: one value per update incl. jokers; values: jokers dropped, unfolded")
    p.add_argument("--format", choices=("text", "bytes"), default="text")
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("stats", help="distance profile, tuple table, chi-square")
    _add_deck_source(p)
    p.add_argument("--len", type=_parse_count, required=True)
    p.add_argument("--mod", type=int, choices=(26, 54), default=26)
    p.add_argument("--dist", type=int, default=26, help="largest repeat distance tracked")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True, help="output prefix for the CSV artifacts")
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("trace", help="instrumented run and top-card-on-repeat histogram")
    _add_deck_source(p)
    p.add_argument("--len", type=_parse_count, required=True, help="number of cipher steps")
    p.add_argument("--out", required=True, help="output prefix")
    p.add_argument("--dump-traces", metavar="FILE", help="also write the full per-step trace CSV")
    p.set_defaults(func=_cmd_trace)

    p = sub.add_parser("model", help="closed-form analytic constants")
    p.add_argument("--out", help="CSV file (default stdout)")
    p.set_defaults(func=_cmd_model)

    p = sub.add_parser("census", help="exhaustive functional-graph census for small decks")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--max-states", type=int, default=graph_mod.DEFAULT_STATE_BUDGET)
    p.add_argument("--out", required=True, help="output prefix")
    p.set_defaults(func=_cmd_census)

    p = sub.add_parser("preimages", help="pre-images of a deck under one update")
    _add_deck_source(p)
    p.add_argument("--out", help="write decks here instead of stdout")
    p.set_defaults(func=_cmd_preimages)

    p = sub.add_parser("attack", help="exploitation scenario simulations")
    attack_sub = p.add_subparsers(dest="attack_command", required=True)

    pc = attack_sub.add_parser("cred", help="repeated-credential difference attack")
    pc.add_argument("--credential", required=True)
    pc.add_argument("--sessions", type=_parse_count, default=50_000)
    pc.add_argument("--seed", type=_parse_seed, required=True)
    pc.add_argument("--out", required=True, help="output prefix")
    pc.set_defaults(func=_cmd_attack_cred)

    pa = attack_sub.add_parser("causal", help="derived-keystream repeat count test")
    group = pa.add_mutually_exclusive_group(required=True)
    group.add_argument("--ciphertext")
    group.add_argument("--ciphertext-file")
    group = pa.add_mutually_exclusive_group(required=True)
    group.add_argument("--plaintext")
    group.add_argument("--plaintext-file")
    pa.add_argument("--rate", type=float, default=model_mod.OBSERVED_LETTER_REPEAT_RATE)
    pa.add_argument("--out", help="CSV file (default stdout)")
    pa.set_defaults(func=_cmd_attack_causal)

    p = sub.add_parser("variant", help="keystream and stats for a modified scheme")
    _add_deck_source(p)
    p.add_argument("--variant", required=True, help='e.g. "E=deref2,U=25" (E in std|sum2|deref2)')
    p.add_argument("--len", type=_parse_count, required=True)
    p.add_argument("--mod", type=int, choices=(26, 54), default=26)
    p.add_argument("--dist", type=int, default=26)
    p.add_argument("--out", required=True, help="output prefix")
    p.add_argument("--stream-out", help="also write the generated stream as text")
    p.set_defaults(func=_cmd_variant)

    p = sub.add_parser("repro", help="run the acceptance battery")
    p.add_argument("--scale", choices=("full", "ci"), default="full")
    p.add_argument("--only", type=int, action="append", help="run only this criterion (repeatable)")
    p.add_argument("--list", action="store_true", help="list criteria and exit")
    p.set_defaults(func=_cmd_repro)

    return parser


def run(argv: list[str]) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, argv)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except SolitaireError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()

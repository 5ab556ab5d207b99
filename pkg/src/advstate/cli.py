"""Command-line entry point.

Subcommands::

    advstate selfplay --out DIR [--games N] [--players B,W] ...
    advstate attack   CORPUS... --out DIR [--kind value|policy|both] ...
    advstate verify   REPORT... [--oracle]
    advstate bench    CORPUS... --out DIR ...

Exit codes: 0 success, 1 usage or configuration error, 2 a report failed
verification, 3 the external engine failed. Progress goes to standard error;
results are written to files (``verify`` also prints its clause lines).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
import time
from dataclasses import replace
from pathlib import Path

from advstate.agents.bridge import BridgeError
from advstate.attack import attack_game, examiner_sims_of, speedup
from advstate.campaign import CampaignConfig, run_campaign
from advstate.config import CliConfig, ConfigError, build_config
from advstate.game import GameState
from advstate.record import GameRecord, IllegalMove
from advstate.reports import dumps, load_report, render_report, report_sgf, verify_report
from advstate.selfplay import self_play
from advstate.sgf import ParseError, emit_sgf, parse_sgf

log = logging.getLogger("advstate")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFY = 2
EXIT_ENGINE = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _int_list(text: str) -> tuple[int, ...]:
    try:
        out = tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not out:
        raise argparse.ArgumentTypeError("empty list")
    return out


def _common(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("game and agents")
    g.add_argument("--config", help="INI file with [rules]/[thresholds]/[target]/[examiner]/[attack] sections")
    g.add_argument("--rules", choices=["go", "nogo"], help="game rules (default go)")
    g.add_argument("--size", type=int, help="board size (default 5)")
    g.add_argument("--komi", type=float, help="Go komi (default 7 on odd boards, 0.5 on even)")
    g.add_argument("--target-sims", type=_int_list, help="target simulation counts, comma separated (default 1)")
    g.add_argument("--examiner-sims", type=int, help="examiner simulations (default 200)")
    g.add_argument("--seed", type=int, help="base seed (default 0)")
    g.add_argument("--engine-cmd", help="command line of an external analysis engine used as the examiner")
    g.add_argument("--engine-timeout", type=float, help="seconds to wait for each engine answer (default 30)")
    g.add_argument("-v", "--verbose", action="store_true", help="debug logging on standard error")


def _attack_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("attack")
    g.add_argument("--eta-eq", type=float, help="equivalence threshold (default 0.1)")
    g.add_argument("--eta-correct", type=float, help="correctness threshold (default 0.15)")
    g.add_argument("--eta-adv", type=float, help="adversarial gap threshold (default 0.5)")
    g.add_argument("--kind", choices=["value", "policy", "both"], help="which attack to run (default both)")
    g.add_argument("--steps", choices=["1step", "2step", "both"],
                   help="perturbation shapes; both tries 1step first and 2step only if it fails (default both)")
    g.add_argument("--workers", type=int, help="worker processes (default 1); output does not depend on it")
    g.add_argument("--no-territory", dest="territory", action="store_false", default=None,
                   help="do not restrict Go perturbations to settled points")
    g.add_argument("--no-hint", dest="hint", action="store_false", default=None,
                   help="use the plain examiner value of the perturbed state")
    g.add_argument("--no-filter", dest="filter", action="store_false", default=None,
                   help="check every candidate with the examiner (brute force)")
    g.add_argument("--exhaustive", action="store_true", default=None,
                   help="scan every state and step mode instead of stopping at the first example")
    g.add_argument("--oracle", action="store_true", default=None, help="use the exact solver as examiner")


def make_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="advstate", description="Search for adversarial perturbations of Go/NoGo agents.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("selfplay", help="generate a seeded self-play SGF corpus")
    _common(sp)
    sp.add_argument("--out", required=True, help="output directory for .sgf files")
    sp.add_argument("--games", type=int, help="number of games (default 10)")
    sp.add_argument("--players", type=_int_list,
                    help="black and white simulation counts, e.g. 800,5 (default: first target sims for both)")

    ap = sub.add_parser("attack", help="run attack campaigns over a corpus")
    ap.add_argument("inputs", nargs="+", help="SGF files or directories of them")
    ap.add_argument("--out", required=True, help="output directory")
    _common(ap)
    _attack_flags(ap)

    vp = sub.add_parser("verify", help="re-check attack reports with fresh agents")
    vp.add_argument("inputs", nargs="+", help="report JSON files")
    vp.add_argument("--oracle", action="store_true", default=None, help="re-check under the exact solver")
    vp.add_argument("-v", "--verbose", action="store_true", help="debug logging on standard error")

    bp = sub.add_parser("bench", help="compare filtered and brute-force search on a corpus")
    bp.add_argument("inputs", nargs="+", help="SGF files or directories of them")
    bp.add_argument("--out", required=True, help="output directory")
    _common(bp)
    _attack_flags(bp)
    return p


_NOT_CONFIG = {"config", "verbose"}


def config_from_args(ns: argparse.Namespace) -> CliConfig:
    d = {k: v for k, v in vars(ns).items() if k not in _NOT_CONFIG}
    if d.get("engine_cmd"):
        d.setdefault("examiner_kind", "engine")
    if "inputs" in d and d["inputs"] is not None:
        d["inputs"] = tuple(d["inputs"])
    return build_config(d, getattr(ns, "config", None))


# -- corpus helpers --------------------------------------------------------


def corpus_paths(inputs) -> list[Path]:
    out = []
    for name in inputs:
        p = Path(name)
        if p.is_dir():
            out.extend(sorted(p.glob("*.sgf")))
        elif p.exists():
            out.append(p)
        else:
            raise UsageError(f"no such file or directory: {name}")
    if not out:
        raise UsageError("the corpus is empty")
    return out


def load_corpus(inputs) -> tuple[list[GameRecord], list[str]]:
    """Parse every SGF; unreadable or illegal records are reported and skipped."""
    games, problems = [], []
    for path in corpus_paths(inputs):
        try:
            games.append(parse_sgf(path.read_text(), game_id=path.stem))
        except (ParseError, IllegalMove, ValueError) as e:
            problems.append(f"{path}: {e}")
            log.warning("skipping %s: %s", path, e)
    return games, problems


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _preflight_engine(cfg: CliConfig) -> None:
    # fail fast with the engine exit code instead of one error per game
    if "engine" not in (cfg.target_kind, cfg.examiner_spec().kind):
        return
    spec = cfg.examiner_spec() if cfg.examiner_spec().kind == "engine" else cfg.target_specs()[0]
    agent = spec.build("probe")
    agent.evaluate(GameState.new(cfg.size, cfg.game_rules()))


# -- subcommands -----------------------------------------------------------


def cmd_selfplay(cfg: CliConfig) -> int:
    out = Path(cfg.out)
    black, white = cfg.player_specs()
    sums = []
    for i in range(cfg.games):
        gid = f"game-{i:03d}"
        rec = self_play(cfg.size, cfg.game_rules(), black, white, cfg.seed + i, game_id=gid)
        text = emit_sgf(rec)
        _write(out / f"{gid}.sgf", text)
        sums.append(f"{hashlib.sha256(text.encode()).hexdigest()}  {gid}.sgf")
        log.info("game %d/%d: %d moves", i + 1, cfg.games, len(rec))
    _write(out / "SHA256SUMS", "\n".join(sums) + "\n")
    return EXIT_OK


def campaign_config(cfg: CliConfig) -> CampaignConfig:
    return CampaignConfig(cfg.target_specs(), cfg.examiner_spec(), cfg.settings(), cfg.kinds(), cfg.step_modes())


def cmd_attack(cfg: CliConfig) -> int:
    games, problems = load_corpus(cfg.inputs)
    _preflight_engine(cfg)
    out = Path(cfg.out)

    def progress(i, n, r):
        status = "error" if r.error else ("found" if r.reports else "none")
        log.info("[%d/%d] %s target=%d %s: %s", i, n, r.game_id, r.target_index, r.kind, status)

    camp = run_campaign(games, campaign_config(cfg), cfg.workers, progress)
    labels = [s.label() for s in camp.cfg.target_specs]
    for r in camp.results:
        for j, doc in enumerate(r.reports):
            stem = f"{r.game_id}_{labels[r.target_index]}_{r.kind}_{doc['step_mode']}_{doc['base_index']}"
            if len(r.reports) > 1:
                stem += f"_{j}"
            _write(out / "reports" / f"{stem}.json", dumps(doc))
            _write(out / "boards" / f"{stem}.txt", render_report(doc))
            _write(out / "sgf" / f"{stem}.sgf", report_sgf(doc))
    _write(out / "summary.json", camp.summary_json())
    _write(out / "summary.csv", camp.summary_csv())
    _write(out / "summary.txt", camp.summary_table())
    if problems:
        _write(out / "skipped.txt", "\n".join(problems) + "\n")
    log.info("%d reports written to %s", len(camp.reports), out)
    broken = [r.game_id for r in camp.results if r.engine_failure]
    if broken:
        # everything else was still written; the exit code flags the engine
        print(f"advstate: engine failure on {len(broken)} task(s): {', '.join(sorted(set(broken)))}",
              file=sys.stderr)
        return EXIT_ENGINE
    return EXIT_OK


def cmd_verify(cfg: CliConfig) -> int:
    override = cfg.examiner_spec() if cfg.oracle else None
    failed = 0
    for name in cfg.inputs:
        doc = load_report(name)
        v = verify_report(doc, override)
        print(f"{name}: {'PASS' if v.passed else 'FAIL'}")
        for line in v.lines():
            print(f"  {line}")
        if not v.passed:
            print(f"  violated: {', '.join(v.failed)}")
            failed += 1
    return EXIT_VERIFY if failed else EXIT_OK


def bench_rows(games: list[GameRecord], cfg: CliConfig) -> list[dict]:
    """Exhaustive filtered and brute-force runs of every game, target and kind."""
    rows = []
    examiner_spec = cfg.examiner_spec()
    sims = examiner_sims_of(examiner_spec)
    for game in games:
        for target_spec in cfg.target_specs():
            for kind in cfg.kinds():
                row = {"game_id": game.game_id, "target": target_spec.label(), "kind": kind.value}
                found = {}
                for use_filter in (True, False):
                    settings = replace(cfg.settings(), use_filter=use_filter, exhaustive=True)
                    examiner = examiner_spec.build("examiner")
                    target = target_spec.build("target")
                    t0 = time.perf_counter()
                    n_t = n_e = 0
                    ids = set()
                    for mode in cfg.step_modes():
                        res = attack_game(game, kind, target, examiner, settings, mode, sims)
                        n_t += res.stats.target_evals
                        n_e += res.stats.examiner_evals
                        ids |= {r.identity for r in res.reports}
                    tag = "filtered" if use_filter else "brute"
                    row[f"{tag}_target_evals"] = n_t
                    row[f"{tag}_examiner_evals"] = n_e
                    row[f"{tag}_seconds"] = round(time.perf_counter() - t0, 3)
                    row[f"{tag}_speedup"] = speedup(n_t, n_e, sims)
                    found[tag] = ids
                row["examples"] = len(found["filtered"])
                row["same_examples"] = found["filtered"] == found["brute"]
                row["examiner_ratio"] = (row["filtered_examiner_evals"] / row["brute_examiner_evals"]
                                         if row["brute_examiner_evals"] else 0.0)
                rows.append(row)
                log.info("bench %s %s %s: examiner %d vs %d", game.game_id, row["target"], kind.value,
                         row["filtered_examiner_evals"], row["brute_examiner_evals"])
    return rows


def bench_table(rows: list[dict]) -> str:
    head = ("GAME", "TARGET", "KIND", "N_T", "N_E", "N_E BRUTE", "RATIO", "SECONDS", "SECONDS BRUTE",
            "SPEEDUP", "SAME")
    lines = [head]
    for r in rows:
        lines.append((r["game_id"], r["target"], r["kind"], str(r["filtered_target_evals"]),
                      str(r["filtered_examiner_evals"]), str(r["brute_examiner_evals"]),
                      f"{r['examiner_ratio']:.3f}", f"{r['filtered_seconds']:.2f}", f"{r['brute_seconds']:.2f}",
                      f"{r['filtered_speedup']:.2f}", "yes" if r["same_examples"] else "NO"))
    widths = [max(len(row[i]) for row in lines) for i in range(len(head))]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in lines) + "\n"


def cmd_bench(cfg: CliConfig) -> int:
    games, problems = load_corpus(cfg.inputs)
    _preflight_engine(cfg)
    rows = bench_rows(games, cfg)
    out = Path(cfg.out)
    _write(out / "bench.json", json.dumps({"examiner_sims": examiner_sims_of(cfg.examiner_spec()), "rows": rows},
                                          indent=2, sort_keys=True) + "\n")
    _write(out / "bench.txt", bench_table(rows))
    if problems:
        _write(out / "skipped.txt", "\n".join(problems) + "\n")
    return EXIT_OK


COMMANDS = {"selfplay": cmd_selfplay, "attack": cmd_attack, "verify": cmd_verify, "bench": cmd_bench}


def main(argv=None) -> int:
    parser = make_parser()
    try:
        ns = parser.parse_args(argv)
    except UsageError as e:
        print(f"advstate: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if getattr(ns, "verbose", False) else logging.INFO,
                        format="%(levelname)s %(message)s", stream=sys.stderr, force=True)
    try:
        cfg = config_from_args(ns)
        return COMMANDS[cfg.command](cfg)
    except (ConfigError, UsageError) as e:
        print(f"advstate: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except BridgeError as e:
        print(f"advstate: engine failure: {e}", file=sys.stderr)
        return EXIT_ENGINE
    except (OSError, ValueError, KeyError) as e:
        print(f"advstate: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

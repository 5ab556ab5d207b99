"""Attack campaigns over a corpus: task fan-out, deterministic merge, summaries."""

from __future__ import annotations

import csv
import io
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from advstate.agents.agent import AgentSpec
from advstate.agents.bridge import BridgeError
from advstate.attack import AttackKind, AttackSettings, attack_game, examiner_sims_of, speedup
from advstate.perturbation import StepMode
from advstate.record import GameRecord
from advstate.reports import report_to_dict

log = logging.getLogger(__name__)

SUMMARY_COLUMNS = [
    "target", "kind", "games", "errors",
    "success_1step", "success_2step",
    "target_evals_mean", "examiner_evals_mean", "examiner_sims", "speedup",
    "candidates", "filtered_out",
]


@dataclass(frozen=True)
class CampaignConfig:
    target_specs: tuple[AgentSpec, ...]
    examiner_spec: AgentSpec
    settings: AttackSettings = field(default_factory=AttackSettings)
    kinds: tuple[AttackKind, ...] = (AttackKind.VALUE, AttackKind.POLICY)
    steps: tuple[StepMode, ...] = (StepMode.ONESTEP, StepMode.TWOSTEP)


@dataclass
class ScanResult:
    mode: str
    found: bool
    stats: dict


@dataclass
class TaskResult:
    game_id: str
    target_index: int
    kind: str
    scans: list[ScanResult] = field(default_factory=list)
    reports: list[dict] = field(default_factory=list)
    error: str | None = None
    engine_failure: bool = False

    def found_by(self, mode: StepMode) -> bool:
        """Success by ``mode`` counting earlier, cheaper modes too."""
        order = [StepMode.ONESTEP.value, StepMode.TWOSTEP.value]
        limit = order.index(mode.value)
        return any(sc.found and order.index(sc.mode) <= limit for sc in self.scans)


# per-process evaluation stores; evaluations are pure so reuse is safe, and
# only the most recent game is kept to bound memory
_STORES: dict = {}
_STORE_GAME: list = [None]


def _store(role: str, spec: AgentSpec, game_id: str) -> dict:
    if _STORE_GAME[0] != game_id:
        _STORES.clear()
        _STORE_GAME[0] = game_id
    return _STORES.setdefault((role, spec), {})


def run_task(game: GameRecord, target_index: int, kind: AttackKind, cfg: CampaignConfig) -> TaskResult:
    spec = cfg.target_specs[target_index]
    res = TaskResult(game.game_id, target_index, AttackKind(kind).value)
    try:
        game.validate()
        examiner = cfg.examiner_spec.build("examiner", _store("examiner", cfg.examiner_spec, game.game_id))
        target = spec.build("target", _store("target", spec, game.game_id))
        sims = examiner_sims_of(cfg.examiner_spec)
        for mode in cfg.steps:
            out = attack_game(game, kind, target, examiner, cfg.settings, mode, sims)
            res.scans.append(ScanResult(mode.value, out.found, out.stats.to_dict()))
            for r in out.reports:
                res.reports.append(report_to_dict(r, game, cfg.settings, spec, cfg.examiner_spec))
            if out.found and not cfg.settings.exhaustive:
                break
    except Exception as e:  # recorded per game, never fatal for the campaign
        res.error = f"{type(e).__name__}: {e}"
        res.engine_failure = isinstance(e, BridgeError)
        log.warning("game %s failed: %s", game.game_id, res.error)
    return res


def _run_packed(args) -> TaskResult:
    return run_task(*args)


def campaign_tasks(games: list[GameRecord], cfg: CampaignConfig) -> list[tuple]:
    return [(g, t, k, cfg) for g in games for t in range(len(cfg.target_specs)) for k in cfg.kinds]


def run_campaign(games: list[GameRecord], cfg: CampaignConfig, workers: int = 1, progress=None) -> "Campaign":
    """Attack every (game, target, kind); results come back in task order for any worker count."""
    tasks = campaign_tasks(games, cfg)
    results: list[TaskResult] = []
    if workers <= 1:
        it = map(_run_packed, tasks)
        for i, r in enumerate(it):
            results.append(r)
            if progress:
                progress(i + 1, len(tasks), r)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for i, r in enumerate(pool.map(_run_packed, tasks, chunksize=1)):
                results.append(r)
                if progress:
                    progress(i + 1, len(tasks), r)
    return Campaign(cfg, [g.game_id for g in games], results)


@dataclass
class Campaign:
    cfg: CampaignConfig
    game_ids: list[str]
    results: list[TaskResult]

    @property
    def reports(self) -> list[dict]:
        return [d for r in self.results for d in r.reports]

    def summary_rows(self) -> list[dict]:
        rows = []
        sims = examiner_sims_of(self.cfg.examiner_spec)
        for ti, spec in enumerate(self.cfg.target_specs):
            for kind in self.cfg.kinds:
                cell = [r for r in self.results if r.target_index == ti and r.kind == kind.value]
                n = len(cell)
                t_total = sum(sc.stats["target_evals"] for r in cell for sc in r.scans)
                e_total = sum(sc.stats["examiner_evals"] for r in cell for sc in r.scans)
                rows.append({
                    "target": spec.label(),
                    "kind": kind.value,
                    "games": n,
                    "errors": sum(1 for r in cell if r.error),
                    "success_1step": sum(r.found_by(StepMode.ONESTEP) for r in cell) / n if n else 0.0,
                    "success_2step": sum(r.found_by(StepMode.TWOSTEP) for r in cell) / n if n else 0.0,
                    "target_evals_mean": t_total / n if n else 0.0,
                    "examiner_evals_mean": e_total / n if n else 0.0,
                    "examiner_sims": sims,
                    "speedup": speedup(t_total, e_total, sims),
                    "candidates": sum(sc.stats["candidate_count"] for r in cell for sc in r.scans),
                    "filtered_out": sum(sc.stats["filtered_out"] for r in cell for sc in r.scans),
                })
        return rows

    def summary_json(self) -> str:
        doc = {
            "format": "advstate-campaign-summary",
            "version": 1,
            "games": self.game_ids,
            "settings": self.cfg.settings.to_dict(),
            "examiner": self.cfg.examiner_spec.to_dict(),
            "targets": [s.to_dict() for s in self.cfg.target_specs],
            "steps": [m.value for m in self.cfg.steps],
            "rows": self.summary_rows(),
            "tasks": [
                {
                    "game_id": r.game_id,
                    "target": r.target_index,
                    "kind": r.kind,
                    "error": r.error,
                    "scans": [{"mode": sc.mode, "found": sc.found, **sc.stats} for sc in r.scans],
                }
                for r in self.results
            ],
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    def summary_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=SUMMARY_COLUMNS, lineterminator="\n")
        w.writeheader()
        for row in self.summary_rows():
            w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
        return buf.getvalue()

    def summary_table(self) -> str:
        """Human-readable table with the usual success-rate / call-count / speedup layout."""
        head = ("TARGET", "KIND", "GAMES", "SUCCESS 1STEP", "SUCCESS 2STEP", "EXEC TARGET",
                "EXEC EXAMINER", "SPEEDUP")
        rows = [head]
        for r in self.summary_rows():
            rows.append((
                r["target"], r["kind"], str(r["games"]),
                f"{100 * r['success_1step']:.1f}%", f"{100 * r['success_2step']:.1f}%",
                f"{r['target_evals_mean']:.1f}", f"{r['examiner_evals_mean']:.1f}", f"{r['speedup']:.2f}",
            ))
        widths = [max(len(row[i]) for row in rows) for i in range(len(head))]
        lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in rows]
        return "\n".join(lines) + "\n"

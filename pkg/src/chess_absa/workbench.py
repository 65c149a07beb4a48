"""Annotation workbench: task assignment, append-only submission log,
and the HTTP JSON API consumed by the browser frontend."""


import json
import random
import threading
import time
from dataclasses import dataclass, asdict, replace
from pathlib import Path
from typing import Optional

from .corpus import AnnotationRecord, cohen_kappa

PLAYER_OPTIONS = ("White", "Black")
SENTIMENT_OPTIONS = ("Positive", "Negative", "Neutral", "NotSure")


class WorkbenchError(Exception):
    pass


class NoAnnotators(WorkbenchError):
    pass


class UnknownAnnotator(WorkbenchError):
    pass


class UnknownTask(WorkbenchError):
    pass


class ValidationFailure(WorkbenchError):
    pass


@dataclass(frozen=True)
class AnnotationTask:
    task_id: str
    record_id: str
    text: str
    predicate_span: tuple[int, int]
    predicate_lemma: str
    board_fen: Optional[str]
    assigned_annotator: str
    common: bool
    player_options: tuple = PLAYER_OPTIONS
    sentiment_options: tuple = SENTIMENT_OPTIONS

    def to_json(self) -> dict:
        d = asdict(self)
        d["predicate_span"] = list(self.predicate_span)
        d["player_options"] = list(self.player_options)
        d["sentiment_options"] = list(self.sentiment_options)
        return d


@dataclass(frozen=True)
class AnnotationSubmission:
    task_id: str
    annotator_id: str
    player: str
    sentiment: str
    timestamp: float


def create_tasks(records, iaa_fraction: float, annotators, seed: int) -> list[AnnotationTask]:
    """Common-subset tasks are duplicated for every annotator; the rest
    are partitioned round-robin.  Deterministic under the seed; task
    order is stable by record id so sessions are resumable."""
    annotators = list(annotators)
    if not annotators:
        raise NoAnnotators("at least one annotator required")
    ordered = sorted(records, key=lambda r: r.record_id)
    ids = [r.record_id for r in ordered]
    rng = random.Random(seed)
    shuffled = ids[:]
    rng.shuffle(shuffled)
    n_common = int(len(ids) * iaa_fraction)
    common = set(shuffled[:n_common])
    rest = [i for i in ids if i not in common]

    by_id = {r.record_id: r for r in ordered}
    tasks = []

    def make(rec: AnnotationRecord, annotator: str, is_common: bool) -> AnnotationTask:
        return AnnotationTask(
            task_id=f"{rec.record_id}:{annotator}",
            record_id=rec.record_id,
            text=rec.text,
            predicate_span=tuple(rec.predicate_span),
            predicate_lemma=rec.predicate_lemma,
            board_fen=rec.board_fen,
            assigned_annotator=annotator,
            common=is_common,
        )

    for rid in sorted(common):
        for ann in annotators:
            tasks.append(make(by_id[rid], ann, True))
    for k, rid in enumerate(rest):
        tasks.append(make(by_id[rid], annotators[k % len(annotators)], False))
    return tasks


class Workbench:
    """Serves tasks and persists submissions to an append-only log.

    All mutations funnel through one lock; the full served/answered state
    is reconstructable by replaying the log.
    """

    def __init__(self, records, tasks, log_path):
        self.records = {r.record_id: r for r in records}
        self.tasks = {t.task_id: t for t in tasks}
        self.order = sorted(self.tasks)  # stable by record id then annotator
        self.annotators = sorted({t.assigned_annotator for t in tasks})
        self.log_path = Path(log_path)
        self.answers: dict[str, AnnotationSubmission] = {}
        self.log_length = 0
        self._lock = threading.Lock()
        if self.log_path.exists():
            self._replay()

    def _replay(self) -> None:
        with open(self.log_path, encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                obj = json.loads(line)
                sub = AnnotationSubmission(**obj)
                self.log_length += 1
                if sub.task_id in self.tasks:
                    self._apply(sub)

    def _apply(self, sub: AnnotationSubmission) -> None:
        self.answers[sub.task_id] = sub
        task = self.tasks[sub.task_id]
        rec = self.records[task.record_id]
        self.records[task.record_id] = replace(
            rec, player=sub.player, sentiment=sub.sentiment,
            annotator_id=sub.annotator_id)

    def _check_annotator(self, annotator_id: str) -> None:
        if annotator_id not in self.annotators:
            raise UnknownAnnotator(f"unknown annotator {annotator_id!r}")

    def next_task(self, annotator_id: str) -> Optional[AnnotationTask]:
        """First unanswered task assigned to the annotator, or None."""
        self._check_annotator(annotator_id)
        for task_id in self.order:
            task = self.tasks[task_id]
            if task.assigned_annotator == annotator_id and task_id not in self.answers:
                return task
        return None

    def submit(self, sub: AnnotationSubmission) -> dict:
        if sub.task_id not in self.tasks:
            raise UnknownTask(f"unknown task {sub.task_id!r}")
        task = self.tasks[sub.task_id]
        if sub.annotator_id != task.assigned_annotator:
            raise ValidationFailure(
                f"task {sub.task_id} is not assigned to {sub.annotator_id!r}")
        if sub.player not in task.player_options:
            raise ValidationFailure(f"invalid player {sub.player!r}")
        if sub.sentiment not in task.sentiment_options:
            raise ValidationFailure(f"invalid sentiment {sub.sentiment!r}")
        with self._lock:
            with open(self.log_path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(asdict(sub)) + "\n")
            self.log_length += 1
            replaced = sub.task_id in self.answers
            self._apply(sub)
        return {"ok": True, "task_id": sub.task_id, "replaced": replaced}

    def progress(self, annotator_id: str) -> dict:
        self._check_annotator(annotator_id)
        mine = [t for t in self.tasks.values()
                if t.assigned_annotator == annotator_id]
        answered = sum(1 for t in mine if t.task_id in self.answers)
        out = {"annotator": annotator_id, "answered": answered,
               "remaining": len(mine) - answered, "kappa": None}
        kappa = self.common_kappa()
        if kappa is not None:
            out["kappa"] = kappa
        return out

    def common_kappa(self, min_answers: int = 10) -> Optional[float]:
        """Cohen's kappa over the common subset, once at least two
        annotators have each answered `min_answers` common tasks."""
        per_ann: dict[str, dict[str, str]] = {}
        for task in self.tasks.values():
            if not task.common or task.task_id not in self.answers:
                continue
            sub = self.answers[task.task_id]
            per_ann.setdefault(task.assigned_annotator, {})[task.record_id] = sub.sentiment
        ready = [a for a in sorted(per_ann) if len(per_ann[a]) >= min_answers]
        if len(ready) < 2:
            return None
        a, b = ready[:2]
        shared = sorted(set(per_ann[a]) & set(per_ann[b]))
        if len(shared) < min_answers:
            return None
        return cohen_kappa([per_ann[a][r] for r in shared],
                           [per_ann[b][r] for r in shared])

    def updated_records(self) -> list[AnnotationRecord]:
        return [self.records[k] for k in sorted(self.records)]


def create_app(bench: Workbench, static_dir=None):
    """FastAPI app over the workbench; optionally serves the built
    frontend assets at /."""
    from fastapi import FastAPI, HTTPException
    from fastapi.responses import JSONResponse
    from pydantic import BaseModel

    class SubmissionBody(BaseModel):
        task_id: str
        annotator_id: str
        player: str
        sentiment: str
        timestamp: Optional[float] = None

    app = FastAPI(title="chess-absa annotation workbench")

    @app.get("/api/health")
    def health():
        return {"status": "ok", "tasks": len(bench.tasks),
                "submissions": bench.log_length}

    @app.get("/api/task")
    def get_task(annotator: str):
        try:
            task = bench.next_task(annotator)
        except UnknownAnnotator as e:
            raise HTTPException(status_code=404, detail=str(e))
        if task is None:
            return JSONResponse({"done": True})
        return task.to_json()

    @app.post("/api/submit")
    def post_submit(body: SubmissionBody):
        sub = AnnotationSubmission(
            task_id=body.task_id, annotator_id=body.annotator_id,
            player=body.player, sentiment=body.sentiment,
            timestamp=body.timestamp or time.time())
        try:
            return bench.submit(sub)
        except UnknownTask as e:
            raise HTTPException(status_code=404, detail=str(e))
        except ValidationFailure as e:
            raise HTTPException(status_code=400, detail=str(e))

    @app.get("/api/progress")
    def get_progress(annotator: str):
        try:
            return bench.progress(annotator)
        except UnknownAnnotator as e:
            raise HTTPException(status_code=404, detail=str(e))

    if static_dir and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles
        app.mount("/", StaticFiles(directory=str(static_dir), html=True),
                  name="frontend")
    return app

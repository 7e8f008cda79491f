"""Scoring of prediction files against dataset manifests.

Classification: 5x5 confusion matrix, per-class precision/recall/F1,
micro-F1 (equals accuracy for single-label multiclass), and macro-averaged
one-vs-rest ranking AUC (Mann-Whitney, ties at half credit). Regression:
mean absolute error on the exponent. Zero denominators yield 0 plus an
explicit flag, never a silent NaN.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.stats import rankdata

from .pipeline import SpecError
from .simulators import DiffusionModelKind

__all__ = [
    "PredictionSet",
    "EvaluationReport",
    "confusion_matrix",
    "precision_recall_f1",
    "mae",
    "auc_ovr",
    "evaluate",
    "load_predictions",
]

N_CLASSES = len(DiffusionModelKind)


@dataclass
class PredictionSet:
    """Per-record predictions aligned by id.

    Classification rows carry a predicted class code and optionally a full
    row of 5 scores; regression rows carry a predicted alpha.
    """

    ids: np.ndarray
    pred_codes: np.ndarray | None = None
    scores: np.ndarray | None = None  # [n, 5]
    pred_alphas: np.ndarray | None = None


@dataclass
class EvaluationReport:
    task: str
    n_records: int
    confusion: np.ndarray | None = None
    support: np.ndarray | None = None
    precision: np.ndarray | None = None
    recall: np.ndarray | None = None
    f1: np.ndarray | None = None
    micro_f1: float | None = None
    auc: float | None = None
    mae: float | None = None
    flags: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        doc = {"task": self.task, "n_records": self.n_records, "flags": self.flags}
        if self.confusion is not None:
            names = [k.name for k in DiffusionModelKind]
            doc["classes"] = names
            doc["confusion"] = self.confusion.tolist()
            doc["support"] = self.support.tolist()
            doc["per_class"] = {
                name: {
                    "precision": float(self.precision[i]),
                    "recall": float(self.recall[i]),
                    "f1": float(self.f1[i]),
                }
                for i, name in enumerate(names)
            }
            doc["micro_f1"] = self.micro_f1
            doc["auc"] = self.auc
            doc["auc_averaging"] = "macro one-vs-rest (Mann-Whitney, ties 0.5)"
        if self.mae is not None:
            doc["mae"] = self.mae
        return doc

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    def to_text(self) -> str:
        lines = [f"task: {self.task}   records: {self.n_records}"]
        if self.confusion is not None:
            names = [k.name for k in DiffusionModelKind]
            head = "true\\pred " + "".join(f"{n:>7s}" for n in names)
            lines += ["", "confusion matrix (rows = truth):", head]
            for i, name in enumerate(names):
                row = "".join(f"{int(v):7d}" for v in self.confusion[i])
                lines.append(f"{name:>9s} {row}")
            lines += ["", f"{'class':>9s} {'prec':>7s} {'recall':>7s} {'f1':>7s} {'support':>8s}"]
            for i, name in enumerate(names):
                lines.append(
                    f"{name:>9s} {self.precision[i]:7.3f} {self.recall[i]:7.3f} "
                    f"{self.f1[i]:7.3f} {int(self.support[i]):8d}"
                )
            lines.append("")
            lines.append(f"micro-F1 (= accuracy): {self.micro_f1:.4f}")
            if self.auc is not None:
                lines.append(f"AUC (macro OVR):       {self.auc:.4f}")
        if self.mae is not None:
            lines.append(f"MAE: {self.mae:.4f}")
        for flag in self.flags:
            lines.append(f"flag: {flag}")
        return "\n".join(lines)

    def confusion_csv(self, path) -> None:
        names = [k.name for k in DiffusionModelKind]
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["true\\pred"] + names)
            for i, name in enumerate(names):
                w.writerow([name] + [int(v) for v in self.confusion[i]])


def confusion_matrix(truth, pred) -> np.ndarray:
    """counts[i, j] = records with true class i predicted as class j."""
    t = np.asarray(truth, dtype=np.int64)
    p = np.asarray(pred, dtype=np.int64)
    if len(t) == 0:
        raise ValueError("confusion_matrix needs at least one record")
    if t.shape != p.shape:
        raise ValueError(f"truth/pred length mismatch: {t.shape} vs {p.shape}")
    for arr, name in ((t, "truth"), (p, "pred")):
        if arr.min() < 0 or arr.max() >= N_CLASSES:
            raise ValueError(f"{name} codes outside 0..{N_CLASSES - 1}")
    counts = np.zeros((N_CLASSES, N_CLASSES), dtype=np.int64)
    np.add.at(counts, (t, p), 1)
    return counts


def precision_recall_f1(confusion: np.ndarray) -> dict:
    """Per-class precision/recall/F1 plus micro-F1.

    precision_c = diag_c / column-sum_c, recall_c = diag_c / row-sum_c,
    F1 = 2PR/(P+R); micro-F1 = trace/total (the accuracy identity for
    single-label multiclass). Zero denominators give 0 and a flag.
    """
    c = np.asarray(confusion, dtype=np.float64)
    diag = np.diag(c)
    pred_totals = c.sum(axis=0)
    true_totals = c.sum(axis=1)
    flags = []
    precision = np.zeros(N_CLASSES)
    recall = np.zeros(N_CLASSES)
    f1 = np.zeros(N_CLASSES)
    for i, name in enumerate(k.name for k in DiffusionModelKind):
        if pred_totals[i] > 0:
            precision[i] = diag[i] / pred_totals[i]
        else:
            flags.append(f"precision[{name}] undefined (no predictions), set to 0")
        if true_totals[i] > 0:
            recall[i] = diag[i] / true_totals[i]
        else:
            flags.append(f"recall[{name}] undefined (no support), set to 0")
        if precision[i] + recall[i] > 0:
            f1[i] = 2.0 * precision[i] * recall[i] / (precision[i] + recall[i])
        else:
            flags.append(f"f1[{name}] undefined, set to 0")
    micro_f1 = float(diag.sum() / c.sum())
    return {
        "precision": precision,
        "recall": recall,
        "f1": f1,
        "micro_f1": micro_f1,
        "support": true_totals.astype(np.int64),
        "flags": flags,
    }


def mae(truth_alphas, pred_alphas) -> float:
    """Mean absolute error (1/N) sum |alpha_pred - alpha_truth|."""
    t = np.asarray(truth_alphas, dtype=np.float64)
    p = np.asarray(pred_alphas, dtype=np.float64)
    if len(t) == 0:
        raise ValueError("mae needs at least one record")
    if t.shape != p.shape:
        raise ValueError(f"truth/pred length mismatch: {t.shape} vs {p.shape}")
    return float(np.mean(np.abs(p - t)))


def auc_ovr(truth, scores) -> tuple[float, list[str]]:
    """Macro-average one-vs-rest ranking AUC from full 5-way score rows.

    Per class: Mann-Whitney AUC of the class score, positives vs rest, ties
    at 0.5 credit. Classes absent from truth (or covering all records) are
    skipped with a flag. Returns (auc, flags).
    """
    t = np.asarray(truth, dtype=np.int64)
    s = np.asarray(scores, dtype=np.float64)
    if s.ndim != 2 or s.shape != (len(t), N_CLASSES):
        raise ValueError(f"scores must be [n, {N_CLASSES}], got {s.shape}")
    if not np.all(np.isfinite(s)):
        raise ValueError("scores must be finite")
    aucs = []
    flags = []
    for i, name in enumerate(k.name for k in DiffusionModelKind):
        pos = t == i
        n_pos = int(pos.sum())
        n_neg = len(t) - n_pos
        if n_pos == 0 or n_neg == 0:
            flags.append(f"auc[{name}] skipped (class absent or exhaustive)")
            continue
        ranks = rankdata(s[:, i])  # average ranks give ties 0.5 credit
        u = ranks[pos].sum() - n_pos * (n_pos + 1) / 2.0
        aucs.append(u / (n_pos * n_neg))
    if not aucs:
        flags.append("auc undefined: no scorable class")
        return 0.0, flags
    return float(np.mean(aucs)), flags


def _align(manifest_records, ids) -> np.ndarray:
    """Indices into manifest_records for each prediction id; errors list
    missing/duplicate ids explicitly."""
    by_id = {r.id: i for i, r in enumerate(manifest_records)}
    ids = np.asarray(ids, dtype=np.int64)
    if len(ids) == 0:
        raise ValueError("empty prediction set")
    uniq, counts = np.unique(ids, return_counts=True)
    dupes = uniq[counts > 1]
    if len(dupes):
        raise ValueError(f"duplicate prediction ids: {dupes[:10].tolist()}")
    missing = [int(i) for i in ids if int(i) not in by_id]
    if missing:
        raise ValueError(
            f"{len(missing)} prediction ids missing from manifest: {missing[:10]}"
        )
    return np.array([by_id[int(i)] for i in ids], dtype=np.int64)


def evaluate(manifest_records, predictions: PredictionSet, task: str) -> EvaluationReport:
    """Score a prediction set against manifest truth for the given task."""
    if task not in ("classification", "regression"):
        raise ValueError(f"unknown task {task!r}")
    idx = _align(manifest_records, predictions.ids)
    report = EvaluationReport(task=task, n_records=len(idx))
    if task == "classification":
        if predictions.pred_codes is None:
            raise ValueError("classification evaluation needs predicted class codes")
        truth = np.array([manifest_records[i].model_code for i in idx], dtype=np.int64)
        report.confusion = confusion_matrix(truth, predictions.pred_codes)
        prf = precision_recall_f1(report.confusion)
        report.precision = prf["precision"]
        report.recall = prf["recall"]
        report.f1 = prf["f1"]
        report.micro_f1 = prf["micro_f1"]
        report.support = prf["support"]
        report.flags.extend(prf["flags"])
        if predictions.scores is not None:
            auc, auc_flags = auc_ovr(truth, predictions.scores)
            report.auc = auc
            report.flags.extend(auc_flags)
    else:
        if predictions.pred_alphas is None:
            raise ValueError("regression evaluation needs predicted alphas")
        truth = np.array([manifest_records[i].alpha for i in idx], dtype=np.float64)
        report.mae = mae(truth, predictions.pred_alphas)
    return report


def load_predictions(path, task: str) -> PredictionSet:
    """Read a predictions CSV.

    classification: id,pred_code[,score_0..score_4]; regression: id,pred_alpha.
    """
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        names = reader.fieldnames or []
        rows = list(reader)
    if not rows:
        raise SpecError(f"prediction file {path} is empty")
    score_cols = [f"score_{i}" for i in range(N_CLASSES)]
    try:
        if task == "classification":
            if "id" not in names or "pred_code" not in names:
                raise SpecError(
                    "classification predictions need header id,pred_code[,score_0..score_4]"
                )
            has_scores = all(c in names for c in score_cols)
            ids = np.array([int(r["id"]) for r in rows])
            codes = np.array([int(r["pred_code"]) for r in rows])
            scores = None
            if has_scores:
                scores = np.array(
                    [[float(r[c]) for c in score_cols] for r in rows], dtype=np.float64
                )
            return PredictionSet(ids=ids, pred_codes=codes, scores=scores)
        if "id" not in names or "pred_alpha" not in names:
            raise SpecError("regression predictions need header id,pred_alpha")
        ids = np.array([int(r["id"]) for r in rows])
        alphas = np.array([float(r["pred_alpha"]) for r in rows], dtype=np.float64)
        return PredictionSet(ids=ids, pred_alphas=alphas)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, SpecError):
            raise
        raise SpecError(f"malformed prediction file {path}: {exc}") from exc

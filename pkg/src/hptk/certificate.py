"""Certificates: canonical machine form plus an aligned text rendering.

The machine form is JSON with sorted keys and every scalar written as a
canonical coefficient string. Lists are built in basis/word order, never in
completion order, so two runs produce identical bytes whatever the thread
count.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

from . import __version__
from .algebra import StructureReport
from .document import format_coef


def digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _plain(obj):
    if isinstance(obj, Fraction):
        return format_coef(obj)
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(x) for x in obj]
    return obj


def vec_terms(vec: Dict[Any, Fraction], label) -> List[List[str]]:
    """``[[label, coef], ...]`` in key order."""
    return [[label(k), format_coef(c)] for k, c in sorted(vec.items(), key=lambda kv: _order(kv[0])) if c]


def _order(key):
    if isinstance(key, tuple) and len(key) == 2 and isinstance(key[1], tuple):
        return (len(key[1]), key[1], key[0])
    return (0, key, 0) if not isinstance(key, tuple) else (len(key), key, 0)


def operation_table(maps: Dict[tuple, Dict[Any, Fraction]], in_label, out_label) -> List[Dict[str, Any]]:
    rows = []
    for w in sorted(maps, key=lambda w: (len(w), [_order(x) for x in w])):
        v = maps[w]
        if v:
            rows.append({"inputs": [in_label(x) for x in w], "output": vec_terms(v, out_label)})
    return rows


class Certificate:
    def __init__(self, command: str, source: str, text: str, params: Dict[str, Any]):
        self.data: Dict[str, Any] = {
            "tool": "hptk",
            "version": __version__,
            "command": command,
            "input": {"source": source, "sha256": digest(text)},
            "params": _plain(params),
            "checks": [],
            "tables": {},
        }

    def add_report(self, section: str, report: StructureReport) -> None:
        for law in report.to_json():
            law["law"] = f"{section}.{law['law']}"
            self.data["checks"].append(law)

    def add_check(self, name: str, passed: bool, detail: Optional[Dict[str, Any]] = None) -> None:
        entry = {"law": name, "passed": bool(passed), "checked": 1, "failures": 0 if passed else 1,
                 "witnesses": [] if passed or detail is None else [_plain(detail)]}
        self.data["checks"].append(entry)

    def add_table(self, name: str, value: Any) -> None:
        self.data["tables"][name] = _plain(value)

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.data["checks"])

    def finish(self) -> "Certificate":
        self.data["verdict"] = "pass" if self.passed else "fail"
        return self

    def serialize(self) -> str:
        return json.dumps(self.data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"

    def render(self) -> str:
        return render(self.data)


def _align(rows: Sequence[Sequence[str]]) -> List[str]:
    if not rows:
        return []
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    return ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]


def _fmt_terms(terms) -> str:
    if not terms:
        return "0"
    out = []
    for lab, c in terms:
        out.append(lab if c == "1" else f"-{lab}" if c == "-1" else f"{c}*{lab}")
    return " + ".join(out).replace("+ -", "- ")


def render(data: Dict[str, Any]) -> str:
    lines = [f"hptk {data['version']}  {data['command']}  {data['input']['source']}",
             f"sha256 {data['input']['sha256']}"]
    if data["params"]:
        lines.append("params " + " ".join(f"{k}={data['params'][k]}" for k in sorted(data["params"])))
    for name in sorted(data["tables"]):
        tab = data["tables"][name]
        lines.append("")
        lines.append(f"[{name}]")
        if not tab:
            lines.append("(all zero)")
            continue
        if isinstance(tab, list) and tab and isinstance(tab[0], dict) and "inputs" in tab[0]:
            lines += _align([[", ".join(r["inputs"]), "->", _fmt_terms(r["output"])] for r in tab])
        elif isinstance(tab, dict):
            rows = []
            for k in sorted(tab):
                v = tab[k]
                rows.append([k, _fmt_terms(v) if isinstance(v, list) else json.dumps(v, sort_keys=True)])
            lines += _align(rows)
        else:
            lines.append(json.dumps(tab, sort_keys=True))
    lines.append("")
    rows = [["PASS" if c["passed"] else "FAIL", c["law"], f"{c['checked'] - c['failures']}/{c['checked']}"]
            for c in data["checks"]]
    lines += _align(rows)
    for c in data["checks"]:
        for w in c["witnesses"][:3]:
            lines.append(f"  witness {c['law']}: {json.dumps(w, sort_keys=True)}")
    lines.append(f"verdict {data.get('verdict', 'pass' if all(c['passed'] for c in data['checks']) else 'fail')}")
    return "\n".join(lines) + "\n"

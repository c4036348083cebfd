"""
报告：检查项 -> 规范文本 (带 sha256) + 机器可读摘要
校验和只覆盖正文；时间戳放在尾部，不影响可复现性。
"""
import datetime
import hashlib
import json
import os
from dataclasses import dataclass, field as dc_field
from typing import Any, Dict, List, Optional, Sequence

from loguru import logger

# 每个检查项必须引用这张表里的一个锚点
ANCHORS: Dict[str, str] = {
    "sections-dimension": "dim S_k = dk + 1 - g, complement of I(k) in V_k",
    "vertex-witness": "dim W(p)_d ∩ I(d) is 1 on U, 3 on C', at least 6 on S",
    "cone-equation": "f_p spans the degree-d cones through C with vertex p",
    "conic-dimensions": "dim R_{d-1}(p) and dim R_d(p) at points of U and C'",
    "divisor-degree": "a degree-k form cuts a divisor of degree dk on C",
    "limit-cone": "the flat limit of <f_{p_t}> is f_p·h, h the plane through l and t_p",
    "limit-cone-tangent": "along the tangent line h is the osculating plane at p",
    "limit-system-gap-1": "R^l_{d-1}(p) = <R_{d-1}(p), w·f_x>, one extra dimension",
    "limit-system-gap-2": "R^l_d(p) has two extra dimensions and vanishing order d-2 at p",
    "cone-map-3to1": "R_3 agrees on the three cube-root vertices of the twisted cubic",
    "cone-map-cosets": "on the line (b:0:0:-1) equal R_3 means b/b' is a cube root of unity",
    "gamma-positive": "dim Γ(p) > 0, so the differential of the cone map is injective",
    "dphi-corank": "corank of the differential: 2 for (3,0), 1 for (4,1), 0 for (4,0)",
    "dominance": "dim P_U(E) >= dim P(S_d) exactly when d <= 4",
    "injectivity": "distinct general vertices give distinct R_k",
    "blowup-numbers": "M·L·E = d and M²·E = 2((d-1)² - g) on the blow-up along C",
    "node-count": "projection from a general point has (d-1)(d-2)/2 - g nodes",
    "ramification-count": "projection from a general line has 2g - 2 + 2d ramification points",
    "torsion-point": "16q = O and 8q != O",
    "embedding-quadrics": "the |4O| embedding lies on both quadrics",
    "quadric-pencil": "the pencil of quadrics has four singular members with vertices in S",
    "flex": "contact order of the osculating plane at O",
    "cone-witness": "a quartic cone with vertex off C cuts exactly 16q",
    "osculating-quartic": "the quartic cone with vertex q meets the projection to order 12",
    "osculating-residual": "the osculating plane at q cuts 3q + q'",
    "pencil-base-point": "k_p and f_p are independent and both pass through the image of q",
    "base-locus": "the pencil has a single base point of multiplicity 16",
    "irreducibility": "every member of the pencil is absolutely irreducible",
    "smooth-member": "some member of the pencil is smooth",
    "non-isotrivial": "f_p is a two-nodal member, so the pencil is not isotrivial",
}


@dataclass
class ClaimResult:
    """一个检查项的结果 (相当于一次 Observation)"""
    name: str
    anchor: str
    passed: bool
    inputs: Dict[str, Any] = dc_field(default_factory=dict)
    evidence: List[str] = dc_field(default_factory=list)
    error_msg: Optional[str] = None

    def __post_init__(self):
        if self.anchor not in ANCHORS:
            raise ValueError(f"未知锚点: {self.anchor}")

    @property
    def status(self) -> str:
        if self.error_msg is not None:
            return "ERROR"
        return "PASS" if self.passed else "FAIL"

    def lines(self) -> List[str]:
        inputs = ", ".join(f"{k}={_fmt(self.inputs[k])}" for k in sorted(self.inputs))
        out = [f"[{self.status}] {self.name}",
               f"  anchor: {self.anchor} | {ANCHORS[self.anchor]}",
               f"  inputs: {inputs}"]
        out += [f"  evidence: {line}" for line in self.evidence]
        if self.error_msg is not None:
            out.append(f"  error: {self.error_msg}")
        return out

    def summary(self) -> Dict[str, Any]:
        return {"anchor": self.anchor, "name": self.name, "passed": self.passed, "status": self.status}


def _fmt(value: Any) -> str:
    if isinstance(value, (list, tuple)):
        return "(" + " ".join(_fmt(v) for v in value) + ")"
    return str(value)


@dataclass
class Report:
    scenario: str
    body: str
    checksum: str
    trailer: str
    summary: Dict[str, Any]

    @property
    def passed(self) -> bool:
        return self.summary["passed"]

    @property
    def text(self) -> str:
        return self.body + self.trailer

    def summary_json(self) -> str:
        return json.dumps(self.summary, ensure_ascii=False, sort_keys=True, indent=2)


def emit_report(results: Sequence[ClaimResult], scenario: str = "",
                inputs: Optional[Dict[str, Any]] = None, timestamp: Optional[str] = None) -> Report:
    """正文按固定顺序序列化；空列表也是合法报告"""
    inputs = inputs or {}
    lines = [f"scenario: {scenario}"]
    lines += [f"input.{k}: {_fmt(inputs[k])}" for k in sorted(inputs)]
    lines.append(f"claims: {len(results)}")
    for r in results:
        lines += r.lines()
    passed = all(r.passed for r in results)
    lines.append(f"result: {'PASS' if passed else 'FAIL'}")
    body = "\n".join(lines) + "\n"
    checksum = hashlib.sha256(body.encode("utf-8")).hexdigest()
    stamp = timestamp or datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
    trailer = f"--\nsha256: {checksum}\ngenerated: {stamp}\n"
    summary = {
        "scenario": scenario,
        "passed": passed,
        "checksum": checksum,
        "claims": [r.summary() for r in results],
        "failed": sorted({r.name for r in results if not r.passed}),
    }
    return Report(scenario, body, checksum, trailer, summary)


def write_report(report: Report, path: str) -> str:
    """写入 <path> 与 <path>.json；I/O 异常原样抛出"""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write(report.text)
    with open(path + ".json", "w", encoding="utf-8") as f:
        f.write(report.summary_json())
    logger.info(f"💾 [Report] 报告已写入 {path}")
    return path

"""
命令行报告
每类命令一个 pydantic 模型；--json 时直接序列化，否则按字段顺序输出 key: value 行
"""
import json
from typing import Dict, List, Optional

from pydantic import BaseModel

from .cross_section import Case1Result, CrossSection, ReturnSystem, SectionVerdict
from .flow_code import (
    CertificateVerdict, CodeImage, IsotopyVerdict, OpennessVerdict, SectionConditionVerdict,
    WordBlockCode,
)
from .invariants import FlowDecision, FlowInvariants
from .livsic import CycleVerdict, LocalFunction, VertexPotential
from .sft import IntMatrix, PeriodicOrbit, format_word


class InvariantsReport(BaseModel):
    ps: int
    bf_factors: List[int]
    free_rank: int
    group: str


class DecisionReport(BaseModel):
    verdict: str
    reason: str
    left: InvariantsReport
    right: InvariantsReport


class MoveReport(BaseModel):
    kind: str
    symbol: Optional[str] = None
    fresh_symbol: Optional[str] = None
    vertex: Optional[str] = None
    classes: Optional[List[List[str]]] = None
    matrix: List[List[int]]
    graph: str


class SectionReport(BaseModel):
    valid: bool
    max_return: Optional[int] = None
    witness: Optional[str] = None


class ReturnsReport(BaseModel):
    return_words: List[str]
    symbols: Dict[str, str]
    states: int
    matrix: List[List[int]]


class SectionDataReport(BaseModel):
    radius: int
    height: str
    centers: List[str]


class Case1Report(BaseModel):
    delta: str
    d: SectionDataReport
    d2: SectionDataReport
    psi_radius: int
    psi: Dict[str, str]
    intertwining_checked: int


class CodeReport(BaseModel):
    M: int
    windows: int
    ratios: Dict[str, str]


class ApplyReport(BaseModel):
    orbit: str
    image: str
    domain_length: int
    image_length: int
    hits: int


class SectionConditionReport(BaseModel):
    holds: bool
    period_bound: int
    witness: Optional[str] = None
    position: Optional[int] = None


class CertificateReport(BaseModel):
    certified: bool
    witness: Optional[str] = None
    total: Optional[str] = None
    potential: Dict[str, str] = {}


class IsotopyReport(BaseModel):
    valid: bool
    witness: Optional[List[str]] = None
    lhs: Optional[str] = None
    rhs: Optional[str] = None


class OpennessWitnessReport(BaseModel):
    k: int
    window: str
    member: str
    non_member: str


class OpennessReport(BaseModel):
    open: bool
    radius: Optional[int] = None
    k_max: int
    period_bound: int
    witnesses: List[OpennessWitnessReport] = []


class LivsicReport(BaseModel):
    zero: bool
    witness: Optional[str] = None
    total: Optional[str] = None
    potential: Dict[str, str] = {}
    coboundary: Dict[str, str] = {}


class CheckReport(BaseModel):
    name: str
    expected: str
    observed: str
    passed: bool


class ExampleReport(BaseModel):
    name: str
    passed: bool
    checks: List[CheckReport]


# ============================================================ 转换

def _orbit(o: Optional[PeriodicOrbit]) -> Optional[str]:
    return None if o is None else str(o)


def _matrix(A: IntMatrix) -> List[List[int]]:
    return [list(r) for r in A.rows]


def invariants_report(inv: FlowInvariants) -> InvariantsReport:
    return InvariantsReport(ps=inv.ps_number, bf_factors=list(inv.bf_factors), free_rank=inv.free_rank,
                            group=inv.group)


def decision_report(d: FlowDecision) -> DecisionReport:
    return DecisionReport(verdict=d.verdict, reason=d.reason, left=invariants_report(d.left),
                          right=invariants_report(d.right))


def section_report(v: SectionVerdict) -> SectionReport:
    return SectionReport(valid=v.valid, max_return=v.max_return, witness=_orbit(v.witness))


def returns_report(rs: ReturnSystem) -> ReturnsReport:
    return ReturnsReport(
        return_words=[format_word(w) for w in rs.return_words],
        symbols={s: format_word(rs.words[s]) for s in rs.symbols},
        states=len(rs.graph.graph.vertices),
        matrix=_matrix(rs.graph.matrix),
    )


def section_data_report(C: CrossSection) -> SectionDataReport:
    centers = sorted(C.centers, key=C.shift.sort_key)
    return SectionDataReport(radius=C.radius, height=str(C.height), centers=[format_word(w) for w in centers])


def case1_report(result: Case1Result, checked: int) -> Case1Report:
    return Case1Report(
        delta=str(result.delta),
        d=section_data_report(result.D),
        d2=section_data_report(result.D2),
        psi_radius=result.psi.M,
        psi={format_word(w): s for w, s in result.psi.table.items()},
        intertwining_checked=checked,
    )


def code_report(code: WordBlockCode) -> CodeReport:
    ratios = {format_word(w): str(c) for w, c in code.time_change().ratios.items()}
    return CodeReport(M=code.M, windows=len(code.table), ratios=ratios)


def apply_report(x: PeriodicOrbit, image: CodeImage) -> ApplyReport:
    return ApplyReport(orbit=str(x), image=str(image.orbit), domain_length=image.domain_length,
                       image_length=image.image_length, hits=image.hits)


def section_condition_report(v: SectionConditionVerdict) -> SectionConditionReport:
    return SectionConditionReport(holds=v.holds, period_bound=v.period_bound, witness=_orbit(v.witness),
                                  position=v.position)


def certificate_report(v: CertificateVerdict) -> CertificateReport:
    potential = {} if v.potential is None else {k: str(x) for k, x in v.potential.values.items()}
    return CertificateReport(certified=v.certified, witness=_orbit(v.witness),
                             total=None if v.certified else str(v.total), potential=potential)


def isotopy_report(v: IsotopyVerdict) -> IsotopyReport:
    return IsotopyReport(
        valid=v.valid,
        witness=None if v.witness is None else [format_word(w) for w in v.witness],
        lhs=None if v.lhs is None else str(v.lhs),
        rhs=None if v.rhs is None else str(v.rhs),
    )


def openness_report(v: OpennessVerdict) -> OpennessReport:
    return OpennessReport(
        open=v.open, radius=v.radius, k_max=v.k_max, period_bound=v.period_bound,
        witnesses=[OpennessWitnessReport(k=w.k, window=format_word(w.window), member=str(w.member),
                                         non_member=str(w.non_member)) for w in v.witnesses],
    )


def livsic_report(verdict: CycleVerdict, potential: Optional[VertexPotential] = None,
                  b: Optional[LocalFunction] = None) -> LivsicReport:
    return LivsicReport(
        zero=verdict.zero,
        witness=None if verdict.witness is None else f"({format_word(verdict.witness)})",
        total=None if verdict.zero else str(verdict.total),
        potential={} if potential is None else {v: str(x) for v, x in potential.values.items()},
        coboundary={} if b is None else {format_word(w): str(x) for w, x in b.table.items()},
    )


# ============================================================ 输出

def render_text(report: BaseModel) -> str:
    """字段顺序的 key: value 行"""
    lines = []
    data = report.model_dump()
    for key in type(report).model_fields:
        value = data[key]
        if isinstance(value, str):
            lines.append(f"{key}: {value}")
        else:
            lines.append(f"{key}: {json.dumps(value, ensure_ascii=False)}")
    return "\n".join(lines)


def render(report: BaseModel, as_json: bool = False) -> str:
    return report.model_dump_json() if as_json else render_text(report)


class RefusalReport(BaseModel):
    refused: str
    message: str
    witness: Optional[str] = None
    total: Optional[str] = None


def refusal_report(error: Exception) -> RefusalReport:
    witness = getattr(error, "witness", None)
    total = getattr(error, "total", None)
    return RefusalReport(refused=type(error).__name__, message=str(error),
                         witness=None if witness is None else str(witness),
                         total=None if total is None else str(total))


class ProfileReport(BaseModel):
    k: int
    times: Dict[str, List[int]]
    discontinuous: List[str]


def profile_report(profile) -> ProfileReport:
    return ProfileReport(k=profile.k,
                         times={format_word(w): list(ts) for w, ts in profile.times.items()},
                         discontinuous=[format_word(w) for w in profile.discontinuous])

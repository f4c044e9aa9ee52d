#!/usr/bin/env python3
"""
flowcalc - 命令行入口

用法:
    python -m flowcalc <子命令> ...

示例:
    python -m flowcalc invariants data/full2_matrix.txt
    python -m flowcalc example non-open-image --kmax 3
"""
import argparse
import logging
import sys
from typing import Callable, Dict, List, Optional, Sequence

from pydantic import BaseModel

from .core.config import Config
from .core.cross_section import check_intertwining, pullback, ps_case1, return_system, validate
from .core.demos import EXAMPLE_ALIASES, EXAMPLES, example_named
from .core.errors import FlowCalcInputError, GuardedRefusal, NotIntertwining
from .core.flow_code import (
    WordBlockCode, apply_periodic, build_code, conjugacy_certificate, openness_check,
    return_time_profile, verify_isotopy_certificate, verify_section_condition,
)
from .core.formats import (
    edge_potential_of, format_graph, load_code, load_local_function, load_matrix, load_section,
    load_shift,
)
from .core.invariants import flow_invariants, franks_equivalent
from .core.livsic import CycleVerdict, coboundary, graph_potential, zero_on_cycles
from .core.logger import logger
from .core.moves import in_split, out_split, symbol_expansion
from .core.reports import (
    MoveReport, apply_report, case1_report, certificate_report, code_report, decision_report,
    invariants_report, isotopy_report, livsic_report, openness_report, profile_report,
    refusal_report, render, returns_report, section_condition_report, section_data_report,
    section_report,
)
from .core.sft import EdgeShift, PeriodicOrbit, SlidingBlockCode

EXIT_OK = 0
EXIT_REFUSED = 1
EXIT_BAD_INPUT = 2


def _write(path: Optional[str], text: str) -> None:
    if path is None:
        return
    try:
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
    except OSError as e:
        raise FlowCalcInputError(f"cannot write {path}: {e.strerror}") from None
    logger.info(f"✓ 已写入 {path}")


def _load_code(args) -> WordBlockCode:
    X = load_shift(args.graph)
    Y = load_shift(args.target)
    doc = load_code(args.code)
    C = load_section(doc.section_path, X)
    return build_code(C, doc.M, doc.table, Y)


def _symbol_map(X: EdgeShift, Y: EdgeShift, pairs: Sequence[str]) -> SlidingBlockCode:
    mapping: Dict[str, str] = {}
    for pair in pairs:
        source, sep, target = pair.partition("=")
        if not sep or not source or not target:
            raise FlowCalcInputError(f"expected <symbol>=<symbol>, got {pair!r}")
        mapping[source] = target
    phi = SlidingBlockCode.from_symbol_map(X, Y, mapping)
    phi.check_total()
    return phi


# ============================================================ 子命令

def cmd_invariants(args) -> BaseModel:
    return invariants_report(flow_invariants(load_matrix(args.matrix)))


def cmd_decide_fe(args) -> BaseModel:
    return decision_report(franks_equivalent(load_matrix(args.left), load_matrix(args.right)))


def cmd_expand(args) -> BaseModel:
    X = load_shift(args.graph)
    Xp, record = symbol_expansion(X, args.symbol)
    text = format_graph(Xp.graph)
    _write(args.output, text)
    return MoveReport(**record.as_dict(), vertex=Xp.graph.vertices[-1],
                      matrix=[list(r) for r in Xp.matrix.rows], graph=text)


def cmd_split(args) -> BaseModel:
    X = load_shift(args.graph)
    partition = [[s for s in cls.split(",") if s] for cls in args.classes]
    move = in_split if args.incoming else out_split
    Xp, _ = move(X, args.vertex, partition)
    text = format_graph(Xp.graph)
    _write(args.output, text)
    return MoveReport(kind="in-split" if args.incoming else "out-split", vertex=args.vertex,
                      classes=partition, matrix=[list(r) for r in Xp.matrix.rows], graph=text)


def cmd_section_validate(args) -> BaseModel:
    X = load_shift(args.graph)
    return section_report(validate(X, load_section(args.section, X)))


def cmd_section_returns(args) -> BaseModel:
    X = load_shift(args.graph)
    return returns_report(return_system(load_section(args.section, X)))


def cmd_section_pullback(args) -> BaseModel:
    X = load_shift(args.graph)
    Y = load_shift(args.target)
    phi = _symbol_map(X, Y, args.map)
    C = pullback(phi, load_section(args.section, Y))
    return section_data_report(C)


def cmd_section_ps_case1(args) -> BaseModel:
    X = load_shift(args.graph)
    result = ps_case1(X, load_section(args.first, X), load_section(args.second, X))
    checked = check_intertwining(result, args.period)
    if not checked.holds:
        logger.error(f"✗ {checked.reason}")
        raise NotIntertwining(checked.witness)
    return case1_report(result, checked.checked)


def cmd_code_build(args) -> BaseModel:
    return code_report(_load_code(args))


def cmd_code_apply(args) -> BaseModel:
    code = _load_code(args)
    x = PeriodicOrbit.of_cycle(code.section.shift, args.word)
    return apply_report(x, apply_periodic(code, x))


def cmd_code_verify(args) -> BaseModel:
    code = _load_code(args)
    C_prime = load_section(args.target_section, code.target)
    return section_condition_report(verify_section_condition(code, code.section, C_prime, args.period))


def cmd_code_certificate(args) -> BaseModel:
    return certificate_report(conjugacy_certificate(_load_code(args)))


def cmd_code_isotopy(args) -> BaseModel:
    code = _load_code(args)
    beta = load_local_function(args.beta, code.section.shift)
    D = load_section(args.target_section, code.target)
    return isotopy_report(verify_isotopy_certificate(beta, code, code.section, D))


def cmd_code_openness(args) -> BaseModel:
    return openness_report(openness_check(_load_code(args), args.kmax, args.period))


def cmd_code_profile(args) -> BaseModel:
    return profile_report(return_time_profile(_load_code(args), args.k, args.period))


def cmd_livsic_check(args) -> BaseModel:
    X = load_shift(args.graph)
    f = edge_potential_of(load_local_function(args.potential, X), X.graph)
    verdict = zero_on_cycles(f)
    potential = graph_potential(f) if verdict.zero else None
    return livsic_report(verdict, potential)


def cmd_livsic_solve(args) -> BaseModel:
    X = load_shift(args.graph)
    f = load_local_function(args.potential, X)
    return livsic_report(CycleVerdict(True), b=coboundary(X, f))


def cmd_example(args) -> BaseModel:
    name = example_named(args.name)
    run = EXAMPLES[name]
    if name == "non-open-image":
        return run(args.kmax, args.period)
    return run()


# ============================================================ 参数

def _global_flags(parser: argparse.ArgumentParser, default) -> None:
    parser.add_argument("--json", action="store_true", default=default, help="输出 JSON 报告")
    parser.add_argument("-v", "--verbose", action="store_true", default=default, help="显示详细日志")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flowcalc",
        description="flowcalc - 有限型移位的流等价计算：不变量、截面、流码与 Livšic 证书",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
示例:
  %(prog)s invariants data/full2_matrix.txt
  %(prog)s decide-fe data/full2_matrix.txt data/golden_matrix.txt
  %(prog)s expand data/full2.txt a -o golden.txt
  %(prog)s section validate data/paired.txt data/paired_section.txt
  %(prog)s code openness data/paired.txt data/full2.txt data/collapse_code.txt --kmax 3
  %(prog)s example symbol-expansion --json
        """
    )
    _global_flags(parser, False)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", metavar="<子命令>", required=True)

    def command(parent, name: str, handler: Callable, help_text: str) -> argparse.ArgumentParser:
        p = parent.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(handler=handler)
        return p

    p = command(sub, "invariants", cmd_invariants, "流等价不变量 (PS 数, Bowen–Franks 群)")
    p.add_argument("matrix", help="矩阵文件")

    p = command(sub, "decide-fe", cmd_decide_fe, "按 Franks 定理判定流等价")
    p.add_argument("left", help="矩阵文件 A")
    p.add_argument("right", help="矩阵文件 B")

    p = command(sub, "expand", cmd_expand, "符号扩张 s ↦ s s'")
    p.add_argument("graph", help="图文件")
    p.add_argument("symbol", help="要扩张的符号")
    p.add_argument("-o", "--output", help="写出新的图文件")

    p = command(sub, "split", cmd_split, "顶点的出分裂（或 --in 入分裂）")
    p.add_argument("graph", help="图文件")
    p.add_argument("vertex", help="要分裂的顶点")
    p.add_argument("classes", nargs="+", help="边类，每类为逗号分隔的标号，如 a,b c")
    p.add_argument("--in", dest="incoming", action="store_true", help="按入边分裂")
    p.add_argument("-o", "--output", help="写出新的图文件")

    section = sub.add_parser("section", help="离散截面").add_subparsers(dest="action", required=True)
    p = command(section, "validate", cmd_section_validate, "检查截面是否与每条轨道有界地相遇")
    p.add_argument("graph")
    p.add_argument("section")
    p = command(section, "returns", cmd_section_returns, "首次返回字与返回移位")
    p.add_argument("graph")
    p.add_argument("section")
    p = command(section, "pullback", cmd_section_pullback, "沿 1 块码拉回目标截面")
    p.add_argument("graph")
    p.add_argument("target", help="目标图文件")
    p.add_argument("section", help="目标移位上的截面文件")
    p.add_argument("--map", nargs="+", required=True, metavar="S=T", help="符号映射，如 a1=a a2=a b=b")
    p = command(section, "ps-case1", cmd_section_ps_case1, "两个不相交截面的首次命中分解")
    p.add_argument("graph")
    p.add_argument("first", help="截面 C1")
    p.add_argument("second", help="截面 C2")
    p.add_argument("--period", type=int, default=Config.CHECK_PERIOD, help="交错性检查的周期上限")

    code = sub.add_parser("code", help="流码").add_subparsers(dest="action", required=True)
    handlers = [
        ("build", cmd_code_build, "读入并检查字块码"),
        ("apply", cmd_code_apply, "作用于一条周期轨道"),
        ("verify", cmd_code_verify, "检查截面条件 |𝒞 ∩ C| = |h(𝒞) ∩ C'|"),
        ("certificate", cmd_code_certificate, "圆周长度守恒证书"),
        ("isotopy", cmd_code_isotopy, "检查同痕证书 β"),
        ("openness", cmd_code_openness, "截面的像是否为开集"),
        ("profile", cmd_code_profile, "像截面上的返回时间"),
    ]
    for name, handler, help_text in handlers:
        p = command(code, name, handler, help_text)
        p.add_argument("graph", help="定义域图文件")
        p.add_argument("target", help="目标图文件")
        p.add_argument("code", help="字块码文件")
        if name == "apply":
            p.add_argument("word", nargs="+", help="闭路的符号")
        if name == "isotopy":
            p.add_argument("beta", help="β 的势函数文件")
        if name in ("verify", "isotopy"):
            p.add_argument("target_section", help="目标移位上的截面文件")
        if name == "openness":
            p.add_argument("--kmax", type=int, default=3, help="检查的最大半径")
        if name == "profile":
            p.add_argument("--k", type=int, default=1, help="窗口半径")
        if name in ("verify", "openness", "profile"):
            p.add_argument("--period", type=int, default=Config.CHECK_PERIOD, help="周期上限")

    livsic = sub.add_parser("livsic", help="Livšic 上边缘方程").add_subparsers(dest="action", required=True)
    p = command(livsic, "check", cmd_livsic_check, "圈和是否全为零，若是给出顶点势")
    p.add_argument("graph")
    p.add_argument("potential", help="势函数文件")
    p = command(livsic, "solve", cmd_livsic_solve, "求解 f = b∘σ - b")
    p.add_argument("graph")
    p.add_argument("potential", help="势函数文件")

    p = command(sub, "example", cmd_example, "运行工作示例并对比预期值")
    p.add_argument("name", choices=sorted(EXAMPLES) + sorted(EXAMPLE_ALIASES))
    p.add_argument("--kmax", type=int, default=3, help="non-open-image: 检查的最大半径")
    p.add_argument("--period", type=int, default=12, help="non-open-image: 周期上限")
    return parser


def run(argv: Optional[List[str]] = None) -> int:
    """执行一条命令，把报告写到 stdout，返回退出码"""
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.verbose:
        logging.getLogger("flowcalc").setLevel(logging.DEBUG)

    try:
        report = args.handler(args)
    except FlowCalcInputError as e:
        logger.error(f"✗ 输入错误: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except GuardedRefusal as e:
        logger.warning(f"拒绝: {e}")
        print(render(refusal_report(e), args.json))
        return EXIT_REFUSED

    print(render(report, args.json))
    if getattr(report, "passed", True) is False:
        logger.error(f"✗ 示例 {report.name} 未通过")
        return EXIT_REFUSED
    return EXIT_OK


def main():
    """主入口"""
    sys.exit(run())


if __name__ == "__main__":
    main()

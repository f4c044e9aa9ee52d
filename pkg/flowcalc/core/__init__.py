"""核心功能模块"""
from .cross_section import CrossSection, ps_case1, return_system, validate
from .flow_code import WordBlockCode, apply_periodic, build_code, conjugacy_certificate, openness_check
from .invariants import flow_invariants, franks_equivalent, smith_normal_form
from .livsic import coboundary, graph_potential, zero_on_cycles
from .moves import in_split, out_split, symbol_expansion
from .sft import DirectedGraph, EdgeShift, IntMatrix, PeriodicOrbit, higher_block, periodic_orbits

__all__ = [
    'CrossSection', 'ps_case1', 'return_system', 'validate',
    'WordBlockCode', 'apply_periodic', 'build_code', 'conjugacy_certificate', 'openness_check',
    'flow_invariants', 'franks_equivalent', 'smith_normal_form',
    'coboundary', 'graph_potential', 'zero_on_cycles',
    'in_split', 'out_split', 'symbol_expansion',
    'DirectedGraph', 'EdgeShift', 'IntMatrix', 'PeriodicOrbit', 'higher_block', 'periodic_orbits',
]

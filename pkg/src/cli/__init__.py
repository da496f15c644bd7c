"""
Script language and command surface
"""
from .check import random_instance, run_check
from .parser import Script, build_expr, parse, parse_expr
from .run import ScriptRunner, hyp_spec, run_script

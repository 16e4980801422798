"""Pathwise p-variation, Lévy paths and their areas, and differential equations driven by them."""

__version__ = "0.1.0"

from .area import area_dyadic, area_moment_check, area_pvar_bound, chen_compose, step_areas
from .fields import from_preset, linear_field, rotation_field, trig_field
from .levy import LevyMeasureSpec, LevyModel, bg_index, eta_measure, sample_path
from .param import deparametrise, parametrise
from .paths import Jump, SamplePath, read_csv, write_csv
from .pvar import pvar_brute, pvar_exact
from .rough import MultiplicativeFunctional2, check_pvar_bound, rough_integral_deg2, solve_geometric_rough
from .solver import flow_map, jump_gap, solve_forward, solve_geometric
from .young import young_integral

__all__ = [
    "Jump", "LevyMeasureSpec", "LevyModel", "MultiplicativeFunctional2", "SamplePath",
    "area_dyadic", "area_moment_check", "area_pvar_bound", "bg_index", "check_pvar_bound", "chen_compose",
    "deparametrise", "eta_measure", "flow_map", "from_preset", "jump_gap", "linear_field", "parametrise",
    "pvar_brute", "pvar_exact", "read_csv", "rotation_field", "rough_integral_deg2", "sample_path",
    "solve_forward", "solve_geometric", "solve_geometric_rough", "step_areas", "trig_field", "write_csv",
    "young_integral",
]

from services.lab.cdf import (
    CdfGrid,
    EmpiricalCdf,
    cdf_from_samples,
    empirical_window_cdf,
    law_cdf,
    sup_distance,
)
from services.lab.estimators import kernel_conditional_cdf, kernel_marginal_density
from services.lab.experiments import (
    CounterexampleConfig,
    ExperimentConfig,
    Report,
    ReportRow,
    conditional_experiment,
    consistency_experiment,
    counterexample_experiment,
    first_pixel_draws,
    noise_floor,
)
from services.lab.mmm import (
    MmmSpec,
    constant_spec,
    copy_left_spec,
    diagonal_switch_spec,
    dump_spec,
    gen_mmm_field,
    iid_spec,
    load_spec,
    resolve_spec,
)
from services.lab.window_law import (
    WindowKind,
    WindowLaw,
    conditional_mutual_information,
    exact_window_law,
)

__all__ = [
    "CdfGrid",
    "CounterexampleConfig",
    "EmpiricalCdf",
    "ExperimentConfig",
    "MmmSpec",
    "Report",
    "ReportRow",
    "WindowKind",
    "WindowLaw",
    "cdf_from_samples",
    "conditional_experiment",
    "conditional_mutual_information",
    "consistency_experiment",
    "constant_spec",
    "copy_left_spec",
    "counterexample_experiment",
    "diagonal_switch_spec",
    "dump_spec",
    "empirical_window_cdf",
    "exact_window_law",
    "first_pixel_draws",
    "gen_mmm_field",
    "iid_spec",
    "kernel_conditional_cdf",
    "kernel_marginal_density",
    "law_cdf",
    "load_spec",
    "noise_floor",
    "resolve_spec",
    "sup_distance",
]

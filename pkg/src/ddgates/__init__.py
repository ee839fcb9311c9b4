"""Dynamical-decoupling gate synthesis for electron-nuclear spin systems.

Builds the two-branch propagators of a weakly coupled nuclear spin under
CPMG, UDD, and hybrid pi-pulse sequences; locates conditional and
unconditional resonances; synthesizes controlled and unconditional
nuclear rotations; and evaluates coherence curves, filter functions, and
noise-overlap integrals.  Internal units are rad/s and seconds.
"""

from .coherence import (CoherenceCurve, SpinRegister, entangling_iterations,
                        px_dip_fwhm, register_coherence, register_px,
                        selectivity_scan, single_spin_M)
from .filters import (SpectrumTable, chi_integral, filter_cpmg_closed,
                      filter_fid, filter_general, filter_hybrid,
                      filter_udd_unit_mp, filter_uddn, udd_suppression_slope)
from .gates import (CNOT, GateReport, average_fidelity, cnot_equivalence_check,
                    cnot_reference, crx_target, rx, rz, synthesize_crx,
                    synthesize_rx_unconditional, two_qubit_gate)
from .resonance import (ResonancePoint, RobustnessCurve, SweepResult,
                        analytic_resonance, branch_geometry, locate,
                        refine_resonance, selectivity_fwhm, sweep,
                        timing_robustness)
from .sequences import (BranchPair, HybridSpec, PulseSchedule, compose,
                        conditional_evolution, cpmg_fractions, delta_weights,
                        hybrid_fractions, iterated_fractions, pair_power,
                        schedule, udd_fractions, unit_fractions)
from .spin_model import (GAMMA_C13, GAMMA_E, HBAR, KHZ, MHZ, MU0, US,
                         BranchHamiltonians, FieldConfig, HyperfineParams,
                         branch_hamiltonians, branch_rotations,
                         hyperfine_from_geometry, khz_to_rad, omega_tilde,
                         rad_to_khz, read_register)
from .su2 import AxisAngle, axes_dot, axis_angle, su2_exp

__version__ = "0.1.0"

__all__ = [
    "AxisAngle", "axes_dot", "axis_angle", "su2_exp",
    "BranchHamiltonians", "FieldConfig", "HyperfineParams",
    "branch_hamiltonians", "branch_rotations", "hyperfine_from_geometry",
    "khz_to_rad", "omega_tilde", "rad_to_khz", "read_register",
    "GAMMA_C13", "GAMMA_E", "HBAR", "KHZ", "MHZ", "MU0", "US",
    "BranchPair", "HybridSpec", "PulseSchedule", "compose",
    "conditional_evolution", "cpmg_fractions", "delta_weights",
    "hybrid_fractions", "iterated_fractions", "pair_power", "schedule",
    "udd_fractions", "unit_fractions",
    "ResonancePoint", "RobustnessCurve", "SweepResult", "analytic_resonance",
    "branch_geometry", "locate", "refine_resonance", "selectivity_fwhm",
    "sweep", "timing_robustness",
    "CNOT", "GateReport", "average_fidelity", "cnot_equivalence_check",
    "cnot_reference", "crx_target", "rx", "rz", "synthesize_crx",
    "synthesize_rx_unconditional", "two_qubit_gate",
    "CoherenceCurve", "SpinRegister", "entangling_iterations", "px_dip_fwhm",
    "register_coherence", "register_px", "selectivity_scan", "single_spin_M",
    "SpectrumTable", "chi_integral", "filter_cpmg_closed", "filter_fid",
    "filter_general", "filter_hybrid", "filter_udd_unit_mp", "filter_uddn",
    "udd_suppression_slope",
    "__version__",
]

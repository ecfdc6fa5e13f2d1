"""FDTD electromagnetic transient solver and soil-measurement toolkit.

Core pieces: a Yee-grid leapfrog solver with convolutional absorbing
layers, thin-wire and staircase conductors, multi-pole Debye soils, a
plain-text model language, and auxiliary numerics for soil spectra,
apparent resistivity, and insulation breakdown.
"""

from .breakdown import (DisruptiveEffectModel, LeaderProgressionModel,
                        evaluate_breakdown)
from .cpml import CpmlParams, CpmlRegion, cpml_profiles
from .debye import (AdeState, DebyeMedium, ade_coefficients,
                    debye_complex_permittivity, step_debye_e)
from .engine import (RunConfig, Simulation, build_simulation, resolve_edge,
                     resolve_path)
from .errors import (ComputationError, Diagnostic, EmfdtdError, FitError,
                     ParameterError, RunAborted, ValidationError)
from .grid import (FieldSet, GridSpec, MaterialMap, courant_dt, divergence_h,
                   field_energy, paint_block, step_e, step_h)
from .model import (Command, Model, format_model, load_model, parse,
                    parse_and_validate, run_timing, validate)
from .probes import (CsvRecorder, EdgeRef, PathRef, Probe, measure_current,
                     measure_voltage, read_probe_csv)
from .soil import (ApparentTable, DebyeFit, ElectrodeArray, LayeredEarth,
                   PsoSettings, SoilSampleSet, apparent_from_vi,
                   apparent_resistivity_layered, depth_of_investigation,
                   fit_debye, soil_model_properties, soil_model_sweep)
from .sources import (HeidlerTerm, LumpedElement, Source, Waveform,
                      apply_sources, heidler_eval, waveform_sample)
from .wires import (WireSegment, embed_wire_grid_aligned, embed_wire_staircase,
                    embed_wires, radius_scale)

__version__ = "0.1.0"

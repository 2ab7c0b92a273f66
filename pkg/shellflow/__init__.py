from __future__ import absolute_import, division, print_function

from multipledispatch import halt_ordering, restart_ordering

halt_ordering()  # Turn off multipledispatch ordering

from .model import (ModelParams, ShellState, DiagnosticsRow, NumericalFailure,
                    UnprovenRangeWarning, rhs, flux, fluxes, energy,
                    hs_norm_sq, energy_balance_residual, diagnostics)
from .integrate import (IntegratorConfig, RunSeries, IntegrationError,
                        PositivityError, step, integrate,
                        energy_inequality_check)
from .steady import (SteadyState, ShootResult, ShootingError,
                     rescale_mu_beta, steady_recursion, solve_fixed_point,
                     newton_oracle, check_monotonicity, check_decay_bound,
                     check_gj_bound)
from .experiments import (SweepResult, epsilon_d, attractor_decay,
                          dissipation_sweep, spectrum_report)
from .initial import initial_state
from .convert import convert
from .append import append
from .resource import resource
from .into import into
from .backends.csv import CSV
from .backends.json import JSON
from .manifest import RunManifest, build_manifest, read_manifest

restart_ordering()  # Restart multipledispatch ordering and do ordering


__version__ = '0.1.0'

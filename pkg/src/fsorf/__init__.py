"""Link-level performance toolkit for a satellite-to-platform optical hop
relaying to multiple RF users: closed-form outage, capacity, and
symbol-error metrics, each cross-checked by an independent Monte-Carlo
channel simulator."""

from .budget import FsoBudget, RfBudget, fso_average_snr, rf_average_snr, \
    noise_power
from .channel import (FsoChannelSpec, RfNetworkSpec, RngStream, HETERODYNE,
                      IM_DD, fso_snr_pdf, fso_snr_cdf, sample_fso_snr,
                      phi_coeffs, best_user_outdated_pdf,
                      best_user_outdated_cdf, sample_best_user_outdated)
from .metrics import (SystemSpec, ConstellationSpec, SeriesPolicy, outage,
                      asymptotic_outage, diversity_order, ergodic_capacity,
                      effective_capacity, conditional_sep,
                      conditional_sep_derivative, aser, hqam_params)
from .montecarlo import (SimConfig, Estimate, sample_e2e, simulate_outage,
                         simulate_capacity, simulate_aser)
from .specfun import (MeijerGSpec, meijer_g, reg_gamma_lower, pochhammer,
                      gauss_2f1, kummer_1f1, gaussian_q,
                      integrate_semi_infinite)

__version__ = "1.0.0"

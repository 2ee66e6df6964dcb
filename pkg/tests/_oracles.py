"""Frozen reference values, computed independently of the package.

Every constant below was evaluated with 50-digit mpmath arithmetic straight
from the governing closed-form expressions (and bisection for the width),
then rounded to float64 and frozen.  Tests compare package output against
these numbers; they must never be regenerated through the code under test.

The baseline design used throughout: coupling 8 GHz, cavity decay 8 GHz,
parasitic decay 0.16 GHz, on resonance (all linear frequencies; the
package converts to angular rad/ns internally).
"""

BASELINE_G0_GHZ = 8.0
BASELINE_KAPPA_GHZ = 8.0
BASELINE_GAMMA_GHZ = 0.16

# derived angular rates, rad/ns
TOTAL_DECAY = 51.270792106585425
DECAY_IMBALANCE = 49.260172808287955
RABI = 43.81754865808079
COOPERATIVITY = 25.0

# efficiency factorization at the baseline
ETA_Q = 0.9611687812379854
ETA_C = 0.9803921568627451
ETA_EXTR = 0.9803921568627451
LAW_KIMBLE_ERROR = 0.019223375624759707

# efficiency at the two cavity-decay variants (3.2 GHz and 16 GHz)
ETA_Q_KAPPA_3P2 = 0.9448223733938019
ETA_Q_KAPPA_16 = 0.952018278750952

# emitted-pulse shape at the baseline
PEAK_TIME = 0.023767715715709264   # ns
PEAK_RATE = 29.138885395258907     # 1/ns
FWHM = 0.031563384124160536        # ns
FWHM_LEFT = 0.010158745690556288   # ns, half-maximum crossings around the peak
FWHM_RIGHT = 0.041722129814716825  # ns

# true location of the spectral maxima at the baseline, rad/ns:
# sqrt(RABI**2 - TOTAL_DECAY**2/4), pulled inside the bare oscillation rate
SPECTRUM_PEAK_OFFSET = 35.535954181562396

# best achievable efficiency over the cavity decay rate: (g0/(g0+gamma))**2
ETA_STAR = 0.9611687812379854

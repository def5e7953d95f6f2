"""
Reference operating point, simulation defaults and CLI exit codes.

Values quoted from the experiment are the single source of truth for the
defaults of `SystemParams`; knobs the experiment does not report are
marked as simulation choices.
"""

TOOL_NAME = "gmcs-qkd"
TOOL_VERSION = "0.1.0"

# --- Exit codes (stable contract) ---
EXIT_OK = 0
EXIT_DOMAIN_ERROR = 1
EXIT_CONFIG_ERROR = 2
EXIT_SYNC_FAILURE = 3
EXIT_UNPHYSICAL_STATE = 4

# --- Static parameters (reference link) ---
V_ELEC = 0.013              # SNU, 13 mSNU
BETA = 0.95
ETA = 0.296
RHO = 342.6
REP_RATE = 16e6             # Hz
QUANTUM_FRACTION = 0.5      # one reference per quantum symbol -> R_eff = 8 Msymbol/s
EPSILON_PE = 1e-10

# --- Dynamic parameters (reference link) ---
VA = 2.778                  # SNU
XI_B = 0.027                # SNU, total at Bob
XI_BQ = XI_B / 2            # SNU, per quadrature
T_CHANNEL = 0.624
SKR_ASYMPTOTIC_FULL = 156e3     # bps, (N-m)/N = 1
SKR_ASYMPTOTIC_HALF = 78e3      # bps, (N-m)/N = 1/2
FIBER_LOSS_DB = 2.04            # measured 11 km ULL loss

# --- Finite-size record sizes ---
N_TOTAL = 3_080_000
M_PE = N_TOTAL // 2
M_CALIB = M_PE              # not reported; same size as the PE set

# --- Acquisition ---
PULSE_WIDTH = 11.7e-9       # s
SAMPLE_RATE = 2e9           # Sa/s real-time oscilloscope
SAMPLES_PER_SYMBOL = 125    # 2 GSa/s / 16 MHz
FILTER_BW = 50e6            # Hz
LINEWIDTH_TOTAL = 20e3      # Hz, simulation knob (laser nominal 10 kHz + fiber)
PATTERN_PERIOD = 2040       # quantum symbols per pattern cycle
POWER_METER_TAP = 0.9       # 90:10 splitter, 90 % to the power meter
POWER_METER_REL_STD = 0.01   # relative std of the meter sample of one slot

# --- Transmitter impairments ---
ER_TOP_DB = 25.0
ER_BOTTOM_DB = 22.0
ER_CARVER_DB = 28.5         # EAM, TE polarization
ER_VOA_MAX_DB = 33.0
IQ_FULL_SCALE = 10.0        # SNU quadrature amplitude mapped to a full MZI swing
IQ_OUTPUT_PHOTONS = 1000.0  # mean photons per pulse leaving the IQ modulator
MODULATOR_HEADROOM = 5.0    # full scale in units of the per-quadrature std sqrt(V_A)

# --- Simulation knobs ---
N_SYMBOLS = 100_000
BLOCK_SLOTS = 4096
REF_FLOOR = 0.1             # fraction of the median reference magnitude
SYNC_THRESHOLD = 6.0        # correlation peak / RMS side-lobe
SEED = 0

# --- Unit suffixes accepted in config strings ---
SI_PREFIXES = {
    "T": 1e12, "G": 1e9, "M": 1e6, "k": 1e3,
    "": 1.0,
    "m": 1e-3, "u": 1e-6, "µ": 1e-6, "n": 1e-9, "p": 1e-12,
}
BASE_UNITS = {
    "frequency": ("Hz", "Sa/s", "Baud", "symbol/s"),
    "time": ("s",),
    "noise": ("SNU",),
    "attenuation": ("dB",),
}

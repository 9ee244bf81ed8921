from .codec import decode_frame, encode_frame
from .scenario import load_scenario, run_scenario
from .sweep import ber_sweep, power_ratio_curve, scheme_ber_comparison
from .training import train_models

from .detect import dynamic_verify, mismatch, static_verify
from .fingerprint import calibrate, calibrate_for_key, features, fingerprint_bits, quantize
from .lstm import cloud_decode, device_encode, gradient_check, init_model, lstm_forward, lstm_train
from .signal import gen_gaussian, load_csv, stats
from .sswm import attacker_ber, embed, extract, gen_pn_key, plan_params, theoretical_ber
from .threat import accumulate, eavesdrop_forge, estimate_key, forge, inject

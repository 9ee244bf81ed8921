FINGERPRINT_GROUP = "fingerprint.aqwm.io"
LSTM_GROUP = "lstm.aqwm.io"
DETECT_GROUP = "detect.aqwm.io"
HARNESS_GROUP = "harness.aqwm.io"

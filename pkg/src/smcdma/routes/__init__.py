"""
smcdma Command-Line Routes

The command-line surface of the simulator. Every subcommand maps to one
service call and reports a one-line summary.

Available Commands:
- track-interference, sinr, ber-snr, ber-users, ber-doppler: scenarios
- codes: Gold code family export
- bounds-report: estimator and bound stability limits
"""

"""
smcdma - Set-Membership Adaptive Receivers for DS-CDMA Downlinks

Data-selective adaptive filtering (SM-NLMS, SM-AP, BEACON) with time-varying
error bounds, embedded in a DS-CDMA downlink simulator and a Monte-Carlo
experiment harness.
"""

__version__ = "1.0.0"

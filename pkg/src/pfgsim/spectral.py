"""Dominant-frequency estimation and percent frequency change across onset."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .signal import DEFAULT_WINDOW_S, Trace

MIN_SAMPLES = 64


class SpectralError(Exception):
    pass


class TooShort(SpectralError, ValueError):
    pass


class NoOscillationDetected(SpectralError):
    def __init__(self, message: str, window: str | None = None):
        super().__init__(message if window is None else f"{window} window: {message}")
        self.window = window


@dataclass(frozen=True)
class SpectralConfig:
    window_function: str = "hann"
    zero_pad_factor: int = 8
    search_band: tuple[float, float] = (1 / 200, 1 / 60)
    min_peak_snr: float = 3.0
    window_s: float = DEFAULT_WINDOW_S
    # post-onset search band, as multiples of the measured baseline frequency
    post_band_ratio: tuple[float, float] = (0.5, 2.0)
    detrend: bool = False

    def __post_init__(self):
        if self.window_function not in ("hann", "rectangular"):
            raise ValueError(f"unknown window function {self.window_function!r}")
        if int(self.zero_pad_factor) != self.zero_pad_factor or self.zero_pad_factor < 1:
            raise ValueError("zero_pad_factor must be an integer >= 1")
        lo, hi = self.search_band
        if not 0 < lo < hi:
            raise ValueError(f"search band must satisfy 0 < lo < hi, got {self.search_band}")
        rlo, rhi = self.post_band_ratio
        if not 0 < rlo < 1 < rhi:
            raise ValueError("post_band_ratio must bracket 1")


@dataclass(frozen=True)
class FrequencyEstimate:
    freq_hz: float
    peak_magnitude: float
    band_lo_hz: float
    band_hi_hz: float
    snr: float = float("nan")


@dataclass(frozen=True)
class DeltaF:
    f_pre: FrequencyEstimate
    f_post: FrequencyEstimate
    delta_f_pct: float
    window_s: float

    def record(self) -> dict:
        return {
            "f_pre_hz": self.f_pre.freq_hz,
            "f_post_hz": self.f_post.freq_hz,
            "delta_f_pct": self.delta_f_pct,
            "window_s": self.window_s,
            "method": "dft-quadratic",
        }


def _spectrum(x: np.ndarray, cfg: SpectralConfig) -> np.ndarray:
    x = x - x.mean()
    if cfg.detrend:
        t = np.arange(len(x))
        x = x - np.polyval(np.polyfit(t, x, 1), t)
    if cfg.window_function == "hann":
        x = x * np.hanning(len(x))
    return np.abs(np.fft.rfft(x, n=len(x) * int(cfg.zero_pad_factor)))


def estimate_dominant_frequency(
    samples, sample_rate_hz: float, cfg: SpectralConfig = SpectralConfig(), band: tuple[float, float] | None = None
) -> FrequencyEstimate:
    """Return the strongest in-band spectral peak, refined between bins.

    The window is mean-removed, tapered and zero-padded before the DFT; the
    maximum bin is refined with a parabola through the log magnitudes of it
    and its two neighbours. ``band`` overrides ``cfg.search_band``.
    """
    x = np.asarray(samples, dtype=float)
    if len(x) < MIN_SAMPLES:
        raise TooShort(f"need at least {MIN_SAMPLES} samples, got {len(x)}")
    if not sample_rate_hz > 0:
        raise ValueError("sample_rate_hz must be positive")
    lo, hi = band if band is not None else cfg.search_band

    mag = _spectrum(x, cfg)
    nfft = len(x) * int(cfg.zero_pad_factor)
    df = sample_rate_hz / nfft
    k_lo = max(int(np.ceil(lo / df)), 1)
    k_hi = min(int(np.floor(hi / df)), len(mag) - 2)
    if k_hi < k_lo:
        raise NoOscillationDetected(f"search band {lo:g}-{hi:g} Hz holds no DFT bins")
    # refinement can move the estimate up to one padded bin past the band edge
    band_lo, band_hi = max(lo - df, 0.0), hi + df

    in_band = mag[k_lo : k_hi + 1]
    k = k_lo + int(np.argmax(in_band))
    peak = float(mag[k])
    # noise floor over the whole non-DC spectrum; an in-band median sits
    # inside the main lobe when the band is only a few bins wide
    floor = float(np.median(mag[1:]))
    # mean removal leaves round-off behind on flat input
    if peak <= 1e-9 * float(np.sum(np.abs(x))) or peak == 0.0:
        raise NoOscillationDetected("no oscillatory component")
    snr = peak / floor if floor > 0 else float("inf")
    if snr < cfg.min_peak_snr:
        raise NoOscillationDetected(f"peak SNR {snr:.2f} below {cfg.min_peak_snr:g}")
    if mag[k - 1] > peak or mag[k + 1] > peak:
        raise NoOscillationDetected(f"spectral peak lies outside the {lo:g}-{hi:g} Hz band")

    a, b, c = np.log(mag[k - 1 : k + 2] + 1e-300)
    denom = a - 2 * b + c
    offset = 0.5 * (a - c) / denom if denom < 0 else 0.0
    freq = (k + offset) * df
    return FrequencyEstimate(float(freq), peak, band_lo, band_hi, float(snr))


def measure_delta_f(trace: Trace, cfg: SpectralConfig = SpectralConfig()) -> DeltaF:
    """Baseline and post-onset frequencies and their percent change."""
    fs = trace.sample_rate_hz
    n_win = int(round(cfg.window_s * fs))
    onset = trace.stimulus_onset_index
    pre = trace.samples_mv[max(onset - n_win, 0) : onset]
    post = trace.samples_mv[onset : onset + n_win]

    try:
        f_pre = estimate_dominant_frequency(pre, fs, cfg)
    except NoOscillationDetected as exc:
        raise NoOscillationDetected(str(exc), window="pre") from exc
    rlo, rhi = cfg.post_band_ratio
    try:
        f_post = estimate_dominant_frequency(post, fs, cfg, band=(f_pre.freq_hz * rlo, f_pre.freq_hz * rhi))
    except NoOscillationDetected as exc:
        raise NoOscillationDetected(str(exc), window="post") from exc
    delta = (f_post.freq_hz / f_pre.freq_hz - 1.0) * 100.0
    return DeltaF(f_pre, f_post, delta, len(post) / fs)


def compute_delta_f(trace: Trace, cfg: SpectralConfig = SpectralConfig()) -> float:
    """Percent frequency change, ``(f_post / f_pre - 1) * 100``."""
    return measure_delta_f(trace, cfg).delta_f_pct

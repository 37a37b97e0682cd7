// eGeMAPS-like subset: pitch mean/std via normalized autocorrelation,
// utterance RMS level, and local jitter/shimmer from a glottal period chain.
//
// Period chain: anchor at the strongest peak of each voiced segment, then
// march outward picking the largest peak inside [t +/- minT_band, t +/- 1.5*T],
// where T adapts to the last measured period. The lower bound is the band
// minimum period (not relative to T) so the chain can recover from an
// autocorrelation octave error, e.g. a pulse train with alternating periods
// whose true fundamental sits at the pattern length.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "paratone/error.hpp"
#include "paratone/wav.hpp"

namespace paratone {

struct AnalysisConfig {
  double frame_s = 0.040;
  double hop_s = 0.010;
  double f0_min_hz = 60.0;
  double f0_max_hz = 600.0;
  double voicing_threshold = 0.5;
  double min_duration_s = 0.200;
  int min_voiced_frames = 5;
};

struct FeatureVector {
  double pitch_mean_hz = 0.0;
  double pitch_std_hz = 0.0;
  double level_db = 0.0;
  double jitter_ratio = 0.0;
  double shimmer_ratio = 0.0;
};

namespace detail {

// Iterative radix-2 complex FFT, in place. n must be a power of two.
inline void fft(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang =
        (inverse ? 2.0 : -2.0) * 3.141592653589793238462643383279502884 /
        static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
  if (inverse) {
    for (auto& x : a) x /= static_cast<double>(n);
  }
}

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Raw autocorrelation numerators c[tau] = sum_n x[n] x[n+tau] for one frame.
inline std::vector<double> autocorr_numerators(const double* x, std::size_t len,
                                               std::size_t max_lag) {
  const std::size_t n = next_pow2(len + max_lag + 1);
  std::vector<std::complex<double>> buf(n);
  for (std::size_t i = 0; i < len; ++i) buf[i] = x[i];
  fft(buf, false);
  for (auto& c : buf) c = c * std::conj(c);
  fft(buf, true);
  std::vector<double> out(max_lag + 1);
  for (std::size_t tau = 0; tau <= max_lag; ++tau) out[tau] = buf[tau].real();
  return out;
}

// Parabolic vertex of three equispaced points; returns offset in [-0.5, 0.5]
// and the interpolated value.
inline void parabolic_refine(double ym1, double y0, double yp1, double* offset,
                             double* value) {
  const double denom = ym1 - 2.0 * y0 + yp1;
  if (std::abs(denom) < 1e-300) {
    *offset = 0.0;
    *value = y0;
    return;
  }
  double d = 0.5 * (ym1 - yp1) / denom;
  d = std::clamp(d, -0.5, 0.5);
  *offset = d;
  *value = y0 - 0.25 * (ym1 - yp1) * d;
}

struct FramePitch {
  bool voiced = false;
  double f0_hz = 0.0;
};

inline std::vector<FramePitch> track_pitch(const Waveform& w,
                                           const AnalysisConfig& cfg) {
  const int sr = w.sample_rate;
  const std::size_t frame_len =
      static_cast<std::size_t>(std::lround(cfg.frame_s * sr));
  const std::size_t hop = static_cast<std::size_t>(std::lround(cfg.hop_s * sr));
  const std::size_t lag_min = static_cast<std::size_t>(
      std::max(1.0, std::floor(sr / cfg.f0_max_hz)));
  const std::size_t lag_max = std::min(
      static_cast<std::size_t>(std::ceil(sr / cfg.f0_min_hz)), frame_len - 1);

  std::vector<FramePitch> frames;
  if (w.samples.size() < frame_len || hop == 0) return frames;
  for (std::size_t start = 0; start + frame_len <= w.samples.size();
       start += hop) {
    const double* x = w.samples.data() + start;
    const std::vector<double> num =
        autocorr_numerators(x, frame_len, lag_max + 1);
    // Prefix sums of x^2 for the normalizers.
    std::vector<double> cum(frame_len + 1, 0.0);
    for (std::size_t i = 0; i < frame_len; ++i) cum[i + 1] = cum[i] + x[i] * x[i];
    const double total = cum[frame_len];
    auto norm_r = [&](std::size_t tau) {
      const double head = cum[frame_len - tau];
      const double tail = total - cum[tau];
      const double denom = std::sqrt(head * tail);
      return denom > 1e-30 ? num[tau] / denom : 0.0;
    };
    FramePitch fp;
    if (total > 1e-30 && lag_max > lag_min) {
      double max_r = -2.0;
      for (std::size_t tau = lag_min; tau <= lag_max; ++tau) {
        max_r = std::max(max_r, norm_r(tau));
      }
      // A perfectly periodic frame scores ~1 at the true lag and all its
      // multiples; rounding noise must not decide between them. Take the
      // first local maximum within a small tolerance of the global one.
      std::size_t best = 0;
      double best_r = -2.0;
      for (std::size_t tau = lag_min; tau <= lag_max; ++tau) {
        const double r = norm_r(tau);
        if (r < max_r - 0.01) continue;
        const double left = tau > lag_min ? norm_r(tau - 1) : -2.0;
        const double right = tau < lag_max ? norm_r(tau + 1) : -2.0;
        if (r >= left && r >= right) {
          best = tau;
          best_r = r;
          break;
        }
      }
      if (best == 0) {
        for (std::size_t tau = lag_min; tau <= lag_max; ++tau) {
          const double r = norm_r(tau);
          if (r > best_r) {
            best_r = r;
            best = tau;
          }
        }
      }
      if (best_r >= cfg.voicing_threshold) {
        double lag = static_cast<double>(best);
        if (best > lag_min && best < lag_max) {
          double off, val;
          parabolic_refine(norm_r(best - 1), best_r, norm_r(best + 1), &off,
                           &val);
          lag += off;
        }
        fp.voiced = true;
        fp.f0_hz = static_cast<double>(sr) / lag;
      }
    }
    frames.push_back(fp);
  }
  return frames;
}

struct PeriodChainStats {
  double sum_period = 0.0;       // seconds, over all periods
  std::size_t n_periods = 0;
  double sum_abs_dperiod = 0.0;  // consecutive diffs within a chain
  std::size_t n_dperiods = 0;
  double sum_amp = 0.0;
  std::size_t n_amps = 0;
  double sum_abs_damp = 0.0;
  std::size_t n_damps = 0;
};

struct Mark {
  double pos = 0.0;  // refined, samples
  double amp = 0.0;  // refined, >= 0 in the tracked sign
};

// Largest peak of y in [lo, hi]; ties resolved toward `from_high ? hi : lo`.
inline bool window_peak(const std::vector<double>& y, std::ptrdiff_t lo,
                        std::ptrdiff_t hi, bool prefer_late, Mark* out) {
  lo = std::max<std::ptrdiff_t>(lo, 1);
  hi = std::min<std::ptrdiff_t>(hi, static_cast<std::ptrdiff_t>(y.size()) - 2);
  if (lo > hi) return false;
  std::ptrdiff_t best = -1;
  double best_v = -1e300;
  if (prefer_late) {
    for (std::ptrdiff_t i = hi; i >= lo; --i) {
      if (y[i] > best_v) {
        best_v = y[i];
        best = i;
      }
    }
  } else {
    for (std::ptrdiff_t i = lo; i <= hi; ++i) {
      if (y[i] > best_v) {
        best_v = y[i];
        best = i;
      }
    }
  }
  if (best < 0 || best_v <= 0.0) return false;
  double off, val;
  parabolic_refine(y[best - 1], y[best], y[best + 1], &off, &val);
  *out = Mark{static_cast<double>(best) + off, std::max(val, y[best])};
  return true;
}

}  // namespace detail

inline double rms(const std::vector<double>& samples) {
  if (samples.empty()) return 0.0;
  double acc = 0.0;
  for (double s : samples) acc += s * s;
  return std::sqrt(acc / static_cast<double>(samples.size()));
}

inline FeatureVector extract_features(const Waveform& w,
                                      const AnalysisConfig& cfg = {}) {
  if (w.sample_rate < 8000) {
    raise(ErrorCode::InvalidParams, "sample_rate must be >= 8000");
  }
  for (double s : w.samples) {
    if (!std::isfinite(s)) raise(ErrorCode::NonFiniteValue, "non-finite sample");
  }
  if (w.duration_s() + 1e-9 < cfg.min_duration_s) {
    raise(ErrorCode::TooShort, "waveform shorter than 200 ms");
  }

  const int sr = w.sample_rate;
  const std::vector<detail::FramePitch> frames = detail::track_pitch(w, cfg);
  std::size_t n_voiced = 0;
  for (const auto& f : frames) n_voiced += f.voiced ? 1 : 0;
  if (n_voiced < static_cast<std::size_t>(cfg.min_voiced_frames)) {
    raise(ErrorCode::NoVoicedFrames, "fewer than 5 voiced frames");
  }

  FeatureVector fv;
  {
    double mean = 0.0;
    for (const auto& f : frames)
      if (f.voiced) mean += f.f0_hz;
    mean /= static_cast<double>(n_voiced);
    double var = 0.0;
    for (const auto& f : frames)
      if (f.voiced) var += (f.f0_hz - mean) * (f.f0_hz - mean);
    var /= static_cast<double>(n_voiced);
    fv.pitch_mean_hz = mean;
    fv.pitch_std_hz = std::sqrt(var);
  }
  fv.level_db = 20.0 * std::log10(std::max(rms(w.samples), 1e-12));

  // --- glottal period chain over voiced segments ---
  const std::size_t frame_len =
      static_cast<std::size_t>(std::lround(cfg.frame_s * sr));
  const std::size_t hop = static_cast<std::size_t>(std::lround(cfg.hop_s * sr));
  const double t_min = static_cast<double>(sr) / cfg.f0_max_hz;  // samples
  const double t_max = static_cast<double>(sr) / cfg.f0_min_hz;

  // Choose the tracked polarity from the global extreme.
  double gmax = 0.0;
  bool positive = true;
  for (double s : w.samples) {
    if (std::abs(s) > gmax) {
      gmax = std::abs(s);
      positive = s >= 0.0;
    }
  }
  std::vector<double> y(w.samples.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    y[i] = positive ? w.samples[i] : -w.samples[i];
  }

  auto segment_period = [&](std::size_t frame_begin,
                            std::size_t frame_end) -> double {
    // Period hint from the median voiced-frame F0 of the segment; a single
    // octave-errored frame must not blow up the search window.
    std::vector<double> f0s;
    for (std::size_t i = frame_begin; i < frame_end; ++i) {
      if (frames[i].voiced) f0s.push_back(frames[i].f0_hz);
    }
    if (f0s.empty()) return 0.0;
    std::nth_element(f0s.begin(), f0s.begin() + f0s.size() / 2, f0s.end());
    return static_cast<double>(sr) / f0s[f0s.size() / 2];
  };

  detail::PeriodChainStats stats;

  // Voiced segments as maximal runs of voiced frames.
  std::size_t i = 0;
  while (i < frames.size()) {
    if (!frames[i].voiced) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < frames.size() && frames[j].voiced) ++j;
    const std::size_t seg_frame_begin = i;
    const std::size_t seg_frame_end = j;
    const std::size_t seg_begin = i * hop;
    const std::size_t seg_end =
        std::min((j - 1) * hop + frame_len, w.samples.size());
    i = j;
    if (seg_end <= seg_begin + 2) continue;

    // Anchor: tallest tracked-sign peak in the segment.
    std::ptrdiff_t anchor = -1;
    double anchor_v = 0.0;
    for (std::size_t k = seg_begin; k < seg_end; ++k) {
      if (y[k] > anchor_v) {
        anchor_v = y[k];
        anchor = static_cast<std::ptrdiff_t>(k);
      }
    }
    if (anchor < 1 || anchor_v <= 0.0) continue;

    const double floor_amp = 0.25 * anchor_v;
    std::vector<detail::Mark> marks;
    {
      double off, val;
      const std::ptrdiff_t a = std::clamp<std::ptrdiff_t>(
          anchor, 1, static_cast<std::ptrdiff_t>(y.size()) - 2);
      detail::parabolic_refine(y[a - 1], y[a], y[a + 1], &off, &val);
      marks.push_back({static_cast<double>(a) + off, std::max(val, y[a])});
    }

    // March forward then backward from the anchor.
    const double seg_period = segment_period(seg_frame_begin, seg_frame_end);
    for (int dir : {+1, -1}) {
      double t_exp = seg_period;
      if (t_exp <= 0.0) t_exp = 0.5 * (t_min + t_max);
      double pos = marks[0].pos;
      while (true) {
        std::ptrdiff_t lo, hi;
        if (dir > 0) {
          lo = static_cast<std::ptrdiff_t>(std::ceil(pos + t_min));
          hi = static_cast<std::ptrdiff_t>(std::floor(pos + 1.5 * t_exp));
          hi = std::min(hi, static_cast<std::ptrdiff_t>(seg_end) - 1);
        } else {
          lo = static_cast<std::ptrdiff_t>(std::ceil(pos - 1.5 * t_exp));
          lo = std::max(lo, static_cast<std::ptrdiff_t>(seg_begin));
          hi = static_cast<std::ptrdiff_t>(std::floor(pos - t_min));
        }
        detail::Mark m;
        if (!detail::window_peak(y, lo, hi, dir < 0, &m)) break;
        if (m.amp < floor_amp) break;
        const double period = std::abs(m.pos - pos);
        if (period < 0.5 * t_min || period > 1.2 * t_max) break;
        marks.push_back(m);
        t_exp = std::clamp(period, t_min, t_max);
        pos = m.pos;
      }
    }

    std::sort(marks.begin(), marks.end(),
              [](const detail::Mark& a, const detail::Mark& b) {
                return a.pos < b.pos;
              });

    // Trim fade-contaminated chain ends: drop leading/trailing marks whose
    // amplitude is below half the chain median.
    if (marks.size() >= 3) {
      std::vector<double> amps;
      amps.reserve(marks.size());
      for (const auto& m : marks) amps.push_back(m.amp);
      std::nth_element(amps.begin(), amps.begin() + amps.size() / 2,
                       amps.end());
      const double median = amps[amps.size() / 2];
      std::size_t lo = 0, hi = marks.size();
      while (lo < hi && marks[lo].amp < 0.5 * median) ++lo;
      while (hi > lo && marks[hi - 1].amp < 0.5 * median) --hi;
      marks.erase(marks.begin() + hi, marks.end());
      marks.erase(marks.begin(), marks.begin() + lo);
    }
    if (marks.size() < 2) continue;

    std::vector<double> periods;
    periods.reserve(marks.size() - 1);
    for (std::size_t k = 0; k + 1 < marks.size(); ++k) {
      periods.push_back((marks[k + 1].pos - marks[k].pos) / sr);
    }
    for (double p : periods) {
      stats.sum_period += p;
      ++stats.n_periods;
    }
    for (std::size_t k = 0; k + 1 < periods.size(); ++k) {
      stats.sum_abs_dperiod += std::abs(periods[k + 1] - periods[k]);
      ++stats.n_dperiods;
    }
    for (const auto& m : marks) {
      stats.sum_amp += m.amp;
      ++stats.n_amps;
    }
    for (std::size_t k = 0; k + 1 < marks.size(); ++k) {
      stats.sum_abs_damp += std::abs(marks[k + 1].amp - marks[k].amp);
      ++stats.n_damps;
    }
  }

  if (stats.n_periods < 2 || stats.n_dperiods < 1) {
    raise(ErrorCode::NoVoicedFrames, "too few glottal periods");
  }
  const double mean_period =
      stats.sum_period / static_cast<double>(stats.n_periods);
  const double mean_amp = stats.sum_amp / static_cast<double>(stats.n_amps);
  fv.jitter_ratio = (stats.sum_abs_dperiod /
                     static_cast<double>(stats.n_dperiods)) /
                    mean_period;
  fv.shimmer_ratio =
      mean_amp > 1e-30
          ? (stats.sum_abs_damp / static_cast<double>(stats.n_damps)) / mean_amp
          : 0.0;
  return fv;
}

}  // namespace paratone

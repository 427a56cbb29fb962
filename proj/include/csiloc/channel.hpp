// SPDX-License-Identifier: Apache-2.0
//
// csiloc -- CSI fingerprint localization toolkit
// Copyright (C) 2026 the csiloc authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
//
// Synthetic per-slot CSI at CRS resource elements.
//
// The amplitude of subcarrier k for antenna n at location L and slot t is
//
//   a = max(0, PL(d) * SH(L, k) * |F_n(L, block, f_k)| + noise)
//
// with
//   PL  log-distance pathloss gain, distance floored at 1 m,
//   SH  lognormal shadowing, frozen per (seed, 0.1 m-quantized location) and
//       slowly varying across the band, so fingerprints are frequency
//       selective and stable across revisits at the same spot,
//   F_n Rician small-scale fading with factor K: a flat LOS ray plus a
//       3-tap exponential-profile scatter response, redrawn every
//       coherence_slots slots. E|F|^2 == 1 for every subcarrier, and
//       K = inf collapses F to a unit-magnitude ray (pure pathloss).
//
// All randomness is counter-based on (seed, quantized location, antenna,
// slot block, ...), so generation is deterministic and embarrassingly
// parallel.

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include "csiloc/common.hpp"
#include "csiloc/crs.hpp"
#include "csiloc/rng.hpp"

namespace csiloc {

// Measurement geometry plus grid configuration for one experiment area.
struct Scene {
    Rect area_bounds;                   // feasible localization area, meters
    Point2 bs_location;                 // base station; may lie outside the area
    std::vector<Point2> rp_locations;   // M surveyed reference points
    std::vector<Point2> tp_locations;   // held-out test points
    int n_rb = 25;
    int n_tx = 1;
    double carrier_freq_hz = 2.12e9;

    void validate() const {
        if (!(area_bounds.max_x > area_bounds.min_x) ||
            !(area_bounds.max_y > area_bounds.min_y))
            throw parameter_error("Scene: degenerate area_bounds");
        if (rp_locations.size() < 2) throw parameter_error("Scene: need at least 2 RPs");
        if (n_rb < 1) throw parameter_error("Scene: n_rb must be >= 1");
        if (n_tx != 1 && n_tx != 2 && n_tx != 4)
            throw parameter_error("Scene: n_tx must be one of {1,2,4}");
        for (const auto& p : rp_locations)
            if (!area_bounds.contains(p)) throw parameter_error("Scene: RP outside area_bounds");
        for (const auto& p : tp_locations)
            if (!area_bounds.contains(p)) throw parameter_error("Scene: TP outside area_bounds");
        for (std::size_t i = 0; i < rp_locations.size(); ++i)
            for (std::size_t j = i + 1; j < rp_locations.size(); ++j)
                if (rp_locations[i] == rp_locations[j])
                    throw parameter_error("Scene: duplicate RP locations");
    }

    std::uint64_t digest() const {
        ByteWriter w;
        w.f64(area_bounds.min_x);
        w.f64(area_bounds.min_y);
        w.f64(area_bounds.max_x);
        w.f64(area_bounds.max_y);
        w.f64(bs_location.x);
        w.f64(bs_location.y);
        w.u64(rp_locations.size());
        for (const auto& p : rp_locations) {
            w.f64(p.x);
            w.f64(p.y);
        }
        w.u64(tp_locations.size());
        for (const auto& p : tp_locations) {
            w.f64(p.x);
            w.f64(p.y);
        }
        w.i32(n_rb);
        w.i32(n_tx);
        w.f64(carrier_freq_hz);
        return w.content_hash();
    }
};

// Propagation and estimation-noise knobs for the synthetic channel.
struct ChannelParams {
    double pathloss_exponent = 2.2;
    double pathloss_ref_db = 0.0;     // pathloss in dB at the 1 m reference distance
    double shadowing_sigma_db = 6.0;
    double rician_k = 6.0;            // linear power ratio; inf disables fading
    int coherence_slots = 1;          // fading redraw period
    double noise_sigma = 0.0;         // additive amplitude noise, linear
    std::uint64_t rng_seed = 1;

    void validate() const {
        if (!(pathloss_exponent > 0.0))
            throw parameter_error("ChannelParams: pathloss_exponent must be > 0");
        if (shadowing_sigma_db < 0.0)
            throw parameter_error("ChannelParams: shadowing_sigma_db must be >= 0");
        if (!(rician_k >= 0.0)) throw parameter_error("ChannelParams: rician_k must be >= 0");
        if (coherence_slots < 1)
            throw parameter_error("ChannelParams: coherence_slots must be >= 1");
        if (noise_sigma < 0.0) throw parameter_error("ChannelParams: noise_sigma must be >= 0");
    }
};

// One resource element's channel estimate in polar form.
struct ComplexCsi {
    double amplitude = 0.0;  // nonnegative linear gain
    double phase = 0.0;      // radians in [-pi, pi)

    std::complex<double> value() const { return std::polar(amplitude, phase); }
};

// Dense [n_tx x n_sc] matrix of per-RE channel estimates, row-major.
struct CsiMatrix {
    int n_tx = 0;
    int n_sc = 0;
    std::vector<ComplexCsi> entries;

    const ComplexCsi& at(int tx, int sc) const {
        return entries[static_cast<std::size_t>(tx) * n_sc + sc];
    }
    ComplexCsi& at(int tx, int sc) {
        return entries[static_cast<std::size_t>(tx) * n_sc + sc];
    }
};

namespace channel_detail {

inline constexpr double kSubcarrierSpacingHz = 15e3;
inline constexpr double kDistanceFloorM = 1.0;          // avoids the d=0 singularity
inline constexpr int kNumTaps = 3;
inline constexpr double kTapDelaysS[kNumTaps] = {0.0, 200e-9, 400e-9};
inline constexpr double kShadowLatticeM = 2.0;          // spatial correlation length
inline constexpr int kShadowLatticeSubcarriers = 16;    // spectral correlation length

// Exponential power-delay profile, normalized to unit total power.
inline const double* tap_powers() {
    static const double norm = std::exp(0.0) + std::exp(-1.0) + std::exp(-2.0);
    static const double powers[kNumTaps] = {std::exp(0.0) / norm, std::exp(-1.0) / norm,
                                            std::exp(-2.0) / norm};
    return powers;
}

// Smooth unit-variance lattice noise: trilinear blend of i.i.d. standard
// normals on a (2 m x 2 m x 16 subcarriers) grid, renormalized so the
// marginal stays exactly N(0,1) between nodes.
inline double shadow_field(const CounterRng& shadow_rng, std::int64_t qx, std::int64_t qy,
                           int subcarrier) {
    const double cells_per_lattice = kShadowLatticeM * 10.0;  // lattice step in 0.1 m cells
    const double ux = static_cast<double>(qx) / cells_per_lattice;
    const double uy = static_cast<double>(qy) / cells_per_lattice;
    const double uf = static_cast<double>(subcarrier) / kShadowLatticeSubcarriers;

    const auto cell = [](double u) { return static_cast<std::int64_t>(std::floor(u)); };
    const std::int64_t ix = cell(ux), iy = cell(uy), ifc = cell(uf);
    const double wx = ux - static_cast<double>(ix);
    const double wy = uy - static_cast<double>(iy);
    const double wf = uf - static_cast<double>(ifc);

    double value = 0.0;
    double weight_sq = 0.0;
    for (int dx = 0; dx < 2; ++dx)
        for (int dy = 0; dy < 2; ++dy)
            for (int df = 0; df < 2; ++df) {
                const double w =
                    (dx ? wx : 1.0 - wx) * (dy ? wy : 1.0 - wy) * (df ? wf : 1.0 - wf);
                if (w == 0.0) continue;
                const double node = shadow_rng.gaussian(static_cast<std::uint64_t>(ix + dx),
                                                        static_cast<std::uint64_t>(iy + dy),
                                                        static_cast<std::uint64_t>(ifc + df));
                value += w * node;
                weight_sq += w * w;
            }
    return value / std::sqrt(weight_sq);
}

}  // namespace channel_detail

// Linear amplitude gain of the log-distance pathloss law at `distance_m`.
inline double pathloss_gain(const ChannelParams& params, double distance_m) {
    const double d = std::max(distance_m, channel_detail::kDistanceFloorM);
    const double pl_db =
        params.pathloss_ref_db + 10.0 * params.pathloss_exponent * std::log10(d);
    return std::pow(10.0, -pl_db / 20.0);
}

// Frozen lognormal shadowing gain at a 0.1 m-quantized location & subcarrier.
inline double shadowing_gain(const ChannelParams& params, const Point2& location,
                             int subcarrier) {
    if (params.shadowing_sigma_db == 0.0) return 1.0;
    const CounterRng shadow_rng = CounterRng(params.rng_seed).fork("shadow");
    const double xi = channel_detail::shadow_field(shadow_rng, quantize_coord(location.x),
                                                   quantize_coord(location.y), subcarrier);
    return std::pow(10.0, params.shadowing_sigma_db * xi / 20.0);
}

// Per-location CSI sampler. Precomputes everything frozen in time (pathloss,
// shadowing, tap phase ramps) so that streaming many slots at one location
// costs only the per-slot fading and noise draws. Immutable after
// construction; concurrent csi()/snapshot() calls are safe.
class LocationChannel {
  public:
    LocationChannel(const Scene& scene, const ChannelParams& params, const CrsLayout& layout,
                    const Point2& location)
        : params_(params),
          n_tx_(scene.n_tx),
          n_sc_(layout.n_subcarriers()),
          qx_(quantize_coord(location.x)),
          qy_(quantize_coord(location.y)),
          fading_rng_(CounterRng(params.rng_seed).fork("fading")),
          noise_rng_(CounterRng(params.rng_seed).fork("noise")) {
        using namespace channel_detail;
        scene.validate();
        params.validate();
        if (!scene.area_bounds.contains(location))
            throw domain_error("LocationChannel: location outside the feasible area");

        large_scale_gain_.resize(static_cast<std::size_t>(n_sc_));
        const double g_pl = pathloss_gain(params, distance(location, scene.bs_location));
        const CounterRng shadow_rng = CounterRng(params.rng_seed).fork("shadow");
        for (int i = 0; i < n_sc_; ++i) {
            const int k = layout.subcarrier_indices[static_cast<std::size_t>(i)];
            double g = g_pl;
            if (params.shadowing_sigma_db > 0.0)
                g *= std::pow(10.0, params.shadowing_sigma_db *
                                        shadow_field(shadow_rng, qx_, qy_, k) / 20.0);
            large_scale_gain_[static_cast<std::size_t>(i)] = g;
        }

        subcarriers_ = layout.subcarrier_indices;
        tap_phasors_.resize(static_cast<std::size_t>(n_sc_) * kNumTaps);
        for (int i = 0; i < n_sc_; ++i) {
            const double f = subcarriers_[static_cast<std::size_t>(i)] * kSubcarrierSpacingHz;
            for (int l = 0; l < kNumTaps; ++l)
                tap_phasors_[static_cast<std::size_t>(i) * kNumTaps + l] =
                    std::polar(1.0, -2.0 * std::numbers::pi * f * kTapDelaysS[l]);
        }
    }

    int n_tx() const { return n_tx_; }
    int n_subcarriers() const { return n_sc_; }

    CsiMatrix csi(std::int64_t slot) const {
        using namespace channel_detail;
        if (slot < 0) throw parameter_error("LocationChannel::csi: slot must be >= 0");

        const std::int64_t block = slot / params_.coherence_slots;
        const bool fading_off = std::isinf(params_.rician_k);
        const double los_gain =
            fading_off ? 1.0 : std::sqrt(params_.rician_k / (params_.rician_k + 1.0));
        const double scatter_power = fading_off ? 0.0 : 1.0 / (params_.rician_k + 1.0);
        const double* p_tap = tap_powers();

        CsiMatrix csi;
        csi.n_tx = n_tx_;
        csi.n_sc = n_sc_;
        csi.entries.resize(static_cast<std::size_t>(n_tx_) * n_sc_);

        for (int tx = 0; tx < n_tx_; ++tx) {
            const CounterRng tap_rng = fading_rng_.fork(
                static_cast<std::uint64_t>(qx_), static_cast<std::uint64_t>(qy_),
                static_cast<std::uint64_t>(tx), static_cast<std::uint64_t>(block));
            const double los_phase = 2.0 * std::numbers::pi * tap_rng.uniform(std::uint64_t{0});
            std::complex<double> taps[kNumTaps];
            taps[0] = std::polar(los_gain, los_phase);
            if (!fading_off) {
                for (int l = 0; l < kNumTaps; ++l) {
                    const double sigma = std::sqrt(scatter_power * p_tap[l] / 2.0);
                    taps[l] += std::complex<double>(
                        sigma * tap_rng.gaussian(std::uint64_t{1}, static_cast<std::uint64_t>(l)),
                        sigma * tap_rng.gaussian(std::uint64_t{2}, static_cast<std::uint64_t>(l)));
                }
            }

            for (int i = 0; i < n_sc_; ++i) {
                std::complex<double> h{0.0, 0.0};
                for (int l = 0; l < kNumTaps; ++l)
                    h += taps[l] * tap_phasors_[static_cast<std::size_t>(i) * kNumTaps + l];

                double amp = large_scale_gain_[static_cast<std::size_t>(i)] * std::abs(h);
                if (params_.noise_sigma > 0.0)
                    amp += params_.noise_sigma *
                           noise_rng_.gaussian(
                               static_cast<std::uint64_t>(qx_), static_cast<std::uint64_t>(qy_),
                               static_cast<std::uint64_t>(tx),
                               static_cast<std::uint64_t>(subcarriers_[static_cast<std::size_t>(i)]),
                               static_cast<std::uint64_t>(slot));
                if (amp < 0.0) amp = 0.0;

                double phase = std::arg(h);
                if (phase >= std::numbers::pi) phase -= 2.0 * std::numbers::pi;
                csi.at(tx, i) = ComplexCsi{amp, phase};
            }
        }
        return csi;
    }

    CsiSnapshot snapshot(std::int64_t slot) const {
        const CsiMatrix m = csi(slot);
        CsiSnapshot s;
        s.reserve(m.entries.size());
        for (const auto& e : m.entries) s.push_back(e.amplitude);
        return s;
    }

  private:
    ChannelParams params_;
    int n_tx_;
    int n_sc_;
    std::int64_t qx_, qy_;
    CounterRng fading_rng_;
    CounterRng noise_rng_;
    std::vector<int> subcarriers_;
    std::vector<double> large_scale_gain_;          // pathloss * shadowing per subcarrier
    std::vector<std::complex<double>> tap_phasors_; // e^{-j 2 pi f tau} per (subcarrier, tap)
};

// Per-slot complex CSI over the layout's pilot comb for every tx antenna.
// Deterministic in (params.rng_seed, location, slot).
inline CsiMatrix synth_csi(const Scene& scene, const ChannelParams& params,
                           const CrsLayout& layout, const Point2& location,
                           std::int64_t slot) {
    return LocationChannel(scene, params, layout, location).csi(slot);
}

// Convenience overload: antenna port 0, no comb shift.
inline CsiMatrix synth_csi(const Scene& scene, const ChannelParams& params,
                           const Point2& location, std::int64_t slot) {
    return synth_csi(scene, params, crs_subcarrier_indices(scene.n_rb, 0, 0), location, slot);
}

// Amplitude-only fingerprint: |.| per entry, flattened row-major to n_tx*n_sc.
inline CsiSnapshot amplitude_snapshot(const CsiMatrix& csi) {
    if (csi.entries.empty()) throw parameter_error("amplitude_snapshot: empty CSI matrix");
    CsiSnapshot snapshot;
    snapshot.reserve(csi.entries.size());
    for (const auto& e : csi.entries) snapshot.push_back(e.amplitude);
    return snapshot;
}

// Elementwise arithmetic mean of uniformly shaped snapshots.
inline CsiSnapshot mean_fingerprint(const std::vector<CsiSnapshot>& snapshots) {
    if (snapshots.empty()) throw parameter_error("mean_fingerprint: empty snapshot list");
    const std::size_t n = snapshots.front().size();
    for (const auto& s : snapshots)
        if (s.size() != n) throw parameter_error("mean_fingerprint: snapshot shape mismatch");
    CsiSnapshot mean(n, 0.0);
    for (const auto& s : snapshots)
        for (std::size_t i = 0; i < n; ++i) mean[i] += s[i];
    for (double& v : mean) v /= static_cast<double>(snapshots.size());
    return mean;
}

}  // namespace csiloc

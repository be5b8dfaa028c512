#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gazekit/error.hpp"
#include "gazekit/fixation.hpp"
#include "synthetic.hpp"

using namespace gazekit;

TEST_SUITE("fixation") {

TEST_CASE("pixel displacement to visual angle") {
    const Geometry g;
    CHECK(std::abs(pixels_to_degrees(76, 0, g) - 2.0) <= 0.05);
    CHECK(pixels_to_degrees(0, 0, g) == 0.0);
    const double direct = std::atan(38.0 * 530.0 / 1920.0 / 600.0) * 180.0 / std::numbers::pi;
    CHECK(pixels_to_degrees(38, 0, g) == doctest::Approx(direct).epsilon(1e-12));
    CHECK(std::abs(pixels_to_degrees(38, 0, g) - 1.0) <= 0.02);
    CHECK(pixels_to_degrees(3, 4, g) == doctest::Approx(pixels_to_degrees(5, 0, g)).epsilon(1e-15));
}

TEST_CASE("constant gaze for two seconds is one fixation") {
    synth::GazeStream s{Geometry{}};
    s.dwell(640, 360, 2000);
    const auto f = detect_fixations(s.samples(), IvtConfig{});
    REQUIRE(f.size() == 1);
    CHECK(std::abs(f[0].duration_ms - 2000.0) <= s.period_ms());
    CHECK(f[0].x == 640.0);
    CHECK(f[0].y == 360.0);
}

TEST_CASE("a sweep at 100 deg/s never fixates") {
    synth::GazeStream s{Geometry{}};
    s.start_at(0, 540);
    s.move_to(1900, 540, 100.0);
    const auto f = detect_fixations(s.samples(), IvtConfig{});
    CHECK(f.empty());
}

TEST_CASE("two dwells joined by a saccade") {
    const Geometry g;
    synth::GazeStream s{g};
    const double sep = s.pixels_for_degrees(10.0);
    const auto a = s.dwell(500, 500, 500);
    s.move_to(500 + sep, 500, 400.0);
    const auto b = s.dwell(500 + sep, 500, 500);
    const auto span_ms = [&](std::pair<std::size_t, std::size_t> r) {
        return static_cast<double>(s.samples()[r.second - 1].timestamp_us - s.samples()[r.first].timestamp_us) / 1000.0;
    };
    const auto f = detect_fixations(s.samples(), IvtConfig{});
    REQUIRE(f.size() == 2);
    CHECK(pixels_to_degrees(f[0].x - 500, f[0].y - 500, g) <= 0.1);
    CHECK(pixels_to_degrees(f[1].x - 500 - sep, f[1].y - 500, g) <= 0.1);
    CHECK(std::abs(f[0].duration_ms - span_ms(a)) <= 2 * s.period_ms());
    CHECK(std::abs(f[1].duration_ms - span_ms(b)) <= 2 * s.period_ms());
}

TEST_CASE("fewer than two valid samples yields nothing") {
    std::vector<GazeSample> none;
    CHECK(detect_fixations(none, IvtConfig{}).empty());
    std::vector<GazeSample> one{{0, 1, 1, true}, {10, 0, 0, false}};
    CHECK(detect_fixations(one, IvtConfig{}).empty());
}

TEST_CASE("velocities use symmetric, forward and backward differences") {
    const Geometry g;
    std::vector<GazeSample> s{{0, 0, 0, true}, {1000, 10, 0, true}, {2000, 30, 0, true}, {3000, 0, 0, false},
                              {4000, 5, 0, true}, {5000, 5, 0, true}};
    const auto v = sample_velocities(s, g);
    CHECK(*v[0] == doctest::Approx(pixels_to_degrees(10, 0, g) / 1e-3));
    CHECK(*v[1] == doctest::Approx(pixels_to_degrees(30, 0, g) / 2e-3));
    CHECK(*v[2] == doctest::Approx(pixels_to_degrees(20, 0, g) / 1e-3));
    CHECK_FALSE(v[3].has_value());
    CHECK(*v[4] == 0.0);
    CHECK(*v[5] == 0.0);

    std::vector<GazeSample> isolated{{0, 0, 0, false}, {1000, 1, 1, true}, {2000, 0, 0, false}};
    CHECK_FALSE(sample_velocities(isolated, g)[1].has_value());
}

TEST_CASE("short dwells are dropped") {
    synth::GazeStream s{Geometry{}};
    const double sep = s.pixels_for_degrees(8.0);
    s.dwell(300, 300, 40);
    s.move_to(300 + sep, 300, 400.0);
    s.dwell(300 + sep, 300, 300);
    const auto f = detect_fixations(s.samples(), IvtConfig{});
    REQUIRE(f.size() == 1);
    CHECK(f[0].x == doctest::Approx(300 + sep));
}

TEST_CASE("a brief dropout inside a dwell merges back") {
    synth::GazeStream s{Geometry{}};
    s.dwell(700, 400, 300);
    s.invalid(24);  // 20 ms
    s.dwell(700, 400, 300);
    const auto f = detect_fixations(s.samples(), IvtConfig{});
    REQUIRE(f.size() == 1);
    CHECK(f[0].duration_ms == doctest::Approx(620.0).epsilon(0.01));
}

TEST_CASE("a long dropout splits the dwell") {
    synth::GazeStream s{Geometry{}};
    s.dwell(700, 400, 300);
    s.invalid(120);  // 100 ms, beyond the merge gap
    s.dwell(700, 400, 300);
    CHECK(detect_fixations(s.samples(), IvtConfig{}).size() == 2);
}

TEST_CASE("dropouts never add more fixations than the gap rule predicts") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        synth::GazeStream s{Geometry{}};
        s.dwell(800, 500, 1000);
        std::uniform_int_distribution<std::size_t> at(10, s.samples().size() - 10);
        std::uniform_int_distribution<std::size_t> len(1, 150);
        const std::size_t holes = 1 + trial % 4;
        std::size_t long_gaps = 0;
        std::vector<bool> dropped(s.samples().size(), false);
        for (std::size_t h = 0; h < holes; ++h) {
            const std::size_t start = at(rng);
            const std::size_t n = std::min(len(rng), s.samples().size() - start - 1);
            for (std::size_t i = start; i < start + n; ++i) dropped[i] = true;
        }
        for (std::size_t i = 0; i < dropped.size(); ++i) {
            if (dropped[i]) {
                s.samples()[i].valid = false;
                s.samples()[i].x = std::nan("");
            }
        }
        // Count the runs of invalid samples longer than the merge gap.
        std::size_t run = 0;
        for (std::size_t i = 0; i <= dropped.size(); ++i) {
            if (i < dropped.size() && dropped[i]) {
                ++run;
                continue;
            }
            if (run > 0 && static_cast<double>(run + 1) * s.period_ms() > 75.0) ++long_gaps;
            run = 0;
        }
        const auto f = detect_fixations(s.samples(), IvtConfig{});
        CHECK(f.size() <= long_gaps + 1);
    }
}

TEST_CASE("output is time ordered, non-overlapping and long enough") {
    std::mt19937_64 rng(23);
    synth::GazeStream s{Geometry{}};
    std::uniform_real_distribution<double> px(100, 1800);
    std::uniform_real_distribution<double> dur(30, 600);
    std::vector<std::pair<double, double>> dwells;
    std::vector<std::pair<std::int64_t, std::int64_t>> windows;
    s.start_at(100, 100);
    for (int i = 0; i < 12; ++i) {
        // Dwells sit on a diagonal so consecutive ones are far apart.
        const double x = 100 + 140.0 * (i + 1);
        const double y = i % 2 ? 200 : 800;
        s.move_to(x, y, 350.0);
        const auto [a, b] = s.dwell(x, y, dur(rng), 0.05, &rng);
        dwells.emplace_back(x, y);
        windows.emplace_back(s.samples()[a].timestamp_us, s.samples()[b - 1].timestamp_us);
    }
    IvtConfig cfg;
    const auto f = detect_fixations(s.samples(), cfg);
    CHECK(f.size() >= 6);
    int prev = -1;
    for (const auto& fx : f) {
        CHECK(fx.duration_ms >= cfg.min_fixation_duration_ms);
        int nearest = 0;
        for (int d = 1; d < 12; ++d) {
            if (std::hypot(fx.x - dwells[d].first, fx.y - dwells[d].second) <
                std::hypot(fx.x - dwells[nearest].first, fx.y - dwells[nearest].second)) {
                nearest = d;
            }
        }
        CHECK(nearest > prev);
        const double window_ms = static_cast<double>(windows[nearest].second - windows[nearest].first) / 1000.0;
        CHECK(fx.duration_ms <= window_ms);
        prev = nearest;
    }
}

TEST_CASE("scaling threshold and velocities together keeps the classification") {
    // 1000 Hz keeps timestamps on whole milliseconds, so the time rescale
    // below is exact.
    std::mt19937_64 rng(29);
    synth::GazeStream s{Geometry{}, 1000.0};
    s.start_at(200, 200);
    for (int i = 0; i < 6; ++i) {
        s.dwell(200 + 150 * i, 300, 200, 0.3, &rng);
        s.move_to(200 + 150 * (i + 1), 300, 120.0);
    }
    const auto base = s.samples();
    IvtConfig cfg;
    const auto ref = classify_fixation_samples(base, cfg);
    const auto v0 = sample_velocities(base, cfg.geometry);
    for (std::int64_t divisor : {2, 4, 8}) {
        std::vector<GazeSample> fast = base;
        for (auto& g : fast) g.timestamp_us /= divisor;
        IvtConfig scaled = cfg;
        scaled.velocity_threshold_deg_s = cfg.velocity_threshold_deg_s * static_cast<double>(divisor);
        const auto got = classify_fixation_samples(fast, scaled);
        std::size_t compared = 0;
        for (std::size_t i = 0; i < ref.size(); ++i) {
            if (v0[i] && std::abs(*v0[i] - cfg.velocity_threshold_deg_s) < 1e-9 * cfg.velocity_threshold_deg_s) continue;
            CHECK(got[i] == ref[i]);
            ++compared;
        }
        CHECK(compared == ref.size());
    }
}

TEST_CASE("invalid configuration is rejected") {
    IvtConfig cfg;
    cfg.velocity_threshold_deg_s = 0;
    std::vector<GazeSample> s{{0, 0, 0, true}, {10, 0, 0, true}};
    CHECK_THROWS_AS(detect_fixations(s, cfg), ConfigError);
}

}

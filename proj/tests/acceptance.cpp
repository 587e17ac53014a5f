// Acceptance checks. Prints one PASS/FAIL line per criterion.
//
//   aesa_acceptance                 run every criterion
//   aesa_acceptance <name>...       run the named criteria
//   AESA_UPDATE_GOLDEN=1            rewrite the golden digests instead of comparing

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "aesa/bc_dataset.hpp"
#include "aesa/env.hpp"
#include "aesa/summary.hpp"
#include "oracles.hpp"

using namespace aesa;
constexpr double pi = std::numbers::pi;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
};

// Accumulates sub-checks into one verdict with a readable detail string.
class Checks {
public:
    void expect(bool cond, const std::string& what) {
        ok_ = ok_ && cond;
        if (!detail_.empty()) detail_ += "; ";
        detail_ += (cond ? "" : "FAILED ") + what;
    }
    void note(const std::string& what) {
        if (!detail_.empty()) detail_ += "; ";
        detail_ += what;
    }
    Outcome done() const { return {ok_, detail_}; }

private:
    bool ok_ = true;
    std::string detail_;
};

std::string fmt(double v, int prec = 4) {
    std::ostringstream os;
    os.precision(prec);
    os << v;
    return os.str();
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

Outcome scan_field_math() {
    Checks c;
    const double sigma0 = sigma0_from_beamwidth(9.0 * pi / 180.0);
    double worst_pmax = 0.0;
    for (double gamma : {0.0, 1e-3, gamma_from_decay(0.01, 600), 0.01, 0.1}) {
        for (int T : {0, 1, 4, 10}) {
            // Term-by-term: sigma_t = sigma0 (1 + gamma)^t, density 1 / (2 pi sigma_t^2).
            double sum = 0.0;
            double sigma = sigma0;
            for (int t = 0; t <= T; ++t) {
                sum += 1.0 / (2.0 * pi * sigma * sigma);
                sigma *= 1.0 + gamma;
            }
            worst_pmax = std::max(worst_pmax, rel_err(p_max(T, sigma0, gamma), sum));
        }
    }
    c.expect(worst_pmax <= 1e-12, "p_max rel err " + fmt(worst_pmax));

    double worst_ratio = 0.0;
    for (double zeta : {0.01, 0.5}) {
        ScanHistory::Params p;
        p.gamma = gamma_from_decay(zeta, 600);
        ScanHistory h(p);
        const Bearing mu{0.2, -0.3};
        h.push(mu, 0);
        const double v0 = h.scan_value(mu, 0);
        for (int T = 1; T <= 1200; ++T)
            worst_ratio = std::max(worst_ratio, rel_err(h.scan_value(mu, T) / v0, std::pow(1.0 + p.gamma, -2.0 * T)));
    }
    c.expect(worst_ratio <= 1e-12, "peak-decay ratio rel err " + fmt(worst_ratio));

    double worst_zeta = 0.0;
    for (double zeta : {1e-4, 0.01, 0.1, 0.5, 0.99, 1.0})
        for (double T : {1.0, 4.0, 100.0, 600.0, 5000.0})
            worst_zeta = std::max(worst_zeta, rel_err(std::pow(1.0 + gamma_from_decay(zeta, T), -2.0 * T), zeta));
    c.expect(worst_zeta <= 1e-12, "zeta round trip rel err " + fmt(worst_zeta));
    return c.done();
}

Outcome action_grid() {
    Checks c;
    const double deg = pi / 180.0;
    const int n = grid_size(120 * deg, 9 * deg);
    c.expect(n == 19, "grid_size(120, 9) = " + std::to_string(n));
    const ActionGrid g = ActionGrid::make(120 * deg, 9 * deg);
    c.expect(g.to_bearings({0, 0}) == Bearing{-pi / 3, -pi / 3} && g.to_bearings({18, 18}) == Bearing{pi / 3, pi / 3} &&
                 g.to_bearings({9, 9}) == Bearing{0.0, 0.0},
             "corner and centre bearings exact");

    // Planar coverage of [-60, 60]^2 by beams of radius 4.5 deg on a square lattice.
    auto uncovered = [](double pitch, std::uint64_t seed) {
        std::mt19937_64 gen(seed);
        std::uniform_real_distribution<double> u(-60.0, 60.0);
        int misses = 0;
        const int samples = 100000;
        for (int k = 0; k < samples; ++k) {
            const double x = u(gen), y = u(gen);
            const double cx = -60.0 + pitch * (std::floor((x + 60.0) / pitch) + 0.5);
            const double cy = -60.0 + pitch * (std::floor((y + 60.0) / pitch) + 0.5);
            if (std::hypot(x - cx, y - cy) > 4.5) ++misses;
        }
        return static_cast<double>(misses) / samples;
    };
    const double without = uncovered(9.0, 1);
    c.expect(std::abs(without - 0.215) <= 0.01, "uncovered without sqrt2/2 factor " + fmt(100 * without) + "%");
    const double with = uncovered(120.0 / n, 2);
    c.expect(with == 0.0, "uncovered with factor " + fmt(100 * with) + "%");
    return c.done();
}

Outcome assignment_oracle() {
    std::mt19937_64 gen(2024);
    int mismatches = 0, real_mismatches = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int r = 1 + static_cast<int>(gen() % 6), m = 1 + static_cast<int>(gen() % 6);
        // Integer-valued costs make every candidate sum exact, so equality is exact.
        Eigen::MatrixXd cost(r, m), real(r, m);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < m; ++j) {
                cost(i, j) = static_cast<double>(gen() % 1000);
                real(i, j) = std::ldexp(static_cast<double>(gen() >> 11), -53) * 100.0;
            }
        if (solve_assignment(cost).total_cost != oracle::brute_force_assignment(cost)) ++mismatches;
        if (rel_err(solve_assignment(real).total_cost, oracle::brute_force_assignment(real)) > 1e-12) ++real_mismatches;
    }
    Checks c;
    c.expect(mismatches == 0, std::to_string(mismatches) + "/1000 integer-cost mismatches");
    c.expect(real_mismatches == 0, std::to_string(real_mismatches) + "/1000 real-cost mismatches beyond 1e-12");
    return c.done();
}

Outcome ukf_linear_consistency() {
    std::mt19937_64 gen(77);
    std::normal_distribution<double> n01;
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        StateVec x;
        for (int i = 0; i < 6; ++i) x(i) = 10 * n01(gen);
        TrackEstimate prior;
        prior.mean = x;
        prior.cov = oracle::random_spd(6, 0.5, 50.0, gen);
        const MeasCov R = oracle::random_spd(3, 0.1, 5.0, gen);
        Eigen::Matrix<double, 3, 6> H;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 6; ++j) H(i, j) = n01(gen);
        MeasVec z;
        for (int i = 0; i < 3; ++i) z(i) = 10 * n01(gen);
        const auto u = unscented_update(
            prior, z, R, UkfParams{}, [&](const StateVec& s) { return MeasVec(H * s); },
            [](const MeasVec& a, const MeasVec& b) { return MeasVec(a - b); });
        const auto k = oracle::kalman_update(x, prior.cov, H, R, z);
        worst = std::max(worst, (Eigen::VectorXd(u.track.mean) - k.mean).cwiseAbs().maxCoeff());
        worst = std::max(worst, (Eigen::MatrixXd(u.track.cov) - k.cov).cwiseAbs().maxCoeff());
    }
    Checks c;
    c.expect(worst <= 1e-8, "max element-wise difference " + fmt(worst));
    return c.done();
}

Outcome gospa_checks() {
    Checks c;
    const GospaConfig cfg;
    const auto empty = gospa({}, {}, cfg);
    const auto one = gospa({{0, 0, 0}}, {{6, 8, 0}}, cfg);
    const auto missed = gospa({{1, 2, 3}}, {}, cfg);
    c.expect(empty.distance == 0.0 && empty.missed == 0.0 && empty.false_comp == 0.0, "empty sets give 0");
    c.expect(one.distance == 10.0 && one.localisation == 10.0 && one.missed == 0.0 && one.false_comp == 0.0,
             "single pair at d=10 gives 10");
    c.expect(missed.distance == 250.0 && missed.missed == 250.0, "one missed truth gives 250");

    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(-700.0, 700.0);
    auto random_set = [&](int n) {
        std::vector<CartesianPosition> s;
        for (int i = 0; i < n; ++i) s.push_back({u(gen), u(gen), u(gen)});
        return s;
    };
    int mismatches = 0, nonzero_self = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const auto x = random_set(static_cast<int>(gen() % 7));
        const auto y = random_set(static_cast<int>(gen() % 7));
        std::vector<Eigen::Vector3d> vx, vy;
        for (const auto& p : x) vx.push_back(p.vec());
        for (const auto& p : y) vy.push_back(p.vec());
        const double ref = oracle::brute_force_gospa(vx, vy, cfg.c, cfg.p);
        if (rel_err(gospa(x, y, cfg).distance, ref) > 1e-12 && std::abs(gospa(x, y, cfg).distance - ref) > 1e-9)
            ++mismatches;
        if (gospa(x, x, cfg).distance != 0.0) ++nonzero_self;
    }
    c.expect(mismatches == 0, std::to_string(mismatches) + "/500 brute-force mismatches (sizes <= 6)");
    c.expect(nonzero_self == 0, "GOSPA(X, X) = 0 on 500 sets");
    return c.done();
}

Outcome tracking_sanity() {
    // Boresight follows the true bearing of target 0 every step; the
    // tracker and sensor run exactly as inside the environment.
    Checks c;
    int passed = 0;
    double worst_ratio = 0.0;
    const int seeds = 20;
    for (std::uint64_t seed = 0; seed < seeds; ++seed) {
        EpisodeConfig cfg;
        cfg.seed = seed;
        Rng spawn_rng = Rng::stream(seed, "spawn");
        auto truths = spawn_targets(cfg.n_targets, spawn_rng, cfg.spawn);
        SensorStreams streams{Rng::stream(seed, "measurement"), Rng::stream(seed, "detection"),
                              Rng::stream(seed, "clutter")};
        Tracker tracker(cfg.motion_model(), cfg.sensor.R(), cfg.tracker);
        std::optional<int> followed;
        double initial = 0.0, final_norm = 0.0;
        for (int t = 0; t < 50; ++t) {
            propagate(truths, cfg.dt);
            const Bearing b = cart_to_spherical(truths[0].position).bearing();
            const auto dets = sense(truths, b, cfg.sensor, t, streams);
            const auto rep = tracker.step(dets);
            if (!followed) {
                for (std::size_t k = 0; k < rep.born_ids.size(); ++k) {
                    // Births are appended in detection order among unassigned detections.
                    const auto& trk = tracker.tracks()[tracker.tracks().size() - rep.born_ids.size() + k];
                    const auto it = std::find_if(dets.begin(), dets.end(), [&](const Detection& d) {
                        return d.truth_id == 0 && (spherical_to_cart(d.meas).vec() - trk.position().vec()).norm() < 1e-6;
                    });
                    if (it != dets.end()) {
                        followed = trk.track_id;
                        initial = trk.cov_norm();
                    }
                }
            }
        }
        if (followed) {
            for (const auto& trk : tracker.tracks())
                if (trk.track_id == *followed) final_norm = trk.cov_norm();
        }
        const double ratio = followed && final_norm > 0.0 ? final_norm / initial : 1.0;
        worst_ratio = std::max(worst_ratio, ratio);
        if (ratio < 0.1) ++passed;
    }
    c.expect(passed == seeds, std::to_string(passed) + "/" + std::to_string(seeds) +
                                  " seeds below 10% of initiation norm after 50 steps (worst ratio " +
                                  fmt(worst_ratio) + ")");
    return c.done();
}

struct PolicyAggregate {
    double search_reward = 0.0;  // mean over episodes of the per-episode mean
    double cov_norm = 0.0;       // mean over episodes of the per-episode mean
    int switch_events = 0;
    double switching = 0.0;
};

Outcome ordinal_reproduction() {
    const int episodes = 100;
    std::map<std::string, PolicyAggregate> agg;
    for (const std::string name : {"static", "random", "coverage"}) {
        PolicyAggregate a;
        for (int k = 0; k < episodes; ++k) {
            EpisodeConfig cfg;
            cfg.seed = static_cast<std::uint64_t>(k);
            auto p = make_policy(name);
            const EpisodeSummary s = episode_summary(run_episode(cfg, *p));
            a.search_reward += s.search_reward.mean / episodes;
            a.cov_norm += s.cov_norm.mean / episodes;
            a.switch_events += s.switch_events;
            a.switching += s.gospa_switching;
        }
        agg[name] = a;
    }
    const auto& st = agg["static"];
    const auto& rn = agg["random"];
    const auto& cv = agg["coverage"];
    Checks c;
    c.note("search reward static " + fmt(st.search_reward) + ", random " + fmt(rn.search_reward) + ", coverage " +
           fmt(cv.search_reward));
    c.note("cov norm static " + fmt(st.cov_norm) + ", random " + fmt(rn.cov_norm) + ", coverage " + fmt(cv.cov_norm));
    c.expect(std::abs(st.search_reward) >= 10 * std::abs(rn.search_reward) &&
                 std::abs(st.search_reward) >= 10 * std::abs(cv.search_reward),
             "(a) static at least 10x worse");
    c.expect(cv.search_reward > rn.search_reward && cv.search_reward > st.search_reward, "(b) coverage best");
    c.expect(st.cov_norm > rn.cov_norm && rn.cov_norm > cv.cov_norm, "(c) cov norm static > random > coverage");
    c.expect(st.switching == 0.0 && rn.switching == 0.0 && cv.switching == 0.0,
             "(d) switching zero (events " + std::to_string(st.switch_events) + "/" +
                 std::to_string(rn.switch_events) + "/" + std::to_string(cv.switch_events) + ")");
    return c.done();
}

Outcome determinism() {
    const std::string golden_path = std::string(AESA_GOLDEN_DIR) + "/trace_digests.json";
    const bool update = std::getenv("AESA_UPDATE_GOLDEN") != nullptr;
    nlohmann::json golden = nlohmann::json::object();
    if (!update) {
        std::ifstream in(golden_path);
        if (!in) return {false, "missing " + golden_path + " (run with AESA_UPDATE_GOLDEN=1 to create)"};
        golden = nlohmann::json::parse(in);
    }
    Checks c;
    int identical = 0, matched = 0, total = 0;
    nlohmann::json fresh = nlohmann::json::object();
    for (const std::string name : {"static", "random", "coverage"}) {
        for (std::uint64_t seed : {1ULL, 17ULL, 123ULL}) {
            EpisodeConfig cfg;
            cfg.seed = seed;
            auto p1 = make_policy(name), p2 = make_policy(name);
            const std::string a = trace_to_string(run_episode(cfg, *p1));
            const std::string b = trace_to_string(run_episode(cfg, *p2));
            ++total;
            if (a == b) ++identical;
            const std::string key = name + "/" + std::to_string(seed);
            fresh[key] = {{"fnv1a64", hex64(fnv1a64(a))}, {"bytes", a.size()}};
            if (!update && golden.contains(key) && golden[key] == fresh[key]) ++matched;
        }
    }
    c.expect(identical == total, std::to_string(identical) + "/" + std::to_string(total) + " repeated runs bit-identical");
    if (update) {
        std::ofstream(golden_path) << fresh.dump(2) << '\n';
        c.note("golden digests rewritten");
    } else {
        c.expect(matched == total, std::to_string(matched) + "/" + std::to_string(total) + " match golden digests");
    }
    return c.done();
}

Outcome bc_dataset() {
    const std::uint64_t n = 100000;
    const auto path = std::filesystem::temp_directory_path() / ("aesa_acceptance_bc_" + std::to_string(::getpid()));
    EpisodeConfig cfg;
    Checks c;
    {
        RandomPolicy teacher;
        export_bc_dataset(cfg, n, teacher, path.string());
    }
    c.note("file " + fmt(static_cast<double>(std::filesystem::file_size(path)) / 1e6, 5) + " MB");

    // Regenerate the stream and compare record by record with the file.
    BcDatasetReader reader(path.string());
    RandomPolicy teacher;
    std::vector<long> psi(19, 0), theta(19, 0);
    std::uint64_t equal = 0, seen = 0;
    collect_bc_samples(cfg, n, teacher, [&](const BcRecord& expected) {
        const BcRecord got = reader.next();
        ++seen;
        if (got.action == expected.action && got.observation == expected.observation) ++equal;
        ++psi[static_cast<std::size_t>(got.action.a_psi)];
        ++theta[static_cast<std::size_t>(got.action.a_theta)];
    });
    std::filesystem::remove(path);
    const double p_psi = oracle::chi_square_uniform_p(psi), p_theta = oracle::chi_square_uniform_p(theta);
    c.expect(reader.count() == n && seen == n && reader.remaining() == 0, "record count " + std::to_string(reader.count()));
    c.expect(equal == n, std::to_string(equal) + "/" + std::to_string(n) + " records round-trip bit-exact");
    c.expect(p_psi > 0.01 && p_theta > 0.01, "chi-square p psi " + fmt(p_psi) + ", theta " + fmt(p_theta));
    return c.done();
}

struct Criterion {
    std::string name;
    double limit_s;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all = {
        {"scan_field_math", 1.0, scan_field_math},
        {"action_grid", 5.0, action_grid},
        {"assignment_oracle", 10.0, assignment_oracle},
        {"ukf_linear_consistency", 5.0, ukf_linear_consistency},
        {"gospa", 5.0, gospa_checks},
        {"tracking_sanity", 5.0, tracking_sanity},
        {"ordinal_reproduction", 600.0, ordinal_reproduction},
        {"determinism", 60.0, determinism},
        {"bc_dataset", 120.0, bc_dataset},
    };
    std::vector<std::string> wanted(argv + 1, argv + argc);
    int failures = 0, ran = 0;
    for (const auto& crit : all) {
        if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), crit.name) == wanted.end()) continue;
        ++ran;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = crit.run();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs < crit.limit_s;
        const bool pass = out.ok && in_time;
        if (!pass) ++failures;
        std::printf("%s %s: %s; runtime %.2f s (limit %.0f s%s)\n", pass ? "PASS" : "FAIL", crit.name.c_str(),
                    out.detail.c_str(), secs, crit.limit_s, in_time ? "" : ", exceeded");
        std::fflush(stdout);
    }
    if (ran == 0) {
        std::fprintf(stderr, "no criterion matched\n");
        return 2;
    }
    return failures == 0 ? 0 : 1;
}

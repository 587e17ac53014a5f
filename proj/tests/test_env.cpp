#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>

#include <unistd.h>

#include "aesa/bc_dataset.hpp"
#include "aesa/env.hpp"
#include "aesa/summary.hpp"
#include "oracles.hpp"

using namespace aesa;

EpisodeConfig short_config(std::int64_t steps, std::uint64_t seed = 1) {
    EpisodeConfig c;
    c.n_steps = steps;
    c.seed = seed;
    return c;
}

bool all_zero(const Observation& o) {
    for (float v : o.track_matrix)
        if (v != 0.0f) return false;
    for (float v : o.scan_raster)
        if (v != 0.0f) return false;
    return true;
}

TEST(Env, ResetGivesZeroObservation) {
    Environment env(short_config(10));
    EXPECT_TRUE(all_zero(env.reset()));
    EXPECT_EQ(env.step_count(), 0);
    EXPECT_EQ(env.truths().size(), 10u);
}

TEST(Env, SameSeedSameStart) {
    Environment a(short_config(10, 3)), b(short_config(10, 3));
    EXPECT_EQ(a.reset(), b.reset());
    for (std::size_t i = 0; i < a.truths().size(); ++i) EXPECT_EQ(a.truths()[i].position, b.truths()[i].position);
}

TEST(Env, ResetMidEpisodeRestarts) {
    Environment env(short_config(100, 8));
    env.reset();
    const auto truths = env.truths();
    std::vector<StepResult> first;
    for (int k = 0; k < 20; ++k) first.push_back(env.step({k % 19, 9}));
    EXPECT_TRUE(all_zero(env.reset()));
    EXPECT_EQ(env.step_count(), 0);
    EXPECT_TRUE(env.tracks().empty());
    EXPECT_TRUE(env.scan_history().empty());
    for (std::size_t i = 0; i < truths.size(); ++i) EXPECT_EQ(env.truths()[i].position, truths[i].position);
    for (int k = 0; k < 20; ++k) {
        const StepResult r = env.step({k % 19, 9});
        EXPECT_EQ(r.observation, first[static_cast<std::size_t>(k)].observation);
        EXPECT_EQ(r.reward.r_total, first[static_cast<std::size_t>(k)].reward.r_total);
    }
}

TEST(Env, DoneAndContractViolations) {
    Environment env(short_config(1));
    EXPECT_THROW(env.step({0, 0}), ContractViolation);
    env.reset();
    const StepResult r = env.step({0, 0});
    EXPECT_TRUE(r.done);
    EXPECT_THROW(env.step({0, 0}), ContractViolation);
    env.reset();
    EXPECT_THROW(env.step({19, 0}), DomainError);
}

TEST(Env, FirstSearchRewardIsZero) {
    Environment env(short_config(2));
    env.reset();
    EXPECT_EQ(env.step({4, 4}).reward.r_sv, 0.0);
    EXPECT_LT(env.step({4, 4}).reward.r_sv, 0.0);
}

TEST(Env, NoTargetsInBeamMeansNoTrackReward) {
    EpisodeConfig c = short_config(50);
    c.n_targets = 0;
    Environment env(c);
    env.reset();
    for (int k = 0; k < 50; ++k) {
        const StepResult r = env.step({k % 19, (k / 19) % 19});
        EXPECT_TRUE(r.info.detections.empty());
        EXPECT_EQ(r.reward.r_tl, 0.0);
    }
}

TEST(Env, InfoCarriesGospaInputs) {
    Environment env(short_config(5));
    env.reset();
    const StepResult r = env.step({9, 9});
    EXPECT_EQ(r.info.truths.size(), 10u);
    EXPECT_EQ(r.info.tracks.size(), env.tracks().size());
    EXPECT_EQ(r.info.t, 0);
    EXPECT_EQ(r.info.bearing, env.grid().to_bearings({9, 9}));
}

TEST(RunEpisode, CoverageScansEveryCell) {
    auto p = make_policy("coverage");
    const EpisodeTrace tr = run_episode(short_config(361), *p);
    std::set<std::pair<int, int>> cells;
    for (const auto& s : tr.steps) cells.insert({s.action.a_psi, s.action.a_theta});
    EXPECT_EQ(cells.size(), 361u);
}

TEST(RunEpisode, StaticHoldsOneBearing) {
    auto p = make_policy("static");
    const EpisodeTrace tr = run_episode(short_config(200), *p);
    std::set<std::pair<double, double>> bearings;
    for (const auto& s : tr.steps) bearings.insert({s.bearing.psi, s.bearing.theta});
    EXPECT_EQ(bearings.size(), 1u);
}

TEST(RunEpisode, BatchOfSeedsGivesOneRowEach) {
    std::vector<EpisodeSummary> rows;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto p = make_policy("random");
        rows.push_back(episode_summary(run_episode(short_config(20, seed), *p)));
    }
    EXPECT_EQ(rows.size(), 100u);
    for (std::size_t k = 0; k < rows.size(); ++k) EXPECT_EQ(rows[k].seed, k);
}

TEST(RunEpisode, BitIdenticalAcrossRuns) {
    for (const std::string name : {"static", "random", "coverage"}) {
        auto a = make_policy(name), b = make_policy(name);
        EXPECT_EQ(trace_to_string(run_episode(short_config(300, 12), *a)),
                  trace_to_string(run_episode(short_config(300, 12), *b)))
            << name;
    }
}

TEST(RunEpisode, TogglingClutterLeavesSpawnAndPolicyStreams) {
    EpisodeConfig quiet = short_config(100, 6), noisy = quiet;
    noisy.sensor.clutter_rate = 0.5;
    auto a = make_policy("random"), b = make_policy("random");
    const auto ta = run_episode(quiet, *a), tb = run_episode(noisy, *b);
    for (std::size_t k = 0; k < ta.steps.size(); ++k) {
        ASSERT_EQ(ta.steps[k].action, tb.steps[k].action);
        for (std::size_t i = 0; i < ta.steps[k].truths.size(); ++i)
            ASSERT_EQ(ta.steps[k].truths[i].position, tb.steps[k].truths[i].position);
    }
}

class TempFile {
public:
    explicit TempFile(const std::string& name)
        : path_((std::filesystem::temp_directory_path() / (name + std::to_string(::getpid()))).string()) {}
    ~TempFile() { std::remove(path_.c_str()); }
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

TEST(BcDataset, ZeroSamplesRejected) {
    RandomPolicy teacher;
    TempFile f("aesa_bc_zero");
    EXPECT_THROW(export_bc_dataset(short_config(10), 0, teacher, f.path()), ConfigError);
}

TEST(BcDataset, RoundTripLossless) {
    const EpisodeConfig cfg = short_config(40, 2);
    RandomPolicy teacher;
    std::vector<BcRecord> expected;
    collect_bc_samples(cfg, 100, teacher, [&](const BcRecord& r) { expected.push_back(r); });

    TempFile f("aesa_bc_rt");
    RandomPolicy teacher2;
    export_bc_dataset(cfg, 100, teacher2, f.path());
    BcDatasetReader reader(f.path());
    EXPECT_EQ(std::filesystem::file_size(f.path()), 8 + 4 + reader.header().dump().size() + 100 * kBcRecordBytes);
    EXPECT_EQ(reader.count(), 100u);
    EXPECT_EQ(reader.header().at("fields").at(1).at("shape"), nlohmann::json({1, 48, 48}));
    EXPECT_EQ(reader.header().at("meta").at("teacher"), "random");
    for (const auto& e : expected) {
        const BcRecord r = reader.next();
        ASSERT_EQ(r.action, e.action);
        ASSERT_EQ(r.observation, e.observation);
    }
    EXPECT_THROW(reader.next(), ContractViolation);
}

TEST(BcDataset, RecordsAreTheObservationsActedOn) {
    const EpisodeConfig cfg = short_config(30, 5);
    RandomPolicy teacher;
    std::vector<BcRecord> recs;
    collect_bc_samples(cfg, 45, teacher, [&](const BcRecord& r) { recs.push_back(r); });
    ASSERT_EQ(recs.size(), 45u);
    EXPECT_TRUE(all_zero(recs[0].observation));
    EXPECT_TRUE(all_zero(recs[30].observation));  // second episode starts fresh

    Environment env(cfg);
    env.reset();
    for (int k = 0; k < 29; ++k) {
        const StepResult r = env.step(recs[static_cast<std::size_t>(k)].action);
        ASSERT_EQ(r.observation, recs[static_cast<std::size_t>(k + 1)].observation);
    }
}

TEST(BcDataset, TruncatedFileIsIntegrityError) {
    TempFile f("aesa_bc_trunc");
    RandomPolicy teacher;
    export_bc_dataset(short_config(10), 5, teacher, f.path());
    std::filesystem::resize_file(f.path(), std::filesystem::file_size(f.path()) - 10);
    EXPECT_THROW(read_bc_dataset(f.path()), IntegrityError);
}

TEST(BcDataset, RandomTeacherActionsUniform) {
    RandomPolicy teacher;
    std::vector<long> psi(19, 0), theta(19, 0);
    collect_bc_samples(short_config(1200, 0), 100000, teacher, [&](const BcRecord& r) {
        ++psi[static_cast<std::size_t>(r.action.a_psi)];
        ++theta[static_cast<std::size_t>(r.action.a_theta)];
    });
    EXPECT_GT(oracle::chi_square_uniform_p(psi), 0.01);
    EXPECT_GT(oracle::chi_square_uniform_p(theta), 0.01);
}

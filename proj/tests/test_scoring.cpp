#include <algorithm>
#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "avalign/errors.hpp"
#include "avalign/scoring.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using avalign::AudioBuffer;
using avalign::ReflectionScores;
using avalign::Scorer;
using avalign::ScorerConfig;
using avalign::VideoFeatureSeries;

TEST_CASE("cosine_similarity basics") {
    CHECK(avalign::cosine_similarity({1, 0, 2}, {1, 0, 2}) == doctest::Approx(1.0));
    CHECK(avalign::cosine_similarity({1, 0}, {0, 1}) == doctest::Approx(0.0));
    CHECK(avalign::cosine_similarity({1, 2}, {-1, -2}) == doctest::Approx(-1.0));
    CHECK(avalign::cosine_similarity({2, 0}, {3, 3}) == doctest::Approx(std::sqrt(0.5)));
    CHECK_THROWS_AS(avalign::cosine_similarity({1, 2}, {1, 2, 3}), avalign::DegenerateSeries);
    CHECK_THROWS_AS(avalign::cosine_similarity({}, {}), avalign::DegenerateSeries);
    CHECK_THROWS_AS(avalign::cosine_similarity({0, 0}, {1, 2}), avalign::DegenerateSeries);
}

TEST_CASE("temporal score rewards synchronized pulses") {
    Scorer s;
    AudioBuffer a = fixture::pulsed_audio(2.0, 0.1, 4.0);
    VideoFeatureSeries sync = fixture::pulsed_video(2.0, 0.1, 4.0, "dog");
    VideoFeatureSeries anti = fixture::pulsed_video(2.0, 0.35, 4.0, "dog");  // half period late

    double hit = s.score_temporal(a, sync);
    double miss = s.score_temporal(a, anti);
    CHECK(hit > 0.9);
    CHECK(miss < 0.45);
    CHECK(hit > miss + 0.3);
}

TEST_CASE("a flat series is degenerate and scores 0.5") {
    Scorer s;
    AudioBuffer a = fixture::pulsed_audio(2.0, 0.1, 3.0);
    VideoFeatureSeries flat;
    flat.frame_rate_hz = 25.0;
    flat.activity.assign(75, 0.7);
    bool degen = false;
    CHECK(s.score_temporal(a, flat, &degen) == 0.5);
    CHECK(degen);

    // constant-envelope audio trips the same guard from the audio side
    AudioBuffer tone = fixture::tone(500.0, 3.0, 0.4);
    VideoFeatureSeries v = fixture::pulsed_video(2.0, 0.1, 3.0, "dog");
    degen = false;
    CHECK(s.score_temporal(tone, v, &degen) == 0.5);
    CHECK(degen);
}

TEST_CASE("temporal needs two overlapping ticks") {
    Scorer s;
    AudioBuffer a = fixture::pulsed_audio(2.0, 0.1, 3.0);
    VideoFeatureSeries v;
    v.frame_rate_hz = 25.0;
    v.activity = {0.5};
    CHECK_THROWS_AS(s.score_temporal(a, v), avalign::DegenerateSeries);
}

TEST_CASE("alignment prefers the matching class profile") {
    Scorer s;
    // dog's main bump is near 600 Hz; bell lives at 1400/2800
    AudioBuffer a = fixture::mix(fixture::tone(600.0, 3.0, 0.4),
                                 fixture::white_noise(3.0, 0.01, 41));
    VideoFeatureSeries dog = fixture::pulsed_video(2.0, 0.1, 3.0, "dog");
    VideoFeatureSeries bell = fixture::pulsed_video(2.0, 0.1, 3.0, "bell");
    double match = s.score_alignment(a, dog);
    double mismatch = s.score_alignment(a, bell);
    CHECK(match > mismatch + 0.05);
}

TEST_CASE("multi-label alignment takes the best match") {
    Scorer s;
    AudioBuffer a = fixture::mix(fixture::tone(600.0, 3.0, 0.4),
                                 fixture::white_noise(3.0, 0.01, 42));
    VideoFeatureSeries dog = fixture::pulsed_video(2.0, 0.1, 3.0, "dog");
    VideoFeatureSeries bell = fixture::pulsed_video(2.0, 0.1, 3.0, "bell");
    VideoFeatureSeries both = dog;
    both.labels = {"bell", "dog"};
    double best = s.score_alignment(a, both);
    CHECK(best == doctest::Approx(std::max(s.score_alignment(a, dog),
                                           s.score_alignment(a, bell))).epsilon(1e-12));
}

TEST_CASE("unknown labels fall back to the temporal proxy or throw") {
    AudioBuffer a = fixture::pulsed_audio(2.0, 0.1, 3.0);
    VideoFeatureSeries alien = fixture::pulsed_video(2.0, 0.1, 3.0, "theremin");

    Scorer fallback;  // fallback_envelope defaults to true
    CHECK(fallback.score_alignment(a, alien) ==
          doctest::Approx(fallback.score_temporal(a, alien)).epsilon(1e-12));

    ScorerConfig hard;
    hard.fallback_envelope = false;
    Scorer strict(hard);
    CHECK_THROWS_AS(strict.score_alignment(a, alien), avalign::UnknownLabelNoFallback);

    // a known label alongside the unknown one suppresses the fallback entirely
    VideoFeatureSeries mixed = alien;
    mixed.labels = {"theremin", "dog"};
    VideoFeatureSeries dog_only = alien;
    dog_only.labels = {"dog"};
    CHECK(strict.score_alignment(a, mixed) ==
          doctest::Approx(strict.score_alignment(a, dog_only)).epsilon(1e-12));
}

TEST_CASE("silent audio has zero content agreement") {
    Scorer s;
    AudioBuffer silent;
    silent.sample_rate_hz = 8000;
    silent.samples.assign(24000, 0.0);
    VideoFeatureSeries dog = fixture::pulsed_video(2.0, 0.1, 3.0, "dog");
    CHECK(s.score_alignment(silent, dog) == 0.0);
}

TEST_CASE("reflect bundles both scores and the degenerate flag") {
    Scorer s;
    AudioBuffer a = fixture::pulsed_audio(2.0, 0.1, 4.0);
    VideoFeatureSeries v = fixture::pulsed_video(2.0, 0.1, 4.0, "dog");
    ReflectionScores r = s.reflect(a, v);
    CHECK(r.alignment == doctest::Approx(s.score_alignment(a, v)));
    CHECK(r.temporal == doctest::Approx(s.score_temporal(a, v)));
    CHECK_FALSE(r.degenerate);
    CHECK(r.min_score() == std::min(r.alignment, r.temporal));
    CHECK(r.alignment >= 0.0);
    CHECK(r.alignment <= 1.0);
    CHECK(r.temporal >= 0.0);
    CHECK(r.temporal <= 1.0);

    VideoFeatureSeries flat = v;
    flat.activity.assign(flat.activity.size(), 0.3);
    ReflectionScores d = s.reflect(a, flat);
    CHECK(d.degenerate);
    CHECK(d.temporal == 0.5);
}

TEST_CASE("custom profile tables steer the scorer") {
    namespace fs = std::filesystem;
    std::string dir = fixture::scratch_dir("scoring_profiles");
    std::string path = dir + "/custom.tbl";
    avalign::ClassProfileTable t;
    std::vector<double> low(128, 0.01), high(128, 0.01);
    for (int i = 0; i < 12; ++i) low[static_cast<std::size_t>(i)] = 2.0;
    for (int i = 90; i < 102; ++i) high[static_cast<std::size_t>(i)] = 2.0;
    t.set("rumble", low);
    t.set("hiss", high);
    t.save(path);

    ScorerConfig cfg;
    cfg.profile_path = path;
    Scorer s(cfg);
    CHECK(s.profiles().labels() == std::vector<std::string>{"hiss", "rumble"});

    AudioBuffer bass = fixture::mix(fixture::tone(150.0, 3.0, 0.4),
                                    fixture::white_noise(3.0, 0.01, 43));
    VideoFeatureSeries vr = fixture::pulsed_video(2.0, 0.1, 3.0, "rumble");
    VideoFeatureSeries vh = fixture::pulsed_video(2.0, 0.1, 3.0, "hiss");
    CHECK(s.score_alignment(bass, vr) > s.score_alignment(bass, vh) + 0.05);
    fs::remove_all(fs::path(dir));
}

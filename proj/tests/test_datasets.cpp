#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "ssd/datasets.hpp"

using namespace ssd;

TEST_CASE("generator classes differ only in their transition dynamics") {
  const HmmModel a = mohmm_class_model(0);
  const HmmModel b = mohmm_class_model(1);
  Eigen::Matrix2d want_a, want_b;
  want_a << 0.6, 0.4, 0.4, 0.6;
  want_b << 0.4, 0.6, 0.6, 0.4;
  CHECK(a.transition == want_a);
  CHECK(b.transition == want_b);
  CHECK(a.pi == Eigen::Vector2d(0.5, 0.5));
  CHECK(a.pi == b.pi);
  for (int s = 0; s < 2; ++s) {
    CHECK(a.emissions[s].mean == b.emissions[s].mean);
    CHECK(a.emissions[s].variance == b.emissions[s].variance);
  }
  CHECK(a.emissions[0].mean(0) == 0.0);
  CHECK(a.emissions[1].mean(0) == 3.0);
  CHECK(a.emissions[0].variance(0) == 1.0);
  CHECK(a.emissions[1].variance(0) == 1.0);
}

TEST_CASE("generated lengths stay inside the configured band") {
  MohmmConfig config;
  config.num_sequences = 200;
  config.mean_length = 50;
  config.seed = 8;
  const LabeledDataset data = generate_mohmm(config);
  REQUIRE(data.sequences.size() == 200);
  bool saw_short = false, saw_long = false;
  for (const auto& seq : data.sequences) {
    CHECK(seq.rows() >= 30);
    CHECK(seq.rows() <= 70);
    saw_short |= seq.rows() < 45;
    saw_long |= seq.rows() > 55;
  }
  CHECK(saw_short);
  CHECK(saw_long);
}

TEST_CASE("class choice is a fair coin") {
  MohmmConfig config;
  config.num_sequences = 4000;
  config.mean_length = 5;
  config.seed = 15;
  const LabeledDataset data = generate_mohmm(config);
  long ones = 0;
  for (int l : data.labels) ones += l;
  const double fraction = static_cast<double>(ones) / 4000.0;
  // 5 sigma of a fair binomial with n = 4000
  CHECK(std::abs(fraction - 0.5) < 5.0 * std::sqrt(0.25 / 4000.0));
}

TEST_CASE("posterior-weighted emission means match the generator") {
  MohmmConfig config;
  config.num_sequences = 2;
  config.mean_length = 10000;
  config.seed = 23;
  const LabeledDataset data = generate_mohmm(config);
  const HmmModel truth = mohmm_class_model(data.labels[0]);
  const FbResult fb = forward_backward(data.sequences[0], truth);
  const Eigen::VectorXd occupancy = fb.gamma.colwise().sum().transpose();
  const Eigen::VectorXd weighted =
      (fb.gamma.transpose() * data.sequences[0]).col(0).cwiseQuotient(occupancy);
  CHECK(weighted(0) == Catch::Approx(0.0).margin(0.05));
  CHECK(weighted(1) == Catch::Approx(3.0).margin(0.05));
}

TEST_CASE("generation is deterministic and seed-sensitive") {
  MohmmConfig config;
  config.num_sequences = 10;
  config.mean_length = 20;
  config.seed = 31;
  const LabeledDataset a = generate_mohmm(config);
  const LabeledDataset b = generate_mohmm(config);
  REQUIRE(a.sequences.size() == b.sequences.size());
  CHECK(a.labels == b.labels);
  for (std::size_t i = 0; i < a.sequences.size(); ++i)
    CHECK(a.sequences[i] == b.sequences[i]);

  config.seed = 32;
  const LabeledDataset c = generate_mohmm(config);
  CHECK(a.labels != c.labels);
}

TEST_CASE("mohmm config validation") {
  MohmmConfig config;
  config.num_sequences = 1;
  CHECK_THROWS_AS(generate_mohmm(config), ValidationError);
  config.num_sequences = 10;
  config.mean_length = 4;
  CHECK_THROWS_AS(generate_mohmm(config), ValidationError);
}

TEST_CASE("control-chart surrogate produces six recognizable classes") {
  ControlChartConfig config;
  config.per_class = 5;
  config.length = 60;
  config.seed = 3;
  const LabeledDataset data = generate_control_chart(config);
  REQUIRE(data.sequences.size() == 30);
  REQUIRE(data.num_classes() == 6);

  // Least-squares slope per class; trends must show, flat classes must not.
  auto slope = [](const Sequence& seq) {
    const auto t_len = static_cast<double>(seq.rows());
    double st = 0, sx = 0, stt = 0, stx = 0;
    for (Eigen::Index t = 0; t < seq.rows(); ++t) {
      st += t;
      sx += seq(t, 0);
      stt += static_cast<double>(t) * t;
      stx += t * seq(t, 0);
    }
    return (t_len * stx - st * sx) / (t_len * stt - st * st);
  };
  for (std::size_t i = 0; i < data.sequences.size(); ++i) {
    const double s = slope(data.sequences[i]);
    if (data.labels[i] == 2) CHECK(s > 0.1);
    if (data.labels[i] == 3) CHECK(s < -0.1);
    if (data.labels[i] == 0) CHECK(std::abs(s) < 0.1);
  }

  // Shift classes end away from where they started; normal stays put.
  for (std::size_t i = 0; i < data.sequences.size(); ++i) {
    const Sequence& seq = data.sequences[i];
    const double head = seq.topRows(10).col(0).mean();
    const double tail = seq.bottomRows(10).col(0).mean();
    if (data.labels[i] == 4) CHECK(tail - head > 4.0);
    if (data.labels[i] == 5) CHECK(head - tail > 4.0);
    if (data.labels[i] == 0) CHECK(std::abs(tail - head) < 4.0);
  }
}

TEST_CASE("windowing chops a sequence into equal non-overlapping pieces") {
  Rng rng(derive_seed(501, "window"));
  const Sequence seq = oracle::random_sequence(100, 2, rng);
  const std::vector<Sequence> windows = window_subsequences(seq, 10);
  REQUIRE(windows.size() == 10);
  for (const auto& w : windows) CHECK(w.rows() == 10);
  CHECK(windows[3] == seq.middleRows(30, 10));

  const std::vector<Sequence> partial = window_subsequences(seq.topRows(25), 10);
  REQUIRE(partial.size() == 2);
  Sequence recat(20, 2);
  recat << partial[0], partial[1];
  CHECK(recat == seq.topRows(20));

  CHECK_THROWS_AS(window_subsequences(seq.topRows(5), 10), ValidationError);
  CHECK_THROWS_AS(window_subsequences(seq, 1), ValidationError);
}

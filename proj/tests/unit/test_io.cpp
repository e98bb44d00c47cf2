#include "grassclust/config.hpp"
#include "grassclust/csv.hpp"
#include "grassclust/errors.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace grassclust;

namespace {

PipelineConfig parse_text(const std::string& text) {
  std::istringstream in(text);
  return PipelineConfig::parse(in);
}

std::string config_error(const std::string& text) {
  try {
    parse_text(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(SeriesCsv, ReadsHeaderAndRows) {
  std::istringstream in("a, b\n1, 2\n3.5,-4e-1\n\n");
  const auto s = read_series_csv(in);
  EXPECT_EQ(s.column_names, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(s.series.data(), (Eigen::MatrixXd{{1, 2}, {3.5, -0.4}}));
}

TEST(SeriesCsv, RejectsRaggedRowsBadCellsAndShortFiles) {
  std::istringstream ragged("a,b\n1,2\n3\n");
  EXPECT_THROW(read_series_csv(ragged), InputError);
  std::istringstream bad("a,b\n1,2\n3,x\n");
  try {
    read_series_csv(bad);
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
  std::istringstream one_row("a,b\n1,2\n");
  EXPECT_THROW(read_series_csv(one_row), InputError);
  std::istringstream empty("");
  EXPECT_THROW(read_series_csv(empty), InputError);
  EXPECT_THROW(read_series_csv(std::string("/nonexistent/series.csv")), InputError);
}

TEST(SeriesCsv, WriteThenReadRoundTripsExactly) {
  Eigen::MatrixXd m(3, 2);
  m << 0.1, 1.0 / 3.0, -2.5e-300, 7, 1e10, -0.0;
  std::stringstream io;
  write_matrix_csv(io, m, {"x", "y"});
  const auto s = read_series_csv(io);
  EXPECT_EQ(s.series.data(), m);
  std::stringstream unnamed;
  write_matrix_csv(unnamed, m);
  EXPECT_EQ(unnamed.str().substr(0, 4), "0,1\n");
}

TEST(Config, DefaultsFollowTheStageSettings) {
  const auto c = PipelineConfig::defaults();
  EXPECT_EQ(c.states.karma.window_count, 30);
  EXPECT_EQ(c.states.karma.block_rows, 2);
  EXPECT_EQ(c.states.karma.rank, 2);
  EXPECT_EQ(c.states.karma.forward_width, 60);
  EXPECT_EQ(c.states.karma.backward_width, 20);
  EXPECT_EQ(c.communities.karma.buffer, 20);
  EXPECT_EQ(c.communities.karma.block_rows, 3);
  EXPECT_EQ(c.communities.karma.forward_width, 50);
  EXPECT_EQ(c.communities.karma.backward_width, 10);
  EXPECT_EQ(c.subnets.karma.window_count, 20);
  EXPECT_EQ(c.subnets.karma.buffer, 50);
  EXPECT_EQ(c.subnets.karma.rank, 3);
  EXPECT_EQ(c.subnets.karma.forward_width, 45);
  EXPECT_EQ(c.subnets.karma.backward_width, 5);
  EXPECT_EQ(c.states.kernel.to_string(), KernelSpec::gaussian(0.8).to_string());
  EXPECT_EQ(c.min_dwell, 5);
}

TEST(Config, ParsesSectionsCommentsAndQuotedKernels) {
  const auto c = parse_text(
      "# pipeline\nseed = 7\nmin_dwell = 3\n\n[states]\nkernel = \"0.6*gaussian(0.8)+0.4*laplacian(1.0)\"\n"
      "k_nn = 12   # neighbours\nresolution = 0.5\n[subnets]\nstride = 2\n");
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.min_dwell, 3);
  EXPECT_TRUE(c.states.kernel.is_mixture());
  EXPECT_EQ(c.states.egct.k_nn, 12);
  EXPECT_EQ(c.states.egct.louvain_resolution, 0.5);
  EXPECT_EQ(c.subnets.karma.stride, 2);
  EXPECT_EQ(c.communities.karma.window_count, PipelineConfig::defaults().communities.karma.window_count);
}

TEST(Config, ErrorsNameLineAndField) {
  EXPECT_NE(config_error("seed = 1\n[states]\nk_nn = ten\n").find("config line 3, field 'k_nn'"), std::string::npos);
  EXPECT_NE(config_error("[states]\nwidth = 3\n").find("field 'width'"), std::string::npos);
  EXPECT_NE(config_error("[nodes]\n").find("config line 1"), std::string::npos);
  EXPECT_NE(config_error("seed\n").find("config line 1"), std::string::npos);
  EXPECT_NE(config_error("[states]\nkernel = gaussian(-1)\n").find("field 'kernel'"), std::string::npos);
  EXPECT_NE(config_error("min_dwell = 0\n").find("field 'min_dwell'"), std::string::npos);
  EXPECT_NE(config_error("[communities]\nrank = 500\n").find("[communities]"), std::string::npos);
  EXPECT_THROW(PipelineConfig::load("/nonexistent/grassclust.cfg"), ConfigError);
}

TEST(Config, TextFormRoundTrips) {
  auto c = PipelineConfig::defaults();
  c.seed = 42;
  c.threads = 2;
  c.states.kernel = KernelSpec::parse("0.6*gaussian(0.8)+0.4*laplacian(1.0)");
  c.subnets.egct.sigma_theta = 0.123456789012345;
  const auto again = parse_text(c.to_string());
  EXPECT_EQ(again.to_string(), c.to_string());
  EXPECT_EQ(again.subnets.egct.sigma_theta, 0.123456789012345);
}

#include <gtest/gtest.h>

#include <sstream>

#include "aftrack/config.hpp"

using namespace aftrack;

namespace {

TrackerConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const std::invalid_argument& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(Config, Defaults) {
  const TrackerConfig c;
  EXPECT_EQ(c.lambda, 1e-3);
  EXPECT_EQ(c.eta, 0.01);
  EXPECT_EQ(c.theta_color, 0.04);
  EXPECT_EQ(c.bins, 32);
  EXPECT_EQ(c.alpha, 0.25);
  EXPECT_EQ(c.rho, 1.0);
  EXPECT_EQ(c.c_dim, 12);
  EXPECT_EQ(c.padding, 2.0);
  EXPECT_EQ(c.cell_size, 4);
  EXPECT_EQ(c.solve_mode, SolveMode::Exact);
  EXPECT_NO_THROW(validate_config(c));
  EXPECT_EQ(parse(""), c);
}

TEST(Config, WriteParseRoundTrip) {
  TrackerConfig c;
  c.lambda = 0.1 + 0.2;
  c.eta = 1.0 / 3.0;
  c.solve_mode = SolveMode::Diagonal;
  c.bins = 16;
  c.adaptive_fusion = false;
  c.invert_confidence = true;
  c.c_dim = 8;
  c.scales = 3;
  std::ostringstream out;
  write_config(out, c);
  EXPECT_EQ(parse(out.str()), c);
}

TEST(Config, CommentsBlankLinesAndSpacing) {
  const TrackerConfig c = parse(
      "# tuned for small targets\n"
      "\n"
      "  cf.lambda=0.002   # ridge\n"
      "fusion.alpha =\t0.3\r\n"
      "fusion.adaptive = off\n"
      "fusion.invert_confidence = yes\n"
      "cf.solve = diagonal\n");
  EXPECT_EQ(c.lambda, 0.002);
  EXPECT_EQ(c.alpha, 0.3);
  EXPECT_FALSE(c.adaptive_fusion);
  EXPECT_TRUE(c.invert_confidence);
  EXPECT_EQ(c.solve_mode, SolveMode::Diagonal);
}

TEST(Config, ErrorsNameTheLine) {
  const std::string unknown = error_of("cf.lambda = 0.1\nnot.a.key = 3\n");
  EXPECT_NE(unknown.find("line 2"), std::string::npos) << unknown;
  EXPECT_NE(unknown.find("not.a.key"), std::string::npos) << unknown;

  const std::string bad = error_of("\n\ncolor.bins = many\n");
  EXPECT_NE(bad.find("line 3"), std::string::npos) << bad;

  EXPECT_NE(error_of("cf.lambda 0.1\n").find("line 1"), std::string::npos);
  EXPECT_NE(error_of("cf.solve = iterative\n").find("line 1"), std::string::npos);
  EXPECT_NE(error_of("fusion.adaptive = maybe\n").find("line 1"), std::string::npos);
  EXPECT_NE(error_of("search.scales = 3.5\n").find("line 1"), std::string::npos);
}

TEST(Config, RangeChecksNameTheField) {
  EXPECT_NE(error_of("fusion.alpha = 0.7\n").find("fusion.alpha"), std::string::npos);
  EXPECT_NE(error_of("color.bins = 12\n").find("color.bins"), std::string::npos);
  EXPECT_NE(error_of("search.scales = 4\n").find("search.scales"), std::string::npos);
  EXPECT_NE(error_of("cf.lambda = 0\n").find("cf.lambda"), std::string::npos);
  EXPECT_NE(error_of("cf.eta = 1.5\n").find("cf.eta"), std::string::npos);
  EXPECT_NE(error_of("search.scale_step = 1\n").find("search.scale_step"), std::string::npos);
}

TEST(Config, MissingFileThrows) {
  EXPECT_THROW(load_config("/nonexistent/aftrack.cfg"), std::runtime_error);
}

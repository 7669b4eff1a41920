#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <limits>
#include <random>
#include <sstream>

#include "physarum/error.hpp"
#include "physarum/io.hpp"
#include "support.hpp"

using namespace physarum;
using namespace physarum::io;

namespace {

template <typename Fn>
Error error_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e;
  }
  FAIL("no error raised");
  return Error(ErrorCode::Io, "");
}

}  // namespace

TEST_CASE("parse shipped instances") {
  const auto lp = parse_problem(testing::instance_path("simple2"));
  CHECK(lp.m() == 1);
  CHECK(lp.n() == 2);
  CHECK(lp.c_int()(1) == 2);
  CHECK(parse_problem(testing::instance_path("triangle")).n() == 3);
  CHECK(parse_problem(testing::instance_path("identity2")).m() == 2);
}

TEST_CASE("parse errors") {
  auto e = error_of([] { parse_problem_string(R"({"A": [[1, 1]], "b": [1], "c": [1, 0]})"); });
  CHECK(e.code() == ErrorCode::ValidationFailed);
  REQUIRE(e.cause().has_value());
  CHECK(*e.cause() == ErrorCode::NonPositiveCost);

  e = error_of([] { parse_problem_string(R"({"A": [[1, 1], [1]], "b": [1, 1], "c": [1, 1]})"); });
  CHECK(e.code() == ErrorCode::Malformed);
  CHECK(std::string(e.what()).find("row 1") != std::string::npos);

  CHECK(error_of([] { parse_problem_string("{not json"); }).code() == ErrorCode::Malformed);
  CHECK(error_of([] { parse_problem_string(R"({"A": [[1.5]], "b": [1], "c": [1]})"); }).code() ==
        ErrorCode::Malformed);
  CHECK(error_of([] { parse_problem_string(R"({"b": [1], "c": [1]})"); }).code() == ErrorCode::Malformed);
  CHECK(error_of([] { parse_problem("/nonexistent/problem.json"); }).code() == ErrorCode::Io);

  e = error_of([] { parse_problem_string(R"({"A": [[1, 1], [2, 2]], "b": [1, 2], "c": [1, 1]})"); });
  CHECK(e.code() == ErrorCode::ValidationFailed);
  CHECK(*e.cause() == ErrorCode::RankDeficient);
}

TEST_CASE("serialize then parse is the identity") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 20; ++i) {
    auto lp = testing::random_instance(rng).problem();
    lp.name = "fuzz" + std::to_string(i);
    if (i % 2 == 0) lp.start = Eigen::VectorXd::Constant(lp.A.cols(), 0.1 * (i + 1));
    const auto back = parse_problem_string(serialize_problem(lp)).problem();
    CHECK(back.A == lp.A);
    CHECK(back.b == lp.b);
    CHECK(back.c == lp.c);
    CHECK(back.name == lp.name);
    CHECK(back.start.has_value() == lp.start.has_value());
    if (lp.start) CHECK(*back.start == *lp.start);
    CHECK(serialize_problem(back) == serialize_problem(lp));
  }
}

TEST_CASE("csv round trip is bit exact") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  TraceTable t;
  t.index_name = "t";
  t.header = {"t", "x_0", "V", "E"};
  for (int i = 0; i < 200; ++i) {
    std::vector<std::optional<double>> row;
    row.emplace_back(i * 0.1);
    row.emplace_back(std::ldexp(u(rng), static_cast<int>(i % 600) - 300));
    row.emplace_back(u(rng) / 3.0);
    if (i % 3 == 0) row.emplace_back(std::nullopt);
    else row.emplace_back(std::numeric_limits<double>::denorm_min() * (i + 1));
    t.rows.push_back(row);
  }
  std::stringstream ss;
  write_csv(ss, t);
  const auto back = read_csv(ss);
  CHECK(back.header == t.header);
  CHECK(back.index_name == "t");
  REQUIRE(back.rows.size() == t.rows.size());
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    for (std::size_t j = 0; j < t.header.size(); ++j)
      if (back.rows[i][j] != t.rows[i][j]) ++mismatches;
  CHECK(mismatches == 0);
}

TEST_CASE("trace tables") {
  const auto lp = testing::simple2();
  discrete::DiscreteConfig cfg;
  cfg.max_iters = 5;
  const auto r = discrete::solve(lp, compute_params(lp, DMode::Exact), cfg);
  auto t = trace_table(r.trace);
  CHECK(t.index_name == "k");
  CHECK(t.header == std::vector<std::string>{"k", "x_0", "x_1", "V", "E", "feas_residual", "atp_inf"});
  CHECK(t.rows.size() == 6);

  const auto path = entropy::follow_path(lp, Eigen::Vector2d(0.5, 0.5), {0.0, 1.0});
  t = trace_table(lp, path);
  CHECK(t.index_name == "mu");
  REQUIRE(t.rows.size() == 2);
  CHECK_FALSE(t.rows[1][4].has_value());
  std::stringstream ss;
  write_csv(ss, t);
  std::string header, line;
  std::getline(ss, header);
  std::getline(ss, line);
  CHECK(line.find(",,") != std::string::npos);
}

TEST_CASE("format_number") {
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_number(1.0) == "1");
  CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("result json") {
  const auto lp = testing::simple2();
  const auto j = to_json(compute_params(lp, DMode::Exact));
  CHECK(j["C_s"] == 3);
  CHECK(j["P_max"] == 4.0);
  const auto o = to_json(oracle::enumerate(lp));
  CHECK(o["opt"] == 1.0);
}

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>

#include "helpers.hpp"
#include "majolyap/state.hpp"

using namespace majolyap;
using majolyap::testing::max_abs;

TEST_CASE("vacuum isometry and correlation") {
  const auto s = GaussianPureState::vacuum(3);
  REQUIRE(s.sites() == 3);
  Eigen::MatrixXcd expect = Eigen::MatrixXcd::Zero(6, 3);
  expect.topRows(3).setIdentity();
  REQUIRE(max_abs(s.isometry() - expect) == 0.0);
  Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(6, 6);
  c.topLeftCorner(3, 3).setIdentity();
  REQUIRE(max_abs(s.correlation() - c) == 0.0);
}

TEST_CASE("from_isometry validates shape and orthonormality") {
  REQUIRE_THROWS_AS(GaussianPureState::from_isometry(Eigen::MatrixXcd::Zero(5, 2)),
                    std::invalid_argument);
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(4, 2);
  u(0, 0) = 1.0;
  u(1, 1) = 0.5;  // not normalized
  REQUIRE_THROWS_AS(GaussianPureState::from_isometry(u), std::invalid_argument);
}

TEST_CASE("correlation_entry agrees with the full matrix") {
  const auto s = testing::random_state(4, 31);
  const Eigen::MatrixXcd c = s.correlation();
  for (int a = 0; a < 8; ++a)
    for (int b = 0; b < 8; ++b)
      REQUIRE(std::abs(s.correlation_entry(a, b) - c(a, b)) < 1e-14);
}

TEST_CASE("covariance matches the basis conversion") {
  const auto s = testing::random_state(3, 77);
  REQUIRE(max_abs(Eigen::MatrixXd(
              s.covariance() - correlation_to_covariance(s.correlation()))) == 0.0);
}

TEST_CASE("reorthonormalize removes drift") {
  auto s = testing::random_state(4, 5);
  s.isometry() *= 1.0 + 1e-6;
  REQUIRE(s.orthonormality_residual() > 1e-6);
  s.reorthonormalize();
  REQUIRE(s.orthonormality_residual() < 1e-13);
}

TEST_CASE("state serialization roundtrip") {
  const auto s = testing::random_state(5, 123);
  const std::string buf = serialize_state(s);
  REQUIRE(buf.size() == 16 + 2 * 5 * 5 * 16);
  const auto t = deserialize_state(buf);
  REQUIRE(t.sites() == 5);
  REQUIRE(max_abs(t.isometry() - s.isometry()) == 0.0);
}

TEST_CASE("state header bytes are pinned") {
  const auto s = GaussianPureState::vacuum(2);
  const std::string buf = serialize_state(s);
  REQUIRE(buf.substr(0, 8) == "MAJOLYAP");
  // version 1, then L = 2, both u32 little-endian
  const unsigned char* p = reinterpret_cast<const unsigned char*>(buf.data());
  REQUIRE(p[8] == 1);
  REQUIRE(p[9] == 0);
  REQUIRE(p[10] == 0);
  REQUIRE(p[11] == 0);
  REQUIRE(p[12] == 2);
  REQUIRE(p[13] == 0);
  REQUIRE(p[14] == 0);
  REQUIRE(p[15] == 0);
}

TEST_CASE("deserialize rejects corrupted buffers") {
  const auto s = GaussianPureState::vacuum(2);
  std::string buf = serialize_state(s);
  std::string bad_magic = buf;
  bad_magic[0] = 'X';
  REQUIRE_THROWS_AS(deserialize_state(bad_magic), std::runtime_error);
  std::string truncated = buf.substr(0, buf.size() - 8);
  REQUIRE_THROWS_AS(deserialize_state(truncated), std::runtime_error);
  std::string bad_version = buf;
  bad_version[8] = 9;
  REQUIRE_THROWS_AS(deserialize_state(bad_version), std::runtime_error);
  // payload that is not an isometry
  std::string garbage = buf;
  garbage[20] ^= 0x5a;
  REQUIRE_THROWS(deserialize_state(garbage));
}

TEST_CASE("save_state / load_state roundtrip through a file") {
  namespace fs = std::filesystem;
  const auto s = testing::random_state(3, 9);
  const fs::path path = fs::temp_directory_path() / "majolyap_state_test.bin";
  save_state(path.string(), s);
  const auto t = load_state(path.string());
  REQUIRE(max_abs(t.isometry() - s.isometry()) == 0.0);
  fs::remove(path);
}
